"""Non-centred Hardy-Littlewood maximal function on the periodic grid.

Intervals are unions of consecutive grid cells (wrapping across +-pi, at most
the whole period), so ``hl_maximal`` is an exact finite maximum and can only
grow when the grid is refined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d

from .errors import DomainError, ShapeError
from .grid import PeriodicSamples
from .whitney import OpenIntervalSet, connected_components


def hl_maximal(f: PeriodicSamples) -> PeriodicSamples:
    """Exact sup of cell-run averages of ``|f|`` over runs containing each point.

    For each run length ``L`` the best run containing point ``k`` starts in
    ``[k-L+1, k]``; a sliding-window maximum over starts gives all points at
    once, so the whole scan is ``O(N^2)`` with ``O(N)`` vector work per length.
    """
    a = np.abs(np.asarray(f.values, dtype=float))
    N = a.size
    prefix = np.concatenate(([0.0], np.cumsum(np.concatenate((a, a)))))
    best = np.zeros(N)
    for L in range(1, N + 1):
        avg = (prefix[L:L + N] - prefix[:N]) / L
        win = maximum_filter1d(avg, size=L, mode="wrap", origin=(L - 1) // 2)
        np.maximum(best, win, out=best)
    return PeriodicSamples(best)


def hl_maximal_bruteforce(f: PeriodicSamples) -> PeriodicSamples:
    """Direct enumeration of every (start, length) pair; reference for small grids."""
    a = np.abs(np.asarray(f.values, dtype=float))
    N = a.size
    best = np.zeros(N)
    for s in range(N):
        total = 0.0
        for L in range(1, N + 1):
            total += a[(s + L - 1) % N]
            avg = total / L
            for j in range(L):
                k = (s + j) % N
                if avg > best[k]:
                    best[k] = avg
    return PeriodicSamples(best)


def level_set(fstar: PeriodicSamples, lam: float) -> OpenIntervalSet:
    """``{f* > lam}`` as open intervals with endpoints on cell boundaries (units of pi)."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return connected_components(fstar.values > lam, periodic=True)


@dataclass(frozen=True)
class WeightSamples:
    base: PeriodicSamples
    a1_constant: float | None = None

    def __post_init__(self):
        if not np.all(self.base.values > 0):
            raise DomainError("weight must be strictly positive")

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def with_a1(self) -> "WeightSamples":
        return WeightSamples(self.base, a1_check(self))


def a1_check(w: WeightSamples | PeriodicSamples) -> float:
    """Empirical A1 constant ``max_i w*(x_i) / w(x_i)``."""
    base = w.base if isinstance(w, WeightSamples) else w
    vals = np.asarray(base.values, dtype=float)
    if not np.all(vals > 0):
        raise DomainError("weight must be strictly positive")
    return float(np.max(hl_maximal(base).values / vals))


def power_weight(n_points: int, exponent: float = -0.5, floor: float | None = None) -> WeightSamples:
    """``max(|x|, h)^exponent``; ``h`` defaults to one grid cell."""
    base = PeriodicSamples(np.zeros(n_points))
    h = base.cell if floor is None else floor
    return WeightSamples(PeriodicSamples(np.maximum(np.abs(base.points), h) ** exponent))


@dataclass
class WeakTypeReport:
    lambdas: np.ndarray
    measures: np.ndarray
    constants: np.ndarray
    sup_constant: float
    norm: float
    weighted: bool = False

    @property
    def argmax_lambda(self) -> float:
        return float(self.lambdas[int(np.argmax(self.constants))]) if self.lambdas.size else float("nan")


def weak_type_report(Tf: PeriodicSamples, f: PeriodicSamples, lambdas,
                     w: WeightSamples | None = None) -> WeakTypeReport:
    """``lambda * m({Tf > lambda}) / ||f||`` over a lambda grid, by cell counting."""
    lambdas = np.asarray(lambdas, dtype=float)
    if Tf.n_points != f.n_points or (w is not None and w.base.n_points != f.n_points):
        raise ShapeError("Tf, f and w must share one grid")
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) <= 0):
        raise DomainError("lambdas must be positive and increasing")
    h = f.cell
    cell_mass = np.full(f.n_points, h) if w is None else w.values * h
    norm = f.l1_norm(None if w is None else w.values)
    tv = np.asarray(Tf.values, dtype=float)
    # sort once; measure of {Tf > lam} is a suffix sum
    order = np.argsort(tv, kind="stable")
    sorted_vals = tv[order]
    tail = np.concatenate((np.cumsum(cell_mass[order][::-1])[::-1], [0.0]))
    idx = np.searchsorted(sorted_vals, lambdas, side="right")
    measures = tail[idx]
    constants = lambdas * measures / norm if norm > 0 else np.zeros_like(lambdas)
    return WeakTypeReport(lambdas, measures, constants,
                          float(constants.max()) if constants.size else 0.0, norm, w is not None)
