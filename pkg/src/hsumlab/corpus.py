"""Test functions and weights on the periodic grid.

Indicator-like members (spikes, fat Cantor sets) are sampled as exact cell
averages so their mass does not drift with the grid; smooth members are
sampled pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UsageError
from .grid import PeriodicSamples, grid_points
from .maximal import WeightSamples, power_weight
from .whitney import OpenIntervalSet

KERNEL_SUPPORT = math.pi / 8


def cell_average_indicator(n_points: int, intervals) -> np.ndarray:
    """Fraction of each grid cell covered by a union of disjoint ``[a, b]`` (physical units)."""
    h = 2 * math.pi / n_points
    edges = -math.pi - h / 2 + h * np.arange(n_points + 1)
    out = np.zeros(n_points)
    for a, b in intervals:
        lo = np.clip(edges[:-1], a, b)
        hi = np.clip(edges[1:], a, b)
        out += (hi - lo) / h
    return out


def fat_cantor_removed(gen: int, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)):
    """Open intervals removed from ``[lo, hi]`` to build a fat Cantor set.

    Generation ``g`` removes an open middle piece of length ``4^-g (hi - lo)``
    from each of the ``2^(g-1)`` closed intervals still present.  The removed
    total tends to ``(hi - lo)/2``.
    """
    length = hi - lo
    keep = [(lo, hi)]
    removed = []
    for g in range(1, gen + 1):
        cut = length / 4 ** g
        nxt = []
        for a, b in keep:
            mid = (a + b) / 2
            removed.append((mid - cut / 2, mid + cut / 2))
            nxt += [(a, mid - cut / 2), (mid + cut / 2, b)]
        keep = nxt
    return sorted(removed), keep


def fat_cantor_open_set(gen: int, lo=Fraction(0), hi=Fraction(1)) -> OpenIntervalSet:
    removed, _ = fat_cantor_removed(gen, Fraction(lo), Fraction(hi))
    return OpenIntervalSet.on_line(removed)


@dataclass
class CorpusEntry:
    name: str
    kind: str
    params: dict = field(default_factory=dict)
    kernel_experiment: bool = False

    @property
    def support_radius(self) -> float | None:
        return _SUPPORT.get(self.kind, lambda p: None)(self.params)

    def samples(self, n_points: int) -> PeriodicSamples:
        try:
            gen = _GENERATORS[self.kind]
        except KeyError:
            raise UsageError(f"unknown corpus kind {self.kind!r}") from None
        return gen(n_points, **self.params)


def _constant(n, value=1.0):
    return PeriodicSamples(np.full(n, float(value)))


def _harmonic(n, k=1, phase=0.0):
    return PeriodicSamples(np.cos(k * grid_points(n) + phase))


def _square_wave(n):
    return PeriodicSamples(np.sign(grid_points(n)))


def _spike(n, m=64, center=0.0):
    # m * indicator of [center, center + 1/m], unit mass
    return PeriodicSamples(m * cell_average_indicator(n, [(center, center + 1.0 / m)]))


def _spike_train(n, k=4, m=64, spacing=0.05):
    # k spikes of mass 1/k each, inside a window of width ~k*spacing around 0
    start = -0.5 * (k - 1) * spacing
    ivs = [(start + j * spacing, start + j * spacing + 1.0 / m) for j in range(k)]
    return PeriodicSamples((m / k) * cell_average_indicator(n, ivs))


def _fat_cantor_indicator(n, gen=4, lo=-0.5, hi=0.5):
    _, keep = fat_cantor_removed(gen, Fraction(lo), Fraction(hi))
    return PeriodicSamples(cell_average_indicator(n, [(float(a), float(b)) for a, b in keep]))


def _sqrt_singular(n, a=0.5, radius=1.0):
    # |x - a|^(-1/2) on |x - a| < radius; the singular cell carries its exact average
    x = grid_points(n)
    h = 2 * math.pi / n
    d = np.abs(np.remainder(x - a + math.pi, 2 * math.pi) - math.pi)
    with np.errstate(divide="ignore"):
        v = np.where(d < radius, 1.0 / np.sqrt(d), 0.0)
    i = int(np.argmin(d))
    # exact mean of |t|^(-1/2) over the cell around x_i
    lo, hi = x[i] - h / 2 - a, x[i] + h / 2 - a
    prim = lambda t: 2.0 * math.copysign(math.sqrt(abs(t)), t)
    v[i] = (prim(hi) - prim(lo)) / h
    return PeriodicSamples(v)


def _random_trig(n, degree=8, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(degree + 1)
    b = rng.standard_normal(degree + 1)
    x = grid_points(n)
    k = np.arange(degree + 1)[:, None]
    return PeriodicSamples((a[:, None] * np.cos(k * x) + b[:, None] * np.sin(k * x)).sum(0))


_GENERATORS = {
    "constant": _constant,
    "harmonic": _harmonic,
    "square_wave": _square_wave,
    "spike": _spike,
    "spike_train": _spike_train,
    "fat_cantor_indicator": _fat_cantor_indicator,
    "sqrt_singular": _sqrt_singular,
    "random_trig": _random_trig,
}

_SUPPORT = {
    "spike": lambda p: 1.0 / p.get("m", 64),
    "spike_train": lambda p: 0.5 * (p.get("k", 4) - 1) * p.get("spacing", 0.05) + 1.0 / p.get("m", 64),
}


def default_corpus(seed: int = 0) -> list[CorpusEntry]:
    return [
        CorpusEntry("constant", "constant"),
        CorpusEntry("cos1", "harmonic", {"k": 1}),
        CorpusEntry("cos5", "harmonic", {"k": 5}),
        CorpusEntry("square", "square_wave"),
        CorpusEntry("spike64", "spike", {"m": 64}, kernel_experiment=True),
        CorpusEntry("spike16", "spike", {"m": 16}, kernel_experiment=True),
        CorpusEntry("train4x64", "spike_train", {"k": 4, "m": 64}, kernel_experiment=True),
        CorpusEntry("cantor4", "fat_cantor_indicator", {"gen": 4}),
        CorpusEntry("cantor6", "fat_cantor_indicator", {"gen": 6}),
        CorpusEntry("sqrt_half", "sqrt_singular", {"a": 0.5}),
        CorpusEntry("trig8", "random_trig", {"degree": 8, "seed": seed}),
        CorpusEntry("trig16", "random_trig", {"degree": 16, "seed": seed + 1}),
    ]


def make_weight(name: str, n_points: int) -> WeightSamples:
    if name == "unit":
        return WeightSamples(PeriodicSamples(np.ones(n_points)))
    if name == "power":
        return power_weight(n_points, -0.5)
    if name == "shifted_linear":
        base = PeriodicSamples(np.zeros(n_points))
        return WeightSamples(PeriodicSamples(np.abs(base.points) + base.cell))
    raise UsageError(f"unknown weight {name!r}")


WEIGHT_NAMES = ("unit", "power", "shifted_linear")
