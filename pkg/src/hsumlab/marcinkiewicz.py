"""Distance functions, the Marcinkiewicz integral and its relatives.

Sets are :class:`OpenIntervalSet` instances; ``F`` always means the closed
complement of the open set ``G``.  Physical coordinates are ``unit`` times the
set's rational coordinates.  Integrands of the form
(piecewise constant)/(x - y)^2 are integrated exactly; everything else goes
through a midpoint rule with an exclusion radius around the singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError
from .grid import PeriodicSamples, grid_points
from .maximal import WeightSamples
from .whitney import OpenIntervalSet, WhitneyCover, _frac

CHUNK = 2 ** 22   # max entries of an (x, y) kernel block


@dataclass(frozen=True)
class SingularQuadratureConfig:
    exclusion_radius: float
    cell_width: float
    rule: str = "midpoint"

    def __post_init__(self):
        if self.exclusion_radius < self.cell_width:
            raise DomainError("exclusion radius must be at least one cell")
        if self.rule != "midpoint":
            raise DomainError(f"unsupported rule {self.rule!r}")

    @classmethod
    def for_grid(cls, n_points: int) -> "SingularQuadratureConfig":
        h = 2 * math.pi / n_points
        return cls(exclusion_radius=h, cell_width=h)


# ---------------------------------------------------------------------------
# distances


def distance_to_set(x, G: OpenIntervalSet):
    """``d(x, F)`` for ``F = G^c``, in ``G``'s coordinates; exact for rational ``x``."""
    if G.period is not None and G.measure() >= G.period:
        raise DomainError("F is empty")
    exact = isinstance(x, (int, Fraction))
    xq = _frac(x) if exact else x
    for a, b in G.components:
        for shift in ((0,) if G.period is None else (-G.period, 0, G.period)):
            lo, hi = a + shift, b + shift
            if lo < xq < hi:
                d = min(xq - lo, hi - xq)
                return d if exact else float(d)
    return Fraction(0) if exact else 0.0


def _physical_components(G: OpenIntervalSet) -> np.ndarray:
    return np.array([[float(a) * G.unit, float(b) * G.unit] for a, b in G.components]).reshape(-1, 2)


def _sep(x, y, period):
    d = x - y
    if period is not None:
        d = np.remainder(d + period / 2, period) - period / 2
    return d


def _period(G: OpenIntervalSet):
    return None if G.period is None else float(G.period) * G.unit


def _inside(x: np.ndarray, G: OpenIntervalSet) -> np.ndarray:
    comps = _physical_components(G)
    P = _period(G)
    inside = np.zeros(x.shape, dtype=bool)
    for a, b in comps:
        if P is None:
            inside |= (x > a) & (x < b)
        else:
            inside |= np.remainder(x - a, P) < (b - a)
            inside &= ~np.isclose(np.remainder(x - a, P), 0.0, rtol=0, atol=1e-15)
    return inside


def quadrature_nodes(G: OpenIntervalSet, cell_width: float):
    """Midpoints, weights and ``d(y, F)`` on an even subdivision of each component."""
    ys, ws, ds = [], [], []
    for a, b in _physical_components(G):
        L = b - a
        n = max(4, 2 * math.ceil(L / (2 * cell_width)))
        w = L / n
        y = a + w * (np.arange(n) + 0.5)
        ys.append(y)
        ws.append(np.full(n, w))
        ds.append(np.minimum(y - a, b - y))
    if not ys:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    return np.concatenate(ys), np.concatenate(ws), np.concatenate(ds)


def marcinkiewicz_function(x, G: OpenIntervalSet, cfg: SingularQuadratureConfig,
                           extended: bool = False):
    """``int_G d(y, F) / (x - y)^2 dy`` by the midpoint rule.

    Nodes closer to ``x`` than the exclusion radius contribute through
    ``d(y, F) <= |x - y|``, capped at ``1/h``.  ``x`` is physical and may be an
    array.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not extended and np.any(_inside(xs, G)):
        raise DomainError("x lies inside G; pass extended=True to evaluate there")
    y, w, d = quadrature_nodes(G, cfg.cell_width)
    out = np.zeros(xs.shape)
    if y.size:
        P = _period(G)
        h = cfg.exclusion_radius
        step = max(1, CHUNK // y.size)
        for s in range(0, xs.size, step):
            sep = np.abs(_sep(xs[s:s + step, None], y[None, :], P))
            with np.errstate(divide="ignore"):
                val = d / sep ** 2
            near = sep < h
            val = np.where(near, np.minimum(val, 1.0 / h), val)
            out[s:s + step] = val @ w
    return out.item() if scalar else out


def marcinkiewicz_closed_form(x: float, G: OpenIntervalSet) -> float:
    """Exact value for ``x`` outside ``G`` on the line (tent integrand, log antiderivatives)."""
    if G.period is not None:
        raise DomainError("closed form implemented for sets on the line")
    total = 0.0
    for a, b in _physical_components(G):
        if a < x < b:
            raise DomainError("x inside G")
        m = 0.5 * (a + b)
        # (y - a)/(y - x)^2 -> ln|t| - (x - a)/t ; (b - y)/(y - x)^2 -> -ln|t| - (b - x)/t, t = y - x
        up = lambda t: math.log(abs(t)) - (x - a) / t
        down = lambda t: -math.log(abs(t)) - (b - x) / t
        total += up(m - x) - up(a - x) if x != a else math.inf
        total += down(b - x) - down(m - x) if x != b else math.inf
    return total


# ---------------------------------------------------------------------------
# the phi function: the length of the component containing y


@dataclass(frozen=True)
class PhiFunction:
    """Piecewise constant: ``|Delta|`` on each component ``Delta`` of ``G``, 0 on ``F``."""

    pieces: tuple[tuple[Fraction, Fraction, Fraction], ...]
    period: Fraction | None = None
    unit: float = 1.0

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        for a, b, c in self._translates():
            if a < x < b:
                return c
        return Fraction(0)

    def _translates(self, reach: int = 1):
        if self.period is None:
            return self.pieces
        P = self.period
        return tuple((a + k * P, b + k * P, c) for k in range(-reach, reach + 1)
                     for a, b, c in self.pieces)

    def samples(self, n_points: int) -> PeriodicSamples:
        """Point samples on the periodic grid, in physical units."""
        x = grid_points(n_points)
        v = np.zeros(n_points)
        for a, b, c in self._translates(2):
            lo, hi = float(a) * self.unit, float(b) * self.unit
            v[(x > lo) & (x < hi)] = float(c) * self.unit
        return PeriodicSamples(v)


def phi_function(G: OpenIntervalSet) -> PhiFunction:
    return PhiFunction(tuple((a, b, b - a) for a, b in G.components), G.period, G.unit)


def phi_integral(x, phi: PhiFunction):
    """``int phi(t + x) / t^2 dt`` piece by piece; ``math.inf`` when a piece touches ``t = 0``.

    On the line the integral runs over all ``t``; on the circle over one
    period centred at ``t = 0``.  Exact when ``x`` is rational.
    """
    exact = isinstance(x, (int, Fraction))
    xq = _frac(x) if exact else x
    total = Fraction(0) if exact else 0.0
    if phi.period is None:
        spans = [(a - xq, b - xq, c) for a, b, c in phi.pieces]
    else:
        half = phi.period / 2
        spans = []
        for a, b, c in phi._translates(2):
            lo, hi = max(a - xq, -half), min(b - xq, half)
            if hi > lo:
                spans.append((lo, hi, c))
    for t1, t2, c in spans:
        if c == 0:
            continue
        if t1 <= 0 <= t2:
            return math.inf
        total += c * (1 / t1 - 1 / t2) if t1 > 0 else c * (1 / -t2 - 1 / -t1)
    return total


def dilate(G: OpenIntervalSet, eps) -> list[tuple[Fraction, Fraction]]:
    """Components scaled by ``1 + eps`` about their centres (may overlap)."""
    eps = _frac(eps)
    return [((a + b) / 2 - (1 + eps) * (b - a) / 2, (a + b) / 2 + (1 + eps) * (b - a) / 2)
            for a, b in G.components]


def _union(intervals):
    merged = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _complement_pieces(blocked) -> list[tuple[float, float]]:
    """Closed pieces of the line outside a union of open intervals (unbounded ends)."""
    merged = _union(blocked)
    out, cur = [], -math.inf
    for a, b in merged:
        out.append((cur, a))
        cur = b
    out.append((cur, math.inf))
    return [(float(p), float(q)) for p, q in out if q > p]


def _log_kernel_integral(p: float, q: float, a: float, b: float) -> float:
    """``int_p^q (int_a^b dy / (x - y)^2) dx`` for ``[p, q]`` disjoint from ``(a, b)``."""
    def prim(x):
        if math.isinf(x):
            return 0.0
        if x == a or x == b:
            return math.inf
        return math.log(abs((b - x) / (a - x)))
    return abs(prim(q) - prim(p))


def phi_integral_over_complement(phi: PhiFunction, G: OpenIntervalSet, eps) -> tuple[float, float]:
    """``int_{F'} int phi(y) / (x - y)^2 dy dx`` with ``F'`` outside the ``(1 + eps)``-dilated components.

    Returns ``(value, value / |G|)``.  Line sets only; the integral over all
    of ``F`` diverges logarithmically at every endpoint.
    """
    if G.period is not None:
        raise DomainError("line sets only")
    pieces = _complement_pieces([(float(a), float(b)) for a, b in dilate(G, eps)])
    total = 0.0
    for a, b, c in phi.pieces:
        af, bf = float(a), float(b)
        for p, q in pieces:
            if q <= af or p >= bf:
                total += float(c) * _log_kernel_integral(p, q, af, bf)
    meas = float(G.measure())
    return total, total / meas if meas else 0.0


# ---------------------------------------------------------------------------
# series majorant over a Whitney cover


def _nearest_translate(a, b, x, period):
    if period is None:
        return a, b
    m = (a + b) / 2
    k = round((x - m) / period) if not isinstance(x, Fraction) else math.floor((x - m) / period + Fraction(1, 2))
    return a + k * period, b + k * period


def _cover_intervals(cover):
    """``(a, b, closed_left, closed_right)`` tuples and the period from a cover or a plain list."""
    if isinstance(cover, WhitneyCover):
        return [(I.a, I.b, I.closed_left, I.closed_right) for I in cover.intervals], cover.G.period
    return [(_frac(a), _frac(b), False, False) for a, b in cover], None


def series_majorant(x, cover, averages) -> float | Fraction:
    """``sum_k avg_k |I_k| int_{I_k} dy / (x - y)^2`` in closed form.

    ``cover`` is a :class:`WhitneyCover` or a list of ``(a, b)`` pairs; ``x``
    is in the same coordinates.  The result is dimensionless and exact for
    rational ``x`` and averages.
    """
    exact = isinstance(x, (int, Fraction))
    xq = _frac(x) if exact else x
    total = Fraction(0) if exact else 0.0
    ivs, P = _cover_intervals(cover)
    for (a, b, cl, cr), avg in zip(ivs, averages):
        a, b = _nearest_translate(a, b, xq, P)
        if not exact:
            a, b = float(a), float(b)
        if a <= xq <= b:
            if (xq == a and not cl) or (xq == b and not cr):
                if avg:
                    return math.inf
                continue
            raise DomainError("x lies inside a cover interval")
        L = b - a
        kern = (1 / (a - xq) - 1 / (b - xq)) if xq < a else (1 / (xq - b) - 1 / (xq - a))
        total += avg * L * kern
    return total


def series_majorant_integral(cover, averages, G: OpenIntervalSet | None = None) -> float:
    """``int_F`` of the series majorant, exactly (log antiderivatives), line sets only."""
    ivs, P = _cover_intervals(cover)
    if G is None:
        if not isinstance(cover, WhitneyCover):
            raise DomainError("pass G when the cover is a plain interval list")
        G = cover.G
    if G.period is not None:
        raise DomainError("line sets only")
    pieces = _complement_pieces([(float(a), float(b)) for a, b in G.components])
    total = 0.0
    for (a, b, _, _), avg in zip(ivs, averages):
        a, b = float(a), float(b)
        inner = sum(_log_kernel_integral(p, q, a, b) for p, q in pieces)
        total += float(avg) * (b - a) * inner
    return total


# ---------------------------------------------------------------------------
# weighted measure of the level set


def _cells_in(G: OpenIntervalSet, n_points: int) -> np.ndarray:
    return _inside(grid_points(n_points), G)


def weighted_level_measure(G: OpenIntervalSet, w: WeightSamples, f: PeriodicSamples,
                           lam: float) -> tuple[float, float]:
    """``(mu(G), (1/lam) int |f| w dx)`` with ``mu = w dx`` summed over grid cells."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    mask = _cells_in(G, f.n_points)
    h = f.cell
    mu_G = float(np.sum(w.values[mask]) * h)
    return mu_G, f.l1_norm(w.values) / lam


# ---------------------------------------------------------------------------
# integrals away from a dilated open set


def _line_view(G: OpenIntervalSet):
    """Components in physical line coordinates, unwrapped so none is split.

    For a periodic set the window starts at the right end of the first
    component; returns ``(components, window)`` with ``window=None`` on the line.
    """
    comps = _physical_components(G)
    if G.period is None or len(comps) == 0:
        return comps, None
    P = _period(G)
    s = comps[0, 1]
    moved = comps.copy()
    moved[0] += P
    order = np.argsort(moved[:, 0])
    return moved[order], (s, s + P)


def _dilated_physical(comps: np.ndarray, eps: float) -> np.ndarray:
    m = comps.mean(axis=1)
    half = (1 + eps) * (comps[:, 1] - comps[:, 0]) / 2
    return np.stack([m - half, m + half], axis=1)


def in_dilated_complement(x: float, G: OpenIntervalSet, eps: float) -> bool:
    comps, win = _line_view(G)
    if win is not None:
        x = win[0] + (x - win[0]) % (win[1] - win[0])
    dil = _dilated_physical(comps, eps)
    return not np.any((x > dil[:, 0]) & (x < dil[:, 1]))


def _gauss_graded(a: float, b: float, levels: int = 40, order: int = 12):
    """Gauss-Legendre nodes on ``[a, b]`` with geometric grading toward both ends."""
    t, wt = np.polynomial.legendre.leggauss(order)
    m = 0.5 * (a + b)
    L = 0.5 * (b - a)
    edges = np.concatenate(([0.0], L * 0.5 ** np.arange(levels, -1, -1)))
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for sign, base in ((1, a), (-1, b)):
            xs.append(base + sign * (c + r * t))
            ws.append(r * wt)
    return np.concatenate(xs), np.concatenate(ws)


def _integrate_over_component(f, a: float, b: float, kernel: Callable[[np.ndarray], np.ndarray],
                              period: float | None) -> float:
    if callable(f):
        y, w = _gauss_graded(a, b)
        return float(np.sum(w * f(y) * kernel(y)))
    # samples: piecewise constant on cells, kernel integrated with 8-point Gauss per overlap
    N = f.n_points
    h = f.cell
    e0 = -math.pi - h / 2
    i0 = math.floor((a - e0) / h)
    i1 = math.ceil((b - e0) / h)
    t, wt = np.polynomial.legendre.leggauss(8)
    total = 0.0
    idx = np.arange(i0, i1)
    lo = np.maximum(a, e0 + idx * h)
    hi = np.minimum(b, e0 + (idx + 1) * h)
    keep = hi > lo
    idx, lo, hi = idx[keep], lo[keep], hi[keep]
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    y = c[:, None] + r[:, None] * t[None, :]
    vals = np.abs(f.values[idx % N])
    total = float(np.sum(vals * r * (kernel(y) @ wt)))
    return total


def surprising_integral(x: float, f, G: OpenIntervalSet, shrink_eps: float,
                        cfg: SingularQuadratureConfig | None = None) -> float:
    """``int_G |f(y)| / (x - y)^2 dy`` for ``x`` outside every ``(1 + eps)``-dilated component.

    ``f`` is either grid samples (constant on cells) or a callable in physical
    coordinates; callables are integrated with Gauss-Legendre panels graded
    geometrically toward the component ends, which handles integrable
    endpoint singularities.
    """
    if not in_dilated_complement(x, G, shrink_eps):
        raise DomainError("x is inside a dilated component")
    comps, win = _line_view(G)
    if win is not None:
        x = win[0] + (x - win[0]) % (win[1] - win[0])
    P = _period(G)
    kern = lambda y: 1.0 / (x - y) ** 2
    return sum(_integrate_over_component(f, a, b, kern, P) for a, b in comps)


@dataclass
class ComponentBound:
    component: tuple[float, float]
    contribution: float     # int_{F~} int_J |f(y)| / (x - y)^2 dy dx
    mass: float             # int_J |f|
    naive_bound: float      # mass / (eps |J|)
    rigorous_bound: float   # (2 + eps) mass / (eps |J|)

    @property
    def ok(self) -> bool:
        return self.contribution <= self.rigorous_bound * (1 + 1e-9)


def surprising_component_bounds(f, G: OpenIntervalSet, shrink_eps: float) -> list[ComponentBound]:
    """Per-component x-integrated contributions over ``F~`` against their bounds.

    ``int_{F~} dx / (x - y)^2`` is evaluated in closed form, so the only
    quadrature is over ``y`` in the component.  For ``y`` in ``J`` it is at
    most ``1/(y - a~) + 1/(b~ - y) <= (2 + eps)/(eps |J|)``.
    """
    comps, win = _line_view(G)
    P = _period(G)
    dil = _dilated_physical(comps, shrink_eps)
    free = _complement_pieces([tuple(r) for r in dil])
    if win is not None:
        free = [(max(p, win[0]), min(q, win[1])) for p, q in free]
        free = [(p, q) for p, q in free if q > p]

    def K(y):
        total = np.zeros_like(y)
        for p, q in free:
            left = q <= y          # piece lies to the left of y
            with np.errstate(divide="ignore"):
                lv = 1.0 / (y - q) - (0.0 if math.isinf(p) else 1.0 / (y - p))
                rv = 1.0 / (p - y) - (0.0 if math.isinf(q) else 1.0 / (q - y))
            total += np.where(left, lv, rv)
        return total

    out = []
    for a, b in comps:
        L = b - a
        contrib = _integrate_over_component(f, a, b, K, P)
        mass = _integrate_over_component(f, a, b, lambda y: np.ones_like(y), P)
        out.append(ComponentBound((float(a), float(b)), contrib, mass,
                                  mass / (shrink_eps * L), (2 + shrink_eps) * mass / (shrink_eps * L)))
    return out


def p_kernel_normalization(p: float, eps: float) -> float:
    """``int eps^(p-1) / (eps^p + |y|^p) dy`` over the line, integrated in ``y`` directly."""
    from scipy.integrate import quad

    if not p > 1:
        raise DomainError("p must exceed 1 for the integral to converge")
    if not eps > 0:
        raise DomainError("eps must be positive")
    g = lambda y: eps ** (p - 1) / (eps ** p + y ** p)
    near, _ = quad(g, 0.0, eps, epsabs=1e-14, epsrel=1e-13)
    mid, _ = quad(g, eps, 1e3 * eps, epsabs=1e-14, epsrel=1e-13, limit=200)
    far, _ = quad(g, 1e3 * eps, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2.0 * (near + mid + far)


# ---------------------------------------------------------------------------
# profiles on the complement


def complement_grid(G: OpenIntervalSet, n_points: int, margin_cells: int = 0) -> np.ndarray:
    """Grid points of ``[-pi, pi)`` in ``F``, at least ``margin_cells`` cells from ``G``."""
    x = grid_points(n_points)
    keep = ~_inside(x, G)
    if margin_cells:
        h = 2 * math.pi / n_points
        P = _period(G)
        for a, b in _physical_components(G):
            for e in (a, b):
                keep &= np.abs(_sep(x, e, P)) >= margin_cells * h
    return x[keep]


def level_constants(values: np.ndarray, cell: float, lambdas, norm: float) -> np.ndarray:
    """``lambda * (cell * #{values > lambda}) / norm`` for each lambda."""
    s = np.sort(values)
    counts = s.size - np.searchsorted(s, lambdas, side="right")
    return np.asarray(lambdas) * counts * cell / norm
