"""Open interval sets and the thirds-then-halving Whitney-type cover.

All geometry is exact: endpoints are :class:`fractions.Fraction` in a
coordinate system whose physical length per unit is ``unit`` (``pi`` for sets
read off the periodic grid, ``1`` for sets on the real line).  Ratios such as
``d(I, F) / |I|`` do not depend on ``unit``, so every identity the cover is
supposed to satisfy is checked in integer arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .grid import PeriodicSamples

DEFAULT_DEPTH = 20
MAX_DENOMINATOR_BITS = 4096


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class OpenIntervalSet:
    """Disjoint open intervals ``(a_k, b_k)`` sorted by left endpoint.

    On a periodic ambient (``period`` set) a component may wrap: its right
    end is then larger than ``base + period``.
    """

    components: tuple[tuple[Fraction, Fraction], ...] = ()
    period: Fraction | None = None
    base: Fraction = Fraction(0)
    unit: float = 1.0

    def __post_init__(self):
        comps = tuple(sorted((_frac(a), _frac(b)) for a, b in self.components))
        for a, b in comps:
            if not a < b:
                raise DomainError(f"empty or reversed component ({a}, {b})")
        for (_, b0), (a1, _) in zip(comps, comps[1:]):
            if not b0 < a1:
                raise DomainError("components must be separated by points of the complement")
        if self.period is not None:
            P = _frac(self.period)
            object.__setattr__(self, "period", P)
            if comps and comps[-1][1] - comps[0][0] >= P:
                raise DomainError("complement F is empty on the circle")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "base", _frac(self.base))

    @classmethod
    def on_line(cls, comps: Iterable[Sequence], unit: float = 1.0) -> "OpenIntervalSet":
        return cls(tuple((Fraction(a), Fraction(b)) for a, b in comps), unit=unit)

    @classmethod
    def parse(cls, text: str) -> "OpenIntervalSet":
        """Parse ``"0,1;2,4"`` into ``(0,1) U (2,4)`` on the line."""
        comps = []
        for chunk in filter(None, (c.strip() for c in text.split(";"))):
            a, b = chunk.split(",")
            comps.append((Fraction(a.strip()), Fraction(b.strip())))
        return cls.on_line(comps)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def is_empty(self) -> bool:
        return not self.components

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.components), Fraction(0))

    def physical_measure(self) -> float:
        return float(self.measure()) * self.unit

    def _reduce(self, x: Fraction) -> Fraction:
        if self.period is None:
            return x
        return self.base + (x - self.base) % self.period

    def component_of(self, x) -> int | None:
        """Index of the component containing ``x`` (open), else None."""
        x = self._reduce(_frac(x))
        for k, (a, b) in enumerate(self.components):
            if a < x < b:
                return k
            if self.period is not None and a < x + self.period < b:
                return k
        return None

    def contains(self, x) -> bool:
        return self.component_of(x) is not None

    def boundary_points(self) -> list[Fraction]:
        return [p for ab in self.components for p in ab]

    def complement_pieces(self, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
        """Closed pieces of ``F`` inside ``[lo, hi]`` (non-periodic reading)."""
        out, cur = [], _frac(lo)
        for a, b in self.components:
            if b <= cur:
                continue
            if a >= hi:
                break
            if a > cur:
                out.append((cur, min(a, _frac(hi))))
            cur = max(cur, b)
        if cur < hi:
            out.append((cur, _frac(hi)))
        return out


def connected_components(mask, periodic: bool = True, left_edge=None, cell=None,
                         unit: float | None = None) -> OpenIntervalSet:
    """Merge maximal runs of true cells into open intervals.

    Cell ``i`` is ``[left_edge + i*cell, left_edge + (i+1)*cell]``.  The
    defaults describe the periodic grid of :mod:`hsumlab.grid` in units of
    ``pi``: cell ``i`` is centred at ``-1 + 2i/N``.
    """
    mask = np.asarray(mask, dtype=bool)
    N = mask.size
    if cell is None:
        cell = Fraction(2, N)
    if left_edge is None:
        left_edge = Fraction(-1) - Fraction(1, N)
    if unit is None:
        unit = math.pi
    cell, left_edge = _frac(cell), _frac(left_edge)
    period = cell * N if periodic else None
    if periodic and N and mask.all():
        raise DomainError("mask covers the whole circle; complement F is empty")

    padded = np.concatenate(([False], mask, [False]))
    d = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(d == 1)
    stops = np.flatnonzero(d == -1)
    runs = [(int(s), int(e)) for s, e in zip(starts, stops)]
    if periodic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == N:
        first = runs.pop(0)
        last = runs.pop()
        runs.append((last[0], first[1] + N))
    comps = tuple((left_edge + s * cell, left_edge + e * cell) for s, e in runs)
    return OpenIntervalSet(comps, period=period, base=left_edge, unit=unit)


@dataclass(frozen=True)
class CoverInterval:
    a: Fraction
    b: Fraction
    parent: int
    gen: int
    side: str            # "L", "C" or "R"
    closed_left: bool
    closed_right: bool

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    def to_json(self) -> str:
        def fs(q: Fraction) -> str:
            return f"{q.numerator}/{q.denominator}"
        return json.dumps({"a": fs(self.a), "b": fs(self.b), "parent": self.parent,
                           "gen": self.gen, "side": self.side,
                           "closed_left": self.closed_left, "closed_right": self.closed_right})

    @classmethod
    def from_json(cls, line: str) -> "CoverInterval":
        d = json.loads(line)
        return cls(Fraction(d["a"]), Fraction(d["b"]), int(d["parent"]), int(d["gen"]),
                   d["side"], bool(d["closed_left"]), bool(d["closed_right"]))


@dataclass
class WhitneyCover:
    G: OpenIntervalSet
    intervals: list[CoverInterval]
    truncation_depth: int

    def covered_measure(self) -> Fraction:
        return sum((I.length for I in self.intervals), Fraction(0))

    def uncovered_bound(self) -> Fraction:
        """Exact uncovered measure left by truncation: ``sum_k (2/3)|J_k| 2^-depth``."""
        return sum((Fraction(2, 3) * (b - a) / 2 ** self.truncation_depth
                    for a, b in self.G.components), Fraction(0))

    def to_jsonl(self) -> str:
        return "".join(I.to_json() + "\n" for I in self.intervals)

    @staticmethod
    def intervals_from_jsonl(text: str) -> list[CoverInterval]:
        return [CoverInterval.from_json(l) for l in text.splitlines() if l.strip()]


def whitney_refine(G: OpenIntervalSet, depth: int = DEFAULT_DEPTH) -> WhitneyCover:
    """Refine each component into a closed central third plus halved side pieces.

    Generation ``g`` on the left of ``J = (a, b)`` is
    ``[a + L/(3*2^g), a + L/(3*2^(g-1)))``, closed toward the centre; the right
    side mirrors it.  Every piece sits at distance exactly its own length
    from the complement.
    """
    if G.is_empty:
        raise DomainError("G is empty")
    if depth < 0:
        raise DomainError("depth must be >= 0")
    worst = max(_frac(b - a).denominator for a, b in G.components)
    if worst.bit_length() + depth + 2 > MAX_DENOMINATOR_BITS:
        raise CapacityError(f"depth {depth} exceeds the {MAX_DENOMINATOR_BITS}-bit denominator budget")

    out: list[CoverInterval] = []
    for k, (a, b) in enumerate(G.components):
        third = (b - a) / 3
        out.append(CoverInterval(a + third, b - third, k, 0, "C", True, True))
        left, right = [], []
        for g in range(1, depth + 1):
            inner = third / 2 ** (g - 1)
            outer = third / 2 ** g
            left.append(CoverInterval(a + outer, a + inner, k, g, "L", True, False))
            right.append(CoverInterval(b - inner, b - outer, k, g, "R", False, True))
        out.extend(reversed(left))
        out.extend(right)
    out.sort(key=lambda I: (I.a, I.b))
    return WhitneyCover(G, out, depth)


# ---------------------------------------------------------------------------
# verification (integer arithmetic on a common denominator)


@dataclass
class CoverReport:
    n_intervals: int
    distance_identity_ok: bool
    containment_ok: bool
    disjoint_ok: bool
    min_separation_ratio: Fraction | None   # None when there are no non-adjacent pairs
    separation_ok: bool
    adjacent_ratio_ok: bool
    uncovered: Fraction
    uncovered_expected: Fraction
    uncovered_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.distance_identity_ok and self.containment_ok and self.disjoint_ok
                and self.separation_ok and self.adjacent_ratio_ok and self.uncovered_ok)


def verify_cover(cover: WhitneyCover, F: OpenIntervalSet | None = None) -> CoverReport:
    """Exact checks of the cover: ``d(I, F) = |I|`` and non-adjacent separation.

    ``F`` is given through the open set whose complement it is (defaults to
    the cover's own ``G``).  Distances to ``F`` are measured against every
    component endpoint, so the check does not reuse the construction.
    """
    G = cover.G if F is None else F
    ivs = cover.intervals
    dens = [q.denominator for I in ivs for q in (I.a, I.b)]
    dens += [q.denominator for q in G.boundary_points()]
    if G.period is not None:
        dens.append(G.period.denominator)
    D = math.lcm(*dens) if dens else 1

    def z(q: Fraction) -> int:
        return q.numerator * (D // q.denominator)

    P = z(G.period) if G.period is not None else None
    A = [z(I.a) for I in ivs]
    B = [z(I.b) for I in ivs]
    comps = [(z(a), z(b)) for a, b in G.components]
    bpts = [p for ab in comps for p in ab]
    failures: list[str] = []

    def point_dist(a, b, p):
        if P is None:
            return a - p if p <= a else (p - b if p >= b else 0)
        if (p - a) % P <= b - a:
            return 0
        return min((a - p) % P, (p - b) % P)

    dist_ok = True
    contain_ok = True
    for i, I in enumerate(ivs):
        a, b = A[i], B[i]
        ca, cb = comps[I.parent]
        inside = (ca <= a and b <= cb) if P is None else ((a - ca) % P + (b - a) <= cb - ca)
        if not inside or (a == ca and I.closed_left) or (b == cb and I.closed_right):
            contain_ok = False
            failures.append(f"interval {i} not inside component {I.parent}")
        dF = min(point_dist(a, b, p) for p in bpts)
        if dF != b - a:
            dist_ok = False
            failures.append(f"d(I,F) != |I| for interval {i}: {Fraction(dF, D)} vs {Fraction(b - a, D)}")

    base = z(G.base)
    start = [A[i] if P is None else base + (A[i] - base) % P for i in range(len(ivs))]
    order = sorted(range(len(ivs)), key=lambda i: start[i])
    disjoint_ok = True
    pairs = [(i, j, start[j] - (start[i] + B[i] - A[i])) for i, j in zip(order, order[1:])]
    if P is not None and len(order) > 1:
        i, j = order[-1], order[0]
        pairs.append((i, j, start[j] + P - (start[i] + B[i] - A[i])))
    for i, j, g in pairs:
        if g < 0 or (g == 0 and ivs[i].closed_right and ivs[j].closed_left):
            disjoint_ok = False
            failures.append(f"intervals {i} and {j} overlap")

    best_num, best_den = None, None
    adj_ok = True
    n = len(ivs)
    for i in range(n):
        ai, bi = A[i], B[i]
        li = bi - ai
        for j in range(i + 1, n):
            aj, bj = A[j], B[j]
            lj = bj - aj
            if P is None:
                d = aj - bi if aj >= bi else (ai - bj if ai >= bj else 0)
            else:
                d = min((aj - bi) % P, (ai - bj) % P)
            if d == 0:
                if not (li <= 2 * lj and lj <= 2 * li):
                    adj_ok = False
                    failures.append(f"adjacent intervals {i},{j} lengths not comparable")
                continue
            m = max(li, lj)
            if best_num is None or d * best_den < best_num * m:
                best_num, best_den = d, m
    min_ratio = Fraction(best_num, best_den) if best_num is not None else None
    sep_ok = min_ratio is None or min_ratio >= Fraction(1, 2)
    if not sep_ok:
        failures.append(f"separation ratio {min_ratio} < 1/2")

    uncovered = cover.G.measure() - cover.covered_measure()
    expected = cover.uncovered_bound()
    return CoverReport(
        n_intervals=n,
        distance_identity_ok=dist_ok,
        containment_ok=contain_ok,
        disjoint_ok=disjoint_ok,
        min_separation_ratio=min_ratio,
        separation_ok=sep_ok,
        adjacent_ratio_ok=adj_ok,
        uncovered=uncovered,
        uncovered_expected=expected,
        uncovered_ok=uncovered == expected,
        failures=failures,
    )


def expanded_interval(I: CoverInterval, G: OpenIntervalSet) -> CoverInterval:
    """Extend ``I`` by ``|I|`` toward the nearest point of ``F`` (ties go left).

    The result has length ``2|I|`` and its closure touches ``F``.
    """
    a, b = G.components[I.parent]
    left_gap = I.a - a
    right_gap = b - I.b
    L = I.length
    if left_gap <= right_gap:
        return CoverInterval(I.a - L, I.b, I.parent, I.gen, I.side, False, I.closed_right)
    return CoverInterval(I.a, I.b + L, I.parent, I.gen, I.side, I.closed_left, False)


# ---------------------------------------------------------------------------
# averages of a grid function over cover pieces


@dataclass
class Piece:
    interval: CoverInterval
    length: float            # physical |I_k|
    mass: float              # integral of |f| over I_k
    average: float
    bound: float             # 2*lam + grid slack
    cells: np.ndarray
    weights: np.ndarray      # overlap of I_k with each listed cell, physical length
    values: np.ndarray

    @property
    def ok(self) -> bool:
        return self.average <= self.bound * (1 + 1e-12)

    def restriction(self, n_points: int) -> PeriodicSamples:
        """``f * chi_I`` on the grid, with partial cells weighted by overlap."""
        out = np.zeros(n_points, dtype=self.values.dtype)
        h = 2 * math.pi / n_points
        np.add.at(out, self.cells, self.values * self.weights / h)
        return PeriodicSamples(out)


def _cell_overlaps(a: Fraction, b: Fraction, n_points: int):
    """Cells (indices mod N) meeting ``[a, b]`` (pi units) and the exact overlap lengths."""
    edge0 = Fraction(-1) - Fraction(1, n_points)
    w = Fraction(2, n_points)
    i0 = math.floor((a - edge0) / w)
    i1 = math.ceil((b - edge0) / w)
    idx, lens = [], []
    for i in range(i0, i1):
        lo = max(a, edge0 + i * w)
        hi = min(b, edge0 + (i + 1) * w)
        if hi > lo:
            idx.append(i % n_points)
            lens.append(float(hi - lo) * math.pi)
    return np.array(idx, dtype=int), np.array(lens)


def piece_decomposition(f: PeriodicSamples, cover: WhitneyCover, lam: float) -> list[Piece]:
    """Averages ``(1/|I_k|) int_{I_k} |f|`` over the cover built from ``{f* > lam}``.

    Each average is compared with ``2*lam`` plus the grid slack
    ``2*lam*h/|I_k|``: the expanded interval reaches the boundary of ``G``, and
    rounding it out to whole cells and adding the neighbouring cell (where
    ``f* <= lam``) costs at most two cells of length.
    """
    if cover.G.period is None or abs(cover.G.unit - math.pi) > 1e-15:
        raise DomainError("cover must come from a grid level set (pi units, periodic)")
    N = f.n_points
    h = f.cell
    absf = np.abs(f.values)
    pieces = []
    for I in cover.intervals:
        cells, lens = _cell_overlaps(I.a, I.b, N)
        vals = absf[cells]
        mass = float(np.dot(vals, lens))
        length = float(I.length) * math.pi
        avg = mass / length
        bound = 2 * lam + 2 * lam * h / length
        pieces.append(Piece(I, length, mass, avg, bound, cells, lens, f.values[cells]))
    return pieces


def integral_over(f: PeriodicSamples, G: OpenIntervalSet) -> float:
    """``int_G |f|`` with ``f`` constant on grid cells (pi-unit, periodic sets)."""
    absf = np.abs(f.values)
    total = 0.0
    for a, b in G.components:
        cells, lens = _cell_overlaps(a, b, f.n_points)
        total += float(np.dot(absf[cells], lens))
    return total


def uncovered_integral(f: PeriodicSamples, cover: WhitneyCover) -> float:
    """``int |f|`` over the parts of ``G`` the truncated cover leaves out."""
    absf = np.abs(f.values)
    total = 0.0
    d = cover.truncation_depth
    for a, b in cover.G.components:
        tail = (b - a) / 3 / 2 ** d
        for lo, hi in ((a, a + tail), (b - tail, b)):
            cells, lens = _cell_overlaps(lo, hi, f.n_points)
            total += float(np.dot(absf[cells], lens))
    return total
