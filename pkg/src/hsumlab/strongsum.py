"""Strong means of partial sums, Abel-type means and the kernel ``D(r, x, y)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grid import FourierCoeffs, PeriodicSamples, dft_coefficients, dirichlet_kernel, partial_sums
from .marcinkiewicz import SingularQuadratureConfig, marcinkiewicz_function
from .whitney import WhitneyCover, _cell_overlaps

TAIL_TOL = 1e-14


@dataclass
class StrongMeanSeries:
    """Partial sums ``S_0..S_n`` at one point; ``partials[k]`` is ``S_k``."""

    x: float
    partials: np.ndarray
    alpha: float = 2.0
    target: float = 0.0

    def __post_init__(self):
        self.partials = np.asarray(self.partials)
        if not 0 < self.alpha <= 2:
            raise DomainError("alpha must lie in (0, 2]")

    @property
    def n_max(self) -> int:
        return self.partials.size - 1

    @classmethod
    def from_coeffs(cls, c: FourierCoeffs, x: float, n_max: int, alpha: float = 2.0,
                    target: float | None = None) -> "StrongMeanSeries":
        S = partial_sums(c, n_max, x)
        return cls(x, S, alpha, float(np.real(S[-1])) if target is None else target)


@dataclass(frozen=True)
class KernelParams:
    r: float
    n_tail: int = 0

    def __post_init__(self):
        if not 0 <= self.r < 1:
            raise DomainError("r must lie in [0, 1)")
        need = tail_length(self.r)
        if self.n_tail < need:
            object.__setattr__(self, "n_tail", need)

    @property
    def eps(self) -> float:
        return 1.0 - self.r


def tail_length(r: float, tol: float = TAIL_TOL) -> int:
    """Smallest ``N`` with ``r^N < tol``; 0 for ``r = 0``."""
    if r == 0:
        return 0
    n = math.ceil(math.log(tol) / math.log(r))
    while r ** n >= tol:
        n += 1
    return n


# ---------------------------------------------------------------------------
# strong means


def h_alpha_mean(s: StrongMeanSeries, n: int) -> float:
    """``(1/n) sum_{k=1}^n |S_k - target|^alpha``."""
    if n < 1 or n > s.n_max:
        raise DomainError(f"n must lie in 1..{s.n_max}")
    return float(np.mean(np.abs(s.partials[1:n + 1] - s.target) ** s.alpha))


def sigma_alpha_star(s: StrongMeanSeries, n_max: int | None = None) -> float:
    """``sup_{1<=n<=n_max} [(1/n) sum_{k=1}^n |S_k|^alpha]^(1/alpha)``; no target subtracted."""
    n_max = s.n_max if n_max is None else n_max
    if n_max < 1 or n_max > s.n_max:
        raise DomainError(f"n_max must lie in 1..{s.n_max}")
    p = np.abs(s.partials[1:n_max + 1]) ** s.alpha
    means = np.cumsum(p) / np.arange(1, n_max + 1)
    return float(means.max() ** (1.0 / s.alpha))


def sigma_alpha_star_grid(f: PeriodicSamples, alpha, n_max: int) -> dict[float, PeriodicSamples]:
    """``sigma*_alpha f`` at every grid point, for one or several alphas.

    Partial sums are advanced one degree at a time across the whole grid,
    so memory stays ``O(N)`` per alpha.
    """
    alphas = [alpha] if np.ndim(alpha) == 0 else list(alpha)
    for a in alphas:
        if not 0 < a <= 2:
            raise DomainError("alpha must lie in (0, 2]")
    c = dft_coefficients(f, n_max)
    x = f.points
    K = c.max_degree
    S = np.full(x.shape, c.coeffs[K], dtype=complex)
    sums = {a: np.zeros(x.shape) for a in alphas}
    best = {a: np.zeros(x.shape) for a in alphas}
    for k in range(1, n_max + 1):
        ph = np.exp(1j * k * x)
        S = S + c.coeffs[K + k] * ph + c.coeffs[K - k] * np.conj(ph)
        mag = np.abs(S.real if c.real_input else S)
        for a in alphas:
            sums[a] += mag ** a
            np.maximum(best[a], sums[a] / k, out=best[a])
    return {a: PeriodicSamples(best[a] ** (1.0 / a)) for a in alphas}


# ---------------------------------------------------------------------------
# Poisson kernel


def poisson_kernel(r: float, theta):
    """Working majorant ``(1/pi) eps / (eps^2 + theta^2)`` with ``eps = 1 - r``."""
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    eps = 1.0 - r
    return eps / (eps ** 2 + np.asarray(theta, dtype=float) ** 2) / math.pi


@dataclass
class PoissonBound:
    lhs: float
    rhs: float
    lam: float
    c: float
    eps: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + 1e-6


def poisson_average_bound(values, J: tuple[float, float], u: float, c: float, r: float,
                          lam: float | None = None) -> PoissonBound:
    """``int_J eps/(eps^2 + (u - v)^2) f(v) dv`` against ``lam / (2c)``.

    ``values`` are the constant values of ``f >= 0`` on equal cells of ``J``.
    The kernel is integrated exactly over each cell (arctan), and the bound
    follows from ``eps/(eps^2 + t^2) <= 1/(2|t|)`` with ``|t| >= c|J|``.
    """
    a, b = J
    vals = np.asarray(values, dtype=float)
    if np.any(vals < 0):
        raise DomainError("f must be non-negative")
    L = b - a
    avg = float(vals.mean())
    lam = avg if lam is None else lam
    if avg > lam * (1 + 1e-12):
        raise DomainError("average of f over J exceeds lambda")
    dist = a - u if u <= a else (u - b if u >= b else 0.0)
    if dist < c * L * (1 - 1e-12):
        raise DomainError("d(u, J) < c|J|")
    eps = 1.0 - r
    edges = a + L * np.arange(vals.size + 1) / vals.size
    cell_int = np.diff(np.arctan((edges - u) / eps))
    lhs = float(np.dot(vals, cell_int))
    return PoissonBound(lhs, lam / (2 * c), lam, c, eps)


# ---------------------------------------------------------------------------
# Abel-type means


def abel_square_mean(s: StrongMeanSeries, r: float, n_tail: int | None = None) -> float:
    """``(1 - r) sum_{nu=0}^{N_tail} r^nu |S_nu|^2`` with ``S_nu`` frozen at ``S_{n_max}`` past the data."""
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    n_tail = tail_length(r) if n_tail is None else n_tail
    sq = np.abs(s.partials) ** 2
    m = min(n_tail, s.n_max)
    head = np.dot(r ** np.arange(m + 1), sq[:m + 1])
    tail = 0.0
    if n_tail > m:
        # frozen tail: sq[-1] * (r^(m+1) + ... + r^n_tail)
        tail = sq[-1] * (r ** (m + 1) - r ** (n_tail + 1)) / (1 - r)
    return float((1 - r) * (head + tail))


def abel_square_mean_direct(partials, r: float, n_tail: int) -> float:
    """Term-by-term reference for :func:`abel_square_mean`."""
    total = 0.0
    last = len(partials) - 1
    for nu in range(n_tail + 1):
        S = partials[min(nu, last)]
        total += r ** nu * abs(S) ** 2
    return (1 - r) * total


@dataclass
class AbelComparison:
    n: int
    cesaro: float
    abel: float
    ratio: float

    @property
    def ok(self) -> bool:
        return self.cesaro <= 4 * self.abel * (1 + 1e-12) + 1e-300


def abel_domination_check(s: StrongMeanSeries, n: int) -> AbelComparison:
    """Cesaro mean ``(1/n) sum_{nu<n} S_nu^2`` against the Abel mean at ``r = 1 - 1/n``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    if s.n_max < n - 1:
        raise DomainError("partials must reach index n - 1")
    ces = float(np.mean(np.abs(s.partials[:n]) ** 2))
    ab = abel_square_mean(s, 1.0 - 1.0 / n)
    ratio = ces / ab if ab > 0 else (0.0 if ces == 0 else math.inf)
    return AbelComparison(n, ces, ab, ratio)


# ---------------------------------------------------------------------------
# the kernel D(r, x, y)


def d_kernel_series(p: KernelParams, x, y):
    """``sum_{nu=0}^{N_tail} r^nu D_nu(x) D_nu(y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    for nu in range(p.n_tail + 1):
        w = p.r ** nu
        if w == 0.0 and nu > 0:
            break
        out = out + w * dirichlet_kernel(nu, x) * dirichlet_kernel(nu, y)
    return out if out.ndim else float(out)


def d_kernel_truncation_bound(p: KernelParams) -> float:
    """Bound on the omitted tail using ``|D_nu| <= nu + 1/2``."""
    r, n = p.r, p.n_tail
    if r == 0:
        return 0.0
    # sum_{nu > n} r^nu (nu + 1/2)^2 <= r^(n+1) (n + 3/2)^2 / (1 - r)^3
    return r ** (n + 1) * (n + 1.5) ** 2 / (1 - r) ** 3


def d_kernel_closed(p: KernelParams, x, y):
    """Closed form of ``sum r^nu D_nu(x) D_nu(y)``."""
    r = p.r
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    num = (1 - r) * ((1 - r) ** 2 + 2 * r * (2 + np.cos(x) + np.cos(y)))
    den = 4 * (1 - 2 * r * np.cos(x - y) + r * r) * (1 - 2 * r * np.cos(x + y) + r * r)
    out = num / den
    return out if out.ndim else float(out)


def _majorant(r, a, b, C3):
    e = 1 - r
    return 9 * e / ((e * e + r * C3 * a * a) * (e * e + r * C3 * b * b))


@dataclass
class MajorantReport:
    eps_strip: float
    rs: tuple[float, ...]
    C3: float
    tight_point: tuple[float, float, float]
    n_samples: int
    interior_violations: int
    exterior_samples: int
    exterior_violations: int
    worst_exterior: tuple[float, float, float] | None
    spot_value: float = field(default=float("nan"))   # D(1/2, 0, 0)
    spot_bound: float = field(default=float("nan"))

    @property
    def ok(self) -> bool:
        return self.C3 > 0 and self.interior_violations == 0


def d_kernel_majorant_check(eps_strip: float, rs=(0.5, 0.9, 0.99), n_grid: int = 161,
                            n_exterior: int = 161) -> MajorantReport:
    """Largest ``C3`` for which ``D <= 9(1-r)/([(1-r)^2 + r C3 (x-y)^2][(1-r)^2 + r C3 (x+y)^2])``
    holds on all sampled points of the strip ``|x +- y| <= pi - eps_strip``.

    For each sample the admissible ``C3`` solve a quadratic; the reported value
    is their minimum.  The same ``C3`` is then tested on points outside the
    strip.
    """
    if not 0 < eps_strip < math.pi:
        raise DomainError("eps_strip must lie in (0, pi)")
    g = np.linspace(-math.pi, math.pi, n_grid)
    X, Y = np.meshgrid(g, g, indexing="ij")
    lim = math.pi - eps_strip
    strip = (np.abs(X + Y) <= lim) & (np.abs(X - Y) <= lim)
    best, tight, total = math.inf, (math.nan,) * 3, 0
    for r in rs:
        p = KernelParams(r)
        x, y = X[strip], Y[strip]
        D = d_kernel_closed(p, x, y)
        e = 1 - r
        a2, b2 = (x - y) ** 2, (x + y) ** 2
        # (e^2 + r C a2)(e^2 + r C b2) <= 9 e / D  <=>  A C^2 + B C + c0 <= 0
        A = r * r * a2 * b2
        B = r * e * e * (a2 + b2)
        c0 = e ** 4 - 9 * e / np.where(D > 0, D, np.inf)
        # positive root of A C^2 + B C + c0 in the cancellation-free form
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(B * B - 4 * A * c0, 0.0))
            root = np.where(c0 < 0, -2 * c0 / (B + disc), 0.0)
        root = np.where(D > 0, root, np.inf)
        root = np.where(c0 > 0, 0.0, root)
        i = int(np.argmin(root))
        total += x.size
        if root[i] < best:
            best, tight = float(root[i]), (r, float(x[i]), float(y[i]))
    C3 = best
    viol = 0
    for r in rs:
        p = KernelParams(r)
        x, y = X[strip], Y[strip]
        viol += int(np.count_nonzero(d_kernel_closed(p, x, y) > _majorant(r, x - y, x + y, C3) * (1 + 1e-9)))
    # exterior: points with |x + y| beyond the strip, concentrated near the corner x = y -> pi
    ge = np.linspace(lim / 2, math.pi, n_exterior)
    EX, EY = np.meshgrid(ge, ge, indexing="ij")
    ext = (np.abs(EX + EY) > lim) & (np.abs(EX - EY) <= lim)
    ext_viol, worst, worst_ratio, n_ext = 0, None, 0.0, 0
    for r in rs:
        p = KernelParams(r)
        x, y = EX[ext], EY[ext]
        D = d_kernel_closed(p, x, y)
        M = _majorant(r, x - y, x + y, C3)
        ratio = D / M
        n_ext += x.size
        ext_viol += int(np.count_nonzero(ratio > 1 + 1e-9))
        j = int(np.argmax(ratio))
        if ratio[j] > worst_ratio:
            worst_ratio, worst = float(ratio[j]), (r, float(x[j]), float(y[j]))
    spot = d_kernel_closed(KernelParams(0.5), 0.0, 0.0)
    return MajorantReport(eps_strip, tuple(rs), C3, tight, total, viol, n_ext, ext_viol, worst,
                          spot, _majorant(0.5, 0.0, 0.0, C3))


# ---------------------------------------------------------------------------
# double integral split by adjacency


def _adjacent(I, J) -> bool:
    return I.b == J.a or J.b == I.a


@dataclass
class CaseEstimate:
    adjacent_sum: float
    nonadjacent_sum: float
    F_x: float
    lam: float
    adjacent_constant: float       # adjacent_sum / (lam * F_x)
    nonadjacent_constant: float    # nonadjacent_sum / lam^2
    max_neighbours: int


def double_integral_case_estimates(f: PeriodicSamples, cover: WhitneyCover, x: float, r: float,
                                   lam: float, c: float, sub: int = 4) -> CaseEstimate:
    """Split ``sum_{i,j} (1-r)^2 int_{I_i} int_{I_j} f(v) f(u) / ([(1-r)^2 + c(v-x)^2][(1-r)^2 + c(u-v)^2])``
    by whether ``I_j`` touches ``I_i`` (the diagonal ``j = i`` counts as adjacent).

    ``x`` is physical and must lie in ``F``; each piece is sampled with ``sub``
    midpoints per grid-cell overlap.
    """
    G = cover.G
    from .marcinkiewicz import _inside
    if _inside(np.array([x]), G)[0]:
        raise DomainError("x lies in G")
    ivs = cover.intervals
    nodes, weights, owner = [], [], []
    N = f.n_points
    absf = np.abs(f.values)
    for k, I in enumerate(ivs):
        cells, lens = _cell_overlaps(I.a, I.b, N)
        lo = float(I.a) * math.pi
        starts = lo + np.concatenate(([0.0], np.cumsum(lens)[:-1]))
        t = (np.arange(sub) + 0.5) / sub
        y = (starts[:, None] + lens[:, None] * t[None, :]).ravel()
        w = (np.repeat(absf[cells] * lens / sub, sub))
        nodes.append(y)
        weights.append(w)
        owner.append(np.full(y.size, k))
    y = np.concatenate(nodes)
    w = np.concatenate(weights)
    own = np.concatenate(owner)
    e2 = (1 - r) ** 2
    P = 2 * math.pi
    dx = np.remainder(y - x + math.pi, P) - math.pi
    outer = w / (e2 + c * dx ** 2)
    adj = np.zeros((len(ivs), len(ivs)), dtype=bool)
    nbrs = 0
    for i, I in enumerate(ivs):
        for j, J in enumerate(ivs):
            adj[i, j] = i == j or _adjacent(I, J)
        nbrs = max(nbrs, int(adj[i].sum()) - 1)
    adj_sum = non_sum = 0.0
    step = max(1, 2 ** 22 // max(1, y.size))
    for s in range(0, y.size, step):
        duv = np.remainder(y[s:s + step, None] - y[None, :] + math.pi, P) - math.pi
        inner = w[None, :] / (e2 + c * duv ** 2)
        mask = adj[own[s:s + step]][:, own]
        adj_sum += float(outer[s:s + step] @ np.where(mask, inner, 0.0).sum(axis=1))
        non_sum += float(outer[s:s + step] @ np.where(mask, 0.0, inner).sum(axis=1))
    adj_sum *= e2
    non_sum *= e2
    Fx = marcinkiewicz_function(x, G, SingularQuadratureConfig.for_grid(N))
    return CaseEstimate(adj_sum, non_sum, Fx, lam,
                        adj_sum / (lam * Fx) if Fx > 0 else math.inf,
                        non_sum / lam ** 2, nbrs)


# ---------------------------------------------------------------------------
# power series and Hausdorff-Young


@dataclass
class AbelIdentity:
    lhs: complex
    rhs: complex
    bound: float

    @property
    def ok(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.bound


def power_series_abel_identity(a, x: complex, n_tail: int | None = None) -> AbelIdentity:
    """``sum a_k x^k`` against ``(1 - x) sum S_k x^k`` truncated at ``n_tail``.

    The truncated identity differs by exactly ``S_M x^(M+1)``; the bound adds
    a rounding allowance proportional to the sums involved.
    """
    x = complex(x)
    if abs(x) >= 1:
        raise DomainError("|x| must be < 1")
    a = np.asarray(a, dtype=complex)
    M = max(a.size - 1, n_tail if n_tail is not None else 0)
    coeffs = np.zeros(M + 1, dtype=complex)
    coeffs[:a.size] = a
    powers = x ** np.arange(M + 1)
    S = np.cumsum(coeffs)
    lhs = complex(np.sum(coeffs * powers))
    rhs = complex((1 - x) * np.sum(S * powers))
    scale = float(np.sum(np.abs(coeffs * powers)) + np.sum(np.abs(S * powers)) * (1 + abs(x)))
    bound = abs(S[-1]) * abs(x) ** (M + 1) + 64 * np.finfo(float).eps * scale
    return AbelIdentity(lhs, rhs, bound)


@dataclass
class HausdorffYoung:
    p: float
    q: float
    coeff_norm: float
    function_norm: float

    @property
    def ratio(self) -> float:
        return self.coeff_norm / self.function_norm if self.function_norm > 0 else 0.0


def hausdorff_young_check(f: PeriodicSamples, p: float) -> HausdorffYoung:
    """``(sum |c_k|^q)^(1/q)`` against ``((1/2pi) int |f|^p)^(1/p)`` by grid sums."""
    if not 1 < p < 2:
        raise DomainError("p must lie in (1, 2)")
    q = p / (p - 1)
    c = dft_coefficients(f, f.n_points // 2 - 1).coeffs
    coeff = float(np.sum(np.abs(c) ** q) ** (1 / q))
    func = float(np.mean(np.abs(f.values) ** p) ** (1 / p))
    return HausdorffYoung(p, q, coeff, func)
