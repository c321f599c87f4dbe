"""Periodic sampling, Fourier coefficients, partial sums and the Dirichlet kernel.

Functions on the circle are carried as ``N`` equispaced samples on
``[-pi, pi)``: ``values[i] = f(-pi + 2*pi*i/N)``.  Each sample is also the
value of ``f`` on the cell of width ``2*pi/N`` centred at that point; the
maximal-function and decomposition code relies on that cell picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, DomainError

TWO_PI = 2.0 * math.pi

# Below this distance from a multiple of 2*pi the kernel is summed term by term.
SINGULAR_RADIUS = 1e-8


@dataclass(frozen=True)
class PeriodicSamples:
    """A 2*pi-periodic function sampled on the uniform grid."""

    values: np.ndarray
    singular: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if vals.size < 2:
            raise ValueError("need at least two samples")
        if not self.singular and not np.all(np.isfinite(vals)):
            raise ValueError("non-finite samples in a set not flagged singular")
        object.__setattr__(self, "values", vals)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def cell(self) -> float:
        return TWO_PI / self.n_points

    @property
    def points(self) -> np.ndarray:
        return grid_points(self.n_points)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def l1_norm(self, weight: np.ndarray | None = None) -> float:
        a = np.abs(self.values)
        if weight is not None:
            a = a * weight
        return float(a.sum() * self.cell)

    @classmethod
    def from_function(cls, func, n_points: int, singular: bool = False) -> "PeriodicSamples":
        return cls(np.asarray(func(grid_points(n_points))), singular=singular)


def grid_points(n_points: int) -> np.ndarray:
    return -math.pi + TWO_PI * np.arange(n_points) / n_points


@dataclass(frozen=True)
class FourierCoeffs:
    """Coefficients ``c_k`` for ``k = -K..K``; ``coeffs[K + k]`` holds ``c_k``."""

    coeffs: np.ndarray
    real_input: bool = False

    @property
    def max_degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __getitem__(self, k: int) -> complex:
        K = self.max_degree
        if abs(k) > K:
            raise IndexError(f"degree {k} outside -{K}..{K}")
        return complex(self.coeffs[K + k])


def dft_coefficients(f: PeriodicSamples, K: int) -> FourierCoeffs:
    """Trapezoid-rule Fourier coefficients ``c_k = (1/N) sum_i f(x_i) exp(-i k x_i)``.

    Raises AliasingError when ``K`` passes ``N/2 - 1``.
    """
    N = f.n_points
    if K < 0:
        raise DomainError("K must be non-negative")
    if K > N // 2 - 1:
        raise AliasingError(f"K={K} exceeds N/2-1={N // 2 - 1} for N={N}")
    spec = np.fft.fft(f.values) / N
    k = np.arange(-K, K + 1)
    # grid starts at -pi, so exp(-i k x_i) = (-1)^k exp(-2 pi i k i / N)
    c = spec[k % N] * np.where(k % 2 == 0, 1.0, -1.0)
    return FourierCoeffs(c, real_input=f.is_real)


def partial_sums(c: FourierCoeffs, n: int, x) -> np.ndarray:
    """All partial sums ``S_0..S_n`` at ``x``; result has shape ``(n + 1,) + shape(x)``.

    Terms are accumulated in increasing degree, so ``partial_sums(c, n, x)[m]``
    is bit-identical to ``partial_sum(c, m, x)``.
    """
    if n < 0 or n > c.max_degree:
        raise DomainError(f"n={n} outside 0..{c.max_degree}")
    x = np.asarray(x, dtype=float)
    K = c.max_degree
    k = np.arange(1, n + 1).reshape((-1,) + (1,) * x.ndim)
    phase = np.exp(1j * k * x)
    terms = np.empty((n + 1,) + x.shape, dtype=complex)
    terms[0] = c.coeffs[K]
    terms[1:] = c.coeffs[K + 1:K + n + 1].reshape(k.shape) * phase \
        + c.coeffs[K - n:K][::-1].reshape(k.shape) * np.conj(phase)
    out = np.cumsum(terms, axis=0)
    return out.real if c.real_input else out


def partial_sum(c: FourierCoeffs, n: int, x):
    """Symmetric partial sum ``S_n(f, x)``.

    The transform pair is oriented so that ``f = exp(ix)`` gives
    ``S_1 = exp(ix)``; the sum runs over ``|k| <= n``.
    """
    out = partial_sums(c, n, x)[n]
    return out if np.ndim(out) else out.item()


def dirichlet_kernel(nu: int, x):
    """``D_nu(x) = sin((nu + 1/2) x) / (2 sin(x/2))``, equal to ``nu + 1/2`` at ``x = 0 mod 2pi``."""
    if nu < 0:
        raise DomainError("nu must be non-negative")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    red = np.remainder(x + math.pi, TWO_PI) - math.pi
    near = np.abs(red) < SINGULAR_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin((nu + 0.5) * x) / (2.0 * np.sin(0.5 * x))
    if np.any(near):
        xs = red[near]
        out[near] = 0.5 + sum((np.cos(k * xs) for k in range(1, nu + 1)), np.zeros_like(xs))
    return out.item() if scalar else out


@dataclass
class DirichletEstimateReport:
    n_max: int
    n_points: int
    scale: float
    max_excess: float          # max of |ratio| - scale * (1/|u| + 1/2)
    max_ratio: float           # max of |ratio| / (scale * (1/|u| + 1/2))
    worst_n: int
    worst_u: float
    unscaled_violations: int   # points failing the estimate with scale 1
    violated: bool


def dirichlet_estimate_check(n_max: int, n_points: int = 4096, scale: float = 2.0,
                             tol: float = 1e-9) -> DirichletEstimateReport:
    """Sweep ``|sin((n+1/2)u) / sin(u/2)|`` against ``scale * (1/|u| + 1/2)``.

    The un-halved ratio only obeys the bound with ``scale = 2``; the report
    also counts how often the scale-1 reading fails.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    u = grid_points(n_points)[1:]
    u = u[u != 0.0]
    n = np.arange(1, n_max + 1)[:, None]
    ratio = np.abs(np.sin((n + 0.5) * u) / np.sin(0.5 * u))
    base = 1.0 / np.abs(u) + 0.5
    excess = ratio - scale * base
    i, j = np.unravel_index(np.argmax(excess), excess.shape)
    return DirichletEstimateReport(
        n_max=n_max,
        n_points=n_points,
        scale=scale,
        max_excess=float(excess[i, j]),
        max_ratio=float((ratio / (scale * base)).max()),
        worst_n=int(n[i, 0]),
        worst_u=float(u[j]),
        unscaled_violations=int(np.count_nonzero(ratio > base + tol)),
        violated=bool(excess[i, j] > tol),
    )
