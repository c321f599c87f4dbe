import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsumlab import strongsum as ss
from hsumlab.corpus import cell_average_indicator, default_corpus
from hsumlab.errors import DomainError
from hsumlab.grid import PeriodicSamples, dft_coefficients, grid_points, partial_sum
from hsumlab.maximal import hl_maximal, level_set
from hsumlab.whitney import whitney_refine


def series_for(f, x, n, alpha=2.0, target=None):
    return ss.StrongMeanSeries.from_coeffs(dft_coefficients(f, n), x, n, alpha, target)


def test_partials_match_partial_sum():
    f = default_corpus()[3].samples(512)
    c = dft_coefficients(f, 40)
    s = ss.StrongMeanSeries.from_coeffs(c, 0.4, 40)
    for k in (0, 1, 7, 40):
        assert s.partials[k] == partial_sum(c, k, 0.4)
    with pytest.raises(DomainError):
        ss.StrongMeanSeries(0.0, np.zeros(3), alpha=2.5)


def test_h_alpha_mean_constant_and_trig():
    s = series_for(PeriodicSamples(np.full(64, 2.0)), 0.3, 20, target=2.0)
    assert all(ss.h_alpha_mean(s, n) < 1e-24 for n in range(1, 21))
    with pytest.raises(DomainError):
        ss.h_alpha_mean(s, 0)
    x = 0.9
    f = PeriodicSamples.from_function(lambda t: np.cos(t) + 0.5 * np.sin(3 * t), 256)
    s = series_for(f, x, 60, target=math.cos(x) + 0.5 * math.sin(3 * x))
    head = sum(abs(s.partials[k] - s.target) ** 2 for k in range(1, 3))
    for n in (3, 10, 60):
        assert ss.h_alpha_mean(s, n) == pytest.approx(head / n, abs=1e-12)


def test_h_alpha_mean_square_wave_direct():
    f = PeriodicSamples.from_function(np.sign, 4096)
    c = dft_coefficients(f, 64)
    x = math.pi / 2
    s = ss.StrongMeanSeries.from_coeffs(c, x, 64, 2.0, 1.0)
    direct = 0.0
    for k in range(1, 65):
        Sk = sum((c[j] * np.exp(1j * j * x)).real for j in range(-k, k + 1))
        direct += abs(Sk - 1.0) ** 2
    assert ss.h_alpha_mean(s, 64) == pytest.approx(direct / 64, rel=1e-10)


def test_sigma_star_constant_and_cosine():
    s = series_for(PeriodicSamples(np.full(64, -3.0)), 0.2, 20, alpha=0.5)
    assert ss.sigma_alpha_star(s, 20) == pytest.approx(3.0)
    x = 0.7
    s = series_for(PeriodicSamples.from_function(np.cos, 256), x, 30)
    # S_k = cos x for k >= 1, and the means run over S_1..S_n
    assert ss.sigma_alpha_star(s, 30) == pytest.approx(abs(math.cos(x)), rel=1e-12)


def test_sigma_star_grid_matches_pointwise():
    f = default_corpus()[9].samples(256)
    g = ss.sigma_alpha_star_grid(f, [0.5, 1.0, 2.0], 40)
    c = dft_coefficients(f, 40)
    for i in (0, 50, 133):
        x = f.points[i]
        for a in (0.5, 1.0, 2.0):
            s = ss.StrongMeanSeries.from_coeffs(c, x, 40, a)
            assert g[a].values[i] == pytest.approx(ss.sigma_alpha_star(s), rel=1e-10)
    assert np.all(g[0.5].values <= g[1.0].values * (1 + 1e-12))
    assert np.all(g[1.0].values <= g[2.0].values * (1 + 1e-12))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3))
def test_sigma_star_scaling_and_minkowski(seed, scale):
    rng = np.random.default_rng(seed)
    f = PeriodicSamples(rng.standard_normal(128))
    g = PeriodicSamples(rng.standard_normal(128))
    a = ss.sigma_alpha_star_grid(f, [1.0, 2.0], 20)
    b = ss.sigma_alpha_star_grid(PeriodicSamples(scale * f.values), [1.0, 2.0], 20)
    assert np.allclose(b[2.0].values, abs(scale) * a[2.0].values, rtol=1e-12)
    s = ss.sigma_alpha_star_grid(PeriodicSamples(f.values + g.values), [1.0, 2.0], 20)
    t = ss.sigma_alpha_star_grid(g, [1.0, 2.0], 20)
    for al in (1.0, 2.0):
        assert np.all(s[al].values <= a[al].values + t[al].values + 1e-12)


def test_poisson_kernel():
    r = 0.75
    assert ss.poisson_kernel(r, 0.0) == pytest.approx(1 / (math.pi * 0.25))
    th = np.linspace(0, 3, 50)
    assert np.array_equal(ss.poisson_kernel(r, th), ss.poisson_kernel(r, -th))
    for eps in (0.5, 0.1, 1e-4):
        total = 2 * math.atan(math.pi / eps) / math.pi
        assert total <= 1
    assert 2 * math.atan(math.pi / 1e-6) / math.pi == pytest.approx(1, abs=1e-6)
    with pytest.raises(DomainError):
        ss.poisson_kernel(1.0, 0.0)


def test_poisson_constant_function():
    pb = ss.poisson_average_bound(np.full(32, 2.0), (0.0, 1.0), 2.0, 1.0, 0.5)
    assert pb.lhs <= 2.0 * math.pi and pb.ok


def test_poisson_spike_calculus_oracle():
    c, L = 0.5, 1.0
    vals = np.zeros(256)
    vals[-1] = 256.0
    best = 0.0
    for j in range(16):
        eps = 2.0 ** -j
        pb = ss.poisson_average_bound(vals, (0.0, L), L + c * L, c, 1 - eps, lam=1.0)
        assert pb.ok
        best = max(best, pb.lhs)
    # eps * m / (eps^2 + (cL)^2) peaks at 1/(2c) when eps = cL
    assert best == pytest.approx(1 / (2 * c), rel=2e-2)


def test_poisson_preconditions():
    with pytest.raises(DomainError):
        ss.poisson_average_bound(np.ones(8), (0.0, 1.0), 1.2, 0.5, 0.5)
    with pytest.raises(DomainError):
        ss.poisson_average_bound(np.full(8, 3.0), (0.0, 1.0), 3.0, 0.5, 0.5, lam=1.0)


def test_abel_square_mean():
    r = 0.9
    n_tail = ss.tail_length(r)
    s = ss.StrongMeanSeries(0.0, np.ones(50))
    assert ss.abel_square_mean(s, r) == pytest.approx(1 - r ** (n_tail + 1), abs=1e-14)
    assert ss.abel_square_mean(ss.StrongMeanSeries(0.0, np.zeros(10)), r) == 0
    S = np.random.default_rng(5).uniform(-1, 1, 120)
    s = ss.StrongMeanSeries(0.0, S)
    assert ss.abel_square_mean(s, r) == pytest.approx(ss.abel_square_mean_direct(S, r, n_tail), abs=1e-12)


def test_abel_domination_examples():
    s = ss.StrongMeanSeries(0.0, np.ones(40))
    cmp = ss.abel_domination_check(s, 32)
    assert cmp.cesaro == 1 and cmp.ratio == pytest.approx(1, abs=1e-12) and cmp.ok
    s = ss.StrongMeanSeries(0.0, np.arange(40.0))
    assert ss.abel_domination_check(s, 32).ok
    with pytest.raises(DomainError):
        ss.abel_domination_check(s, 1)


def test_abel_ratio_approaches_e():
    ratios = []
    for n in (4, 16, 64, 256, 1024):
        S = np.zeros(n + 1)
        S[n - 1] = 1.0
        ratios.append(ss.abel_domination_check(ss.StrongMeanSeries(0.0, S), n).ratio)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < math.e < 4
    assert abs(ratios[3] / math.e - 1) < 0.01


def test_kernel_params():
    p = ss.KernelParams(0.5)
    assert 0.5 ** p.n_tail < 1e-14 and p.eps == 0.5
    assert p.n_tail >= math.ceil(math.log(1e-14) / math.log(0.5))
    with pytest.raises(DomainError):
        ss.KernelParams(1.0)


def test_d_kernel_values():
    assert ss.d_kernel_series(ss.KernelParams(0.0), 1.0, 2.0) == pytest.approx(0.25)
    assert ss.d_kernel_closed(ss.KernelParams(0.0), 1.0, 2.0) == pytest.approx(0.25)
    assert ss.d_kernel_closed(ss.KernelParams(0.5), 0.0, 0.0) == pytest.approx(8.5, abs=1e-12)
    p120 = ss.KernelParams(0.5, n_tail=120)
    assert ss.d_kernel_series(p120, 0.0, 0.0) == pytest.approx(8.5, abs=1e-12)
    p = ss.KernelParams(0.5)
    assert ss.d_kernel_series(p, 0.3, 0.7) == pytest.approx(ss.d_kernel_closed(p, 0.3, 0.7), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.9), st.floats(-3.1, 3.1), st.floats(-3.1, 3.1))
def test_d_kernel_symmetry_and_bound(r, x, y):
    p = ss.KernelParams(r)
    a = ss.d_kernel_series(p, x, y)
    assert a == pytest.approx(ss.d_kernel_series(p, y, x), abs=1e-12)
    assert a == pytest.approx(ss.d_kernel_series(p, -x, -y), abs=1e-12)
    slack = ss.d_kernel_truncation_bound(p) + 1e-11
    assert abs(ss.d_kernel_closed(p, x, y) - a) <= slack


def test_d_kernel_grid_agreement():
    g = np.linspace(-math.pi, math.pi, 20)
    X, Y = np.meshgrid(g, g)
    for r in np.linspace(0, 0.9, 5):
        p = ss.KernelParams(r)
        assert np.max(np.abs(ss.d_kernel_closed(p, X, Y) - ss.d_kernel_series(p, X, Y))) <= 1e-10


def test_majorant_check():
    rep = ss.d_kernel_majorant_check(math.pi / 8)
    assert rep.C3 > 0 and rep.interior_violations == 0
    assert rep.exterior_violations >= 1
    assert rep.spot_value == pytest.approx(8.5) and rep.spot_bound == pytest.approx(72.0)
    with pytest.raises(DomainError):
        ss.d_kernel_majorant_check(0.0)


def _three_component_case(N):
    f = PeriodicSamples(20.0 * cell_average_indicator(N, [(-1.01, -0.99), (-0.01, 0.01), (0.99, 1.01)]))
    lam = 2.0
    G = level_set(hl_maximal(f), lam)
    return f, G, lam


def test_double_integral_cases():
    C3 = ss.d_kernel_majorant_check(math.pi / 8).C3
    out = []
    for N in (2048, 4096):
        f, G, lam = _three_component_case(N)
        assert len(G) == 3
        cov = whitney_refine(G, 6)
        xF = 0.5
        est = ss.double_integral_case_estimates(f, cov, xF, 1 - 1 / 64, lam, C3)
        assert est.max_neighbours <= 2
        out.append(est)
    for attr in ("adjacent_constant", "nonadjacent_constant"):
        a, b = getattr(out[0], attr), getattr(out[1], attr)
        assert abs(b / a - 1) < 0.15
    f0 = PeriodicSamples(np.zeros(1024))
    _, G, lam = _three_component_case(1024)
    est = ss.double_integral_case_estimates(f0, whitney_refine(G, 4), 0.5, 0.9, lam, C3)
    assert est.adjacent_sum == 0 and est.nonadjacent_sum == 0
    with pytest.raises(DomainError):
        ss.double_integral_case_estimates(f0, whitney_refine(G, 4), 0.1, 0.9, lam, C3)


def test_power_series_identity():
    r = ss.power_series_abel_identity([1, -1], 0.4)
    assert r.lhs == pytest.approx(0.6) and r.rhs == pytest.approx(0.6) and r.ok
    a = 2.0 ** -np.arange(401)
    r = ss.power_series_abel_identity(a, 0.9)
    assert abs(r.lhs - 1 / 0.55) < 1e-12 and abs(r.rhs - 1 / 0.55) < 1e-12
    rng = np.random.default_rng(2)
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    r = ss.power_series_abel_identity(a, 0.3 + 0.4j, n_tail=200)
    assert abs(r.lhs - r.rhs) < 1e-13 and r.ok
    with pytest.raises(DomainError):
        ss.power_series_abel_identity(a, 1.0)


def test_hausdorff_young():
    N = 4096
    e = PeriodicSamples.from_function(lambda t: np.exp(1j * t), N)
    hy = ss.hausdorff_young_check(e, 1.5)
    assert hy.coeff_norm == pytest.approx(1) and hy.function_norm == pytest.approx(1)
    one = ss.hausdorff_young_check(PeriodicSamples(np.ones(N)), 4 / 3)
    assert one.ratio == pytest.approx(1)
    rng = np.random.default_rng(11)
    x = grid_points(N)
    for _ in range(5):
        ks = rng.choice(40, 5, replace=False)
        v = sum(rng.standard_normal() * np.exp(1j * k * x) for k in ks)
        assert ss.hausdorff_young_check(PeriodicSamples(v), 4 / 3).ratio <= 1 + 1e-6
    with pytest.raises(DomainError):
        ss.hausdorff_young_check(one and PeriodicSamples(np.ones(8)), 2.0)
