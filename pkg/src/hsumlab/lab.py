"""Verification suites over the corpus, and their CSV/JSON reports."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import marcinkiewicz as mz
from . import strongsum as ss
from .config import ExperimentConfig
from .corpus import fat_cantor_open_set, make_weight
from .errors import DomainError, UsageError
from .grid import PeriodicSamples, dft_coefficients, dirichlet_estimate_check, grid_points, partial_sums
from .maximal import hl_maximal, hl_maximal_bruteforce, level_set, weak_type_report
from .whitney import OpenIntervalSet, expanded_interval, piece_decomposition, verify_cover, whitney_refine

SUITES = ("whitney", "maximal", "marcinkiewicz", "kernels", "strongsum", "weaktype")
N_ARCS = 16
CHECK_HEADER = ["config_hash", "entry", "check", "param", "value", "threshold", "status"]


def fmt(v) -> str:
    """Locale-free, round-trippable text for one CSV cell."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return "" if v is None else str(v)


@dataclass
class SuiteResult:
    name: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    invariants: dict[str, bool] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.invariants[name] = self.invariants.get(name, True) and bool(ok)
        if not ok:
            self.failures.append(f"{name}: {detail}" if detail else name)
        return ok

    @property
    def passed(self) -> bool:
        return all(self.invariants.values())

    def csv_text(self, config_hash: str) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([config_hash] + [fmt(v) for v in row])
        return buf.getvalue()


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _check_row(res: SuiteResult, entry: str, name: str, param, value, threshold, ok: bool,
               invariant: str | None = None):
    res.rows.append([entry, name, param, value, threshold, _status(ok)])
    res.check(invariant or name, ok, f"{entry} {name} {fmt(param)} value={fmt(value)} threshold={fmt(threshold)}")


def _info_row(res: SuiteResult, entry: str, name: str, param, value, threshold=None):
    res.rows.append([entry, name, param, value, threshold, "info"])


# ---------------------------------------------------------------------------
# shift and split into pi/8 arcs


@dataclass
class ShiftedPiece:
    arc: int
    shift: int                     # cells; piece = roll(f * chi_arc, shift)
    samples: PeriodicSamples


def shift_and_split(f: PeriodicSamples) -> list[ShiftedPiece]:
    """Cut the period into 16 arcs of length pi/8 and move each arc's centre to 0."""
    N = f.n_points
    if N % (2 * N_ARCS):
        raise DomainError(f"grid size must be a multiple of {2 * N_ARCS}")
    w = N // N_ARCS
    out = []
    for j in range(N_ARCS):
        v = np.zeros_like(f.values)
        v[j * w:(j + 1) * w] = f.values[j * w:(j + 1) * w]
        shift = N // 2 - (j * w + w // 2)
        out.append(ShiftedPiece(j, shift, PeriodicSamples(np.roll(v, shift))))
    return out


def unshift_and_sum(pieces: list[ShiftedPiece]) -> PeriodicSamples:
    total = np.zeros_like(pieces[0].samples.values)
    for p in pieces:
        total = total + np.roll(p.samples.values, -p.shift)
    return PeriodicSamples(total)


def far_field_constant(piece: PeriodicSamples, alpha: float, n_max: int,
                       min_dist: float = math.pi / 4) -> float:
    """``max sigma*_alpha(piece)(x) / piece*(x)`` over grid ``x`` with ``|x| >= min_dist``."""
    if not np.any(piece.values):
        return 0.0
    sig = ss.sigma_alpha_star_grid(piece, alpha, n_max)[alpha].values
    star = hl_maximal(piece).values
    far = np.abs(piece.points) >= min_dist
    return float(np.max(sig[far] / star[far]))


# ---------------------------------------------------------------------------
# suites


def suite_whitney(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("whitney", ["config_hash", "entry", "lam", "index", "a", "b", "gen", "side",
                                  "dist_equals_length", "expanded_a", "expanded_b", "average", "bound",
                                  "piece_ok"])
    N = cfg.grid_size
    min_ratio = None
    for e in cfg.corpus:
        f = e.samples(N)
        fstar = hl_maximal(f)
        mean = f.l1_norm() / (2 * math.pi)
        for level in cfg.whitney_levels:
            lam = level * mean
            if lam <= 0:
                continue
            G = level_set(fstar, lam)
            if G.is_empty:
                continue
            cover = whitney_refine(G, cfg.whitney_depth)
            rep = verify_cover(cover)
            res.check("distance identity d(I,F) = |I|", rep.distance_identity_ok, f"{e.name} lam={lam}")
            res.check("intervals disjoint and inside G", rep.disjoint_ok and rep.containment_ok,
                      f"{e.name} lam={lam}")
            res.check("adjacent lengths within factor 2", rep.adjacent_ratio_ok, f"{e.name} lam={lam}")
            res.check("uncovered measure equals geometric tail", rep.uncovered_ok, f"{e.name} lam={lam}")
            res.check("min_separation_ratio >= 0.5", rep.separation_ok,
                      f"{e.name} lam={lam} ratio={rep.min_separation_ratio}")
            if rep.min_separation_ratio is not None:
                min_ratio = rep.min_separation_ratio if min_ratio is None else min(min_ratio, rep.min_separation_ratio)
            pieces = piece_decomposition(f, cover, lam)
            for k, (I, p) in enumerate(zip(cover.intervals, pieces)):
                Ie = expanded_interval(I, G)
                res.rows.append([e.name, lam, k, I.a, I.b, I.gen, I.side, rep.distance_identity_ok,
                                 Ie.a, Ie.b, p.average, p.bound, p.ok])
                res.check("piece average <= 2 lam + grid slack", p.ok, f"{e.name} lam={lam} piece={k}")
    if min_ratio is not None:
        res.constants["min_separation_ratio"] = float(min_ratio)
    return res


def suite_maximal(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("maximal", CHECK_HEADER)
    N = cfg.grid_size
    for e in cfg.corpus:
        f = e.samples(N)
        fs = hl_maximal(f)
        gap = float(np.min(fs.values - np.abs(f.values)))
        _check_row(res, e.name, "f* >= |f|", "", gap, -1e-12, gap >= -1e-12)
        small = e.samples(64)
        diff = float(np.max(np.abs(hl_maximal(small).values - hl_maximal_bruteforce(small).values)))
        _check_row(res, e.name, "sliding scan equals brute force", 64, diff, 1e-12, diff <= 1e-12)
        mean = f.l1_norm() / (2 * math.pi)
        _check_row(res, e.name, "f* >= mean |f|", "", float(fs.values.min()), mean,
                   fs.values.min() >= mean * (1 - 1e-12))
    for name in cfg.weights:
        w = make_weight(name, N).with_a1()
        _info_row(res, name, "a1_constant", N, w.a1_constant)
        res.constants[f"a1_constant[{name}]"] = w.a1_constant
        _check_row(res, name, "a1_constant >= 1", N, w.a1_constant, 1.0, w.a1_constant >= 1 - 1e-12)
    rep = dirichlet_estimate_check(64, n_points=N)
    _check_row(res, "dirichlet", "|D_n(u)| <= 2(1/|u| + 1/2)", 64, rep.max_ratio, 1.0, not rep.violated)
    _info_row(res, "dirichlet", "unscaled violations", 64, rep.unscaled_violations)
    return res


def suite_weaktype(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("weaktype", ["config_hash", "entry", "operator", "weight", "lam", "measure",
                                   "constant"])
    N = cfg.grid_size
    lams = cfg.lambda_grid.values()
    weights = {name: make_weight(name, N).with_a1() for name in cfg.weights}
    for e in cfg.corpus:
        f = e.samples(N)
        ops = {"fstar": hl_maximal(f)}
        for a, s in ss.sigma_alpha_star_grid(f, cfg.alphas, cfg.n_max).items():
            ops[f"sigma_star[{a!r}]"] = s
        unweighted = {}
        for op, Tf in ops.items():
            for wname, w in weights.items():
                rep = weak_type_report(Tf, f, lams, None if wname == "unit" else w)
                for lam, m, c in zip(rep.lambdas, rep.measures, rep.constants):
                    res.rows.append([e.name, op, wname, lam, m, c])
                res.constants[f"{e.name}:{op}:{wname}"] = rep.sup_constant
                if wname == "unit":
                    unweighted[op] = rep.sup_constant
                res.check("measure non-increasing in lambda", bool(np.all(np.diff(rep.measures) <= 0)),
                          f"{e.name} {op} {wname}")
            for wname, w in weights.items():
                if wname == "unit":
                    continue
                wc = res.constants[f"{e.name}:{op}:{wname}"]
                res.check("weighted constant <= a1 x unweighted", wc <= w.a1_constant * unweighted[op] + 1e-12,
                          f"{e.name} {op} {wname}: {wc} vs {w.a1_constant} x {unweighted[op]}")
        if e.kind == "spike":
            c = res.constants[f"{e.name}:fstar:unit"]
            res.check("spike f* constant in [1.8, 2.05]", 1.8 <= c <= 2.05, f"{e.name}: {c}")
    return res


def suite_marcinkiewicz(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("marcinkiewicz", ["config_hash", "entry", "series", "x", "value", "reference",
                                        "status"])
    N = cfg.grid_size
    qc = mz.SingularQuadratureConfig.for_grid(N)

    def row(entry, series, x, value, reference=None, ok=None, invariant=None):
        res.rows.append([entry, series, x, value, reference, "info" if ok is None else _status(ok)])
        if ok is not None:
            res.check(invariant or series, ok, f"{entry} {series} x={fmt(x)} value={fmt(value)}")

    G = OpenIntervalSet.on_line([(0, 1)])
    xs = np.concatenate((np.linspace(-3.0, -0.05, 60), np.linspace(1.05, 4.0, 60)))
    Fx = mz.marcinkiewicz_function(xs, G, qc)
    for x, v in zip(xs, Fx):
        exact = mz.marcinkiewicz_closed_form(float(x), G)
        row("unit_interval", "profile", x, v, exact, abs(v - exact) <= 1e-2 * max(1.0, exact),
            "F(x) matches closed form")
    v = mz.marcinkiewicz_function(-1.0, G, qc)
    row("unit_interval", "F(-1) vs ln(9/8)", -1.0, v, math.log(9 / 8), abs(v - math.log(9 / 8)) <= 1e-3)
    phi = mz.phi_function(G)
    pv = mz.phi_integral(Fraction(-1), phi)
    row("unit_interval", "phi integral at -1 equals 1/2", -1, pv, Fraction(1, 2), pv == Fraction(1, 2))
    row("unit_interval", "phi integral diverges at 0", 0, float(mz.phi_integral(Fraction(0), phi)), "inf",
        math.isinf(mz.phi_integral(Fraction(0), phi)))
    m = mz.series_majorant(Fraction(-1), [(0, 1)], [1])
    row("unit_interval", "series majorant at -1", -1, m, Fraction(1, 2), m == Fraction(1, 2))

    lams = cfg.lambda_grid.values()
    for gen in (4, 6):
        name = f"fat_cantor_gen{gen}"
        Gc = fat_cantor_open_set(gen, Fraction(-1, 2), Fraction(1, 2))
        xg = mz.complement_grid(Gc, N)
        Fg = mz.marcinkiewicz_function(xg, Gc, qc)
        consts = mz.level_constants(Fg, 2 * math.pi / N, lams, Gc.physical_measure())
        res.constants[f"{name}:F weak constant"] = float(consts.max())
        row(name, "F weak constant", "", float(consts.max()))
        for eps in (0.5, 0.25):
            val, ratio = mz.phi_integral_over_complement(mz.phi_function(Gc), Gc, eps)
            row(name, f"phi integral over F' / |G| (eps={eps})", eps, ratio)
        cover = whitney_refine(Gc, 10)
        C = mz.series_majorant_integral(cover, [2.0] * len(cover.intervals)) / (2.0 * Gc.physical_measure())
        row(name, "series majorant integral / (lam |G|)", 2.0, C, 4 * math.log(2), C <= 4 * math.log(2),
            "series majorant integral <= 4 ln2 lam |G|")
        f = lambda y: np.ones_like(y)
        for b in mz.surprising_component_bounds(f, Gc, 0.5)[:4]:
            row(name, "component contribution vs (2+eps)/(eps|J|) mass", b.component[0], b.contribution,
                b.rigorous_bound, b.contribution <= b.rigorous_bound * (1 + 1e-9),
                "component contribution <= (2+eps) mass / (eps |J|)")
    # sqrt singularity: the constant-1 per-component bound fails, the (2+eps) bound holds
    Gs = OpenIntervalSet.on_line([(0, 1)])
    sq = lambda y: 1.0 / np.sqrt(np.maximum(y, 1e-300))
    for b in mz.surprising_component_bounds(sq, Gs, 0.5):
        row("sqrt_singular", "contribution", 0.5, b.contribution)
        row("sqrt_singular", "mass/(eps|J|)", 0.5, b.naive_bound)
        row("sqrt_singular", "contribution <= (2+eps) mass/(eps|J|)", 0.5, b.contribution, b.rigorous_bound,
            b.contribution <= b.rigorous_bound * (1 + 1e-9),
            "component contribution <= (2+eps) mass / (eps |J|)")
    for p, ref in ((2.0, math.pi), (4.0, math.pi / math.sqrt(2))):
        for eps in (1e-2, 1.0, 1e2):
            val = mz.p_kernel_normalization(p, eps)
            row("p_kernel", f"normalization p={p!r}", eps, val, ref, abs(val - ref) <= 1e-6)
    return res


def suite_kernels(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("kernels", CHECK_HEADER)
    g = np.linspace(-math.pi, math.pi, 20)
    X, Y = np.meshgrid(g, g, indexing="ij")
    for r in (0.0, 0.5, 0.9):
        p = ss.KernelParams(r)
        diff = float(np.max(np.abs(ss.d_kernel_closed(p, X, Y) - ss.d_kernel_series(p, X, Y))))
        _check_row(res, "D", "max |closed - series|", r, diff, 1e-10, diff <= 1e-10)
        _info_row(res, "D", "n_tail", r, p.n_tail)
    spot = ss.d_kernel_closed(ss.KernelParams(0.5), 0.0, 0.0)
    _check_row(res, "D", "D(1/2,0,0) = 8.5", 0.5, spot, 8.5, abs(spot - 8.5) <= 1e-12)
    rep = ss.d_kernel_majorant_check(math.pi / 8)
    res.constants["C3"] = rep.C3
    _check_row(res, "D", "majorant C3 > 0", rep.eps_strip, rep.C3, 0.0, rep.C3 > 0)
    _check_row(res, "D", "majorant holds on strip", rep.eps_strip, rep.interior_violations, 0,
               rep.interior_violations == 0)
    _check_row(res, "D", "majorant fails outside strip", rep.eps_strip, rep.exterior_violations, 1,
               rep.exterior_violations >= 1)
    _check_row(res, "D", "majorant at x=y=0, r=1/2", 0.5, rep.spot_value, rep.spot_bound,
               rep.spot_value <= rep.spot_bound)
    for r in (0.5, 0.9):
        p = ss.KernelParams(r)
        th = np.linspace(-math.pi, math.pi, 2001)
        _check_row(res, "poisson", "kernel symmetric", r, float(np.max(np.abs(ss.poisson_kernel(r, th) -
                   ss.poisson_kernel(r, -th)))), 0.0, bool(np.all(ss.poisson_kernel(r, th) == ss.poisson_kernel(r, -th))))
        total = 2 * math.atan(math.pi / p.eps) / math.pi
        _check_row(res, "poisson", "integral over period <= 1", r, total, 1.0, total <= 1.0)
    return res


def _abel_probe(n: int) -> np.ndarray:
    """Partials of ``cos((n-1)x) - cos(nx)`` at ``x = 0``: only ``S_(n-1)`` is nonzero."""
    S = np.zeros(n + 1)
    S[n - 1] = 1.0
    return S


def suite_strongsum(cfg: ExperimentConfig) -> SuiteResult:
    res = SuiteResult("strongsum", CHECK_HEADER)
    N = cfg.grid_size
    rng = np.random.default_rng(cfg.seed)
    n_abel = max(cfg.abel_ns)
    xs = grid_points(64)
    worst = 0.0
    for e in cfg.corpus:
        f = e.samples(N)
        c = dft_coefficients(f, n_abel)
        S = partial_sums(c, n_abel, xs)
        ratios = []
        for n in cfg.abel_ns:
            for j, x in enumerate(xs):
                cmp = ss.abel_domination_check(ss.StrongMeanSeries(float(x), S[:, j]), n)
                res.check("cesaro <= 4 abel", cmp.ok, f"{e.name} n={n} x={x}")
                ratios.append(cmp.ratio)
        worst = max(worst, max(ratios))
        _info_row(res, e.name, "max cesaro/abel", "", max(ratios), 4.0)
        # sigma* scaling and Minkowski at a few points
        s1 = ss.sigma_alpha_star_grid(f, 2.0, 32)[2.0].values
        s3 = ss.sigma_alpha_star_grid(PeriodicSamples(-3.0 * f.values), 2.0, 32)[2.0].values
        err = float(np.max(np.abs(s3 - 3.0 * s1)))
        _check_row(res, e.name, "sigma* scaling", 3.0, err, 1e-9 * max(1.0, float(s1.max())),
                   err <= 1e-9 * max(1.0, float(s1.max())))
        sh = ss.sigma_alpha_star_grid(f, [0.5, 1.0, 2.0], 32)
        ok = bool(np.all(sh[0.5].values <= sh[1.0].values * (1 + 1e-12) + 1e-12)
                  and np.all(sh[1.0].values <= sh[2.0].values * (1 + 1e-12) + 1e-12))
        _check_row(res, e.name, "power-mean monotone in alpha", "", ok, True, ok)
    res.constants["max cesaro/abel (corpus)"] = worst
    for n in cfg.abel_ns:
        cmp = ss.abel_domination_check(ss.StrongMeanSeries(0.0, _abel_probe(n)), n)
        res.check("cesaro <= 4 abel", cmp.ok, f"probe n={n}")
        _info_row(res, "abel_probe", "cesaro/abel", n, cmp.ratio, math.e)
        res.constants[f"abel probe ratio n={n}"] = cmp.ratio
    # Poisson key inequality: spike at the end of J nearest u
    for cc in (0.25, 0.5, 1.0):
        worst_p = 0.0
        for i in range(0, 7):
            L = 2.0 ** -i
            for jeps in range(0, 12):
                eps = 2.0 ** -jeps
                vals = np.zeros(64)
                vals[-1] = 64.0
                u = L + cc * L
                pb = ss.poisson_average_bound(vals, (0.0, L), u, cc, 1 - eps, lam=1.0)
                worst_p = max(worst_p, pb.lhs / pb.lam)
                res.check("poisson key inequality", pb.ok, f"c={cc} |J|={L} eps={eps}")
        _check_row(res, "poisson", "sup lhs/lam", cc, worst_p, 1 / (2 * cc), worst_p <= 1 / (2 * cc) + 1e-6,
                   "poisson key inequality")
    # Hausdorff-Young on random trig polynomials
    for p in (4 / 3, 1.5):
        worst_hy = 0.0
        for _ in range(20):
            ks = rng.choice(np.arange(-30, 31), size=5, replace=False)
            amp = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            x = grid_points(4096)
            v = (amp[:, None] * np.exp(1j * ks[:, None] * x[None, :])).sum(0)
            worst_hy = max(worst_hy, ss.hausdorff_young_check(PeriodicSamples(v), p).ratio)
        _check_row(res, "hausdorff_young", "max ratio", p, worst_hy, 1 + 1e-6, worst_hy <= 1 + 1e-6)
    # power series identity
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    pid = ss.power_series_abel_identity(a, 0.3 + 0.4j)
    _check_row(res, "power_series", "|lhs - rhs|", "0.3+0.4i", abs(pid.lhs - pid.rhs), pid.bound, pid.ok)
    # far field of pi/8 pieces and exact reconstruction
    for e in cfg.corpus:
        if not e.kernel_experiment:
            continue
        f = e.samples(N)
        pieces = shift_and_split(f)
        ok = bool(np.array_equal(unshift_and_sum(pieces).values, f.values))
        _check_row(res, e.name, "shift_and_split reconstructs f", "", ok, True, ok)
        far = max(far_field_constant(p.samples, 2.0, cfg.n_max) for p in pieces if np.any(p.samples.values))
        _info_row(res, e.name, "far-field sigma*/f*", 2.0, far)
        res.constants[f"{e.name}:far-field constant"] = far
        _check_row(res, e.name, "far-field constant finite", 2.0, far, "inf", math.isfinite(far))
    # double integral split for kernel experiments
    C3 = ss.d_kernel_majorant_check(math.pi / 8).C3
    for e in cfg.corpus:
        if not e.kernel_experiment:
            continue
        f = e.samples(N)
        fs = hl_maximal(f)
        lam = 2.0 * f.l1_norm() / (2 * math.pi) * 8
        G = level_set(fs, lam)
        if G.is_empty:
            continue
        cover = whitney_refine(G, 6)
        x = float(G.components[0][0]) * math.pi - 0.05
        est = ss.double_integral_case_estimates(f, cover, x, 1 - 1 / 64, lam, C3)
        _check_row(res, e.name, "adjacent neighbours <= 2", "", est.max_neighbours, 2, est.max_neighbours <= 2)
        _info_row(res, e.name, "adjacent_sum / (lam F(x))", x, est.adjacent_constant)
        _info_row(res, e.name, "nonadjacent_sum / lam^2", x, est.nonadjacent_constant)
    return res


RUNNERS = {
    "whitney": suite_whitney,
    "maximal": suite_maximal,
    "marcinkiewicz": suite_marcinkiewicz,
    "kernels": suite_kernels,
    "strongsum": suite_strongsum,
    "weaktype": suite_weaktype,
}


# ---------------------------------------------------------------------------
# orchestration and reports


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def write_reports(res: SuiteResult, cfg: ExperimentConfig, out: Path) -> None:
    h = cfg.config_hash()
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{res.name}.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(res.csv_text(h))
    summary = {
        "suite": res.name,
        "config_hash": h,
        "seed": cfg.seed,
        "grid_size": cfg.grid_size,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "passed": res.passed,
        "invariants": {k: _status(v) for k, v in res.invariants.items()},
        "constants": {k: _json_safe(float(v)) for k, v in res.constants.items()},
        "failures": res.failures,
    }
    (out / f"{res.name}.summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")


def run_suite(cfg: ExperimentConfig, suite: str, out: str | Path | None = None,
              log=None) -> tuple[int, list[SuiteResult]]:
    """Run one suite (or ``all``); returns the exit code and the results."""
    if suite == "all":
        names = list(SUITES)
    elif suite in RUNNERS:
        names = [suite]
    else:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    out = Path(out if out is not None else cfg.output_dir)
    results = []
    for name in names:
        res = RUNNERS[name](cfg)
        write_reports(res, cfg, out)
        results.append(res)
        if log is not None:
            for inv, ok in res.invariants.items():
                log(f"[{name}] {inv}: {_status(ok)}")
            for line in res.failures[:20]:
                log(f"[{name}] FAIL {line}")
    return (0 if all(r.passed for r in results) else 1), results


PLOT_HEADER = ["config_hash", "series", "entry", "x", "variable", "value"]


def emit_plot_data(results_dir: str | Path) -> str:
    """Long-format CSV of weak-type curves and Marcinkiewicz profiles found in ``results_dir``."""
    d = Path(results_dir)
    if not d.is_dir():
        raise UsageError(f"no such results directory: {d}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(PLOT_HEADER)
    wt = d / "weaktype.csv"
    if wt.exists():
        with open(wt, newline="", encoding="utf-8") as fh:
            for r in csv.DictReader(fh):
                series = f"weak:{r['operator']}:{r['weight']}"
                w.writerow([r["config_hash"], series, r["entry"], r["lam"], "measure", r["measure"]])
                w.writerow([r["config_hash"], series, r["entry"], r["lam"], "constant", r["constant"]])
    mc = d / "marcinkiewicz.csv"
    if mc.exists():
        with open(mc, newline="", encoding="utf-8") as fh:
            for r in csv.DictReader(fh):
                if r["series"] == "profile":
                    w.writerow([r["config_hash"], "marcinkiewicz", r["entry"], r["x"], "F", r["value"]])
    return buf.getvalue()
