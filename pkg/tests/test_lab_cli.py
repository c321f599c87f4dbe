import csv
import io
import json
import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from hsumlab.cli import main
from hsumlab.config import ExperimentConfig
from hsumlab.corpus import KERNEL_SUPPORT, default_corpus, fat_cantor_removed
from hsumlab.errors import UsageError
from hsumlab.grid import PeriodicSamples
from hsumlab.lab import emit_plot_data, far_field_constant, run_suite, shift_and_split, unshift_and_sum
from hsumlab.whitney import CoverInterval


def small_cfg(tmp_path, **kw):
    d = {"grid_size": 512, "n_max": 64, "abel_ns": [4, 16, 64], "output_dir": str(tmp_path)}
    d.update(kw)
    return ExperimentConfig.from_dict(d)


def test_default_corpus():
    corpus = default_corpus()
    assert len(corpus) == 12 and len({e.name for e in corpus}) == 12
    for e in corpus:
        f = e.samples(512)
        assert math.isfinite(f.l1_norm()) and f.l1_norm() > 0
        if e.kernel_experiment:
            assert e.support_radius <= KERNEL_SUPPORT


def test_fat_cantor_measure():
    removed, keep = fat_cantor_removed(8)
    total = sum(b - a for a, b in removed)
    assert total == sum(Fr(2 ** (g - 1), 4 ** g) for g in range(1, 9))
    assert total < Fr(1, 2) and len(keep) == 2 ** 8


def test_spike_mass_is_grid_independent():
    e = default_corpus()[4]
    assert e.samples(512).l1_norm() == pytest.approx(1.0, abs=1e-12)
    assert e.samples(4096).l1_norm() == pytest.approx(1.0, abs=1e-12)


def test_config_validation_and_hash(tmp_path):
    a = small_cfg(tmp_path)
    b = small_cfg(tmp_path / "elsewhere")
    assert a.config_hash() == b.config_hash()
    assert small_cfg(tmp_path, seed=1).config_hash() != a.config_hash()
    with pytest.raises(UsageError):
        small_cfg(tmp_path, grid_size=100)
    with pytest.raises(UsageError):
        small_cfg(tmp_path, grid_size=128)
    with pytest.raises(UsageError):
        small_cfg(tmp_path, lambda_grid={"min": 0, "max": 1, "count": 3, "log_spaced": True})
    with pytest.raises(UsageError):
        small_cfg(tmp_path, corpus=[{"name": "x", "kind": "nope"}])
    with pytest.raises(UsageError):
        small_cfg(tmp_path, bogus=1)
    back = ExperimentConfig.from_dict(json.loads(json.dumps(a.to_dict())))
    assert back.config_hash() == a.config_hash()


def test_shift_and_split():
    one = PeriodicSamples(np.ones(512))
    pieces = shift_and_split(one)
    assert len(pieces) == 16
    first = pieces[0].samples.values
    assert all(np.array_equal(p.samples.values, first) for p in pieces)
    nz = np.flatnonzero(first)
    x = one.points
    assert x[nz].min() >= -math.pi / 16 - 1e-12 and x[nz].max() < math.pi / 16
    f = default_corpus()[9].samples(512)
    assert np.array_equal(unshift_and_sum(shift_and_split(f)).values, f.values)


def test_far_field_constant_finite():
    f = default_corpus()[4].samples(512)
    for p in shift_and_split(f):
        c = far_field_constant(p.samples, 2.0, 64)
        assert math.isfinite(c) and c >= 0


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("suite", ["whitney", "maximal", "marcinkiewicz", "kernels", "strongsum", "weaktype"])
def test_each_suite_passes_and_writes(tmp_path, suite):
    cfg = small_cfg(tmp_path)
    code, results = run_suite(cfg, suite, tmp_path)
    assert code == 0, results[0].failures[:5]
    rows = read_csv(tmp_path / f"{suite}.csv")
    assert rows and all(r["config_hash"] == cfg.config_hash() for r in rows)
    summary = json.loads((tmp_path / f"{suite}.summary.json").read_text())
    assert summary["config_hash"] == cfg.config_hash() and summary["passed"]
    assert "timestamp" in summary
    assert "timestamp" not in (tmp_path / f"{suite}.csv").read_text()


def test_whitney_summary_line(tmp_path):
    _, results = run_suite(small_cfg(tmp_path), "whitney", tmp_path)
    assert results[0].invariants["min_separation_ratio >= 0.5"]


def test_csv_is_crlf_with_header(tmp_path):
    run_suite(small_cfg(tmp_path), "kernels", tmp_path)
    raw = (tmp_path / "kernels.csv").read_bytes()
    assert raw.startswith(b"config_hash,entry,check,")
    assert raw.count(b"\r\n") == raw.count(b"\n")


def test_failing_invariant_gives_exit_one(tmp_path, monkeypatch):
    import hsumlab.lab as lab

    def broken(cfg):
        res = lab.SuiteResult("kernels", lab.CHECK_HEADER)
        lab._check_row(res, "x", "always fails", "", 1.0, 0.0, False)
        return res

    monkeypatch.setitem(lab.RUNNERS, "kernels", broken)
    code, _ = run_suite(small_cfg(tmp_path), "kernels", tmp_path)
    assert code == 1


def test_unknown_suite(tmp_path):
    with pytest.raises(UsageError):
        run_suite(small_cfg(tmp_path), "nope", tmp_path)


def test_plotdata(tmp_path):
    assert emit_plot_data(tmp_path) == "config_hash,series,entry,x,variable,value\r\n"
    with pytest.raises(UsageError):
        emit_plot_data(tmp_path / "missing")
    cfg = small_cfg(tmp_path)
    run_suite(cfg, "weaktype", tmp_path)
    run_suite(cfg, "marcinkiewicz", tmp_path)
    rows = list(csv.DictReader(io.StringIO(emit_plot_data(tmp_path))))
    weak = [r for r in rows if r["series"] == "weak:fstar:unit" and r["entry"] == "spike64"
            and r["variable"] == "measure"]
    meas = [float(r["value"]) for r in weak]
    assert len(meas) > 10 and all(a >= b for a, b in zip(meas, meas[1:]))
    prof = {float(r["x"]): float(r["value"]) for r in rows if r["variable"] == "F"}
    assert prof
    x = min(prof, key=lambda t: abs(t + 1))
    assert abs(x + 1) < 0.05
    # F is smooth near -1, so the closest sample is close to ln(9/8)
    assert prof[x] == pytest.approx(math.log(9 / 8), rel=0.1)


def test_cli_cover(capsys):
    assert main(["cover", "--g", "0,1;2,4", "--depth", "8"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 * (1 + 2 * 8)
    first = json.loads(lines[0])
    assert set(first) == {"a", "b", "parent", "gen", "side", "closed_left", "closed_right"}
    assert CoverInterval.from_json(lines[0]).a == Fr(first["a"])


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--suite", "nope", "--out", str(tmp_path)]) == 2
    assert main(["plotdata", str(tmp_path / "missing")]) == 2
    assert main(["cover", "--g", "1,0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2


def test_cli_run_with_config_and_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_size": 512, "n_max": 64, "abel_ns": [4, 16]}))
    out = tmp_path / "res"
    assert main(["run", "-q", "--config", str(cfg), "--suite", "kernels", "--out", str(out), "--seed", "7"]) == 0
    summary = json.loads((out / "kernels.summary.json").read_text())
    assert summary["seed"] == 7 and summary["grid_size"] == 512
