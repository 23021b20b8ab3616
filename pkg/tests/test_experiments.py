"""Tests for configs, the runner, caching, subsequences, and the CLI."""

from __future__ import annotations

import json

import numpy as np
import pytest

from nilseqlab import (
    ConfigError,
    PolynomialPhase,
    Signal,
    Window,
    class_distance,
    config_from_dict,
    constant_signal,
    density_seminorm,
    eval_nilsequence,
    run_experiment,
    signal_from,
    subsequence_average,
    window_mean,
)
from nilseqlab.cli import main as cli_main
from nilseqlab.experiments import SubsequenceSpec, build_signal, load_config


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("NILSEQLAB_CACHE_DIR", str(tmp_path / "cache"))


def base_config(kind: str, params: dict, *, start=0, end=256, seed=0) -> dict:
    return {
        "kind": kind,
        "window": {"start": start, "end": end},
        "params": params,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def test_unknown_field_rejected():
    raw = base_config("gowers", {"target": {"kind": "noise"}, "order": 2})
    raw["surprise"] = 1
    with pytest.raises(ConfigError, match="unknown field 'surprise'"):
        config_from_dict(raw)


def test_unknown_param_rejected():
    raw = base_config("gowers", {"target": {"kind": "noise"}, "order": 2,
                                 "bogus": 3})
    with pytest.raises(ConfigError, match="bogus"):
        config_from_dict(raw)


def test_unknown_kind_rejected():
    raw = base_config("eigenvalues", {})
    with pytest.raises(ConfigError, match="unknown experiment kind"):
        config_from_dict(raw)


def test_bad_window_rejected():
    raw = base_config("gowers", {"target": {"kind": "noise"}, "order": 2})
    raw["window"] = {"start": 5, "end": 5}
    with pytest.raises(ConfigError, match="window"):
        config_from_dict(raw)


def test_bad_signal_spec_rejected():
    raw = base_config("gowers", {"target": {"kind": "sawtooth"}, "order": 2})
    with pytest.raises(ConfigError, match="unknown signal kind"):
        config_from_dict(raw)


def test_json_syntax_error_reports_line(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{\n  "kind": "gowers",\n  oops\n}\n')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(path)


def test_config_hash_ignores_out_dir():
    params = {"target": {"kind": "noise"}, "order": 2}
    a = config_from_dict(base_config("gowers", params))
    raw = base_config("gowers", params)
    raw["out_dir"] = "/somewhere/else"
    b = config_from_dict(raw)
    assert a.digest() == b.digest()


# ---------------------------------------------------------------------------
# signal specs
# ---------------------------------------------------------------------------

def test_build_signal_kinds():
    w = Window(0, 64)
    rng = np.random.default_rng(0)
    lin = build_signal({"kind": "linear_phase", "alpha": 0.25}, w, rng)
    assert np.allclose(lin.values[:4], [1, 1j, -1, -1j], atol=1e-12)
    alt = build_signal({"kind": "alternating"}, w, rng)
    assert np.allclose(alt.values[:4], [1, -1, 1, -1])
    spike = build_signal({"kind": "spike", "positions": [3]}, w, rng)
    assert spike.values[3] == 1.0 and np.sum(np.abs(spike.values)) == 1.0
    noise = build_signal({"kind": "noise"}, w, rng)
    assert np.max(np.abs(np.abs(noise.values) - 1.0)) < 1e-12
    member = build_signal(
        {"kind": "corpus", "family": "C", "ell": 2, "index": 1}, w, rng, seed=4
    )
    assert member.window == w


def test_spike_outside_window_rejected():
    w = Window(0, 8)
    with pytest.raises(ConfigError, match="outside window"):
        build_signal({"kind": "spike", "positions": [99]}, w,
                     np.random.default_rng(0))


# ---------------------------------------------------------------------------
# subsequences
# ---------------------------------------------------------------------------

def test_subsequence_even_indices_of_alternating():
    w = Window(0, 300)
    alt = signal_from(lambda ns: np.where(ns % 2 == 0, 1.0, -1.0), w)
    table = subsequence_average(alt, SubsequenceSpec("arithmetic", q=2),
                                checkpoints=[10, 50, 100])
    assert all(v == 1.0 for v in table.averages)
    assert table.max_successive_diff == 0.0


def test_subsequence_identity_matches_window_mean():
    rng = np.random.default_rng(17)
    w = Window(0, 200)
    sig = Signal(w, rng.normal(size=200) + 1j * rng.normal(size=200))
    table = subsequence_average(sig, SubsequenceSpec("identity"),
                                checkpoints=[40])
    expected = window_mean(sig.restrict(Window(1, 41)))
    assert table.averages[0] == pytest.approx(expected, abs=1e-12)


def test_subsequence_alternating_identity_values():
    w = Window(0, 64)
    alt = signal_from(lambda ns: np.where(ns % 2 == 0, 1.0, -1.0), w)
    table = subsequence_average(alt, SubsequenceSpec("identity"),
                                checkpoints=[9, 10])
    # averages of (-1)^n from n=1: -1/N for odd N, 0 for even N
    assert table.averages[0] == pytest.approx(-1.0 / 9)
    assert table.averages[1] == 0.0


def test_subsequence_growth_constants():
    sqrt_spec = SubsequenceSpec("sqrt-perturbed")
    terms = sqrt_spec.generate(100)
    assert np.all(np.diff(terms) > 0)
    assert sqrt_spec.growth_constant(terms) <= 2.0
    rand_spec = SubsequenceSpec("random-density", density=0.5)
    terms = rand_spec.generate(50, seed=11)
    assert np.all(np.diff(terms) > 0)
    assert rand_spec.growth_constant(terms) < 10.0


def test_subsequence_window_exhausted_names_checkpoint():
    w = Window(0, 100)
    sig = constant_signal(1.0, w)
    with pytest.raises(ValueError, match="largest usable checkpoint is 49"):
        subsequence_average(sig, SubsequenceSpec("arithmetic", q=2),
                            checkpoints=[60])


def test_subsequence_rotation_geometric_bound():
    alpha = 0.2901
    w = Window(0, 4097)
    sig = eval_nilsequence(PolynomialPhase((0.0, alpha)), w)
    table = subsequence_average(sig, SubsequenceSpec("identity"),
                                checkpoints=[512, 1024, 2048, 4096])
    for n, avg in zip(table.checkpoints, table.averages):
        bound = 2.0 / (n * abs(1 - np.exp(2j * np.pi * alpha)))
        assert abs(avg) <= bound


# ---------------------------------------------------------------------------
# class distance
# ---------------------------------------------------------------------------

def test_class_distance_member_is_found():
    w = Window(0, 512)
    target = eval_nilsequence(PolynomialPhase((0.0, 8 / 64)), w)
    res = class_distance(target, "A", 2, budget=70, scale=512, seed=0)
    assert res.best_distance < 1e-9
    assert "0.125" in res.witness


def test_class_distance_monotone_in_budget():
    rng = np.random.default_rng(23)
    w = Window(0, 256)
    target = Signal(w, np.exp(2j * np.pi * rng.random(256)), 1.0)
    prev = None
    for budget in (1, 8, 40):
        res = class_distance(target, "A", 2, budget=budget, scale=256, seed=5)
        assert res.evaluated <= budget
        if prev is not None:
            assert res.best_distance <= prev + 1e-15
        prev = res.best_distance


def test_class_distance_never_exceeds_zero_candidate():
    rng = np.random.default_rng(29)
    w = Window(0, 128)
    target = Signal(w, 0.5 * rng.normal(size=128))
    for family in ("A", "B", "C"):
        res = class_distance(target, family, 2, budget=6, scale=128, seed=3)
        assert res.best_distance <= density_seminorm(target, 128) + 1e-12


# ---------------------------------------------------------------------------
# runner determinism and caching
# ---------------------------------------------------------------------------

def run_twice(raw: dict, tmp_path, use_cache=True):
    cfg1 = dict(raw, out_dir=str(tmp_path / "run1"), use_cache=use_cache)
    cfg2 = dict(raw, out_dir=str(tmp_path / "run2"), use_cache=use_cache)
    r1 = run_experiment(config_from_dict(cfg1))
    r2 = run_experiment(config_from_dict(cfg2))
    return r1, r2


def test_rerun_with_cache_is_byte_identical(tmp_path):
    raw = base_config("gowers", {
        "target": {"kind": "quadratic_phase", "gamma": 1.4142135623730951},
        "order": 2, "H": 16,
    })
    r1, r2 = run_twice(raw, tmp_path)
    assert not r1.cache_hit and r2.cache_hit
    assert r1.artifacts == r2.artifacts
    for name in r1.artifacts:
        b1 = (r1.out_dir / name).read_bytes()
        b2 = (r2.out_dir / name).read_bytes()
        assert b1 == b2, name


def test_rerun_without_cache_deterministic_results(tmp_path):
    raw = base_config("decompose", {
        "target": {"kind": "corpus", "family": "C", "ell": 2, "index": 0,
                   "variant": "rotations", "freq_grid": 16},
        "order": 2, "epsilon": 0.1, "H": 16,
        "dictionary": {"step": 1, "Q": 16},
    }, seed=3)
    r1, r2 = run_twice(raw, tmp_path, use_cache=False)
    assert not r1.cache_hit and not r2.cache_hit
    for name in r1.artifacts:
        if name == "manifest.json":
            continue  # carries wall time
        assert (r1.out_dir / name).read_bytes() == (r2.out_dir / name).read_bytes()
    assert {"decomposition.json", "a_st.csv", "a_er.csv"} <= set(r1.artifacts)


def test_vdc_and_anti_uniformity_kinds(tmp_path):
    raw = base_config("vdc-check", {"target": {"kind": "alternating"}, "H": 16})
    r, _ = run_twice(raw, tmp_path)
    payload = json.loads((r.out_dir / "vdc.json").read_text())
    assert payload["lhs"] == pytest.approx(0.0)
    assert payload["rhs"] == pytest.approx(4.0)

    raw = base_config("anti-uniformity", {
        "a": {"kind": "linear_phase", "alpha": 0.3},
        "b": {"kind": "constant"}, "order": 1, "H": 8,
    })
    r, _ = run_twice(raw, tmp_path)
    payload = json.loads((r.out_dir / "anti_uniformity.json").read_text())
    assert payload["bound"] == pytest.approx(4.0)


def test_correlate_and_subseq_kinds(tmp_path):
    raw = base_config("correlate", {
        "system": {"dimension": 1,
                   "transformations": [{"matrix": [[1]], "alpha": [0.25]},
                                       {"matrix": [[1]], "alpha": [0.5]}]},
        "observables": [[{"k": [1]}], [{"k": [-1]}]],
        "iterates": [[[0, 1], [0]], [[0], [0, 1]]],
        "engine": "numeric", "grid": 4,
    }, end=16)
    r, _ = run_twice(raw, tmp_path)
    assert "correlation.csv" in r.artifacts

    raw = base_config("subseq-avg", {}, end=64)
    raw["kind"] = "subsequence-average"
    raw["params"] = {
        "target": {"kind": "alternating"},
        "subsequence": {"kind": "arithmetic", "q": 2},
        "checkpoints": [8, 16],
    }
    r, _ = run_twice(raw, tmp_path)
    payload = json.loads((r.out_dir / "subsequence_average.json").read_text())
    assert payload["averages"][0]["re"] == 1.0
    assert "Cauchy" in payload["note"]


def test_interpolate_and_class_distance_kinds(tmp_path):
    raw = base_config("interpolate-check", {"cases": 20}, end=8)
    r, _ = run_twice(raw, tmp_path)
    payload = json.loads((r.out_dir / "interpolation.json").read_text())
    assert payload["max_error"] < 1e-12

    raw = base_config("class-distance", {
        "target": {"kind": "linear_phase", "alpha": 0.125},
        "family": "A", "ell": 2, "budget": 20, "Q": 8,
    }, end=128)
    r, _ = run_twice(raw, tmp_path)
    payload = json.loads((r.out_dir / "class_distance.json").read_text())
    assert payload["best_distance"] < 1e-9


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def write_config(tmp_path, raw) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_cli_success_and_artifacts(tmp_path, capsys):
    raw = base_config("gowers", {"target": {"kind": "constant"}, "order": 2,
                                 "H": 8})
    code = cli_main(["gowers", "--config", write_config(tmp_path, raw),
                     "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    assert "gowers_report.json" in out
    assert (tmp_path / "out" / "manifest.json").exists()


def test_cli_config_error_exit_2(tmp_path, capsys):
    raw = base_config("gowers", {"target": {"kind": "nope"}, "order": 2})
    code = cli_main(["gowers", "--config", write_config(tmp_path, raw)])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_cli_kind_mismatch_exit_2(tmp_path, capsys):
    raw = base_config("gowers", {"target": {"kind": "constant"}, "order": 1})
    code = cli_main(["vdc-check", "--config", write_config(tmp_path, raw)])
    assert code == 2


def test_cli_budget_error_exit_3(tmp_path, capsys):
    raw = base_config("decompose", {
        "target": {"kind": "constant"},
        "order": 2, "epsilon": 0.1, "H": 8,
        "dictionary": {"step": 2, "Q": 64, "budget": 16},
    })
    code = cli_main(["decompose", "--config", write_config(tmp_path, raw)])
    assert code == 3
    assert "budget error" in capsys.readouterr().err


def test_cli_missing_config_file_exit_2(tmp_path, capsys):
    code = cli_main(["gowers", "--config", str(tmp_path / "absent.json")])
    assert code == 2


def test_cli_seed_override_changes_hash(tmp_path, capsys):
    raw = base_config("vdc-check", {"target": {"kind": "noise"}, "H": 8},
                      seed=1)
    path = write_config(tmp_path, raw)
    assert cli_main(["vdc-check", "--config", path,
                     "--out", str(tmp_path / "a")]) == 0
    assert cli_main(["vdc-check", "--config", path, "--seed", "2",
                     "--out", str(tmp_path / "b")]) == 0
    ja = json.loads((tmp_path / "a" / "vdc.json").read_text())
    jb = json.loads((tmp_path / "b" / "vdc.json").read_text())
    assert ja != jb
