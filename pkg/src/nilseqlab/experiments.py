"""Config-driven experiment runner with deterministic caching.

Every experiment is described by a JSON-compatible config (kind, window,
per-kind params, seed).  Results are written as CSV tables and JSON reports
plus a manifest; the SHA-256 of the canonicalized config keys a cache
directory, and a rerun with the same config reuses the cached artifacts
byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from . import __version__
from .decomposition import DictionarySpec, decompose
from .errors import BudgetError, ConfigError
from .nilmanifolds import BracketPhase, PolynomialPhase, eval_nilsequence, torus_interpolate
from .signals import (Signal, Window, constant_signal, density_seminorm,
                      read_csv, signal_from, window_mean, write_csv)
from .systems import (AffineToralSystem, CorrelationQuery, QuadratureSpec,
                      ToralMap, TrigObservable, corpus_generate,
                      correlate_exact, correlate_numeric)
from .uniformity import GowersParams, anti_uniformity_ratio, ghk_seminorm, vdc_defect

CACHE_ENV = "NILSEQLAB_CACHE_DIR"

EXPERIMENT_KINDS = (
    "gowers",
    "correlate",
    "decompose",
    "vdc-check",
    "anti-uniformity",
    "interpolate-check",
    "class-distance",
    "subsequence-average",
)


def cache_root() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "nilseqlab"


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

def _require_keys(obj: Mapping, allowed: Sequence[str], required: Sequence[str],
                  where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown field {key!r}")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{where}: missing required field {key!r}")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    kind: str
    window: Window
    params: dict
    seed: int = 0
    out_dir: Union[str, None] = None
    use_cache: bool = True

    def canonical(self) -> str:
        """Deterministic JSON of the fields that define the computation."""
        payload = {
            "kind": self.kind,
            "window": {"start": self.window.start, "end": self.window.end},
            "params": self.params,
            "seed": self.seed,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def config_from_dict(raw: Mapping, source: str = "<config>") -> ExperimentConfig:
    _require_keys(
        raw,
        allowed=("kind", "window", "params", "seed", "out_dir", "use_cache"),
        required=("kind", "window", "params"),
        where=source,
    )
    kind = raw["kind"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"{source}.kind: unknown experiment kind {kind!r}")
    win = raw["window"]
    _require_keys(win, ("start", "end"), ("start", "end"), f"{source}.window")
    try:
        window = Window(int(win["start"]), int(win["end"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}.window: {exc}") from exc
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{source}.seed: must be a nonnegative integer")
    params = raw["params"]
    if not isinstance(params, Mapping):
        raise ConfigError(f"{source}.params: must be an object")
    params = _validate_params(kind, dict(params), f"{source}.params")
    return ExperimentConfig(
        kind=kind,
        window=window,
        params=params,
        seed=seed,
        out_dir=raw.get("out_dir"),
        use_cache=bool(raw.get("use_cache", True)),
    )


def load_config(path, overrides: Union[Mapping, None] = None) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return config_from_dict(raw, source=str(path))


# ---------------------------------------------------------------------------
# signal specs (shared mini-language for experiment targets)
# ---------------------------------------------------------------------------

_SIGNAL_KINDS = {
    "constant": (("re", "im"), ()),
    "linear_phase": (("alpha", "theta"), ("alpha",)),
    "quadratic_phase": (("gamma",), ("gamma",)),
    "polynomial_phase": (("coefficients",), ("coefficients",)),
    "bracket_phase": (("quad", "cross", "alpha", "linear"), ()),
    "alternating": ((), ()),
    "spike": (("positions", "height"), ("positions",)),
    "noise": ((), ()),
    "corpus": (("family", "ell", "index", "count", "variant", "freq_grid",
                "seed"),
               ("family", "ell", "index")),
    "csv": (("path",), ("path",)),
}


def validate_signal_spec(spec: Mapping, where: str) -> dict:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{where}: signal spec must be an object")
    if "kind" not in spec:
        raise ConfigError(f"{where}: signal spec needs a 'kind'")
    kind = spec["kind"]
    if kind not in _SIGNAL_KINDS:
        raise ConfigError(f"{where}.kind: unknown signal kind {kind!r}")
    allowed, required = _SIGNAL_KINDS[kind]
    _require_keys(
        {k: v for k, v in spec.items() if k != "kind"},
        allowed, required, where,
    )
    return dict(spec)


def build_signal(spec: Mapping, window: Window, rng: np.random.Generator,
                 seed: int = 0) -> Signal:
    """Materialize a signal spec on a window.

    Random kinds consume the generator; corpus kinds reuse the experiment
    seed unless the spec pins its own.
    """
    kind = spec["kind"]
    if kind == "constant":
        c = complex(spec.get("re", 1.0), spec.get("im", 0.0))
        return constant_signal(c, window)
    if kind == "linear_phase":
        atom = PolynomialPhase((float(spec.get("theta", 0.0)),
                                float(spec["alpha"])))
        return eval_nilsequence(atom, window)
    if kind == "quadratic_phase":
        atom = PolynomialPhase((0.0, 0.0, float(spec["gamma"])))
        return eval_nilsequence(atom, window)
    if kind == "polynomial_phase":
        atom = PolynomialPhase(tuple(float(c) for c in spec["coefficients"]))
        return eval_nilsequence(atom, window)
    if kind == "bracket_phase":
        atom = BracketPhase(float(spec.get("quad", 0.0)),
                            float(spec.get("cross", 0.0)),
                            float(spec.get("alpha", 0.0)),
                            float(spec.get("linear", 0.0)))
        return eval_nilsequence(atom, window)
    if kind == "alternating":
        return signal_from(
            lambda ns: np.where(ns % 2 == 0, 1.0 + 0j, -1.0 + 0j), window, 1.0
        )
    if kind == "spike":
        vals = np.zeros(window.length, dtype=np.complex128)
        height = float(spec.get("height", 1.0))
        for pos in spec["positions"]:
            if not window.contains(int(pos)):
                raise ConfigError(f"spike position {pos} outside window")
            vals[int(pos) - window.start] = height
        return Signal(window, vals, abs(height))
    if kind == "noise":
        phases = rng.random(window.length)
        return Signal(window, np.exp(2j * np.pi * phases), 1.0)
    if kind == "corpus":
        grid = spec.get("freq_grid")
        entries = corpus_generate(
            spec["family"], int(spec["ell"]), int(spec.get("seed", seed)),
            window, count=int(spec.get("count", 8)),
            freq_grid=None if grid is None else int(grid),
            variant=spec.get("variant", "mixed"),
        )
        idx = int(spec["index"])
        if not 0 <= idx < len(entries):
            raise ConfigError(f"corpus index {idx} out of range")
        return entries[idx].signal
    if kind == "csv":
        return read_csv(spec["path"]).restrict(window)
    raise ConfigError(f"unknown signal kind {kind!r}")


# ---------------------------------------------------------------------------
# per-kind parameter validation
# ---------------------------------------------------------------------------

def _validate_params(kind: str, params: dict, where: str) -> dict:
    if kind == "gowers":
        _require_keys(params, ("target", "order", "H", "L"),
                      ("target", "order"), where)
        params["target"] = validate_signal_spec(params["target"],
                                                f"{where}.target")
    elif kind == "correlate":
        _require_keys(params,
                      ("system", "observables", "iterates", "engine", "grid"),
                      ("system", "observables", "iterates"), where)
        engine = params.get("engine", "exact")
        if engine not in ("exact", "numeric"):
            raise ConfigError(f"{where}.engine: must be 'exact' or 'numeric'")
        if engine == "numeric" and "grid" not in params:
            raise ConfigError(f"{where}.grid: required for the numeric engine")
    elif kind == "decompose":
        _require_keys(params,
                      ("target", "order", "epsilon", "dictionary", "H", "L"),
                      ("target", "order", "epsilon", "dictionary"), where)
        params["target"] = validate_signal_spec(params["target"],
                                                f"{where}.target")
        dic = params["dictionary"]
        _require_keys(dic,
                      ("step", "degrees", "Q", "include_brackets", "ridge",
                       "budget"),
                      ("step", "Q"), f"{where}.dictionary")
    elif kind == "vdc-check":
        _require_keys(params, ("target", "H"), ("target", "H"), where)
        params["target"] = validate_signal_spec(params["target"],
                                                f"{where}.target")
    elif kind == "anti-uniformity":
        _require_keys(params, ("a", "b", "order", "H", "L"),
                      ("a", "b", "order"), where)
        params["a"] = validate_signal_spec(params["a"], f"{where}.a")
        params["b"] = validate_signal_spec(params["b"], f"{where}.b")
    elif kind == "interpolate-check":
        _require_keys(params, ("ell", "dimension", "cases"), ("cases",), where)
    elif kind == "class-distance":
        _require_keys(params,
                      ("target", "family", "ell", "budget", "L", "Q"),
                      ("target", "family", "ell", "budget"), where)
        params["target"] = validate_signal_spec(params["target"],
                                                f"{where}.target")
        if params["family"] not in ("A", "B", "C"):
            raise ConfigError(f"{where}.family: must be A, B or C")
    elif kind == "subsequence-average":
        _require_keys(params, ("target", "subsequence", "checkpoints"),
                      ("target", "subsequence", "checkpoints"), where)
        params["target"] = validate_signal_spec(params["target"],
                                                f"{where}.target")
        params["subsequence"] = _validate_subsequence(
            params["subsequence"], f"{where}.subsequence")
    else:  # pragma: no cover - guarded by kind check upstream
        raise ConfigError(f"unhandled kind {kind!r}")
    return params


# ---------------------------------------------------------------------------
# subsequences r_n with at most linear growth
# ---------------------------------------------------------------------------

SUBSEQUENCE_KINDS = ("identity", "arithmetic", "sqrt-perturbed", "random-density")


def _validate_subsequence(raw: Mapping, where: str) -> dict:
    _require_keys(raw, ("kind", "q", "r", "density"), ("kind",), where)
    if raw["kind"] not in SUBSEQUENCE_KINDS:
        raise ConfigError(f"{where}.kind: unknown subsequence {raw['kind']!r}")
    return dict(raw)


@dataclass(frozen=True)
class SubsequenceSpec:
    """Strictly increasing index sequences with linear growth.

    Kinds: ``identity`` (r_n = n), ``arithmetic`` (r_n = q n + r, q >= 1),
    ``sqrt-perturbed`` (r_n = n + isqrt(n)), and ``random-density`` (the
    sorted elements of a seeded random subset of the integers containing
    each one independently with probability ``density``).
    """

    kind: str
    q: int = 1
    r: int = 0
    density: Union[float, None] = None

    def __post_init__(self) -> None:
        if self.kind not in SUBSEQUENCE_KINDS:
            raise ValueError(f"unknown subsequence kind {self.kind!r}")
        if self.kind == "arithmetic" and self.q < 1:
            raise ValueError("arithmetic subsequence needs q >= 1")
        if self.kind == "random-density":
            if self.density is None or not 0.0 < self.density <= 1.0:
                raise ValueError("random-density needs density in (0, 1]")

    def generate(self, count: int, seed: int = 0) -> np.ndarray:
        ns = np.arange(1, count + 1, dtype=np.int64)
        if self.kind == "identity":
            terms = ns
        elif self.kind == "arithmetic":
            terms = self.q * ns + self.r
        elif self.kind == "sqrt-perturbed":
            terms = ns + np.array([math.isqrt(int(n)) for n in ns])
        else:
            rng = np.random.default_rng(seed)
            out = []
            candidate = 1
            while len(out) < count:
                if rng.random() < self.density:
                    out.append(candidate)
                candidate += 1
            terms = np.array(out, dtype=np.int64)
        if np.any(np.diff(terms) <= 0):
            raise ValueError("subsequence is not strictly increasing")
        return terms

    def growth_constant(self, terms: np.ndarray) -> float:
        """Smallest c with r_n <= c * n over the generated prefix."""
        ns = np.arange(1, len(terms) + 1, dtype=float)
        return float(np.max(terms / ns))

    @staticmethod
    def from_dict(raw: Mapping) -> "SubsequenceSpec":
        return SubsequenceSpec(
            kind=raw["kind"],
            q=int(raw.get("q", 1)),
            r=int(raw.get("r", 0)),
            density=raw.get("density"),
        )


@dataclass(frozen=True, eq=False)
class SubsequenceAverageTable:
    checkpoints: tuple
    averages: tuple
    max_successive_diff: float
    growth_constant: float

    def to_json_dict(self) -> dict:
        return {
            "checkpoints": list(self.checkpoints),
            "averages": [{"N": int(n), "re": v.real, "im": v.imag}
                         for n, v in zip(self.checkpoints, self.averages)],
            "max_successive_diff": self.max_successive_diff,
            "growth_constant": self.growth_constant,
            "note": ("Cauchy diagnostic only: finite checkpoints cannot "
                     "decide whether the limit exists."),
        }


def subsequence_average(a: Signal, spec: SubsequenceSpec,
                        checkpoints: Sequence[int],
                        seed: int = 0) -> SubsequenceAverageTable:
    """Partial averages ``(1/N) sum_{n<=N} a(r_n)`` at each checkpoint.

    Raises if the window cannot supply the largest checkpoint, naming the
    largest one it can.
    """
    checkpoints = sorted(int(c) for c in checkpoints)
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive integers")
    terms = spec.generate(checkpoints[-1], seed=seed)
    inside = np.array([a.window.contains(int(t)) for t in terms])
    if not inside.all():
        usable = int(np.argmin(inside))  # first index outside the window
        raise ValueError(
            f"window exhausted: largest usable checkpoint is {usable}"
        )
    picked = a.values[terms - a.window.start]
    cums = np.cumsum(picked)
    averages = tuple(complex(cums[c - 1] / c) for c in checkpoints)
    diffs = [abs(averages[i + 1] - averages[i]) for i in range(len(averages) - 1)]
    return SubsequenceAverageTable(
        checkpoints=tuple(checkpoints),
        averages=averages,
        max_successive_diff=max(diffs) if diffs else 0.0,
        growth_constant=spec.growth_constant(terms),
    )


# ---------------------------------------------------------------------------
# class distance search
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassDistanceResult:
    best_distance: float
    witness: str
    evaluated: int

    def to_json_dict(self) -> dict:
        return {
            "best_distance": self.best_distance,
            "witness": self.witness,
            "evaluated": self.evaluated,
        }


def _class_a_candidates(ell: int, window: Window, seed: int, budget: int,
                        freq_grid: int):
    yield constant_signal(0.0, window), "zero"
    if ell >= 2:
        for j in range(freq_grid):
            atom = PolynomialPhase((0.0, j / freq_grid))
            yield eval_nilsequence(atom, window), atom.label
    rng = np.random.default_rng(seed)
    while True:
        if ell == 1:
            c = float(rng.random()) * np.exp(2j * np.pi * rng.random())
            yield constant_signal(c, window), f"constant({c!r})"
        else:
            atom = PolynomialPhase((float(rng.random()), float(rng.random())))
            yield eval_nilsequence(atom, window), atom.label


def class_distance(target: Signal, family: str, ell: int, budget: int,
                   scale, seed: int = 0,
                   freq_grid: int = 64) -> ClassDistanceResult:
    """Minimum density-seminorm distance from target to sampled class members.

    Candidates stream in a deterministic per-seed order (the zero sequence
    first, then grid atoms for class A, then seeded samples), so the result
    is monotone nonincreasing in the budget.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if family == "A":
        stream = _class_a_candidates(ell, target.window, seed, budget, freq_grid)
    elif family in ("B", "C"):
        def _bc_stream():
            yield constant_signal(0.0, target.window), "zero"
            entries = corpus_generate(family, ell, seed, target.window,
                                      count=max(budget - 1, 1),
                                      freq_grid=freq_grid)
            for entry in entries:
                yield entry.signal, entry.label
        stream = _bc_stream()
    else:
        raise ValueError(f"unknown class {family!r}")
    best = math.inf
    witness = ""
    evaluated = 0
    for signal, label in stream:
        if evaluated >= budget:
            break
        dist = density_seminorm(target - signal, scale)
        evaluated += 1
        if dist < best:
            best = dist
            witness = label
    return ClassDistanceResult(best_distance=float(best), witness=witness,
                               evaluated=evaluated)


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _write_json(path: Path, payload) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    os.replace(tmp, path)


def _write_signal_csv(path: Path, signal: Signal) -> None:
    tmp = path.with_name(path.name + ".tmp")
    write_csv(signal, tmp)
    os.replace(tmp, path)


def _system_from_config(raw: Mapping, where: str) -> AffineToralSystem:
    _require_keys(raw, ("dimension", "transformations"),
                  ("dimension", "transformations"), where)
    try:
        maps = tuple(
            ToralMap(tuple(tuple(int(v) for v in row) for row in t["matrix"]),
                     tuple(float(x) for x in t["alpha"]))
            for t in raw["transformations"]
        )
        return AffineToralSystem(int(raw["dimension"]), maps)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _query_from_params(params: Mapping, where: str) -> CorrelationQuery:
    system = _system_from_config(params["system"], f"{where}.system")
    try:
        observables = tuple(
            TrigObservable(tuple(
                (tuple(int(v) for v in term["k"]),
                 complex(term.get("re", 1.0), term.get("im", 0.0)))
                for term in obs
            ))
            for obs in params["observables"]
        )
        iterates = tuple(
            tuple(tuple(int(c) for c in poly) for poly in row)
            for row in params["iterates"]
        )
        return CorrelationQuery(system, observables, iterates)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _run_gowers(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    target = build_signal(cfg.params["target"], cfg.window, rng, seed=cfg.seed)
    params = GowersParams(order=int(cfg.params["order"]),
                          shift_count=cfg.params.get("H"),
                          scale=cfg.params.get("L"))
    report = ghk_seminorm(target, params)
    _write_json(out / "gowers_report.json", report.to_json_dict())
    return ["gowers_report.json"]


def _run_correlate(cfg: ExperimentConfig, out: Path) -> list[str]:
    query = _query_from_params(cfg.params, "params")
    engine = cfg.params.get("engine", "exact")
    if engine == "exact":
        signal = correlate_exact(query, cfg.window)
    else:
        signal = correlate_numeric(query, cfg.window,
                                   QuadratureSpec(int(cfg.params["grid"])))
    _write_signal_csv(out / "correlation.csv", signal)
    _write_json(out / "query.json",
                {"engine": engine, "window": [cfg.window.start, cfg.window.end]})
    return ["correlation.csv", "query.json"]


def _run_decompose(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    target = build_signal(cfg.params["target"], cfg.window, rng, seed=cfg.seed)
    dic = cfg.params["dictionary"]
    spec = DictionarySpec(
        step=int(dic["step"]),
        degrees=tuple(dic["degrees"]) if "degrees" in dic else None,
        freq_resolution=int(dic["Q"]),
        include_brackets=bool(dic.get("include_brackets", False)),
        ridge=dic.get("ridge"),
        budget=int(dic.get("budget", 4096)),
    )
    gowers = GowersParams(order=int(cfg.params["order"]),
                          shift_count=cfg.params.get("H"),
                          scale=cfg.params.get("L"))
    report = decompose(target, int(cfg.params["order"]),
                       float(cfg.params["epsilon"]), spec, gowers)
    _write_json(out / "decomposition.json", report.to_json_dict())
    _write_signal_csv(out / "a_st.csv", report.a_st)
    _write_signal_csv(out / "a_er.csv", report.a_er)
    return ["decomposition.json", "a_st.csv", "a_er.csv"]


def _run_vdc(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    target = build_signal(cfg.params["target"], cfg.window, rng, seed=cfg.seed)
    report = vdc_defect(target.values, int(cfg.params["H"]))
    _write_json(out / "vdc.json", {
        "lhs": report.lhs, "rhs": report.rhs, "defect": report.defect,
    })
    return ["vdc.json"]


def _run_anti_uniformity(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    a = build_signal(cfg.params["a"], cfg.window, rng, seed=cfg.seed)
    b = build_signal(cfg.params["b"], cfg.window, rng, seed=cfg.seed)
    params = GowersParams(order=int(cfg.params["order"]),
                          shift_count=cfg.params.get("H"),
                          scale=cfg.params.get("L"))
    report = anti_uniformity_ratio(a, b, params)
    _write_json(out / "anti_uniformity.json", {
        "correlation": report.correlation,
        "bound": report.bound,
        "ratio": None if math.isinf(report.ratio) else report.ratio,
        "unbounded": report.unbounded,
    })
    return ["anti_uniformity.json"]


def _run_interpolate_check(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    cases = int(cfg.params["cases"])
    ells = [int(cfg.params["ell"])] if "ell" in cfg.params else [2, 3, 4, 5]
    dims = [int(cfg.params["dimension"])] if "dimension" in cfg.params else [1, 2, 3]
    worst = 0.0
    rows = []
    for i in range(cases):
        ell = ells[i % len(ells)]
        d = dims[i % len(dims)]
        g = rng.random(d)
        h = rng.random(d)
        points = [np.mod(i2 * h + g, 1.0) for i2 in range(1, ell + 1)]
        recovered = torus_interpolate(points)
        err = float(np.max(np.minimum(np.abs(recovered - g),
                                      1.0 - np.abs(recovered - g))))
        worst = max(worst, err)
        rows.append({"case": i, "ell": ell, "dimension": d, "error": err})
    _write_json(out / "interpolation.json",
                {"cases": rows, "max_error": worst})
    return ["interpolation.json"]


def _run_class_distance(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    target = build_signal(cfg.params["target"], cfg.window, rng, seed=cfg.seed)
    scale = int(cfg.params.get("L", cfg.window.length))
    result = class_distance(
        target, cfg.params["family"], int(cfg.params["ell"]),
        int(cfg.params["budget"]), scale, seed=cfg.seed,
        freq_grid=int(cfg.params.get("Q", 64)),
    )
    _write_json(out / "class_distance.json", result.to_json_dict())
    return ["class_distance.json"]


def _run_subsequence_average(cfg: ExperimentConfig, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg.seed)
    target = build_signal(cfg.params["target"], cfg.window, rng, seed=cfg.seed)
    spec = SubsequenceSpec.from_dict(cfg.params["subsequence"])
    table = subsequence_average(target, spec, cfg.params["checkpoints"],
                                seed=cfg.seed)
    _write_json(out / "subsequence_average.json", table.to_json_dict())
    tmp = out / "partial_averages.csv.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "re", "im"])
        for n, v in zip(table.checkpoints, table.averages):
            writer.writerow([int(n), repr(v.real), repr(v.imag)])
    os.replace(tmp, out / "partial_averages.csv")
    return ["subsequence_average.json", "partial_averages.csv"]


_RUNNERS = {
    "gowers": _run_gowers,
    "correlate": _run_correlate,
    "decompose": _run_decompose,
    "vdc-check": _run_vdc,
    "anti-uniformity": _run_anti_uniformity,
    "interpolate-check": _run_interpolate_check,
    "class-distance": _run_class_distance,
    "subsequence-average": _run_subsequence_average,
}


@dataclass(frozen=True, eq=False)
class RunResult:
    config_hash: str
    out_dir: Path
    artifacts: tuple
    cache_hit: bool


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Execute one experiment; artifacts land in the output directory.

    With caching enabled, results are stored under the config hash in the
    cache root and replayed byte-identically on rerun.
    """
    out_dir = Path(cfg.out_dir) if cfg.out_dir else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    cached = cache_root() / digest
    if cfg.use_cache and cached.is_dir():
        names = sorted(p.name for p in cached.iterdir())
        for name in names:
            shutil.copyfile(cached / name, out_dir / name)
        return RunResult(digest, out_dir, tuple(names), cache_hit=True)

    started = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="nilseqlab-") as tmp:
        tmp_path = Path(tmp)
        artifacts = _RUNNERS[cfg.kind](cfg, tmp_path)
        manifest = {
            "config_hash": digest,
            "config": json.loads(cfg.canonical()),
            "artifacts": sorted(artifacts),
            "versions": {
                "nilseqlab": __version__,
                "numpy": np.__version__,
                "python": sys.version.split()[0],
            },
            "wall_time_s": round(time.perf_counter() - started, 6),
        }
        _write_json(tmp_path / "manifest.json", manifest)
        names = sorted(p.name for p in tmp_path.iterdir())
        if cfg.use_cache:
            cache_root().mkdir(parents=True, exist_ok=True)
            staging = Path(tempfile.mkdtemp(dir=cache_root(), prefix="stage-"))
            for name in names:
                shutil.copyfile(tmp_path / name, staging / name)
            try:
                os.replace(staging, cached)
            except OSError:
                shutil.rmtree(staging, ignore_errors=True)  # concurrent run won
        for name in names:
            shutil.copyfile((cached if cfg.use_cache and cached.is_dir()
                             else tmp_path) / name, out_dir / name)
    return RunResult(digest, out_dir, tuple(names), cache_hit=False)
