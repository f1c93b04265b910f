"""Config parsing, initial-data construction and content-addressed run dirs.

A run directory is named by the first 16 hex digits of the sha256 of the
canonical JSON form of the fully-defaulted config, so identical configs map
to identical directories and a rerun is a no-op that points at the existing
run.  The manifest hashes every emitted file and flags NaNs in the result.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # python < 3.11
    import tomli as _toml

from .grid import Field, Grid
from .solver import SolverConfig, Trajectory
from .symbols import HypothesisCertificate, parse_symbol

__all__ = [
    "ConfigError", "RunConfig", "parse_config", "serialize_config",
    "canonical_json", "run_id", "write_result", "build_solver_config",
    "build_initial", "initial_shape_fn",
]


class ConfigError(ValueError):
    def __init__(self, message: str, key_path: str = "", line: int | None = None):
        loc = key_path
        if line is not None:
            loc += f" (line {line})"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.key_path = key_path
        self.line = line


_SCHEMA = {
    "equation": {"dispersion": str, "dissipation": str, "alpha": float,
                 "beta": float, "eps": float},
    "grid": {"length": float, "n": int},
    "time": {"dt": float, "t_end": float, "record_stride": int,
             "integrator": str},
    "experiment": None,   # free-form; validated per experiment name
    "output": {"directory": str, "formats": list},
}

_DEFAULTS = {
    "equation": {"dissipation": "", "beta": 0.0, "eps": 0.0},
    "time": {"record_stride": 1, "integrator": "etdrk4"},
    "output": {"directory": "runs", "formats": ["json", "csv"]},
}

_EXPERIMENT_KEYS = {
    "solve": {"initial"},
    "norms": {"input", "norm"},
    "diss-limit": {"initial", "eps_list", "s", "order_min"},
    "scaling-test": {"initial", "lam_list", "deviation_max"},
    "bona-smith": {"s", "delta", "amplitude", "n_min", "n_max"},
    "certify-symbol": {"symbol", "alpha", "xi_min", "xi_max", "lambda_min",
                       "lambda_max", "samples", "region", "xi_floor"},
    "resonance-test": {"symbol", "alpha", "violating", "compatible",
                       "trials"},
    "meter": {"meter", "stability_factor"},
    "existence-probe": {"initial", "amplitudes", "s"},
}


@dataclass(frozen=True)
class RunConfig:
    equation: dict
    grid: dict
    time: dict
    experiment: dict
    output: dict
    seed: int = 0


def _find_line(text: str, key: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0]
        if stripped.strip().startswith(key):
            return i
    return None


def _coerce(value, want, path: str, text: str):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path,
                              _find_line(text, path.split(".")[-1]))
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", path,
                              _find_line(text, path.split(".")[-1]))
        return value
    if not isinstance(value, want):
        raise ConfigError(f"expected {want.__name__}, got {value!r}", path,
                          _find_line(text, path.split(".")[-1]))
    return value


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a TOML run config; every defaulted value is
    filled in so the echoed config is self-contained."""
    try:
        raw = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from exc

    seed = raw.pop("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed must be an integer", "seed",
                          _find_line(text, "seed"))
    unknown_sections = set(raw) - set(_SCHEMA)
    if unknown_sections:
        key = sorted(unknown_sections)[0]
        raise ConfigError("unknown section", key, _find_line(text, f"[{key}]"))

    sections = {}
    for name, schema in _SCHEMA.items():
        body = dict(raw.get(name, {}))
        merged = {**_DEFAULTS.get(name, {}), **body}
        if schema is None:
            sections[name] = merged
            continue
        extra = set(body) - set(schema)
        if extra:
            key = sorted(extra)[0]
            raise ConfigError("unknown key", f"{name}.{key}",
                              _find_line(text, key))
        missing = set(schema) - set(merged)
        if missing and name in ("equation", "grid", "time"):
            key = sorted(missing)[0]
            raise ConfigError("missing required key", f"{name}.{key}")
        for key, want in schema.items():
            if key in merged:
                merged[key] = _coerce(merged[key], want, f"{name}.{key}", text)
        sections[name] = merged

    eq = sections["equation"]
    if not (1.0 <= eq["alpha"] <= 2.0):
        raise ConfigError("alpha must lie in [1, 2]", "equation.alpha",
                          _find_line(text, "alpha"))
    if not (0.0 <= eq["beta"] <= 1.0 + eq["alpha"]):
        raise ConfigError(
            f"beta={eq['beta']} violates beta <= 1 + alpha = {1 + eq['alpha']}",
            "equation.beta", _find_line(text, "beta"))
    if eq["eps"] < 0:
        raise ConfigError("eps must be >= 0", "equation.eps",
                          _find_line(text, "eps"))
    if eq["eps"] > 0 and not eq["dissipation"]:
        raise ConfigError("eps > 0 requires a dissipation symbol",
                          "equation.eps", _find_line(text, "eps"))
    parse_symbol(eq["dispersion"])  # raises on malformed symbol text
    if eq["dissipation"]:
        parse_symbol(eq["dissipation"], role="dissipation")

    exp = sections["experiment"]
    name = exp.get("name")
    if name not in _EXPERIMENT_KEYS:
        raise ConfigError(
            f"unknown experiment {name!r}; expected one of "
            f"{sorted(_EXPERIMENT_KEYS)}", "experiment.name",
            _find_line(text, "name"))
    extra = set(exp) - _EXPERIMENT_KEYS[name] - {"name"}
    if extra:
        key = sorted(extra)[0]
        raise ConfigError(f"unknown key for experiment {name!r}",
                          f"experiment.{key}", _find_line(text, key))

    return RunConfig(equation=sections["equation"], grid=sections["grid"],
                     time=sections["time"], experiment=sections["experiment"],
                     output=sections["output"], seed=seed)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_config(rc: RunConfig) -> str:
    """Canonical TOML echo; parse(serialize(parse(text))) == parse(text)."""
    out = [f"seed = {rc.seed}", ""]
    for name in ("equation", "grid", "time", "experiment", "output"):
        body = getattr(rc, name)
        out.append(f"[{name}]")
        for key in sorted(body):
            out.append(f"{key} = {_toml_value(body[key])}")
        out.append("")
    return "\n".join(out)


def canonical_json(rc: RunConfig) -> str:
    return json.dumps(asdict(rc), sort_keys=True, separators=(",", ":"))


def run_id(rc: RunConfig) -> str:
    return hashlib.sha256(canonical_json(rc).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------
# initial-data construction
# ---------------------------------------------------------------------

def initial_shape_fn(text: str, length: float, seed: int = 0):
    """Parse an initial-profile spec into a callable of x.

    Forms: "cos:k=1,a=1.0[,mean=0.0]", "bump:a=1,w=8" (periodic Gaussian
    bump times sin), "soliton-kdv:c=1,x0=...", "soliton-bo:c=1,x0=...".
    Wavenumber k counts periods over ``length``.
    """
    head, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            params[key.strip()] = float(val)
    if head == "cos":
        k = params.get("k", 1.0)
        a = params.get("a", 1.0)
        mean = params.get("mean", 0.0)
        k2 = params.get("k2", 0.0)
        a2 = params.get("a2", 0.0)
        return lambda x: (mean + a * np.cos(2 * np.pi * k * x / length)
                          + a2 * np.sin(2 * np.pi * k2 * x / length))
    if head == "bump":
        a = params.get("a", 1.0)
        w = params.get("w", 8.0)
        return lambda x: a * np.exp(
            -w * np.sin(np.pi * (x - length / 2.0) / length) ** 2) \
            * np.sin(2 * np.pi * x / length)
    if head == "soliton-kdv":
        c = params.get("c", 1.0)
        x0 = params.get("x0", length / 2.0)
        return lambda x: 3.0 * c / np.cosh(np.sqrt(c) * (x - x0) / 2.0) ** 2
    if head == "soliton-bo":
        c = params.get("c", 1.0)
        x0 = params.get("x0", length / 2.0)
        return lambda x: 4.0 * c / (1.0 + c ** 2 * (x - x0) ** 2)
    raise ConfigError(f"unknown initial profile {text!r}", "experiment.initial")


def build_initial(text: str, grid: Grid, seed: int = 0) -> Field:
    if text.startswith("rough"):
        from .experiments import rough_profile
        _, _, rest = text.partition(":")
        params = {}
        for item in rest.split(","):
            if item:
                key, _, val = item.partition("=")
                params[key.strip()] = float(val)
        return rough_profile(grid, params.get("s", 0.0),
                             params.get("delta", 0.05), seed,
                             params.get("amplitude", 1.0))
    return Field.from_values(grid, initial_shape_fn(text, grid.length, seed)(grid.x))


def build_solver_config(rc: RunConfig) -> SolverConfig:
    eq, gr, tm = rc.equation, rc.grid, rc.time
    return SolverConfig(
        dispersion=parse_symbol(eq["dispersion"]),
        dissipation=(parse_symbol(eq["dissipation"], role="dissipation")
                     if eq["dissipation"] else None),
        alpha=eq["alpha"], beta=eq["beta"], eps=eq["eps"],
        grid=Grid(length=gr["length"], n=gr["n"]),
        dt=tm["dt"], t_end=tm["t_end"], integrator=tm["integrator"],
        record_stride=tm["record_stride"], seed=rc.seed)


# ---------------------------------------------------------------------
# result serialization
# ---------------------------------------------------------------------

def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)   # "nan"/"inf" survive JSON round-trips as strings
    return obj


def _has_nan(obj) -> bool:
    if isinstance(obj, float):
        return math.isnan(obj)
    if isinstance(obj, str):
        return obj == "nan"
    if isinstance(obj, dict):
        return any(_has_nan(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_has_nan(v) for v in obj)
    return False


def _result_payload(result) -> tuple:
    """(json payload, csv tables {name: (fieldnames, rows)}, verdict)."""
    from .experiments import ExperimentResult
    if isinstance(result, ExperimentResult):
        payload = {"kind": "experiment", **_jsonable(result)}
        rows = [dict(r) for r in result.table]
        fields = sorted({k for r in rows for k in r})
        verdict = result.verdict
        if not rows:
            verdict = "inconclusive"
            payload["verdict"] = "inconclusive"
        return payload, {"table": (fields, rows)}, verdict
    if isinstance(result, Trajectory):
        diag_fields = ["t", "mass", "hamiltonian", "max_abs", "tail_fraction"]
        rows = [dict(d) for d in result.diagnostics]
        payload = {
            "kind": "trajectory",
            "aborted": result.aborted,
            "abort_reason": result.abort_reason,
            "failure_time": result.failure_time,
            "times": _jsonable(result.times),
            "diagnostics": _jsonable(rows),
            "n": result.config.grid.n,
            "length": result.config.grid.length,
        }
        verdict = "fail" if result.aborted else "pass"
        return payload, {"diagnostics": (diag_fields, rows)}, verdict
    if isinstance(result, HypothesisCertificate):
        payload = {"kind": "certificate", **_jsonable(result)}
        verdict = "pass" if result.verdict == "certified" else "fail"
        return payload, {}, verdict
    raise TypeError(f"cannot serialize result of type {type(result)!r}")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_result(out_root, rc: RunConfig, result, extra_files: dict | None = None) -> dict:
    """Write the run directory for (config, result); idempotent.

    If the content-addressed directory already holds a manifest, nothing is
    written and the existing manifest is returned with ``existing: true``."""
    out_root = Path(out_root)
    rid = run_id(rc)
    run_dir = out_root / rid
    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        manifest["existing"] = True
        return manifest

    run_dir.mkdir(parents=True, exist_ok=True)
    payload, tables, verdict = _result_payload(result)
    files = {}

    (run_dir / "config.toml").write_text(serialize_config(rc))
    files["config.toml"] = None

    body = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    (run_dir / "result.json").write_text(body)
    files["result.json"] = None

    if "csv" in rc.output.get("formats", ["csv"]):
        schema_lines = []
        for tname, (fieldnames, rows) in tables.items():
            fname = f"{tname}.csv"
            with open(run_dir / fname, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=fieldnames)
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: row.get(k, "") for k in fieldnames})
            files[fname] = None
            schema_lines.append(f"{fname}: {', '.join(fieldnames)}")
        if schema_lines:
            (run_dir / "schema.txt").write_text("\n".join(schema_lines) + "\n")
            files["schema.txt"] = None

    for fname, writer_fn in (extra_files or {}).items():
        writer_fn(run_dir / fname)
        files[fname] = None

    manifest = {
        "run_id": rid,
        "verdict": verdict,
        "nan_present": _has_nan(payload),
        "files": {name: _sha256(run_dir / name) for name in files},
        "existing": False,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest
