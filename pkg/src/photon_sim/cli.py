"""photon-sim: presets, single-point interference, spectra, scans and self-checks.

All external numbers are GHz or ns.  Figure-style detunings and filter
widths (``*_ghz`` on detunings, ``kappa``, filter centres) follow the active
frequency convention; ``nu_*`` spectral coordinates and hyperfine splittings
are ordinary frequencies.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from .core import (
    Convention,
    ConfigError,
    NonConvergence,
    PhotonSimError,
    UnknownPreset,
    figure_to_angular,
    to_angular,
)
from .interference import PhotonPair, fidelity, interfere, visibility, windowed_intensities
from .scan import AXIS_PARAMS, UNITS, Axis, GridSpec, Thresholds, default_workers, run_scan
from .sources import (
    Bare,
    CavityEnhancedNV,
    Delayed,
    Filtered,
    FilterSpec,
    TwoChannel,
    filter_transmission,
    realize,
    spectral_profile,
)
from .systems import CONSTANTS, FREE_PARAMS, PRESET_NAMES, preset
from .validation import FAULTS, SUITES, run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3
SIG_DIGITS = 12

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_PROB = {"type": "number", "minimum": 0, "maximum": 1}

_SOURCE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"type": {"const": "bare"}, "tau_ns": _POS, "omega_ghz": _NUM},
            "required": ["type", "tau_ns"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "two_channel"},
                "tau_ns": _POS,
                "omega_ghz": _NUM,
                "L": _PROB,
                "nu_hfs_ghz": _NUM,
            },
            "required": ["type", "tau_ns", "L", "nu_hfs_ghz"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "cavity_nv"},
                "tau0_ns": _POS,
                "Q": {"type": "number", "minimum": 0},
                "xi0": _PROB,
                "omega_ghz": _NUM,
            },
            "required": ["type", "tau0_ns", "Q", "xi0"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "filtered"},
                "inner": {"$ref": "#/$defs/source"},
                "kappa_ghz": _POS,
                "center_ghz": _NUM,
            },
            "required": ["type", "inner", "kappa_ghz"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"type": {"const": "delayed"}, "inner": {"$ref": "#/$defs/source"}, "dt_ns": _NUM},
            "required": ["type", "inner", "dt_ns"],
            "additionalProperties": False,
        },
    ]
}

_OVERRIDES = {
    "delta_omega_ghz": _NUM,
    "kappa1_ghz": _POS,
    "kappa2_ghz": _POS,
    "dt_ns": _NUM,
    "window_ns": _POS,
    "q1": {"type": "number", "minimum": 0},
    "q2": {"type": "number", "minimum": 0},
}

_FIXED_VALUE = {
    "oneOf": [
        _NUM,
        {
            "type": "object",
            "properties": {"value": _NUM, "unit": {"enum": list(UNITS)}},
            "required": ["value"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "$defs": {"source": _SOURCE},
    "properties": {
        "convention": {"enum": [c.value for c in Convention]},
        "eta_mode": {"enum": ["profile", "closed"]},
        "preset": {
            "type": "object",
            "properties": {
                "name": {"enum": list(PRESET_NAMES)},
                "overrides": {"type": "object", "properties": _OVERRIDES, "additionalProperties": False},
            },
            "required": ["name"],
            "additionalProperties": False,
        },
        "source1": {"$ref": "#/$defs/source"},
        "source2": {"$ref": "#/$defs/source"},
        "delta_omega_ghz": _NUM,
        "window_ns": {"oneOf": [_POS, {"const": "inf"}]},
        "method": {"enum": ["auto", "expsum", "quadrature"]},
        "thresholds": {
            "type": "object",
            "properties": {"fidelity_min": _PROB, "rate_min_hz": _NUM, "eta_min": _PROB},
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "base": {"enum": ["BARE", *PRESET_NAMES]},
                "axes": {
                    "type": "array",
                    "minItems": 1,
                    "maxItems": 3,
                    "items": {
                        "type": "object",
                        "properties": {
                            "param": {"enum": list(AXIS_PARAMS)},
                            "min": _NUM,
                            "max": _NUM,
                            "steps": {"type": "integer", "minimum": 2},
                            "unit": {"enum": list(UNITS)},
                        },
                        "required": ["param", "min", "max", "steps"],
                        "additionalProperties": False,
                    },
                },
                "fixed": {"type": "object", "additionalProperties": _FIXED_VALUE},
            },
            "required": ["base", "axes"],
            "additionalProperties": False,
        },
        "spectrum": {
            "type": "object",
            "properties": {
                "nu_min_ghz": _NUM,
                "nu_max_ghz": _NUM,
                "points": {"type": "integer", "minimum": 2},
                "filter": {
                    "type": "object",
                    "properties": {"kappa_ghz": _POS, "center_ghz": _NUM},
                    "required": ["kappa_ghz"],
                    "additionalProperties": False,
                },
            },
            "required": ["nu_min_ghz", "nu_max_ghz", "points"],
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"csv": {"type": "string"}, "json": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


# -- config plumbing -------------------------------------------------------------


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    validate_config(config)
    return config


def validate_config(config: dict) -> None:
    try:
        jsonschema.validate(config, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None


def _convention(args, config) -> Convention:
    return Convention.parse(args.convention or config.get("convention"))


def _eta_mode(args, config) -> str | None:
    return args.eta_mode or config.get("eta_mode")


def parse_source(node: dict, convention: Convention):
    kind = node["type"]
    omega = figure_to_angular(node.get("omega_ghz", 0.0), convention)
    if kind == "bare":
        return Bare(node["tau_ns"], omega)
    if kind == "two_channel":
        return TwoChannel(node["tau_ns"], omega, node["L"], to_angular(node["nu_hfs_ghz"]))
    if kind == "cavity_nv":
        return CavityEnhancedNV(node["tau0_ns"], node["Q"], node["xi0"], omega)
    if kind == "filtered":
        filt = FilterSpec(
            figure_to_angular(node["kappa_ghz"], convention),
            figure_to_angular(node.get("center_ghz", 0.0), convention),
        )
        return Filtered(parse_source(node["inner"], convention), filt)
    return Delayed(parse_source(node["inner"], convention), node["dt_ns"])


def _window(value) -> float:
    return math.inf if value == "inf" else float(value)


def build_system(config: dict, convention: Convention, eta_mode):
    spec = config["preset"]
    system = preset(spec["name"], convention, eta_mode)
    params = {}
    for key, value in spec.get("overrides", {}).items():
        name = key.removesuffix("_ghz").removesuffix("_ns")
        if name not in FREE_PARAMS[system.name]:
            raise ConfigError(f"{system.name} has no free parameter {name!r}")
        params[name] = figure_to_angular(value, convention) if key.endswith("_ghz") else float(value)
    if "window_ns" in config:
        params["window"] = _window(config["window_ns"])
    if "delta_omega_ghz" in config:
        params["delta_omega"] = figure_to_angular(config["delta_omega_ghz"], convention)
    return system.with_params(**params) if params else system


def _round(x):
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(path: str | Path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- subcommands -------------------------------------------------------------------


def cmd_preset(args) -> int:
    if args.action == "list":
        sys.stdout.write("\n".join(PRESET_NAMES) + "\n")
        return EXIT_OK
    key = str(args.name).upper()
    if key not in CONSTANTS:
        raise UnknownPreset(f"unknown preset {args.name!r}; choose from {', '.join(PRESET_NAMES)}")
    doc = {
        "name": key,
        "constants": {k: {"value": c.value, "unit": c.unit, "source": c.source} for k, c in CONSTANTS[key].items()},
        "free_parameters": list(FREE_PARAMS[key]),
    }
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def _pair_from_config(config, convention, eta_mode):
    if "preset" in config:
        if "source1" in config or "source2" in config:
            raise ConfigError("give either a preset or explicit sources, not both")
        system = build_system(config, convention, eta_mode)
        return system.pair(), system.window
    if "source1" not in config or "source2" not in config:
        raise ConfigError("interfere needs a preset or both source1 and source2")
    if "window_ns" not in config:
        raise ConfigError("window_ns is required with explicit sources")
    dw = figure_to_angular(config.get("delta_omega_ghz", 0.0), convention)
    pair = PhotonPair(realize(parse_source(config["source1"], convention)), realize(parse_source(config["source2"], convention)), dw)
    return pair, _window(config["window_ns"])


def cmd_interfere(args) -> int:
    config = load_config(args.config)
    convention = _convention(args, config)
    pair, window = _pair_from_config(config, convention, _eta_mode(args, config))
    res = interfere(pair, window)
    doc = {
        "i_max": res.i_max,
        "i_min": res.i_min,
        "visibility": res.visibility,
        "fidelity": res.fidelity,
        "eta_window": res.eta_window,
        "eta_profile": res.eta_profile,
    }
    method = config.get("method", "auto")
    if method != "auto":
        hi, lo = windowed_intensities(pair, window, method)
        lo = max(lo, 0.0)
        v = visibility(hi, lo)
        doc.update(i_max=hi, i_min=lo, visibility=v, fidelity=fidelity(v))
    text = dumps(doc)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def _spectrum_model(config, convention):
    if "preset" in config:
        system = build_system(config, convention, None)
        model = system.sources()[1]
    elif "source1" in config:
        model = parse_source(config["source1"], convention)
    else:
        raise ConfigError("spectrum needs a preset or source1")
    # strip delays (spectrum-invariant) and the outermost filter
    while isinstance(model, Delayed):
        model = model.inner
    filt = None
    if isinstance(model, Filtered):
        model, filt = model.inner, model.filter
    return model, filt


def cmd_spectrum(args) -> int:
    config = load_config(args.config)
    if "spectrum" not in config:
        raise ConfigError("spectrum section missing")
    convention = _convention(args, config)
    spec = config["spectrum"]
    if not spec["nu_min_ghz"] < spec["nu_max_ghz"]:
        raise ConfigError("nu_min_ghz must be below nu_max_ghz")
    model, filt = _spectrum_model(config, convention)
    if "filter" in spec:
        f = spec["filter"]
        filt = FilterSpec(figure_to_angular(f["kappa_ghz"], convention), figure_to_angular(f.get("center_ghz", 0.0), convention))
    nu = np.linspace(spec["nu_min_ghz"], spec["nu_max_ghz"], spec["points"])
    omega = to_angular(nu)
    raw = spectral_profile(realize(model), omega)
    filtered = raw if filt is None else raw * filter_transmission(filt, omega)
    lines = ["nu_prime_ghz,s_unfiltered,s_filtered"]
    lines += [f"{a!r},{b!r},{c!r}" for a, b, c in zip(nu.tolist(), raw.tolist(), filtered.tolist())]
    text = "\n".join(lines) + "\n"
    out = args.out or config.get("output", {}).get("csv")
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def grid_spec_from_config(config: dict, convention: Convention, eta_mode) -> GridSpec:
    if "grid" not in config:
        raise ConfigError("grid section missing")
    grid = config["grid"]
    axes = []
    for node in grid["axes"]:
        axes.append(Axis(node["param"], node["min"], node["max"], node["steps"], node.get("unit", "")))
    th = config.get("thresholds", {"fidelity_min": 0.99})
    thresholds = Thresholds(th.get("fidelity_min"), th.get("rate_min_hz"), th.get("eta_min"))
    fixed = dict(grid.get("fixed", {}))
    swept = {ax.param for ax in axes}
    if "window_ns" in config and "window" not in swept and "window" not in fixed:
        fixed["window"] = _window(config["window_ns"])
    return GridSpec(grid["base"], tuple(axes), thresholds, fixed, convention.value, eta_mode)


def cmd_scan(args) -> int:
    config = load_config(args.config)
    convention = _convention(args, config)
    spec = grid_spec_from_config(config, convention, _eta_mode(args, config))
    workers = args.workers if args.workers is not None else default_workers()
    result = run_scan(spec, workers)
    outputs = config.get("output", {})
    if args.out:
        csv_path, json_path = args.out, str(Path(args.out).with_suffix(".json"))
    else:
        csv_path = outputs.get("csv") or "scan.csv"
        json_path = outputs.get("json") or str(Path(csv_path).with_suffix(".json"))
    _write(csv_path, result.to_csv())
    _write(json_path, dumps(result.summary()))
    doc = {"csv": csv_path, "json": json_path, "feasible_fraction": result.feasible_fraction, "marginal_bounds": result.marginal_bounds}
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    report = run_validation(fault=args.fault, only=args.only)
    elapsed = time.perf_counter() - t0
    sys.stdout.write(report.table() + "\n")
    if elapsed > 60.0:
        sys.stderr.write(f"warning: validation took {elapsed:.1f} s (budget 60 s)\n")
    if args.out:
        doc = {s.name: {"passed": s.passed, "worst": s.worst, "tolerance": s.tolerance} for s in report.suites}
        _write(args.out, dumps(doc))
    return EXIT_OK if report.passed else EXIT_VALIDATION


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output path")
    common.add_argument("--workers", type=int, default=None, help="scan worker processes (default: $PHOTON_SIM_WORKERS or all cores)")
    common.add_argument("--convention", choices=[c.value for c in Convention], default=None)
    common.add_argument("--eta-mode", choices=["profile", "closed"], default=None)

    parser = argparse.ArgumentParser(prog="photon-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="spectral profile before/after filtering (CSV)")
    sub.add_parser("interfere", parents=[common], help="single-point interference figures (JSON)")
    sub.add_parser("scan", parents=[common], help="feasibility-region grid scan (CSV + JSON)")
    p = sub.add_parser("preset", parents=[common], help="list presets or show their constants")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    v = sub.add_parser("validate", parents=[common], help="run the self-validation suites")
    v.add_argument("--only", nargs="+", choices=list(SUITES), default=None)
    v.add_argument("--fault", choices=list(FAULTS), default=None, help=argparse.SUPPRESS)
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "interfere": cmd_interfere,
    "scan": cmd_scan,
    "preset": cmd_preset,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "preset" and args.action == "show" and not args.name:
        sys.stderr.write("error: preset show needs a name\n")
        return EXIT_CONFIG
    if args.workers is None and os.environ.get("PHOTON_SIM_WORKERS"):
        try:
            args.workers = int(os.environ["PHOTON_SIM_WORKERS"])
        except ValueError:
            sys.stderr.write("error: PHOTON_SIM_WORKERS must be an integer\n")
            return EXIT_CONFIG
    if args.workers is not None and args.workers < 1:
        sys.stderr.write("error: --workers must be at least 1\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except NonConvergence as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (PhotonSimError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"error: {msg}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
