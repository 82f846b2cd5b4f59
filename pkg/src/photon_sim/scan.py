"""Parameter-grid sweeps and feasibility regions.

Every grid point is an independent task.  Results land in pre-sized arrays
indexed by lattice position, so the worker count never changes the output.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .core import (
    Convention,
    ConfigError,
    PhotonSimError,
    UnknownAxis,
    figure_to_angular,
)
from .interference import EtaMode, PhotonPair, interfere
from .sources import bare_envelope, delay_envelope
from .systems import FREE_PARAMS, preset

AXIS_PARAMS = ("delta_omega", "tau2", "window", "kappa1", "dt", "q1")
BARE = "BARE"
BARE_PARAMS = ("delta_omega", "tau1", "tau2", "dt", "window")

UNITS = ("ghz", "rad_per_ns", "ns", "1", "tau1", "per_tau1")
DEFAULT_UNITS = {
    "delta_omega": "ghz",
    "kappa1": "ghz",
    "kappa2": "ghz",
    "tau1": "ns",
    "tau2": "ns",
    "dt": "ns",
    "window": "ns",
    "q1": "1",
    "q2": "1",
}


@dataclass(frozen=True)
class Axis:
    param: str
    min: float
    max: float
    steps: int
    unit: str = ""

    def __post_init__(self):
        if self.param not in AXIS_PARAMS:
            raise ConfigError(f"cannot sweep {self.param!r}; choose from {AXIS_PARAMS}")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.param}: min must be below max")
        if self.steps < 2:
            raise ConfigError(f"axis {self.param}: need at least 2 steps")
        if not self.unit:
            object.__setattr__(self, "unit", DEFAULT_UNITS[self.param])
        if self.unit not in UNITS:
            raise ConfigError(f"unknown unit {self.unit!r}")

    def coords(self) -> np.ndarray:
        # a + (b - a) * (i / n) keeps refined lattices bit-identical on shared points
        n = self.steps - 1
        return np.array([self.min + (self.max - self.min) * (i / n) for i in range(self.steps)])


@dataclass(frozen=True)
class Thresholds:
    fidelity_min: float | None = 0.99
    rate_min_hz: float | None = None
    eta_min: float | None = None

    def __post_init__(self):
        if self.fidelity_min is None and self.rate_min_hz is None and self.eta_min is None:
            raise ConfigError("at least one threshold is required")


@dataclass(frozen=True)
class GridSpec:
    """A sweep over 1-3 axes around a preset or a bare exponential pair.

    ``fixed`` maps parameter names to values in their default units
    (``DEFAULT_UNITS``) or to ``{"value": x, "unit": u}``.
    """

    base: str
    axes: tuple[Axis, ...]
    thresholds: Thresholds = Thresholds()
    fixed: Mapping[str, object] = field(default_factory=dict)
    convention: str = ""
    eta_mode: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "base", self.base.upper())
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.convention:
            object.__setattr__(self, "convention", Convention.parse(None).value)
        Convention.parse(self.convention)
        if not 1 <= len(self.axes) <= 3:
            raise ConfigError("a grid needs 1 to 3 axes")
        names = [ax.param for ax in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate axes")
        allowed = BARE_PARAMS if self.base == BARE else FREE_PARAMS.get(self.base)
        if allowed is None:
            raise ConfigError(f"unknown base {self.base!r}")
        for name in [*names, *self.fixed]:
            if name not in allowed:
                raise ConfigError(f"{self.base} has no parameter {name!r}")
        if set(names) & set(self.fixed):
            raise ConfigError("swept and fixed parameters overlap")
        if self.base == BARE and self.thresholds.rate_min_hz is not None:
            raise ConfigError("a bare pair has no repetition rate; drop rate_min_hz")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.steps for ax in self.axes)

    def _tau1(self) -> float:
        value = self.fixed.get("tau1", 1.0)
        return float(value["value"] if isinstance(value, Mapping) else value)

    def to_internal(self, param: str, value: float, unit: str | None = None) -> float:
        unit = unit or DEFAULT_UNITS[param]
        if unit == "ghz":
            return figure_to_angular(value, self.convention)
        if unit == "tau1":
            return value * self._tau1()
        if unit == "per_tau1":
            return value / self._tau1()
        return float(value)

    def fixed_internal(self) -> dict[str, float]:
        out = {}
        for name, value in self.fixed.items():
            if isinstance(value, Mapping):
                out[name] = self.to_internal(name, float(value["value"]), value.get("unit"))
            else:
                out[name] = self.to_internal(name, float(value))
        return out

    def point_params(self, index: tuple[int, ...]) -> dict[str, float]:
        params = self.fixed_internal()
        for ax, i in zip(self.axes, index):
            params[ax.param] = self.to_internal(ax.param, float(ax.coords()[i]), ax.unit)
        return params

    def echo(self) -> dict:
        return {
            "base": self.base,
            "axes": [asdict(ax) for ax in self.axes],
            "thresholds": asdict(self.thresholds),
            "fixed": dict(self.fixed),
            "convention": self.convention,
            "eta_mode": self.eta_mode,
        }


@dataclass
class RegionResult:
    spec: GridSpec
    coords: tuple[np.ndarray, ...]
    fidelity: np.ndarray
    eta: np.ndarray
    rate_hz: np.ndarray
    feasible: np.ndarray
    errors: dict[tuple[int, ...], str]

    @property
    def feasible_fraction(self) -> float:
        return float(self.feasible.mean())

    @property
    def marginal_bounds(self) -> dict[str, tuple[float, float] | None]:
        return {ax.param: marginal_bounds(self, ax.param) for ax in self.spec.axes}

    def records(self) -> Iterator[dict]:
        for index in np.ndindex(*self.spec.shape):
            yield {
                "coords": {ax.param: float(c[i]) for ax, c, i in zip(self.spec.axes, self.coords, index)},
                "fidelity": float(self.fidelity[index]),
                "eta": float(self.eta[index]),
                "rate_hz": float(self.rate_hz[index]),
                "feasible": bool(self.feasible[index]),
                "error": self.errors.get(index),
            }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = [f"{ax.param}_{ax.unit}" for ax in self.spec.axes]
        writer.writerow([*header, "fidelity", "eta", "rate_hz", "feasible"])
        for rec in self.records():
            row = [_fmt(v) for v in rec["coords"].values()]
            row += [_fmt(rec["fidelity"]), _fmt(rec["eta"]), _fmt(rec["rate_hz"]), int(rec["feasible"])]
            writer.writerow(row)
        return buf.getvalue()

    def summary(self) -> dict:
        bounds = {k: (None if v is None else {"lo": v[0], "hi": v[1]}) for k, v in self.marginal_bounds.items()}
        return {
            "spec": self.spec.echo(),
            "marginal_bounds": bounds,
            "feasible_fraction": self.feasible_fraction,
            "n_points": int(self.feasible.size),
            "errors": {",".join(map(str, k)): v for k, v in sorted(self.errors.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def marginal_bounds(result: RegionResult, axis: str) -> tuple[float, float] | None:
    """Extreme lattice coordinates of feasible cells along ``axis``."""
    names = [ax.param for ax in result.spec.axes]
    if axis not in names:
        raise UnknownAxis(f"{axis!r} was not swept; axes are {names}")
    k = names.index(axis)
    other = tuple(i for i in range(len(names)) if i != k)
    hit = result.feasible.any(axis=other) if other else result.feasible
    if not hit.any():
        return None
    idx = np.flatnonzero(hit)
    coords = result.coords[k]
    return float(coords[idx[0]]), float(coords[idx[-1]])


class _Evaluator:
    """Evaluates single grid points of one spec; cheap to rebuild in workers."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        if spec.base != BARE:
            self.system = preset(spec.base, spec.convention, spec.eta_mode)

    def __call__(self, index: tuple[int, ...]) -> tuple[float, float, float]:
        params = self.spec.point_params(index)
        if self.spec.base == BARE:
            tau1 = params.get("tau1", 1.0)
            tau2 = params.get("tau2", tau1)
            env1 = delay_envelope(bare_envelope(tau1), params.get("dt", 0.0))
            pair = PhotonPair(env1, bare_envelope(tau2), params.get("delta_omega", 0.0))
            window = params.get("window", math.inf)
            res = interfere(pair, window)
            return res.fidelity, res.eta_profile, math.nan
        system = self.system.with_params(**params)
        res = interfere(system.pair(), system.window)
        eta = res.eta_window if system.eta_mode is EtaMode.CLOSED_FORM else res.eta_profile
        rate = system.rep_rate * system.chain().product(eta)
        return res.fidelity, eta, rate


def _evaluate_chunk(spec: GridSpec, flat: list[int]):
    ev = _Evaluator(spec)
    out = []
    for f in flat:
        index = np.unravel_index(f, spec.shape)
        try:
            out.append((f, *ev(tuple(int(i) for i in index)), None))
        except (PhotonSimError, ValueError, ArithmeticError) as exc:
            out.append((f, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return out


def default_workers() -> int:
    env = os.environ.get("PHOTON_SIM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_scan(spec: GridSpec, workers: int | None = None) -> RegionResult:
    """Evaluate fidelity, efficiency and rate on every lattice point."""
    workers = default_workers() if workers is None else max(1, int(workers))
    n = int(np.prod(spec.shape))
    fid = np.full(n, math.nan)
    eta = np.full(n, math.nan)
    rate = np.full(n, math.nan)
    errors: dict[tuple[int, ...], str] = {}
    flat = list(range(n))
    if workers == 1 or n < 64:
        chunks = [_evaluate_chunk(spec, flat)]
    else:
        size = max(16, n // (workers * 8))
        parts = [flat[i : i + size] for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_chunk, [spec] * len(parts), parts))
    for chunk in chunks:
        for f, fv, ev, rv, err in chunk:
            fid[f], eta[f], rate[f] = fv, ev, rv
            if err is not None:
                errors[tuple(int(i) for i in np.unravel_index(f, spec.shape))] = err
    fid, eta, rate = (a.reshape(spec.shape) for a in (fid, eta, rate))
    th = spec.thresholds
    feasible = np.isfinite(fid)
    if th.fidelity_min is not None:
        feasible &= fid > th.fidelity_min
    if th.rate_min_hz is not None:
        feasible &= rate > th.rate_min_hz
    if th.eta_min is not None:
        feasible &= eta > th.eta_min
    coords = tuple(ax.coords() for ax in spec.axes)
    return RegionResult(spec, coords, fid, eta, rate, feasible, errors)
