"""Run configuration and JSON (de)serialization."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..emhd_rhs import EmhdParams
from ..errors import ConfigError, EmhdError
from ..spectral_core import GridSpec
from ..time_integrator import IntegratorConfig

OUTPUT_ROOT_ENV = "EMHD_LAB_OUTPUT_ROOT"
PRESETS = ("zero", "cosx", "cosx_cos2y", "cosx_cosy", "cosx_b_cosy")


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


@dataclass(frozen=True)
class InitialDataSpec:
    """Either a closed-form preset or a random band-limited pair.

    For ``kind="random_band"`` both fields get uniformly random phases and
    magnitudes ``(1 + |k|^2)^(-spectrum_exponent/2)`` on ``k_min <= |k| <= k_max``,
    scaled to root-mean-square ``amplitude`` (``amplitude_b`` for b, defaulting
    to ``amplitude``).
    """

    kind: str = "random_band"
    spectrum_exponent: float = 4.0
    k_min: int = 1
    k_max: int = 8
    amplitude: float = 0.3
    amplitude_b: float | None = None

    def __post_init__(self):
        if self.kind != "random_band" and self.kind not in PRESETS:
            raise ConfigError(f"unknown initial data kind {self.kind!r}; choose random_band or one of {PRESETS}")


@dataclass(frozen=True)
class TheoremOverrides:
    theta: float | None = None
    s: float | None = None


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec = GridSpec(64)
    params: EmhdParams = EmhdParams(1.5, 1.5)
    theorem: TheoremOverrides = TheoremOverrides()
    integrator: IntegratorConfig = IntegratorConfig(dt=1e-3, t_end=0.1)
    initial_data: InitialDataSpec = InitialDataSpec()
    observer_stride: int = 1
    output_dir: str = "runs/default"
    seed: int = 0
    snapshot_times: tuple[float, ...] = ()
    until_T0: bool = False
    svg: bool = False

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.observer_stride < 1:
            raise ConfigError("observer_stride must be positive")

    @property
    def sobolev_s(self) -> float:
        return self.theorem.s if self.theorem.s is not None else self.integrator.sobolev_s

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = {"n_per_axis": self.grid.n}
        d["snapshot_times"] = list(self.snapshot_times)
        return d

    def with_updates(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def _build(cls, data: dict | None, base):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return replace(base, **data) if base is not None else cls(**data)


def config_from_dict(data: dict, base: RunConfig | None = None) -> RunConfig:
    """Merge a (possibly partial) nested dict into ``base``."""
    base = base or RunConfig()
    data = dict(data)
    try:
        grid = GridSpec(int(data.pop("grid", {}).get("n_per_axis", base.grid.n)))
        params = _build(EmhdParams, data.pop("params", None), base.params)
        theorem = _build(TheoremOverrides, data.pop("theorem", None), base.theorem)
        integrator = _build(IntegratorConfig, data.pop("integrator", None), base.integrator)
        initial = _build(InitialDataSpec, data.pop("initial_data", None), base.initial_data)
        if "snapshot_times" in data:
            data["snapshot_times"] = tuple(float(t) for t in data["snapshot_times"])
        top = {f.name for f in fields(RunConfig)} - {"grid", "params", "theorem", "integrator", "initial_data"}
        unknown = set(data) - top
        if unknown:
            raise ConfigError(f"unknown RunConfig keys: {sorted(unknown)}")
        return replace(
            base, grid=grid, params=params, theorem=theorem, integrator=integrator, initial_data=initial, **data
        )
    except EmhdError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Read a JSON config file; a run directory's ``metadata.json`` also works."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "config" in data and "grid" not in data:
        data = data["config"]
    return config_from_dict(data, base)
