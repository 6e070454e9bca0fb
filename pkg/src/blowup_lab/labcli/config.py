"""Run configuration: JSON file plus optional preset expansion."""

from __future__ import annotations

import copy
import enum
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..regions import SystemParams
from .presets import PRESET_DEFAULTS, PRESETS


class Experiment(str, enum.Enum):
    CLASSIFY = "classify"
    INTEGRATE = "integrate"
    SWEEP = "sweep"
    REGION_GRID = "region-grid"
    VERIFY = "verify"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    p_min: float
    p_max: float
    q_min: float
    q_max: float
    resolution: int

    def validate(self) -> "GridSpec":
        if not (1.0 < self.p_min < self.p_max and 1.0 < self.q_min < self.q_max):
            raise ConfigError("grid bounds must satisfy 1 < min < max for both p and q")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ConfigError("grid resolution must be an integer >= 2")
        return self


@dataclass
class RunConfig:
    experiment: Experiment
    params: SystemParams
    preset: str | None = None
    horizon: float = PRESET_DEFAULTS["horizon"]
    thresholds: tuple[float, ...] = tuple(PRESET_DEFAULTS["thresholds"])
    tolerances: tuple[float, float] = tuple(PRESET_DEFAULTS["tolerances"])
    eps_list: tuple[float, ...] = ()
    grid: GridSpec | None = None
    self_test: bool = False
    out: Path = Path("out")
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Fully resolved configuration, as written into the run manifest."""
        return {
            "experiment": self.experiment.value,
            "preset": self.preset,
            "params": self.params.to_dict(),
            "horizon": self.horizon,
            "thresholds": list(self.thresholds),
            "tolerances": list(self.tolerances),
            "eps_list": list(self.eps_list),
            "grid": None if self.grid is None else self.grid.__dict__.copy(),
            "self_test": self.self_test,
        }


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(
    experiment: Experiment | str,
    path: str | os.PathLike | None = None,
    preset: str | None = None,
    out: str | os.PathLike | None = None,
    self_test: bool | None = None,
) -> RunConfig:
    """Build a RunConfig from an optional JSON file, an optional preset and CLI overrides.

    Precedence: command line > file > preset > built-in defaults.
    """
    experiment = Experiment(experiment)
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    name = preset or raw.get("preset")
    merged: dict = {"params": {}}
    merged.update(copy.deepcopy(PRESET_DEFAULTS))
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        merged = _merge(merged, {k: v for k, v in PRESETS[name].items() if k != "reference"})
    merged = _merge(merged, {k: v for k, v in raw.items() if k != "preset"})

    p = merged["params"]
    p.setdefault("R", merged.get("R", 1.0))
    required = ("N", "m", "mu1", "mu2", "p", "q")
    missing = [k for k in required if k not in p]
    if missing and experiment is not Experiment.VERIFY:
        raise ConfigError(f"missing parameters {missing} (give a preset or a params block)")
    if missing:
        p = _merge(PRESETS["fig-a"]["params"], p)
    p.setdefault("nu1_sq", 0.0)
    p.setdefault("nu2_sq", 0.0)
    p.setdefault("eps", 0.1)
    allowed = set(SystemParams.__dataclass_fields__)
    unknown = set(p) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter keys {sorted(unknown)}")
    params = SystemParams(**{k: (int(v) if k == "N" else float(v)) for k, v in p.items()})

    eps_list = tuple(float(e) for e in merged.get("eps_list", ()))
    if any(not e > 0 for e in eps_list):
        raise ConfigError("eps_list entries must be positive")

    grid = None
    if "grid" in merged:
        g = merged["grid"]
        try:
            grid = GridSpec(float(g["p_min"]), float(g["p_max"]), float(g["q_min"]), float(g["q_max"]),
                            int(g.get("resolution", 11)))
        except KeyError as exc:
            raise ConfigError(f"grid block lacks {exc}") from exc
    elif experiment is Experiment.REGION_GRID:
        grid = GridSpec(1.05, 4.0, 1.05, 4.0, 60)

    out_dir = Path(out if out is not None else merged.get("out", "out"))
    return RunConfig(
        experiment=experiment,
        params=params,
        preset=name,
        horizon=float(merged["horizon"]),
        thresholds=tuple(float(x) for x in merged["thresholds"]),
        tolerances=tuple(float(x) for x in merged["tolerances"]),
        eps_list=eps_list,
        grid=grid,
        self_test=bool(self_test if self_test is not None else merged.get("self_test", False)),
        out=out_dir,
        raw=raw,
    )
