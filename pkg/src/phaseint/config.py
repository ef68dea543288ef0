"""Run configuration: defaults, optional JSON config file, explicit flags (flags win)."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .budden import DEFAULT_RADIUS
from .contour import DEFAULT_TOL_ODE, DEFAULT_TOL_QUAD
from .potential import DEFAULT_TOL_ROOT

CONFIG_ENV = "PHASEINT_CONFIG"
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    tol_quad: float = DEFAULT_TOL_QUAD
    tol_ode: float = DEFAULT_TOL_ODE
    tol_root: float = DEFAULT_TOL_ROOT
    radius: float = DEFAULT_RADIUS
    format: str = "json"
    verbosity: int = 0

    def __post_init__(self):
        for name in ("tol_quad", "tol_ode", "tol_root", "radius"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or not val > 0:
                raise ValueError(f"{name} must be a positive number, got {val!r}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if int(self.verbosity) != self.verbosity:
            raise ValueError("verbosity must be an integer")

    def to_json(self) -> dict:
        return asdict(self)


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults < config file (``path`` or $PHASEINT_CONFIG) < overrides."""
    data: dict = {}
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, val in (overrides or {}).items():
        if val is not None:
            data[key] = val
    return RunConfig(**data)
