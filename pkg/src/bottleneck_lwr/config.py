"""Scalar parameters of a bottleneck experiment and their validation."""

from __future__ import annotations

import json
import math
from dataclasses import MISSING, asdict, dataclass, fields
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Base class for every configuration problem."""


class CflViolation(ConfigError):
    pass


class MisalignedGrids(ConfigError):
    pass


class BadCosts(ConfigError):
    pass


class BadHorizon(ConfigError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one experiment.

    Units: vehicles, hours (within-day time), dollars (payoff axis) and days
    (day-to-day axis). ``u`` and ``w`` are in $/day.
    """

    N: float
    C: float
    alpha: float
    beta: float
    gamma: float
    t_star: float
    t0: float
    t0p: float
    u: float
    w: float
    dt: float
    dx: float
    dr: float
    jam_tol: float = 1e-3
    ue_gap_tol: float = 1e-3
    max_days: float = 1000.0

    def replace(self, **changes: Any) -> "SimConfig":
        data = asdict(self)
        data.update(changes)
        return SimConfig(**data)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def demo_config() -> SimConfig:
    """The numerical example: 3600 vehicles through an 1800 vph bottleneck."""
    return SimConfig(
        N=3600.0,
        C=1800.0,
        alpha=50.0,
        beta=25.0,
        gamma=100.0,
        t_star=0.0,
        t0=-4.0,
        t0p=1.0,
        u=1.0,
        w=1.0,
        dt=1.0 / 1000.0,
        dx=0.5,
        dr=0.5,
    )


def _as_int(value: float, what: str, rel: float = 1e-9) -> int:
    n = round(value)
    if n <= 0 or abs(value - n) > rel * max(1.0, abs(value)):
        raise MisalignedGrids(f"{what} must be a positive integer, got {value!r}")
    return int(n)


@dataclass(frozen=True)
class ValidatedConfig:
    """A checked :class:`SimConfig` plus the quantities derived from it.

    Attribute access falls through to the wrapped config, so ``vc.beta`` works.
    """

    config: SimConfig
    L: float
    I: int
    M: int
    kappa: float
    kappa_c: float
    n_early: int
    n_late: int
    m_star: int

    def __getattr__(self, name: str) -> Any:
        # only reached for names not defined on the dataclass itself
        if name.startswith("__"):
            raise AttributeError(name)
        return getattr(object.__getattribute__(self, "config"), name)

    @property
    def split_coef(self) -> float:
        """Arrival rate per unit imaginary density under equal splitting."""
        return self.beta * self.gamma / (self.beta + self.gamma)


def validate(config: SimConfig) -> ValidatedConfig:
    c = config
    for name in ("N", "C", "u", "w", "dt", "dx", "dr"):
        v = getattr(c, name)
        if not (math.isfinite(v) and v > 0):
            err = BadCosts if name == "C" else ConfigError
            raise err(f"{name} must be positive, got {v!r}")
    for name in ("alpha", "beta", "gamma"):
        v = getattr(c, name)
        if not (math.isfinite(v) and v > 0):
            raise BadCosts(f"{name} must be positive, got {v!r}")
    if c.beta >= c.alpha:
        raise BadCosts("beta must be < alpha")
    if not (c.t0 < c.t_star < c.t0p):
        raise BadHorizon("t0 < t_star < t0p is required")
    L = c.beta * (c.t_star - c.t0)
    L_late = c.gamma * (c.t0p - c.t_star)
    if abs(L - L_late) > 1e-12 * max(L, L_late):
        raise BadHorizon(
            f"scheduling costs at the bounds differ: beta*(t_star-t0)={L!r}, "
            f"gamma*(t0p-t_star)={L_late!r}"
        )
    if not (0 < c.jam_tol < 1):
        raise ConfigError("jam_tol must lie in (0, 1)")
    if not c.ue_gap_tol > 0:
        raise ConfigError("ue_gap_tol must be positive")
    if not c.max_days > 0:
        raise ConfigError("max_days must be positive")

    n_early = _as_int(c.dx / (c.beta * c.dt), "dx/(beta*dt)")
    n_late = _as_int(c.dx / (c.gamma * c.dt), "dx/(gamma*dt)")
    m_star = _as_int((c.t_star - c.t0) / c.dt, "(t_star-t0)/dt")
    m_late = _as_int((c.t0p - c.t_star) / c.dt, "(t0p-t_star)/dt")
    I = _as_int(L / c.dx, "L/dx")

    # Boundedness needs dr*w/dx <= 1 (supply side) and dr*u/dx <= 1 (demand
    # side); with min(u, w) alone a cell can overfill when u != w.
    vmax = max(c.u, c.w)
    if c.dx / c.dr < vmax * (1 - 1e-12):
        raise CflViolation(
            f"CFL condition dx/dr >= max(u, w) fails: {c.dx / c.dr!r} < {vmax!r}"
        )

    kappa = (1.0 / c.beta + 1.0 / c.gamma) * c.C
    return ValidatedConfig(
        config=c,
        L=L,
        I=I,
        M=m_star + m_late,
        kappa=kappa,
        kappa_c=c.w * kappa / (c.u + c.w),
        n_early=n_early,
        n_late=n_late,
        m_star=m_star,
    )


def config_from_mapping(data: dict[str, Any]) -> SimConfig:
    known = {f.name for f in fields(SimConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    required = {f.name for f in fields(SimConfig) if f.default is MISSING}
    missing = sorted(k for k in required if k not in data)
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")
    values = {}
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
        values[key] = float(value)
    return SimConfig(**values)


def load_config(path: str | Path) -> SimConfig:
    """Read a flat JSON object whose keys are the :class:`SimConfig` fields."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return config_from_mapping(data)


def dump_config(config: SimConfig) -> str:
    return json.dumps(config.to_dict(), indent=2)
