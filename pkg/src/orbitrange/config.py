"""Job configuration files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Union

from .errors import ConfigError
from .opmodel import OperatorModel
from .serial import dumps, format_real, parse_real
from .seq import SelfadjointSpectrum, SpectrumSeq

__all__ = ["Options", "JobConfig", "load_config", "shipped_config", "SHIPPED"]

SHIPPED = ("example_3_2", "closed", "not_closed", "k_range", "disk")


@dataclass(frozen=True)
class Options:
    grid: int = 720
    tol: float = 1e-9
    seed: int = 0
    m_cut_override: Optional[int] = None

    def to_dict(self):
        return {"grid": self.grid, "tol": format_real(self.tol), "seed": self.seed,
                "m_cut_override": self.m_cut_override}

    @classmethod
    def from_dict(cls, data, location="options"):
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise ConfigError(location, "expected an object")
        unknown = set(data) - {"grid", "tol", "seed", "m_cut_override"}
        if unknown:
            raise ConfigError(location, f"unexpected keys {sorted(unknown)}")

        def integer(key, default, minimum, optional=False):
            if key not in data or (optional and data[key] is None):
                return default
            v = data[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{location}.{key}", f"expected an integer, got {v!r}")
            if v < minimum:
                raise ConfigError(f"{location}.{key}", f"must be >= {minimum}")
            return v

        tol = cls.tol
        if "tol" in data:
            tol = float(parse_real(data["tol"], f"{location}.tol"))
            if not tol > 0:
                raise ConfigError(f"{location}.tol", "must be positive")
        return cls(grid=integer("grid", cls.grid, 3), tol=tol, seed=integer("seed", 0, 0),
                   m_cut_override=integer("m_cut_override", None, 0, optional=True))


@dataclass(frozen=True, eq=False)
class JobConfig:
    operator: OperatorModel
    spectrum: Union[SpectrumSeq, SelfadjointSpectrum]
    options: Options = field(default_factory=Options)

    def to_dict(self):
        return {"operator": self.operator.to_dict(), "spectrum": self.spectrum.to_dict(),
                "options": self.options.to_dict()}

    def dumps(self):
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected an object")
        unknown = set(data) - {"operator", "spectrum", "options"}
        if unknown:
            raise ConfigError("<root>", f"unexpected keys {sorted(unknown)}")
        for key in ("operator", "spectrum"):
            if key not in data:
                raise ConfigError("<root>", f"missing '{key}'")
        op = OperatorModel.from_dict(data["operator"], "operator")
        spec = data["spectrum"]
        if isinstance(spec, dict) and "plus" in spec:
            spectrum = SelfadjointSpectrum.from_dict(spec, "spectrum")
        else:
            spectrum = SpectrumSeq.from_dict(spec, "spectrum")
        return cls(op, spectrum, Options.from_dict(data.get("options"), "options"))

    @classmethod
    def loads(cls, text, source="<config>"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from exc
        return cls.from_dict(data)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(path), exc.strerror or str(exc)) from exc
    return JobConfig.loads(text, str(path))


def shipped_config(name):
    """One of the configurations bundled with the package (see ``SHIPPED``)."""
    if name not in SHIPPED:
        raise ConfigError(name, f"unknown shipped config; choose from {', '.join(SHIPPED)}")
    text = resources.files("orbitrange.data").joinpath(f"{name}.json").read_text("utf-8")
    return JobConfig.loads(text, name)
