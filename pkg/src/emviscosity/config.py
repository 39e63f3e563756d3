"""Run configuration: TOML files, flag overrides and validation.

A config has three tables.  Swept axes are given as ``<axis>_range`` tables
with ``start``, ``stop``, ``num`` and optional ``log`` (default true)::

    command = "sweep"

    [scenario]
    material = { kind = "drude", omega_p_eV = 9.0, gamma_eV = 0.1 }
    atom = { alpha0_A3 = 47.28, omega_a_eV = 1.3 }
    z_nm_range = { start = 1.0, stop = 200.0, num = 40 }
    v_m_s = 12000.0
    T_K = 3.0

    [computation]
    route = "symmetric"

    [output]
    format = "csv"
"""
from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import tomli
import tomli_w

from . import units
from .force import ROUTES, Scenario
from .materials import ConstantEpsilon, Drude, Tabulated
from .polarizability import AtomParams

COMMANDS = ("viscosity", "asymptotic", "sweep", "regime-map", "spectral-density", "validate")
AXES = ("z_nm", "v_m_s", "T_K")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class RangeSpec:
    start: float
    stop: float
    num: int
    log: bool = True

    def values(self):
        if self.log:
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


@dataclass
class ScenarioConfig:
    material: dict | None = None
    atom: dict = field(default_factory=lambda: {"alpha0_A3": 47.28, "omega_a_eV": 1.3})
    z_nm: float | None = None
    v_m_s: float | None = None
    T_K: float | None = None
    z_nm_range: RangeSpec | None = None
    v_m_s_range: RangeSpec | None = None
    T_K_range: RangeSpec | None = None
    omega_eV_range: RangeSpec | None = None


@dataclass
class ComputationConfig:
    route: str = "symmetric"
    mode: str = "full"
    order: str = "dressed"
    rtol: float = 1e-6
    inner_rtol: float = 1e-9
    max_eval: int = 20000
    workers: int = 1
    v_at_grid_centre: bool = True


@dataclass
class OutputConfig:
    path: str = ""
    format: str = "csv"
    precision: int = 10


@dataclass
class RunConfig:
    command: str = "viscosity"
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    computation: ComputationConfig = field(default_factory=ComputationConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def example(cls, command="viscosity"):
        """Gold-like Drude surface and Rb-like atom at 5 nm, 12 km/s, 3 K."""
        return cls(command=command, scenario=ScenarioConfig(
            material={"kind": "drude", "omega_p_eV": 9.0, "gamma_eV": 0.1},
            z_nm=5.0, v_m_s=12000.0, T_K=3.0))

    # ------------------------------------------------------------------
    def to_dict(self):
        """Plain nested dict without ``None`` entries (TOML has no null)."""
        def strip(d):
            if isinstance(d, dict):
                return {k: strip(v) for k, v in d.items() if v is not None}
            return d
        return strip(asdict(self))

    def dumps(self):
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError("<file>", f"invalid TOML: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.loads(fh.read())
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None

    @classmethod
    def from_dict(cls, data):
        data = copy.deepcopy(data)
        unknown = set(data) - {"command", "scenario", "computation", "output"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown top-level key")
        cfg = cls(command=data.get("command", "viscosity"),
                  scenario=_section(ScenarioConfig, data.get("scenario", {}), "scenario"),
                  computation=_section(ComputationConfig, data.get("computation", {}),
                                       "computation"),
                  output=_section(OutputConfig, data.get("output", {}), "output"))
        cfg.validate()
        return cfg

    # ------------------------------------------------------------------
    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {COMMANDS}")
        c, o, s = self.computation, self.output, self.scenario
        if c.route not in ROUTES:
            raise ConfigError("computation.route", f"must be one of {ROUTES}")
        if c.mode not in ("full", "lte"):
            raise ConfigError("computation.mode", "must be 'full' or 'lte'")
        if c.order not in ("dressed", "leading"):
            raise ConfigError("computation.order", "must be 'dressed' or 'leading'")
        for name in ("rtol", "inner_rtol"):
            if not getattr(c, name) > 0:
                raise ConfigError(f"computation.{name}", "must be positive")
        if c.max_eval <= 0:
            raise ConfigError("computation.max_eval", "must be positive")
        if c.workers < 1:
            raise ConfigError("computation.workers", "must be at least 1")
        if o.format not in FORMATS:
            raise ConfigError("output.format", f"must be one of {FORMATS}")
        if not 1 <= o.precision <= 17:
            raise ConfigError("output.precision", "must lie in [1, 17]")
        for axis in AXES + ("omega_eV",):
            r = getattr(s, f"{axis}_range")
            if r is None:
                continue
            p = f"scenario.{axis}_range"
            if r.num < 1:
                raise ConfigError(p + ".num", "must be at least 1")
            if r.log and not (r.start > 0 and r.stop > 0):
                raise ConfigError(p, "log-spaced range needs positive bounds")
            if axis == "omega_eV" and not 0 < r.start < r.stop:
                raise ConfigError(p, "empty frequency range")
        for axis in AXES:
            if getattr(s, axis) is not None and getattr(s, f"{axis}_range") is not None:
                raise ConfigError(f"scenario.{axis}", f"give either {axis} or {axis}_range")
        if len(self.swept_axes()) > 2:
            raise ConfigError("scenario", "at most two swept axes per run")
        if s.material is not None:
            self.build_material()
        self.build_atom()
        return self

    def swept_axes(self):
        return [a for a in AXES if getattr(self.scenario, f"{a}_range") is not None]

    def axis_values(self, axis):
        r = getattr(self.scenario, f"{axis}_range")
        if r is not None:
            return r.values()
        val = getattr(self.scenario, axis)
        return None if val is None else np.array([float(val)])

    # ------------------------------------------------------------------
    def build_material(self):
        m = self.scenario.material
        if m is None:
            raise ConfigError("scenario.material", "a material is required for this command")
        kind = m.get("kind")
        try:
            if kind == "drude":
                return Drude(float(m["omega_p_eV"]), float(m["gamma_eV"]))
            if kind == "constant":
                return ConstantEpsilon(complex(float(m["eps_re"]), float(m.get("eps_im", 0.0))))
            if kind == "tabulated":
                return Tabulated.from_csv(m["path"])
        except KeyError as exc:
            raise ConfigError(f"scenario.material.{exc.args[0]}", "missing") from None
        except (ValueError, OSError) as exc:
            raise ConfigError("scenario.material", str(exc)) from None
        raise ConfigError("scenario.material.kind", "must be 'drude', 'constant' or 'tabulated'")

    def build_atom(self):
        a = self.scenario.atom
        try:
            if "alpha0_nm3" in a:
                vol = float(a["alpha0_nm3"])
            else:
                vol = float(a["alpha0_A3"]) * units.ANGSTROM3_TO_NM3
            return AtomParams(vol, float(a["omega_a_eV"]), a.get("gamma_eV"))
        except KeyError as exc:
            raise ConfigError(f"scenario.atom.{exc.args[0]}", "missing") from None
        except ValueError as exc:
            raise ConfigError("scenario.atom", str(exc)) from None

    def build_scenario(self, z=None, v=None, T=None):
        s, c = self.scenario, self.computation
        z = s.z_nm if z is None else z
        v = s.v_m_s if v is None else v
        T = s.T_K if T is None else T
        for name, val in (("z_nm", z), ("v_m_s", v), ("T_K", T)):
            if val is None:
                raise ConfigError(f"scenario.{name}", "missing")
        try:
            return Scenario(self.build_atom(), self.build_material(), float(z), float(v),
                            float(T), mode=c.mode, order=c.order, rtol=c.rtol,
                            inner_rtol=c.inner_rtol, max_eval=c.max_eval)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("scenario", str(exc)) from None

    def apply_overrides(self, **flags):
        """Flags take precedence over file values; ``None`` means not given."""
        mapping = {"route": ("computation", "route"), "mode": ("computation", "mode"),
                   "order": ("computation", "order"), "tol": ("computation", "rtol"),
                   "workers": ("computation", "workers"), "out": ("output", "path"),
                   "format": ("output", "format")}
        for key, val in flags.items():
            if val is None or key not in mapping:
                continue
            sec, attr = mapping[key]
            setattr(getattr(self, sec), attr, val)
        return self.validate()


def _section(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "must be a table")
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")
    kw = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        val = data[f.name]
        if f.name.endswith("_range"):
            if not isinstance(val, dict):
                raise ConfigError(f"{path}.{f.name}", "must be a table")
            try:
                val = RangeSpec(float(val["start"]), float(val["stop"]), int(val["num"]),
                                bool(val.get("log", True)))
            except KeyError as exc:
                raise ConfigError(f"{path}.{f.name}.{exc.args[0]}", "missing") from None
        kw[f.name] = val
    return cls(**kw)
