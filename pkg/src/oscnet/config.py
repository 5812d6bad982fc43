"""Scenario files: an INI dialect parsed with :mod:`configparser`.

Example::

    [graph]
    preset = paper-network        # or: nodes = 4 / edges = 0-1, 1-2, 2-3, 3-0

    [model]
    mu = 1.0

    [coupling]
    kappa = 0@0, 0.5@15           # value@time, ascending times
    h = identity

    [integrator]
    dt = 0.001
    t_end = 60
    record_stride = 10

    [experiment]
    t_switch = 15
    kappa_on = 0.5
    threshold = 0.01
    seed = 1

    [msf]
    lambda = max                  # a number, or max = largest Laplacian eigenvalue
    kappa = 0:1:0.05              # start:stop:step, inclusive
    gamma = 0
    samples = 64
    burn_in = 100

    [outputs]
    out = results.csv
    svg = plot.svg

Unknown sections and keys are errors.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError
from .graph import Graph, from_edge_list, paper_network
from .models import CouplingSpec

__all__ = [
    "GraphSection",
    "ModelSection",
    "CouplingSection",
    "IntegratorSection",
    "ExperimentSection",
    "MsfSection",
    "OutputsSection",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "parse_edges",
    "parse_schedule",
    "parse_grid",
]

PRESETS = {"paper-network": paper_network}


@dataclass(frozen=True)
class GraphSection:
    preset: str | None = "paper-network"
    nodes: int | None = None
    edges: tuple = ()

    def build(self) -> Graph:
        if self.preset is not None:
            return PRESETS[self.preset]()
        return from_edge_list(self.nodes, self.edges)


@dataclass(frozen=True)
class ModelSection:
    mu: float = 1.0


@dataclass(frozen=True)
class CouplingSection:
    kappa: tuple = ((0.0, 0.0), (15.0, 0.5))
    h: str = "identity"

    def build(self) -> CouplingSpec:
        return CouplingSpec(tuple((t, k) for k, t in self.kappa))


@dataclass(frozen=True)
class IntegratorSection:
    dt: float = 1e-3
    t_end: float = 60.0
    record_stride: int = 10


@dataclass(frozen=True)
class ExperimentSection:
    t_switch: float = 15.0
    kappa_on: float = 0.5
    threshold: float = 1e-2
    seed: int = 1


@dataclass(frozen=True)
class MsfSection:
    lambda_: str = "max"
    kappa: tuple = (0.0, 1.0, 0.05)
    gamma: float = 0.0
    samples: int = 64
    burn_in: float = 100.0

    def grid(self) -> np.ndarray:
        return grid_values(*self.kappa)


@dataclass(frozen=True)
class OutputsSection:
    out: str | None = None
    svg: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    graph: GraphSection = field(default_factory=GraphSection)
    model: ModelSection = field(default_factory=ModelSection)
    coupling: CouplingSection = field(default_factory=CouplingSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    msf: MsfSection = field(default_factory=MsfSection)
    outputs: OutputsSection = field(default_factory=OutputsSection)


# key name in the file -> dataclass field name
_KEY_ALIASES = {("msf", "lambda"): "lambda_"}


def parse_edges(text: str) -> tuple:
    edges = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split("-")
        if len(parts) != 2:
            raise ConfigError(f"bad edge {item!r}, expected i-j")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ConfigError(f"bad edge {item!r}, expected integer endpoints") from None
    return tuple(edges)


def parse_schedule(text: str) -> tuple:
    """``"0@0, 0.5@15"`` -> ``((0.0, 0.0), (0.5, 15.0))`` as (value, time) pairs."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "@" in item:
            value, _, time = item.partition("@")
        else:
            value, time = item, "0"
        out.append((_float("kappa", value), _float("kappa", time)))
    if not out:
        raise ConfigError("kappa schedule is empty")
    return tuple(out)


def parse_grid(text: str) -> tuple:
    """``"start:stop:step"`` or a single value."""
    parts = [p.strip() for p in text.split(":")]
    if len(parts) == 1:
        v = _float("kappa", parts[0])
        return (v, v, 1.0)
    if len(parts) != 3:
        raise ConfigError(f"bad grid {text!r}, expected start:stop:step")
    start, stop, step = (_float("kappa", p) for p in parts)
    if step <= 0 or stop < start:
        raise ConfigError(f"bad grid {text!r}: need step > 0 and stop >= start")
    return (start, stop, step)


def grid_values(start: float, stop: float, step: float) -> np.ndarray:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def _float(key, text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite")
    return v


def _int(key, text) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


_PARSERS = {
    ("graph", "preset"): str.strip,
    ("graph", "nodes"): lambda s: _int("nodes", s),
    ("graph", "edges"): parse_edges,
    ("model", "mu"): lambda s: _float("mu", s),
    ("coupling", "kappa"): parse_schedule,
    ("coupling", "h"): str.strip,
    ("integrator", "dt"): lambda s: _float("dt", s),
    ("integrator", "t_end"): lambda s: _float("t_end", s),
    ("integrator", "record_stride"): lambda s: _int("record_stride", s),
    ("experiment", "t_switch"): lambda s: _float("t_switch", s),
    ("experiment", "kappa_on"): lambda s: _float("kappa_on", s),
    ("experiment", "threshold"): lambda s: _float("threshold", s),
    ("experiment", "seed"): lambda s: _int("seed", s),
    ("msf", "lambda"): str.strip,
    ("msf", "kappa"): parse_grid,
    ("msf", "gamma"): lambda s: _float("gamma", s),
    ("msf", "samples"): lambda s: _int("samples", s),
    ("msf", "burn_in"): lambda s: _float("burn_in", s),
    ("outputs", "out"): str.strip,
    ("outputs", "svg"): str.strip,
}


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    """Range checks that mirror the downstream constructors' preconditions."""
    g = cfg.graph
    if g.preset is not None:
        if g.preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {g.preset!r}")
        if g.nodes is not None or g.edges:
            raise ConfigError("graph: give either preset or nodes/edges, not both")
    else:
        if g.nodes is None:
            raise ConfigError("graph: nodes is required without a preset")
        g.build()
    if not cfg.model.mu > 0:
        raise ConfigError("mu must be > 0")
    if cfg.coupling.h != "identity":
        raise ConfigError(f"h: only 'identity' is supported, got {cfg.coupling.h!r}")
    cfg.coupling.build()
    it = cfg.integrator
    if not it.dt > 0:
        raise ConfigError("dt must be > 0")
    if not it.t_end > 0:
        raise ConfigError("t_end must be > 0")
    if it.record_stride < 1:
        raise ConfigError("record_stride must be >= 1")
    ex = cfg.experiment
    if not 0 <= ex.t_switch:
        raise ConfigError("t_switch must be >= 0")
    if ex.kappa_on < 0:
        raise ConfigError("kappa_on must be >= 0")
    if not ex.threshold > 0:
        raise ConfigError("threshold must be > 0")
    m = cfg.msf
    if m.lambda_ != "max" and not _float("lambda", m.lambda_) >= 0:
        raise ConfigError("lambda must be >= 0 or 'max'")
    if m.kappa[0] < 0:
        raise ConfigError("kappa grid must start at >= 0")
    if m.samples < 2:
        raise ConfigError("samples must be >= 2")
    if not m.burn_in > 0:
        raise ConfigError("burn_in must be > 0")
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    """Parse scenario text; missing sections and keys take their defaults.

    Raises
    ------
    ConfigError
        On syntax errors (with the line number), unknown sections or keys,
        and out-of-range values (with the key name).
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",),
                                   interpolation=None, empty_lines_in_values=False)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: expected a [section] header") from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else "?"
        raise ConfigError(f"line {lineno}: syntax error") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate section [{exc.section}]") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate key {exc.option!r}") from None

    cfg = ScenarioConfig()
    section_names = {f.name for f in fields(ScenarioConfig)}
    for name in cp.sections():
        if name not in section_names:
            raise ConfigError(f"unknown section [{name}]")
        updates = {}
        for key, raw in cp.items(name):
            parser = _PARSERS.get((name, key))
            if parser is None:
                raise ConfigError(f"[{name}]: unknown key {key!r}")
            updates[_KEY_ALIASES.get((name, key), key)] = parser(raw)
        section = getattr(cfg, name)
        if name == "graph" and ("nodes" in updates or "edges" in updates) and "preset" not in updates:
            updates["preset"] = None
        cfg = replace(cfg, **{name: replace(section, **updates)})
    return validate(cfg)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(v: float) -> str:
    return repr(float(v))


def serialize_config(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config` up to comments and formatting."""
    lines = ["[graph]"]
    if cfg.graph.preset is not None:
        lines.append(f"preset = {cfg.graph.preset}")
    else:
        lines.append(f"nodes = {cfg.graph.nodes}")
        lines.append("edges = " + ", ".join(f"{i}-{j}" for i, j in cfg.graph.edges))
    lines += ["", "[model]", f"mu = {_fmt(cfg.model.mu)}"]
    lines += ["", "[coupling]",
              "kappa = " + ", ".join(f"{_fmt(k)}@{_fmt(t)}" for k, t in cfg.coupling.kappa),
              f"h = {cfg.coupling.h}"]
    it = cfg.integrator
    lines += ["", "[integrator]", f"dt = {_fmt(it.dt)}", f"t_end = {_fmt(it.t_end)}",
              f"record_stride = {it.record_stride}"]
    ex = cfg.experiment
    lines += ["", "[experiment]", f"t_switch = {_fmt(ex.t_switch)}", f"kappa_on = {_fmt(ex.kappa_on)}",
              f"threshold = {_fmt(ex.threshold)}", f"seed = {ex.seed}"]
    m = cfg.msf
    lines += ["", "[msf]", f"lambda = {m.lambda_}", "kappa = " + ":".join(_fmt(v) for v in m.kappa),
              f"gamma = {_fmt(m.gamma)}", f"samples = {m.samples}", f"burn_in = {_fmt(m.burn_in)}"]
    outs = [f"{k} = {v}" for k, v in (("out", cfg.outputs.out), ("svg", cfg.outputs.svg)) if v]
    if outs:
        lines += ["", "[outputs]", *outs]
    return "\n".join(lines) + "\n"
