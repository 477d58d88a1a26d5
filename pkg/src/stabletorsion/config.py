"""Experiment configuration: INI files with one section per experiment.

Keys mirror the command-line flags one to one (``half_width`` <-> ``--half-width``).
Flags override file values. The seed is mandatory.
"""

import configparser
import re
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ConfigError
from .geometry import Ball, Box, Halfspace, Interval, Polytope, Slab

DOMAINS = ("ball", "interval", "slab", "box", "halfspace", "polytope")
FORMATS = ("csv", "json")


@dataclass
class ExperimentConfig:
    command: str = "bounds"
    experiment: str = ""
    domain: str = "ball"
    dim: int = 1
    radius: float = 1.0
    half_width: float = 1.0
    half_widths: str = ""
    normals: str = ""
    offsets: str = ""
    interior: str = ""
    x: str = ""
    process: str = "Y"
    alpha: float = 1.0
    n: int = 10_000
    n_eig: int = 200_000
    h: float = 0.0
    h_s: float = -1.0
    seed: int = None
    workers: int = 0
    output: str = ""
    format: str = "csv"
    d_list: str = "4,8,16,32,64,128"
    criteria: str = ""
    scale: float = 1.0

    # -- resolved values
    @property
    def step(self):
        """Euler step; 0 selects the dimension default."""
        return None if self.h <= 0 else self.h

    @property
    def sub_step(self):
        """Subordinator grid step; negative means 'same as h'."""
        return None if self.h_s < 0 else self.h_s

    def build_domain(self):
        try:
            d = self.dim
            if self.domain == "ball":
                return Ball(d, self.radius)
            if self.domain == "interval":
                return Interval(self.half_width)
            if self.domain == "slab":
                return Slab(d, self.half_width)
            if self.domain == "box":
                w = _floats(self.half_widths) if self.half_widths else [self.half_width] * d
                return Box(w)
            if self.domain == "halfspace":
                return Halfspace(d)
            if self.domain == "polytope":
                normals = [_floats(row) for row in self.normals.split(";")]
                return Polytope(normals, _floats(self.offsets), _floats(self.interior))
        except ValueError as exc:
            raise ConfigError(f"field 'domain' ({self.domain}): {exc}") from None
        raise ConfigError(f"field 'domain': unknown variant {self.domain!r}")

    def start_point(self, D):
        if not self.x:
            return D.interior_point.copy()
        p = np.asarray(_floats(self.x))
        if p.shape[0] != D.dim:
            raise ConfigError(f"field 'x': expected {D.dim} coordinates")
        return p

    def validate(self, where=None):
        where = where or {}

        def bad(key, msg):
            loc = where.get(key)
            prefix = f"line {loc}: " if loc else ""
            raise ConfigError(f"{prefix}field '{key}': {msg}")

        if self.seed is None:
            bad("seed", "a seed is required")
        if not 0 <= self.seed < 2**64:
            bad("seed", "must be a 64-bit unsigned integer")
        if not 0.0 < self.alpha <= 2.0:
            bad("alpha", "must lie in (0, 2]")
        if self.dim < 1:
            bad("dim", "must be >= 1")
        if self.domain not in DOMAINS:
            bad("domain", f"must be one of {DOMAINS}")
        if self.domain == "interval" and self.dim != 1:
            bad("dim", "an interval has dimension 1")
        if self.n < 100:
            bad("n", "must be >= 100")
        if self.radius <= 0:
            bad("radius", "must be positive")
        if self.half_width <= 0:
            bad("half_width", "must be positive")
        if self.format not in FORMATS:
            bad("format", f"must be one of {FORMATS}")
        if self.process not in ("W", "Y", "Z"):
            bad("process", "must be W, Y or Z")
        if self.scale <= 0:
            bad("scale", "must be positive")
        return self

    def resolved(self):
        return asdict(self)


def _floats(text):
    return [float(t) for t in re.split(r"[,\s]+", text.strip()) if t]


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key, raw):
    typ = _TYPES[key]
    if typ is int or key == "seed":
        return int(raw, 0) if isinstance(raw, str) else int(raw)
    if typ is float:
        return float(raw)
    return str(raw)


def _key_lines(path, section):
    """Line number of each key inside ``section`` (for diagnostics)."""
    out, current = {}, None
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            s = line.strip()
            if s.startswith("[") and s.endswith("]"):
                current = s[1:-1].strip()
            elif current == section and "=" in s and not s.startswith(("#", ";")):
                out[s.split("=", 1)[0].strip()] = i
    return out


def load_config(path=None, section=None, overrides=None):
    """Merge defaults, file section and flag overrides into a validated config."""
    values, where = {}, {}
    if path:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        sections = parser.sections()
        name = section or (sections[0] if sections else None)
        if name is not None:
            if name not in parser:
                raise ConfigError(f"config {path} has no section [{name}]")
            lines = _key_lines(path, name)
            for key, raw in parser[name].items():
                if key not in _TYPES:
                    loc = f"line {lines[key]}: " if key in lines else ""
                    raise ConfigError(f"{loc}unknown field '{key}' in [{name}]")
                values[key] = raw
                where[key] = lines.get(key)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
            where.pop(key, None)
    kwargs = {}
    for key, raw in values.items():
        try:
            kwargs[key] = _convert(key, raw)
        except (TypeError, ValueError):
            loc = f"line {where[key]}: " if where.get(key) else ""
            raise ConfigError(f"{loc}field '{key}': cannot parse {raw!r}") from None
    return ExperimentConfig(**kwargs).validate(where)
