"""Run configuration: a flat ``section.key = value`` text format.

Lines are ``key = value`` with dotted section keys, ``#`` starts a comment
and unknown keys are rejected.  Every key has a default; an empty file
gives the square-domain reproduction setup (``alpha = 1``, ``beta = 10``,
``sigma = 1``, ``r = 4``, ``gamma = 0.6``, uniform source ``0.001``,
``epsilon = 1e-7``, ``eta1 = 1e-4``, ``eta2 = 1e-5``).  Keys accepting
``auto`` are resolved at run time.
"""

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError


@dataclass
class MeshConfig:
    nx: int = 64
    ny: int = 64
    width: float = 1.0
    height: float = 1.0


@dataclass
class PhysicsConfig:
    alpha: float = 1.0
    beta: float = 10.0
    sigma: float = 1.0
    r: float = 4.0


@dataclass
class SourceConfig:
    kind: str = "uniform"  # uniform | disk | box
    magnitude: float = 0.001
    # disk: centre and radius; box: [xmin, xmax] x [ymin, ymax]
    cx: float = 0.5
    cy: float = 0.5
    radius: float = 0.1
    xmin: float = 0.25
    xmax: float = 0.75
    ymin: float = 0.0
    ymax: float = 0.05


@dataclass
class BoundaryConfig:
    radiative: str = "all"  # comma list of all|left|right|bottom|top


@dataclass
class OptimizeConfig:
    mode: str = "levelset"  # density | levelset
    worst: bool = False
    gamma: float = 0.6
    tau: float = None  # auto: tau_fraction / max|initial sensitivity|
    tau_fraction: float = None  # auto: 0.05 for density, 1.0 for levelset
    epsilon: float = 1e-7
    penalty_scale: str = "sensitivity"  # sensitivity | absolute
    q: float = 0.95
    m: int = 1
    width: float = 0.1
    delta_w: float = 1e-6
    eta1: float = 1e-4
    eta2: float = 1e-5
    eta3: float = None  # auto: relative to the source work of the first iterate
    max_iters: int = 10000
    max_newton: int = 50
    sensitivity_mode: str = "self_adjoint"  # self_adjoint | adjoint


@dataclass
class OutputConfig:
    directory: str = "out"
    snapshot_stride: int = 0  # 0: final fields only
    timing: bool = False  # write measured wall_ms instead of 0


@dataclass
class RunConfig:
    mesh: MeshConfig = field(default_factory=MeshConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    source: SourceConfig = field(default_factory=SourceConfig)
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    optimize: OptimizeConfig = field(default_factory=OptimizeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self):
        validate(self)
        return self


_SECTIONS = [f.name for f in dataclasses.fields(RunConfig)]
_AUTO = {"optimize.tau", "optimize.tau_fraction", "optimize.eta3"}
_TYPES = {
    f"{s}.{f.name}": f.type
    for s in _SECTIONS
    for f in dataclasses.fields(RunConfig.__dataclass_fields__[s].default_factory)
}


def _convert(key, text):
    if key in _AUTO and text.lower() == "auto":
        return None
    typ = _TYPES[key]
    try:
        if typ is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if typ is int:
            return int(text)
        if typ is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {typ.__name__}") from None
    return text


def _format(value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def validate(cfg):
    """Raise :class:`ConfigError` naming the offending key."""
    p, o, m, s = cfg.physics, cfg.optimize, cfg.mesh, cfg.source
    checks = [
        ("physics.alpha", p.alpha > 0, "must be positive"),
        ("physics.beta", p.beta > p.alpha, "must exceed physics.alpha"),
        ("physics.sigma", p.sigma > 0, "must be positive"),
        ("physics.r", p.r >= 2, "must be >= 2"),
        ("mesh.nx", m.nx >= 1, "must be >= 1"),
        ("mesh.ny", m.ny >= 1, "must be >= 1"),
        ("mesh.width", m.width > 0, "must be positive"),
        ("mesh.height", m.height > 0, "must be positive"),
        ("source.kind", s.kind in ("uniform", "disk", "box"), "must be uniform, disk or box"),
        ("source.magnitude", s.magnitude >= 0, "must be nonnegative"),
        ("optimize.mode", o.mode in ("density", "levelset"), "must be density or levelset"),
        ("optimize.gamma", 0 < o.gamma < 1, "must lie in (0, 1)"),
        ("optimize.tau", o.tau is None or o.tau >= 0, "must be nonnegative or auto"),
        ("optimize.tau_fraction", o.tau_fraction is None or o.tau_fraction > 0, "must be positive or auto"),
        ("optimize.epsilon", o.mode != "levelset" or o.epsilon > 0, "must be positive in levelset mode"),
        ("optimize.penalty_scale", o.penalty_scale in ("sensitivity", "absolute"),
         "must be sensitivity or absolute"),
        ("optimize.q", 0 < o.q < 1, "must lie in (0, 1)"),
        ("optimize.m", o.m >= 1, "must be >= 1"),
        ("optimize.width", o.width > 0, "must be positive"),
        ("optimize.delta_w", o.delta_w > 0, "must be positive"),
        ("optimize.eta1", o.eta1 > 0, "must be positive"),
        ("optimize.eta2", o.eta2 > 0, "must be positive"),
        ("optimize.eta3", o.eta3 is None or o.eta3 > 0, "must be positive or auto"),
        ("optimize.max_iters", o.max_iters >= 1, "must be >= 1"),
        ("optimize.max_newton", o.max_newton >= 1, "must be >= 1"),
        ("optimize.sensitivity_mode", o.sensitivity_mode in ("self_adjoint", "adjoint"),
         "must be self_adjoint or adjoint"),
        ("output.snapshot_stride", cfg.output.snapshot_stride >= 0, "must be >= 0"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{key}: {msg}")
    sides = {t.strip() for t in cfg.boundary.radiative.split(",") if t.strip()}
    if not sides or not sides <= {"all", "left", "right", "bottom", "top"}:
        raise ConfigError("boundary.radiative: expected a comma list of all, left, right, bottom, top")


def parse_config_text(text, origin="<string>"):
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{origin}:{lineno}: missing value for {key}")
        section, name = key.split(".")
        setattr(getattr(cfg, section), name, _convert(key, value))
    validate(cfg)
    return cfg


def named_configs():
    """Names of the configurations shipped with the package."""
    root = resources.files(__package__) / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve_config(name_or_path):
    """Path of a config file, looking up shipped configs by bare name."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    shipped = resources.files(__package__) / "configs" / f"{name_or_path}.cfg"
    if shipped.is_file():
        return shipped
    raise ConfigError(f"config {name_or_path!r} not found (shipped: {', '.join(named_configs())})")


def parse_config(path):
    """Parse a config file, or a shipped config given by name."""
    p = resolve_config(path)
    return parse_config_text(p.read_text(), origin=str(path))


def dump_config(cfg):
    """Effective configuration as text that parses back to an equal config."""
    lines = []
    for s in _SECTIONS:
        sec = getattr(cfg, s)
        for f in dataclasses.fields(sec):
            lines.append(f"{s}.{f.name} = {_format(getattr(sec, f.name))}")
    return "\n".join(lines) + "\n"
