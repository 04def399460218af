"""Run configuration: TOML parsing and schema checks.

Grammar (all sections optional unless noted)::

    [lattice]                 # required for build/validate/evolve
    n = [n_min, n_max]        # inclusive, must contain 0
    m = [m_min, m_max]

    [potential]               # build / validate
    alpha = <function>        # default 0
    beta  = <function>        # default 0
    p = <function>            # required, 0 < |p/2| < 1
    q = <function>            # required, 0 < |q/2| < 1
    s = 0.0                   # F_+(0) = diag(e^{is}, e^{-is})
    ell = 0.0                 # G_-(0) = diag(e^{i ell}, e^{-i ell})
    require_alpha0 = true

    [axis]                    # evolve
    u_row = <function>        # u(n, 0)
    u_col = <function>        # u(0, m); must agree with u_row at 0
    p = <function>
    q = <function>
    curve_flow = false        # also run the curve flow along m

    [solver]
    residual_tol = 1e-10
    truncation_K = 8
    max_K = 1024

    [output]
    lambda = [1.0]
    tol = 1e-8                # planarity tolerance
    edge_tol = 1e-9
    obj = "surface.obj"       # relative to the config file
    report = "report.json"

A ``<function>`` of one index is a number (constant), a list (values from
the lower end of the range), a table ``{start = i, values = [...]}``, a CSV
file ``{csv = "path"}`` with columns index,value, or a preset
``{preset = "constant"|"linear"|"sinusoidal", ...}``.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

try:
    import tomllib as tomli
except ImportError:                     # Python 3.10
    import tomli

from .birkhoff import SolverConfig
from .errors import ConfigError
from .lattice import Rect
from .potentials import Table


@dataclass
class RunConfig:
    mode: str
    rect: Rect = None
    potential: dict = field(default_factory=dict)
    axis: dict = field(default_factory=dict)
    solver: SolverConfig = field(default_factory=SolverConfig)
    lambdas: tuple = (1.0,)
    tol: float = 1e-8
    edge_tol: float = 1e-9
    obj: str = None
    report: str = None
    raw: dict = field(default_factory=dict)
    base_dir: str = "."

    @property
    def digest(self):
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(text.encode()).hexdigest()


def parse_lambdas(text):
    try:
        vals = tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse lambda list {text!r}")
    return check_lambdas(vals)


def check_lambdas(vals):
    vals = tuple(float(v) for v in vals)
    if not vals or any(not math.isfinite(v) or v <= 0 for v in vals):
        raise ConfigError("lambda values must be real and positive")
    return vals


def _range(sec, key):
    v = sec.get(key)
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v)):
        raise ConfigError(f"lattice.{key} must be a pair of integers [min, max]")
    if not v[0] <= 0 <= v[1]:
        raise ConfigError(f"lattice.{key} = {v} must contain the base point 0")
    return v


def parse_rect(data):
    sec = data.get("lattice")
    if not isinstance(sec, dict):
        raise ConfigError("missing [lattice] section")
    n = _range(sec, "n")
    m = _range(sec, "m")
    return Rect(n[0], n[1], m[0], m[1])


def make_table(spec, lo, hi, name, base_dir="."):
    """Turn a ``<function>`` spec into a :class:`Table` covering ``lo .. hi``."""
    if isinstance(spec, bool):
        raise ConfigError(f"{name}: expected a number, list or table")
    if isinstance(spec, (int, float)):
        return Table.constant(float(spec), lo, hi)
    if isinstance(spec, list):
        if len(spec) < hi - lo + 1:
            raise ConfigError(f"{name}: need {hi - lo + 1} values, got {len(spec)}")
        return Table(lo, [float(x) for x in spec[:hi - lo + 1]])
    if not isinstance(spec, dict):
        raise ConfigError(f"{name}: unsupported specification {spec!r}")
    if "csv" in spec:
        from .hirota import _read_table
        t = _read_table(os.path.join(base_dir, spec["csv"]))
    elif "values" in spec:
        t = Table(int(spec.get("start", lo)), [float(x) for x in spec["values"]])
    elif "preset" in spec:
        kind = spec["preset"]
        try:
            if kind == "constant":
                t = Table.constant(float(spec["value"]), lo, hi)
            elif kind == "linear":
                t = Table.linear(float(spec["slope"]), float(spec.get("offset", 0.0)), lo, hi)
            elif kind == "sinusoidal":
                t = Table.sinusoidal(float(spec["amplitude"]), float(spec["frequency"]),
                                     float(spec.get("phase", 0.0)), float(spec.get("offset", 0.0)),
                                     lo, hi)
            else:
                raise ConfigError(f"{name}: unknown preset {kind!r}")
        except KeyError as e:
            raise ConfigError(f"{name}: preset {kind!r} needs key {e.args[0]!r}")
    else:
        raise ConfigError(f"{name}: table needs 'values', 'csv' or 'preset'")
    if t.start > lo or t.stop < hi:
        raise ConfigError(f"{name}: values cover [{t.start}, {t.stop}] but [{lo}, {hi}] is needed")
    return t


def check_pq(table, name):
    for i in range(table.start, table.stop + 1):
        v = abs(table(i)) / 2
        if not 0 < v < 1:
            raise ConfigError(f"{name}({i}) = {table(i)} violates the condition 0 < |{name}/2| < 1")


def load(path, mode):
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found")
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"{path}: invalid TOML ({e})")
    return from_dict(data, mode, os.path.dirname(os.path.abspath(path)))


def from_dict(data, mode, base_dir="."):
    cfg = RunConfig(mode=mode, raw=data, base_dir=base_dir)
    sol = data.get("solver", {})
    try:
        cfg.solver = SolverConfig(**{k: sol[k] for k in ("residual_tol", "truncation_K", "max_K") if k in sol})
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[solver]: {e}")
    out = data.get("output", {})
    if "lambda" in out:
        lam = out["lambda"]
        cfg.lambdas = check_lambdas(lam if isinstance(lam, list) else [lam])
    cfg.tol = float(out.get("tol", cfg.tol))
    cfg.edge_tol = float(out.get("edge_tol", cfg.edge_tol))
    cfg.obj = out.get("obj")
    cfg.report = out.get("report")
    if mode in ("build", "validate"):
        cfg.rect = parse_rect(data)
        cfg.potential = parse_potential(data, cfg.rect, base_dir)
    elif mode == "evolve":
        cfg.rect = parse_rect(data)
        cfg.axis = parse_axis(data, cfg.rect, base_dir)
    return cfg


def parse_potential(data, rect, base_dir="."):
    sec = data.get("potential")
    if not isinstance(sec, dict):
        raise ConfigError("missing [potential] section")
    for key in ("p", "q"):
        if key not in sec:
            raise ConfigError(f"[potential] needs '{key}'")
    n0, n1, m0, m1 = rect.n_min, rect.n_max - 1, rect.m_min, rect.m_max - 1
    n1, m1 = max(n1, n0), max(m1, m0)
    pot = {
        "alpha": make_table(sec.get("alpha", 0.0), n0, n1, "alpha", base_dir),
        "beta": make_table(sec.get("beta", 0.0), m0, m1, "beta", base_dir),
        "p": make_table(sec["p"], n0, n1, "p", base_dir),
        "q": make_table(sec["q"], m0, m1, "q", base_dir),
        "s": float(sec.get("s", 0.0)),
        "ell": float(sec.get("ell", 0.0)),
        "require_alpha0": bool(sec.get("require_alpha0", True)),
    }
    check_pq(pot["p"], "p")
    check_pq(pot["q"], "q")
    a = pot["alpha"]
    if pot["require_alpha0"] and a.start <= 0 <= a.stop and abs(a(0)) > 1e-14:
        raise ConfigError(f"alpha(0) = {a(0)} but the construction requires alpha(0) = 0 "
                          "(set require_alpha0 = false to override)")
    return pot


def parse_axis(data, rect, base_dir="."):
    sec = data.get("axis")
    if not isinstance(sec, dict):
        raise ConfigError("missing [axis] section")
    for key in ("u_row", "u_col", "p", "q"):
        if key not in sec:
            raise ConfigError(f"[axis] needs '{key}'")
    ax = {
        "u_row": make_table(sec["u_row"], rect.n_min, rect.n_max, "u_row", base_dir),
        "u_col": make_table(sec["u_col"], rect.m_min, rect.m_max, "u_col", base_dir),
        "p": make_table(sec["p"], rect.n_min, rect.n_max, "p", base_dir),
        "q": make_table(sec["q"], rect.m_min, rect.m_max, "q", base_dir),
        "curve_flow": bool(sec.get("curve_flow", False)),
    }
    check_pq(ax["p"], "p")
    check_pq(ax["q"], "q")
    if abs(ax["u_row"](0) - ax["u_col"](0)) > 1e-14:
        raise ConfigError("axis data disagree at the origin: u_row(0) != u_col(0)")
    return ax
