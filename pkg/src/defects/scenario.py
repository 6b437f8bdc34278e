"""Scenario configs: build named objects, run checks, emit reports.

A scenario is a JSON document::

    {
      "name": "...", "n": 3, "description": "...",
      "anchor": {"id": "...", "claim": "..."},
      "objects": {"<name>": {"family": "<family>", ...params}},
      "checks":  [{"name": "...", "kind": "<kind>", "tolerance": 1e-9, ...args}]
    }

String parameters of the form ``"@name"`` refer to other objects.  Object
families and check kinds are listed in :data:`FAMILIES` and
:data:`CHECKS`; the full schema is documented in ``docs/scenarios.md``.
"""

from __future__ import annotations

import hashlib
import json
import platform
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import kinematics as kin
from .chains import (
    DEFAULT_QUADRATURE,
    Chain,
    Quadrature,
    affine_cell,
    boundary_chain,
    box,
    circle,
    halfplane,
    image,
    point,
    segment,
)
from .currents import (
    BoundaryCurrent,
    ChainCurrent,
    ContractFormCurrent,
    Current,
    DiracCurrent,
    ExcisionBoundaryCurrent,
    ExcisionSpec,
    FormCurrent,
    LinearCombinationCurrent,
    PushforwardCurrent,
    test_form_battery,
)
from .fields import (
    AffineMap,
    Box,
    CoefficientForm,
    DifferentialForm,
    Polynomial,
    book_form,
    constant_form,
    director_line_form,
    dz_form,
    screw_form,
)
from .regularize import MollifierSpec, boundary_commutation, coalescence_schedule
from .fields.scalar import as_points

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioError",
    "Row",
    "Report",
    "Scenario",
    "builtin_names",
    "load_builtin",
    "load_config",
    "run_scenario",
    "FAMILIES",
    "CHECKS",
]

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Invalid config or unresolved object reference."""


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------

@dataclass
class Row:
    """One verification result.

    ``metric`` selects the quantity compared with the tolerance: ``abs``
    and ``rel`` use ``abs_err`` and ``rel_err``; ``upper`` requires
    ``value <= tolerance``.  For battery checks ``value`` and ``reference``
    are per-form lists, ``abs_err`` is the largest difference and
    ``rel_err`` divides it by the largest ``|reference|``.
    """

    check: str
    value: object
    reference: object
    abs_err: float
    rel_err: float | None
    tolerance: float
    metric: str = "abs"
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.metric == "abs":
            err = self.abs_err
        elif self.metric == "rel":
            err = self.rel_err if self.rel_err is not None else np.inf
        elif self.metric == "upper":
            err = float(np.max(self.value))
        else:
            raise ScenarioError(f"unknown metric {self.metric!r}")
        self.passed = bool(err <= self.tolerance)

    def as_dict(self):
        return {"check": self.check, "value": _plain(self.value), "reference": _plain(self.reference),
                "abs_err": _plain(self.abs_err), "rel_err": _plain(self.rel_err), "tolerance": self.tolerance,
                "metric": self.metric, "pass": self.passed}


def _plain(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if v is None:
        return None
    return float(v)


def _scalar_row(name, value, reference, tol, metric="abs") -> Row:
    value, reference = float(value), float(reference)
    abs_err = abs(value - reference)
    rel_err = abs_err / abs(reference) if reference != 0 else None
    return Row(name, value, reference, abs_err, rel_err, float(tol), metric)


def _list_row(name, values, references, tol, metric="rel") -> Row:
    v = np.asarray(values, dtype=float)
    r = np.asarray(references, dtype=float)
    abs_err = float(np.max(np.abs(v - r))) if v.size else 0.0
    scale = float(np.max(np.abs(r))) if r.size else 0.0
    rel_err = abs_err / scale if scale > 0 else None
    return Row(name, v.tolist(), r.tolist(), abs_err, rel_err, float(tol), metric)


# ---------------------------------------------------------------------------
# object families
# ---------------------------------------------------------------------------

def _quad(spec, default=None):
    if spec is None:
        return default
    q, m = spec
    return Quadrature(int(q), int(m))


def _vec(x):
    return np.asarray(x, dtype=float)


def _rotation(angle: float, axis=(0.0, 0.0, 1.0)) -> AffineMap:
    k = _vec(axis) / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    R = np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K
    return AffineMap(R, np.zeros(3))


def _polynomial(p, ctx):
    n = int(p.get("n", ctx.n))
    return Polynomial({tuple(e): float(c) for e, c in p["terms"]}, n)


def _constant_form(p, ctx):
    n = int(p.get("n", ctx.n))
    comps = {tuple(int(i) for i in k.split(",")) if k else (): float(v) for k, v in p["components"].items()}
    return constant_form(n, int(p["degree"]), comps)


def _d(f):
    if isinstance(f, DifferentialForm):
        return f.d
    return CoefficientForm(f.n, 0, [f]).d


def _form_current(p, ctx):
    pieces = [(f, ch) for f, ch in p["pieces"]]
    region = Box(*p["region"]) if "region" in p else ctx.box
    if region is not None and region.n != pieces[0][0].n:
        region = None
    return FormCurrent(pieces, region, _quad(p.get("quadrature"), ctx.quadrature))


def _velocity(p):
    fam = p["family"]
    mult = p.get("multiplier", [1.0])
    if fam == "rotation_z":
        return kin.rotation_z(float(p.get("omega", 1.0)), mult)
    if fam == "translation":
        return kin.translation(p["velocity"], mult)
    if fam == "linear":
        return kin.linear(p["matrix"], mult)
    if fam == "shear":
        return kin.shear(float(p.get("rate", 1.0)), int(p.get("n", 3)), mult)
    raise ScenarioError(f"unknown velocity family {fam!r}")


def _excision(p, ctx):
    e = p.get("excision", {})
    return ExcisionSpec(kind=e.get("kind", "axis"), origin=tuple(e.get("origin", [0.0] * ctx.n)),
                        direction=tuple(e.get("direction", [0.0, 0.0, 1.0])), eps0=float(e.get("eps0", 0.2)),
                        K=int(e.get("K", 4)), quadrature=_quad(e.get("quadrature"), Quadrature(16, 4)),
                        order=int(e.get("order", 2)))


def _mollifier(p, ctx):
    return MollifierSpec(n=ctx.n, eps0=float(p.get("eps0", 1.0)), K=int(p.get("K", 6)),
                         inner=_quad(p.get("inner"), Quadrature(12, 2)),
                         outer=_quad(p.get("outer"), Quadrature(12, 2)), box=ctx.box)


def _battery(p, ctx):
    n = int(p.get("n", ctx.n))
    lo, hi = p.get("center_lo"), p.get("center_hi")
    return test_form_battery(n, int(p["degree"]), int(p.get("seed", ctx.seed)), int(p.get("count", 12)),
                             None if lo is None else _vec(lo), None if hi is None else _vec(hi),
                             tuple(p.get("radius_range", (0.5, 0.8))))


def _q(p, ctx):
    return _quad(p.get("quadrature"), ctx.quadrature) or DEFAULT_QUADRATURE


FAMILIES = {
    # forms and fields
    "screw_form": lambda p, c: screw_form(float(p["b"])),
    "book_form": lambda p, c: book_form(float(p["b"])),
    "director_line_form": lambda p, c: director_line_form(),
    "dz_form": lambda p, c: dz_form(),
    "constant_form": _constant_form,
    "polynomial": _polynomial,
    "exterior_derivative": lambda p, c: _d(p["of"]),
    # chains
    "segment": lambda p, c: Chain([segment(p["a"], p["b"], quadrature=_q(p, c))]),
    "halfplane": lambda p, c: Chain([halfplane(float(p.get("extent", 1.0)), _q(p, c))]),
    "circle": lambda p, c: Chain([circle(p.get("center", [0.0] * c.n), float(p["radius"]),
                                         p.get("normal", [0.0, 0.0, 1.0]), _q(p, c))]),
    "box": lambda p, c: Chain([box(p["lo"], p["hi"], quadrature=_q(p, c))]),
    "affine": lambda p, c: Chain([affine_cell(p["origin"], p["edges"], int(p.get("orientation", 1)), _q(p, c))]),
    "point_chain": lambda p, c: Chain([point(p["point"], int(p.get("orientation", 1)))]),
    "chain_boundary": lambda p, c: boundary_chain(p["of"]),
    "image_chain": lambda p, c: Chain([(affine_image(cell, p["map"]), k) for cell, k in p["chain"].terms]),
    # maps
    "rotation": lambda p, c: _rotation(float(p["angle"]), p.get("axis", (0.0, 0.0, 1.0))),
    # currents
    "chain_current": lambda p, c: ChainCurrent(p["chain"], p.get("weight"), _quad(p.get("quadrature"), c.quadrature)),
    "form_current": _form_current,
    "excision_boundary": lambda p, c: ExcisionBoundaryCurrent(p["form"], _excision(p, c)),
    "boundary": lambda p, c: BoundaryCurrent(p["of"]),
    "dirac": lambda p, c: DiracCurrent(p["point"]),
    "contract": lambda p, c: ContractFormCurrent(p["current"], p["form"]),
    "pushforward": lambda p, c: PushforwardCurrent(p["current"], p["map"]),
    "flow_map": lambda p, c: p["flow"].as_map(float(p["tau"]), float(p["t"])),
    "combination": lambda p, c: LinearCombinationCurrent([(float(k), T) for k, T in p["terms"]]),
    # dynamics, batteries, regularization
    "flow": lambda p, c: kin.Flow(_velocity(p["velocity"]), p.get("interval", (0.0, 1.0)), p.get("dt"),
                                  c.box),
    "battery": _battery,
    "mollifier": _mollifier,
}


def affine_image(cell, f: AffineMap):
    """Image of an affine cell under an affine map, as an affine cell."""
    if not isinstance(cell.map, AffineMap) or not isinstance(f, AffineMap):
        return image(Chain([cell]), f).terms[0][0]
    A = f.A @ cell.map.A
    b = f.A @ cell.map.b + f.b
    return affine_cell(b, A.T, cell.orientation, cell.quadrature, label=f"f({cell.label})")


# ---------------------------------------------------------------------------
# context and resolution
# ---------------------------------------------------------------------------

class _Context:
    def __init__(self, config: dict):
        self.config = config
        self.n = int(config.get("n", 3))
        b = config.get("box")
        self.box = Box(*b) if b is not None else None
        self.seed = int(config.get("seed", 0))
        self.quadrature = _quad(config.get("quadrature"), None)
        self.raw = config.get("objects", {})
        if not isinstance(self.raw, dict):
            raise ScenarioError("'objects' must be a mapping from names to object specs")
        self.built: dict = {}
        self._stack: list = []

    def resolve(self, value, where: str):
        if isinstance(value, str) and value.startswith("@"):
            return self.get(value[1:], where)
        if isinstance(value, list):
            return [self.resolve(v, f"{where}[{i}]") for i, v in enumerate(value)]
        if isinstance(value, dict):
            return {k: self.resolve(v, f"{where}.{k}") for k, v in value.items()}
        return value

    def get(self, name: str, where: str = "?"):
        if name in self.built:
            return self.built[name]
        if name not in self.raw:
            raise ScenarioError(f"unresolved reference '@{name}' at {where}")
        if name in self._stack:
            raise ScenarioError(f"circular reference through '@{name}'")
        spec = self.raw[name]
        fam = spec.get("family") if isinstance(spec, dict) else None
        if fam not in FAMILIES:
            raise ScenarioError(f"objects.{name}: unknown family {fam!r}")
        self._stack.append(name)
        try:
            params = {k: v for k, v in spec.items() if k != "family"}
            params = self.resolve(params, f"objects.{name}")
            try:
                obj = FAMILIES[fam](params, self)
            except ScenarioError:
                raise
            except (KeyError, TypeError) as exc:
                raise ScenarioError(f"objects.{name}: bad parameters for {fam}: {exc}") from exc
        finally:
            self._stack.pop()
        self.built[name] = obj
        return obj


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass
class CheckOutput:
    rows: list
    series: dict = field(default_factory=dict)


def _points(spec, n):
    if isinstance(spec, dict):
        rng = np.random.default_rng(int(spec.get("seed", 0)))
        return rng.uniform(spec["lo"], spec["hi"], (int(spec.get("count", 16)), n))
    return as_points(spec, n)


def _excision_series(T: Current):
    if isinstance(T, ExcisionBoundaryCurrent) and T.last is not None:
        return T.last
    if isinstance(T, LinearCombinationCurrent):
        for _, S in T.terms:
            got = _excision_series(S)
            if got is not None:
                return got
    return None


def check_integral(name, a, tol):
    chain = a["chain"]
    value = chain.integrate(a["form"], _quad(a.get("quadrature")))
    return CheckOutput([_scalar_row(name, value, a["reference"], tol, a.get("metric", "abs"))])


def check_battery_match(name, a, tol):
    T, R = a["current"], a["reference"]
    factor = float(a.get("factor", 1.0))
    vals, refs, series = [], [], []
    for k, w in enumerate(a["battery"]):
        vals.append(T.evaluate(w))
        refs.append(factor * R.evaluate(w))
        ex = _excision_series(T)
        if ex is not None:
            series.extend({"form": k, "eps": e, "value": v} for e, v in zip(ex.radii, ex.values))
    out = CheckOutput([_list_row(name, vals, refs, tol, a.get("metric", "rel"))])
    if series:
        out.series[name] = series
    return out


def check_battery_vanish(name, a, tol):
    T = a["current"]
    vals = [T.evaluate(w) for w in a["battery"]]
    eff = tol
    if "scale" in a:
        S = a["scale"]
        eff = tol * max(1.0, max(abs(S.evaluate(w)) for w in a["battery"]))
    return CheckOutput([_list_row(name, vals, [0.0] * len(vals), eff, "abs")])


def check_boundary_nilpotent(name, a, tol):
    bb = BoundaryCurrent(BoundaryCurrent(a["current"]))
    vals = [bb.evaluate(w) for w in a["battery"]]
    return CheckOutput([_list_row(name, vals, [0.0] * len(vals), tol, "abs")])


def check_flow_composition(name, a, tol):
    flow = a["flow"]
    tau, t, s = a["times"]
    x = _points(a["points"], flow.n)
    lhs = flow.map(tau, t, flow.map(t, s, x))
    rhs = flow.map(tau, s, x)
    return CheckOutput([_scalar_row(name, np.max(np.abs(lhs - rhs)), 0.0, tol)])


def check_flow_inverse(name, a, tol):
    flow = a["flow"]
    tau, t = a["times"]
    x = _points(a["points"], flow.n)
    back = flow.map(t, tau, flow.map(tau, t, x))
    return CheckOutput([_scalar_row(name, np.max(np.abs(back - x)), 0.0, tol)])


def check_flow_identity(name, a, tol):
    flow = a["flow"]
    x = _points(a["points"], flow.n)
    return CheckOutput([_scalar_row(name, np.max(np.abs(flow.map(a["t"], a["t"], x) - x)), 0.0, tol)])


def check_flow_reference(name, a, tol):
    """Flow map against an exact map (e.g. a rigid rotation)."""
    flow = a["flow"]
    tau, t = a["times"]
    x = _points(a["points"], flow.n)
    return CheckOutput([_scalar_row(name, np.max(np.abs(flow.map(tau, t, x) - a["map"](x))), 0.0, tol)])


def check_inverse_velocity(name, a, tol):
    flow = a["flow"]
    x = _points(a["points"], flow.n)
    return CheckOutput([_scalar_row(name, kin.inverse_velocity_check(flow, float(a["t"]), x), 0.0, tol)])


def _form_scale(values):
    return max(1.0, float(np.max(np.abs(values))))


def check_lie_fd(name, a, tol):
    flow, t = a["flow"], float(a["t"])
    x = _points(a["points"], flow.n)
    worst = 0.0
    forms = a["battery"] if "battery" in a else [a["form"]]
    for w in forms:
        fd = kin.lie_derivative_fd(flow, w, t, x)
        exact = kin.lie_derivative(flow.velocity.at(t), w).evaluate(x)
        worst = max(worst, float(np.max(np.abs(fd - exact))) / _form_scale(exact))
    return CheckOutput([_scalar_row(name, worst, 0.0, tol)])


def check_current_rate(name, a, tol):
    flow, t = a["flow"], float(a["t"])
    fds, exact = [], []
    for w in a["battery"]:
        cmp = kin.current_rate_fd(flow, a["current"], w, t, float(a.get("h", 1e-3)))
        fds.append(cmp.fd)
        exact.append(cmp.exact)
    return CheckOutput([_list_row(name, fds, exact, tol, "rel")])


def check_rate_commutation(name, a, tol):
    flow, t, phi = a["flow"], float(a["t"]), a["form"]
    x = _points(a["points"], flow.n)
    lhs = kin.structure_form_rate(flow, phi, t).d.evaluate(x)
    rhs = kin.structure_form_rate_fd(flow, phi.d, t, x)
    return CheckOutput([_scalar_row(name, np.max(np.abs(lhs - rhs)) / _form_scale(rhs), 0.0, tol)])


def check_kernel_mass(name, a, tol):
    spec = a["mollifier"]
    masses = [spec.kernel_mass(e) for e in spec.schedule]
    return CheckOutput([_list_row(name, masses, [1.0] * len(masses), tol, "abs")])


def _monotone_row(name, series, tol):
    d = np.asarray(series)
    ratio = float(np.max(d[1:] / d[:-1])) if d.size > 1 else 0.0
    return Row(name, ratio, 1.0, max(ratio - 1.0, 0.0), max(ratio - 1.0, 0.0), float(tol), "upper")


def check_weak_convergence(name, a, tol):
    spec, chain, bat = a["mollifier"], a["chain"], a["battery"]
    snaps = coalescence_schedule(chain, spec, bat)
    dist = [s.distance for s in snaps]
    rows = [_monotone_row(f"{name}: nonincreasing (max ratio)", dist, 1.0),
            _scalar_row(f"{name}: final distance", dist[-1], 0.0, tol)]
    series = [{"t": s.t, "eps": s.eps, "distance": s.distance} for s in snaps]
    return CheckOutput(rows, {name: series})


def check_boundary_convergence(name, a, tol):
    spec, chain, bat = a["mollifier"], a["chain"], a["battery"]
    dT = BoundaryCurrent(ChainCurrent(chain, quadrature=Quadrature(20, 8)))
    refs = [dT.evaluate(w) for w in bat]
    dist, comm, series = [], [], []
    for eps in spec.schedule:
        bcs = [boundary_commutation(chain, spec, eps, w) for w in bat]
        d = max(abs(b.boundary - r) for b, r in zip(bcs, refs))
        c = max(b.residual for b in bcs)
        dist.append(d)
        comm.append(c)
        series.append({"t": 1.0 - float(eps), "eps": float(eps), "distance": d, "commutation_residual": c})
    rows = [_monotone_row(f"{name}: decreasing (max ratio)", dist, 1.0),
            _scalar_row(f"{name}: final distance", dist[-1], 0.0, tol),
            _list_row(f"{name}: commutation residual", comm, [0.0] * len(comm),
                      float(a.get("commutation_tolerance", 1e-4)), "abs")]
    return CheckOutput(rows, {name: series})


CHECKS = {
    "integral": check_integral,
    "battery_match": check_battery_match,
    "battery_vanish": check_battery_vanish,
    "boundary_nilpotent": check_boundary_nilpotent,
    "flow_composition": check_flow_composition,
    "flow_inverse": check_flow_inverse,
    "flow_identity": check_flow_identity,
    "flow_reference": check_flow_reference,
    "inverse_velocity": check_inverse_velocity,
    "lie_fd": check_lie_fd,
    "current_rate": check_current_rate,
    "rate_commutation": check_rate_commutation,
    "kernel_mass": check_kernel_mass,
    "weak_convergence": check_weak_convergence,
    "boundary_convergence": check_boundary_convergence,
}


# ---------------------------------------------------------------------------
# scenarios and reports
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    config: dict

    @property
    def name(self) -> str:
        return self.config["name"]

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.config, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_dict(cls, config: dict) -> "Scenario":
        validate(config)
        return cls(config)


def validate(config) -> None:
    if not isinstance(config, dict):
        raise ScenarioError("scenario config must be a JSON object")
    for key in ("name", "objects", "checks"):
        if key not in config:
            raise ScenarioError(f"missing top-level key {key!r}")
    if not isinstance(config["checks"], list):
        raise ScenarioError("'checks' must be a list")
    names = set()
    for i, chk in enumerate(config["checks"]):
        if not isinstance(chk, dict) or "name" not in chk or "kind" not in chk:
            raise ScenarioError(f"checks[{i}] needs 'name' and 'kind'")
        if chk["kind"] not in CHECKS:
            raise ScenarioError(f"checks[{i}]: unknown check kind {chk['kind']!r}")
        tol = chk.get("tolerance")
        if not isinstance(tol, (int, float)) or not tol > 0:
            raise ScenarioError(f"checks[{i}] ({chk['name']}): tolerance must be a positive number")
        if chk["name"] in names:
            raise ScenarioError(f"duplicate check name {chk['name']!r}")
        names.add(chk["name"])


@dataclass
class Report:
    scenario: str
    anchor: dict
    config_hash: str
    battery_hashes: dict
    environment: dict
    rows: list
    series: dict
    timestamp: str
    runtime: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self, with_timestamp: bool = True) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "scenario": self.scenario, "anchor": self.anchor,
               "config_hash": self.config_hash, "battery_hashes": self.battery_hashes,
               "environment": self.environment, "rows": [r.as_dict() for r in self.rows], "pass": self.passed}
        if with_timestamp:
            out["timestamp"] = self.timestamp
            out["runtime_seconds"] = self.runtime
        return out

    def to_json(self, with_timestamp: bool = True) -> str:
        return json.dumps(self.as_dict(with_timestamp), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _environment(ctx: _Context) -> dict:
    env = {"python": platform.python_version(), "numpy": np.__version__}
    if ctx.quadrature is not None:
        env["quadrature"] = [ctx.quadrature.q, ctx.quadrature.m]
    for name, obj in ctx.built.items():
        if isinstance(obj, ExcisionBoundaryCurrent):
            e = obj.excision
            env[f"excision:{name}"] = {"radii": [float(r) for r in e.radii], "quadrature": [e.quadrature.q, e.quadrature.m],
                                       "order": e.order}
        elif isinstance(obj, MollifierSpec):
            env[f"mollifier:{name}"] = {"eps": [float(r) for r in obj.schedule], "inner": [obj.inner.q, obj.inner.m],
                                        "outer": [obj.outer.q, obj.outer.m]}
        elif isinstance(obj, kin.Flow):
            env[f"flow:{name}"] = {"interval": [obj.a, obj.b], "dt": obj.dt}
    return env


def run_scenario(scenario: Scenario, progress=None) -> Report:
    """Build the objects and run every check in config order."""
    ctx = _Context(scenario.config)
    rows, series, runtime = [], {}, {}
    for i, chk in enumerate(scenario.config["checks"]):
        args = {k: v for k, v in chk.items() if k not in ("name", "kind", "tolerance")}
        args = ctx.resolve(args, f"checks[{i}]")
        t0 = time.perf_counter()
        try:
            out = CHECKS[chk["kind"]](chk["name"], args, float(chk["tolerance"]))
        except ScenarioError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"checks[{i}] ({chk['name']}): {type(exc).__name__}: {exc}") from exc
        runtime[chk["name"]] = round(time.perf_counter() - t0, 3)
        rows.extend(out.rows)
        series.update(out.series)
        if progress is not None:
            for r in out.rows:
                progress(r)
    # objects not used by any check still have to resolve
    for name in ctx.raw:
        ctx.get(name, f"objects.{name}")
    batteries = {k: v.hash for k, v in ctx.built.items() if hasattr(v, "hash") and hasattr(v, "forms")}
    return Report(scenario.name, scenario.config.get("anchor", {}), scenario.config_hash, batteries,
                  _environment(ctx), rows, series, time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), runtime)


# ---------------------------------------------------------------------------
# built-in scenarios
# ---------------------------------------------------------------------------

def _builtin_dir():
    return resources.files("defects") / "scenarios"


def builtin_names(prefix: str = "") -> list[str]:
    names = sorted(p.name[:-5] for p in _builtin_dir().iterdir() if p.name.endswith(".json"))
    return [n for n in names if n.startswith(prefix)]


def load_builtin(name: str) -> Scenario:
    path = _builtin_dir() / f"{name}.json"
    if not path.is_file():
        raise ScenarioError(f"no built-in scenario named {name!r}")
    return load_config(path.read_text(encoding="utf-8"))


def load_config(text: str) -> Scenario:
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"config is not valid JSON: {exc}") from exc
    return Scenario.from_dict(config)
