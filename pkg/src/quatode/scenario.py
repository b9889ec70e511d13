"""JSON scenario files for the command line tool.

Quaternions are 4-element arrays ``[w, x, y, z]``.  A scenario looks like::

    {
      "kind": "nonhomogeneous-const",
      "a": [0, 0, -1, 0],
      "b": [-1, 0, 0, 1],
      "basis": {"phi": {"exp": [0, -1, 0, 0]}, "xi": {"exp": [0, -1, -1, 0]}},
      "rho": [[1, [0, 1, 0, 0]]],
      "x0": 0.0,
      "x_end": 2.0
    }

Explicit basis functions use a small expression syntax: a bare 4-array is a
constant, ``{"exp": q}`` is ``exp(qx)``, ``{"pow": m}`` is ``x^m``,
``{"sum": [...]}``, ``{"prod": [e1, e2]}``, ``{"lscale": [q, e]}`` and
``{"rscale": [e, q]}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ScenarioError
from .qexpr import Const, Exp, LeftScale, Monomial, Prod, QExpr, RightScale, Sum, polynomial
from .quaternion import Quaternion

KINDS = ("homogeneous-const", "nonhomogeneous-const", "ivp-numeric", "wronskian-check")
DEFAULT_SPAN = 2.0
DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class Scenario:
    kind: str
    a: Quaternion | None = None
    b: Quaternion | None = None
    q: Quaternion | None = None
    rho: tuple = ()
    x0: float = 0.0
    x_end: float = DEFAULT_SPAN
    h: float = DEFAULT_STEP
    f: Quaternion | None = None
    g: Quaternion | None = None
    phi: QExpr | None = field(default=None, compare=False)
    xi: QExpr | None = field(default=None, compare=False)
    samples: tuple = ()
    name: str = ""

    @property
    def has_basis(self) -> bool:
        return self.phi is not None

    def rho_expr(self) -> QExpr:
        return polynomial(self.rho)


def _quaternion(value, name) -> Quaternion:
    if not isinstance(value, list) or len(value) != 4:
        raise ScenarioError(name, "expected a 4-element array [w, x, y, z]")
    comps = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ScenarioError(name, f"component {v!r} is not a finite number")
        comps.append(float(v))
    return Quaternion(*comps)


def _real(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(name, f"expected a finite number, got {value!r}")
    return float(value)


def parse_expr(node, name="expr") -> QExpr:
    """Build a QExpr from the JSON expression syntax."""
    if isinstance(node, list):
        return Const(_quaternion(node, name))
    if not isinstance(node, dict) or len(node) != 1:
        raise ScenarioError(name, f"expression must be a 4-array or a one-key object, got {node!r}")
    (op, arg), = node.items()
    if op == "const":
        return Const(_quaternion(arg, f"{name}.const"))
    if op == "exp":
        return Exp(_quaternion(arg, f"{name}.exp"))
    if op == "pow":
        if isinstance(arg, bool) or not isinstance(arg, int) or arg < 0:
            raise ScenarioError(f"{name}.pow", "degree must be a nonnegative integer")
        return Monomial(arg)
    if op == "sum":
        if not isinstance(arg, list) or not arg:
            raise ScenarioError(f"{name}.sum", "expected a non-empty list")
        return Sum(tuple(parse_expr(t, f"{name}.sum[{n}]") for n, t in enumerate(arg)))
    if op == "prod":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ScenarioError(f"{name}.prod", "expected [left, right]")
        return Prod(parse_expr(arg[0], f"{name}.prod[0]"), parse_expr(arg[1], f"{name}.prod[1]"))
    if op == "lscale":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ScenarioError(f"{name}.lscale", "expected [q, expr]")
        return LeftScale(_quaternion(arg[0], f"{name}.lscale[0]"), parse_expr(arg[1], f"{name}.lscale[1]"))
    if op == "rscale":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ScenarioError(f"{name}.rscale", "expected [expr, q]")
        return RightScale(parse_expr(arg[0], f"{name}.rscale[0]"), _quaternion(arg[1], f"{name}.rscale[1]"))
    raise ScenarioError(name, f"unknown expression node {op!r}")


def _rho(value):
    if not isinstance(value, list):
        raise ScenarioError("rho", "expected a list of [degree, [w, x, y, z]] pairs")
    terms = []
    for n, term in enumerate(value):
        if not isinstance(term, list) or len(term) != 2:
            raise ScenarioError(f"rho[{n}]", "expected [degree, [w, x, y, z]]")
        degree, coeff = term
        if isinstance(degree, bool) or not isinstance(degree, int) or degree < 0:
            raise ScenarioError(f"rho[{n}]", "degree must be a nonnegative integer")
        terms.append((degree, _quaternion(coeff, f"rho[{n}]")))
    return tuple(terms)


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict) or not data:
        raise ScenarioError(None, "scenario must be a non-empty JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ScenarioError("kind", f"must be one of {', '.join(KINDS)}; got {kind!r}")
    known = {"kind", "a", "b", "q", "rho", "x0", "x_end", "h", "f", "g", "basis", "samples", "name"}
    extra = sorted(set(data) - known)
    if extra:
        raise ScenarioError(extra[0], "unknown field")

    kw = {"kind": kind}
    for key in ("a", "b", "q", "f", "g"):
        if key in data:
            kw[key] = _quaternion(data[key], key)
    if "rho" in data:
        kw["rho"] = _rho(data["rho"])
    x0 = _real(data.get("x0", 0.0), "x0")
    kw["x0"] = x0
    kw["x_end"] = _real(data.get("x_end", x0 + DEFAULT_SPAN), "x_end")
    h = _real(data.get("h", DEFAULT_STEP), "h")
    if h <= 0:
        raise ScenarioError("h", "step must be positive")
    kw["h"] = h
    if "basis" in data:
        basis = data["basis"]
        if not isinstance(basis, dict) or set(basis) != {"phi", "xi"}:
            raise ScenarioError("basis", "expected an object with exactly 'phi' and 'xi'")
        kw["phi"] = parse_expr(basis["phi"], "basis.phi")
        kw["xi"] = parse_expr(basis["xi"], "basis.xi")
    if "samples" in data:
        samples = data["samples"]
        if not isinstance(samples, list):
            raise ScenarioError("samples", "expected a list of numbers")
        kw["samples"] = tuple(_real(s, f"samples[{n}]") for n, s in enumerate(samples))
    if "name" in data:
        if not isinstance(data["name"], str):
            raise ScenarioError("name", "expected a string")
        kw["name"] = data["name"]

    sc = Scenario(**kw)
    _require(sc, data)
    return sc


def _require(sc: Scenario, data) -> None:
    def need(*keys):
        for key in keys:
            if key not in data:
                raise ScenarioError(key, f"required for kind {sc.kind!r}")

    if sc.kind in ("homogeneous-const", "nonhomogeneous-const"):
        need("a", "b")
        if sc.q is None and not sc.has_basis:
            raise ScenarioError("q", "give the first exponent q or an explicit basis")
        if sc.kind == "nonhomogeneous-const":
            need("rho")
            if not sc.rho:
                raise ScenarioError("rho", "forcing must have at least one term")
        if ("f" in data) != ("g" in data):
            raise ScenarioError("g" if "f" in data else "f", "f and g must be given together")
    elif sc.kind == "ivp-numeric":
        need("a", "b", "f", "g", "x_end")
        if sc.x_end == sc.x0:
            raise ScenarioError("x_end", "must differ from x0")
    elif sc.kind == "wronskian-check":
        if not sc.has_basis:
            need("a", "b", "q")


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise ScenarioError(None, "empty scenario file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(None, f"invalid JSON: {exc}") from None
    return scenario_from_dict(data)
