"""``quatode`` command line entry point.

Exit codes: 0 success, 1 verification failure, 2 invalid scenario,
3 solver error (NotASolution, DependentPair, NearZeroQuaternion),
4 non-finite integration state.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import checks
from .analytic import (
    IVP, ConstCoeffEq, fit_initial_conditions, polynomial_particular, rebase_particular,
    reduce_order, variation_of_parameters,
)
from .errors import (
    DependentPair, NearZeroQuaternion, NonFiniteState, NotASolution, ScenarioError,
)
from .oracle import solve as integrate_ivp
from .qexpr import Exp, sample
from .quaternion import Quaternion, format_quaternion
from .scenario import Scenario, load_scenario
from .wronskian import (
    TAU_DEP, FundamentalPair, dieudonne_det_squared, modulus_squared, variants,
)

EXIT_VERIFY = 1
EXIT_SCENARIO = 2
EXIT_SOLVER = 3
EXIT_NONFINITE = 4
BASIS_RESIDUAL_TOL = 1e-8
SOLVER_ERRORS = (NotASolution, DependentPair, NearZeroQuaternion)


def _q(q: Quaternion) -> list[float]:
    return [float(v) for v in q.components()]


def _basis(sc: Scenario):
    """``(phi, xi, source)`` from an explicit basis or by reduction of order."""
    if sc.has_basis:
        return sc.phi, sc.xi, "given"
    eq = ConstCoeffEq(sc.a, sc.b)
    return Exp(sc.q), reduce_order(eq, sc.q), "reduction of order"


def _sample_points(sc: Scenario) -> list[float]:
    if sc.samples:
        return list(sc.samples)
    return sorted({sc.x0, sc.x0 + 1.0, sc.x_end})


def _max_residual(eq: ConstCoeffEq, psi, xs, rho=None) -> float:
    worst = 0.0
    for x in xs:
        r = eq.residual(psi, float(x))
        if rho is not None:
            r = r - rho(float(x))
        worst = max(worst, abs(r))
    return worst


def build_solve_report(sc: Scenario) -> dict:
    if sc.kind not in ("homogeneous-const", "nonhomogeneous-const"):
        raise ScenarioError("kind", "solve needs homogeneous-const or nonhomogeneous-const")
    eq = ConstCoeffEq(sc.a, sc.b)
    phi, xi, source = _basis(sc)
    grid = np.linspace(sc.x0, sc.x_end, 51)
    pair = FundamentalPair(phi, xi)
    w2 = modulus_squared(pair, sc.x0)
    phi_res = _max_residual(eq, phi, grid)
    xi_res = _max_residual(eq, xi, grid)
    report = {
        "kind": sc.kind,
        "name": sc.name,
        "a": _q(sc.a),
        "b": _q(sc.b),
        "basis_source": source,
        "phi": str(phi),
        "xi": str(xi),
        "phi_residual_max": phi_res,
        "xi_residual_max": xi_res,
        "basis_solves_equation": bool(max(phi_res, xi_res) <= BASIS_RESIDUAL_TOL),
        "x0": sc.x0,
        "wronskian_squared_x0": w2,
        "wronskian_x0": float(np.sqrt(w2)),
        "independent": bool(w2 >= TAU_DEP),
    }
    if w2 < TAU_DEP:
        raise DependentPair(f"|W|^2 = {w2:.3g} at x0 = {sc.x0}")

    particular = None
    if sc.kind == "nonhomogeneous-const":
        rho = sc.rho_expr()
        vr = variation_of_parameters(phi, xi, rho, sc.x0)
        particular = vr.particular
        entry = {"method": "variation of parameters", "formula": vr.formula,
                 "normalized": False}
        try:
            closed = polynomial_particular(eq, sc.rho)
        except NearZeroQuaternion:
            closed = None
        if closed is not None:
            # shift by a homogeneous solution onto the polynomial particular solution
            shifted = rebase_particular(phi, xi, particular, closed, sc.x0)
            particular = shifted.expr
            gap = float(np.max(np.abs(sample(particular, grid) - sample(closed, grid))))
            entry.update(normalized=True, closed_form=str(closed), closed_form_gap=gap,
                         homogeneous_shift=[_q(shifted.q1), _q(shifted.q2)])
        entry["residual_max"] = _max_residual(eq, particular, grid, rho)
        entry["samples"] = [{"x": float(x), "value": _q(particular(float(x)))}
                            for x in _sample_points(sc)]
        report["particular"] = entry

    if sc.f is not None:
        sol = fit_initial_conditions(phi, xi, particular, sc.x0, sc.f, sc.g)
        psi = sol.expr
        report["initial_conditions"] = {
            "f": _q(sc.f), "g": _q(sc.g),
            "q1": _q(sol.q1), "q2": _q(sol.q2),
            "mismatch": max(abs(psi(sc.x0) - sc.f), abs(psi.derivative()(sc.x0) - sc.g)),
        }
    return report


def format_solve_report(r: dict) -> str:
    def qs(v):
        return format_quaternion(Quaternion(*v))

    lines = [f"equation: psi'' = ({qs(r['a'])}) psi' + ({qs(r['b'])}) psi"]
    if r.get("name"):
        lines.insert(0, f"scenario: {r['name']}")
    lines += [
        f"basis ({r['basis_source']}):",
        f"  phi(x) = {r['phi']}    max residual {r['phi_residual_max']:.3g}",
        f"  xi(x)  = {r['xi']}    max residual {r['xi_residual_max']:.3g}",
        f"|W|^2 at x0={r['x0']:g}: {r['wronskian_squared_x0']:.12g}  "
        f"(|W| = {r['wronskian_x0']:.12g}; {'independent' if r['independent'] else 'dependent'})",
    ]
    if not r["basis_solves_equation"]:
        lines.append("warning: the given basis does not satisfy the equation")
    p = r.get("particular")
    if p:
        lines.append(f"particular solution ({p['method']}, {p['formula']} formula):")
        if p["normalized"]:
            lines.append(f"  closed form {p['closed_form']}  (gap {p['closed_form_gap']:.3g})")
        lines.append(f"  max residual {p['residual_max']:.3g}")
        for s in p["samples"]:
            lines.append(f"  psi_p({s['x']:g}) = {qs(s['value'])}")
    ic = r.get("initial_conditions")
    if ic:
        lines.append(f"initial data: q1 = {qs(ic['q1'])}, q2 = {qs(ic['q2'])}  "
                     f"(mismatch {ic['mismatch']:.3g})")
    return "\n".join(lines)


def build_wronskian_report(sc: Scenario, x: float) -> dict:
    phi, xi, source = _basis(sc)
    pair = FundamentalPair(phi, xi)
    w2 = modulus_squared(pair, x)
    report = {
        "x": x,
        "basis_source": source,
        "phi": str(phi),
        "xi": str(xi),
        "wronskian_squared": w2,
        "wronskian": float(np.sqrt(w2)),
        "dieudonne_det_squared": dieudonne_det_squared(pair, x),
        "dependent": bool(w2 < TAU_DEP),
    }
    try:
        v = variants(pair, x)
    except NearZeroQuaternion as exc:
        report["variants"] = None
        report["variants_note"] = str(exc)
    else:
        report["variants"] = {"wl": _q(v.wl), "wr": _q(v.wr),
                              "wl_tilde": _q(v.wl_tilde), "wr_tilde": _q(v.wr_tilde)}
    return report


def format_wronskian_report(r: dict) -> str:
    lines = [
        f"phi(x) = {r['phi']}",
        f"xi(x)  = {r['xi']}",
        f"|W|^2({r['x']:g}) = {r['wronskian_squared']:.12g}   |W| = {r['wronskian']:.12g}",
        f"det(M M^+) = {r['dieudonne_det_squared']:.12g}",
        f"pair is {'dependent' if r['dependent'] else 'independent'}",
    ]
    if r["variants"]:
        for key, v in r["variants"].items():
            lines.append(f"  {key:9s} = {format_quaternion(Quaternion(*v))}")
    else:
        lines.append(f"  variants undefined: {r['variants_note']}")
    return "\n".join(lines)


def _emit_json(report: dict, target) -> None:
    text = json.dumps(report, indent=2, allow_nan=False)
    if target == "-":
        print(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_solve(args) -> int:
    sc = load_scenario(args.file)
    report = build_solve_report(sc)
    if args.json != "-":
        print(format_solve_report(report))
    if args.json:
        _emit_json(report, args.json)
    return 0


def cmd_wronskian(args) -> int:
    sc = load_scenario(args.file)
    x = sc.x0 if args.x is None else args.x
    report = build_wronskian_report(sc, x)
    if args.json != "-":
        print(format_wronskian_report(report))
    if args.json:
        _emit_json(report, args.json)
    return 0


def cmd_integrate(args) -> int:
    sc = load_scenario(args.file)
    if sc.kind != "ivp-numeric":
        raise ScenarioError("kind", "integrate needs an ivp-numeric scenario")
    h = sc.h if args.h is None else args.h
    if not h > 0:
        raise ScenarioError("h", "step must be positive")
    ivp = IVP.constant(sc.a, sc.b, sc.f, sc.g, sc.x0, rho=sc.rho_expr())
    traj = integrate_ivp(ivp, sc.x_end, h)
    traj.write_csv(args.out)
    print(f"wrote {len(traj)} rows to {args.out}")
    print(f"psi({traj.xs[-1]:g}) = {traj.value(-1)}")
    print(f"max residual norm (finite differences): {float(np.max(traj.residual_norms)):.3g}")
    return 0


def cmd_verify_paper(args) -> int:
    names = checks.check_names()
    if args.list:
        for name in names:
            print(name)
        return 0
    results = checks.run_all(args.perturb)
    width = max(len(n) for n in names)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatode",
                                     description="Solve and verify second-order quaternionic ODEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="reduction of order / variation of parameters")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH", help="write the JSON report ('-' for stdout only)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("integrate", help="RK4 trajectory of an ivp-numeric scenario")
    p.add_argument("file")
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--h", type=float, default=None, help="step size (default: scenario h or 1e-3)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("wronskian", help="|W|^2, determinant and variants at a point")
    p.add_argument("file")
    p.add_argument("--x", type=float, default=None, help="evaluation point (default: x0)")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_wronskian)

    p = sub.add_parser("verify-paper", help="run the worked-example reproduction checks")
    p.add_argument("--list", action="store_true", help="print check names and exit")
    p.add_argument("--perturb", type=float, default=0.0, metavar="EPS",
                   help="shift b in the example-1 equation by EPS (negative control)")
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"ScenarioError: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except SOLVER_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NonFiniteState as exc:
        print(f"NonFiniteState: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except OSError as exc:
        print(f"ScenarioError: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
