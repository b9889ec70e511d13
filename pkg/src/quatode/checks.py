"""Reproduction checks for the four worked examples, the Wronskian scaling
law and the numeric existence/uniqueness oracle.

Each check returns a :class:`CheckResult`; ``verify-paper`` runs them in name
order.  ``perturb`` shifts the real part of ``b`` in the example-1 equation
so the residual check can be shown to fail (negative control).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    IVP, ConstCoeffEq, fit_initial_conditions, reduce_order, rebase_particular,
    variation_of_parameters,
)
from .operators import commutator, left_mul, resolve, right_mul
from .oracle import integrate, to_real_system, uniqueness_probe
from .qexpr import (
    Const, Exp, LeftScale, Monomial, Prod, QExpr, RightScale, Sum, polynomial, sample,
)
from .quaternion import I, J, K, ONE, Quaternion, exp_qx
from .wronskian import FundamentalPair, dieudonne_det_squared, modulus_squared

SEED = 20030601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------- fixtures

def example1_equation(perturb: float = 0.0) -> ConstCoeffEq:
    """``psi'' + j psi' + (1 - k) psi = 0``."""
    return ConstCoeffEq(-J, -(ONE - K) + perturb)


def example3_equation() -> ConstCoeffEq:
    """``psi'' + i psi' + (k/2) psi = 0``."""
    return ConstCoeffEq(-I, -K / 2)


EX3_Q = -(I + J) / 2


def example3_closed_form() -> QExpr:
    return Prod(Sum((Monomial(1), Const((I - J) / 2))), Exp(EX3_Q))


def example4_basis():
    return Exp(-I), Exp(-(I + J))


def example4_forcing() -> QExpr:
    return RightScale(Monomial(1), I)


def example4_closed_particular() -> QExpr:
    return polynomial([(1, (I + J) / 2), (0, K / 2)])


def fit_right_factors(basis, target, xs):
    """Least-squares right constants ``c_k`` with ``sum_k basis_k c_k ~ target``.

    Returns ``(constants, max pointwise residual)``.
    """
    rows, rhs = [], []
    for x in xs:
        rows.append(np.hstack([left_mul(b(x)).m for b in basis]))
        rhs.append(target(x).as_array())
    mat, vec = np.vstack(rows), np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(mat, vec, rcond=None)
    resid = (mat @ sol - vec).reshape(-1, 4)
    consts = [Quaternion.from_array(sol[4 * n:4 * n + 4]) for n in range(len(basis))]
    return consts, float(np.max(np.linalg.norm(resid, axis=1)))


def random_quaternion(rng, scale=1.0) -> Quaternion:
    return Quaternion.from_array(rng.normal(0.0, scale, 4))


def random_qexpr(rng, depth=3) -> QExpr:
    """Random expression tree (used for property checks)."""
    leaves = ("const", "pow", "exp")
    kinds = leaves if depth <= 0 else leaves + ("sum", "prod", "lscale", "rscale")
    kind = kinds[rng.integers(len(kinds))]
    if kind == "const":
        return Const(random_quaternion(rng))
    if kind == "pow":
        return Monomial(int(rng.integers(0, 3)))
    if kind == "exp":
        return Exp(random_quaternion(rng, 0.7))
    if kind == "sum":
        return Sum((random_qexpr(rng, depth - 1), random_qexpr(rng, depth - 1)))
    if kind == "prod":
        return Prod(random_qexpr(rng, depth - 1), random_qexpr(rng, depth - 1))
    if kind == "lscale":
        return LeftScale(random_quaternion(rng), random_qexpr(rng, depth - 1))
    return RightScale(random_qexpr(rng, depth - 1), random_quaternion(rng))


def _grid(n=101, lo=0.0, hi=2.0):
    return np.linspace(lo, hi, n)


def _max_residual(eq: ConstCoeffEq, psi: QExpr, xs) -> float:
    return max(abs(eq.residual(psi, float(x))) for x in xs)


# ------------------------------------------------------------------ checks

def check_example1_residual(perturb=0.0):
    eq = example1_equation(perturb)
    worst = _max_residual(eq, Exp(-I), _grid(21))
    return worst < 1e-10, f"max |residual| of exp(-ix) = {worst:.3g} (tol 1e-10)"


def check_example1_wronskian(perturb=0.0):
    pair = FundamentalPair(Exp(-I), Exp(I - J))
    worst = max(abs(modulus_squared(pair, float(x)) - 5.0) for x in _grid(20))
    return worst < 1e-10, f"max ||W|^2 - 5| = {worst:.3g} over 20 points (tol 1e-10)"


def _example2_fit(partner: QExpr):
    xi = reduce_order(example1_equation(), -I)
    (c, _), resid = fit_right_factors([partner, Exp(-I)], xi, _grid())
    return c, resid


def check_example2_printed_form(perturb=0.0):
    c, resid = _example2_fit(Exp(I - J))
    ok = resid < 1e-8 and abs(abs(c) - 1.0) < 1e-8
    return ok, f"xi vs exp[(i-j)x]*c + phi*d: fit residual {resid:.3g}, |c| = {abs(c):.6g}"


def check_example2_reduction(perturb=0.0):
    c, resid = _example2_fit(Exp(-(I + J)))
    ok = resid < 1e-8 and (c - J).max_abs() < 1e-8
    return ok, (f"xi vs exp[-(i+j)x]*c + phi*d: fit residual {resid:.3g}, c = {c} "
                "(j exp[(i-j)x] = exp[-(i+j)x] j)")


def check_example3_kernel(perturb=0.0):
    res = resolve(left_mul((I + J) / 2) + right_mul((J - I) / 2))
    proj = res.ker_proj.apply(ONE)
    ok = (not res.invertible) and res.rank == 2 and (proj - (ONE + K) / 2).max_abs() < 1e-12
    return ok, f"rank {res.rank}, invertible={res.invertible}, P_ker(1) = {proj}"


def check_example3_reduction(perturb=0.0):
    xi = reduce_order(example3_equation(), EX3_Q)
    (c, _), resid = fit_right_factors([example3_closed_form(), Exp(EX3_Q)], xi, _grid())
    ok = resid < 1e-8 and abs(c) > 1e-6
    return ok, f"fit residual {resid:.3g}, right factor c = {c}"


def check_example3_negative_control(perturb=0.0):
    worst = _max_residual(example3_equation(), Prod(Monomial(1), Exp(EX3_Q)), _grid())
    return worst > 0.1, f"max |residual| of x exp[qx] = {worst:.3g} (must exceed 0.1)"


def check_example4_nu1_prime(perturb=0.0):
    phi, xi = example4_basis()
    vr = variation_of_parameters(phi, xi, example4_forcing(), 0.0)
    worst = max(abs(vr.dnu1(float(x)) - exp_qx(I, float(x)) * float(x) * K) for x in _grid())
    worst2 = max(abs(vr.dnu2(float(x)) + exp_qx(I + J, float(x)) * float(x) * K) for x in _grid())
    worst = max(worst, worst2)
    return worst < 1e-10, f"max |nu' - closed form| = {worst:.3g} (tol 1e-10)"


def check_example4_particular(perturb=0.0):
    phi, xi = example4_basis()
    vr = variation_of_parameters(phi, xi, example4_forcing(), 0.0)
    ref = example4_closed_particular()
    sol = rebase_particular(phi, xi, vr.particular, ref, 0.0)
    worst = float(np.max(np.abs(sample(sol.expr, _grid()) - sample(ref, _grid()))))
    return worst < 1e-6, (f"max |psi_p - (1/2)[(i+j)x + k]| = {worst:.3g} after removing "
                          f"phi*{sol.q1} + xi*{sol.q2} (tol 1e-6)")


def check_wronskian_scaling(perturb=0.0):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(25):
        q, a = random_quaternion(rng, 0.6), random_quaternion(rng, 0.6)
        eq = ConstCoeffEq(a, q * q - a * q)
        pair = FundamentalPair(Exp(q), reduce_order(eq, q))
        w0 = math.sqrt(modulus_squared(pair, 0.0))
        for x in _grid(21):
            w = math.sqrt(modulus_squared(pair, float(x)))
            worst = max(worst, abs(w / (math.exp(a.w * x) * w0) - 1.0))
    return worst < 1e-6, f"max relative deviation {worst:.3g} over 25 equations (tol 1e-6)"


def check_dieudonne_equivalence(perturb=0.0):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(100):
        pair = FundamentalPair(random_qexpr(rng), random_qexpr(rng))
        x = float(rng.uniform(-1.0, 1.0))
        w2 = modulus_squared(pair, x)
        d2 = dieudonne_det_squared(pair, x)
        worst = max(worst, abs(d2 - w2) / max(w2, 1e-300))
    return worst < 1e-10, f"max relative gap {worst:.3g} over 100 random pairs (tol 1e-10)"


def check_operator_algebra(perturb=0.0):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(100):
        q, p = random_quaternion(rng), random_quaternion(rng)
        worst = max(worst,
                    np.max(np.abs((left_mul(q) @ left_mul(p)).m - left_mul(q * p).m)),
                    np.max(np.abs((right_mul(q) @ right_mul(p)).m - right_mul(p * q).m)),
                    np.max(np.abs(commutator(left_mul(q), right_mul(p)).m)))
    return worst < 1e-12, f"max entrywise defect {worst:.3g} (tol 1e-12)"


def example_ivps():
    """``(name, ivp, analytic solution)`` for the four worked examples."""
    eq1 = example1_equation()
    out = [("example1", IVP.constant(eq1.a, eq1.b, ONE, -I), Exp(-I))]
    xi2 = reduce_order(eq1, -I)
    out.append(("example2", IVP.constant(eq1.a, eq1.b, xi2(0.0), xi2.derivative()(0.0)), xi2))
    eq3 = example3_equation()
    xi3 = example3_closed_form()
    out.append(("example3", IVP.constant(eq3.a, eq3.b, xi3(0.0), xi3.derivative()(0.0)), xi3))
    phi, xi = example4_basis()
    rho = example4_forcing()
    vr = variation_of_parameters(phi, xi, rho, 0.0)
    f, g = ONE + J, K
    sol = fit_initial_conditions(phi, xi, vr.particular, 0.0, f, g)
    out.append(("example4", IVP.constant(eq1.a, eq1.b, f, g, rho=rho), sol.expr))
    return out


def check_oracle_agreement(perturb=0.0):
    parts, ok = [], True
    for name, ivp, exact in example_ivps():
        traj = integrate(to_real_system(ivp), 2.0, 1e-3)
        idx = np.arange(0, len(traj), 10)
        err = float(np.max(np.abs(traj.psi[idx] - sample(exact, traj.xs[idx]))))
        ok &= err < 1e-5
        parts.append(f"{name} {err:.2g}")
    return ok, "max |rk4 - analytic| on 201 points: " + ", ".join(parts) + " (tol 1e-5)"


def check_rk4_order(perturb=0.0):
    eq = example1_equation()
    system = to_real_system(IVP.constant(eq.a, eq.b, ONE, -I))
    errs = []
    for h in (0.1, 0.05, 0.025):
        traj = integrate(system, 2.0, h)
        errs.append(float(np.max(np.abs(traj.psi - sample(Exp(-I), traj.xs)))))
    orders = [math.log2(errs[n] / errs[n + 1]) for n in range(2)]
    ok = all(3.7 <= p <= 4.3 for p in orders)
    return ok, "observed orders " + ", ".join(f"{p:.3f}" for p in orders) + " (window [3.7, 4.3])"


def check_round_trip(perturb=0.0):
    _, ivp, _ = example_ivps()[3]
    gap = uniqueness_probe(ivp, 2.0, 1e-3)
    return gap < 1e-6, f"example4 refinement/round-trip discrepancy {gap:.3g} (tol 1e-6)"


CHECKS = {
    "dieudonne_equivalence": check_dieudonne_equivalence,
    "example1_residual": check_example1_residual,
    "example1_wronskian": check_example1_wronskian,
    "example2_printed_form": check_example2_printed_form,
    "example2_reduction": check_example2_reduction,
    "example3_kernel": check_example3_kernel,
    "example3_negative_control": check_example3_negative_control,
    "example3_reduction": check_example3_reduction,
    "example4_nu1_prime": check_example4_nu1_prime,
    "example4_particular": check_example4_particular,
    "operator_algebra": check_operator_algebra,
    "oracle_agreement": check_oracle_agreement,
    "rk4_order": check_rk4_order,
    "round_trip": check_round_trip,
    "wronskian_scaling": check_wronskian_scaling,
}


def check_names() -> list[str]:
    return sorted(CHECKS)


def run_check(name: str, perturb: float = 0.0) -> CheckResult:
    try:
        passed, detail = CHECKS[name](perturb)
    except Exception as exc:  # a crashing check is a failing check
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(passed), detail)


def run_all(perturb: float = 0.0) -> list[CheckResult]:
    return [run_check(name, perturb) for name in check_names()]
