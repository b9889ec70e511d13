"""Closed-form machinery for ``psi'' = alpha psi' + beta psi + rho``.

Solutions of the homogeneous equation form a right module: ``phi*u`` solves it
whenever ``phi`` does, while ``u*phi`` in general does not.  Accordingly every
free constant here multiplies from the right.

Integrals are definite, taken from the basis point (``0`` for the
exponential-product integral, ``x0`` for variation of parameters).  Changing
the lower limit only adds a right multiple of the basis functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DependentPair, NearZeroQuaternion, NotASolution
from .operators import left_mul, resolve, right_mul
from .qexpr import (
    ZERO_EXPR, Antiderivative, ApplyOp, Const, Exp, Inverse, Monomial, QExpr,
    RightScale, make_prod, make_sum, polynomial,
)
from .quaternion import ONE, ZERO, Quaternion, as_quaternion, inverse
from .wronskian import TAU_DEP, FundamentalPair, modulus_squared

CHAR_TOL = 1e-10


@dataclass(frozen=True)
class ConstCoeffEq:
    """``psi'' = a psi' + b psi`` with constant quaternion coefficients."""

    a: Quaternion
    b: Quaternion

    def __post_init__(self):
        object.__setattr__(self, "a", as_quaternion(self.a))
        object.__setattr__(self, "b", as_quaternion(self.b))

    @property
    def alpha(self) -> QExpr:
        return Const(self.a)

    @property
    def beta(self) -> QExpr:
        return Const(self.b)

    def characteristic_defect(self, q) -> Quaternion:
        """``q^2 - a q - b``; zero iff ``exp(qx)`` is a solution."""
        q = as_quaternion(q)
        return q * q - self.a * q - self.b

    def residual(self, psi: QExpr, x: float) -> Quaternion:
        d1 = psi.derivative()
        d2 = d1.derivative()
        return d2(x) - self.a * d1(x) - self.b * psi(x)


@dataclass(frozen=True)
class IVP:
    """``psi'' = alpha psi' + beta psi + rho``, ``psi(x0) = f``, ``psi'(x0) = g``."""

    alpha: QExpr
    beta: QExpr
    rho: QExpr
    x0: float
    f: Quaternion
    g: Quaternion

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "f", as_quaternion(self.f))
        object.__setattr__(self, "g", as_quaternion(self.g))

    @classmethod
    def constant(cls, a, b, f, g, x0=0.0, rho: QExpr | None = None) -> IVP:
        return cls(Const(as_quaternion(a)), Const(as_quaternion(b)),
                   ZERO_EXPR if rho is None else rho, x0, f, g)


@dataclass(frozen=True)
class GeneralSolution:
    """``psi = phi*q1 + xi*q2 + particular``."""

    phi: QExpr
    xi: QExpr
    q1: Quaternion
    q2: Quaternion
    particular: QExpr = ZERO_EXPR

    @property
    def expr(self) -> QExpr:
        return make_sum((RightScale(self.phi, self.q1), RightScale(self.xi, self.q2),
                         self.particular))

    def __call__(self, x: float) -> Quaternion:
        return self.expr(x)


@dataclass(frozen=True)
class VariationResult:
    nu1: QExpr
    nu2: QExpr
    dnu1: QExpr
    dnu2: QExpr
    particular: QExpr
    formula: str

    def imposed_condition(self, phi: QExpr, xi: QExpr, x: float) -> Quaternion:
        """``phi nu1' + xi nu2'``, which the method forces to zero."""
        return phi(x) * self.dnu1(x) + xi(x) * self.dnu2(x)


def exp_product_integral(u, v) -> QExpr:
    """``t -> int_0^t exp(u s) exp(v s) ds`` as an expression.

    With ``A = L_u + R_v`` the integrand ``F`` obeys ``F' = A F``.  ``A`` is
    normal, so splitting on its kernel gives
    ``int_0^t F = A^+ (F(t) - 1) + t * P_ker(1)``.
    """
    u, v = as_quaternion(u), as_quaternion(v)
    res = resolve(left_mul(u) + right_mul(v))
    integrand = make_prod(Exp(u), Exp(v))
    terms = [ApplyOp(res.pinv, make_sum((integrand, Const(-ONE))))]
    if not res.invertible:
        terms.append(RightScale(Monomial(1), res.ker_proj.apply(ONE)))
    return make_sum(terms)


def integrate_exp_product(u, v, x: float) -> Quaternion:
    """``int_0^x exp(u t) exp(v t) dt``."""
    return exp_product_integral(u, v)(x)


def reduce_order(eq: ConstCoeffEq, q) -> QExpr:
    """Second solution from the known exponential solution ``exp(qx)``.

    Writing ``xi = phi tau`` with ``phi = exp(qx)`` turns the equation into
    ``(phi tau')' = (a - q) (phi tau')``, so
    ``xi = exp(qx) int_0^x exp(-qt) exp((a-q)t) dt``.
    The result has ``xi(0) = 0`` and ``xi'(0) = 1``.
    """
    q = as_quaternion(q)
    defect = eq.characteristic_defect(q)
    scale = max(1.0, q.norm2(), abs(eq.a) * abs(q), abs(eq.b))
    if defect.max_abs() > CHAR_TOL * scale:
        raise NotASolution(f"q^2 - a q - b = {defect} for q = {q}")
    return make_prod(Exp(q), exp_product_integral(-q, eq.a - q))


def _nu_derivatives(phi, xi, rho, formula):
    dphi, dxi = phi.derivative(), xi.derivative()
    schur2 = make_sum((dxi, -make_prod(make_prod(dphi, Inverse(phi)), xi)))
    dnu2 = make_prod(Inverse(schur2), rho)
    if formula == "direct":
        schur1 = make_sum((dphi, -make_prod(make_prod(dxi, Inverse(xi)), phi)))
        dnu1 = make_prod(Inverse(schur1), rho)
    else:
        # phi nu1' + xi nu2' = 0 solved for nu1'; avoids inverting xi
        dnu1 = -make_prod(make_prod(Inverse(phi), xi), dnu2)
    return dnu1, dnu2


def variation_of_parameters(phi: QExpr, xi: QExpr, rho: QExpr, x0: float,
                            formula: str | None = None, tol: float = 1e-10) -> VariationResult:
    """Particular solution ``phi nu1 + xi nu2`` with ``nu1(x0) = nu2(x0) = 0``.

    ``formula="direct"`` uses

        nu1' = [phi' - xi' xi^-1 phi]^-1 rho,   nu2' = [xi' - phi' phi^-1 xi]^-1 rho

    and so needs ``phi`` and ``xi`` invertible everywhere on the range used.
    ``formula="schur"`` keeps the ``nu2'`` formula and takes
    ``nu1' = -phi^-1 xi nu2'``, needing only ``phi`` invertible (handy for
    reduction-of-order partners, which vanish at their base point).  The
    default picks ``"direct"`` unless ``xi(x0)`` is not invertible.
    """
    pair = FundamentalPair(phi, xi)
    w2 = modulus_squared(pair, x0)
    if w2 < TAU_DEP:
        raise DependentPair(f"|W|^2 = {w2:.3g} at x0 = {x0}")
    if formula is None:
        try:
            inverse(xi(x0))
            formula = "direct"
        except NearZeroQuaternion:
            formula = "schur"
    if formula not in ("direct", "schur"):
        raise ValueError(f"unknown formula {formula!r}")
    dnu1, dnu2 = _nu_derivatives(phi, xi, rho, formula)
    nu1 = Antiderivative(dnu1, x0, tol)
    nu2 = Antiderivative(dnu2, x0, tol)
    particular = make_sum((make_prod(phi, nu1), make_prod(xi, nu2)))
    return VariationResult(nu1, nu2, dnu1, dnu2, particular, formula)


def solve_pair_system(phi0, xi0, dphi0, dxi0, rhs1, rhs2):
    """Solve ``phi0 q1 + xi0 q2 = rhs1``, ``phi0' q1 + xi0' q2 = rhs2``.

    Uses the explicit block inverse

        [[ (phi - xi xi'^-1 phi')^-1, (phi' - xi' xi^-1 phi)^-1 ],
         [ (xi - phi phi'^-1 xi')^-1, (xi' - phi' phi^-1 xi)^-1 ]]

    and falls back to the real 8x8 system when one of the entries is not
    invertible (e.g. ``xi(x0) = 0``).
    """
    try:
        scale = max(abs(phi0), abs(xi0), abs(dphi0), abs(dxi0))
        m11 = inverse(phi0 - xi0 * inverse(dxi0, scale) * dphi0, scale)
        m12 = inverse(dphi0 - dxi0 * inverse(xi0, scale) * phi0, scale)
        m21 = inverse(xi0 - phi0 * inverse(dphi0, scale) * dxi0, scale)
        m22 = inverse(dxi0 - dphi0 * inverse(phi0, scale) * xi0, scale)
    except NearZeroQuaternion:
        big = np.block([[left_mul(phi0).m, left_mul(xi0).m],
                        [left_mul(dphi0).m, left_mul(dxi0).m]])
        sol = np.linalg.solve(big, np.concatenate([rhs1.as_array(), rhs2.as_array()]))
        return Quaternion.from_array(sol[:4]), Quaternion.from_array(sol[4:])
    return m11 * rhs1 + m12 * rhs2, m21 * rhs1 + m22 * rhs2


def fit_initial_conditions(phi: QExpr, xi: QExpr, particular: QExpr | None, x0: float,
                           f, g) -> GeneralSolution:
    """Right constants ``q1, q2`` so that ``psi(x0) = f`` and ``psi'(x0) = g``."""
    particular = ZERO_EXPR if particular is None else particular
    pair = FundamentalPair(phi, xi)
    w2 = modulus_squared(pair, x0)
    if w2 < TAU_DEP:
        raise DependentPair(f"|W|^2 = {w2:.3g} at x0 = {x0}")
    phi0, dphi0, xi0, dxi0 = pair.values(x0)
    rhs1 = as_quaternion(f) - particular(x0)
    rhs2 = as_quaternion(g) - particular.derivative()(x0)
    q1, q2 = solve_pair_system(phi0, xi0, dphi0, dxi0, rhs1, rhs2)
    return GeneralSolution(phi, xi, q1, q2, particular)


def polynomial_particular(eq: ConstCoeffEq, coeffs) -> QExpr:
    """Polynomial particular solution for polynomial forcing ``sum c_m x^m``.

    Matching powers of ``x`` gives
    ``p_m = b^-1 [(m+2)(m+1) p_{m+2} - a (m+1) p_{m+1} - c_m]`` from the top
    degree down, so ``b`` must be invertible.
    """
    forcing = {}
    for m, c in coeffs:
        forcing[int(m)] = forcing.get(int(m), ZERO) + as_quaternion(c)
    if not forcing:
        return ZERO_EXPR
    top = max(forcing)
    binv = inverse(eq.b)
    p = {top + 1: ZERO, top + 2: ZERO}
    for m in range(top, -1, -1):
        rhs = (m + 2) * (m + 1) * p[m + 2] - eq.a * ((m + 1) * p[m + 1]) - forcing.get(m, ZERO)
        p[m] = binv * rhs
    return polynomial((m, p[m]) for m in range(top + 1))


def rebase_particular(phi: QExpr, xi: QExpr, particular: QExpr, reference: QExpr,
                      x0: float) -> GeneralSolution:
    """Shift ``particular`` by a homogeneous solution so it matches ``reference``.

    Two particular solutions differ by ``phi d1 + xi d2``; the constants are
    read off at ``x0``.  The returned solution has ``q1 = d1``, ``q2 = d2``.
    """
    return fit_initial_conditions(phi, xi, particular, x0,
                                  reference(x0), reference.derivative()(x0))
