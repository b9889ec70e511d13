"""Wronskian functionals for pairs of quaternionic functions.

The quaternion-valued candidates (left/right, and the two with the roles of
the functions swapped) differ from each other, but all share one modulus.
That modulus, written without any inverse, is

    |W|^2 = |phi|^2 |xi'|^2 + |xi|^2 |phi'|^2 - 2 Re(xi' conj(xi) phi conj(phi'))

and it also equals the determinant of ``M M^+`` for the 2x2 matrix
``M = [[phi, xi], [phi', xi']]``.  Zero at one point means the pair is
right-linearly dependent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .qexpr import QExpr
from .quadrature import adaptive_simpson
from .quaternion import Quaternion, inverse

TAU_DEP = 1e-9
IMAG_RESIDUE_TOL = 1e-10
CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FundamentalPair:
    phi: QExpr
    xi: QExpr

    @cached_property
    def dphi(self) -> QExpr:
        return self.phi.derivative()

    @cached_property
    def dxi(self) -> QExpr:
        return self.xi.derivative()

    def values(self, x: float):
        """``(phi, phi', xi, xi')`` at ``x``."""
        return self.phi(x), self.dphi(x), self.xi(x), self.dxi(x)


@dataclass(frozen=True)
class WronskianVariants:
    wl: Quaternion
    wr: Quaternion
    wl_tilde: Quaternion
    wr_tilde: Quaternion

    def moduli(self) -> tuple[float, float, float, float]:
        return (abs(self.wl), abs(self.wr), abs(self.wl_tilde), abs(self.wr_tilde))


def variants_from_values(phi, dphi, xi, dxi) -> WronskianVariants:
    scale = max(abs(phi), abs(dphi), abs(xi), abs(dxi))
    inner = dxi - dphi * inverse(phi, scale) * xi
    inner_t = dphi - dxi * inverse(xi, scale) * phi
    return WronskianVariants(
        wl=phi * inner,
        wr=inner * phi,
        wl_tilde=-(xi * inner_t),
        wr_tilde=-(inner_t * xi),
    )


def variants(pair: FundamentalPair, x: float) -> WronskianVariants:
    """All four quaternion-valued Wronskian candidates at ``x``.

    Needs ``phi(x)`` and ``xi(x)`` invertible; raises NearZeroQuaternion
    otherwise.
    """
    return variants_from_values(*pair.values(x))


def modulus_squared_from_values(phi, dphi, xi, dxi) -> float:
    cross = dphi * phi.conj() * xi * dxi.conj() + dxi * xi.conj() * phi * dphi.conj()
    scale = max(1.0, abs(phi) * abs(dphi) * abs(xi) * abs(dxi))
    if cross.vector.max_abs() > IMAG_RESIDUE_TOL * scale:
        raise AssertionError(f"|W|^2 cross terms not real: {cross}")
    value = phi.norm2() * dxi.norm2() + xi.norm2() * dphi.norm2() - cross.w
    if value < 0.0:
        if value < -CLAMP_TOL * scale:
            raise AssertionError(f"|W|^2 came out negative: {value!r}")
        value = 0.0
    return value


def modulus_squared(pair: FundamentalPair, x: float) -> float:
    """``|W|^2`` at ``x`` (no inverses needed)."""
    return modulus_squared_from_values(*pair.values(x))


def modulus(pair: FundamentalPair, x: float) -> float:
    return math.sqrt(modulus_squared(pair, x))


def _complex_adjoint(q: Quaternion) -> np.ndarray:
    # q = z1 + z2 j with z1 = w + x i, z2 = y + z i
    z1 = complex(q.w, q.x)
    z2 = complex(q.y, q.z)
    return np.array([[z1, z2], [-z2.conjugate(), z1.conjugate()]])


def dieudonne_det_squared_from_values(phi, dphi, xi, dxi) -> float:
    # The ordinary determinant of the 4x4 complex representation of M is
    # real, nonnegative and equal to [Det M]^2 = det(M M^+).
    big = np.block([[_complex_adjoint(phi), _complex_adjoint(xi)],
                    [_complex_adjoint(dphi), _complex_adjoint(dxi)]])
    return max(float(np.linalg.det(big).real), 0.0)


def dieudonne_det_squared(pair: FundamentalPair, x: float) -> float:
    """``[Det M]^2 = det(M M^+)`` computed through the complex representation."""
    return dieudonne_det_squared_from_values(*pair.values(x))


def scaling_check(pair: FundamentalPair, alpha: QExpr, x0: float, x1: float):
    """Return ``(|W(x1)|, exp(int_{x0}^{x1} Re alpha) |W(x0)|)``.

    The two agree when the pair solves ``psi'' = alpha psi' + beta psi``.
    """
    growth = adaptive_simpson(lambda t: alpha(t).w, x0, x1, tol=1e-10)
    return modulus(pair, x1), math.exp(growth) * modulus(pair, x0)


def dependence_test(pair: FundamentalPair, x0: float) -> bool:
    """True when ``|W(x0)|^2 < 1e-9``, i.e. the pair is dependent."""
    return modulus_squared(pair, x0) < TAU_DEP
