"""Left/right multiplication operators as real 4x4 matrices.

``left_mul(q)`` is the matrix of ``psi -> q*psi`` acting on the component
vector ``(psi0, psi1, psi2, psi3)``; ``right_mul(p)`` that of ``psi -> psi*p``.
Sums and products of these stay in the same real-linear class, so every
operator is stored as a plain matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

import numpy as np

from .quaternion import Quaternion, as_quaternion

RANK_RTOL = 1e-10


def _frozen(m) -> np.ndarray:
    arr = np.array(m, dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"LinOp needs a 4x4 matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinOp:
    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", _frozen(self.m))

    def apply(self, q: Quaternion) -> Quaternion:
        return Quaternion.from_array(self.m @ as_quaternion(q).as_array())

    __call__ = apply

    def __add__(self, other):
        if isinstance(other, LinOp):
            return LinOp(self.m + other.m)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, LinOp):
            return LinOp(self.m - other.m)
        return NotImplemented

    def __neg__(self):
        return LinOp(-self.m)

    def __matmul__(self, other):
        """Composition: ``(A @ B)(psi) = A(B(psi))``."""
        if isinstance(other, LinOp):
            return LinOp(self.m @ other.m)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, LinOp):
            return self @ other
        if isinstance(other, Real):
            return LinOp(self.m * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Real):
            return LinOp(self.m * other)
        return NotImplemented

    @property
    def T(self) -> LinOp:
        return LinOp(self.m.T)

    def allclose(self, other: LinOp, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.m, other.m, rtol=0.0, atol=atol))

    def __repr__(self):
        rows = "; ".join(" ".join(f"{v:g}" for v in row) for row in self.m)
        return f"LinOp([{rows}])"


def left_mul(q) -> LinOp:
    q0, q1, q2, q3 = as_quaternion(q)
    return LinOp([
        [q0, -q1, -q2, -q3],
        [q1, q0, -q3, q2],
        [q2, q3, q0, -q1],
        [q3, -q2, q1, q0],
    ])


def right_mul(p) -> LinOp:
    p0, p1, p2, p3 = as_quaternion(p)
    return LinOp([
        [p0, -p1, -p2, -p3],
        [p1, p0, p3, -p2],
        [p2, -p3, p0, p1],
        [p3, p2, -p1, p0],
    ])


def identity() -> LinOp:
    return LinOp(np.eye(4))


def commutator(a: LinOp, b: LinOp) -> LinOp:
    return a @ b - b @ a


@dataclass(frozen=True)
class OpResolution:
    """SVD-based resolution of a constant operator."""

    pinv: LinOp
    ker_proj: LinOp
    rank: int
    invertible: bool
    singular_values: tuple[float, ...]


def resolve(a: LinOp) -> OpResolution:
    """Rank, Moore-Penrose pseudo-inverse and kernel projector of ``a``.

    Singular values at or below ``1e-10 * s_max`` (``1e-10`` when ``a = 0``)
    count as zero.
    """
    u, s, vt = np.linalg.svd(a.m)
    cutoff = RANK_RTOL * (s[0] if s[0] > 0 else 1.0)
    keep = s > cutoff
    rank = int(keep.sum())
    inv_s = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    pinv = (vt.T * inv_s) @ u.T
    null = vt[~keep]
    ker = null.T @ null
    return OpResolution(
        pinv=LinOp(pinv),
        ker_proj=LinOp(ker),
        rank=rank,
        invertible=rank == 4,
        singular_values=tuple(float(v) for v in s),
    )
