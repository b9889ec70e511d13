"""Expression trees for quaternion-valued functions of one real variable.

Trees are immutable and closed under :func:`derivative`, so a solution and
its first two derivatives are always available exactly.  Products keep their
operand order; ``Prod(f, g)'`` is ``f'g + fg'`` and never ``g'f``.

Beyond the basic constructors (constants, powers of ``x``, ``exp(qx)``, sums,
ordered products, left/right constant scaling, constant real-linear
operators) two nodes support the solvers:

* :class:`Inverse` -- pointwise ``1/f(x)``, with ``(1/f)' = -f^-1 f' f^-1``;
* :class:`Antiderivative` -- ``int_{x0}^x g(t) dt`` tabulated by adaptive
  Simpson quadrature, whose derivative is exactly ``g``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .errors import NearZeroQuaternion
from .operators import LinOp
from .quadrature import adaptive_simpson
from .quaternion import ONE, ZERO, Quaternion, as_quaternion, exp_qx, format_quaternion, inverse


class QExpr:
    """Base class; subclasses implement ``eval`` and ``derivative``."""

    def eval(self, x: float) -> Quaternion:
        raise NotImplementedError

    def derivative(self) -> QExpr:
        raise NotImplementedError

    def __call__(self, x: float) -> Quaternion:
        return self.eval(x)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Sum((self, other))

    def __radd__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Sum((other, self))

    def __neg__(self):
        return LeftScale(Quaternion(-1.0), self)

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Sum((self, -other))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Sum((other, -self))

    def __mul__(self, other):
        if isinstance(other, QExpr):
            return Prod(self, other)
        if isinstance(other, (Quaternion, Real)):
            return RightScale(self, as_quaternion(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Quaternion, Real)):
            return LeftScale(as_quaternion(other), self)
        return NotImplemented


def _coerce(value):
    if isinstance(value, QExpr):
        return value
    if isinstance(value, (Quaternion, Real)):
        return Const(as_quaternion(value))
    return None


def _paren(e: QExpr) -> str:
    return f"({e})" if isinstance(e, Sum) else str(e)


def _qstr(q: Quaternion) -> str:
    s = format_quaternion(q, compact=True)
    return s if q.vector == ZERO and q.w >= 0 else f"({s})"


@dataclass(frozen=True, eq=False)
class Const(QExpr):
    c: Quaternion

    def __post_init__(self):
        object.__setattr__(self, "c", as_quaternion(self.c))

    def eval(self, x):
        return self.c

    def derivative(self):
        return ZERO_EXPR

    def __str__(self):
        return _qstr(self.c)


ZERO_EXPR = Const(ZERO)


def is_zero(e: QExpr) -> bool:
    """True only for a literal zero constant."""
    return isinstance(e, Const) and e.c == ZERO


@dataclass(frozen=True, eq=False)
class Monomial(QExpr):
    """``x**m`` for a nonnegative integer ``m``."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"monomial degree must be a nonnegative integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    def eval(self, x):
        return Quaternion(float(x) ** self.m)

    def derivative(self):
        if self.m == 0:
            return ZERO_EXPR
        if self.m == 1:
            return Const(ONE)
        return LeftScale(Quaternion(self.m), Monomial(self.m - 1))

    def __str__(self):
        return {0: "1", 1: "x"}.get(self.m, f"x^{self.m}")


@dataclass(frozen=True, eq=False)
class Exp(QExpr):
    """``exp(q*x)``."""

    q: Quaternion

    def __post_init__(self):
        object.__setattr__(self, "q", as_quaternion(self.q))

    def eval(self, x):
        return exp_qx(self.q, x)

    def derivative(self):
        # q commutes with exp(qx), so the left placement is a convention
        return LeftScale(self.q, self)

    def __str__(self):
        return f"exp[{_qstr(self.q)}x]"


@dataclass(frozen=True, eq=False)
class Sum(QExpr):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def eval(self, x):
        acc = ZERO
        for t in self.terms:
            acc = acc + t.eval(x)
        return acc

    def derivative(self):
        return make_sum(t.derivative() for t in self.terms)

    def __str__(self):
        return " + ".join(str(t) for t in self.terms) or "0"


@dataclass(frozen=True, eq=False)
class Prod(QExpr):
    """Ordered product ``left(x) * right(x)``."""

    left: QExpr
    right: QExpr

    def eval(self, x):
        return self.left.eval(x) * self.right.eval(x)

    def derivative(self):
        return make_sum((make_prod(self.left.derivative(), self.right),
                         make_prod(self.left, self.right.derivative())))

    def __str__(self):
        return f"{_paren(self.left)}*{_paren(self.right)}"


@dataclass(frozen=True, eq=False)
class LeftScale(QExpr):
    """``c * inner(x)``."""

    c: Quaternion
    inner: QExpr

    def __post_init__(self):
        object.__setattr__(self, "c", as_quaternion(self.c))

    def eval(self, x):
        return self.c * self.inner.eval(x)

    def derivative(self):
        d = self.inner.derivative()
        return ZERO_EXPR if is_zero(d) else LeftScale(self.c, d)

    def __str__(self):
        return f"{_qstr(self.c)}*{_paren(self.inner)}"


@dataclass(frozen=True, eq=False)
class RightScale(QExpr):
    """``inner(x) * c``."""

    inner: QExpr
    c: Quaternion

    def __post_init__(self):
        object.__setattr__(self, "c", as_quaternion(self.c))

    def eval(self, x):
        return self.inner.eval(x) * self.c

    def derivative(self):
        d = self.inner.derivative()
        return ZERO_EXPR if is_zero(d) else RightScale(d, self.c)

    def __str__(self):
        return f"{_paren(self.inner)}*{_qstr(self.c)}"


@dataclass(frozen=True, eq=False)
class ApplyOp(QExpr):
    """Pointwise action of a constant real-linear operator."""

    op: LinOp
    inner: QExpr

    def eval(self, x):
        return self.op.apply(self.inner.eval(x))

    def derivative(self):
        d = self.inner.derivative()
        return ZERO_EXPR if is_zero(d) else ApplyOp(self.op, d)

    def __str__(self):
        return f"A[{self.inner}]"


@dataclass(frozen=True, eq=False)
class Inverse(QExpr):
    """Pointwise ``inner(x)^-1``; evaluation raises NearZeroQuaternion at zeros."""

    inner: QExpr

    def eval(self, x):
        value = self.inner.eval(x)
        try:
            return inverse(value)
        except NearZeroQuaternion as exc:
            raise NearZeroQuaternion(f"{exc} at x = {x!r}") from None

    def derivative(self):
        d = self.inner.derivative()
        if is_zero(d):
            return ZERO_EXPR
        return LeftScale(Quaternion(-1.0), Prod(self, Prod(d, self)))

    def __str__(self):
        return f"({self.inner})^-1"


def _hermite(y0, m0, y1, m1, h, t):
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1)


@dataclass(frozen=True, eq=False)
class Antiderivative(QExpr):
    """``int_{x0}^{x} integrand(t) dt``.

    Values come from a table on the grid ``x0 + n*h``: cell integrals by
    adaptive Simpson, interpolation by cubic Hermite using the exact integrand
    as slope.  ``h`` is halved until the interpolant agrees with direct
    quadrature at cell midpoints to ``tol``.  The table grows lazily in both
    directions, so every real ``x`` is accepted.
    """

    integrand: QExpr
    x0: float = 0.0
    tol: float = 1e-10
    _state: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    PROBE_LENGTH = 0.5
    MAX_HALVINGS = 10

    def _g(self, t):
        return self.integrand.eval(t).as_array()

    def _cell(self, a, b, h):
        return adaptive_simpson(self._g, a, b, tol=0.5 * self.tol * h)

    def _node(self, n):
        nodes, h = self._state["nodes"], self._state["h"]
        if n in nodes:
            return nodes[n]
        step = 1 if n > 0 else -1
        k = max((key for key in nodes if key * step >= 0 and abs(key) < abs(n)), key=abs)
        while k != n:
            value, _ = nodes[k]
            nxt = k + step
            a, b = self.x0 + k * h, self.x0 + nxt * h
            nodes[nxt] = (value + self._cell(a, b, h), self._g(b))
            k = nxt
        return nodes[n]

    def _choose_step(self):
        h = 0.125
        for _ in range(self.MAX_HALVINGS):
            nodes = {0: (np.zeros(4), self._g(self.x0))}
            self._state.update(h=h, nodes=nodes)
            worst = 0.0
            for n in range(int(round(self.PROBE_LENGTH / h))):
                (y0, m0), (y1, m1) = self._node(n), self._node(n + 1)
                a = self.x0 + n * h
                direct = y0 + self._cell(a, a + 0.5 * h, h)
                approx = _hermite(y0, m0, y1, m1, h, 0.5)
                scale = max(1.0, float(np.max(np.abs(direct))))
                worst = max(worst, float(np.max(np.abs(direct - approx))) / scale)
            if worst <= self.tol:
                return
            h *= 0.5

    def eval(self, x):
        with self._lock:
            if "h" not in self._state:
                self._choose_step()
            h = self._state["h"]
            s = (x - self.x0) / h
            n = math.floor(s)
            y0, m0 = self._node(n)
            y1, m1 = self._node(n + 1)
        return Quaternion.from_array(_hermite(y0, m0, y1, m1, h, s - n))

    def derivative(self):
        return self.integrand

    def __str__(self):
        return f"int[{self.integrand}]"


def make_sum(terms) -> QExpr:
    """Sum with literal zeros removed; collapses to a single term or zero."""
    kept = tuple(t for t in terms if not is_zero(t))
    if not kept:
        return ZERO_EXPR
    if len(kept) == 1:
        return kept[0]
    return Sum(kept)


def make_prod(left: QExpr, right: QExpr) -> QExpr:
    if is_zero(left) or is_zero(right):
        return ZERO_EXPR
    return Prod(left, right)


def const(q) -> Const:
    return Const(as_quaternion(q))


def evaluate(e: QExpr, x: float) -> Quaternion:
    return e.eval(x)


def derivative(e: QExpr) -> QExpr:
    return e.derivative()


def derivatives(e: QExpr, order: int = 2) -> list[QExpr]:
    """``[e, e', ..., e^(order)]``."""
    out = [e]
    for _ in range(order):
        out.append(out[-1].derivative())
    return out


def polynomial(coeffs) -> QExpr:
    """``sum_m c_m x^m`` from ``(degree, coefficient)`` pairs."""
    return make_sum(LeftScale(as_quaternion(c), Monomial(int(m))) for m, c in coeffs)


def sample(e: QExpr, xs) -> np.ndarray:
    """Evaluate on a grid; returns an ``(len(xs), 4)`` array."""
    return np.array([e.eval(float(x)).as_array() for x in xs])
