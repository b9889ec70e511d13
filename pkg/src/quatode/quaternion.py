"""Real quaternions: Hamilton product, conjugation, inverse, exponentials.

Components are ``(w, x, y, z)`` on the basis ``{1, i, j, k}`` with
``i*i = j*j = k*k = i*j*k = -1``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import NearZeroQuaternion

# |v|x below this switches exp_qx to the sin(t)/t series
EXP_SERIES_SWITCH = 1e-4
INVERSE_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, values) -> Quaternion:
        w, x, y, z = (float(v) for v in values)
        return cls(w, x, y, z)

    @classmethod
    def parse(cls, text: str) -> Quaternion:
        return parse_quaternion(text)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def components(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def __iter__(self):
        return iter(self.components())

    @property
    def real(self) -> float:
        return self.w

    @property
    def vector(self) -> Quaternion:
        """Imaginary part as a pure quaternion."""
        return Quaternion(0.0, self.x, self.y, self.z)

    def is_real(self, tol: float = 0.0) -> bool:
        return max(abs(self.x), abs(self.y), abs(self.z)) <= tol

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def max_abs(self) -> float:
        return max(abs(self.w), abs(self.x), abs(self.y), abs(self.z))

    def __abs__(self) -> float:
        return self.norm()

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self, scale: float = 1.0) -> Quaternion:
        return inverse(self, scale)

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w + other.w, self.x + other.x,
                              self.y + other.y, self.z + other.z)
        if isinstance(other, Real):
            return Quaternion(self.w + other, self.x, self.y, self.z)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        if isinstance(other, (Quaternion, Real)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        if isinstance(other, Real):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        # only reached for scalar * quaternion
        if isinstance(other, Real):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        # left/right division is ambiguous, so only real divisors are allowed
        if isinstance(other, Real):
            return Quaternion(self.w / other, self.x / other,
                              self.y / other, self.z / other)
        return NotImplemented

    def isclose(self, other: Quaternion, tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    def __str__(self) -> str:
        return format_quaternion(self)


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def as_quaternion(value) -> Quaternion:
    """Coerce a real number, 4-sequence or quaternion string."""
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, Real):
        return Quaternion(float(value))
    if isinstance(value, str):
        return parse_quaternion(value)
    return Quaternion.from_array(value)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a*b``."""
    aw, ax, ay, az = a.w, a.x, a.y, a.z
    bw, bx, by, bz = b.w, b.x, b.y, b.z
    return Quaternion(
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def inverse(q: Quaternion, scale: float = 1.0) -> Quaternion:
    """``conj(q)/|q|^2``.

    Raises NearZeroQuaternion when ``|q| <= 1e-12 * max(1, scale)``; pass the
    magnitude of the surrounding computation as ``scale``.
    """
    n2 = q.norm2()
    tol = INVERSE_TOL * max(1.0, scale)
    if n2 <= tol * tol:
        raise NearZeroQuaternion(f"cannot invert {format_quaternion(q)} (|q| <= {tol:g})")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def exp_qx(q: Quaternion, x: float) -> Quaternion:
    """``exp(q*x)`` by polar decomposition of ``q``."""
    v = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    theta = v * x
    if abs(theta) < EXP_SERIES_SWITCH:
        t2 = theta * theta
        sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    else:
        sinc = math.sin(theta) / theta
    scale = math.exp(q.w * x)
    s = scale * sinc * x
    return Quaternion(scale * math.cos(theta), s * q.x, s * q.y, s * q.z)


def _fmt(value: float) -> str:
    return repr(abs(value) + 0.0)


def format_quaternion(q: Quaternion, compact: bool = False) -> str:
    """Render as ``a+bi+cj+dk`` with signs folded into the separators.

    ``compact`` drops zero components (``i-j``, ``0.5k``, ``0``).
    """
    parts = []
    for value, unit in zip(q.components(), ("", "i", "j", "k")):
        if compact and value == 0.0:
            continue
        sign = "-" if value < 0 else "+"
        mag = _fmt(value)
        if compact:
            if mag.endswith(".0"):
                mag = mag[:-2]
            if unit and mag == "1":
                mag = ""
        parts.append((sign, mag + unit))
    if not parts:
        return "0"
    sign, first = parts[0]
    out = ("-" if sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += sign + term
    return out


_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(rf"([+-]?)({_NUMBER})?([ijk]?)")
_UNIT_INDEX = {"": 0, "i": 1, "j": 2, "k": 3}


def parse_quaternion(text: str) -> Quaternion:
    """Parse ``a+bi+cj+dk`` style text; whitespace is ignored.

    Terms may appear in any order, omit a unit coefficient (``i-j``) and
    repeat (repeats are summed).
    """
    s = "".join(text.split())
    if not s:
        raise ValueError("empty quaternion literal")
    comps = [0.0, 0.0, 0.0, 0.0]
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, number, unit = m.groups()
        if m.end() == pos or (number is None and not unit):
            raise ValueError(f"bad quaternion literal {text!r} at offset {pos}")
        if pos > 0 and not sign:
            raise ValueError(f"missing sign before term in {text!r}")
        value = float(number) if number is not None else 1.0
        comps[_UNIT_INDEX[unit]] += -value if sign == "-" else value
        pos = m.end()
    return Quaternion(*comps)
