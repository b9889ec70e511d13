"""Adaptive Simpson quadrature for scalar or small-vector integrands."""
from __future__ import annotations

import numpy as np


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50):
    """Integrate ``f`` over ``[a, b]``; ``f`` may return a float or an array.

    Uses the usual Richardson-corrected recursion, splitting until
    ``|S_left + S_right - S| <= 15 * tol`` (max-norm for arrays).
    """
    if a == b:
        fa = np.asarray(f(a), dtype=float)
        return _unwrap(np.zeros_like(fa))
    fa = np.asarray(f(a), dtype=float)
    fb = np.asarray(f(b), dtype=float)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=float)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _unwrap(_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth))


def _recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = np.asarray(f(lm), dtype=float)
    frm = np.asarray(f(rm), dtype=float)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or np.max(np.abs(delta)) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def _unwrap(value):
    return float(value) if np.ndim(value) == 0 else value
