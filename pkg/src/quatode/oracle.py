"""Numeric oracle: the quaternionic IVP as an 8-dimensional real system.

Writing every quaternion as its component vector, ``alpha psi'`` becomes
``left_mul(alpha) @ psi'``, so the second-order quaternionic problem is the
real first-order system

    d/dx [psi, psi'] = [psi', L_alpha psi' + L_beta psi + rho]

integrated here with fixed-step classical RK4.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import IVP
from .errors import NonFiniteState
from .operators import left_mul
from .qexpr import QExpr
from .quaternion import Quaternion

DEFAULT_STEP = 1e-3
CSV_COLUMNS = ("x", "psi0", "psi1", "psi2", "psi3",
               "dpsi0", "dpsi1", "dpsi2", "dpsi3", "residual_norm")


@dataclass(frozen=True)
class RealSystem:
    ivp: IVP

    @property
    def x0(self) -> float:
        return self.ivp.x0

    def initial_state(self) -> np.ndarray:
        return np.concatenate([self.ivp.f.as_array(), self.ivp.g.as_array()])

    def blocks(self, x: float):
        """``(L_alpha(x), L_beta(x), rho(x))`` as arrays."""
        return (left_mul(self.ivp.alpha(x)).m,
                left_mul(self.ivp.beta(x)).m,
                self.ivp.rho(x).as_array())

    def rhs(self, x: float, y: np.ndarray) -> np.ndarray:
        la, lb, rho = self.blocks(x)
        psi, dpsi = y[:4], y[4:]
        return np.concatenate([dpsi, la @ dpsi + lb @ psi + rho])


def to_real_system(ivp: IVP) -> RealSystem:
    return RealSystem(ivp)


@dataclass
class Trajectory:
    xs: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    h: float
    method: str = "rk4"
    residual_norms: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.xs)

    def value(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.psi[n])

    def slope(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.dpsi[n])

    @property
    def final_state(self) -> np.ndarray:
        return np.concatenate([self.psi[-1], self.dpsi[-1]])

    def write_csv(self, path) -> None:
        norms = self.residual_norms
        if norms is None:
            norms = np.full(len(self.xs), np.nan)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for x, p, d, r in zip(self.xs, self.psi, self.dpsi, norms):
                writer.writerow([repr(float(v)) for v in (x, *p, *d, r)])


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {col: np.array([float(r[col]) for r in rows]) for col in CSV_COLUMNS}


def _rk4_step(rhs, x, y, h):
    k1 = rhs(x, y)
    k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(x + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(system: RealSystem, x_end: float, h: float = DEFAULT_STEP,
              y0: np.ndarray | None = None, x_start: float | None = None) -> Trajectory:
    """Fixed-step RK4 from the system's ``x0`` (or ``x_start``) to ``x_end``.

    Steps backwards when ``x_end < x0``; the last step is shortened to land
    exactly on ``x_end``.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h!r}")
    x = system.x0 if x_start is None else float(x_start)
    y = system.initial_state() if y0 is None else np.array(y0, dtype=float)
    length = abs(x_end - x)
    direction = 1.0 if x_end >= x else -1.0
    n_full = int(math.floor(length / h * (1 + 1e-12)))
    steps = [direction * h] * n_full
    rest = length - n_full * h
    if rest > 1e-12 * max(1.0, length):
        steps.append(direction * rest)
    start = x
    xs, ys = [x], [y]
    for n, step in enumerate(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            y = _rk4_step(system.rhs, x, y, step)
        # grid points from the start value, not accumulated sums
        x = x_end if n == len(steps) - 1 else start + direction * h * (n + 1)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"state became non-finite at x = {x!r}")
        xs.append(x)
        ys.append(y)
    arr = np.array(ys)
    return Trajectory(np.array(xs), arr[:, :4].copy(), arr[:, 4:].copy(), h)


def residual(psi: QExpr, ivp: IVP, x: float) -> Quaternion:
    """``psi'' - alpha psi' - beta psi - rho`` at ``x`` with exact derivatives."""
    d1 = psi.derivative()
    d2 = d1.derivative()
    return d2(x) - ivp.alpha(x) * d1(x) - ivp.beta(x) * psi(x) - ivp.rho(x)


def trajectory_residuals(traj: Trajectory, ivp: IVP) -> np.ndarray:
    """Pointwise residual norms, ``psi''`` from finite differences of ``psi'``."""
    if len(traj) < 3:
        return np.zeros(len(traj))
    d2 = np.gradient(traj.dpsi, traj.xs, axis=0, edge_order=2)
    system = to_real_system(ivp)
    out = np.empty(len(traj))
    for n, x in enumerate(traj.xs):
        la, lb, rho = system.blocks(float(x))
        out[n] = np.linalg.norm(d2[n] - la @ traj.dpsi[n] - lb @ traj.psi[n] - rho)
    return out


def solve(ivp: IVP, x_end: float, h: float = DEFAULT_STEP) -> Trajectory:
    """Integrate and attach residual norms."""
    traj = integrate(to_real_system(ivp), x_end, h)
    traj.residual_norms = trajectory_residuals(traj, ivp)
    return traj


def uniqueness_probe(ivp: IVP, x_end: float, h: float = DEFAULT_STEP) -> float:
    """Largest of: ``|y_h(x_end) - y_{h/2}(x_end)|`` and the forward-backward
    round-trip error ``|y(x0 -> x_end -> x0) - y(x0)|`` (max-norm)."""
    system = to_real_system(ivp)
    coarse = integrate(system, x_end, h)
    fine = integrate(system, x_end, 0.5 * h)
    back = integrate(system, system.x0, h, y0=coarse.final_state, x_start=x_end)
    refine_gap = np.max(np.abs(coarse.final_state - fine.final_state))
    trip_gap = np.max(np.abs(back.final_state - system.initial_state()))
    return float(max(refine_gap, trip_gap))
