import math

import numpy as np
import pytest

from quatode.analytic import IVP, ConstCoeffEq, reduce_order
from quatode.checks import example3_closed_form, example4_closed_particular, example4_forcing
from quatode.errors import NonFiniteState
from quatode.operators import left_mul
from quatode.oracle import (
    CSV_COLUMNS, integrate, read_csv, residual, solve, to_real_system, trajectory_residuals,
    uniqueness_probe,
)
from quatode.qexpr import Exp, Monomial, Prod, sample
from quatode.quaternion import I, J, K, ONE, ZERO, Quaternion, exp_qx

EX1 = (-J, K - ONE)


def test_constant_trajectory():
    ivp = IVP.constant(ZERO, ZERO, ONE, ZERO)
    traj = integrate(to_real_system(ivp), 1.0, 0.1)
    assert np.all(traj.psi == ONE.as_array())
    assert np.all(traj.dpsi == 0.0)
    assert traj.xs[-1] == 1.0


def test_blocks_are_left_mul_matrices():
    a, b = Quaternion(0.1, 2, 3, -1), Quaternion(1, -2, 0.5, 0)
    system = to_real_system(IVP.constant(a, b, ONE, ZERO))
    la, lb, rho = system.blocks(0.3)
    assert np.array_equal(la, left_mul(a).m)
    assert np.array_equal(lb, left_mul(b).m)
    assert np.array_equal(rho, np.zeros(4))


def test_example1_matches_exponential():
    traj = integrate(to_real_system(IVP.constant(*EX1, ONE, -I)), 2.0, 1e-3)
    n = int(np.argmin(np.abs(traj.xs - 1.0)))
    assert traj.xs[n] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(traj.psi[n] - exp_qx(-I, 1.0).as_array())) < 1e-6
    assert np.max(np.abs(traj.psi[-1] - [math.cos(2), -math.sin(2), 0, 0])) < 1e-5


def test_cosine():
    traj = integrate(to_real_system(IVP.constant(ZERO, -ONE, ONE, ZERO)), math.pi, 1e-3)
    assert traj.xs[-1] == math.pi
    assert abs(traj.psi[-1][0] + 1.0) < 1e-8


def test_backward_integration():
    ivp = IVP.constant(*EX1, exp_qx(-I, 1.0), -I * exp_qx(-I, 1.0), x0=1.0)
    traj = integrate(to_real_system(ivp), -0.5, 1e-3)
    assert traj.xs[-1] == -0.5 and np.all(np.diff(traj.xs) < 0)
    assert np.max(np.abs(traj.psi[-1] - exp_qx(-I, -0.5).as_array())) < 1e-9


def test_residual_of_known_solutions():
    ivp1 = IVP.constant(*EX1, ONE, -I)
    for x in np.linspace(0, 2, 11):
        assert abs(residual(Exp(-I), ivp1, x)) < 1e-12
    ivp3 = IVP.constant(-I, -K / 2, ZERO, ONE)
    bad = Prod(Monomial(1), Exp(-(I + J) / 2))
    assert max(abs(residual(bad, ivp3, x)) for x in np.linspace(0, 2, 21)) > 0.1
    assert max(abs(residual(example3_closed_form(), ivp3, x)) for x in np.linspace(0, 2, 21)) < 1e-12
    ivp4 = IVP.constant(*EX1, ZERO, ZERO, rho=example4_forcing())
    for x in np.linspace(0, 2, 11):
        assert abs(residual(example4_closed_particular(), ivp4, x)) < 1e-10


def test_trajectory_residuals_small():
    traj = solve(IVP.constant(*EX1, ONE, -I), 2.0, 1e-3)
    assert traj.residual_norms.shape == (len(traj),)
    assert np.max(traj.residual_norms) < 1e-5


def test_uniqueness_probe():
    assert uniqueness_probe(IVP.constant(*EX1, ZERO, ZERO), 2.0) == 0.0
    assert uniqueness_probe(IVP.constant(*EX1, ONE, -I), 2.0) < 1e-7
    ivp4 = IVP.constant(*EX1, Quaternion(0.3, -1, 2, 0), Quaternion(1, 1, 0, -0.5),
                        rho=example4_forcing())
    assert uniqueness_probe(ivp4, 2.0) < 1e-6


def test_convergence_order():
    system = to_real_system(IVP.constant(-I, -K / 2, ZERO, ONE))
    # the reduction-of-order partner has xi(0) = 0, xi'(0) = 1
    exact = reduce_order(ConstCoeffEq(-I, -K / 2), -(I + J) / 2)
    errs = []
    for h in (0.2, 0.1, 0.05):
        traj = integrate(system, 2.0, h)
        errs.append(np.max(np.abs(traj.psi - sample(exact, traj.xs))))
    orders = [math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])]
    assert all(3.7 <= p <= 4.3 for p in orders), orders


def test_non_finite_state():
    ivp = IVP.constant(Quaternion(1000, 0, 0, 0), ZERO, ONE, ONE)
    with pytest.raises(NonFiniteState):
        integrate(to_real_system(ivp), 20.0, 0.5)


def test_bad_step():
    with pytest.raises(ValueError):
        integrate(to_real_system(IVP.constant(*EX1, ONE, ZERO)), 1.0, 0.0)


def test_csv_round_trip(tmp_path):
    traj = solve(IVP.constant(*EX1, ONE, -I), 0.5, 0.01)
    path = tmp_path / "t.csv"
    traj.write_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    data = read_csv(path)
    assert np.array_equal(data["x"], traj.xs)
    assert np.array_equal(data["psi1"], traj.psi[:, 1])
    assert np.array_equal(data["dpsi0"], traj.dpsi[:, 0])
    assert np.array_equal(data["residual_norm"], traj.residual_norms)


def test_short_trajectory_residuals():
    traj = integrate(to_real_system(IVP.constant(*EX1, ONE, ZERO)), 0.1, 0.1)
    assert len(traj) == 2
    assert np.all(trajectory_residuals(traj, IVP.constant(*EX1, ONE, ZERO)) == 0)
