import math

import numpy as np
import pytest
import sympy as sp

from symsystole.errors import DomainError, SpectrumError
from symsystole.mechanical import (
    MechanicalSystem,
    PolynomialPotential,
    find_critical_points,
    lyapunov_frequency,
    mechanical_saddle_center,
)
from symsystole.symplectic import complex_structure

SADDLE = {(0, 2): 0.5, (2, 0): -0.5}
# double well in q1 with a transverse well whose stiffness depends on q1
DOUBLE_WELL = {(2, 0): -0.5, (4, 0): 0.25, (0, 2): 1.5, (2, 2): 0.5}


def test_quadratic_saddle_center_is_exact():
    mech = mechanical_saddle_center(SADDLE)
    data = lyapunov_frequency(mech, np.zeros(4))
    assert data.omega == 1.0
    assert data.period == 2 * math.pi
    assert data.saddle_rate == 1.0
    assert sorted(data.to_dict()["saddle_pair"]) == [-1.0, 1.0]


def test_scaled_saddle_center():
    mech = mechanical_saddle_center({(0, 2): 2.0, (2, 0): -0.5})
    omega, period = lyapunov_frequency(mech, np.zeros(4))
    assert omega == pytest.approx(2.0, abs=1e-15)
    assert period == pytest.approx(math.pi, abs=1e-15)


def test_center_center_rejected():
    mech = MechanicalSystem(PolynomialPotential({(2, 0): 0.5, (0, 2): 0.5}), mechanical_saddle_center(SADDLE).involution)
    with pytest.raises(SpectrumError, match="center-center"):
        lyapunov_frequency(mech, np.zeros(4))


def test_saddle_saddle_rejected():
    mech = MechanicalSystem(PolynomialPotential({(2, 0): -0.5, (0, 2): -0.5}), mechanical_saddle_center(SADDLE).involution)
    with pytest.raises(SpectrumError, match="saddle-saddle"):
        lyapunov_frequency(mech, np.zeros(4))


def test_non_equilibrium_rejected():
    mech = mechanical_saddle_center(DOUBLE_WELL)
    with pytest.raises(SpectrumError):
        lyapunov_frequency(mech, np.array([0.5, 0.0, 0.0, 0.0]))


def test_odd_potential_rejected():
    with pytest.raises(DomainError):
        mechanical_saddle_center({(1, 0): 1.0, (0, 2): 1.0})


def test_double_well_critical_points():
    crit = find_critical_points(PolynomialPotential(DOUBLE_WELL))
    kinds = {(round(c.q[0], 9), round(c.q[1], 9)): c.kind for c in crit}
    assert kinds == {(-1.0, 0.0): "minimum", (1.0, 0.0): "minimum", (0.0, 0.0): "saddle"}


def test_double_well_spectrum_against_symbolic_oracle():
    mech = mechanical_saddle_center(DOUBLE_WELL)
    (saddle,) = mech.saddles
    data = lyapunov_frequency(mech, saddle.point)
    q1, q2, p1, p2 = sp.symbols("q1 q2 p1 p2")
    V = sum(c * q1**i * q2**j for (i, j), c in DOUBLE_WELL.items())
    H = (p1**2 + p2**2) / 2 + V
    z = [q1, p1, q2, p2]
    field = [sp.diff(H, p1), -sp.diff(H, q1), sp.diff(H, p2), -sp.diff(H, q2)]
    A = sp.Matrix(field).jacobian(z).subs({q1: 0, q2: 0, p1: 0, p2: 0})
    eigs = [complex(e) for e in A.eigenvals()]
    imag = max(e.imag for e in eigs)
    real = max(e.real for e in eigs)
    assert data.omega == pytest.approx(imag, abs=1e-12)
    assert data.saddle_rate == pytest.approx(real, abs=1e-12)
    assert data.period == pytest.approx(2 * math.pi / imag, abs=1e-12)


def test_linearization_is_hamiltonian():
    mech = mechanical_saddle_center(DOUBLE_WELL)
    A = mech.linearization(np.zeros(4))
    # J0 A must be symmetric for a Hamiltonian vector field (up to the sign convention)
    J = complex_structure(2)
    assert np.allclose(J @ A, (J @ A).T)


def test_involution_reverses_flow():
    mech = mechanical_saddle_center(DOUBLE_WELL)
    rho = mech.involution
    z = np.array([0.3, -0.2, 0.7, 0.4])
    assert mech.hamiltonian(rho(z)) == pytest.approx(mech.hamiltonian(z))
    A = mech.linearization(np.zeros(4))
    assert np.allclose(rho.matrix @ A @ rho.matrix, -A)
