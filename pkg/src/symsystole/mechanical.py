"""Mechanical Hamiltonians ``H = |p|^2 / 2 + V(q)`` on ``R^2 x R^2`` and their saddle-centers.

Only linearisation data are computed: equilibria, their spectra and the
frequency of the Lyapunov family born at a saddle-center. Points use the
interleaved ordering ``(q1, p1, q2, p2)``, matching the ``(x1, y1, x2, y2)``
convention of the rest of the package, so ``q`` plays the role of ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from .errors import DomainError, SpectrumError
from .symplectic import LinearInvolution

REFLECTION = np.diag([-1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class PolynomialPotential:
    """``V(q1, q2) = sum c * q1^i * q2^j`` given as ``{(i, j): c}``."""

    coeffs: dict

    def __post_init__(self):
        clean = {}
        for key, c in dict(self.coeffs).items():
            i, j = (int(k) for k in key)
            if i < 0 or j < 0:
                raise DomainError("exponents must be non-negative")
            if c != 0:
                clean[(i, j)] = clean.get((i, j), 0.0) + float(c)
        object.__setattr__(self, "coeffs", clean)

    def value(self, q):
        q = np.asarray(q, dtype=float)
        return sum(c * q[..., 0] ** i * q[..., 1] ** j for (i, j), c in self.coeffs.items())

    def gradient(self, q):
        q = np.asarray(q, dtype=float)
        g = np.zeros(q.shape)
        for (i, j), c in self.coeffs.items():
            if i:
                g[..., 0] += c * i * q[..., 0] ** (i - 1) * q[..., 1] ** j
            if j:
                g[..., 1] += c * j * q[..., 0] ** i * q[..., 1] ** (j - 1)
        return g

    def hessian(self, q):
        q = np.asarray(q, dtype=float)
        h = np.zeros(q.shape + (2,))
        for (i, j), c in self.coeffs.items():
            x, y = q[..., 0], q[..., 1]
            if i > 1:
                h[..., 0, 0] += c * i * (i - 1) * x ** (i - 2) * y**j
            if j > 1:
                h[..., 1, 1] += c * j * (j - 1) * x**i * y ** (j - 2)
            if i and j:
                cross = c * i * j * x ** (i - 1) * y ** (j - 1)
                h[..., 0, 1] += cross
                h[..., 1, 0] += cross
        return h

    def is_reflection_invariant(self) -> bool:
        # V(-q1, q2) = V(q1, q2) iff every q1 exponent is even
        return all(i % 2 == 0 for i, _ in self.coeffs)

    def to_dict(self):
        return {"terms": [{"coeff": c, "powers": [i, j]} for (i, j), c in sorted(self.coeffs.items())]}


@dataclass(frozen=True)
class CriticalPoint:
    q: np.ndarray
    value: float
    kind: str  # "minimum", "saddle", "maximum" or "degenerate"
    hessian_eigenvalues: np.ndarray

    @property
    def point(self) -> np.ndarray:
        """Phase-space equilibrium ``(q1, 0, q2, 0)``."""
        return np.array([self.q[0], 0.0, self.q[1], 0.0])


@dataclass
class MechanicalSystem:
    """Mechanical Hamiltonian together with its reflection involution and critical points of ``V``."""

    potential: PolynomialPotential
    involution: LinearInvolution
    critical_points: list = field(default_factory=list)

    def hamiltonian(self, z):
        z = np.asarray(z, dtype=float)
        q = z[..., [0, 2]]
        p = z[..., [1, 3]]
        return 0.5 * np.sum(p * p, axis=-1) + self.potential.value(q)

    def linearization(self, equilibrium) -> np.ndarray:
        """Matrix of the linearised vector field ``q' = p, p' = -Hess V q`` at an equilibrium."""
        z = np.asarray(equilibrium, dtype=float)
        if z.shape != (4,):
            raise DomainError("equilibria are points of R^4 ordered (q1, p1, q2, p2)")
        q = z[[0, 2]]
        if np.linalg.norm(z[[1, 3]]) > 1e-12 or np.linalg.norm(self.potential.gradient(q)) > 1e-9:
            raise SpectrumError("point is not an equilibrium")
        Hv = self.potential.hessian(q)
        A = np.zeros((4, 4))
        A[0, 1] = A[2, 3] = 1.0
        A[np.ix_([1, 3], [0, 2])] = -Hv
        return A

    @property
    def saddles(self):
        return [c for c in self.critical_points if c.kind == "saddle"]


def _classify(eigs, tol=1e-10) -> str:
    if np.any(np.abs(eigs) <= tol * max(1.0, np.max(np.abs(eigs)))):
        return "degenerate"
    if np.all(eigs > 0):
        return "minimum"
    if np.all(eigs < 0):
        return "maximum"
    return "saddle"


def find_critical_points(V: PolynomialPotential, box: float = 3.0, starts: int = 121, tol: float = 1e-12):
    """Critical points of ``V`` in ``[-box, box]^2`` by Newton from a start grid."""
    side = int(math.isqrt(starts))
    grid = np.linspace(-box, box, side)
    found: list[CriticalPoint] = []
    for a in grid:
        for b in grid:
            sol = root(V.gradient, np.array([a, b]), jac=V.hessian, method="hybr", tol=tol)
            q = sol.x
            if not sol.success or np.max(np.abs(q)) > box * (1 + 1e-9) or np.linalg.norm(V.gradient(q)) > 1e-9:
                continue
            q = np.where(np.abs(q) < 1e-13, 0.0, q)
            if any(np.linalg.norm(q - c.q) < 1e-7 for c in found):
                continue
            eigs = np.linalg.eigvalsh(V.hessian(q))
            found.append(CriticalPoint(q, float(V.value(q)), _classify(eigs), eigs))
    found.sort(key=lambda c: (c.value, c.q[0], c.q[1]))
    return found


def mechanical_saddle_center(V, box: float = 3.0, starts: int = 121) -> MechanicalSystem:
    """Build the mechanical system for potential ``V`` and locate its critical points.

    ``V`` is a :class:`PolynomialPotential` or a ``{(i, j): c}`` dict and must be
    even in ``q1``. The involution is ``(q1, q2, p1, p2) -> (-q1, q2, p1, -p2)``.
    """
    if not isinstance(V, PolynomialPotential):
        V = PolynomialPotential(V)
    if not V.is_reflection_invariant():
        raise DomainError("potential must satisfy V(-q1, q2) = V(q1, q2)")
    rho = LinearInvolution.from_matrix(REFLECTION, label="mechanical reflection")
    crit = find_critical_points(V, box, starts)
    system = MechanicalSystem(V, rho, crit)
    if not system.saddles:
        raise DomainError("no saddle of V found in the search box")
    return system


@dataclass(frozen=True)
class LyapunovData:
    omega: float
    period: float
    saddle_rate: float
    eigenvalues: np.ndarray

    def __iter__(self):
        return iter((self.omega, self.period))

    def to_dict(self):
        return {
            "omega": self.omega,
            "period": self.period,
            "saddle_pair": [self.saddle_rate, -self.saddle_rate],
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
        }


def lyapunov_frequency(mech: MechanicalSystem, equilibrium) -> LyapunovData:
    """Frequency ``omega`` and limiting period ``2 pi / omega`` of the Lyapunov family.

    Requires a saddle-center: exactly one real pair ``+-lambda`` and one
    imaginary pair ``+-i omega``. For a mechanical system the spectrum is
    ``+-sqrt(-k)`` over the Hessian eigenvalues ``k`` of ``V``, which is what
    is evaluated; the 4x4 eigensolver is used as a consistency check.
    """
    A = mech.linearization(equilibrium)
    q = np.asarray(equilibrium, dtype=float)[[0, 2]]
    k = np.linalg.eigvalsh(mech.potential.hessian(q))
    scale = max(1.0, float(np.max(np.abs(k))))
    if np.any(np.abs(k) <= 1e-12 * scale):
        raise SpectrumError("degenerate equilibrium: zero eigenvalue in the linearisation")
    neg, pos = k[k < 0], k[k > 0]
    if len(neg) != 1 or len(pos) != 1:
        kind = "center-center" if len(pos) == 2 else "saddle-saddle"
        raise SpectrumError(f"equilibrium is {kind}, not saddle-center")
    lam = math.sqrt(-float(neg[0]))
    omega = math.sqrt(float(pos[0]))
    eig = np.linalg.eigvals(A)
    expected = np.array([lam, -lam, 1j * omega, -1j * omega])
    for e in expected:
        if np.min(np.abs(eig - e)) > 1e-8 * max(1.0, abs(e)):
            raise SpectrumError("eigen-solver disagrees with the Hessian spectrum")
    return LyapunovData(omega, 2.0 * math.pi / omega, lam, eig[np.argsort(-eig.real - eig.imag)])
