"""Linear symplectic algebra on R^{2n}.

Points are plain 1-D numpy arrays ordered ``(x1, y1, ..., xn, yn)``. The
standard complex structure acts on each ``(x, y)`` pair as multiplication by
``i``, i.e. ``(x, y) -> (-y, x)``, and the symplectic form is
``omega0 = sum_j dx_j ^ dy_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ClosureError, ConstructionError, DimensionError, InvolutionError

INVOLUTION_TOL = 1e-12
EIGEN_CLUSTER_TOL = 1e-9


def as_point(z, n: int | None = None) -> np.ndarray:
    """Coerce ``z`` to a float vector of even length (and length ``2n`` if given)."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size % 2:
        raise DimensionError(f"expected a vector of even length, got shape {z.shape}")
    if n is not None and z.size != 2 * n:
        raise DimensionError(f"expected length {2 * n}, got {z.size}")
    return z


def half_dim(z) -> int:
    return np.shape(z)[-1] // 2


def complex_structure(n: int) -> np.ndarray:
    """Matrix of J0 (multiplication by i on each coordinate pair)."""
    return np.kron(np.eye(n), np.array([[0.0, -1.0], [1.0, 0.0]]))


def symplectic_matrix(n: int) -> np.ndarray:
    """Matrix ``W`` with ``omega0(u, v) = u @ W @ v``."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def apply_j(v: np.ndarray) -> np.ndarray:
    """J0 applied along the last axis (works on stacks of points)."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0::2] = -v[..., 1::2]
    out[..., 1::2] = v[..., 0::2]
    return out


def _check_pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1] or u.shape[-1] % 2:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return u, v


def symplectic_form(u, v) -> float:
    """``omega0(u, v) = sum_j (u_xj v_yj - u_yj v_xj)``."""
    u, v = _check_pair(u, v)
    return np.sum(u[..., 0::2] * v[..., 1::2] - u[..., 1::2] * v[..., 0::2], axis=-1)


def liouville_eval(z, v) -> float:
    """Standard Liouville form ``lambda0`` at ``z`` applied to ``v``."""
    return 0.5 * symplectic_form(z, v)


@dataclass(frozen=True)
class LinearInvolution:
    """A linear anti-symplectic involution of R^{2n}.

    Build through :meth:`from_matrix` (or :func:`make_involution_theta`), which
    checks ``A @ A == I`` and ``A.T @ J0 @ A == -J0`` and computes an
    orthonormal basis of the fixed Lagrangian subspace.

    Attributes:
        matrix: the ``2n x 2n`` matrix.
        fixed_basis: ``(2n, n)`` array whose columns are an orthonormal basis of
            ``Fix(rho)``.
        normal_basis: ``(2n, n)`` orthonormal basis of the Euclidean orthogonal
            complement of ``Fix(rho)``.
    """

    matrix: np.ndarray
    fixed_basis: np.ndarray
    normal_basis: np.ndarray = field(repr=False)
    label: str = ""

    @classmethod
    def from_matrix(cls, matrix, label: str = "", tol: float = INVOLUTION_TOL):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise DimensionError(f"involution must be 2n x 2n, got {A.shape}")
        n = A.shape[0] // 2
        eye = np.eye(2 * n)
        scale = max(1.0, np.abs(A).max())
        if np.abs(A @ A - eye).max() > tol * scale**2:
            raise InvolutionError("matrix does not square to the identity")
        J = complex_structure(n)
        if np.abs(A.T @ J @ A + J).max() > tol * scale**2:
            raise InvolutionError("matrix is not anti-symplectic")
        fixed = _eigenspace(A, 1.0)
        if fixed.shape[1] != n:
            raise InvolutionError(f"fixed subspace has dimension {fixed.shape[1]}, expected {n}")
        W = symplectic_matrix(n)
        if np.abs(fixed.T @ W @ fixed).max() > 1e-10:
            raise InvolutionError("fixed subspace is not Lagrangian")
        # orthogonal complement of Fix, from the full SVD of the fixed basis
        u, _, _ = np.linalg.svd(fixed, full_matrices=True)
        normal = u[:, n:]
        A.setflags(write=False)
        fixed.setflags(write=False)
        normal.setflags(write=False)
        return cls(A, fixed, normal, label)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    def __call__(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) @ self.matrix.T

    def fixed_projection(self, z) -> np.ndarray:
        """Euclidean orthogonal projection onto ``Fix(rho)``."""
        B = self.fixed_basis
        return (np.asarray(z, dtype=float) @ B) @ B.T

    def distance_to_fixed(self, z) -> np.ndarray:
        """Euclidean distance of ``z`` to ``Fix(rho)`` (vectorised over leading axes)."""
        return np.linalg.norm(np.asarray(z, dtype=float) @ self.normal_basis, axis=-1)

    def to_dict(self) -> dict:
        return {"label": self.label, "matrix": self.matrix.tolist()}


def _eigenspace(A: np.ndarray, eigenvalue: float) -> np.ndarray:
    """Orthonormal basis of the real eigenspace of ``A`` for ``eigenvalue``."""
    vals, vecs = np.linalg.eig(A)
    mask = np.abs(vals - eigenvalue) < EIGEN_CLUSTER_TOL
    if not mask.any():
        return np.zeros((A.shape[0], 0))
    sub = vecs[:, mask]
    # eigenvectors of a real eigenvalue may come back with complex phases
    stacked = np.hstack([sub.real, sub.imag])
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > EIGEN_CLUSTER_TOL * max(1.0, s[0])))
    return u[:, :rank]


def complex_conjugation(n: int) -> LinearInvolution:
    """``rho0(x1, y1, ..., xn, yn) = (x1, -y1, ..., xn, -yn)``."""
    return make_involution_theta(np.zeros(n))


def make_involution_theta(theta) -> LinearInvolution:
    """The involution ``z -> (e^{i theta_1} conj(z_1), ..., e^{i theta_n} conj(z_n))``.

    On each coordinate pair this is the reflection across the line at angle
    ``theta_j / 2``.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.ndim != 1 or theta.size < 1:
        raise DimensionError("theta must be a non-empty vector of angles")
    blocks = [np.array([[np.cos(t), np.sin(t)], [np.sin(t), -np.cos(t)]]) for t in theta]
    n = theta.size
    A = np.zeros((2 * n, 2 * n))
    for j, b in enumerate(blocks):
        A[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = b
    label = "rho0" if np.all(theta == 0) else "rho_theta(" + ",".join(f"{t:.6g}" for t in theta) + ")"
    return LinearInvolution.from_matrix(A, label=label)


def averaged_liouville_eval(z, v, rho: LinearInvolution) -> float:
    """The averaged primitive ``1/2 (lambda0 - rho^* lambda0)`` at ``z`` applied to ``v``."""
    z, v = _check_pair(z, v)
    if z.shape[-1] != rho.matrix.shape[0]:
        raise DimensionError("involution and point dimensions differ")
    return 0.5 * (liouville_eval(z, v) - liouville_eval(rho(z), rho(v)))


@dataclass(frozen=True)
class LoopSamples:
    """Samples of a closed curve: ``points[k]`` at flow time ``times[k]``.

    The first and last samples are expected to coincide; :func:`loop_action`
    enforces this.
    """

    points: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ts = np.asarray(self.times, dtype=float)
        if pts.ndim != 2 or pts.shape[1] % 2 or ts.shape != (pts.shape[0],):
            raise DimensionError("points must be (m, 2n) and times (m,)")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", ts)

    @property
    def closure_gap(self) -> float:
        return float(np.linalg.norm(self.points[-1] - self.points[0]))

    def reversed(self) -> "LoopSamples":
        t = self.times
        return LoopSamples(self.points[::-1].copy(), (t[-1] + t[0]) - t[::-1])


def loop_action(loop: LoopSamples, rho: LinearInvolution | None = None, closure_tol: float = 1e-6) -> float:
    """Action ``int gamma^* lambda`` of a closed sampled loop.

    The velocity comes from a periodic cubic spline through the samples and the
    integral from the composite trapezoid rule. ``rho`` switches the primitive to
    the averaged form; for a closed loop the value does not change.
    """
    gap = loop.closure_gap
    if gap > closure_tol:
        raise ClosureError(f"loop not closed: gap {gap:.3e} > {closure_tol:.1e}", gap)
    pts = loop.points.copy()
    pts[-1] = pts[0]
    spline = CubicSpline(loop.times, pts, bc_type="periodic", axis=0)
    vel = spline(loop.times, 1)
    if rho is None:
        integrand = liouville_eval(pts, vel)
    else:
        integrand = averaged_liouville_eval(pts, vel, rho)
    return float(np.trapezoid(integrand, loop.times))


def gram_schmidt_unitary(v1, rho: LinearInvolution, tol: float = 1e-9) -> np.ndarray:
    """Unitary basis adapted to a symplectic plane and its image under ``rho``.

    Returns a ``(2n, 2n)`` array whose rows are
    ``v1', J v1', v2', J v2', ..., vn', J vn'`` with ``v1'`` the normalisation of
    ``v1``, ``v2'`` proportional to the part of ``rho(v1')`` symplectically
    orthogonal to ``V = span(v1, J v1)``, and the remaining pairs a unitary
    basis of the complement, taken from ``Fix(rho)`` when that complement is
    ``rho``-invariant.
    """
    v1 = as_point(v1)
    n = half_dim(v1)
    if rho.n != n:
        raise DimensionError("involution and vector dimensions differ")
    if n < 2:
        raise ConstructionError("need n >= 2 for two disjoint symplectic planes")
    norm = np.linalg.norm(v1)
    if norm < tol:
        raise ConstructionError("v1 is zero, span(v1, J v1) is not symplectic")
    e1 = v1 / norm
    V = np.column_stack([e1, apply_j(e1)])
    both = np.column_stack([V, rho.matrix @ V])
    s = np.linalg.svd(both, compute_uv=False)
    if s[-1] < tol:
        raise ConstructionError("rho(V) meets V nontrivially")

    basis: list[np.ndarray] = [e1, apply_j(e1)]

    def _orth(u):
        for b in basis:
            u = u - (b @ u) * b
        return u

    e2 = _orth(rho(e1))
    e2 /= np.linalg.norm(e2)
    basis += [e2, apply_j(e2)]

    # complement W; prefer rho-fixed vectors so the frame is rho-adapted
    P = np.column_stack(basis)
    W_proj = np.eye(2 * n) - P @ P.T
    invariant = np.abs(rho.matrix @ W_proj - W_proj @ rho.matrix).max() < 1e-9
    candidates = list(rho.fixed_basis.T) if invariant else []
    candidates += list(np.eye(2 * n))
    for c in candidates:
        if len(basis) == 2 * n:
            break
        u = _orth(W_proj @ c)
        u = _orth(u)
        nu = np.linalg.norm(u)
        if nu > 1e-6:
            u /= nu
            basis += [u, apply_j(u)]
    out = np.array(basis)
    if out.shape != (2 * n, 2 * n):
        raise ConstructionError("could not complete the unitary basis")
    return out


def pairing_table(vectors) -> np.ndarray:
    """All pairings ``omega0(b_i, b_j)`` of the rows of ``vectors``."""
    B = np.asarray(vectors, dtype=float)
    return B @ symplectic_matrix(B.shape[1] // 2) @ B.T
