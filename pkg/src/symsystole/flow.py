"""Reeb flow on gauge boundaries.

The flow integrates ``J0 grad H``, which restricted to ``H^{-1}(1)`` is the Reeb
field of ``lambda0`` (``lambda0(J0 grad H) = H`` by the Euler identity). Off the
level set it is still a Hamiltonian field, so the linearisation is symplectic
and the monodromy matrix is a genuine Floquet matrix.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, OdeSolution
from scipy.optimize import brentq

from .domains import GaugeDomain
from .errors import FlowError
from .symplectic import LinearInvolution, apply_j, as_point, complex_structure

LEVEL_TOL = 1e-8
DEFAULT_TOL = 1e-12


def reeb_field(domain: GaugeDomain, z, check: bool = True) -> np.ndarray:
    """Reeb vector field of ``lambda0`` restricted to ``H^{-1}(1)`` at ``z``.

    Normalised so that ``lambda0(R) = 1`` exactly; on the unit ball this
    generates ``z -> e^{2it} z``.
    """
    z = np.asarray(z, dtype=float)
    if check:
        H = domain.evaluate(z)
        if np.any(np.abs(H - 1.0) > LEVEL_TOL):
            raise FlowError(f"point is off the level set (|H - 1| = {np.max(np.abs(H - 1.0)):.2e})", location=z)
    g = domain.gradient(z)
    euler = 0.5 * np.sum(z * g, axis=-1)
    if np.any(np.linalg.norm(g, axis=-1) == 0):
        raise FlowError("gradient vanishes: not a regular level", location=z)
    return apply_j(g) / np.asarray(euler)[..., None]


@dataclass
class Trajectory:
    """A sampled Reeb trajectory with dense output.

    ``energy_drift`` is the largest ``|H - 1|`` seen before the per-step radial
    projection, i.e. the integrator's own level error; the stored samples are
    projected and sit on the level to rounding.
    """

    times: np.ndarray
    points: np.ndarray
    domain: GaugeDomain = field(repr=False)
    energy_drift: float = 0.0
    dense: OdeSolution | None = field(default=None, repr=False)
    steps: int = 0

    @property
    def domain_label(self) -> str:
        return self.domain.label

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def __call__(self, t) -> np.ndarray:
        """Dense-output evaluation, pushed back onto the level set."""
        if self.dense is None:
            raise FlowError("trajectory was computed without dense output")
        t = np.asarray(t, dtype=float)
        z = self.dense(t)[: 2 * self.domain.n]
        z = np.moveaxis(z, 0, -1)
        return self.domain.project(z)

    def velocity(self, t) -> np.ndarray:
        return reeb_field(self.domain, self(t), check=False)

    def sample_drift(self) -> float:
        return float(np.max(np.abs(self.domain.evaluate(self.points) - 1.0)))

    def to_csv(self, path, times=None) -> None:
        """Write ``t, x1, y1, ..., xn, yn, H_drift`` rows to a path or an open text file."""
        if times is None:
            ts, pts = self.times, self.points
        else:
            ts = np.asarray(times, dtype=float)
            pts = self(ts)
        n = self.domain.n
        header = ["t"] + [f"{c}{j}" for j in range(1, n + 1) for c in ("x", "y")] + ["H_drift"]
        drift = self.domain.evaluate(pts) - 1.0
        if hasattr(path, "write"):
            self._write_rows(path, header, ts, pts, drift)
        else:
            with open(path, "w", newline="") as fh:
                self._write_rows(fh, header, ts, pts, drift)

    @staticmethod
    def _write_rows(fh, header, ts, pts, drift):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, z, d in zip(ts, pts, drift):
            w.writerow([repr(float(t))] + [repr(float(c)) for c in z] + [repr(float(d))])


def _integrate(domain: GaugeDomain, y0, T: float, tol: float, with_stm: bool, dense: bool, max_steps: int):
    n2 = 2 * domain.n
    J = complex_structure(domain.n)

    if with_stm:

        def rhs(t, y):
            z = y[:n2]
            phi = y[n2:].reshape(n2, n2)
            g, hess = domain.gradient_hessian(z)
            dz = apply_j(g)
            dphi = J @ hess @ phi
            return np.concatenate([dz, dphi.ravel()])

    else:

        def rhs(t, y):
            return apply_j(domain.gradient(y))

    ts, ys, interps = [0.0], [np.array(y0, dtype=float)], []
    drift = 0.0
    if T == 0:
        return np.array(ts), np.array(ys), None, drift
    solver = DOP853(rhs, 0.0, y0, T, rtol=tol, atol=tol)
    while solver.status == "running":
        if len(ts) > max_steps:
            raise FlowError(f"step budget exhausted after {max_steps} steps", location=solver.y[:n2].copy(), time=solver.t)
        message = solver.step()
        if solver.status == "failed":
            raise FlowError(f"integration failed: {message}", location=solver.y[:n2].copy(), time=solver.t)
        if dense:
            interps.append(solver.dense_output())
        y = solver.y.copy()
        H = float(domain.evaluate(y[:n2]))
        drift = max(drift, abs(H - 1.0))
        y[:n2] /= np.sqrt(H)
        # restart the next step from the projected state
        solver.y = y
        solver.f = rhs(solver.t, y)
        ts.append(solver.t)
        ys.append(y)
    sol = OdeSolution(np.array(ts), interps) if dense else None
    return np.array(ts), np.array(ys), sol, drift


def flow(domain: GaugeDomain, z0, T: float, tol: float = DEFAULT_TOL, dense: bool = True, max_steps: int = 200_000) -> Trajectory:
    """Integrate the Reeb flow from ``z0`` for time ``T`` (negative ``T`` flows backwards).

    Eighth-order Dormand-Prince steps with a radial projection back onto the
    level set after each accepted step.
    """
    z0 = as_point(z0, domain.n)
    H0 = float(domain.evaluate(z0))
    if abs(H0 - 1.0) > LEVEL_TOL:
        raise FlowError(f"start point is off the level set (|H - 1| = {abs(H0 - 1):.2e})", location=z0)
    z0 = z0 / np.sqrt(H0)
    ts, ys, sol, drift = _integrate(domain, z0, float(T), tol, False, dense, max_steps)
    return Trajectory(ts, ys, domain, drift, sol, len(ts) - 1)


def flow_with_monodromy(domain: GaugeDomain, z0, T: float, tol: float = DEFAULT_TOL, dense: bool = False, max_steps: int = 200_000):
    """Endpoint, monodromy matrix and trajectory of the time-``T`` flow from ``z0``."""
    z0 = as_point(z0, domain.n)
    n2 = 2 * domain.n
    H0 = float(domain.evaluate(z0))
    if abs(H0 - 1.0) > LEVEL_TOL:
        raise FlowError(f"start point is off the level set (|H - 1| = {abs(H0 - 1):.2e})", location=z0)
    y0 = np.concatenate([z0 / np.sqrt(H0), np.eye(n2).ravel()])
    ts, ys, sol, drift = _integrate(domain, y0, float(T), tol, True, dense, max_steps)
    M = ys[-1, n2:].reshape(n2, n2)
    traj = Trajectory(ts, ys[:, :n2], domain, drift, sol, len(ts) - 1)
    return ys[-1, :n2].copy(), M, traj


def monodromy(domain: GaugeDomain, z0, T: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Derivative of the time-``T`` flow at ``z0`` (variational equations)."""
    return flow_with_monodromy(domain, z0, T, tol)[1]


def symplectic_defect(M: np.ndarray) -> float:
    """``max |M^T J0 M - J0|``."""
    J = complex_structure(M.shape[0] // 2)
    return float(np.max(np.abs(M.T @ J @ M - J)))


def reversal_check(domain: GaugeDomain, rho: LinearInvolution, z0, T: float, tol: float = DEFAULT_TOL, samples: int = 64) -> float:
    """``max_t |phi^t(z0) - rho(phi^{-t}(rho z0))|`` over ``t`` in ``[0, T]``."""
    fwd = flow(domain, z0, T, tol)
    bwd = flow(domain, rho(z0), -T, tol)
    ts = np.linspace(0.0, T, samples)
    return float(np.max(np.linalg.norm(fwd(ts) - rho(bwd(-ts)), axis=-1)))


def local_minima(traj: Trajectory, L: np.ndarray, c: np.ndarray, threshold: float, t_min: float = 0.0, subdivide: int = 3, xtol: float = 1e-12):
    """Local minima of ``g(t) = |L gamma(t) - c|`` below ``threshold``.

    Sign changes of ``g'(t) = 2 <L gamma - c, L gamma'>`` are bracketed on the
    step grid (refined by ``subdivide`` dense points per step) and solved with
    Brent's method to ``xtol`` in time. Returns ``[(t, g(t)), ...]`` in time order.
    """
    t = traj.times
    if len(t) < 2:
        return []
    frac = np.linspace(0.0, 1.0, subdivide + 2)[:-1]
    grid = np.concatenate([t[:-1, None] + np.diff(t)[:, None] * frac[None, :]]).ravel()
    grid = np.append(grid, t[-1])
    if traj.duration < 0:
        raise ValueError("minima search needs a forward trajectory")

    def dg(s):
        z = traj(s)
        r = z @ L.T - c
        v = reeb_field(traj.domain, z, check=False) @ L.T
        return np.sum(r * v, axis=-1)

    vals = dg(grid)
    out = []
    for k in range(1, len(grid) - 1):
        if vals[k] < 0.0 <= vals[k + 1] and grid[k + 1] > t_min:
            a, b = grid[k], grid[k + 1]
            ts = brentq(dg, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps) if vals[k + 1] != 0 else b
            gap = float(np.linalg.norm(traj(ts) @ L.T - c))
            if gap < threshold:
                out.append((float(ts), gap))
    return out
