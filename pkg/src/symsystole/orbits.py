"""Closed Reeb orbits, symmetric orbits, systoles and the symmetric ratio.

Symmetric orbits are produced by chord shooting: launch the flow from the
fixed locus of the involution, detect returns to it, correct the launch point
and time by Newton's method, and double the chord with its reflected
time-reversal. General orbits come from a multi-start search that funnels near
recurrences into a Newton solver on the closure map.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .domains import GaugeDomain, SymmetricDomain, ball_sandwich, boundary_samples, convexity_check
from .errors import ConvergenceError, FlowError, SymmetryDiagnosticError
from .flow import DEFAULT_TOL, Trajectory, flow, flow_with_monodromy, local_minima, reeb_field
from .symplectic import LinearInvolution, LoopSamples, loop_action


@dataclass
class SearchConfig:
    """Knobs for orbit searches.

    ``ceiling`` defaults to three times ``pi r_out^2`` and ``seeds`` to ``64 n``;
    chords are searched up to ``chord_ceiling`` (default half the ceiling).
    ``basin`` is the largest near-recurrence gap (relative to the inner
    radius) handed to Newton. Newton residuals are integrated at ``tol``,
    its Jacobians (monodromy) at the looser ``jac_tol``.
    """

    ceiling: float | None = None
    chord_ceiling: float | None = None
    seeds: int | None = None
    rng_seed: int = 0
    tol: float = DEFAULT_TOL
    residual_tol: float = 1e-9
    jac_tol: float = 1e-9
    basin: float = 0.35
    max_newton: int = 12
    attempts: int = 2
    dedup_tol: float = 1e-5
    symmetry_tol: float = 1e-6
    structured: bool = True
    jobs: int = 1
    chord_margin: float = 0.02

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class Chord:
    """Reeb trajectory from ``Fix(rho)`` back to ``Fix(rho)``."""

    start: np.ndarray
    end: np.ndarray
    duration: float
    residual: float
    degenerate: bool = False
    newton_log: list = field(default_factory=list)

    def to_dict(self):
        return {
            "start": self.start.tolist(),
            "end": self.end.tolist(),
            "duration": self.duration,
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


@dataclass
class ClosedOrbit:
    """A numerically closed Reeb orbit.

    ``symmetric`` is ``None`` when no involution was consulted.
    ``degenerate`` marks a Morse-Bott situation (closure Jacobian rank
    deficient), in which case the orbit was accepted on its residual alone.
    """

    base_point: np.ndarray
    period: float
    action: float
    closure_residual: float
    trajectory: Trajectory = field(repr=False)
    symmetric: bool | None = None
    witness: np.ndarray | None = None
    degenerate: bool = False
    source: str = "newton"
    newton_log: list = field(default_factory=list)

    def to_dict(self):
        return {
            "base_point": self.base_point.tolist(),
            "period": self.period,
            "action": self.action,
            "closure_residual": self.closure_residual,
            "symmetric": self.symmetric,
            "witness": None if self.witness is None else self.witness.tolist(),
            "degenerate": self.degenerate,
            "source": self.source,
            "energy_drift": self.trajectory.energy_drift,
        }

    def samples(self, count: int = 256) -> np.ndarray:
        ts = np.linspace(0.0, self.period, count, endpoint=False)
        return self.trajectory(ts)


def _regularized_solve(A: np.ndarray, b: np.ndarray, mu: float = 1e-12):
    """Tikhonov-regularised least squares; also returns the singular values."""
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    x = Vt.T @ ((s / (s**2 + mu)) * (U.T @ b))
    return x, s


def _is_degenerate(s: np.ndarray, expected_rank: int, rel: float = 1e-7) -> bool:
    return bool(s.size < expected_rank or s[expected_rank - 1] < rel * s[0])


def _orbit_from(domain: GaugeDomain, z: np.ndarray, T: float, config: SearchConfig, rho=None, **kw) -> ClosedOrbit:
    traj = flow(domain, z, T, config.tol)
    closure = float(np.linalg.norm(traj.end - traj.start))
    m = max(512, 8 * traj.steps)
    ts = np.linspace(0.0, T, m + 1)
    pts = traj(ts)
    pts[-1] = pts[0] if closure <= 1e-6 else pts[-1]
    action = loop_action(LoopSamples(pts, ts), closure_tol=max(1e-6, 2 * closure))
    orbit = ClosedOrbit(traj.start.copy(), float(T), action, closure, traj, **kw)
    if rho is not None:
        orbit.symmetric, orbit.witness = is_symmetric_orbit(orbit, rho, config.symmetry_tol)
    return orbit


def _prime_period(traj_fn, z: np.ndarray, T: float, tol: float = 1e-7, kmax: int = 8) -> int:
    """Largest ``k`` such that the orbit of period ``T`` already closes at ``T / k``."""
    best = 1
    for k in range(2, kmax + 1):
        if np.linalg.norm(traj_fn(T / k) - z) < tol:
            best = k
    return best


def newton_refine_orbit(domain: GaugeDomain, z_guess, T_guess: float, tol: float = 1e-9, config: SearchConfig | None = None, rho=None) -> ClosedOrbit:
    """Newton iteration on ``(z, T) -> phi^T(z) - z`` with level and phase conditions.

    The update solves, in the Tikhonov-regularised least-squares sense,
    ``(M - I) dz + R(phi^T z) dT = -(phi^T z - z)``, ``<grad H, dz> = 1 - H`` and
    ``<R(z), dz> = 0``. Morse-Bott families make the system rank deficient; the
    iterate is then accepted on its residual and flagged ``degenerate``.
    """
    config = config or SearchConfig()
    z = domain.project(np.asarray(z_guess, dtype=float))
    T = float(T_guess)
    n2 = 2 * domain.n
    history: list[float] = []
    polish = False
    for _ in range(config.max_newton + 1):
        zT = flow(domain, z, T, config.tol, dense=False).end
        M = flow_with_monodromy(domain, z, T, config.jac_tol)[1]
        r = zT - z
        res = float(np.linalg.norm(r))
        history.append(res)
        Rz = reeb_field(domain, z, check=False)
        RT = reeb_field(domain, zT, check=False)
        A = np.zeros((n2 + 2, n2 + 1))
        A[:n2, :n2] = M - np.eye(n2)
        A[:n2, n2] = RT
        A[n2, :n2] = domain.gradient(z)
        A[n2 + 1, :n2] = Rz
        b = -np.concatenate([r, [domain.evaluate(z) - 1.0, 0.0]])
        step, s = _regularized_solve(A, b)
        degenerate = _is_degenerate(s, n2 + 1)
        if res <= tol and (polish or degenerate or res <= 50 * config.tol):
            break
        if res <= tol:
            polish = True
        if not np.all(np.isfinite(step)):
            raise ConvergenceError("non-finite Newton step", history)
        dz, dT = step[:n2], step[n2]
        scale = max(1.0, np.linalg.norm(dz) / 0.25, abs(dT) / (0.25 * T))
        z = domain.project(z + dz / scale)
        T = T + dT / scale
        if T <= 0:
            raise ConvergenceError("period became non-positive", history)
        if len(history) > 3 and res > 10 * history[0]:
            raise ConvergenceError("Newton iteration is diverging", history)
        if len(history) > 4 and res > 0.5 * history[-3]:
            raise ConvergenceError("Newton iteration stagnates", history)
    else:
        raise ConvergenceError(f"no convergence in {config.max_newton} iterations (residual {history[-1]:.2e})", history)

    traj = flow(domain, z, T, config.tol)
    k = _prime_period(traj, z, T)
    if k > 1:
        T = T / k
    orbit = _orbit_from(domain, z, T, config, rho=rho, degenerate=degenerate, newton_log=history)
    if orbit.closure_residual > max(tol, 10 * config.tol):
        raise ConvergenceError(f"closure residual {orbit.closure_residual:.2e} above tolerance", history)
    return orbit


def is_symmetric_orbit(orbit: ClosedOrbit, rho: LinearInvolution, tol: float = 1e-6, samples: int = 512):
    """Decide whether ``orbit`` is ``rho``-symmetric.

    Two tests are run: the minimal distance of the orbit to ``Fix(rho)``, and
    the distance of ``rho`` applied to orbit points from the orbit's image. They
    must agree; returns ``(symmetric, witness)`` where the witness is the orbit
    point closest to the fixed locus (``None`` if not symmetric).
    """
    T = orbit.period
    ts = np.linspace(0.0, T, samples, endpoint=False)
    pts = orbit.trajectory(ts)
    dfix = rho.distance_to_fixed(pts)
    k = int(np.argmin(dfix))
    h = T / samples
    res = minimize_scalar(
        lambda t: float(rho.distance_to_fixed(orbit.trajectory(t % T))),
        bounds=(ts[k] - h, ts[k] + h),
        method="bounded",
        options={"xatol": 1e-13},
    )
    d_fix = min(float(res.fun), float(dfix[k]))
    t_fix = float(res.x) % T if res.fun <= dfix[k] else float(ts[k])

    def image_distance(q):
        d = np.linalg.norm(pts - q, axis=-1)
        j = int(np.argmin(d))
        lo, hi = ts[j] - h, ts[j] + h
        r = minimize_scalar(lambda t: float(np.linalg.norm(orbit.trajectory(t % T) - q)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        return min(float(r.fun), float(d[j]))

    probes = pts[:: max(1, samples // 4)]
    d_inv = max(image_distance(rho(q)) for q in probes)

    fix_sym = d_fix <= tol
    inv_sym = d_inv <= tol
    if fix_sym != inv_sym and max(min(d_fix, d_inv) * 100, tol * 100) < max(d_fix, d_inv):
        raise SymmetryDiagnosticError(
            f"symmetry tests disagree: distance to Fix {d_fix:.2e}, invariance defect {d_inv:.2e}"
        )
    symmetric = fix_sym
    witness = orbit.trajectory(t_fix) if symmetric else None
    return symmetric, witness


def _same_orbit(a: ClosedOrbit, b: ClosedOrbit, tol: float) -> bool:
    if abs(a.period - b.period) > 1e-6 * max(a.period, b.period):
        return False
    T = a.period
    m = 256
    ts = np.linspace(0.0, T, m, endpoint=False)
    pa = a.samples(m)
    d = np.linalg.norm(pa - b.base_point, axis=-1)
    j = int(np.argmin(d))
    if d[j] > 0.1:
        return False
    h = T / m
    res = minimize_scalar(lambda t: float(np.linalg.norm(a.trajectory(t % T) - b.base_point)), bounds=(ts[j] - h, ts[j] + h), method="bounded", options={"xatol": 1e-13})
    shift = float(res.x)
    probe = np.linspace(0.0, T, 64, endpoint=False)
    gap = np.linalg.norm(a.trajectory((probe + shift) % T) - b.trajectory(probe), axis=-1)
    return bool(np.max(gap) <= tol)


def deduplicate(orbits: list[ClosedOrbit], tol: float = 1e-5) -> list[ClosedOrbit]:
    """Drop orbits that coincide (same period, same image after time-shift alignment)."""
    kept: list[ClosedOrbit] = []
    for o in sorted(orbits, key=lambda o: (o.period, tuple(np.round(o.base_point, 12)))):
        if not any(_same_orbit(k, o, tol) for k in kept):
            kept.append(o)
    return kept


def _resolve(domain: GaugeDomain, config: SearchConfig):
    ceiling = config.ceiling
    r_in, r_out = ball_sandwich(domain, samples=1024, seed=config.rng_seed)
    if ceiling is None:
        ceiling = 3.0 * math.pi * r_out**2
    seeds = config.seeds if config.seeds is not None else 64 * domain.n
    return ceiling, seeds, r_in


def _orbit_seed_task(args):
    domain, seed, ceiling, basin, config, rho = args
    try:
        traj = flow(domain, seed, ceiling, config.tol)
    except FlowError:
        return None, 0
    cands = local_minima(traj, np.eye(2 * domain.n), seed, basin)
    for t, _gap in cands[: config.attempts]:
        try:
            return newton_refine_orbit(domain, seed, t, config.residual_tol, config, rho=rho), len(cands)
        except (ConvergenceError, FlowError):
            continue
    return None, len(cands)


def _map(fn, tasks, jobs: int):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def find_periodic_orbits(domain: GaugeDomain, config: SearchConfig | None = None, rho: LinearInvolution | None = None, extra_seeds=None):
    """Multi-start search for closed orbits with period below the ceiling.

    Seeds are low-discrepancy boundary points plus the domain's structured
    seeds. Each seed is flowed to the ceiling, its near recurrences are handed
    to :func:`newton_refine_orbit` in time order, and the first one that
    converges is kept. Returns ``(orbits, coverage)``.
    """
    config = config or SearchConfig()
    ceiling, count, r_in = _resolve(domain, config)
    seeds = boundary_samples(domain, count, config.rng_seed)
    if config.structured:
        seeds = np.vstack([domain.structured_seeds(), seeds])
    if extra_seeds is not None and len(extra_seeds):
        seeds = np.vstack([np.atleast_2d(extra_seeds), seeds])
    basin = config.basin * r_in
    tasks = [(domain, s, ceiling, basin, config, rho) for s in seeds]
    results = _map(_orbit_seed_task, tasks, config.jobs)
    found = [o for o, _ in results if o is not None and o.period <= ceiling * (1 + 1e-12)]
    orbits = deduplicate(found, config.dedup_tol)
    coverage = {
        "seeds_attempted": int(len(seeds)),
        "seeds_with_recurrence": int(sum(1 for _, c in results if c)),
        "seeds_converged": int(len(found)),
        "distinct_orbits": int(len(orbits)),
        "period_ceiling": float(ceiling),
    }
    return orbits, coverage


# --------------------------------------------------------------------------
# chords


def _chord_candidates(domain: GaugeDomain, rho: LinearInvolution, seed, t_max: float, basin: float, tol: float):
    traj = flow(domain, seed, t_max, tol)
    N = rho.normal_basis
    return [(t, g) for t, g in local_minima(traj, N.T, np.zeros(N.shape[1]), basin)]


def refine_chord(domain: GaugeDomain, rho: LinearInvolution, seed, T_guess: float, tol: float = 1e-10, config: SearchConfig | None = None) -> Chord:
    """Newton correction of a near-chord launched from ``Fix(rho)``.

    Unknowns are the launch point (coordinates in the fixed subspace) and the
    duration; equations are the normal components of the end point and the
    level condition.
    """
    config = config or SearchConfig()
    B, N = rho.fixed_basis, rho.normal_basis
    n = rho.n
    a = B.T @ domain.project(np.asarray(seed, dtype=float))
    T = float(T_guess)
    history = []
    degenerate = False
    for _ in range(config.max_newton + 1):
        zs = B @ a
        zT = flow(domain, zs, T, config.tol, dense=False).end
        M = flow_with_monodromy(domain, zs, T, config.jac_tol)[1]
        r = N.T @ zT
        res = float(np.linalg.norm(r))
        history.append(res)
        A = np.zeros((n + 1, n + 1))
        A[:n, :n] = N.T @ M @ B
        A[:n, n] = N.T @ reeb_field(domain, zT, check=False)
        A[n, :n] = domain.gradient(zs) @ B
        rhs = -np.concatenate([r, [domain.evaluate(zs) - 1.0]])
        step, s = _regularized_solve(A, rhs)
        degenerate = _is_degenerate(s, n + 1)
        if res <= tol:
            break
        scale = max(1.0, np.linalg.norm(step[:n]) / 0.25, abs(step[n]) / (0.25 * T))
        a = a + step[:n] / scale
        a = a / math.sqrt(float(domain.evaluate(B @ a)))
        T = T + step[n] / scale
        if T <= 0:
            raise ConvergenceError("chord duration became non-positive", history)
        if len(history) > 3 and res > 10 * history[0]:
            raise ConvergenceError("chord Newton iteration is diverging", history)
    else:
        raise ConvergenceError(f"chord did not converge (residual {history[-1]:.2e})", history)
    zs = B @ a
    return Chord(zs, zT, T, res, degenerate, history)


def chord_shoot(sdomain: SymmetricDomain, seed, t_max: float, tol: float = 1e-10, config: SearchConfig | None = None) -> list[Chord]:
    """All chords found from one fixed-locus seed within ``t_max``, sorted by duration.

    Each return of the flow close to ``Fix(rho)`` is corrected with
    :func:`refine_chord`; the corrected launch point may move along the fixed
    locus.
    """
    config = config or SearchConfig()
    domain, rho = sdomain.domain, sdomain.involution
    seed = np.asarray(seed, dtype=float)
    if abs(float(domain.evaluate(seed)) - 1.0) > 1e-8 or rho.distance_to_fixed(seed) > 1e-8:
        raise ValueError("seed must lie on Fix(rho) and on the boundary")
    r_in = float(np.min(domain.radial_extent(rho.fixed_basis.T)))
    cands = _chord_candidates(domain, rho, seed, t_max, config.basin * r_in, config.tol)
    chords = []
    for t, _ in cands:
        try:
            c = refine_chord(domain, rho, seed, t, tol, config)
        except (ConvergenceError, FlowError):
            continue
        if c.duration <= t_max * (1 + 1e-9) and not any(
            abs(c.duration - d.duration) < 1e-8 and np.linalg.norm(c.start - d.start) < 1e-6 for d in chords
        ):
            chords.append(c)
    return sorted(chords, key=lambda c: c.duration)


def close_chord(chord: Chord, sdomain: SymmetricDomain, config: SearchConfig | None = None) -> ClosedOrbit:
    """Double a chord with its reflected time-reversal into a symmetric orbit.

    The period is exactly twice the chord duration. The closed orbit is
    re-integrated over the full period and its closure residual checked; the
    reflected half is compared against the integrated one as well.
    """
    config = config or SearchConfig()
    domain, rho = sdomain.domain, sdomain.involution
    if chord.residual > max(config.residual_tol, 1e-8):
        raise ValueError(f"chord residual {chord.residual:.2e} too large to close")
    period = 2.0 * chord.duration
    orbit = _orbit_from(domain, chord.start, period, config, rho=None, degenerate=chord.degenerate, source="chord")
    limit = max(2 * config.residual_tol, 1e-8)
    if orbit.closure_residual > limit:
        raise ConvergenceError(f"closed chord misses by {orbit.closure_residual:.2e}")
    ts = np.linspace(0.0, chord.duration, 33)
    reflected = rho(orbit.trajectory(chord.duration - ts))
    direct = orbit.trajectory(chord.duration + ts)
    if np.max(np.linalg.norm(reflected - direct, axis=-1)) > 1e3 * limit:
        raise ConvergenceError("reflected half does not match the integrated half")
    orbit.symmetric = True
    orbit.witness = chord.start.copy()
    return orbit


# --------------------------------------------------------------------------
# estimates


@dataclass
class Estimate:
    value: float
    certificate: ClosedOrbit | None
    coverage: dict

    def __iter__(self):
        # allows ``value, certificate = estimate``
        return iter((self.value, self.certificate))


def systole_estimate(domain: GaugeDomain, config: SearchConfig | None = None, rho=None, extra_orbits=()) -> Estimate:
    """Smallest period among the orbits found below the ceiling.

    This is an upper bound for the systole; globality is heuristic and the
    coverage record says how hard we looked.
    """
    orbits, coverage = find_periodic_orbits(domain, config, rho=rho)
    pool = list(orbits) + [o for o in extra_orbits if o is not None]
    coverage["orbits"] = [o.period for o in orbits]
    if not pool:
        return Estimate(math.inf, None, coverage)
    best = min(pool, key=lambda o: o.period)
    return Estimate(best.period, best, coverage)


def symmetric_systole_estimate(sdomain: SymmetricDomain, config: SearchConfig | None = None, orbits=()) -> Estimate:
    """Smallest period of symmetric orbits built from chords off a fixed-locus seed grid.

    Candidate chords from all seeds are refined in order of their raw
    duration; refinement stops once the remaining candidates cannot beat the
    best chord by more than ``chord_margin``. Symmetric members of ``orbits``
    are used as a cross-check.
    """
    config = config or SearchConfig()
    domain, rho = sdomain.domain, sdomain.involution
    ceiling, count, _ = _resolve(domain, config)
    t_max = config.chord_ceiling if config.chord_ceiling is not None else ceiling / 2.0
    seeds = sdomain.fixed_seeds(count, config.rng_seed, config.structured)
    r_in = float(np.min(domain.radial_extent(rho.fixed_basis.T)))
    basin = config.basin * r_in
    tasks = [(domain, rho, s, t_max, basin, config.tol) for s in seeds]
    raw = _map(_candidate_task, tasks, config.jobs)
    cands = sorted(((t, g, i) for i, cs in enumerate(raw) for t, g in cs), key=lambda c: (c[0], c[2]))
    best: Chord | None = None
    refined = 0
    for t, _g, i in cands:
        if best is not None and t > best.duration * (1 + config.chord_margin):
            break
        try:
            c = refine_chord(domain, rho, seeds[i], t, min(config.residual_tol, 1e-10), config)
        except (ConvergenceError, FlowError):
            continue
        refined += 1
        if c.duration <= t_max and (best is None or c.duration < best.duration - 1e-12):
            best = c
    coverage = {
        "fixed_seeds": int(len(seeds)),
        "chord_candidates": int(len(cands)),
        "chords_refined": refined,
        "period_ceiling": float(2.0 * t_max),
    }
    certificate = None
    if best is not None:
        try:
            certificate = close_chord(best, sdomain, config)
        except (ConvergenceError, ValueError):
            certificate = None
    sym_pool = [o for o in orbits if o.symmetric]
    if certificate is not None:
        sym_pool.append(certificate)
    if not sym_pool:
        return Estimate(math.inf, None, coverage)
    cert = min(sym_pool, key=lambda o: o.period)
    coverage["cross_checked"] = int(len([o for o in orbits if o.symmetric]))
    return Estimate(cert.period, cert, coverage)


def _candidate_task(args):
    domain, rho, seed, t_max, basin, tol = args
    try:
        return _chord_candidates(domain, rho, seed, t_max, basin, tol)
    except FlowError:
        return []


@dataclass
class SystoleReport:
    """Both systole estimates, their ratio, and the certificate orbits."""

    systole_estimate: float
    symmetric_systole_estimate: float
    ratio: float
    certificates: dict
    search_coverage: dict
    convex: bool | None = None
    min_hessian_eigenvalue: float | None = None
    ratio_within_bounds: bool | None = None
    ball_sandwich: tuple | None = None
    orbits: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        def _num(x):
            return None if x is None else (x if math.isfinite(x) else "inf")

        return {
            "systole_estimate": _num(self.systole_estimate),
            "symmetric_systole_estimate": _num(self.symmetric_systole_estimate),
            "ratio": _num(self.ratio),
            "certificates": {k: (None if v is None else v.to_dict()) for k, v in self.certificates.items()},
            "search_coverage": self.search_coverage,
            "convex": self.convex,
            "min_hessian_eigenvalue": self.min_hessian_eigenvalue,
            "ratio_within_bounds": self.ratio_within_bounds,
            "ball_sandwich": None if self.ball_sandwich is None else list(self.ball_sandwich),
        }


def symmetric_ratio(sdomain: SymmetricDomain, config: SearchConfig | None = None, check_convexity: bool = True, ratio_tol: float = 1e-6) -> SystoleReport:
    """Systole, symmetric systole and their ratio for a symmetric domain.

    The symmetric certificate is added to the general orbit pool, so the
    ratio is at least one by construction.
    """
    config = config or SearchConfig()
    domain, rho = sdomain.domain, sdomain.involution
    orbits, coverage = find_periodic_orbits(domain, config, rho=rho)
    sym = symmetric_systole_estimate(sdomain, config, orbits)
    pool = list(orbits) + ([sym.certificate] if sym.certificate is not None else [])
    general = min(pool, key=lambda o: o.period) if pool else None
    ell = general.period if general is not None else math.inf
    ell_sym = sym.value
    if math.isinf(ell) or math.isinf(ell_sym):
        ratio = math.inf
    else:
        ratio = ell_sym / ell
    report = SystoleReport(
        ell,
        ell_sym,
        ratio,
        {"systole": general, "symmetric_systole": sym.certificate if sym.certificate is not None else None},
        {"orbit_search": coverage, "chord_search": sym.coverage, "orbit_periods": [o.period for o in orbits]},
        orbits=orbits,
    )
    if sym.certificate is None and math.isfinite(ell_sym):
        report.certificates["symmetric_systole"] = min((o for o in orbits if o.symmetric), key=lambda o: o.period)
    r_in, r_out = ball_sandwich(domain, samples=1024, seed=config.rng_seed)
    report.ball_sandwich = (r_in, r_out)
    if check_convexity:
        cc = convexity_check(domain, samples=1024, seed=config.rng_seed)
        report.convex = cc.passed
        report.min_hessian_eigenvalue = cc.min_eigenvalue
        if cc.passed:
            report.ratio_within_bounds = bool(1 - ratio_tol <= ratio <= 2 + 1e-3)
    return report


def lyapunov_frequency(mech, equilibrium):
    """Re-exported from :mod:`symsystole.mechanical` for convenience."""
    from .mechanical import lyapunov_frequency as _lf

    return _lf(mech, equilibrium)
