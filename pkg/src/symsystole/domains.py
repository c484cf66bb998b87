"""Starshaped domains encoded by 2-homogeneous gauge Hamiltonians.

Every domain here is described by a function ``H`` on R^{2n} with
``H(s z) = s**2 H(z)``, ``H > 0`` away from the origin and boundary
``H^{-1}(1)``. All ``evaluate``/``gradient`` implementations accept stacks of
points of shape ``(..., 2n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .errors import DimensionError, DomainError
from .symplectic import (
    LinearInvolution,
    as_point,
    complex_conjugation,
    gram_schmidt_unitary,
)

CONVEX = "convex"
NONCONVEX = "nonconvex"
UNKNOWN = "unknown"


class GaugeDomain:
    """Base class for gauge-encoded starshaped domains.

    Subclasses implement :meth:`evaluate` and :meth:`gradient`; :meth:`hessian`
    falls back to central differences of the gradient.
    """

    n: int
    label: str = "domain"
    convex_hint: str = UNKNOWN
    fd_step: float = 1e-5

    def evaluate(self, z) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, z) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, z) -> np.ndarray:
        z = as_point(z, self.n)
        h = self.fd_step * max(1.0, float(np.linalg.norm(z)))
        steps = h * np.eye(2 * self.n)
        gp = self.gradient(z + steps)
        gm = self.gradient(z - steps)
        hess = (gp - gm) / (2 * h)
        return 0.5 * (hess + hess.T)

    def gradient_hessian(self, z):
        """Gradient and Hessian at a single point, sharing one batched gradient call when differencing."""
        if type(self).hessian is not GaugeDomain.hessian:
            return self.gradient(z), self.hessian(z)
        z = as_point(z, self.n)
        m = 2 * self.n
        h = self.fd_step * max(1.0, float(np.linalg.norm(z)))
        steps = h * np.eye(m)
        g = self.gradient(np.vstack([z[None, :], z + steps, z - steps]))
        hess = (g[1 : m + 1] - g[m + 1 :]) / (2 * h)
        return g[0], 0.5 * (hess + hess.T)

    def __call__(self, z):
        return self.evaluate(z)

    def project(self, z) -> np.ndarray:
        """Radial projection onto ``H^{-1}(1)`` (well defined by starshapedness)."""
        z = np.asarray(z, dtype=float)
        return z / np.sqrt(self.evaluate(z))[..., None]

    def radial_extent(self, u) -> np.ndarray:
        """Distance from the origin to the boundary along the unit directions ``u``."""
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u, axis=-1, keepdims=True)
        return 1.0 / np.sqrt(self.evaluate(u))

    def structured_seeds(self) -> np.ndarray:
        """Boundary points worth seeding an orbit search with (coordinate axes)."""
        eye = np.eye(2 * self.n)
        return self.project(np.vstack([eye, -eye]))

    def probe_points(self) -> np.ndarray:
        """Extra boundary points a convexity audit should always look at."""
        return np.zeros((0, 2 * self.n))

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


class Ellipsoid(GaugeDomain):
    """``E(a) = {sum_j pi |z_j|^2 / a_j <= 1}``."""

    convex_hint = CONVEX

    def __init__(self, a):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if a.ndim != 1 or a.size < 1:
            raise DomainError("ellipsoid needs a non-empty vector of radii parameters")
        if np.any(a <= 0) or not np.all(np.isfinite(a)):
            raise DomainError(f"ellipsoid parameters must be positive, got {a.tolist()}")
        self.a = a
        self.n = a.size
        self._w = np.repeat(np.pi / a, 2)
        self.label = "E(" + ", ".join(f"{x:.6g}" for x in a) + ")"

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        return np.sum(self._w * z * z, axis=-1)

    def gradient(self, z):
        return 2.0 * self._w * np.asarray(z, dtype=float)

    def hessian(self, z):
        return np.diag(2.0 * self._w)

    def to_spec(self):
        return {"kind": "ellipsoid", "a": self.a.tolist()}


def ellipsoid(a) -> Ellipsoid:
    return Ellipsoid(a)


def unit_ball(n: int) -> Ellipsoid:
    ball = Ellipsoid(np.full(n, np.pi))
    ball.label = f"B^{2 * n}"
    return ball


def moment_map(z) -> np.ndarray:
    """``mu(z) = pi (|z_1|^2, ..., |z_n|^2)``."""
    z = np.asarray(z, dtype=float)
    return np.pi * (z[..., 0::2] ** 2 + z[..., 1::2] ** 2)


@dataclass(frozen=True)
class ToricProfile:
    """Profile ``F(x) = (sum_j (x_j / a_j)^p)^(1/p)`` on the positive orthant.

    ``p = 1`` is the simplex (the toric picture of an ellipsoid), ``p = 2`` the
    round profile. ``dOmega = F^{-1}(1)``.
    """

    weights: tuple
    p: float = 2.0
    label: str = ""

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w or any(x <= 0 for x in w):
            raise DomainError("toric weights must be positive")
        if self.p < 1:
            raise DomainError("profile exponent must be >= 1")
        object.__setattr__(self, "weights", w)
        if not self.label:
            kind = {1.0: "simplex", 2.0: "round"}.get(float(self.p), f"p={self.p:g}")
            object.__setattr__(self, "label", f"{kind}{list(w)}")

    @property
    def n(self) -> int:
        return len(self.weights)

    def value(self, x):
        u = np.asarray(x, dtype=float) / np.asarray(self.weights)
        if self.p == 1:
            return np.sum(u, axis=-1)
        return np.sum(u**self.p, axis=-1) ** (1.0 / self.p)

    def gradient(self, x):
        a = np.asarray(self.weights)
        u = np.asarray(x, dtype=float) / a
        if self.p == 1:
            return np.broadcast_to(1.0 / a, u.shape).copy()
        S = np.sum(u**self.p, axis=-1, keepdims=True)
        return S ** (1.0 / self.p - 1.0) * u ** (self.p - 1.0) / a

    def hessian(self, x):
        a = np.asarray(self.weights)
        u = np.asarray(x, dtype=float) / a
        n = u.size
        if self.p == 1:
            return np.zeros((n, n))
        p = self.p
        S = np.sum(u**p)
        g = u ** (p - 1.0) / a
        out = (1.0 - p) * S ** (1.0 / p - 2.0) * np.outer(g, g)
        out += np.diag((p - 1.0) * S ** (1.0 / p - 1.0) * u ** (p - 2.0) / a**2)
        return out

    def to_spec(self):
        return {"weights": list(self.weights), "p": self.p}


def simplex_profile(a) -> ToricProfile:
    return ToricProfile(tuple(np.atleast_1d(a)), p=1.0)


def round_profile(n: int = 2, radius: float = 1.0) -> ToricProfile:
    return ToricProfile((radius,) * n, p=2.0)


class ToricDomain(GaugeDomain):
    """``X_Omega = mu^{-1}(Omega)`` with gauge ``H = F o mu``."""

    def __init__(self, profile: ToricProfile):
        self.profile = profile
        self.n = profile.n
        self.label = f"toric[{profile.label}]"
        # the p-norm profile gives a convex Omega-hat exactly when p >= 1
        self.convex_hint = CONVEX

    def evaluate(self, z):
        return self.profile.value(moment_map(z))

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        dF = self.profile.gradient(moment_map(z))
        return 2.0 * np.pi * np.repeat(dF, 2, axis=-1) * z

    def hessian(self, z):
        z = as_point(z, self.n)
        mu = moment_map(z)
        dF = self.profile.gradient(mu)
        d2F = self.profile.hessian(mu)
        # dmu_j/dz is 2 pi (x_j, y_j) in block j
        D = np.zeros((self.n, 2 * self.n))
        for j in range(self.n):
            D[j, 2 * j : 2 * j + 2] = 2.0 * np.pi * z[2 * j : 2 * j + 2]
        return D.T @ d2F @ D + np.diag(2.0 * np.pi * np.repeat(dF, 2))

    def structured_seeds(self):
        # boundary points on the coordinate axes: fibres over the axis points of dOmega
        return super().structured_seeds()

    def to_spec(self):
        return {"kind": "toric", **self.profile.to_spec()}


def toric_domain(profile: ToricProfile) -> ToricDomain:
    return ToricDomain(profile)


class PolynomialGauge(GaugeDomain):
    """Gauge ``H = P^(1/k)`` for a positive homogeneous polynomial ``P`` of degree ``2k``.

    ``terms`` is a sequence of ``(coefficient, exponents)`` with ``exponents`` a
    length-``2n`` tuple of non-negative integers summing to ``2k``.
    """

    def __init__(self, n: int, terms, label: str = "custom", convex_hint: str = UNKNOWN):
        terms = [(float(c), tuple(int(e) for e in ex)) for c, ex in terms]
        if not terms:
            raise DomainError("polynomial gauge needs at least one term")
        degrees = {sum(ex) for _, ex in terms}
        if len(degrees) != 1:
            raise DomainError(f"polynomial is not homogeneous (degrees {sorted(degrees)})")
        degree = degrees.pop()
        if degree % 2 or degree == 0:
            raise DomainError("polynomial degree must be even and positive")
        if any(len(ex) != 2 * n for _, ex in terms):
            raise DimensionError(f"every exponent tuple must have length {2 * n}")
        if any(e < 0 for _, ex in terms for e in ex):
            raise DomainError("exponents must be non-negative")
        self.n = n
        self.terms = terms
        self.degree = degree
        self.k = degree // 2
        self.label = label
        self.convex_hint = convex_hint
        self._c = np.array([c for c, _ in terms])
        self._E = np.array([ex for _, ex in terms], dtype=float)
        # derivative tables: first and second partials of each monomial
        E = self._E.astype(int)
        eye = np.eye(2 * n, dtype=int)
        self._dc = self._c[None, :] * E.T
        self._dE = np.maximum(E[None, :, :] - eye[:, None, :], 0)
        ddc = np.empty((2 * n, 2 * n, len(terms)))
        for i in range(2 * n):
            for j in range(2 * n):
                ddc[i, j] = self._dc[i] * (E[:, j] - (i == j))
        self._ddc = ddc
        self._ddE = np.maximum(E[None, None, :, :] - eye[:, None, None, :] - eye[None, :, None, :], 0)
        self._cols = np.arange(2 * n)
        probe = _sphere_samples(2 * n, 512, seed=12345)
        if np.any(self._poly(probe) <= 0):
            raise DomainError("polynomial is not positive on the unit sphere")

    def _monomials(self, z, E):
        extra = E.ndim - 1
        return np.multiply.reduce(z.reshape(z.shape[:-1] + (1,) * extra + z.shape[-1:]) ** E, axis=-1)

    def _point_derivatives(self, z, order: int):
        """``P`` and its first ``order`` derivatives at one point, from a single power-table lookup."""
        d, m = 2 * self.n, len(self._c)
        if not hasattr(self, "_stacks"):
            E = self._E.astype(int)
            self._stacks = (
                np.concatenate([E, self._dE.reshape(-1, d)]),
                np.concatenate([E, self._dE.reshape(-1, d), self._ddE.reshape(-1, d)]),
            )
        table = z[None, :] ** np.arange(self.degree + 1)[:, None]
        stack = self._stacks[order - 1]
        vals = np.multiply.reduce(table[stack, self._cols], axis=-1)
        P = vals[:m] @ self._c
        g = np.add.reduce(vals[m : m + d * m].reshape(d, m) * self._dc, axis=-1)
        if order == 1:
            return P, g, None
        hess = np.add.reduce(vals[m + d * m :].reshape(d, d, m) * self._ddc, axis=-1)
        return P, g, hess

    def _poly(self, z):
        z = np.asarray(z, dtype=float)
        return self._monomials(z, self._E.astype(int)) @ self._c

    def _poly_grad(self, z):
        z = np.asarray(z, dtype=float)
        return np.sum(self._monomials(z, self._dE) * self._dc, axis=-1)

    def evaluate(self, z):
        return self._poly(z) ** (1.0 / self.k)

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            P, g, _ = self._point_derivatives(z, 1)
        else:
            P, g = self._poly(z), self._poly_grad(z)
        return ((1.0 / self.k) * P ** (1.0 / self.k - 1.0))[..., None] * g

    def gradient_hessian(self, z):
        z = as_point(z, self.n)
        P, g, hp = self._point_derivatives(z, 2)
        k = self.k
        scale = (1.0 / k) * P ** (1.0 / k - 1.0)
        return scale * g, scale * (hp + (1.0 / k - 1.0) * np.outer(g, g) / P)

    def hessian(self, z):
        return self.gradient_hessian(z)[1]

    def to_spec(self):
        return {
            "kind": "custom",
            "n": self.n,
            "terms": [{"coeff": c, "powers": list(ex)} for c, ex in self.terms],
        }


def sphere_norm_power_terms(n: int, k: int):
    """Terms of ``|z|^{2k}`` as a polynomial (multinomial expansion)."""
    from itertools import product

    terms = []
    d = 2 * n
    for ex in product(range(k + 1), repeat=d):
        if sum(ex) != k:
            continue
        coeff = math.factorial(k)
        for e in ex:
            coeff //= math.factorial(e)
        terms.append((float(coeff), tuple(2 * e for e in ex)))
    return terms


class ScaledDomain(GaugeDomain):
    """Gauge ``H / s``: the boundary dilated by ``sqrt(s)``; periods scale by ``s``."""

    def __init__(self, base: GaugeDomain, s: float):
        if s <= 0:
            raise DomainError("scale factor must be positive")
        self.base = base
        self.s = float(s)
        self.n = base.n
        self.label = f"{base.label}*{s:g}"
        self.convex_hint = base.convex_hint

    def evaluate(self, z):
        return self.base.evaluate(z) / self.s

    def gradient(self, z):
        return self.base.gradient(z) / self.s

    def hessian(self, z):
        return self.base.hessian(z) / self.s

    def structured_seeds(self):
        return self.base.structured_seeds() * np.sqrt(self.s)

    def probe_points(self):
        return self.base.probe_points() * np.sqrt(self.s)

    def to_spec(self):
        return {**self.base.to_spec(), "scale": self.s}


# --------------------------------------------------------------------------
# perturbations of the round sphere


class HopfMorseFunction:
    """0-homogeneous lift of ``f(x, y, z) = (1 - y^2)(1 + delta x)`` through the Hopf map.

    The Hopf map sends ``(z1, z2)`` to ``(2 Re z1 conj(z2), 2 Im z1 conj(z2),
    |z1|^2 - |z2|^2)``; complex conjugation descends to ``(x, y, z) -> (x, -y, z)``,
    which swaps the two minima at the poles ``y = +-1``.
    """

    n = 2

    def __init__(self, delta: float = 0.1):
        if not 0 < delta < 2.0 / 3.0:
            raise DomainError("delta must lie in (0, 2/3) for a Morse function with four critical points")
        self.delta = float(delta)

    # function on R^3 (any extension works since we only evaluate on S^2)
    def fbar(self, p):
        p = np.asarray(p, dtype=float)
        return (1.0 - p[..., 1] ** 2) * (1.0 + self.delta * p[..., 0])

    def fbar_gradient(self, p):
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        return np.stack(
            [self.delta * (1.0 - y**2), -2.0 * y * (1.0 + self.delta * x), np.zeros_like(x)],
            axis=-1,
        )

    @staticmethod
    def hopf(z):
        z = np.asarray(z, dtype=float)
        x1, y1, x2, y2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
        return np.stack(
            [2 * (x1 * x2 + y1 * y2), 2 * (y1 * x2 - x1 * y2), x1**2 + y1**2 - x2**2 - y2**2],
            axis=-1,
        )

    @staticmethod
    def hopf_jacobian(z):
        z = np.asarray(z, dtype=float)
        x1, y1, x2, y2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
        rows = [
            np.stack([x2, y2, x1, y1], axis=-1),
            np.stack([-y2, x2, y1, -x1], axis=-1),
            np.stack([x1, y1, -x2, -y2], axis=-1),
        ]
        return 2.0 * np.stack(rows, axis=-2)  # (..., 3, 4)

    def value(self, z):
        z = np.asarray(z, dtype=float)
        r2 = np.sum(z * z, axis=-1)
        return self.fbar(self.hopf(z) / r2[..., None])

    # the first two Hopf components as quadratic forms z^T A z
    _AX = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)
    _AY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float)

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        r2 = np.einsum("...i,...i->...", z, z)[..., None]
        ax, ay = z @ self._AX, z @ self._AY
        x = np.einsum("...i,...i->...", z, ax)[..., None] / r2
        y = np.einsum("...i,...i->...", z, ay)[..., None] / r2
        # grad of q = (z^T A z) / r2 is 2 (A z - q z) / r2
        fx = self.delta * (1.0 - y * y)
        fy = -2.0 * y * (1.0 + self.delta * x)
        return 2.0 * (fx * (ax - x * z) + fy * (ay - y * z)) / r2

    def lift(self, p) -> np.ndarray:
        """A point of the unit 3-sphere over ``p`` in S^2."""
        X, Y, Z = (float(c) for c in p)
        r2sq = max(0.0, (1.0 - Z) / 2.0)
        if r2sq < 1e-14:
            return np.array([1.0, 0.0, 0.0, 0.0])
        z2 = math.sqrt(r2sq)
        z1 = complex(X, Y) / (2.0 * z2)
        return np.array([z1.real, z1.imag, z2, 0.0])

    def critical_points(self, starts: int = 200, seed: int = 0) -> list[tuple[np.ndarray, float, int]]:
        """Critical points of ``fbar`` on S^2 as ``(point, value, index)``.

        Found by Newton iteration on the Lagrange system from random starts.
        """

        def lagrange(v):
            p, lam = v[:3], v[3]
            return np.concatenate([self.fbar_gradient(p) - lam * p, [p @ p - 1.0]])

        rng = np.random.default_rng(seed)
        found: list[np.ndarray] = []
        for _ in range(starts):
            p0 = rng.normal(size=3)
            p0 /= np.linalg.norm(p0)
            lam0 = self.fbar_gradient(p0) @ p0
            sol = optimize.root(lagrange, np.append(p0, lam0), method="hybr", tol=1e-14)
            if not sol.success or np.linalg.norm(lagrange(sol.x)) > 1e-10:
                continue
            p = sol.x[:3] / np.linalg.norm(sol.x[:3])
            if all(np.linalg.norm(p - q) > 1e-6 for q in found):
                found.append(p)
        out = []
        for p in sorted(found, key=lambda q: (self.fbar(q), tuple(np.round(q, 9)))):
            out.append((p, float(self.fbar(p)), self._morse_index(p)))
        return out

    def _morse_index(self, p, h=1e-5):
        # Hessian of fbar restricted to the tangent plane via the spherical chart
        t1 = np.cross(p, [1.0, 0.0, 0.0] if abs(p[0]) < 0.9 else [0.0, 1.0, 0.0])
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(p, t1)

        def g(a, b):
            q = p + a * t1 + b * t2
            return self.fbar(q / np.linalg.norm(q))

        hess = np.array(
            [
                [(g(h, 0) - 2 * g(0, 0) + g(-h, 0)) / h**2, (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h**2)],
                [0.0, (g(0, h) - 2 * g(0, 0) + g(0, -h)) / h**2],
            ]
        )
        hess[1, 0] = hess[0, 1]
        eig = np.linalg.eigvalsh(hess)
        if np.min(np.abs(eig)) < 1e-6:
            raise DomainError(f"degenerate critical point at {p}")
        return int(np.sum(eig < 0))

    def to_spec(self):
        return {"kind": "hopf_morse", "delta": self.delta}


class PerturbedSphere(GaugeDomain):
    """Radial graph ``{sqrt(1 + eps f(x)) x : |x| = 1}`` over the unit sphere.

    ``f`` is a 0-homogeneous function (``value``/``gradient`` on R^{2n}) with
    ``f >= 0``. The induced contact form is ``(1 + eps f) alpha0``.
    """

    def __init__(self, epsilon: float, f, n: int = 2):
        if epsilon < 0:
            raise DomainError("epsilon must be non-negative")
        self.epsilon = float(epsilon)
        self.f = f
        self.n = n
        self.label = f"perturbed_sphere(eps={epsilon:g})"

    def h(self, z):
        return 1.0 + self.epsilon * self.f.value(z)

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        return np.sum(z * z, axis=-1) / self.h(z)

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        h = self.h(z)[..., None]
        r2 = np.sum(z * z, axis=-1)[..., None]
        return 2.0 * z / h - r2 * self.epsilon * self.f.gradient(z) / h**2

    def to_spec(self):
        return {"kind": "perturbed_sphere", "epsilon": self.epsilon, "f": self.f.to_spec()}


# --------------------------------------------------------------------------
# Bordeaux bottle with two necks


def _soft_log(logs, p: float, sign: float):
    """``sign / p * logsumexp(sign * p * logs)`` along the last axis."""
    # max-shifted by hand: scipy's logsumexp carries too much per-call overhead
    # for the short rows evaluated inside the integrator
    x = sign * p * np.asarray(logs, dtype=float)
    m = np.max(x, axis=-1)
    return sign * (m + np.log(np.sum(np.exp(x - m[..., None]), axis=-1))) / p


class BordeauxBottle(GaugeDomain):
    """Unit ball with two thin necks, swapped by complex conjugation.

    In the unitary frame ``w`` built from ``v1 = (1, 0, 0, 1, 0, ...)`` the necks
    are ``|w_1|^2 <= eps`` and ``|w_2|^2 <= eps``, truncated where the other
    coordinates reach ``neck_length`` (3x the ball radius by default). The three
    gauges are merged with a homogeneous smooth minimum of temperature
    ``delta`` applied to log-gauges, which equals the power mean
    ``(sum H_i^{-1/delta})^{-delta}``; the neck truncation uses the matching
    smooth maximum.
    """

    convex_hint = NONCONVEX

    def __init__(self, epsilon: float, delta: float = 0.01, n: int = 2, neck_length: float = 3.0):
        if n < 2:
            raise DomainError("the two-neck bottle needs n >= 2")
        if not 0 < epsilon < 1:
            raise DomainError(f"neck parameter must satisfy 0 < eps < 1, got {epsilon}")
        if not 0 < delta < epsilon:
            raise DomainError("smoothing parameter must satisfy 0 < delta < eps")
        if neck_length <= 1:
            raise DomainError("necks must extend beyond the unit ball")
        self.epsilon = float(epsilon)
        self.delta = float(delta)
        self.n = n
        self.neck_length = float(neck_length)
        self.p = 1.0 / self.delta
        self.involution = complex_conjugation(n)
        v1 = np.zeros(2 * n)
        v1[0] = v1[3] = 1.0
        self.v1 = v1
        self.frame = gram_schmidt_unitary(v1 / np.sqrt(2.0), self.involution)
        self.label = f"bordeaux(eps={epsilon:g}, delta={delta:g}, n={n})"

    def unitary_coords(self, z):
        return np.asarray(z, dtype=float) @ self.frame.T

    def from_unitary(self, w):
        return np.asarray(w, dtype=float) @ self.frame

    def _pieces(self, z):
        z = np.asarray(z, dtype=float)
        w = self.unitary_coords(z)
        r2 = np.sum(z * z, axis=-1)
        a1 = w[..., 0] ** 2 + w[..., 1] ** 2
        a2 = w[..., 2] ** 2 + w[..., 3] ** 2
        return w, r2, a1, a2

    def _neck_logs(self, a, rest):
        with np.errstate(divide="ignore"):
            inner = np.stack([np.log(a / self.epsilon), np.log(rest / self.neck_length**2)], axis=-1)
        return _soft_log(inner, self.p, +1.0), inner

    def evaluate(self, z):
        _, r2, a1, a2 = self._pieces(z)
        n1, _ = self._neck_logs(a1, r2 - a1)
        n2, _ = self._neck_logs(a2, r2 - a2)
        logs = np.stack([np.log(r2), n1, n2], axis=-1)
        return np.exp(_soft_log(logs, self.p, -1.0))

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        w, r2, a1, a2 = self._pieces(z)
        p = self.p
        F = self.frame
        # gradients (in z) of |w1|^2, |w2|^2, |z|^2
        g_a1 = 2.0 * (w[..., 0:2] @ F[0:2])
        g_a2 = 2.0 * (w[..., 2:4] @ F[2:4])
        g_r2 = 2.0 * z

        def neck_grad(a, g_a, rest, g_rest):
            log_n, _ = self._neck_logs(a, rest)
            lse = p * log_n
            # softmax weight divided by the piece value, finite when a piece vanishes
            with np.errstate(divide="ignore"):
                wa = np.exp((p - 1.0) * np.log(a) - p * np.log(self.epsilon) - lse)
                wr = np.exp((p - 1.0) * np.log(rest) - p * np.log(self.neck_length**2) - lse)
            return log_n, wa[..., None] * g_a + wr[..., None] * g_rest

        n1, d1 = neck_grad(a1, g_a1, r2 - a1, g_r2 - g_a1)
        n2, d2 = neck_grad(a2, g_a2, r2 - a2, g_r2 - g_a2)
        logs = np.stack([np.log(r2), n1, n2], axis=-1)
        logH = _soft_log(logs, p, -1.0)
        sigma = np.exp(-p * logs + p * logH[..., None])  # softmin weights, sum to 1
        dlogH = sigma[..., 0:1] * (g_r2 / r2[..., None]) + sigma[..., 1:2] * d1 + sigma[..., 2:3] * d2
        return np.exp(logH)[..., None] * dlogH

    def neck_point(self, which: int = 1, depth: float = 2.0, phase: float = 0.0) -> np.ndarray:
        """Boundary point on the flat part of a neck.

        ``which`` selects the neck, ``depth`` is ``|w'|`` along the neck axis.
        """
        w = np.zeros(2 * self.n)
        r = math.sqrt(self.epsilon)
        i, j = (0, 2) if which == 1 else (2, 0)
        w[i], w[i + 1] = r * math.cos(phase), r * math.sin(phase)
        w[j] = depth
        return self.project(self.from_unitary(w))

    def structured_seeds(self):
        seeds = [self.neck_point(k, d) for k in (1, 2) for d in (1.6, 2.2)]
        return np.vstack([np.array(seeds), super().structured_seeds()])

    def probe_points(self):
        # sweep across the collar where a neck meets the sphere
        pts = []
        for k in (1, 2):
            i, j = (0, 2) if k == 1 else (2, 0)
            for t in np.linspace(0.0, 1.0, 81):
                w = np.zeros(2 * self.n)
                w[i] = math.sqrt(self.epsilon) * (1.0 + 2.0 * t)
                w[j] = math.sqrt(max(1e-6, 1.0 - self.epsilon)) * (0.6 + 0.8 * t)
                pts.append(self.project(self.from_unitary(w)))
        return np.array(pts)

    def to_spec(self):
        return {
            "kind": "bordeaux",
            "epsilon": self.epsilon,
            "delta": self.delta,
            "n": self.n,
            "neck_length": self.neck_length,
        }


# --------------------------------------------------------------------------
# symmetric domains and audits


def _sphere_samples(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points on the unit sphere S^{dim-1} (scrambled Sobol + Gaussian map)."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])[: max(count, 1)]
    m = max(1, math.ceil(math.log2(max(count, 2))))
    sob = stats.qmc.Sobol(d=dim, scramble=True, seed=seed).random_base2(m)[:count]
    g = stats.norm.ppf(np.clip(sob, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_samples(dim: int, count: int, seed: int = 0) -> np.ndarray:
    return _sphere_samples(dim, count, seed)


def boundary_samples(domain: GaugeDomain, count: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy boundary points (sphere samples pushed radially to the level set)."""
    return domain.project(_sphere_samples(2 * domain.n, count, seed))


@dataclass
class SymmetricDomain:
    """A gauge domain together with an anti-symplectic involution preserving it."""

    domain: GaugeDomain
    involution: LinearInvolution
    label: str = ""
    audit: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain.n != self.involution.n:
            raise DimensionError("domain and involution dimensions differ")
        if not self.label:
            self.label = f"{self.domain.label} / {self.involution.label}"

    @property
    def n(self):
        return self.domain.n

    def validate(self, samples: int = 200, seed: int = 0, tol: float = 1e-9) -> dict:
        """Check ``H o rho = H`` on samples and that ``Fix(rho)`` meets the boundary."""
        rng_pts = _sphere_samples(2 * self.n, samples, seed) * 1.3
        H = self.domain.evaluate(rng_pts)
        Hr = self.domain.evaluate(self.involution(rng_pts))
        invariance = float(np.max(np.abs(Hr - H) / np.abs(H)))
        if invariance > tol:
            raise DomainError(f"domain is not invariant under the involution (rel. error {invariance:.2e})")
        B = self.involution.fixed_basis.T
        Hfix = self.domain.evaluate(B)
        if not np.all(np.isfinite(Hfix)) or np.any(Hfix <= 0):
            raise DomainError("the fixed locus does not meet the boundary")
        self.audit = {"invariance_error": invariance, "fixed_rays_ok": True}
        return self.audit

    def fixed_seeds(self, count: int, seed: int = 0, structured: bool = True) -> np.ndarray:
        """Boundary points of ``Fix(rho)``: low-discrepancy directions in the fixed subspace."""
        B = self.involution.fixed_basis
        dirs = _sphere_samples(self.n, count, seed)
        if structured:
            eye = np.eye(self.n)
            dirs = np.vstack([eye, -eye, dirs])
        return self.domain.project(dirs @ B.T)

    def to_spec(self):
        return {**self.domain.to_spec(), "involution": self.involution.to_dict()}


def perturbed_sphere(epsilon: float, f=None, rho: LinearInvolution | None = None, n: int = 2, check_samples: int = 400) -> SymmetricDomain:
    """Symmetric radial-graph perturbation of the unit sphere by ``h = 1 + eps f``."""
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    f = f if f is not None else HopfMorseFunction()
    n = getattr(f, "n", n)
    rho = rho if rho is not None else complex_conjugation(n)
    pts = _sphere_samples(2 * n, check_samples, seed=7)
    fv = f.value(pts)
    if np.max(np.abs(f.value(rho(pts)) - fv)) > 1e-9:
        raise DomainError("perturbation is not invariant under the involution")
    if np.min(fv) < -1e-12:
        raise DomainError("perturbation must be non-negative")
    dom = unit_ball(n) if epsilon == 0 else PerturbedSphere(epsilon, f, n)
    sd = SymmetricDomain(dom, rho)
    sd.validate()
    return sd


def bordeaux_bottle(epsilon: float, delta: float = 0.01, n: int = 2, neck_length: float = 3.0) -> SymmetricDomain:
    dom = BordeauxBottle(epsilon, delta, n, neck_length)
    g = dom.gradient(boundary_samples(dom, 512, seed=3))
    if np.any(np.linalg.norm(g, axis=-1) < 1e-9):
        raise DomainError("smoothing destroyed starshapedness (vanishing gradient on the boundary)")
    sd = SymmetricDomain(dom, dom.involution)
    sd.validate()
    return sd


@dataclass(frozen=True)
class ConvexityReport:
    passed: bool
    min_eigenvalue: float
    worst_point: np.ndarray
    samples: int

    def to_dict(self):
        return {
            "passed": self.passed,
            "min_eigenvalue": self.min_eigenvalue,
            "worst_point": self.worst_point.tolist(),
            "samples": self.samples,
        }


def convexity_check(domain: GaugeDomain, samples: int = 2048, seed: int = 0, rel_tol: float = 1e-8) -> ConvexityReport:
    """Sample the Hessian of the gauge on boundary points and test for PSD.

    By 2-homogeneity the Hessian is constant along rays, so boundary samples
    decide convexity of the whole domain (up to sampling).
    """
    pts = np.vstack([boundary_samples(domain, samples, seed), domain.probe_points()])
    worst, worst_pt, top = np.inf, pts[0], 0.0
    for z in pts:
        eig = np.linalg.eigvalsh(domain.hessian(z))
        top = max(top, eig[-1])
        if eig[0] < worst:
            worst, worst_pt = eig[0], z
    return ConvexityReport(bool(worst >= -rel_tol * max(top, 1.0)), float(worst), np.array(worst_pt), len(pts))


def ball_sandwich(domain: GaugeDomain, samples: int = 2048, seed: int = 0, refine: int = 4) -> tuple[float, float]:
    """Radii ``(r_in, r_out)`` with ``B(r_in) in K in B(r_out)``.

    Sphere samples locate the extremes of the boundary distance, then the best
    few are polished by a local optimisation on the sphere.
    """
    u = _sphere_samples(2 * domain.n, samples, seed)
    ext = domain.radial_extent(u)

    def polish(indices, sign):
        best = np.inf
        for i in indices:
            res = optimize.minimize(
                lambda v: sign * float(domain.radial_extent(v)),
                u[i],
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
            )
            best = min(best, res.fun)
        return sign * best

    lo_idx = np.argsort(ext)[:refine]
    hi_idx = np.argsort(ext)[-refine:]
    r_in = min(float(ext.min()), polish(lo_idx, +1.0))
    r_out = max(float(ext.max()), polish(hi_idx, -1.0))
    return r_in, r_out


def domain_audit(domain: GaugeDomain, samples: int = 256, seed: int = 0) -> dict:
    """Numerical audit of the gauge invariants (homogeneity, Euler identity, regular level)."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, 2 * domain.n))
    H = domain.evaluate(z)
    homog = max(
        float(np.max(np.abs(domain.evaluate(s * z) - s**2 * H) / (s**2 * np.abs(H)))) for s in (0.5, 2.0)
    )
    euler = float(np.max(np.abs(np.sum(z * domain.gradient(z), axis=-1) - 2.0 * H) / np.abs(H)))
    bpts = boundary_samples(domain, samples, seed)
    min_grad = float(np.min(np.linalg.norm(domain.gradient(bpts), axis=-1)))
    return {
        "label": domain.label,
        "positive": bool(np.all(H > 0)),
        "homogeneity_error": homog,
        "euler_error": euler,
        "min_boundary_gradient": min_grad,
        "convex_hint": domain.convex_hint,
    }
