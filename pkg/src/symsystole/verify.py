"""Batch check of the convex bound ``1 <= ratio <= 2`` on random symmetric convex domains.

The sample family is ``H = sqrt(|z|^4 + sum_i c_i m_i(z))`` where the ``m_i``
are quartic monomials of even total degree in the ``y`` variables (hence
invariant under complex conjugation). ``H`` is 2-homogeneous, and small
coefficients keep it convex; candidates failing :func:`convexity_check` are
rejected and redrawn.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .domains import PolynomialGauge, SymmetricDomain, ball_sandwich, convexity_check, sphere_norm_power_terms, unit_ball
from .orbits import SearchConfig, symmetric_ratio
from .symplectic import complex_conjugation


def invariant_quartics(n: int) -> list[tuple[int, ...]]:
    """Exponent tuples of quartic monomials in ``(x1, y1, ..., xn, yn)`` invariant under ``y -> -y``."""
    out = []
    for ex in itertools.product(range(5), repeat=2 * n):
        if sum(ex) == 4 and sum(ex[1::2]) % 2 == 0:
            out.append(ex)
    return out


def random_convex_domain(n: int, rng: np.random.Generator, amplitude: float = 0.25, terms: int = 5, max_tries: int = 50):
    """Draw a conjugation-invariant convex quartic gauge; returns ``(domain, tries)``."""
    pool = invariant_quartics(n)
    base = sphere_norm_power_terms(n, 2)
    for tries in range(1, max_tries + 1):
        pick = rng.choice(len(pool), size=terms, replace=False)
        coeffs = rng.uniform(-amplitude, amplitude, size=terms)
        extra = [(float(round(c, 12)), pool[i]) for c, i in zip(coeffs, pick)]
        dom = PolynomialGauge(n, list(base) + extra, label="random_quartic")
        if convexity_check(dom, samples=1024, seed=int(rng.integers(2**31))).passed:
            return dom, tries
    raise RuntimeError("could not draw a convex sample; lower the amplitude")


@dataclass
class ConvexSample:
    index: int
    spec: dict
    systole: float
    symmetric_systole: float
    ratio: float
    ball_bounds: tuple
    ratio_ok: bool
    sandwich_ok: bool
    convex: bool

    def to_dict(self):
        return {
            "index": self.index,
            "domain_spec": self.spec,
            "systole": self.systole,
            "symmetric_systole": self.symmetric_systole,
            "ratio": self.ratio,
            "capacity_bounds": list(self.ball_bounds),
            "ratio_ok": self.ratio_ok,
            "sandwich_ok": self.sandwich_ok,
            "convex": self.convex,
        }


def fast_config(domain, config: SearchConfig) -> SearchConfig:
    """Search windows sized for convex domains.

    The systole of a convex domain is at most ``pi r_out^2`` and the symmetric
    systole at most twice the systole, so chords (half-orbits) are at most
    ``pi r_out^2`` long; a small margin is added to both windows.
    """
    _, r_out = ball_sandwich(domain, samples=1024, seed=config.rng_seed)
    cap = math.pi * r_out**2
    fields = config.to_dict()
    if config.ceiling is None:
        fields["ceiling"] = 1.15 * cap
    if config.chord_ceiling is None:
        fields["chord_ceiling"] = 1.05 * cap
    return SearchConfig(**fields)


def check_sample(index: int, sd: SymmetricDomain, config: SearchConfig, ratio_tol: float = 1e-6, upper_tol: float = 1e-3, sandwich_tol: float = 1e-6):
    cfg = fast_config(sd.domain, config)
    report = symmetric_ratio(sd, cfg)
    r_in, r_out = report.ball_sandwich
    lo, hi = math.pi * r_in**2, math.pi * r_out**2
    ratio_ok = bool(1 - ratio_tol <= report.ratio <= 2 + upper_tol)
    sandwich_ok = bool(lo - sandwich_tol <= report.systole_estimate <= hi + sandwich_tol)
    return ConvexSample(index, sd.to_spec(), report.systole_estimate, report.symmetric_systole_estimate, report.ratio, (lo, hi), ratio_ok, sandwich_ok, bool(report.convex))


def verify_convex(samples: int = 30, n: int = 2, seed: int = 0, config: SearchConfig | None = None, amplitude: float = 0.25, ratio_tol: float = 1e-6, upper_tol: float = 1e-3):
    """Ratios on the ball plus ``samples - 1`` random convex quartic domains.

    Returns ``(results, histogram)`` where the histogram bins ratios over
    ``[1, 2]``.
    """
    config = config or SearchConfig(seeds=16 * n, rng_seed=seed)
    rng = np.random.default_rng(seed)
    rho = complex_conjugation(n)
    results = []
    for i in range(samples):
        dom = unit_ball(n) if i == 0 else random_convex_domain(n, rng, amplitude)[0]
        sd = SymmetricDomain(dom, rho)
        sd.validate()
        results.append(check_sample(i, sd, config, ratio_tol, upper_tol))
    ratios = np.array([r.ratio for r in results])
    counts, edges = np.histogram(np.clip(ratios, 1.0, 2.0), bins=10, range=(1.0, 2.0))
    histogram = {"edges": edges.tolist(), "counts": counts.tolist()}
    return results, histogram
