import json
import math

import numpy as np
import pytest

from symsystole.domains import (
    ScaledDomain,
    SymmetricDomain,
    bordeaux_bottle,
    ellipsoid,
    perturbed_sphere,
    round_profile,
    toric_domain,
    unit_ball,
)
from symsystole.errors import ConvergenceError
from symsystole.flow import flow
from symsystole.orbits import (
    SearchConfig,
    chord_shoot,
    close_chord,
    deduplicate,
    find_periodic_orbits,
    is_symmetric_orbit,
    newton_refine_orbit,
    symmetric_ratio,
    symmetric_systole_estimate,
    systole_estimate,
)
from symsystole.symplectic import complex_conjugation, make_involution_theta

GOLDEN = (1 + math.sqrt(5)) / 2


def ball_sd(n=2):
    return SymmetricDomain(unit_ball(n), complex_conjugation(n))


def e12_sd():
    return SymmetricDomain(ellipsoid([1.0, 2.0]), complex_conjugation(2))


def axis_point(a, j=0, n=2):
    z = np.zeros(2 * n)
    z[2 * j] = math.sqrt(a / math.pi)
    return z


@pytest.fixture(scope="module")
def e12_report():
    return symmetric_ratio(e12_sd(), SearchConfig(ceiling=2.5, seeds=32), check_convexity=True)


# --- chords ---------------------------------------------------------------------


def test_ball_first_chord_is_quarter_turn():
    chords = chord_shoot(ball_sd(), np.array([0.6, 0, 0.8, 0]), 2.0)
    assert chords
    assert chords[0].duration == pytest.approx(math.pi / 2, abs=1e-9)
    assert [round(c.duration / (math.pi / 2), 6) for c in chords] == [1.0]


def test_chord_endpoints_on_fixed_locus():
    sd = e12_sd()
    for c in chord_shoot(sd, axis_point(1.0), 1.8):
        assert c.residual <= 1e-9
        assert sd.involution.distance_to_fixed(c.start) <= 1e-9
        assert sd.involution.distance_to_fixed(c.end) <= max(c.residual, 1e-9)


def test_ellipsoid_axis_chord_is_half():
    chords = chord_shoot(e12_sd(), axis_point(1.0), 0.8)
    assert chords[0].duration == pytest.approx(0.5, abs=1e-9)


def test_chord_shoot_rejects_bad_seed():
    with pytest.raises(ValueError):
        chord_shoot(ball_sd(), np.array([0.0, 1.0, 0.0, 0.0]), 2.0)
    with pytest.raises(ValueError):
        chord_shoot(ball_sd(), np.array([0.5, 0.0, 0.0, 0.0]), 2.0)


def test_close_ball_chord():
    sd = ball_sd()
    c = chord_shoot(sd, np.array([1.0, 0, 0, 0]), 2.0)[0]
    orbit = close_chord(c, sd)
    assert orbit.period == 2 * c.duration
    assert orbit.period == pytest.approx(math.pi, abs=1e-9)
    assert orbit.symmetric
    assert orbit.closure_residual <= 2e-9
    assert abs(orbit.action - orbit.period) <= 1e-9


def test_close_ellipsoid_axis_chord_gives_systole():
    sd = e12_sd()
    orbit = close_chord(chord_shoot(sd, axis_point(1.0), 0.8)[0], sd)
    assert orbit.period == pytest.approx(1.0, abs=1e-9)
    assert orbit.action == pytest.approx(orbit.period, abs=1e-9)
    assert np.allclose(orbit.witness, axis_point(1.0), atol=1e-9)


def test_bordeaux_chords_bounded_below():
    sd = bordeaux_bottle(0.1)
    durations = []
    for seed in sd.fixed_seeds(6, seed=1):
        chords = chord_shoot(sd, seed, 2.5)
        durations += [c.duration for c in chords]
    assert durations
    assert min(durations) > 0.45 * math.pi


# --- Newton -------------------------------------------------------------------


def test_newton_converges_quadratically_on_golden_ellipsoid():
    E = ellipsoid([1.0, GOLDEN])
    orbit = newton_refine_orbit(E, np.array([0.55, 0.05, 0.02, 0.01]), 1.03)
    assert orbit.period == pytest.approx(1.0, abs=1e-10)
    assert not orbit.degenerate
    log = [r for r in orbit.newton_log if r > 1e-12]
    assert len(log) >= 3
    # e_{k+1} <= C e_k^2 with a modest constant
    rates = [b / a**2 for a, b in zip(log, log[1:])]
    assert max(rates) < 5.0


def test_ball_orbit_is_flagged_degenerate():
    orbit = newton_refine_orbit(unit_ball(2), np.array([0.6, 0.8, 0.0, 0.0]), 3.2)
    assert orbit.degenerate
    assert orbit.period == pytest.approx(math.pi, abs=1e-9)


def test_newton_reduces_to_prime_period():
    orbit = newton_refine_orbit(ellipsoid([1.0, 2.0]), axis_point(1.0), 2.0)
    assert orbit.period == pytest.approx(1.0, abs=1e-9)


def test_newton_reports_divergence():
    with pytest.raises(ConvergenceError) as info:
        newton_refine_orbit(ellipsoid([1.0, GOLDEN]), np.array([0.4, 0.1, 0.3, -0.2]), 0.37, config=SearchConfig(max_newton=3))
    assert info.value.history


def test_perturbed_sphere_minimum_orbits_are_not_symmetric():
    eps = 0.01
    sd = perturbed_sphere(eps)
    f = sd.domain.f
    minima = [(p, v) for p, v, idx in f.critical_points() if idx == 0]
    assert len(minima) == 2
    for p, v in minima:
        guess = f.lift(p) + np.array([0.01, -0.02, 0.015, 0.005])
        orbit = newton_refine_orbit(sd.domain, guess, math.pi * (1 + eps * v) + 0.02, rho=sd.involution)
        assert orbit.closure_residual < 1e-9
        assert orbit.period == pytest.approx(math.pi * (1 + eps * v), abs=5e-4)
        assert orbit.symmetric is False


def test_scaling_covariance():
    s = 2.3
    E = ellipsoid([1.0, GOLDEN])
    base = newton_refine_orbit(E, np.array([0.55, 0.05, 0.02, 0.01]), 1.03)
    scaled = newton_refine_orbit(ScaledDomain(E, s), base.base_point * math.sqrt(s) * 1.01, base.period * s)
    assert scaled.period == pytest.approx(s * base.period, rel=1e-8)


# --- symmetry -----------------------------------------------------------------


def _ball_orbit(z):
    return newton_refine_orbit(unit_ball(2), np.asarray(z, dtype=float), math.pi)


def test_real_ball_orbit_is_symmetric():
    sym, witness = is_symmetric_orbit(_ball_orbit([0.6, 0, 0.8, 0]), complex_conjugation(2))
    assert sym
    assert complex_conjugation(2).distance_to_fixed(witness) < 1e-6


def test_ball_orbit_avoiding_real_subspace():
    # e^{2it} (1, i)/sqrt2 keeps distance 1/sqrt2 from R^2
    orbit = _ball_orbit(np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2))
    assert is_symmetric_orbit(orbit, complex_conjugation(2)) == (False, None)


def test_bordeaux_neck_orbit_not_symmetric():
    sd = bordeaux_bottle(0.1)
    z = sd.domain.neck_point(1, 2.0)
    orbit = newton_refine_orbit(sd.domain, z, math.pi * 0.1, rho=sd.involution)
    assert orbit.period == pytest.approx(math.pi * 0.1, rel=1e-8)
    assert orbit.symmetric is False


def test_toric_orbits_symmetric_for_some_theta():
    dom = toric_domain(round_profile(2))
    orbits, _ = find_periodic_orbits(dom, SearchConfig(seeds=8, ceiling=2.5))
    assert orbits
    for orbit in orbits:
        z = orbit.base_point
        # Fix(rho_theta) contains points with arg z_j = theta_j / 2
        theta = 2 * np.arctan2(z[1::2], z[0::2])
        sym, _ = is_symmetric_orbit(orbit, make_involution_theta(theta))
        assert sym


# --- dedup and search -----------------------------------------------------------


def test_deduplicate_time_shifted_copies():
    E = ellipsoid([1.0, 2.0])
    a = newton_refine_orbit(E, E.project(np.array([0.3, -0.2, 0.4, 0.1])), 2.0)
    shifted = flow(E, a.base_point, 0.77).end
    b = newton_refine_orbit(E, shifted, 2.0)
    c = newton_refine_orbit(E, axis_point(2.0, 1), 2.0)
    kept = deduplicate([a, b, c])
    assert len(kept) == 2


def test_ellipsoid_search_periods(e12_report):
    periods = sorted(e12_report.search_coverage["orbit_periods"])
    assert all(min(abs(p - 1.0), abs(p - 2.0)) < 1e-8 for p in periods)
    assert {round(p, 6) for p in periods} == {1.0, 2.0}


def test_ellipsoid_estimates(e12_report):
    assert e12_report.systole_estimate == pytest.approx(1.0, abs=1e-9)
    assert e12_report.symmetric_systole_estimate == pytest.approx(1.0, abs=1e-9)
    assert e12_report.ratio >= 1 - 1e-9
    assert e12_report.convex and e12_report.ratio_within_bounds


def test_report_json_round_trip(e12_report):
    doc = json.loads(json.dumps(e12_report.to_dict()))
    assert doc["certificates"]["systole"]["period"] == pytest.approx(doc["systole_estimate"])
    cov = doc["search_coverage"]["orbit_search"]
    assert cov["seeds_attempted"] >= cov["seeds_converged"] > 0
    assert cov["period_ceiling"] == 2.5


def test_ellipsoid_completeness_irrational():
    a = (1.0, math.sqrt(2))
    orbits, cov = find_periodic_orbits(ellipsoid(a), SearchConfig(ceiling=3.0, seeds=12))
    allowed = [k * aj for aj in a for k in range(1, 4) if k * aj <= 3.0]
    assert orbits
    for o in orbits:
        assert min(abs(o.period - q) for q in allowed) < 1e-8


def test_ball_systole_estimates():
    est = systole_estimate(unit_ball(2), SearchConfig(seeds=8))
    value, cert = est
    assert value == pytest.approx(math.pi, abs=1e-9)
    assert cert.period == value
    sym = symmetric_systole_estimate(ball_sd(), SearchConfig(seeds=8))
    assert sym.value == pytest.approx(math.pi, abs=1e-9)


def test_disk_ratio_is_one():
    sd = SymmetricDomain(ellipsoid([1.7]), complex_conjugation(1))
    report = symmetric_ratio(sd, SearchConfig(seeds=8))
    assert report.ratio == pytest.approx(1.0, abs=1e-9)
    assert report.systole_estimate == pytest.approx(1.7, abs=1e-9)
