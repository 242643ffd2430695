"""Exponent solve, annulus constant, tail bound, integrability."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from autophage.charfn import Empirical, Gaussian, SymStable, sphere_directions
from autophage.decay import (
    DecayProfile,
    decay_profile,
    decay_rate,
    estimate_constant,
    integrability_estimate,
    inverse_adjoint_norms,
    solve_exponent,
    solve_exponent_many,
    verify_bound,
)


def test_inverse_adjoint_norms_diagonal():
    t, s = inverse_adjoint_norms(np.diag([0.5, 0.8]), np.diag([0.9, 0.3]))
    # 1 / |(T^t)^-1| is the smallest singular value
    assert t == pytest.approx(0.5, abs=1e-14)
    assert s == pytest.approx(0.3, abs=1e-14)


def test_inverse_adjoint_norms_nonnormal_matches_svd():
    rng = np.random.default_rng(4)
    for _ in range(10):
        a = rng.standard_normal((3, 3)) * 0.5
        b = rng.standard_normal((3, 3)) * 0.5
        t, s = inverse_adjoint_norms(a, b)
        assert t == pytest.approx(np.linalg.svd(a, compute_uv=False)[-1], rel=1e-12)
        assert s == pytest.approx(np.linalg.svd(b, compute_uv=False)[-1], rel=1e-12)
    with pytest.raises(ValueError):
        inverse_adjoint_norms(np.diag([0.5, 0.0]), np.diag([0.5, 0.5]))


def test_solve_exponent_reference_values():
    assert abs(solve_exponent(0.5, 0.5) - 1.0) <= 1e-12
    assert abs(solve_exponent(2.0**-0.5, 2.0**-0.5) - 2.0) <= 1e-12


def test_solve_exponent_against_brentq_oracle():
    rng = np.random.default_rng(12)
    for _ in range(20):
        t = float(rng.uniform(0.05, 0.95))
        s = float(rng.uniform(0.05, 0.95))
        oracle = brentq(lambda r: t**r + s**r - 1.0, 1e-9, 1e6, xtol=1e-14)
        assert abs(solve_exponent(t, s) - oracle) < 1e-10


def test_solve_exponent_balance_residual():
    for t, s in [(0.3, 0.6), (0.1, 0.9), (0.7, 0.2)]:
        r = solve_exponent(t, s)
        assert abs(t**r + s**r - 1.0) < 1e-10


def test_solve_exponent_extreme_bracket():
    # both norms near 1 push r into the thousands, past the initial bracket
    r = solve_exponent(0.9999, 0.9999)
    assert abs(0.9999**r + 0.9999**r - 1.0) < 1e-9
    assert r > 64


def test_solve_exponent_many_recovers_stability_index():
    for alpha in (0.5, 1.0, 1.5, 2.0):
        for n in (2, 3, 5):
            t = float(n) ** (-1.0 / alpha)
            assert abs(solve_exponent_many([t] * n) - alpha) < 1e-10


def test_solve_exponent_validation():
    with pytest.raises(ValueError):
        solve_exponent(1.0, 0.5)
    with pytest.raises(ValueError):
        solve_exponent(0.0, 0.5)
    with pytest.raises(ValueError):
        solve_exponent_many([0.5])
    with pytest.raises(ValueError):
        solve_exponent_many([])


def test_decay_rate_cauchy_is_constant_one():
    model = SymStable(alpha=1.0, scale=1.0, dim=1)
    pts = np.linspace(0.2, 15.0, 50)[:, None]
    g = decay_rate(model, 1.0, pts)
    assert np.allclose(g, 1.0, atol=1e-12)


def test_estimate_constant_exact_for_stable_models():
    cauchy = SymStable(alpha=1.0, scale=1.0, dim=1)
    assert estimate_constant(cauchy, 0.5, 0.5, 1.0) == pytest.approx(1.0, abs=1e-9)
    gauss = Gaussian(form=np.eye(1))
    c = estimate_constant(gauss, 2.0**-0.5, 2.0**-0.5, 2.0)
    assert c == pytest.approx(1.0, abs=1e-9)


def test_estimate_constant_rejects_degenerate_modulus():
    # scale so small the cf is numerically 1 on the whole annulus
    flat = SymStable(alpha=1.0, scale=1e-20, dim=1)
    with pytest.raises(ValueError):
        estimate_constant(flat, 0.5, 0.5, 1.0)
    lattice = Empirical(samples=np.zeros((3, 1)))
    with pytest.raises(ValueError):
        estimate_constant(lattice, 0.5, 0.5, 1.0)


def test_decay_profile_pipeline():
    model = SymStable(alpha=1.0, scale=1.0, dim=1)
    profile = decay_profile(model, np.array([[0.5]]), np.array([[0.5]]))
    assert profile.t == pytest.approx(0.5, abs=1e-14)
    assert profile.s == pytest.approx(0.5, abs=1e-14)
    assert abs(profile.r - 1.0) < 1e-12
    assert profile.c == pytest.approx(1.0, abs=1e-9)
    assert profile.sampled
    assert len(profile.annulus_samples) == 64
    for _, g in profile.annulus_samples:
        assert g >= profile.c - 1e-12


def test_decay_profile_validation():
    with pytest.raises(ValueError):
        DecayProfile(t=0.5, s=0.5, r=2.0, c=1.0)  # 0.25 + 0.25 != 1
    with pytest.raises(ValueError):
        DecayProfile(t=0.5, s=0.5, r=1.0, c=-1.0)
    with pytest.raises(ValueError):
        DecayProfile(t=0.5, s=0.5, r=1.0, c=1.0, annulus_samples=(((1.0,), 0.5),))
    payload = DecayProfile(t=0.5, s=0.5, r=1.0, c=1.0).to_dict()
    assert set(payload) == {"t", "s", "r", "c", "sampled", "annulus_samples"}


def test_verify_bound_holds_and_detects_violations():
    model = SymStable(alpha=1.0, scale=1.0, dim=1)
    check = verify_bound(model, 1.0, 1.0, rays=8, radii=16)
    assert check.ok
    assert len(list(check.rows())) == 2 * 16  # d = 1 has exactly two rays
    # an inflated constant claims more decay than the cf delivers
    bad = verify_bound(model, 1.0, 1.05, rays=8, radii=16)
    assert not bad.ok
    assert bad.max_excess > 0.0
    assert all(radius > 1.0 for _, radius, _ in bad.violations)


def test_verify_bound_radius_validation():
    model = SymStable(alpha=1.0, scale=1.0, dim=1)
    with pytest.raises(ValueError):
        verify_bound(model, 1.0, 1.0, radii=np.array([0.5, 2.0]))
    with pytest.raises(ValueError):
        verify_bound(model, 1.0, 1.0, radius_range=(0.5, 20.0))


def test_bound_monte_carlo_outside_unit_ball():
    # 1e4 random points with |v| > 1: the sampled annulus constant must
    # bound the decay rate everywhere it claims to
    model = SymStable(alpha=1.0, scale=1.0, dim=2)
    c = estimate_constant(model, 0.5, 0.5, 1.0)
    rng = np.random.default_rng(77)
    dirs = sphere_directions(2, 10000)
    radii = rng.uniform(1.0, 20.0, size=dirs.shape[0])
    pts = dirs * radii[:, None]
    g = decay_rate(model, 1.0, pts)
    assert np.all(g >= c - 1e-9)


def test_integrability_estimate_analytic_values():
    # d = 1, r = 1, c = 1: 2 + 2 * integral_1^inf e^-rho drho = 2 + 2/e
    assert integrability_estimate(1.0, 1.0, 1) == pytest.approx(2.0 + 2.0 / math.e, rel=1e-9)
    # d = 2, r = 2, c = 1: pi + 2 pi * integral_1^inf e^{-rho^2} rho drho
    expected = math.pi + 2.0 * math.pi * (math.exp(-1.0) / 2.0)
    assert integrability_estimate(2.0, 1.0, 2) == pytest.approx(expected, rel=1e-9)
    with pytest.raises(ValueError):
        integrability_estimate(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        integrability_estimate(1.0, -1.0, 1)
