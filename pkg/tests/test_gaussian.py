"""Cofactor solve, covariance residual, stationary space."""

import math

import numpy as np
import pytest

from autophage.gaussian import (
    GaussianSpec,
    covariance_residual,
    gaussian_cofactor,
    stationary_covariance_space,
)


def random_shared_basis_pair(rng, dim):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    form = (q * rng.uniform(0.2, 3.0, dim)) @ q.T
    contraction = (q * rng.uniform(-0.9, 0.9, dim)) @ q.T
    return (form + form.T) / 2, (contraction + contraction.T) / 2


def test_cofactor_diagonal_exact():
    form = np.diag([2.0, 0.5, 1.0])
    contraction = np.diag([0.5, -0.3, 0.8])
    cof = gaussian_cofactor(form, contraction)
    expected = np.diag(np.sqrt(1.0 - np.array([0.5, -0.3, 0.8]) ** 2))
    assert np.allclose(cof, expected, atol=1e-14)
    # the defining identity, multiplied out by hand
    lhs = contraction @ form @ contraction.T + cof @ form @ cof.T
    assert np.allclose(lhs, form, atol=1e-14)


def test_cofactor_random_shared_basis():
    rng = np.random.default_rng(21)
    for _ in range(25):
        dim = int(rng.integers(1, 7))
        form, contraction = random_shared_basis_pair(rng, dim)
        cof = gaussian_cofactor(form, contraction)
        assert np.allclose(cof, cof.T, atol=1e-12)
        assert covariance_residual(form, contraction, cof) < 1e-10
        # cofactor shares the eigenbasis, hence commutes with both inputs
        assert np.allclose(cof @ contraction, contraction @ cof, atol=1e-10)


def test_cofactor_input_validation():
    form = np.array([[2.0, 0.3], [0.3, 1.0]])
    with pytest.raises(ValueError):
        gaussian_cofactor(form, np.array([[0.5, 0.4], [0.0, 0.5]]))  # not symmetric
    with pytest.raises(ValueError):
        gaussian_cofactor(form, np.diag([1.0, 0.5]))  # norm not < 1
    with pytest.raises(ValueError):
        gaussian_cofactor(form, np.diag([0.5, 0.0]))  # singular
    with pytest.raises(ValueError):
        gaussian_cofactor(form, np.diag([0.5, 0.5, 0.5]))  # shape mismatch
    with pytest.raises(ValueError):
        gaussian_cofactor(np.array([[1.0, 0.5], [0.0, 1.0]]), np.diag([0.5, 0.5]))
    rot = np.array([[0.0, -0.5], [0.5, 0.0]])  # skew, does not commute with form
    with pytest.raises(ValueError):
        gaussian_cofactor(form, rot)


def test_covariance_residual_detects_wrong_cofactor():
    form = np.diag([1.0, 2.0])
    contraction = np.diag([0.5, 0.5])
    wrong = np.diag([0.5, 0.5])
    # residual = |T P T^t + S P S^t - P| = |0.5 P - P| = 0.5 |P| = 1
    assert covariance_residual(form, contraction, wrong) == pytest.approx(1.0)


def test_stationary_space_dimensions():
    # 2 c^2 = 1 fixes every symmetric form: dimension 3 in d = 2
    c = 2.0**-0.5
    basis = stationary_covariance_space(c * np.eye(2), c * np.eye(2))
    assert len(basis) == 3
    for b in basis:
        assert np.allclose(b, b.T, atol=1e-12)
        image = c * np.eye(2) @ b @ (c * np.eye(2)).T * 2
        assert np.allclose(image, b, atol=1e-8)

    # t_i t_j + s_i s_j = 1 only on the diagonal: dimension 2
    first = np.diag([0.5, math.sqrt(3.0) / 2.0])
    second = np.diag([math.sqrt(3.0) / 2.0, 0.5])
    basis = stationary_covariance_space(first, second)
    assert len(basis) == 2

    # 2 * 0.25 = 0.5 != 1: nothing is fixed
    basis = stationary_covariance_space(0.5 * np.eye(2), 0.5 * np.eye(2))
    assert len(basis) == 0


def test_stationary_space_members_are_fixed():
    c = 2.0**-0.5
    first = np.diag([c, 0.5])
    second = np.diag([c, math.sqrt(3.0) / 2.0])
    basis = stationary_covariance_space(first, second)
    assert len(basis) == 2  # (1,1) and (2,2) slots both satisfy the identity
    for b in basis:
        image = first @ b @ first.T + second @ b @ second.T
        assert np.allclose(image, b, atol=1e-8)


def test_gaussian_spec_round_trip():
    rng = np.random.default_rng(8)
    form, contraction = random_shared_basis_pair(rng, 3)
    spec = GaussianSpec.build(form, contraction)
    assert spec.residual < 1e-10
    payload = spec.to_dict()
    assert set(payload) == {"P", "T", "S"}
    again = GaussianSpec.from_dict(payload)
    assert np.allclose(again.cofactor, spec.cofactor, atol=1e-15)
    with pytest.raises(ValueError, match="missing keys"):
        GaussianSpec.from_dict({"P": form.tolist(), "T": contraction.tolist()})
