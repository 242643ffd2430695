"""Word and validation layer: norms, commutation, enumeration."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autophage.linops import (
    CommutationError,
    ContractionSystem,
    LinearMap,
    commutation_tolerance,
    commutator_norm,
    enumerate_words,
    max_word_norm,
    operator_norm,
    pair_commutes,
    power_until_strict,
    spectral_radius,
    validate_system,
)


def test_operator_norm_matches_gram_eigenvalue_route():
    rng = np.random.default_rng(11)
    for _ in range(20):
        d = rng.integers(1, 7)
        a = rng.standard_normal((d, d))
        # independent oracle: ||a||^2 is the top eigenvalue of a^T a
        gram_top = np.linalg.eigvalsh(a.T @ a)[-1]
        assert abs(operator_norm(a) - np.sqrt(gram_top)) < 1e-10


def test_operator_norm_exact_values():
    assert operator_norm(np.diag([3.0, -5.0])) == 5.0
    assert operator_norm([[0.0, 2.0], [0.0, 0.0]]) == 2.0
    assert operator_norm(np.eye(4)) == 1.0


def test_spectral_radius_exact_values():
    assert spectral_radius([[0.0, 1.0], [0.0, 0.0]]) == 0.0
    assert spectral_radius(np.diag([0.2, -0.7])) == 0.7
    # rotation scaled by 0.8 has both eigenvalues on the circle of radius 0.8
    th = 0.3
    rot = 0.8 * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert abs(spectral_radius(rot) - 0.8) < 1e-12


def test_commutator_norm_hand_example():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    b = np.diag([1.0, 2.0])
    # ab - ba = [[0, 2], [0, 0]] - [[0, 1], [0, 0]] = [[0, 1], [0, 0]]
    assert commutator_norm(a, b) == 1.0
    assert commutator_norm(b, b) == 0.0


def test_commutation_tolerance_formula():
    a = np.diag([2.0])
    b = np.diag([3.0])
    assert commutation_tolerance(a, b, scale=1e-10) == pytest.approx(1e-10 * 7.0)


def test_pair_commutes_scale_sensitivity():
    a = np.array([[0.5, 1e-13], [0.0, 0.5]])
    b = np.diag([0.5, 0.25])
    assert pair_commutes(a, b, scale=1e-9)
    assert not pair_commutes(a, b, scale=1e-16)


def test_linear_map_wrapper():
    m = LinearMap(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert m.dim == 2
    assert np.array_equal(m(np.array([1.0, 2.0])), np.array([2.0, 1.0]))
    assert np.array_equal(m.adjoint.entries, m.entries.T)
    sq = m @ m
    assert np.array_equal(sq.entries, np.eye(2))
    with pytest.raises(ValueError):
        LinearMap(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        LinearMap(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_validate_system_reports_and_commutation_error():
    report = validate_system([np.diag([0.5, 0.2]), np.diag([0.9, 0.1])])
    assert report.kinds == ("strict", "strict")
    assert report.norms == (0.5, 0.9)
    assert report.invertible == (True, True)
    assert report.commutator_norms[0][:2] == (0, 1)

    jordan = np.array([[0.9, 10.0], [0.0, 0.9]])
    report = validate_system([jordan])
    assert report.kinds == ("eventual",)

    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    b = np.diag([1.0, 2.0])
    with pytest.raises(CommutationError) as info:
        validate_system([a, b])
    assert info.value.pair == (0, 1)
    assert info.value.norm == 1.0

    with pytest.raises(ValueError):
        validate_system([])
    with pytest.raises(ValueError):
        validate_system([np.eye(2), np.eye(3)])


def test_contraction_system_rejects_bad_maps():
    sys_ok = ContractionSystem.from_maps([np.diag([0.5, 0.3]), np.diag([0.2, 0.9])])
    assert sys_ok.dim == 2
    with pytest.raises(ValueError, match="singular"):
        ContractionSystem.from_maps([np.diag([0.5, 0.0])])
    with pytest.raises(ValueError, match="not even eventually"):
        ContractionSystem.from_maps([np.diag([1.5, 0.5])])


def test_power_until_strict_against_matrix_power():
    jordan = np.array([[0.9, 10.0], [0.0, 0.9]])
    k = power_until_strict(jordan)
    assert operator_norm(np.linalg.matrix_power(jordan, k)) < 1.0
    assert operator_norm(np.linalg.matrix_power(jordan, k - 1)) >= 1.0
    assert power_until_strict(np.diag([0.5])) == 1
    with pytest.raises(ValueError):
        power_until_strict(np.eye(2))


def test_enumerate_words_products_and_labels():
    a = np.diag([0.5, 0.2])
    b = np.array([[0.0, 0.3], [0.3, 0.0]])
    words = enumerate_words(a, b, 3)
    assert len(words) == 8
    assert [w.label for w in words[:3]] == ["aaa", "aab", "aba"]
    # every product must equal the left-to-right composition of its letters
    gens = (a, b)
    for w in words:
        expected = np.eye(2)
        for letter in w.letters:
            expected = expected @ gens[letter]
        assert np.allclose(w.product, expected, atol=1e-15)

    (empty,) = enumerate_words(a, b, 0)
    assert empty.label == "e"
    assert np.array_equal(empty.product, np.eye(2))

    with pytest.raises(ValueError):
        enumerate_words(a, b, -1)
    with pytest.raises(ValueError):
        enumerate_words(a, b, 25)
    with pytest.raises(ValueError):
        enumerate_words(a, np.eye(3), 2)


def test_enumerate_words_streams_past_threshold():
    a = np.diag([0.5])
    out = enumerate_words(a, a, 17)
    assert not isinstance(out, list)
    assert sum(1 for _ in out) == 2**17


def test_max_word_norm_commuting_matches_brute_force():
    a = np.diag([0.7, 0.2])
    b = np.diag([0.3, 0.6])
    n = 6
    brute = max(
        operator_norm(np.diag([0.7**i * 0.3 ** (n - i), 0.2**i * 0.6 ** (n - i)]))
        for i in range(n + 1)
    )
    assert max_word_norm(a, b, n) == pytest.approx(brute, abs=1e-14)
    assert max_word_norm(a, b, 0) == 1.0


def test_max_word_norm_noncommuting_matches_enumeration():
    a = np.array([[0.6, 0.2], [0.0, 0.5]])
    b = np.array([[0.5, 0.0], [0.3, 0.4]])
    assert not pair_commutes(a, b)
    n = 5
    brute = max(w.norm() for w in enumerate_words(a, b, n))
    assert max_word_norm(a, b, n) == pytest.approx(brute, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-0.95, 0.95), min_size=2, max_size=4),
    st.lists(st.floats(-0.95, 0.95), min_size=2, max_size=4),
    st.integers(1, 7),
)
def test_word_norm_submultiplicative_bound(d1, d2, length):
    d = min(len(d1), len(d2))
    a = np.diag(d1[:d])
    b = np.diag(d2[:d])
    bound = max(operator_norm(a), operator_norm(b)) ** length
    assert max_word_norm(a, b, length) <= bound + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4), st.integers(0, 3))
def test_polynomials_in_one_matrix_commute(coeffs, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((3, 3))
    poly = coeffs[0] * np.eye(3) + coeffs[1] * m + coeffs[2] * m @ m
    assert pair_commutes(m, poly, scale=1e-9)
