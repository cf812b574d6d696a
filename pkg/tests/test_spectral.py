import math
from fractions import Fraction

import numpy as np
import pytest

from skewlines.geometry import CoplanarPair, LineConfiguration, normalize_line
from skewlines.spectral import (
    BadMultiIndex,
    NotSymmetric,
    OutOfDomain,
    ParallelVectors,
    b_form,
    cross_norm_matrix,
    default_zero_tol,
    matrix_report,
    signature,
    signed_gram_matrix,
    taylor_coefficient,
    truncated_cross_norm,
    verify_lemma,
)

from helpers import random_direction_set, random_skew_configuration


def sqrt_series_coefficient(k: int) -> Fraction:
    """Coefficient of u^k in 1 - sqrt(1 - u), by the binomial recurrence.

    Independent oracle: c_1 = 1/2 and c_{k+1} = c_k * (2k - 1) / (2k + 2).
    """
    c = Fraction(1, 2)
    for j in range(1, k):
        c = c * Fraction(2 * j - 1, 2 * j + 2)
    return c


class TestSignature:
    def test_identity(self):
        assert signature(np.eye(3), 1e-8) == (3, 0, 0)

    def test_mixed_diagonal(self):
        assert signature(np.diag([2.0, 0.0, -1.0]), 1e-8) == (1, 1, 1)

    def test_b_form_signature(self):
        assert signature(b_form(), 1e-8) == (3, 3, 0)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            signature(np.array([[0.0, 1.0], [0.5, 0.0]]), 1e-8)

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            signature(np.eye(2), 0.0)


class TestMatrixReport:
    def test_eigenvalues_sorted_descending(self):
        r = matrix_report(np.diag([1.0, 5.0, -2.0]))
        assert np.allclose(r.eigenvalues, [5.0, 1.0, -2.0])

    def test_spectral_reconstruction(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            m = rng.standard_normal((6, 6))
            m = m + m.T
            r = matrix_report(m)
            vals, vecs = np.linalg.eigh(m)
            assert np.allclose(vecs @ np.diag(vals) @ vecs.T, r.entries, atol=1e-8)
            assert np.allclose(np.sort(vals)[::-1], r.eigenvalues, atol=1e-12)

    def test_default_zero_tol_floor(self):
        assert default_zero_tol(np.array([0.5, -0.25])) == pytest.approx(1e-8)
        assert default_zero_tol(np.array([100.0, -1.0])) == pytest.approx(1e-6)

    def test_json_shape(self):
        d = matrix_report(np.eye(2)).to_json_dict()
        assert set(d) == {"n", "entries", "eigenvalues", "signature", "zero_tol"}
        assert d["n"] == 2
        assert d["signature"] == [2, 0, 0]


class TestCrossNormMatrix:
    def test_two_orthogonal_vectors(self):
        r = cross_norm_matrix([[1, 0, 0], [0, 1, 0]])
        assert np.allclose(r.entries, [[0, 1], [1, 0]])
        assert np.allclose(r.eigenvalues, [1.0, -1.0])
        assert r.signature == (1, 1, 0)

    def test_standard_basis(self):
        r = cross_norm_matrix(np.eye(3))
        # J - I spectrum: one eigenvalue 2, two eigenvalues -1
        assert np.allclose(r.eigenvalues, [2.0, -1.0, -1.0])
        assert r.signature == (1, 2, 0)

    def test_six_random_vectors(self):
        rng = np.random.default_rng(21)
        r = cross_norm_matrix(random_direction_set(rng, 6))
        assert r.signature == (1, 5, 0)

    def test_parallel_vectors_identified(self):
        with pytest.raises(ParallelVectors) as err:
            cross_norm_matrix([[1, 0, 0], [0, 1, 0], [-1, 0, 0]])
        assert err.value.indices == (1, 3)

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            cross_norm_matrix([[1, 0, 0], [0, 2, 0]])


class TestTaylorCoefficient:
    def test_exact_low_order_values(self):
        assert taylor_coefficient(1, 2, 0, 0).value == Fraction(1, 2)
        assert taylor_coefficient(1, 1, 1, 0).value == Fraction(1, 1)

    def test_pure_power_multiindex_matches_series_recurrence(self):
        for k in range(1, 12):
            assert taylor_coefficient(k, 2 * k, 0, 0).value == sqrt_series_coefficient(k)

    def test_known_series_values(self):
        assert sqrt_series_coefficient(1) == Fraction(1, 2)
        assert sqrt_series_coefficient(2) == Fraction(1, 8)
        assert sqrt_series_coefficient(3) == Fraction(1, 16)

    def test_positivity(self):
        for k in range(1, 6):
            for a in range(0, 2 * k + 1):
                for b in range(0, 2 * k - a + 1):
                    c = 2 * k - a - b
                    assert taylor_coefficient(k, a, b, c).value > 0

    def test_bad_multi_index(self):
        with pytest.raises(BadMultiIndex):
            taylor_coefficient(1, 1, 0, 0)
        with pytest.raises(BadMultiIndex):
            taylor_coefficient(0, 0, 0, 0)
        with pytest.raises(BadMultiIndex):
            taylor_coefficient(1, 3, 0, -1)


class TestTruncatedCrossNorm:
    def test_zero_argument(self):
        for terms in (1, 5, 100):
            assert truncated_cross_norm(0.0, terms) == 1.0

    def test_x_one_large_order_approaches_zero_from_above(self):
        value = truncated_cross_norm(1.0, 10_000)
        assert 0.0 < value < 0.01

    def test_agreement_at_06(self):
        assert truncated_cross_norm(0.6, 50) == pytest.approx(0.8, abs=1e-6)

    def test_monotone_decreasing_in_order(self):
        prev = truncated_cross_norm(0.9, 1)
        for terms in range(2, 60):
            cur = truncated_cross_norm(0.9, terms)
            assert cur < prev
            prev = cur

    def test_upper_bounds_exact_value(self):
        for x in np.linspace(-0.95, 0.95, 21):
            for terms in (1, 3, 10, 40):
                assert truncated_cross_norm(float(x), terms) >= math.sqrt(1 - x * x) - 1e-15

    def test_domain_errors(self):
        with pytest.raises(OutOfDomain):
            truncated_cross_norm(1.5, 10)
        with pytest.raises(OutOfDomain):
            truncated_cross_norm(0.5, 0)


class TestBForm:
    def test_block_structure(self):
        b = b_form()
        assert np.allclose(b[:3, 3:], np.eye(3))
        assert np.allclose(b[3:, :3], np.eye(3))
        assert np.allclose(b[:3, :3], 0) and np.allclose(b[3:, 3:], 0)

    def test_self_inverse(self):
        b = b_form()
        assert np.allclose(b @ b, np.eye(6))

    def test_pairing_formula(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            qa, va = rng.standard_normal(3), rng.standard_normal(3)
            qb, vb = rng.standard_normal(3), rng.standard_normal(3)
            ua = np.concatenate([qa, va])
            ub = np.concatenate([qb, vb])
            assert float(ua @ b_form() @ ub) == pytest.approx(float(qa @ vb) + float(va @ qb), abs=1e-12)


class TestSignedGramMatrix:
    def test_two_line_example(self):
        config = LineConfiguration(
            (normalize_line([0, 0, 0], [1, 0, 0]), normalize_line([0, 0, 1], [0, 1, 0])), 1.0
        )
        r = signed_gram_matrix(config)
        assert np.allclose(r.entries, [[0, -1], [-1, 0]])
        assert r.signature == (1, 1, 0)

    def test_signature_cap_on_random_configurations(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            config = random_skew_configuration(rng, 8)
            p, q, z = signed_gram_matrix(config).signature
            assert p <= 3 and q <= 3

    def test_entries_agree_with_plucker_route(self):
        rng = np.random.default_rng(24)
        b = b_form()
        for _ in range(20):
            config = random_skew_configuration(rng, 5)
            r = signed_gram_matrix(config)
            from skewlines.geometry import plucker

            coords = [np.concatenate([plucker(l).q, plucker(l).v]) for l in config.lines]
            for i in range(5):
                for j in range(5):
                    assert r.entries[i, j] == pytest.approx(float(coords[i] @ b @ coords[j]), abs=1e-12)

    def test_coplanar_pair_rejected(self):
        config = LineConfiguration(
            (normalize_line([0, 0, 0], [1, 0, 0]), normalize_line([0, 0, 0], [0, 1, 0])), 1.0
        )
        with pytest.raises(CoplanarPair) as err:
            signed_gram_matrix(config)
        assert err.value.indices == (1, 2)


class TestVerifyLemma:
    def test_two_orthogonal(self):
        check = verify_lemma([[1, 0, 0], [0, 1, 0]])
        assert check.passed and check.report.signature == (1, 1, 0)

    def test_ten_random(self):
        rng = np.random.default_rng(25)
        check = verify_lemma(random_direction_set(rng, 10))
        assert check.passed and check.report.signature == (1, 9, 0)

    def test_signature_for_small_sets(self):
        rng = np.random.default_rng(26)
        for n in range(2, 13):
            for _ in range(20):
                check = verify_lemma(random_direction_set(rng, n))
                assert check.passed, f"n={n}: got {check.report.signature}"

    def test_nearly_parallel_still_passes_with_conditioning_note(self):
        angle = 1e-3
        vs = np.array([
            [1.0, 0.0, 0.0],
            [math.cos(angle), math.sin(angle), 0.0],
            [0.0, 1.0, 0.0],
        ])
        check = verify_lemma(vs)
        assert check.passed
        assert check.min_abs_eigenvalue < 1e-2  # near-singular direction reported

    def test_all_ones_quadratic_form_positive(self):
        rng = np.random.default_rng(27)
        for n in (3, 6, 9):
            s = cross_norm_matrix(random_direction_set(rng, n)).entries
            ones = np.ones(n)
            assert float(ones @ s @ ones) > 0.0

    def test_nonpositive_on_zero_sum_vectors(self):
        rng = np.random.default_rng(28)
        for n in (4, 7):
            s = cross_norm_matrix(random_direction_set(rng, n)).entries
            t = rng.standard_normal((10_000, n))
            t -= t.mean(axis=1, keepdims=True)
            values = np.einsum("mi,ij,mj->m", t, s, t)
            assert np.all(values <= 1e-10)
