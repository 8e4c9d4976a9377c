import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpstream import (
    SENSITIVITY_L1,
    CountVector,
    ProbabilityVector,
    SensitivityBound,
    kl_divergence,
    l1_distance,
    mse,
    normalize,
    quantize,
)
from dpstream.exceptions import DomainMismatchError, ZeroTotalError


def pv(*probs):
    return ProbabilityVector(np.array(probs, dtype=float))


class TestNormalize:
    def test_direct_ratio(self):
        assert np.allclose(normalize(np.array([1, 3])).probs, [0.25, 0.75])

    def test_single_category_mass(self):
        assert np.allclose(normalize(np.array([5, 0, 0])).probs, [1.0, 0.0, 0.0])

    def test_empty_slot_rejected(self):
        with pytest.raises(ZeroTotalError):
            normalize(np.array([0, 0]))

    @given(st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=30))
    def test_output_sums_to_one(self, counts):
        counts = np.array(counts)
        if counts.sum() == 0:
            counts[0] = 1
        p = normalize(counts)
        assert abs(p.probs.sum() - 1.0) <= 1e-9
        assert np.all(p.probs >= 0)


class TestL1Distance:
    def test_identity(self):
        p = pv(0.3, 0.7)
        assert l1_distance(p, p) == 0.0

    def test_maximum(self):
        assert l1_distance(pv(1, 0), pv(0, 1)) == 2.0

    def test_neighboring_datasets(self):
        d = l1_distance(normalize(np.array([2, 0])), normalize(np.array([2, 1])))
        assert d == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatchError):
            l1_distance(pv(1.0), pv(0.5, 0.5))

    @settings(max_examples=200)
    @given(
        st.lists(st.integers(0, 200), min_size=2, max_size=25),
        st.data(),
    )
    def test_neighbor_sensitivity_bounded(self, counts, data):
        counts = np.array(counts)
        if counts.sum() == 0:
            counts[0] = 5
        i = data.draw(st.integers(0, counts.size - 1))
        neighbor = counts.copy()
        if neighbor[i] > 0 and data.draw(st.booleans()):
            neighbor[i] -= 1
        else:
            neighbor[i] += 1
        if neighbor.sum() == 0:
            neighbor[i] += 2
        d = l1_distance(normalize(counts), normalize(neighbor))
        assert d <= SENSITIVITY_L1 + 1e-12


class TestKlDivergence:
    def test_identical_zero(self):
        p = pv(0.5, 0.5)
        assert kl_divergence(p, p, smoothing=0.0) == 0.0

    def test_closed_form(self):
        got = kl_divergence(pv(1, 0), pv(0.5, 0.5), smoothing=0.0)
        assert got == pytest.approx(math.log(2), abs=1e-12)

    def test_support_violation_is_infinite(self):
        assert kl_divergence(pv(0.5, 0.5), pv(1, 0), smoothing=0.0) == math.inf

    def test_negative_smoothing_rejected(self):
        with pytest.raises(ValueError):
            kl_divergence(pv(1, 0), pv(0, 1), smoothing=-1.0)

    @settings(max_examples=200)
    @given(
        st.lists(st.floats(0.01, 1.0), min_size=2, max_size=12),
        st.lists(st.floats(0.01, 1.0), min_size=2, max_size=12),
    )
    def test_gibbs_inequality(self, a, b):
        k = min(len(a), len(b))
        p = ProbabilityVector(np.array(a[:k]) / np.sum(a[:k]))
        q = ProbabilityVector(np.array(b[:k]) / np.sum(b[:k]))
        val = kl_divergence(p, q, smoothing=1e-6)
        assert val >= -1e-12
        assert kl_divergence(p, p, smoothing=1e-6) == pytest.approx(0.0, abs=1e-12)


class TestMse:
    def test_identity(self):
        p = pv(0.2, 0.8)
        assert mse(p, p) == 0.0

    def test_opposite_corners(self):
        assert mse(pv(1, 0), pv(0, 1)) == pytest.approx(1.0)

    def test_swap(self):
        assert mse(pv(0.25, 0.75), pv(0.75, 0.25)) == pytest.approx(0.25)


class TestQuantize:
    def test_zero_fixed_point(self):
        assert quantize(0.0, 0.1) == 0.0

    def test_round(self):
        assert quantize(0.3, 0.25) == pytest.approx(0.25)

    def test_half_rounds_up(self):
        assert quantize(0.375, 0.25) == pytest.approx(0.5)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            quantize(1.5, 0.25)
        with pytest.raises(ValueError):
            quantize(0.5, 1.0)

    @given(st.floats(0.0, 1.0), st.sampled_from([0.5, 0.25, 0.125, 0.1, 0.01]))
    def test_idempotent(self, x, p):
        once = quantize(x, p)
        assert quantize(min(once, 1.0), p) == pytest.approx(once, abs=1e-15)


class TestTypes:
    def test_probability_vector_invariants(self):
        with pytest.raises(ValueError):
            ProbabilityVector(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            ProbabilityVector(np.array([-0.1, 1.1]))

    def test_count_vector(self):
        c = CountVector(np.array([2, 3]))
        assert c.total == 5
        with pytest.raises(ValueError):
            CountVector(np.array([-1, 2]))

    def test_sensitivity_bound_fixed(self):
        assert SensitivityBound().delta_q == 2.0
        with pytest.raises(ValueError):
            SensitivityBound(delta_q=1.0)
