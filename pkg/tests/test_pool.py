import math

import numpy as np
import pytest

from _oracles import binomial_pmf, compositions, multinomial_entropy_exact
from dpstream import (
    PoolWeights,
    Synopsis,
    SynopsisPool,
    empirical_pool_entropy,
    entropy_approximation,
    enumerate_full_pool,
    generate_pool,
    load_pool,
    sample_synopses,
    save_pool,
)
from dpstream.exceptions import InvalidDomainError, WeightRowError


class TestGeneratePool:
    def test_single_category(self):
        pool = generate_pool(n=7, k=1, pool_size=50, seed=1)
        assert np.all(pool.pdfs == 1.0)

    def test_two_trials_two_categories(self):
        pool = generate_pool(n=2, k=2, pool_size=100_000, seed=3)
        values, freq = np.unique(pool.counts, axis=0, return_counts=True)
        assert {tuple(v) for v in values} == {(2, 0), (1, 1), (0, 2)}
        rel = dict(zip((tuple(v) for v in values), freq / pool.pool_size))
        assert rel[(2, 0)] == pytest.approx(0.25, abs=0.01)
        assert rel[(1, 1)] == pytest.approx(0.50, abs=0.01)
        assert rel[(0, 2)] == pytest.approx(0.25, abs=0.01)

    def test_binomial_frequency_oracle(self):
        pool = generate_pool(n=4, k=2, pool_size=100_000, seed=11)
        target = math.comb(4, 2) / 2**4  # 0.375
        freq = np.mean(pool.counts[:, 0] == 2)
        assert freq == pytest.approx(target, abs=0.01)

    def test_deterministic(self):
        a = generate_pool(n=10, k=4, pool_size=40_000, seed=5)
        b = generate_pool(n=10, k=4, pool_size=40_000, seed=5)
        assert np.array_equal(a.counts, b.counts)

    def test_lattice_and_exact_normalization(self):
        pool = generate_pool(n=3, k=5, pool_size=500, seed=2)
        assert np.all(pool.counts.sum(axis=1) == 3)
        ratio = pool.pdfs / pool.precision_p
        assert np.max(np.abs(ratio - np.rint(ratio))) < 1e-12

    def test_invalid_domain(self):
        with pytest.raises(InvalidDomainError):
            generate_pool(n=0, k=2, pool_size=10, seed=0)
        with pytest.raises(InvalidDomainError):
            generate_pool(n=2, k=0, pool_size=10, seed=0)
        with pytest.raises(InvalidDomainError):
            generate_pool(n=2, k=2, pool_size=0, seed=0)

    def test_composition_coverage_small(self):
        pool = generate_pool(n=4, k=3, pool_size=200_000, seed=9)
        seen = {tuple(row) for row in np.unique(pool.counts, axis=0)}
        assert seen == set(compositions(4, 3))


class TestEntropy:
    def test_single_category_zero(self):
        assert entropy_approximation(100, 1) == 0.0

    def test_known_value(self):
        got = entropy_approximation(100, 2)
        expected = 0.5 * math.log(200 * math.pi * math.e) - math.log(2)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(3.028, abs=1e-3)

    def test_monotone_in_trials(self):
        assert entropy_approximation(200, 2) > entropy_approximation(100, 2)
        assert entropy_approximation(10_000, 5) > entropy_approximation(100, 5)

    def test_empirical_degenerate(self):
        pool = SynopsisPool(np.tile([2, 0], (50, 1)), trials=2, seed=0)
        assert empirical_pool_entropy(pool) == 0.0

    def test_empirical_uniform_binary(self):
        counts = np.array([[2, 0]] * 25 + [[0, 2]] * 25)
        pool = SynopsisPool(counts, trials=2, seed=0)
        assert empirical_pool_entropy(pool) == pytest.approx(math.log(2), abs=1e-12)

    def test_empirical_matches_exact_binomial(self):
        pool = generate_pool(n=4, k=2, pool_size=100_000, seed=21)
        pmf = binomial_pmf(4, 0.5)
        exact = float(-(pmf * np.log(pmf)).sum())
        assert empirical_pool_entropy(pool) == pytest.approx(exact, abs=0.01)

    def test_ratio_band_matches_enumeration(self):
        # the adequacy band holds where the CLT form tracks the exact entropy
        for k, n in [(2, 100), (5, 15), (10, 2)]:
            exact = multinomial_entropy_exact(n, k)
            approx = entropy_approximation(n, k)
            assert 0.9 <= exact / approx <= 1.1


class TestSampling:
    def test_point_mass_row(self):
        pool = generate_pool(n=2, k=2, pool_size=8, seed=0)
        weights = PoolWeights(np.array([[1.0] + [0.0] * 7]))
        idx = sample_synopses(pool, weights, q_index=0, count=50, rng_seed=4)
        assert np.all(idx == 0)

    def test_uniform_concentration(self):
        pool = generate_pool(n=2, k=2, pool_size=10, seed=0)
        weights = PoolWeights.uniform(1, 10)
        idx = sample_synopses(pool, weights, q_index=0, count=100_000, rng_seed=4)
        freq = np.bincount(idx, minlength=10) / idx.size
        sigma = math.sqrt(0.1 * 0.9 / idx.size)
        assert np.all(np.abs(freq - 0.1) <= 3 * sigma + 1e-12)

    def test_reproducible(self):
        pool = generate_pool(n=2, k=2, pool_size=10, seed=0)
        weights = PoolWeights.uniform(1, 10)
        a = sample_synopses(pool, weights, 0, count=1, rng_seed=123)
        b = sample_synopses(pool, weights, 0, count=1, rng_seed=123)
        assert a.tolist() == b.tolist()

    def test_unnormalized_row_rejected(self):
        pool = generate_pool(n=2, k=2, pool_size=4, seed=0)
        weights = PoolWeights(np.array([[0.5, 0.5, 0.5, 0.5]]))
        with pytest.raises(WeightRowError):
            sample_synopses(pool, weights, 0, count=1, rng_seed=0)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        pool = generate_pool(n=12, k=5, pool_size=300, seed=77)
        path = tmp_path / "pool.txt"
        save_pool(pool, path)
        loaded = load_pool(path)
        assert loaded.trials == pool.trials
        assert loaded.seed == pool.seed
        assert np.array_equal(loaded.counts, pool.counts)
        header = path.read_text().splitlines()[0]
        assert header == "# n=12 k=5 N=300 seed=77"


class TestSynopsis:
    def test_fields(self):
        s = Synopsis(np.array([1, 3]), trials=4, id=7)
        assert s.precision == 0.25
        assert np.allclose(s.pdf, [0.25, 0.75])
        with pytest.raises(ValueError):
            Synopsis(np.array([1, 1]), trials=4, id=0)

    def test_enumerate_full_pool(self):
        pool = enumerate_full_pool(3, 3)
        assert pool.pool_size == 10  # C(5, 2)
        assert {tuple(r) for r in pool.counts} == set(compositions(3, 3))
