import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from radcomplex.classes import FiniteClass, LinearNormBall, ProductClass, Sample
from radcomplex.estimator import (
    ComplexityEstimate,
    ExpectationEngine,
    Method,
    block_generator,
    complexity_scalar,
    complexity_vector,
    expectation,
    rademacher_sum_norm,
    resolve_threads,
    sign_patterns,
)
from radcomplex.lipschitz import EuclideanNorm, MaxCoordinate
from radcomplex.subgaussian import SubgaussianDist


def brute_scalar(tables, loss):
    """E max_m sum_i eps_i h(tables[m, i]) by itertools over all sign patterns."""
    M, n, _ = tables.shape
    vals = np.array([[loss(tables[m, i]) for i in range(n)] for m in range(M)])
    return np.mean([max(np.dot(s, vals[m]) for m in range(M)) for s in itertools.product([-1, 1], repeat=n)])


def brute_vector(tables):
    M, n, K = tables.shape
    return np.mean([
        max(float(np.sum(np.reshape(s, (n, K)) * tables[m])) for m in range(M))
        for s in itertools.product([-1, 1], repeat=n * K)
    ])


def test_engine_validation():
    with pytest.raises(ValueError):
        ExpectationEngine.monte_carlo(50)
    with pytest.raises(ValueError):
        ExpectationEngine(Method.EXACT_ENUM, 0, dist=SubgaussianDist.standard_normal())
    with pytest.raises(ValueError):
        ExpectationEngine.exact(seed=2**64)


def test_estimate_invariants():
    with pytest.raises(ValueError):
        ComplexityEstimate(1.0, 0.1, 4, Method.EXACT_ENUM)
    with pytest.raises(ValueError):
        ComplexityEstimate(1.0, -0.1, 4, Method.MONTE_CARLO)


def test_sign_patterns_cover_cube():
    S = sign_patterns(4)
    assert S.shape == (16, 4)
    assert len({tuple(r) for r in S}) == 16
    assert_array_equal(sign_patterns(4, 3, 7), S[3:7])


def test_scalar_examples():
    eng = ExpectationEngine.exact()
    single = FiniteClass(np.array([[[0.3, -0.2], [1.0, 0.5]]]))
    assert abs(complexity_scalar(single, EuclideanNorm(), eng).mean) < 1e-15
    pm = FiniteClass(np.array([[[2.0]], [[-2.0]]]))
    assert complexity_scalar(pm, MaxCoordinate(), eng).mean == 2.0
    two = FiniteClass(np.array([[[1.0], [0.0]], [[0.0], [1.0]]]))
    assert complexity_scalar(two, MaxCoordinate(), eng).mean == 0.5


def test_vector_examples():
    eng = ExpectationEngine.exact()
    assert complexity_vector(FiniteClass(np.ones((1, 2, 2))), eng).mean == 0.0
    pm = FiniteClass(np.array([[[1.0]], [[-1.0]]]))
    assert complexity_vector(ProductClass([pm, pm]), eng).mean == 2.0
    ball = LinearNormBall(Sample(np.eye(2)), 1, 1.0)
    assert_allclose(complexity_vector(ball, eng).mean, math.sqrt(2), rtol=1e-15)


def test_rademacher_sum_norm_examples():
    eng = ExpectationEngine.exact()
    assert_allclose(rademacher_sum_norm(Sample([[0.6, 0.8, 0.0]]), eng).mean, 1.0)
    assert_allclose(rademacher_sum_norm(Sample(np.eye(5)), eng).mean, math.sqrt(5))
    rng = np.random.default_rng(0)
    X = rng.normal(size=(10, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    est = rademacher_sum_norm(Sample(X), ExpectationEngine.monte_carlo(10_000, seed=1))
    assert est.mean <= math.sqrt(10) + 3 * est.std_error


def test_exact_matches_brute_force():
    rng = np.random.default_rng(42)
    eng = ExpectationEngine.exact()
    for _ in range(25):
        M, n, K = rng.integers(1, 5), rng.integers(1, 4), rng.integers(1, 4)
        tables = rng.uniform(-1, 1, size=(M, n, K))
        cls = FiniteClass(tables)
        assert_allclose(complexity_scalar(cls, EuclideanNorm(), eng).mean, brute_scalar(tables, EuclideanNorm()),
                        atol=1e-12)
        assert_allclose(complexity_vector(cls, eng).mean, brute_vector(tables), atol=1e-12)


def test_exact_enum_size_limit():
    cls = FiniteClass(np.zeros((1, 7, 3)))
    with pytest.raises(ValueError, match="at most 20"):
        complexity_vector(cls, ExpectationEngine.exact())


def test_monte_carlo_agrees_with_exact_over_seeds():
    rng = np.random.default_rng(5)
    cls = FiniteClass(rng.uniform(-1, 1, size=(4, 3, 2)))
    exact = complexity_vector(cls, ExpectationEngine.exact()).mean
    hits = 0
    for seed in range(100):
        est = complexity_vector(cls, ExpectationEngine.monte_carlo(2000, seed=seed))
        hits += abs(est.mean - exact) <= 4 * est.std_error
    assert hits >= 99


def test_monotone_in_class():
    rng = np.random.default_rng(8)
    tables = rng.uniform(-1, 1, size=(6, 3, 2))
    eng = ExpectationEngine.exact()
    small, big = FiniteClass(tables[:3]), FiniteClass(tables)
    assert complexity_vector(small, eng).mean <= complexity_vector(big, eng).mean + 1e-15
    assert complexity_scalar(small, EuclideanNorm(), eng).mean <= complexity_scalar(big, EuclideanNorm(), eng).mean


def test_singleton_baseline_monte_carlo():
    cls = FiniteClass(np.random.default_rng(2).uniform(-1, 1, size=(1, 5, 3)))
    est = complexity_vector(cls, ExpectationEngine.monte_carlo(5000, seed=3, dist=SubgaussianDist.uniform(2)))
    assert abs(est.mean) <= 3 * est.std_error


def test_determinism_across_threads():
    cls = FiniteClass(np.random.default_rng(3).uniform(-1, 1, size=(5, 4, 3)))
    base = ExpectationEngine.monte_carlo(20_000, seed=77, dist=SubgaussianDist.standard_normal())
    results = {t: complexity_vector(cls, ExpectationEngine(**{**base.__dict__, "threads": t})) for t in (1, 2, 4, 7)}
    ref = results[1]
    for est in results.values():
        assert est.mean == ref.mean and est.std_error == ref.std_error


def test_thread_env(monkeypatch):
    monkeypatch.setenv("RADCOMPLEX_THREADS", "3")
    assert resolve_threads() == 3
    monkeypatch.setenv("RADCOMPLEX_THREADS", "0")
    assert resolve_threads() >= 1
    monkeypatch.setenv("RADCOMPLEX_THREADS", "x")
    with pytest.raises(ValueError):
        resolve_threads()


def test_block_streams_are_independent_of_order():
    a = block_generator(9, 3).standard_normal(5)
    block_generator(9, 2).standard_normal(100)
    assert_array_equal(a, block_generator(9, 3).standard_normal(5))
    assert not np.array_equal(a, block_generator(9, 4).standard_normal(5))


def test_standard_error_formula():
    est = expectation(lambda s, g: s[:, 0], 1, ExpectationEngine.monte_carlo(1000, seed=1))
    values = np.concatenate([
        SubgaussianDist.rademacher().sample(block_generator(1, j), (min(1024, 1000), 1))[:, 0] for j in range(1)
    ])
    assert_allclose(est.mean, values.mean(), rtol=1e-15)
    assert_allclose(est.std_error, values.std(ddof=1) / math.sqrt(1000), rtol=1e-12)
