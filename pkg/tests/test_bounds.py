import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from radcomplex.bounds import (
    frobenius_bound,
    kmeans_bound,
    kmeans_chain,
    ltl_reduction_bound,
    operator_kernel_bound,
    theorem1_bound,
)
from radcomplex.classes import FeatureMapFinite, KMeansCenters, LinearNormBall, Sample
from radcomplex.estimator import ExpectationEngine, complexity_vector
from radcomplex.lipschitz import EuclideanNorm, MaxCoordinate


def test_theorem1_examples():
    assert_allclose(theorem1_bound(0.5, 0.0, 9, 2 * math.exp(-2)).value, 1.5, rtol=1e-14)
    expected = 0.2 + 0.1 + math.sqrt(9 * math.log(20) / 200)
    assert_allclose(theorem1_bound(0.2, 5.0, 100, 0.1).value, expected, rtol=1e-15)
    assert_allclose(expected, 0.6672, atol=1e-4)
    for delta in (0.0, 1.0, -0.1, 2 * math.exp(-2) * 4):
        with pytest.raises(ValueError):
            theorem1_bound(0.0, 0.0, 5, delta)


def test_kmeans_examples():
    assert_allclose(kmeans_bound(1, 1).value, 3 * math.sqrt(2))
    assert_allclose(kmeans_bound(2, 100).value, 60 * math.sqrt(2))
    with pytest.raises(ValueError):
        kmeans_bound(0, 5)


def test_frobenius_examples():
    assert frobenius_bound(1.0, Sample([[1.0, 0.0]]), 1).value == 1.0
    assert frobenius_bound(1.0, Sample(np.eye(4)), 1).value == 2.0
    rng = np.random.default_rng(0)
    X = rng.normal(size=(10, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    b = frobenius_bound(2.0, Sample(X), 3)
    assert_allclose(b.value, 2 * math.sqrt(30))
    est = complexity_vector(LinearNormBall(Sample(X), 3, 2.0), ExpectationEngine.monte_carlo(10_000, seed=1))
    assert b.value >= est.mean + 3 * est.std_error


def test_frobenius_tight_on_orthonormal_sample():
    n = 6
    exact = complexity_vector(LinearNormBall(Sample(np.eye(n)), 1, 1.0), ExpectationEngine.exact())
    assert_allclose(exact.mean, frobenius_bound(1.0, Sample(np.eye(n)), 1).value, rtol=1e-14)


def test_operator_examples():
    assert operator_kernel_bound(1.0, 1.0, [0.0, 0.0]).value == 0.0
    assert_allclose(operator_kernel_bound(1.0, 1.0, [1.0] * 4).value, 2 * math.sqrt(2))
    with pytest.raises(ValueError):
        operator_kernel_bound(1.0, 1.0, [1.0, -0.5])


def test_operator_scalar_case_matches_frobenius():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(7, 3))
    traces = np.sum(X**2, axis=1)
    L, B = 1.7, 0.6
    assert_allclose(operator_kernel_bound(L, B, traces).value,
                    math.sqrt(2) * L * frobenius_bound(B, Sample(X), 1).value, rtol=1e-14)


def test_ltl_examples():
    assert ltl_reduction_bound(1.0, 3, 0.0).value == 0.0
    assert_allclose(ltl_reduction_bound(1.0, 4, 10.0).value, 5 * math.sqrt(2))
    assert ltl_reduction_bound(1.0, 2, -1e-17).value == 0.0
    with pytest.raises(ValueError):
        ltl_reduction_bound(1.0, 2, -0.5)


def test_ltl_feature_map_instance_dominated():
    rng = np.random.default_rng(2)
    T, n, K = 2, 2, 2
    cls = FeatureMapFinite(rng.uniform(-1, 1, size=(3, T, n, K)))
    losses = [EuclideanNorm(), MaxCoordinate()]
    psi = cls.task_errors(losses)
    lhs = np.mean([max(np.dot(s, row) for row in psi) for s in itertools.product([-1, 1], repeat=T)])
    flat = cls.tables
    meta = np.mean([
        max(float(np.sum(np.reshape(s, flat.shape[1:]) * tab)) for tab in flat)
        for s in itertools.product([-1, 1], repeat=T * n * K)
    ])
    assert_allclose(complexity_vector(cls, ExpectationEngine.exact()).mean, meta, atol=1e-12)
    assert lhs <= ltl_reduction_bound(1.0, n, meta).value + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 5), st.floats(0, 5), st.integers(1, 50), st.integers(1, 50))
def test_monotone_inputs(a, b, k, n):
    lo, hi = min(a, b), max(a, b)
    assert kmeans_bound(min(k, n), n).value <= kmeans_bound(max(k, n), n).value
    assert kmeans_bound(k, min(k, n)).value <= kmeans_bound(k, max(k, n)).value
    assert operator_kernel_bound(lo, 1.0, [1.0, 2.0]).value <= operator_kernel_bound(hi, 1.0, [1.0, 2.0]).value
    assert operator_kernel_bound(1.0, 1.0, [lo]).value <= operator_kernel_bound(1.0, 1.0, [hi]).value
    assert ltl_reduction_bound(lo, 4, 2.0).value <= ltl_reduction_bound(hi, 4, 2.0).value
    assert ltl_reduction_bound(1.0, 4, lo).value <= ltl_reduction_bound(1.0, 4, hi).value
    if lo > 0:
        X = Sample([[1.0, 0.5]])
        assert frobenius_bound(lo, X, k).value <= frobenius_bound(hi, X, k).value
        assert frobenius_bound(1.0, X, min(k, n)).value <= frobenius_bound(1.0, X, max(k, n)).value


def test_kmeans_chain_small_sample():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(12, 3))
    X *= (rng.uniform(size=(12, 1)) ** (1 / 3)) / np.linalg.norm(X, axis=1, keepdims=True)
    links = kmeans_chain(KMeansCenters(Sample(X), 2), ExpectationEngine.monte_carlo(2000, seed=4))
    assert len(links) == 5
    for a, b in zip(links, links[1:]):
        assert a.mean - b.mean <= 3 * math.hypot(a.std_error, b.std_error)
