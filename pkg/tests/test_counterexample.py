import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from radcomplex.counterexample import counterexample_instance, counterexample_mc_crosscheck, refute_conjecture
from radcomplex.estimator import ExpectationEngine, Method


@pytest.mark.parametrize("n, lhs, rhs, ratio", [(1, 0.5, 1.0, 0.5), (4, 2.0, 2.0, 1.0), (100, 50.0, 10.0, 5.0)])
def test_instance_examples(n, lhs, rhs, ratio):
    inst = counterexample_instance(n)
    assert (inst.lhs, inst.rhs, inst.ratio) == (lhs, rhs, ratio)


def test_instance_rejects_empty():
    with pytest.raises(ValueError):
        counterexample_instance(0)


def test_ratio_increasing():
    ratios = [counterexample_instance(n).ratio for n in (1, 4, 16, 64, 256, 1024)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[4] == 8.0


def test_refute_examples():
    assert refute_conjecture(1.0, 100) == 5
    assert refute_conjecture(10.0, 1000) == 401
    assert refute_conjecture(10.0, 100) is None
    with pytest.raises(ValueError):
        refute_conjecture(0.0, 10)


@pytest.mark.parametrize("K", [0.1, 0.5, 1.0, 1.3, 2.0, 2.5, 7.0, math.pi])
def test_refute_is_minimal(K):
    n = refute_conjecture(K, 10_000)
    assert n / 2 > K * math.sqrt(n)
    assert n == 1 or (n - 1) / 2 <= K * math.sqrt(n - 1)


def test_enumeration_n2():
    check = counterexample_mc_crosscheck(2)
    assert check.lhs.method is Method.EXACT_ENUM
    assert check.lhs.mean == (0 + 1 + 1 + 2) / 4
    assert_allclose(check.rhs.mean, math.sqrt(2), rtol=1e-15)
    assert check.agrees()


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_enumeration_matches_itertools(n):
    # every pattern: projection attains the positive count, identity attains sqrt(n)
    pats = list(itertools.product([-1, 1], repeat=n))
    lhs = np.mean([sum(s > 0 for s in p) for p in pats])
    rhs = np.mean([math.sqrt(sum(s * s for s in p)) for p in pats])
    check = counterexample_mc_crosscheck(n)
    assert_allclose(check.lhs.mean, lhs, atol=1e-12)
    assert_allclose(check.rhs.mean, rhs, atol=1e-12)
    assert check.agrees()


def test_monte_carlo_n16():
    check = counterexample_mc_crosscheck(16, ExpectationEngine.monte_carlo(10_000, seed=3))
    assert abs(check.lhs.mean - 8.0) <= 3 * check.lhs.std_error
    assert check.agrees()
