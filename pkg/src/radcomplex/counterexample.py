"""The orthonormal construction that defeats the norm-form contraction conjecture.

Take ``x_i = e_i`` (i <= n), the unit ball of operators as the class and the
norm as loss.  For a sign pattern eps:

* ``sup_T sum_i eps_i |T e_i|`` equals the number of positive signs, attained
  by the projection onto ``{e_i : eps_i = 1}``;
* ``sup_T |sum_i eps_i T e_i|`` equals ``sqrt(n)``, attained by the identity.

Averaging gives n/2 against sqrt(n), so no fixed constant can bound the
ratio.  Nothing here materializes an operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import ComplexityEstimate, ExpectationEngine, Method, expectation

__all__ = [
    "CounterexampleInstance",
    "CrossCheck",
    "counterexample_instance",
    "refute_conjecture",
    "counterexample_mc_crosscheck",
]


@dataclass(frozen=True)
class CounterexampleInstance:
    n: int
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def counterexample_instance(n: int) -> CounterexampleInstance:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CounterexampleInstance(int(n), n / 2, math.sqrt(n))


def _beats(n: int, K: float) -> bool:
    # n/2 > K sqrt(n)  <=>  n > 4 K^2 for n >= 1; compare exactly when K is an integer
    if float(K).is_integer():
        return n > 4 * int(K) ** 2
    return n / 2 > K * math.sqrt(n)


def refute_conjecture(candidate_K: float, n_max: int) -> int | None:
    """Smallest ``n <= n_max`` with ``n/2 > K sqrt(n)``, or None."""
    if candidate_K <= 0:
        raise ValueError("candidate constant must be positive")
    n = max(1, math.floor(4 * candidate_K**2))
    while n > 1 and _beats(n - 1, candidate_K):
        n -= 1
    while not _beats(n, candidate_K):
        n += 1
    return n if n <= n_max else None


@dataclass(frozen=True)
class CrossCheck:
    n: int
    lhs: ComplexityEstimate
    rhs: ComplexityEstimate
    instance: CounterexampleInstance

    def agrees(self, tol: float = 1e-12) -> bool:
        def close(est, target):
            if est.method is Method.EXACT_ENUM:
                return abs(est.mean - target) <= tol
            return abs(est.mean - target) <= 3 * est.std_error + tol

        return close(self.lhs, self.instance.lhs) and close(self.rhs, self.instance.rhs)


def counterexample_mc_crosscheck(n: int, engine: ExpectationEngine | None = None) -> CrossCheck:
    """Average the per-pattern inner suprema over sign patterns.

    Enumerates all 2^n patterns under an exact engine (n <= 20), otherwise
    samples them.
    """
    engine = engine or ExpectationEngine.exact()
    lhs = expectation(lambda s, gen: np.sum(s > 0, axis=1).astype(float), n, engine)
    rhs = expectation(lambda s, gen: np.linalg.norm(s, axis=1), n, engine)
    return CrossCheck(n, lhs, rhs, counterexample_instance(n))
