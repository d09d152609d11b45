"""Closed-form generalization and complexity bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimator import (
    ComplexityEstimate,
    Method,
    complexity_scalar,
    complexity_vector,
    expectation,
    rademacher_sum_norm,
)
from .lipschitz import MinCoordinate
from .subgaussian import SubgaussianDist

__all__ = [
    "BoundResult",
    "ChainLink",
    "theorem1_bound",
    "kmeans_bound",
    "frobenius_bound",
    "operator_kernel_bound",
    "ltl_reduction_bound",
    "kmeans_chain",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BoundResult:
    value: float
    formula: str
    inputs: dict = field(default_factory=dict)
    dominates: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"{self.formula}: bound must be finite and >= 0, got {self.value}")


def theorem1_bound(empirical_mean: float, complexity: float, n: int, delta: float) -> BoundResult:
    """Uniform bound on the true mean of a [0,1]-valued function."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if complexity < 0:
        raise ValueError("complexity must be >= 0")
    value = empirical_mean + 2.0 * complexity / n + math.sqrt(9.0 * math.log(2.0 / delta) / (2.0 * n))
    return BoundResult(
        value,
        "theorem1",
        {"empirical_mean": empirical_mean, "complexity": complexity, "n": n, "delta": delta},
        "E f(X) for every f in the class, with probability >= 1 - delta",
    )


def kmeans_bound(K: int, n: int) -> BoundResult:
    """``3 sqrt(2) K sqrt(n)`` dominates R(S, x) for samples in the unit ball."""
    if K < 1 or n < 1:
        raise ValueError("K and n must be >= 1")
    return BoundResult(3 * SQRT2 * K * math.sqrt(n), "kmeans", {"K": K, "n": n}, "R(S, x)")


def frobenius_bound(B: float, sample, K: int) -> BoundResult:
    """``B sqrt(K sum_i |x_i|^2)`` for the Frobenius ball of radius B."""
    if B <= 0:
        raise ValueError("B must be positive")
    X = np.asarray(getattr(sample, "points", sample), dtype=float)
    sq = float(np.sum(X**2))
    return BoundResult(
        B * math.sqrt(K * sq), "frobenius", {"B": B, "K": K, "sum_sq_norms": sq}, "vector complexity of the Frobenius ball"
    )


def operator_kernel_bound(L: float, B: float, traces) -> BoundResult:
    """``sqrt(2) L B (sum_i tr k(x_i, x_i))^{1/2}`` for operator-valued kernels."""
    traces = [float(t) for t in traces]
    if any(t < 0 for t in traces):
        raise ValueError("kernel traces must be >= 0")
    if L < 0 or B < 0:
        raise ValueError("L and B must be >= 0")
    total = math.fsum(traces)
    return BoundResult(
        SQRT2 * L * B * math.sqrt(total),
        "operator_kernel",
        {"L": L, "B": B, "trace_sum": total},
        "E sup_|w|<=B sum_i eps_i h_i(Phi(x_i) w)",
    )


def ltl_reduction_bound(L: float, n: int, meta_complexity: float) -> BoundResult:
    """``sqrt(2) (L / sqrt(n))`` times the meta-sample vector complexity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if meta_complexity < -1e-12:
        raise ValueError("meta complexity must be >= 0")
    # exact enumeration of a singleton class can round to -1e-17
    meta_complexity = max(meta_complexity, 0.0)
    return BoundResult(
        SQRT2 * L / math.sqrt(n) * meta_complexity,
        "ltl",
        {"L": L, "n": n, "meta_complexity": meta_complexity},
        "R(H, meta-sample)",
    )


@dataclass(frozen=True)
class ChainLink:
    name: str
    estimate: ComplexityEstimate
    factor: float = 1.0

    @property
    def mean(self) -> float:
        return self.factor * self.estimate.mean

    @property
    def std_error(self) -> float:
        return abs(self.factor) * self.estimate.std_error


def kmeans_chain(kmeans_class, engine) -> list[ChainLink]:
    """Estimates of every quantity in the K-means complexity chain.

    Returned in order: ``2^{-1/2} R``, the vector complexity, the split into
    inner-product and norm terms, ``K (2 E|sum eps_i x_i| + E|sum eps_i|)``
    and ``3 K sqrt(n)``.  Consecutive links should be nondecreasing.
    """
    X = kmeans_class.sample.points
    n, K = kmeans_class.n, kmeans_class.output_dim
    rad = engine.with_dist(SubgaussianDist.rademacher())
    R = complexity_scalar(kmeans_class, MinCoordinate(), rad)
    vec = complexity_vector(kmeans_class, rad)

    def split(noise, gen):
        inner = np.linalg.norm(np.einsum("bik,id->bkd", noise, X), axis=-1).sum(axis=1)
        sq = np.maximum(0.0, noise.sum(axis=1)).sum(axis=1)
        return 2 * inner + sq

    split_est = expectation(split, (n, K), rad)
    norm_est = rademacher_sum_norm(X, rad)
    abs_est = expectation(lambda s, gen: np.abs(s.sum(axis=1)), n, rad)
    per_center = ComplexityEstimate(
        2 * norm_est.mean + abs_est.mean,
        math.hypot(2 * norm_est.std_error, abs_est.std_error),
        norm_est.draws,
        norm_est.method,
    )
    top = kmeans_bound(K, n).value / SQRT2
    return [
        ChainLink("R/sqrt2", R, 1 / SQRT2),
        ChainLink("vector", vec),
        ChainLink("split", split_est),
        ChainLink("K(2|sum eps x|+|sum eps|)", per_center, K),
        ChainLink("3K sqrt(n)", ComplexityEstimate(top, 0.0, 1, Method.EXACT_ENUM)),
    ]
