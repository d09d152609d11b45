"""Symmetric sub-gaussian laws, tail bounds and Khintchine-type constants."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistKind",
    "Provenance",
    "SubgaussianDist",
    "KhintchineConstant",
    "PartialSumRow",
    "khintchine_constant",
    "tail_bound",
    "khintchine_lower_check",
    "partial_sum_convergence",
    "mean_abs_combination",
]


class DistKind(str, enum.Enum):
    RADEMACHER = "rademacher"
    STANDARD_NORMAL = "normal"
    UNIFORM_SYMMETRIC = "uniform"


class Provenance(str, enum.Enum):
    BEST_KNOWN = "best_known"
    GENERIC_FORMULA = "generic_formula"


@dataclass(frozen=True)
class SubgaussianDist:
    """A symmetric sub-gaussian law.

    ``halfwidth`` is only meaningful for the uniform law on ``[-a, a]``.
    """

    kind: DistKind
    halfwidth: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistKind(self.kind))
        if self.halfwidth < 0 or not math.isfinite(self.halfwidth):
            raise ValueError(f"halfwidth must be finite and >= 0, got {self.halfwidth}")

    @classmethod
    def rademacher(cls) -> SubgaussianDist:
        return cls(DistKind.RADEMACHER)

    @classmethod
    def standard_normal(cls) -> SubgaussianDist:
        return cls(DistKind.STANDARD_NORMAL)

    @classmethod
    def uniform(cls, a: float = 1.0) -> SubgaussianDist:
        return cls(DistKind.UNIFORM_SYMMETRIC, float(a))

    @classmethod
    def from_name(cls, name: str) -> SubgaussianDist:
        """Parse ``rademacher``, ``normal``/``gaussian`` or ``uniform[:a]``."""
        key, _, arg = name.strip().lower().partition(":")
        if key in ("rademacher", "sign"):
            return cls.rademacher()
        if key in ("normal", "gaussian", "standard_normal"):
            return cls.standard_normal()
        if key == "uniform":
            return cls.uniform(float(arg) if arg else 1.0)
        raise ValueError(f"unknown distribution {name!r}")

    @property
    def name(self) -> str:
        if self.kind is DistKind.UNIFORM_SYMMETRIC:
            return f"uniform:{self.halfwidth:g}"
        return self.kind.value

    @property
    def b(self) -> float:
        """Sub-gaussian parameter (Hoeffding's ``a`` for the uniform law)."""
        if self.kind is DistKind.UNIFORM_SYMMETRIC:
            return self.halfwidth
        return 1.0

    @property
    def second_moment(self) -> float:
        if self.kind is DistKind.UNIFORM_SYMMETRIC:
            return self.halfwidth**2 / 3.0
        return 1.0

    def mgf(self, lam):
        """Exact moment generating function E exp(lam X)."""
        lam = np.asarray(lam, dtype=float)
        if self.kind is DistKind.RADEMACHER:
            return np.cosh(lam)
        if self.kind is DistKind.STANDARD_NORMAL:
            return np.exp(lam**2 / 2)
        al = self.halfwidth * lam
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(al == 0, 1.0, np.sinh(al) / np.where(al == 0, 1.0, al))
        return out

    def mgf_dominated(self, lambdas) -> bool:
        """True if E exp(lam X) <= exp(lam^2 b^2 / 2) on the given grid."""
        lambdas = np.asarray(lambdas, dtype=float)
        bound = np.exp(lambdas**2 * self.b**2 / 2)
        return bool(np.all(self.mgf(lambdas) <= bound * (1 + 1e-12)))

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        if self.kind is DistKind.RADEMACHER:
            return gen.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
        if self.kind is DistKind.STANDARD_NORMAL:
            return gen.standard_normal(size=size)
        return gen.uniform(-self.halfwidth, self.halfwidth, size=size)


@dataclass(frozen=True)
class KhintchineConstant:
    value: float
    provenance: Provenance


def khintchine_constant(
    dist: SubgaussianDist, mode: Provenance | str = Provenance.BEST_KNOWN
) -> KhintchineConstant:
    """Constant C with ``|v| <= C E|sum_k X_k v_k|`` for every v.

    Best known values exist for signs (sqrt 2) and gaussians (sqrt(pi/2));
    every other law falls back to the generic moment formula
    ``4 b^2 / E[X^2]^{3/2}``.
    """
    mode = Provenance(mode)
    if dist.second_moment <= 0:
        raise ValueError("trivial distribution")
    if mode is Provenance.BEST_KNOWN:
        if dist.kind is DistKind.RADEMACHER:
            return KhintchineConstant(math.sqrt(2.0), Provenance.BEST_KNOWN)
        if dist.kind is DistKind.STANDARD_NORMAL:
            return KhintchineConstant(math.sqrt(math.pi / 2), Provenance.BEST_KNOWN)
    # (8 * int_0^inf t^3 exp(-t^2/(2b^2)) dt)^{1/2} = (16 b^4)^{1/2}
    value = 4.0 * dist.b**2 / dist.second_moment**1.5
    return KhintchineConstant(value, Provenance.GENERIC_FORMULA)


def tail_bound(t: float, b: float) -> float:
    """Bound ``2 exp(-t^2 / (2 b^2))`` on P(|<v, X>| > t) for unit v."""
    if t < 0 or b <= 0:
        raise ValueError(f"tail_bound needs t >= 0 and b > 0, got t={t}, b={b}")
    return 2.0 * math.exp(-(t**2) / (2.0 * b**2))


def mean_abs_combination(v, dist: SubgaussianDist, engine):
    """Estimate E|sum_k X_k v_k|.

    Rademacher coefficients of dimension <= 20 are enumerated exactly,
    everything else goes through the engine's Monte Carlo path.
    """
    from .estimator import ComplexityEstimate, Method, expectation

    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0 or not np.any(v):
        return ComplexityEstimate(0.0, 0.0, 1, Method.EXACT_ENUM)

    def abs_sum(noise, gen):
        return np.abs(noise @ v)

    if dist.kind is DistKind.RADEMACHER and v.size <= 20:
        return expectation(abs_sum, v.size, engine.with_method(Method.EXACT_ENUM, dist=dist))
    return expectation(abs_sum, v.size, engine.with_method(Method.MONTE_CARLO, dist=dist))


def khintchine_lower_check(v, dist: SubgaussianDist, engine):
    """Check ``|v| <= C E|sum_k X_k v_k|`` with the best known constant."""
    from .contraction import compare
    from .estimator import ComplexityEstimate, Method

    v = np.asarray(v, dtype=float).ravel()
    if not np.any(v):
        raise ValueError("khintchine_lower_check needs a nonzero vector")
    const = khintchine_constant(dist).value
    norm = ComplexityEstimate(float(np.linalg.norm(v)), 0.0, 1, Method.EXACT_ENUM)
    est = mean_abs_combination(v, dist, engine)
    return compare(norm, est, const)


@dataclass(frozen=True)
class PartialSumRow:
    K: int
    estimate: object  # ComplexityEstimate
    jensen_bound: float

    @property
    def within_bound(self) -> bool:
        return self.estimate.mean <= self.jensen_bound + 3 * self.estimate.std_error + 1e-12


def partial_sum_convergence(rule, dims, dist: SubgaussianDist, engine) -> list[PartialSumRow]:
    """Tabulate E|Y_2K - Y_K| for each truncation size K in ``dims``.

    ``rule`` maps a 1-based index k to the coefficient v_k.  The bound column
    is the Jensen estimate ``sqrt(E[X^2] sum_{K<k<=2K} v_k^2)``.
    """
    dims = [int(K) for K in dims]
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError("dims must be strictly increasing")
    rows = []
    for K in dims:
        block = np.array([rule(k) for k in range(K + 1, 2 * K + 1)], dtype=float)
        est = mean_abs_combination(block, dist, engine)
        bound = math.sqrt(dist.second_moment * float(block @ block))
        rows.append(PartialSumRow(K, est, bound))
    return rows
