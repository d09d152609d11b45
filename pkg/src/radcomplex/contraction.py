"""Executable forms of the contraction inequalities and the coverage theorem."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bounds import theorem1_bound
from .classes import FiniteClass, ProductClass
from .estimator import (
    ComplexityEstimate,
    Exactness,
    ExpectationEngine,
    Method,
    block_generator,
    complexity_scalar,
    complexity_vector,
    expectation,
    sign_patterns,
)
from .lipschitz import LipschitzLoss, MaxCoordinate
from .subgaussian import DistKind, SubgaussianDist, khintchine_constant

__all__ = [
    "Verdict",
    "Mode",
    "VerificationReport",
    "ProductIdentityReport",
    "CoverageResult",
    "EXACT_TOL",
    "compare",
    "verify_vector_contraction",
    "verify_single_variable",
    "product_identity_check",
    "theorem1_coverage_experiment",
]

EXACT_TOL = 1e-9


class Verdict(str, enum.Enum):
    HOLDS = "HOLDS"
    HOLDS_WITHIN_TOLERANCE = "HOLDS_WITHIN_TOLERANCE"
    VIOLATED = "VIOLATED"
    INCONCLUSIVE = "INCONCLUSIVE"


class Mode(str, enum.Enum):
    EXACT = "EXACT"
    STATISTICAL = "STATISTICAL"


@dataclass(frozen=True)
class VerificationReport:
    """One instance of ``lhs <= constant * rhs``."""

    lhs: ComplexityEstimate
    rhs: ComplexityEstimate
    constant: float
    margin: float
    verdict: Verdict
    mode: Mode

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED


def compare(lhs: ComplexityEstimate, rhs: ComplexityEstimate, constant: float, tol: float = EXACT_TOL):
    """Judge ``lhs <= constant * rhs``.

    Exact mode (both sides enumerated) allows ``tol``.  Statistical mode
    only calls a violation when the 3-standard-error intervals separate and
    neither side is a lower-bound oracle; a lower-bound lhs yields HOLDS or
    INCONCLUSIVE.
    """
    margin = constant * rhs.mean - lhs.mean
    exact_mode = lhs.method is Method.EXACT_ENUM and rhs.method is Method.EXACT_ENUM
    faithful = lhs.exactness is Exactness.EXACT and rhs.exactness is Exactness.EXACT
    mode = Mode.EXACT if exact_mode else Mode.STATISTICAL
    if margin >= -tol:
        verdict = Verdict.HOLDS
    elif lhs.exactness is not Exactness.EXACT:
        verdict = Verdict.INCONCLUSIVE
    elif exact_mode:
        verdict = Verdict.VIOLATED if faithful else Verdict.INCONCLUSIVE
    else:
        lo, _ = lhs.interval
        _, hi = rhs.interval
        if lo > constant * hi + tol:
            verdict = Verdict.VIOLATED if faithful else Verdict.INCONCLUSIVE
        else:
            verdict = Verdict.HOLDS_WITHIN_TOLERANCE
    return VerificationReport(lhs, rhs, float(constant), float(margin), verdict, mode)


def _certified_L(losses) -> float:
    if isinstance(losses, LipschitzLoss):
        return losses.L
    return max(h.L for h in losses)


def verify_vector_contraction(
    cls,
    losses,
    dist: SubgaussianDist | None = None,
    engine: ExpectationEngine | None = None,
    lhs_engine: ExpectationEngine | None = None,
    constant: float | None = None,
) -> VerificationReport:
    """Check ``E sup sum_i eps_i h_i(f(x_i)) <= C L E sup sum_ik X_ik f_k(x_i)``.

    The lhs always uses Rademacher signs; the rhs uses ``dist`` (default:
    the engine's law).  ``lhs_engine`` lets an exactly enumerable lhs be
    paired with a Monte Carlo rhs.
    """
    engine = engine or ExpectationEngine.exact()
    dist = dist or engine.dist
    if engine.method is Method.EXACT_ENUM and dist.kind is not DistKind.RADEMACHER:
        raise ValueError("engine/class mismatch: exact enumeration needs Rademacher noise")
    rhs_engine = engine.with_dist(dist)
    lhs_engine = lhs_engine or engine.with_dist(SubgaussianDist.rademacher())
    if constant is None:
        constant = khintchine_constant(dist).value
    lhs = complexity_scalar(cls, losses, lhs_engine)
    rhs = complexity_vector(cls, rhs_engine)
    return compare(lhs, rhs, constant * _certified_L(losses))


def verify_single_variable(
    cls: FiniteClass,
    loss: LipschitzLoss,
    f_offset,
    dist: SubgaussianDist | None = None,
    engine: ExpectationEngine | None = None,
) -> VerificationReport:
    """Single-sign step: ``E sup_s eps psi(s) + f(s) <= E sup_s C L <X, phi(s)> + f(s)``.

    The constant sits inside the supremum, so the report compares with
    ``constant = 1`` against an rhs that already includes ``C L``.
    """
    if not isinstance(cls, FiniteClass):
        raise TypeError("the single-variable check needs a finite class")
    if cls.n != 1:
        raise ValueError("the single-variable check needs n = 1")
    engine = engine or ExpectationEngine.exact()
    dist = dist or engine.dist
    f = np.asarray(f_offset, dtype=float).ravel()
    if f.shape != (len(cls),):
        raise ValueError("f_offset needs one value per class element")
    phi = cls.tables[:, 0, :]
    psi = np.asarray(loss(phi), dtype=float)
    lhs_val = 0.5 * (np.max(psi + f) + np.max(-psi + f))
    lhs = ComplexityEstimate(float(lhs_val), 0.0, 2, Method.EXACT_ENUM)
    scale = khintchine_constant(dist).value * loss.L

    def sup_with_offset(noise, gen):
        return np.max(scale * noise @ phi.T + f[None, :], axis=1)

    K = cls.output_dim
    if dist.kind is DistKind.RADEMACHER and K <= 20:
        rhs = expectation(sup_with_offset, K, ExpectationEngine.exact(engine.seed))
    else:
        rhs = expectation(sup_with_offset, K, engine.with_method(Method.MONTE_CARLO, dist=dist))
    return compare(lhs, rhs, 1.0)


@dataclass(frozen=True)
class ProductIdentityReport:
    product: float
    component_sum: float
    components: tuple[float, ...]

    @property
    def difference(self) -> float:
        return abs(self.product - self.component_sum)

    def holds(self, tol: float = EXACT_TOL) -> bool:
        return self.difference <= tol


def product_identity_check(components, engine: ExpectationEngine | None = None) -> ProductIdentityReport:
    """Vector complexity of a product class against the sum over its components."""
    engine = engine or ExpectationEngine.exact()
    if engine.method is not Method.EXACT_ENUM:
        raise ValueError("the product identity is checked by exact enumeration")
    product = ProductClass(components)
    if product.n * product.output_dim > 20:
        raise ValueError(f"size limit exceeded: n*K = {product.n * product.output_dim} > 20")
    vec = complexity_vector(product, engine).mean
    parts = tuple(complexity_scalar(c, MaxCoordinate(), engine).mean for c in product.components)
    return ProductIdentityReport(vec, math.fsum(parts), parts)


@dataclass(frozen=True)
class CoverageResult:
    violations: int
    repetitions: int
    delta: float

    @property
    def rate(self) -> float:
        return self.violations / self.repetitions

    @property
    def limit(self) -> float:
        """``delta`` plus three binomial standard errors."""
        return self.delta + 3 * math.sqrt(self.delta * (1 - self.delta) / self.repetitions)

    @property
    def within_budget(self) -> bool:
        return self.rate <= self.limit


def theorem1_coverage_experiment(
    tables,
    law,
    n: int,
    delta: float,
    repetitions: int,
    engine: ExpectationEngine | None = None,
) -> CoverageResult:
    """Fraction of iid samples on which the uniform Rademacher bound fails.

    ``tables[f, x]`` is the value of function f at input x of a finite space
    with probabilities ``law``.  True means are exact; the conditional
    complexity is enumerated for n <= 20 and sampled otherwise.
    """
    tables = np.atleast_2d(np.asarray(tables, dtype=float))
    law = np.asarray(law, dtype=float)
    if np.any(tables < 0) or np.any(tables > 1):
        raise ValueError("class outputs must lie in [0, 1]")
    if law.shape != (tables.shape[1],) or np.any(law < 0) or not math.isclose(law.sum(), 1.0):
        raise ValueError("law must be a probability vector over the input space")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if repetitions < 100:
        raise ValueError("at least 100 repetitions are required")
    engine = engine or ExpectationEngine.monte_carlo()
    true_means = tables @ law
    signs = sign_patterns(n) if n <= 20 else None
    cdf = np.cumsum(law)
    violations = 0
    for rep in range(repetitions):
        gen = block_generator(engine.seed, rep)
        idx = np.minimum(np.searchsorted(cdf, gen.uniform(size=n), side="right"), len(law) - 1)
        values = tables[:, idx]  # (F, n)
        if signs is not None:
            R = float(np.mean(np.max(signs @ values.T, axis=1)))
        else:
            R = expectation(
                lambda s, g: np.max(s @ values.T, axis=1), n, engine.with_seed(engine.seed + rep + 1)
            ).mean
        emp = values.mean(axis=1)
        bounds = np.array([theorem1_bound(e, R, n, delta).value for e in emp])
        if np.any(true_means > bounds):
            violations += 1
    return CoverageResult(violations, repetitions, delta)
