"""Randomized verification suites, one per checked statement.

Each suite takes a master seed and returns a list of :class:`Row` records in
a fixed order; instance randomness is derived from ``(seed, suite, index)``
so suites are independent of each other and of evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .bounds import frobenius_bound, kmeans_bound, kmeans_chain, ltl_reduction_bound
from .classes import FeatureMapFinite, FiniteClass, KMeansCenters, LinearNormBall, Sample
from .contraction import (
    EXACT_TOL,
    Verdict,
    product_identity_check,
    theorem1_coverage_experiment,
    verify_single_variable,
    verify_vector_contraction,
)
from .counterexample import counterexample_instance, counterexample_mc_crosscheck
from .estimator import (
    ExpectationEngine,
    Method,
    block_generator,
    complexity_vector,
    expectation,
)
from .lipschitz import Custom, DistanceToPoint, EuclideanNorm, empirical_lipschitz
from .subgaussian import SubgaussianDist, khintchine_lower_check, partial_sum_convergence, tail_bound

__all__ = ["Row", "SUITES", "ALL_SUITES", "run_suite", "instance_rng", "derived_seed", "random_finite_instance"]

_SUITE_CODES = {
    "counterexample": 1,
    "contraction-exact": 2,
    "contraction-gaussian": 3,
    "single-variable": 4,
    "khintchine": 5,
    "partial-sums": 6,
    "product": 7,
    "tails": 8,
    "kmeans": 9,
    "frobenius": 10,
    "coverage": 11,
    "ltl": 12,
}


@dataclass(frozen=True)
class Row:
    instance_id: str
    quantity: str
    mean: float
    std_error: float
    method: str
    bound: float | None
    verdict: str
    margin: float | None

    def as_csv(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        return [self.instance_id, self.quantity, num(self.mean), num(self.std_error), self.method,
                num(self.bound), self.verdict, num(self.margin)]


def instance_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), _SUITE_CODES[suite], int(index)])


def derived_seed(seed: int, suite: str, index: int) -> int:
    ss = np.random.SeedSequence([int(seed), _SUITE_CODES[suite], int(index), 0xE])
    return int(ss.generate_state(1, np.uint64)[0])


def _report_row(iid, quantity, report) -> Row:
    return Row(
        iid,
        quantity,
        report.lhs.mean,
        report.lhs.std_error,
        f"{report.lhs.method.value}/{report.rhs.method.value}",
        report.constant * report.rhs.mean,
        report.verdict.value,
        report.margin,
    )


def _check(ok: bool) -> str:
    return Verdict.HOLDS.value if ok else Verdict.VIOLATED.value


def random_finite_instance(rng, max_n=4, max_K=3, max_tables=6, custom=False):
    """A random finite class with entries in [-1, 1] and matching losses."""
    n = int(rng.integers(1, max_n + 1))
    K = int(rng.integers(1, max_K + 1))
    M = int(rng.integers(1, max_tables + 1))
    cls = FiniteClass(rng.uniform(-1, 1, size=(M, n, K)))
    if not custom:
        return cls, EuclideanNorm()
    losses = []
    for i in range(n):
        phi = cls.tables[:, i, :]
        psi = rng.uniform(-1, 1, size=M)
        losses.append(Custom(phi, psi, L=empirical_lipschitz(psi, phi)))
    return cls, losses


def suite_counterexample(seed, ns=(1, 4, 16, 64, 256), enum_max=20, mc_draws=10_000):
    rows = []
    for n in ns:
        inst = counterexample_instance(n)
        iid = f"ce-n{n}"
        rows.append(Row(iid, "lhs", inst.lhs, 0.0, "closed_form", None, "EXACT", None))
        rows.append(Row(iid, "rhs", inst.rhs, 0.0, "closed_form", None, "EXACT", None))
        rows.append(Row(iid, "conjecture_ratio", inst.ratio, 0.0, "closed_form", None, "REFUTED", None))
        if n <= enum_max:
            eng = ExpectationEngine.exact(derived_seed(seed, "counterexample", n))
        else:
            eng = ExpectationEngine.monte_carlo(mc_draws, derived_seed(seed, "counterexample", n))
        chk = counterexample_mc_crosscheck(n, eng)
        rows.append(Row(iid, "lhs_crosscheck", chk.lhs.mean, chk.lhs.std_error, chk.lhs.method.value,
                        inst.lhs, _check(chk.agrees()), inst.lhs - chk.lhs.mean))
        rows.append(Row(iid, "rhs_crosscheck", chk.rhs.mean, chk.rhs.std_error, chk.rhs.method.value,
                        inst.rhs, _check(chk.agrees()), inst.rhs - chk.rhs.mean))
    return rows


def suite_contraction_exact(seed, trials=200):
    rows = []
    for t in range(trials):
        rng = instance_rng(seed, "contraction-exact", t)
        cls, losses = random_finite_instance(rng, custom=bool(t % 2))
        eng = ExpectationEngine.exact(derived_seed(seed, "contraction-exact", t))
        rep = verify_vector_contraction(cls, losses, SubgaussianDist.rademacher(), eng)
        rows.append(_report_row(f"vc-{t:03d}", "vector_contraction", rep))
    return rows


def suite_contraction_gaussian(seed, trials=50, draws=100_000):
    rows = []
    for t in range(trials):
        rng = instance_rng(seed, "contraction-gaussian", t)
        cls, losses = random_finite_instance(rng)
        s = derived_seed(seed, "contraction-gaussian", t)
        eng = ExpectationEngine.monte_carlo(draws, s, SubgaussianDist.standard_normal())
        rep = verify_vector_contraction(cls, losses, SubgaussianDist.standard_normal(), eng,
                                        lhs_engine=ExpectationEngine.exact(s))
        rows.append(_report_row(f"vg-{t:03d}", "vector_contraction_gaussian", rep))
    return rows


def suite_single_variable(seed, trials=100):
    rows = []
    for t in range(trials):
        rng = instance_rng(seed, "single-variable", t)
        K = int(rng.integers(1, 4))
        M = int(rng.integers(1, 7))
        cls = FiniteClass(rng.uniform(-1, 1, size=(M, 1, K)))
        psi = rng.uniform(-1, 1, size=M)
        loss = Custom(cls.tables[:, 0, :], psi)
        offset = rng.uniform(-1, 1, size=M)
        rep = verify_single_variable(cls, loss, offset, SubgaussianDist.rademacher(),
                                     ExpectationEngine.exact(derived_seed(seed, "single-variable", t)))
        rows.append(_report_row(f"sv-{t:03d}", "single_variable", rep))
    return rows


def _unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def suite_khintchine(seed, trials=100, max_dim=12, gauss_vectors=10, gauss_draws=100_000):
    rows = []
    rad = SubgaussianDist.rademacher()
    for t in range(trials):
        rng = instance_rng(seed, "khintchine", t)
        v = _unit(rng, int(rng.integers(1, max_dim + 1)))
        rep = khintchine_lower_check(v, rad, ExpectationEngine.exact())
        rows.append(Row(f"kh-{t:03d}", "khintchine_sign", rep.rhs.mean, 0.0, rep.rhs.method.value, None,
                        _check(rep.margin >= -EXACT_TOL), rep.margin))
    v = np.array([1.0, 1.0]) / math.sqrt(2.0)
    rep = khintchine_lower_check(v, rad, ExpectationEngine.exact())
    rows.append(Row("kh-extremal", "khintchine_equality", rep.rhs.mean, 0.0, rep.rhs.method.value, None,
                    _check(abs(rep.margin) <= 1e-12), rep.margin))
    target = math.sqrt(2.0 / math.pi)
    for t in range(gauss_vectors):
        rng = instance_rng(seed, "khintchine", 10_000 + t)
        v = _unit(rng, int(rng.integers(1, max_dim + 1)))
        eng = ExpectationEngine.monte_carlo(gauss_draws, derived_seed(seed, "khintchine", 10_000 + t),
                                            SubgaussianDist.standard_normal())
        rep = khintchine_lower_check(v, SubgaussianDist.standard_normal(), eng)
        gap = rep.rhs.mean - target
        rows.append(Row(f"kg-{t:02d}", "gaussian_mean_abs", rep.rhs.mean, rep.rhs.std_error, rep.rhs.method.value,
                        target, _check(abs(gap) <= 3 * rep.rhs.std_error), -abs(gap) + 3 * rep.rhs.std_error))
    return rows


def suite_partial_sums(seed, dims=(1, 2, 4, 8, 16, 32), draws=100_000):
    rows = []
    eng = ExpectationEngine.monte_carlo(draws, derived_seed(seed, "partial-sums", 0))
    for dist in (SubgaussianDist.rademacher(), SubgaussianDist.standard_normal(), SubgaussianDist.uniform(1.0)):
        table = partial_sum_convergence(lambda k: 1.0 / k, dims, dist, eng)
        for row in table:
            rows.append(Row(f"ps-{dist.name}-K{row.K}", "partial_sum_tail", row.estimate.mean, row.estimate.std_error,
                            row.estimate.method.value, row.jensen_bound, _check(row.within_bound),
                            row.jensen_bound - row.estimate.mean))
    return rows


def suite_product(seed, trials=50, max_cells=16, max_tables=4):
    rows = []
    for t in range(trials):
        rng = instance_rng(seed, "product", t)
        K = 3
        n = int(rng.integers(1, max_cells // K + 1))
        comps = [FiniteClass(rng.uniform(-1, 1, size=(int(rng.integers(1, max_tables + 1)), n, 1))) for _ in range(K)]
        rep = product_identity_check(comps, ExpectationEngine.exact())
        rows.append(Row(f"pi-{t:02d}", "product_identity", rep.product, 0.0, Method.EXACT_ENUM.value,
                        rep.component_sum, _check(rep.holds(EXACT_TOL)), rep.component_sum - rep.product))
    return rows


def suite_tails(seed, vectors=5, draws=1_000_000, ts=(1.0, 2.0, 3.0), max_dim=10, block=100_000):
    rows = []
    dists = (SubgaussianDist.rademacher(), SubgaussianDist.standard_normal(), SubgaussianDist.uniform(1.0))
    for di, dist in enumerate(dists):
        for j in range(vectors):
            rng = instance_rng(seed, "tails", 100 * di + j)
            v = _unit(rng, int(rng.integers(1, max_dim + 1)))
            s = derived_seed(seed, "tails", 100 * di + j)
            counts = np.zeros(len(ts))
            for b in range(-(-draws // block)):
                size = min(block, draws - b * block)
                z = np.abs(dist.sample(block_generator(s, b), (size, v.size)) @ v)
                counts += [(z > t).sum() for t in ts]
            for t, c in zip(ts, counts):
                p = c / draws
                se = math.sqrt(p * (1 - p) / draws)
                bound = tail_bound(t, dist.b)
                rows.append(Row(f"tail-{dist.name}-{j}-t{t:g}", "tail_frequency", p, se, Method.MONTE_CARLO.value,
                                bound, _check(p <= bound + 3 * se), bound - p))
    return rows


def _random_ball_sample(rng, n, d):
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.uniform(size=(n, 1)) ** (1.0 / d)


def suite_kmeans(seed, samples=20, n=50, d=5, Ks=(2, 3), draws=10_000):
    rows = []
    for t in range(samples):
        rng = instance_rng(seed, "kmeans", t)
        K = Ks[t % len(Ks)]
        cls = KMeansCenters(Sample(_random_ball_sample(rng, n, d)), K)
        eng = ExpectationEngine.monte_carlo(draws, derived_seed(seed, "kmeans", t))
        links = kmeans_chain(cls, eng)
        R = links[0].estimate
        bound = kmeans_bound(K, n).value
        ok = R.mean - 3 * R.std_error <= bound
        rows.append(Row(f"km-{t:02d}", "kmeans_R", R.mean, R.std_error, R.method.value, bound,
                        Verdict.HOLDS.value if ok else Verdict.INCONCLUSIVE.value, bound - R.mean))
        for a, b in zip(links, links[1:]):
            tol = 3 * math.hypot(a.std_error, b.std_error)
            ok = a.mean <= b.mean + tol
            verdict = Verdict.HOLDS.value if ok else (
                Verdict.INCONCLUSIVE.value if a.estimate.exactness.value != "exact" else Verdict.VIOLATED.value)
            rows.append(Row(f"km-{t:02d}", f"chain:{a.name}<={b.name}", a.mean, a.std_error,
                            a.estimate.method.value, b.mean, verdict, b.mean - a.mean))
    return rows


def suite_frobenius(seed, trials=20, n=10, d=5, draws=10_000, ortho_n=4):
    rows = []
    X = np.eye(ortho_n)
    cls = LinearNormBall(Sample(X), 1, 1.0)
    est = complexity_vector(cls, ExpectationEngine.exact())
    bound = frobenius_bound(1.0, X, 1).value
    rows.append(Row("fro-ortho", "frobenius_tightness", est.mean, 0.0, est.method.value, bound,
                    _check(abs(bound - est.mean) <= 1e-12), bound - est.mean))
    for t in range(trials):
        rng = instance_rng(seed, "frobenius", t)
        K = int(rng.integers(1, 4))
        B = float(rng.uniform(0.5, 2.0))
        X = _random_ball_sample(rng, n, d)
        cls = LinearNormBall(Sample(X), K, B)
        est = complexity_vector(cls, ExpectationEngine.monte_carlo(draws, derived_seed(seed, "frobenius", t)))
        bound = frobenius_bound(B, X, K).value
        rows.append(Row(f"fro-{t:02d}", "frobenius_domination", est.mean, est.std_error, est.method.value, bound,
                        _check(bound >= est.mean - 3 * est.std_error), bound - est.mean))
    return rows


def suite_coverage(seed, delta=0.1, functions=20, space=8, n=16, repetitions=500):
    rng = instance_rng(seed, "coverage", 0)
    tables = rng.uniform(0, 1, size=(functions, space))
    law = rng.dirichlet(np.ones(space))
    res = theorem1_coverage_experiment(tables, law, n, delta, repetitions,
                                       ExpectationEngine.monte_carlo(seed=derived_seed(seed, "coverage", 0)))
    return [Row("cov-0", "theorem1_violation_rate", res.rate, math.sqrt(res.rate * (1 - res.rate) / repetitions),
                "repetitions", res.limit, _check(res.within_budget), res.limit - res.rate)]


def _ltl_loss_class(rng, count, K):
    out = []
    for _ in range(count):
        if rng.uniform() < 0.5:
            out.append(DistanceToPoint(rng.uniform(-1, 1, size=K)).clipped(0.0, 1.0))
        else:
            out.append(EuclideanNorm().scaled(float(rng.uniform(0.2, 1.0))).clipped(0.0, 1.0))
    return out


def suite_ltl(seed, per_config=3):
    rows = []
    idx = 0
    for T in (1, 2):
        for n in (1, 2):
            for K in (1, 2):
                for M in (1, 2, 3):
                    for F in (1, 2, 3):
                        for _ in range(per_config):
                            rng = instance_rng(seed, "ltl", idx)
                            cls = FeatureMapFinite(rng.uniform(-1, 1, size=(M, T, n, K)))
                            losses = _ltl_loss_class(rng, F, K)
                            L = max(f.L for f in losses)
                            psi = cls.task_errors(losses)  # (M, T)
                            lhs = expectation(lambda s, g: np.max(s @ psi.T, axis=1), T, ExpectationEngine.exact())
                            meta = complexity_vector(cls, ExpectationEngine.exact())
                            bound = ltl_reduction_bound(L, n, meta.mean).value
                            rows.append(Row(f"ltl-{idx:03d}-T{T}n{n}K{K}M{M}F{F}", "ltl_reduction", lhs.mean, 0.0,
                                            Method.EXACT_ENUM.value, bound, _check(lhs.mean <= bound + EXACT_TOL),
                                            bound - lhs.mean))
                            idx += 1
    return rows


SUITES = {
    "counterexample": suite_counterexample,
    "contraction-exact": suite_contraction_exact,
    "contraction-gaussian": suite_contraction_gaussian,
    "single-variable": suite_single_variable,
    "khintchine": suite_khintchine,
    "partial-sums": suite_partial_sums,
    "product": suite_product,
    "tails": suite_tails,
    "kmeans": suite_kmeans,
    "frobenius": suite_frobenius,
    "coverage": suite_coverage,
    "ltl": suite_ltl,
}


# the set run by ``suite --all``, in acceptance order
ALL_SUITES = (
    "counterexample",
    "contraction-exact",
    "khintchine",
    "product",
    "tails",
    "kmeans",
    "frobenius",
    "coverage",
    "ltl",
)


def run_suite(name: str, seed: int, **overrides) -> tuple[list[Row], float]:
    """Run one suite; returns its rows and the wall time in seconds."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    start = time.perf_counter()
    rows = fn(seed, **overrides)
    return rows, time.perf_counter() - start
