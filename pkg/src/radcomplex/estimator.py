"""Exact and Monte Carlo expectations of suprema over random sign/noise arrays.

Monte Carlo draws are grouped into fixed-size blocks.  Block ``j`` is drawn
from a Philox generator keyed by ``(seed, j)``, so the value of every draw
depends only on the seed and its index; blocks can be evaluated on any
number of threads and are reduced in index order.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .subgaussian import DistKind, SubgaussianDist

__all__ = [
    "Method",
    "Exactness",
    "ExpectationEngine",
    "ComplexityEstimate",
    "DEFAULT_SEED",
    "block_generator",
    "resolve_threads",
    "sign_patterns",
    "expectation",
    "complexity_scalar",
    "complexity_vector",
    "rademacher_sum_norm",
]

DEFAULT_SEED = 0x5EED
MAX_ENUM_SIGNS = 20
_ENUM_CHUNK = 1 << 14


class Method(str, enum.Enum):
    EXACT_ENUM = "exact"
    MONTE_CARLO = "mc"


class Exactness(str, enum.Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class ExpectationEngine:
    method: Method = Method.MONTE_CARLO
    draws: int = 10_000
    seed: int = DEFAULT_SEED
    dist: SubgaussianDist = field(default_factory=SubgaussianDist.rademacher)
    block_size: int = 1024
    threads: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.method is Method.MONTE_CARLO and self.draws < 100:
            raise ValueError(f"Monte Carlo needs at least 100 draws, got {self.draws}")
        if self.method is Method.EXACT_ENUM and self.dist.kind is not DistKind.RADEMACHER:
            raise ValueError("exact enumeration is only defined for Rademacher noise")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")

    @classmethod
    def exact(cls, seed: int = DEFAULT_SEED) -> ExpectationEngine:
        return cls(Method.EXACT_ENUM, draws=0, seed=seed)

    @classmethod
    def monte_carlo(cls, draws: int = 10_000, seed: int = DEFAULT_SEED, dist=None) -> ExpectationEngine:
        return cls(Method.MONTE_CARLO, draws, seed, dist or SubgaussianDist.rademacher())

    def with_method(self, method: Method, dist: SubgaussianDist | None = None) -> ExpectationEngine:
        dist = dist or self.dist
        draws = self.draws
        if method is Method.MONTE_CARLO and draws < 100:
            draws = 10_000
        return replace(self, method=method, dist=dist, draws=draws)

    def with_dist(self, dist: SubgaussianDist) -> ExpectationEngine:
        return replace(self, dist=dist)

    def with_seed(self, seed: int) -> ExpectationEngine:
        return replace(self, seed=int(seed) % 2**64)


@dataclass(frozen=True)
class ComplexityEstimate:
    mean: float
    std_error: float
    draws: int
    method: Method
    exactness: Exactness = Exactness.EXACT

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("negative standard error")
        if self.method is Method.EXACT_ENUM and self.std_error != 0:
            raise ValueError("exact enumeration carries no standard error")

    @property
    def interval(self) -> tuple[float, float]:
        return self.mean - 3 * self.std_error, self.mean + 3 * self.std_error

    def scaled(self, c: float) -> ComplexityEstimate:
        return replace(self, mean=c * self.mean, std_error=abs(c) * self.std_error)


def resolve_threads(threads: int | None = None) -> int:
    """Thread count from the argument or ``RADCOMPLEX_THREADS`` (0 = auto)."""
    if threads is None:
        raw = os.environ.get("RADCOMPLEX_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"RADCOMPLEX_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def block_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for block ``index`` of stream ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(index) << 64)))


def sign_patterns(m: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the 2^m sign patterns, as a float array."""
    stop = 1 << m if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(m, dtype=np.int64)) & 1
    return 1.0 - 2.0 * bits


def _as_shape(shape) -> tuple[int, ...]:
    if isinstance(shape, (int, np.integer)):
        return (int(shape),)
    return tuple(int(s) for s in shape)


def expectation(fn, shape, engine: ExpectationEngine, exactness: Exactness = Exactness.EXACT) -> ComplexityEstimate:
    """Estimate E fn(noise) for a noise array of the given per-draw shape.

    ``fn(noise, gen)`` receives a batch ``(B, *shape)`` and a generator for
    any auxiliary randomness (restart points), and returns ``B`` values.
    """
    shape = _as_shape(shape)
    m = math.prod(shape)
    if engine.method is Method.EXACT_ENUM:
        if m > MAX_ENUM_SIGNS:
            raise ValueError(f"exact enumeration needs at most {MAX_ENUM_SIGNS} signs, got {m}")
        total = 1 << m
        starts = list(range(0, total, _ENUM_CHUNK))

        def run(j):
            start = starts[j]
            noise = sign_patterns(m, start, min(start + _ENUM_CHUNK, total)).reshape(-1, *shape)
            return np.asarray(fn(noise, block_generator(engine.seed, j)), dtype=float)

        values = _map_blocks(run, len(starts), engine.threads)
        return ComplexityEstimate(float(np.mean(values)), 0.0, total, Method.EXACT_ENUM, exactness)

    nblocks = -(-engine.draws // engine.block_size)

    def run(j):
        gen = block_generator(engine.seed, j)
        size = min(engine.block_size, engine.draws - j * engine.block_size)
        noise = engine.dist.sample(gen, (size, *shape))
        return np.asarray(fn(noise, gen), dtype=float)

    values = _map_blocks(run, nblocks, engine.threads)
    se = float(np.std(values, ddof=1) / math.sqrt(len(values)))
    return ComplexityEstimate(float(np.mean(values)), se, len(values), Method.MONTE_CARLO, exactness)


def _map_blocks(run, count: int, threads: int | None) -> np.ndarray:
    workers = min(resolve_threads(threads), count)
    if workers <= 1:
        parts = [run(j) for j in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(count)))
    return np.concatenate(parts)


def complexity_scalar(cls, losses, engine: ExpectationEngine) -> ComplexityEstimate:
    """E sup_f sum_i eps_i h_i(f(x_i)) with Rademacher eps."""
    losses = _broadcast_losses(losses, cls.n)
    eng = engine if engine.dist.kind is DistKind.RADEMACHER else engine.with_dist(SubgaussianDist.rademacher())
    return expectation(
        lambda signs, gen: cls.loss_weighted_sup_batch(signs, losses, gen=gen),
        cls.n,
        eng,
        cls.loss_exactness(losses),
    )


def complexity_vector(cls, engine: ExpectationEngine) -> ComplexityEstimate:
    """E sup_f sum_{i,k} X_ik f_k(x_i) with X_ik iid from ``engine.dist``."""
    return expectation(
        lambda noise, gen: cls.weighted_sup_batch(noise, gen=gen),
        (cls.n, cls.output_dim),
        engine,
        cls.exactness,
    )


def rademacher_sum_norm(sample, engine: ExpectationEngine) -> ComplexityEstimate:
    """E |sum_i eps_i x_i|."""
    X = np.asarray(getattr(sample, "points", sample), dtype=float)
    eng = engine if engine.dist.kind is DistKind.RADEMACHER else engine.with_dist(SubgaussianDist.rademacher())
    return expectation(lambda s, gen: np.linalg.norm(s @ X, axis=-1), len(X), eng)


def _broadcast_losses(losses, n: int) -> list:
    if not isinstance(losses, (list, tuple)):
        return [losses] * n
    if len(losses) != n:
        raise ValueError(f"need {n} losses, got {len(losses)}")
    return list(losses)
