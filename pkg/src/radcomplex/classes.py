"""Vector-valued function classes on a fixed sample, seen through sup oracles.

Every class answers two questions for batches of coefficient arrays:

* ``weighted_sup_batch(A)``: ``sup_f sum_{i,k} A[i,k] f_k(x_i)`` for ``A`` of
  shape ``(B, n, K)``;
* ``loss_weighted_sup_batch(signs, losses)``: ``sup_f sum_i s_i h_i(f(x_i))``
  for ``signs`` of shape ``(B, n)``.

Finite tables are solved by enumeration.  Continuous classes use closed forms
where they exist and a multi-restart projected subgradient ascent otherwise;
the latter only certifies a lower bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from .estimator import Exactness, sign_patterns
from .lipschitz import LipschitzLoss, LossKind, MinCoordinate

__all__ = [
    "ClassKind",
    "Sample",
    "MetaSample",
    "FunctionClass",
    "FiniteClass",
    "ProductClass",
    "FeatureMapFinite",
    "LinearNormBall",
    "KMeansCenters",
    "OperatorProjection",
    "AscentConfig",
    "weighted_sup",
    "loss_weighted_sup",
    "kmeans_psi",
    "kmeans_phi",
    "kmeans_lipschitz_check",
    "ltl_psi",
    "project_unit_ball",
]


class ClassKind(str, enum.Enum):
    FINITE = "finite"
    LINEAR_NORM_BALL = "linear"
    KMEANS_CENTERS = "kmeans"
    PRODUCT = "product"
    FEATURE_MAP_FINITE = "featuremap"
    OPERATOR_PROJECTION = "projection"


@dataclass(frozen=True)
class Sample:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) < 1:
            raise ValueError("a sample needs n >= 1 points of a common dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def check_unit_ball(self, tol: float = 1e-12) -> None:
        norms = np.linalg.norm(self.points, axis=1)
        bad = np.flatnonzero(norms > 1 + tol)
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"point {i} has norm {norms[i]:.6g} > 1")


@dataclass(frozen=True)
class MetaSample:
    """T tasks with n points each, shape ``(T, n, d)``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("a meta-sample has shape (T, n, d) with T, n >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("meta-sample points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def T(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class AscentConfig:
    restarts: int = 16
    steps: int = 200
    step_size: float = 0.1
    tol: float = 1e-8


class FunctionClass:
    kind: ClassKind
    n: int
    output_dim: int
    exactness: Exactness = Exactness.EXACT

    def _check_coeffs(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        if A.ndim == 2:
            A = A[None]
        if A.shape[1:] != (self.n, self.output_dim):
            raise ValueError(f"coefficients must have shape ({self.n}, {self.output_dim}), got {A.shape[1:]}")
        return A

    def _check_signs(self, signs, losses) -> tuple[np.ndarray, list]:
        signs = np.asarray(signs, dtype=float)
        if signs.ndim == 1:
            signs = signs[None]
        if signs.shape[1] != self.n:
            raise ValueError(f"need {self.n} signs, got {signs.shape[1]}")
        if isinstance(losses, LipschitzLoss):
            losses = [losses] * self.n
        if len(losses) != self.n:
            raise ValueError(f"need {self.n} losses, got {len(losses)}")
        for h in losses:
            if h.dim is not None and h.dim != self.output_dim:
                raise ValueError(f"loss expects dimension {h.dim}, class outputs {self.output_dim}")
        return signs, list(losses)

    def weighted_sup_batch(self, A, gen=None) -> np.ndarray:
        raise NotImplementedError

    def weighted_sup(self, A, gen=None):
        raise NotImplementedError

    def loss_weighted_sup_batch(self, signs, losses, gen=None) -> np.ndarray:
        raise NotImplementedError

    def loss_exactness(self, losses) -> Exactness:
        return Exactness.EXACT


class FiniteClass(FunctionClass):
    """Explicit value tables, shape ``(M, n, K)``: entry ``[m, i]`` is f_m(x_i)."""

    kind = ClassKind.FINITE

    def __init__(self, tables, sample: Sample | None = None):
        tables = np.asarray(tables, dtype=float)
        if tables.ndim == 2:
            tables = tables[:, :, None]
        if tables.ndim != 3 or tables.shape[0] == 0:
            raise ValueError("a finite class needs a nonempty list of n x K tables")
        if not np.all(np.isfinite(tables)):
            raise ValueError("table entries must be finite")
        self.tables = tables
        self.sample = sample
        self.n = tables.shape[1]
        self.output_dim = tables.shape[2]

    def __len__(self):
        return self.tables.shape[0]

    def weighted_sup_batch(self, A, gen=None):
        A = self._check_coeffs(A)
        flat = self.tables.reshape(len(self), -1)
        return np.max(A.reshape(len(A), -1) @ flat.T, axis=1)

    def weighted_sup(self, A, gen=None):
        A = self._check_coeffs(A)[0]
        scores = self.tables.reshape(len(self), -1) @ A.ravel()
        m = int(np.argmax(scores))
        return float(scores[m]), m

    def loss_table(self, losses) -> np.ndarray:
        """``H[m, i] = h_i(f_m(x_i))``."""
        if isinstance(losses, LipschitzLoss):
            return np.asarray(losses(self.tables), dtype=float)
        return np.stack([np.asarray(h(self.tables[:, i, :]), dtype=float) for i, h in enumerate(losses)], axis=1)

    def loss_weighted_sup_batch(self, signs, losses, gen=None):
        signs, losses = self._check_signs(signs, losses)
        return np.max(signs @ self.loss_table(losses).T, axis=1)

    def loss_weighted_sup(self, signs, losses, gen=None):
        signs, losses = self._check_signs(signs, losses)
        scores = self.loss_table(losses) @ signs[0]
        return float(scores.max()), Exactness.EXACT

    def subset(self, idx) -> FiniteClass:
        return FiniteClass(self.tables[np.atleast_1d(idx)], self.sample)

    def component(self, k: int) -> FiniteClass:
        """The scalar class of k-th coordinate functions."""
        return FiniteClass(self.tables[:, :, k : k + 1], self.sample)


class ProductClass(FunctionClass):
    """Coordinates ranging independently over scalar component classes."""

    kind = ClassKind.PRODUCT

    def __init__(self, components):
        components = list(components)
        if not components:
            raise ValueError("a product class needs at least one component")
        n = components[0].n
        for c in components:
            if c.output_dim != 1 or c.n != n:
                raise ValueError("product components must be scalar classes on one sample")
        self.components = components
        self.n = n
        self.output_dim = len(components)
        exact = all(c.exactness is Exactness.EXACT for c in components)
        self.exactness = Exactness.EXACT if exact else Exactness.LOWER_BOUND

    def weighted_sup_batch(self, A, gen=None):
        A = self._check_coeffs(A)
        return sum(c.weighted_sup_batch(A[:, :, k : k + 1], gen) for k, c in enumerate(self.components))

    def weighted_sup(self, A, gen=None):
        A = self._check_coeffs(A)[0]
        parts = [c.weighted_sup(A[:, k : k + 1], gen) for k, c in enumerate(self.components)]
        return float(sum(v for v, _ in parts)), tuple(w for _, w in parts)

    def materialize(self, limit: int = 100_000) -> FiniteClass:
        if not all(isinstance(c, FiniteClass) for c in self.components):
            raise ValueError("only products of finite classes can be materialized")
        sizes = [len(c) for c in self.components]
        if math.prod(sizes) > limit:
            raise ValueError(f"product has {math.prod(sizes)} members, above {limit}")
        grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
        picks = [g.ravel() for g in grids]
        tables = np.concatenate([c.tables[p] for c, p in zip(self.components, picks)], axis=2)
        return FiniteClass(tables)

    def loss_weighted_sup_batch(self, signs, losses, gen=None):
        return self.materialize().loss_weighted_sup_batch(signs, losses, gen)

    def loss_weighted_sup(self, signs, losses, gen=None):
        return self.materialize().loss_weighted_sup(signs, losses, gen)


class FeatureMapFinite(FiniteClass):
    """Finitely many feature maps h: X -> R^K tabulated on a meta-sample.

    ``tables`` has shape ``(M, T, n, K)``.  As a vector-valued class it lives
    on the flattened meta-sample of ``T * n`` points.
    """

    kind = ClassKind.FEATURE_MAP_FINITE

    def __init__(self, tables, meta_sample: MetaSample | None = None):
        tables = np.asarray(tables, dtype=float)
        if tables.ndim != 4 or tables.shape[0] == 0:
            raise ValueError("feature map tables have shape (M, T, n, K) with M >= 1")
        self.maps = tables
        self.T, self.per_task = tables.shape[1], tables.shape[2]
        self.meta_sample = meta_sample
        M, T, n, K = tables.shape
        super().__init__(tables.reshape(M, T * n, K))

    def task_errors(self, loss_class) -> np.ndarray:
        """``Psi[m, t]``: training error of map m on task t."""
        return np.array([[ltl_psi(h, t, loss_class) for t in range(self.T)] for h in self.maps])

    def phi(self, m: int, t: int) -> np.ndarray:
        """The Kn-vector ``[h_k(x_i^t)]`` of map m on task t."""
        return self.maps[m, t].T.ravel()


class LinearNormBall(FunctionClass):
    """``x -> W x`` with ``|||W||| <= radius`` for the Frobenius or spectral norm."""

    kind = ClassKind.LINEAR_NORM_BALL

    def __init__(self, sample: Sample, K: int, radius: float = 1.0, norm: str = "frobenius", ascent=None):
        if radius <= 0:
            raise ValueError("radius must be positive")
        if norm not in ("frobenius", "spectral"):
            raise ValueError(f"unknown norm {norm!r}")
        self.sample = sample if isinstance(sample, Sample) else Sample(sample)
        self.radius = float(radius)
        self.norm = norm
        self.n = self.sample.n
        self.output_dim = int(K)
        self.ascent = ascent or AscentConfig()

    def _D(self, A):
        # D[b, k, :] = sum_i A[b, i, k] x_i
        return np.einsum("bik,id->bkd", A, self.sample.points)

    def weighted_sup_batch(self, A, gen=None):
        D = self._D(self._check_coeffs(A))
        if self.norm == "frobenius":
            return self.radius * np.sqrt(np.sum(D**2, axis=(1, 2)))
        return self.radius * np.linalg.svd(D, compute_uv=False).sum(axis=-1)

    def weighted_sup(self, A, gen=None):
        D = self._D(self._check_coeffs(A))[0]
        if self.norm == "frobenius":
            nrm = float(np.linalg.norm(D))
            W = self.radius * D / nrm if nrm > 0 else np.zeros_like(D)
            return self.radius * nrm, W
        U, s, Vt = np.linalg.svd(D, full_matrices=False)
        return self.radius * float(s.sum()), self.radius * U @ Vt

    def project(self, W):
        """Euclidean projection of a stack of matrices onto the norm ball."""
        if self.norm == "frobenius":
            nrm = np.sqrt(np.sum(W**2, axis=(-2, -1), keepdims=True))
            return W * np.minimum(1.0, self.radius / np.maximum(nrm, 1e-300))
        U, s, Vt = np.linalg.svd(W, full_matrices=False)
        return U @ (np.minimum(s, self.radius)[..., None] * Vt)

    def loss_exactness(self, losses):
        return Exactness.LOWER_BOUND

    def loss_weighted_sup_batch(self, signs, losses, gen=None):
        signs, losses = self._check_signs(signs, losses)
        gen = gen or np.random.default_rng(0)
        return np.array([self._ascend(s, losses, gen)[0] for s in signs])

    def loss_weighted_sup(self, signs, losses, gen=None):
        signs, losses = self._check_signs(signs, losses)
        return self._ascend(signs[0], losses, gen or np.random.default_rng(0))[0], Exactness.LOWER_BOUND

    def _ascend(self, s, losses, gen):
        X = self.sample.points
        cfg = self.ascent
        K, d = self.output_dim, self.sample.d
        init = self.project(gen.standard_normal((cfg.restarts, K, d)) * self.radius)

        def value_grad(W):
            out = np.einsum("rkd,id->rik", W, X)
            val = np.zeros(len(W))
            grad_out = np.zeros_like(out)
            for i, h in enumerate(losses):
                val += s[i] * h(out[:, i, :])
                grad_out[:, i, :] = s[i] * h.subgradient(out[:, i, :])
            return val, np.einsum("rik,id->rkd", grad_out, X)

        return projected_ascent(value_grad, self.project, init, cfg)


class KMeansCenters(FunctionClass):
    """K centers in the unit ball; outputs ``phi_i(c) = (|x_i - c_k|^2)_k``.

    The vector sup separates over centers and is solved in closed form.  The
    loss-composed sup (a max of minima) is non-concave and goes through the
    multi-restart ascent, so it is only a lower bound.
    """

    kind = ClassKind.KMEANS_CENTERS

    def __init__(self, sample: Sample, K: int, ascent=None):
        self.sample = sample if isinstance(sample, Sample) else Sample(sample)
        self.sample.check_unit_ball()
        if K < 1:
            raise ValueError("K must be >= 1")
        self.n = self.sample.n
        self.output_dim = int(K)
        self.ascent = ascent or AscentConfig()
        self._sq = np.sum(self.sample.points**2, axis=1)

    def _center_terms(self, A):
        a = A.sum(axis=1)  # (B, K)
        D = np.einsum("bik,id->bkd", A, self.sample.points)
        const = np.einsum("bik,i->bk", A, self._sq)
        return a, D, const

    @staticmethod
    def _best_radius(a, dn):
        # maximize a r^2 + 2 r |D| over r in [0, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            interior = np.where(a < 0, dn / np.where(a < 0, -a, 1.0), 1.0)
        return np.minimum(1.0, interior)

    def weighted_sup_batch(self, A, gen=None):
        a, D, const = self._center_terms(self._check_coeffs(A))
        dn = np.linalg.norm(D, axis=-1)
        r = self._best_radius(a, dn)
        return np.sum(const + a * r**2 + 2 * r * dn, axis=1)

    def weighted_sup(self, A, gen=None, method: str = "closed_form"):
        A = self._check_coeffs(A)
        if method == "ascent":
            return self._vector_ascent(A[0], gen or np.random.default_rng(0))
        a, D, const = self._center_terms(A)
        dn = np.linalg.norm(D, axis=-1)
        r = self._best_radius(a, dn)
        unit = np.divide(D, dn[..., None], out=np.zeros_like(D), where=dn[..., None] > 0)
        unit[dn == 0, 0] = 1.0
        centers = -(r[..., None] * unit)[0]
        return float(np.sum(const + a * r**2 + 2 * r * dn)), centers

    def _vector_ascent(self, A, gen):
        X = self.sample.points
        cfg = self.ascent

        def value_grad(C):
            dist = self._sq[None, :, None] - 2 * np.einsum("rkd,id->rik", C, X) + np.sum(C**2, -1)[:, None, :]
            val = np.einsum("rik,ik->r", dist, A)
            grad = 2 * (A.sum(0)[None, :, None] * C - np.einsum("ik,id->kd", A, X)[None])
            return val, grad

        init = _random_ball((cfg.restarts, self.output_dim, self.sample.d), gen)
        value, centers = projected_ascent(value_grad, project_unit_ball, init, cfg)
        return value, centers

    def phi(self, centers) -> np.ndarray:
        """``(n, K)`` squared distances from every point to every center."""
        return kmeans_phi(centers, self.sample.points)

    def loss_exactness(self, losses):
        return Exactness.LOWER_BOUND

    def loss_weighted_sup_batch(self, signs, losses=None, gen=None):
        losses = losses if losses is not None else MinCoordinate()
        signs, losses = self._check_signs(signs, losses)
        gen = gen or np.random.default_rng(0)
        cfg = self.ascent
        init = _random_ball((len(signs), cfg.restarts, self.output_dim, self.sample.d), gen)
        if all(h.kind is LossKind.MIN_COORDINATE and type(h) is MinCoordinate for h in losses):
            return _kmeans_min_ascent(
                self.sample.points, self._sq, signs, init, cfg.steps, cfg.step_size, cfg.tol
            )
        return np.array([self._loss_ascent(s, losses, r0)[0] for s, r0 in zip(signs, init)])

    def loss_weighted_sup(self, signs, losses=None, gen=None):
        value = self.loss_weighted_sup_batch(signs, losses, gen)[0]
        return float(value), Exactness.LOWER_BOUND

    def _loss_ascent(self, s, losses, init):
        X = self.sample.points

        def value_grad(C):
            diff = C[:, None, :, :] - X[None, :, None, :]  # (R, n, K, d)
            phi = np.sum(diff**2, axis=-1)
            val = np.zeros(len(C))
            grad = np.zeros_like(C)
            for i, h in enumerate(losses):
                val += s[i] * h(phi[:, i, :])
                g = s[i] * h.subgradient(phi[:, i, :])  # (R, K)
                grad += 2 * g[..., None] * diff[:, i]
            return val, grad

        return projected_ascent(value_grad, project_unit_ball, init, self.ascent)


class OperatorProjection(FunctionClass):
    """Coordinate projections ``P_S`` on the orthonormal sample ``e_1..e_n``.

    ``P_S e_i = e_i`` if ``i`` is in S and 0 otherwise; S ranges over all
    subsets, so the class has 2^n members but every oracle separates over i.
    """

    kind = ClassKind.OPERATOR_PROJECTION

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = self.output_dim = int(n)

    def weighted_sup_batch(self, A, gen=None):
        A = self._check_coeffs(A)
        return np.sum(np.maximum(0.0, np.diagonal(A, axis1=1, axis2=2)), axis=1)

    def weighted_sup(self, A, gen=None):
        diag = np.diag(self._check_coeffs(A)[0])
        return float(np.maximum(diag, 0).sum()), tuple(np.flatnonzero(diag > 0).tolist())

    def _on_off(self, losses):
        eye = np.eye(self.n)
        on = np.array([h(eye[i]) for i, h in enumerate(losses)])
        off = np.array([h(np.zeros(self.n)) for h in losses])
        return on, off

    def loss_weighted_sup_batch(self, signs, losses, gen=None):
        signs, losses = self._check_signs(signs, losses)
        on, off = self._on_off(losses)
        return np.sum(np.maximum(signs * on, signs * off), axis=1)

    def loss_weighted_sup(self, signs, losses, gen=None):
        return float(self.loss_weighted_sup_batch(signs, losses)[0]), Exactness.EXACT

    def to_finite(self) -> FiniteClass:
        """All 2^n projections as explicit tables (small n only)."""
        if self.n > 12:
            raise ValueError("too many subsets to tabulate")
        masks = (1.0 - sign_patterns(self.n)) / 2
        return FiniteClass(masks[:, :, None] * np.eye(self.n)[None])


def project_unit_ball(C):
    """Radial projection of every row vector onto the closed unit ball."""
    nrm = np.linalg.norm(C, axis=-1, keepdims=True)
    return C / np.maximum(nrm, 1.0)


def _random_ball(shape, gen):
    d = shape[-1]
    g = gen.standard_normal(shape)
    g /= np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1e-300)
    return g * gen.uniform(size=shape[:-1] + (1,)) ** (1.0 / d)


def projected_ascent(value_grad, project, init, cfg: AscentConfig):
    """Projected subgradient ascent from several starting points at once.

    Step t moves every restart by ``step_size / sqrt(t)`` times its
    subgradient and projects back; a restart freezes once its value changes
    by less than ``tol``.  Returns the best value seen and the point
    attaining it.
    """
    x = project(np.array(init, dtype=float))
    val, grad = value_grad(x)
    best = val.copy()
    best_x = x.copy()
    active = np.ones(len(x), dtype=bool)
    shape = (-1,) + (1,) * (x.ndim - 1)
    for t in range(1, cfg.steps + 1):
        step = cfg.step_size / math.sqrt(t)
        x = np.where(active.reshape(shape), project(x + step * grad), x)
        new, grad = value_grad(x)
        better = new > best
        best = np.where(better, new, best)
        best_x[better] = x[better]
        active &= np.abs(new - val) >= cfg.tol
        val = new
        if not active.any():
            break
    r = int(np.argmax(best))
    return float(best[r]), best_x[r]


@numba.njit(cache=True)
def _kmeans_min_ascent(X, sq, signs, init, steps, step_size, tol):
    """Batched ascent on ``sum_i s_i min_k |x_i - c_k|^2``.

    ``init`` has shape ``(B, R, K, d)``; restarts are kept in the innermost
    axis so the per-point work vectorizes across them.
    """
    B = signs.shape[0]
    R, K, d = init.shape[1], init.shape[2], init.shape[3]
    n = X.shape[0]
    out = np.empty(B)
    C = np.empty((K, d, R))
    G = np.empty((K, d, R))
    dist = np.empty((K, R))
    w = np.empty((K, R))
    dmin = np.empty(R)
    kmin = np.empty(R, np.int64)
    val = np.empty(R)
    best = np.empty(R)
    prev = np.empty(R)
    active = np.empty(R, np.bool_)
    for b in range(B):
        s = signs[b]
        for k in range(K):
            for j in range(d):
                for r in range(R):
                    C[k, j, r] = init[b, r, k, j]
        best[:] = -np.inf
        prev[:] = np.nan
        active[:] = True
        for t in range(1, steps + 2):
            G[:] = 0.0
            val[:] = 0.0
            for i in range(n):
                for k in range(K):
                    for r in range(R):
                        dist[k, r] = 0.0
                    for j in range(d):
                        xij = X[i, j]
                        for r in range(R):
                            diff = xij - C[k, j, r]
                            dist[k, r] += diff * diff
                for r in range(R):
                    dmin[r] = dist[0, r]
                    kmin[r] = 0
                for k in range(1, K):
                    for r in range(R):
                        if dist[k, r] < dmin[r]:
                            dmin[r] = dist[k, r]
                            kmin[r] = k
                si = s[i]
                for r in range(R):
                    val[r] += si * dmin[r]
                for k in range(K):
                    for r in range(R):
                        w[k, r] = 2.0 * si if kmin[r] == k else 0.0
                    for j in range(d):
                        xij = X[i, j]
                        for r in range(R):
                            G[k, j, r] += w[k, r] * (C[k, j, r] - xij)
            running = False
            for r in range(R):
                if val[r] > best[r]:
                    best[r] = val[r]
                if active[r] and (t > steps or abs(val[r] - prev[r]) < tol):
                    active[r] = False
                prev[r] = val[r]
                running |= active[r]
            if not running:
                break
            step = step_size / np.sqrt(t)
            for k in range(K):
                for r in range(R):
                    w[k, r] = 0.0
                for j in range(d):
                    for r in range(R):
                        if active[r]:
                            C[k, j, r] += step * G[k, j, r]
                        w[k, r] += C[k, j, r] * C[k, j, r]
                for r in range(R):
                    w[k, r] = 1.0 / np.sqrt(w[k, r]) if w[k, r] > 1.0 else 1.0
                for j in range(d):
                    for r in range(R):
                        C[k, j, r] *= w[k, r]
        m = best[0]
        for r in range(1, R):
            if best[r] > m:
                m = best[r]
        out[b] = m
    return out


def weighted_sup(cls: FunctionClass, A, gen=None):
    """``sup_f sum_{i,k} A[i,k] f_k(x_i)`` and a maximizing witness."""
    return cls.weighted_sup(A, gen)


def loss_weighted_sup(cls: FunctionClass, signs, losses, gen=None):
    """``sup_f sum_i s_i h_i(f(x_i))`` and the exactness of the value."""
    return cls.loss_weighted_sup(signs, losses, gen)


def kmeans_phi(centers, X) -> np.ndarray:
    C = np.atleast_2d(np.asarray(centers, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=-1)


def _check_centers(C, tol=1e-12):
    nrm = np.linalg.norm(C, axis=-1)
    if np.any(nrm > 1 + tol):
        k = int(np.argmax(nrm))
        raise ValueError(f"center {k} has norm {nrm[k]:.6g} > 1")


def kmeans_psi(centers, x) -> float:
    """Squared distance from ``x`` to the nearest center."""
    C = np.atleast_2d(np.asarray(centers, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    _check_centers(C)
    if np.linalg.norm(x) > 1 + 1e-12:
        raise ValueError(f"point has norm {np.linalg.norm(x):.6g} > 1")
    return float(kmeans_phi(C, x[None])[0].min())


def kmeans_lipschitz_check(c, c_prime, sample) -> np.ndarray:
    """Per-point ``psi_i(c) - psi_i(c') - |phi_i(c) - phi_i(c')|`` (never positive)."""
    X = sample.points if isinstance(sample, Sample) else np.atleast_2d(np.asarray(sample, dtype=float))
    C, Cp = np.atleast_2d(np.asarray(c, dtype=float)), np.atleast_2d(np.asarray(c_prime, dtype=float))
    _check_centers(C)
    _check_centers(Cp)
    phi, phi_p = kmeans_phi(C, X), kmeans_phi(Cp, X)
    return phi.min(axis=1) - phi_p.min(axis=1) - np.linalg.norm(phi - phi_p, axis=1)


def ltl_psi(feature_map_table, task_index: int, loss_class) -> float:
    """Best average loss on one task after the features: ``min_f mean_i f(h(x_i^t))``.

    ``feature_map_table`` holds the values of one feature map, shape
    ``(T, n, K)``.
    """
    loss_class = list(loss_class)
    if not loss_class:
        raise ValueError("empty loss class")
    table = np.asarray(feature_map_table, dtype=float)
    feats = table[task_index]
    return float(min(np.mean(f(feats)) for f in loss_class))
