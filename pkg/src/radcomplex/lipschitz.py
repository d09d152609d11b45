"""Lipschitz functions on R^K with certified constants."""

from __future__ import annotations

import enum
import math

import numpy as np

__all__ = [
    "LossKind",
    "LipschitzLoss",
    "EuclideanNorm",
    "MaxCoordinate",
    "MinCoordinate",
    "DistanceToPoint",
    "MarginLoss",
    "Constant",
    "Custom",
    "Scaled",
    "Clipped",
    "empirical_lipschitz",
    "loss_from_spec",
]


class LossKind(str, enum.Enum):
    EUCLIDEAN_NORM = "norm"
    MAX_COORDINATE = "max"
    MIN_COORDINATE = "min"
    DISTANCE_TO_POINT = "distance"
    MARGIN = "margin"
    CONSTANT = "constant"
    CUSTOM = "custom"


class LipschitzLoss:
    """A function h: R^K -> R together with a certified Lipschitz constant.

    Calling the loss evaluates it along the last axis, so ``h(u)`` accepts a
    single K-vector or any stack of them.
    """

    kind: LossKind
    L: float
    dim: int | None = None

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.dim is not None and u.shape[-1] != self.dim:
            raise ValueError(f"{self.kind.value} loss expects dimension {self.dim}, got {u.shape[-1]}")
        return self._eval(u)

    def _eval(self, u):
        raise NotImplementedError

    def subgradient(self, u):
        """A subgradient along the last axis; ties broken by lowest index."""
        raise NotImplementedError(f"{self.kind.value} loss has no subgradient")

    @property
    def differentiable(self) -> bool:
        return type(self).subgradient is not LipschitzLoss.subgradient

    def scaled(self, c: float) -> Scaled:
        return Scaled(self, c)

    def clipped(self, lo: float = 0.0, hi: float = 1.0) -> Clipped:
        return Clipped(self, lo, hi)

    def __repr__(self):
        return f"{type(self).__name__}(L={self.L:g})"


class EuclideanNorm(LipschitzLoss):
    kind = LossKind.EUCLIDEAN_NORM
    L = 1.0

    def _eval(self, u):
        return np.linalg.norm(u, axis=-1)

    def subgradient(self, u):
        u = np.asarray(u, dtype=float)
        nrm = np.linalg.norm(u, axis=-1, keepdims=True)
        return np.divide(u, nrm, out=np.zeros_like(u), where=nrm > 0)


class MaxCoordinate(LipschitzLoss):
    kind = LossKind.MAX_COORDINATE
    L = 1.0

    def _eval(self, u):
        return np.max(u, axis=-1)

    def subgradient(self, u):
        u = np.asarray(u, dtype=float)
        g = np.zeros_like(u)
        np.put_along_axis(g, np.argmax(u, axis=-1)[..., None], 1.0, axis=-1)
        return g


class MinCoordinate(LipschitzLoss):
    """``u -> min_k u_k``; the K-means loss on the vector of squared distances."""

    kind = LossKind.MIN_COORDINATE
    L = 1.0

    def _eval(self, u):
        return np.min(u, axis=-1)

    def subgradient(self, u):
        u = np.asarray(u, dtype=float)
        g = np.zeros_like(u)
        np.put_along_axis(g, np.argmin(u, axis=-1)[..., None], 1.0, axis=-1)
        return g


class DistanceToPoint(LipschitzLoss):
    kind = LossKind.DISTANCE_TO_POINT
    L = 1.0

    def __init__(self, anchor):
        self.anchor = np.asarray(anchor, dtype=float).ravel()
        self.dim = self.anchor.size

    def _eval(self, u):
        return np.linalg.norm(u - self.anchor, axis=-1)

    def subgradient(self, u):
        return EuclideanNorm().subgradient(np.asarray(u, dtype=float) - self.anchor)


class MarginLoss(LipschitzLoss):
    """Ramp loss on the multi-class margin ``u_y - max_{k != y} u_k``.

    Labels run from 1 to K.  The margin map is sqrt(2)-Lipschitz and the
    ramp ``clip(1 - m / gamma, 0, 1)`` adds a factor 1/gamma.
    """

    kind = LossKind.MARGIN

    def __init__(self, label: int, gamma: float = 1.0, dim: int | None = None):
        if label < 1:
            raise ValueError("labels start at 1")
        if gamma <= 0:
            raise ValueError("margin gamma must be positive")
        if dim is not None and label > dim:
            raise ValueError(f"label {label} outside 1..{dim}")
        self.label = int(label)
        self.gamma = float(gamma)
        self.dim = dim
        self.L = math.sqrt(2.0) / self.gamma

    def _margin(self, u):
        y = self.label - 1
        if u.shape[-1] < 2 or y >= u.shape[-1]:
            raise ValueError(f"margin loss with label {self.label} needs K >= max(2, label)")
        others = np.delete(u, y, axis=-1)
        j = np.argmax(others, axis=-1)
        return u[..., y] - np.take_along_axis(others, j[..., None], -1)[..., 0], j

    def _eval(self, u):
        m, _ = self._margin(u)
        return np.clip(1.0 - m / self.gamma, 0.0, 1.0)

    def subgradient(self, u):
        u = np.asarray(u, dtype=float)
        m, j = self._margin(u)
        y = self.label - 1
        j = np.where(j >= y, j + 1, j)
        active = ((1.0 - m / self.gamma) > 0) & ((1.0 - m / self.gamma) < 1)
        g = np.zeros_like(u)
        np.put_along_axis(g, np.full(m.shape, y)[..., None], -1.0 / self.gamma, axis=-1)
        np.put_along_axis(g, j[..., None], 1.0 / self.gamma, axis=-1)
        return g * active[..., None]


class Constant(LipschitzLoss):
    kind = LossKind.CONSTANT
    L = 0.0

    def __init__(self, value: float):
        self.value = float(value)

    def _eval(self, u):
        return np.full(u.shape[:-1], self.value)

    def subgradient(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))


class Custom(LipschitzLoss):
    """A loss defined only on a finite set of points by a value table.

    Without an explicit ``L`` the constant is certified from the table with
    :func:`empirical_lipschitz`.
    """

    kind = LossKind.CUSTOM

    def __init__(self, points, values, L: float | None = None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float).ravel()
        if len(points) != len(values):
            raise ValueError("custom loss needs one value per point")
        self.points = points
        self.values = values
        self.dim = points.shape[1]
        self._lookup: dict[bytes, float] = {}
        for p, v in zip(points, values):
            key = np.ascontiguousarray(p).tobytes()
            if key in self._lookup and self._lookup[key] != v:
                raise ValueError("custom loss assigns two values to one point")
            self._lookup[key] = float(v)
        self.L = empirical_lipschitz(values, points) if L is None else float(L)
        if not math.isfinite(self.L):
            raise ValueError("custom loss table admits no finite Lipschitz constant")

    def _eval(self, u):
        flat = np.ascontiguousarray(u.reshape(-1, u.shape[-1]))
        out = np.empty(len(flat))
        for idx, row in enumerate(flat):
            try:
                out[idx] = self._lookup[row.tobytes()]
            except KeyError:
                raise ValueError(f"custom loss undefined at {row.tolist()}") from None
        return out.reshape(u.shape[:-1])


class Scaled(LipschitzLoss):
    def __init__(self, base: LipschitzLoss, c: float):
        self.base = base
        self.c = float(c)
        self.kind = base.kind
        self.dim = base.dim
        self.L = abs(self.c) * base.L

    def _eval(self, u):
        return self.c * self.base(u)

    def subgradient(self, u):
        return self.c * self.base.subgradient(u)


class Clipped(LipschitzLoss):
    def __init__(self, base: LipschitzLoss, lo: float, hi: float):
        if lo > hi:
            raise ValueError("empty clipping range")
        self.base = base
        self.lo, self.hi = float(lo), float(hi)
        self.kind = base.kind
        self.dim = base.dim
        self.L = base.L

    def _eval(self, u):
        return np.clip(self.base(u), self.lo, self.hi)

    def subgradient(self, u):
        v = self.base(u)
        inside = (v > self.lo) & (v < self.hi)
        return self.base.subgradient(u) * np.asarray(inside)[..., None]


def empirical_lipschitz(psi, phi) -> float:
    """Smallest L with ``psi(s) - psi(s') <= L |phi(s) - phi(s')|`` on the table.

    Returns ``inf`` when two elements share a phi value but not a psi value.
    """
    psi = np.asarray(psi, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float)
    if phi.ndim == 1:
        phi = phi[:, None]
    if len(psi) != len(phi):
        raise ValueError("psi and phi must have one entry per element")
    if len(psi) < 2:
        return 0.0
    dpsi = psi[:, None] - psi[None, :]
    dphi = np.linalg.norm(phi[:, None, :] - phi[None, :, :], axis=-1)
    same = dphi == 0
    if np.any(same & (dpsi != 0)):
        return math.inf
    ratios = np.divide(dpsi, dphi, out=np.zeros_like(dpsi), where=~same)
    return float(max(ratios.max(), 0.0))


def loss_from_spec(spec: str) -> LipschitzLoss:
    """Build a catalog loss from a short name such as ``margin:2:0.5``.

    Recognised: ``norm``, ``max``, ``min``, ``distance:a1,a2,...``,
    ``margin:y[:gamma]``, ``constant:c``.
    """
    name, _, rest = spec.strip().partition(":")
    name = name.lower()
    if name in ("norm", "euclidean"):
        return EuclideanNorm()
    if name == "max":
        return MaxCoordinate()
    if name == "min":
        return MinCoordinate()
    if name == "distance":
        return DistanceToPoint([float(t) for t in rest.split(",")])
    if name == "margin":
        parts = rest.split(":")
        return MarginLoss(int(parts[0]), float(parts[1]) if len(parts) > 1 else 1.0)
    if name == "constant":
        return Constant(float(rest))
    raise ValueError(f"unknown loss {spec!r}")
