"""Tensor-product Gauss-Legendre rules on the round sphere S^n.

Points are parametrised by hyperspherical angles theta_1..theta_{n-1} in
[0, pi] and an azimuth phi in [0, 2 pi).  Polar angles use Gauss-Legendre
nodes with the sin^k Jacobian folded into the weights; the periodic azimuth
uses the midpoint rule, which is spectrally accurate for smooth periodic
integrands.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma

__all__ = [
    "QuadSpec",
    "QuadResult",
    "QuadratureWarning",
    "default_order",
    "sphere_rule",
    "sphere_volume",
    "rotation_to",
    "integrate_adaptive",
]

ENV_ORDER = "RESONANCE_QUAD_ORDER"


class QuadratureWarning(UserWarning):
    """Successive quadrature levels did not agree to the requested tolerance."""


def default_order() -> int:
    raw = os.environ.get(ENV_ORDER)
    if raw:
        try:
            q = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_ORDER} must be an integer, got {raw!r}") from None
        if q < 2:
            raise ValueError(f"{ENV_ORDER} must be >= 2")
        return q
    return 48


@dataclass(frozen=True)
class QuadSpec:
    """order: polar node count (azimuth uses 2*order); adaptive doubling
    stops when two levels agree to ``tol`` (relative to the result size)."""

    order: Optional[int] = None
    adaptive: bool = True
    tol: float = 1e-10
    max_order: Optional[int] = None
    axis: Optional[tuple] = None

    def start(self) -> int:
        return self.order if self.order is not None else default_order()

    def cap(self, n: int) -> int:
        if self.max_order is not None:
            return self.max_order
        return {1: 4096, 2: 384}.get(n, 96)


@dataclass(frozen=True)
class QuadResult:
    value: object
    error: float
    order: int
    converged: bool


def sphere_volume(n: int) -> float:
    """Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    return 2.0 * np.pi ** ((n + 1) / 2) / _gamma((n + 1) / 2)


@lru_cache(maxsize=64)
def _rule(n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    nphi = 2 * q
    phi = (np.arange(nphi) + 0.5) * (2 * np.pi / nphi)
    wphi = np.full(nphi, 2 * np.pi / nphi)
    # start with S^1: (cos phi, sin phi)
    pts = np.column_stack([np.cos(phi), np.sin(phi)])
    wts = wphi
    t, wt = np.polynomial.legendre.leggauss(q)
    theta = 0.5 * np.pi * (t + 1.0)
    wtheta = 0.5 * np.pi * wt
    for k in range(1, n):
        # S^{k+1} = (cos th, sin th * S^k), Jacobian sin^k th
        c, s = np.cos(theta), np.sin(theta)
        w_k = wtheta * s ** k
        pts = np.concatenate([
            np.repeat(c, len(pts))[:, None],
            (s[:, None, None] * pts[None, :, :]).reshape(-1, pts.shape[1]),
        ], axis=1)
        wts = (w_k[:, None] * wts[None, :]).ravel()
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def rotation_to(axis) -> np.ndarray:
    """An orthogonal matrix R with R e_0 = axis (a Householder reflection)."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    e = np.zeros_like(a)
    e[0] = 1.0
    v = e - a
    nv = v @ v
    if nv < 1e-30:
        return np.eye(a.shape[0])
    return np.eye(a.shape[0]) - 2.0 * np.outer(v, v) / nv


def sphere_rule(n: int, order: int, axis=None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (M, n+1) and weights (M,) with the polar axis at ``axis``."""
    pts, wts = _rule(n, int(order))
    if axis is not None:
        pts = pts @ rotation_to(axis).T
    return pts, wts


def integrate_adaptive(f: Callable[[np.ndarray, np.ndarray], object], n: int,
                       spec: QuadSpec = QuadSpec(), axis=None) -> QuadResult:
    """Integrate f(nodes, weights) -> array, doubling the order until two
    successive levels agree.  ``f`` must return the weighted sum itself."""
    axis = spec.axis if spec.axis is not None else axis
    q = spec.start()
    prev = f(*sphere_rule(n, q, axis))
    if not spec.adaptive:
        return QuadResult(prev, float("nan"), q, True)
    cap = max(spec.cap(n), q)
    err = float("inf")
    while True:
        q2 = 2 * q
        if q2 > cap:
            return QuadResult(prev, err, q, False)
        cur = f(*sphere_rule(n, q2, axis))
        err = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        scale = max(1.0, float(np.max(np.abs(np.asarray(cur)))))
        q = q2
        prev = cur
        if err <= spec.tol * scale:
            return QuadResult(cur, err, q, True)
