"""The bundle E over the unit tangent bundle, transport to the boundary, pullbacks.

Fibers E(x, xi) = {eta : <eta, x> = <eta, xi> = 0} carry the Riemannian inner
product -<., .>.  Tensors on a fiber are expressed as ``SymTensor`` objects
in an explicit orthonormal frame (by default columns 2..n+1 of ``frame_at``).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .lorentz_core import (
    DomainError,
    GroupElement,
    UnitTangent,
    boost_to,
    boundary_action,
    boundary_maps,
    frame_at,
    minkowski_inner,
)
from .sym_tensor import SymTensor

__all__ = [
    "TangencyWarning",
    "EFiberBasis",
    "SplitBasis",
    "BoundaryTensorField",
    "fiber_basis",
    "natural_norm",
    "stable_unstable",
    "flow_push",
    "transport_A",
    "transport_A_inv",
    "transport_matrix",
    "transport_matrix_inv",
    "contract_axes",
    "pullback_Q",
    "tangent_projector",
    "sphere_tangent_basis",
    "boundary_differential",
    "eta_twist_C",
    "tensor_pullback",
    "psi_map",
    "psi_inv",
    "jacobian_psi",
    "jacobian_psi_closed_form",
    "twist_identity_sides",
    "equivariance_test_field",
    "polynomial_boundary_field",
]


class TangencyWarning(UserWarning):
    """A boundary tangent vector needed a projection larger than 1e-8."""


def _spacelike_norm(v) -> float:
    return float(np.sqrt(max(-minkowski_inner(v, v), 0.0)))


@dataclass(frozen=True, eq=False)
class EFiberBasis:
    """Orthonormal basis (rows of ``vectors``) of the fiber E at ``base``."""

    base: UnitTangent
    vectors: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=float)
        n = self.base.n
        if V.shape != (n, n + 2):
            raise DomainError(f"fiber basis must have shape ({n}, {n + 2})")
        ortho = max(np.max(np.abs(minkowski_inner(V, self.base.x))),
                    np.max(np.abs(minkowski_inner(V, self.base.xi))))
        gram = -(V * np.concatenate(([1.0], -np.ones(n + 1)))) @ V.T
        if ortho > 1e-10 or np.max(np.abs(gram - np.eye(n))) > 1e-10:
            raise DomainError("vectors are not an orthonormal basis of the fiber")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    def coords(self, eta) -> np.ndarray:
        """Orthonormal coordinates c_i = -<eta, e_i>."""
        return -minkowski_inner(self.vectors, np.asarray(eta))

    def vector(self, c) -> np.ndarray:
        return np.asarray(c) @ self.vectors


def fiber_basis(rho: UnitTangent, gamma: Optional[GroupElement] = None) -> EFiberBasis:
    """Columns 2..n+1 of ``gamma`` (default ``frame_at(rho)``)."""
    g = frame_at(rho) if gamma is None else gamma
    return EFiberBasis(rho, g.matrix[:, 2:].T)


@dataclass(frozen=True, eq=False)
class SplitBasis:
    """Flow direction and stable/unstable bases as (v_x, v_xi) pairs."""

    E0: tuple
    Es: list
    Eu: list

    def matrix(self) -> np.ndarray:
        """All 2n+1 vectors as rows of length 2(n+2)."""
        rows = [np.concatenate(self.E0)] + [np.concatenate(w) for w in self.Es + self.Eu]
        return np.array(rows)


def natural_norm(w) -> float:
    vx, vxi = w
    return float(np.sqrt(-minkowski_inner(vx, vx) - minkowski_inner(vxi, vxi)))


def stable_unstable(rho: UnitTangent) -> SplitBasis:
    V = fiber_basis(rho).vectors
    return SplitBasis((rho.xi.copy(), rho.x.copy()),
                      [(v, -v) for v in V], [(v, v.copy()) for v in V])


def flow_push(rho: UnitTangent, t: float, w):
    """Differential of the geodesic flow on a tangent pair (v_x, v_xi)."""
    vx, vxi = (np.asarray(a, dtype=float) for a in w)
    c, s = np.cosh(t), np.sinh(t)
    return vx * c + vxi * s, vx * s + vxi * c


def _B(rho: UnitTangent, sign: int) -> np.ndarray:
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    phi_m, phi_p, Bm, Bp = boundary_maps(rho)
    return (Bp if sign > 0 else Bm).nu


def transport_A(rho: UnitTangent, sign: int, zeta) -> np.ndarray:
    """A_+-(x, xi) zeta = (0, zeta) + (zeta . x')(x +- xi)."""
    nu = _B(rho, sign)
    z = np.asarray(zeta, dtype=float)
    corr = z @ nu
    if abs(corr) > 1e-8:
        warnings.warn(f"zeta not tangent at B (component {corr:.3e}); projected",
                      TangencyWarning, stacklevel=2)
    z = z - corr * nu
    return np.concatenate(([0.0], z)) + (z @ rho.x[1:]) * (rho.x + sign * rho.xi)


def transport_matrix(rho: UnitTangent, sign: int) -> np.ndarray:
    """A_+- composed with the tangent projection at B_+-, shape (n+2, n+1)."""
    nu = _B(rho, sign)
    P = tangent_projector(nu)
    return np.vstack([np.zeros(nu.shape[0]), P]) + np.outer(rho.x + sign * rho.xi, rho.x[1:] @ P)


def transport_A_inv(rho: UnitTangent, sign: int, u) -> np.ndarray:
    """Inverse of A_+-: u -> u' - u0 B_+-."""
    u = np.asarray(u)
    return u[1:] - u[0] * _B(rho, sign)


def transport_matrix_inv(rho: UnitTangent, sign: int, basis: EFiberBasis) -> np.ndarray:
    """Rows A^{-1} e_k for the fiber basis vectors e_k, shape (n, n+1)."""
    V = basis.vectors
    return V[:, 1:] - np.outer(V[:, 0], _B(rho, sign))


def contract_axes(W: np.ndarray, T: np.ndarray) -> np.ndarray:
    """out[k1..km] = sum_j T[k1, j1] ... T[km, jm] W[j1..jm]."""
    for _ in range(W.ndim):
        W = np.tensordot(W, T, axes=([0], [1]))
    return W


@dataclass(frozen=True, eq=False)
class BoundaryTensorField:
    """Symmetric m-tensor field on the sphere, in ambient R^{n+1} components.

    ``value(nu)`` returns an array of shape (n+1,)*m tangent to the sphere at
    nu.  ``batch(nus)`` optionally returns all values at once, shape
    (M,) + (n+1,)*m.
    """

    n: int
    m: int
    value: Callable[[np.ndarray], np.ndarray]
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, nu) -> np.ndarray:
        return np.asarray(self.value(np.asarray(nu, dtype=float)))

    def values(self, nus: np.ndarray) -> np.ndarray:
        nus = np.asarray(nus, dtype=float)
        if self.batch is not None:
            return np.asarray(self.batch(nus))
        return np.array([self.value(v) for v in nus])

    def conj(self) -> "BoundaryTensorField":
        b = None if self.batch is None else (lambda nus: np.conj(self.batch(nus)))
        return BoundaryTensorField(self.n, self.m, lambda nu: np.conj(self.value(nu)), b)


def pullback_Q(w: Callable, sign: int, rho: UnitTangent,
               basis: Optional[EFiberBasis] = None) -> SymTensor:
    """(Q_+- w)(eta_1, ...) = w(B_+-)(A_+-^{-1} eta_1, ...) in a fiber basis."""
    basis = fiber_basis(rho) if basis is None else basis
    nu = _B(rho, sign)
    W = np.asarray(w(nu))
    T = transport_matrix_inv(rho, sign, basis)
    return SymTensor.from_full(contract_axes(W, T))


def tangent_projector(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    return np.eye(nu.shape[0]) - np.outer(nu, nu)


def sphere_tangent_basis(nu) -> np.ndarray:
    """Orthonormal basis of T_nu S^n as rows, shape (n, n+1)."""
    nu = np.asarray(nu, dtype=float)
    Q, _ = np.linalg.qr(np.column_stack([nu, np.eye(nu.shape[0])]))
    return Q[:, 1:nu.shape[0]].T


def boundary_differential(gamma: GroupElement, nu) -> np.ndarray:
    """dL_gamma at nu as an (n+1)x(n+1) matrix acting on ambient tangent vectors."""
    nu = np.asarray(nu, dtype=float)
    N, L = boundary_action(gamma, nu)
    G = gamma.matrix[:, 1:]
    dN = G[0]
    return (G[1:] - np.outer(L.nu, dN)) / N


def eta_twist_C(eta_coords) -> np.ndarray:
    """C_eta = I - 2/(1+|eta|^2) eta eta^T in orthonormal fiber coordinates."""
    c = np.asarray(eta_coords, dtype=float)
    return np.eye(c.shape[0]) - (2.0 / (1.0 + c @ c)) * np.outer(c, c)


def tensor_pullback(u: SymTensor, M: np.ndarray) -> SymTensor:
    """(M^* u)(v_1, ...) = u(M v_1, ...)."""
    if u.m == 0:
        return u
    return SymTensor.from_full(contract_axes(u.to_full(), np.asarray(M).T))


# ---------------------------------------------------------------------------
# The map Psi and its Jacobian
# ---------------------------------------------------------------------------

def psi_map(rho: UnitTangent, eta) -> tuple[np.ndarray, UnitTangent, UnitTangent]:
    """(y, eta_-, eta_+) = A(|eta|^2)(x, xi, eta)."""
    eta = np.asarray(eta, dtype=float)
    x, xi = rho.x, rho.xi
    if max(abs(minkowski_inner(eta, x)), abs(minkowski_inner(eta, xi))) > 1e-8 * max(1.0, np.max(np.abs(eta))):
        raise DomainError("eta is not in the fiber E(x, xi)")
    s = -minkowski_inner(eta, eta)
    r = np.sqrt(s + 1.0)
    y = r * x + eta
    em = (s / r) * x + xi / r + eta
    ep = -(s / r) * x + xi / r - eta
    return y, UnitTangent(y, em), UnitTangent(y, ep)


def psi_inv(y, eta_m, eta_p) -> tuple[UnitTangent, np.ndarray]:
    """Inverse of ``psi_map``; rejects |eta_+ + eta_-| < 1e-8."""
    y = np.asarray(y, dtype=float)
    em = eta_m.xi if isinstance(eta_m, UnitTangent) else np.asarray(eta_m, dtype=float)
    ep = eta_p.xi if isinstance(eta_p, UnitTangent) else np.asarray(eta_p, dtype=float)
    a = _spacelike_norm(ep + em)
    if a < 1e-8:
        raise DomainError("eta_+ + eta_- vanishes: outside the image of Psi")
    d2 = -minkowski_inner(ep - em, ep - em)
    x = (2.0 * y + ep - em) / a
    xi = (ep + em) / a
    eta = (2.0 * (em - ep) - d2 * y) / (a * a)
    return UnitTangent(x, xi), eta


def jacobian_psi_closed_form(n: int, s: float) -> float:
    """2^n (1 + |eta|^2)^{-n}."""
    return 2.0 ** n * (1.0 + s) ** (-n)


def _psi_coords(G: np.ndarray, c: np.ndarray):
    n = G.shape[0] - 2
    x, xi = G[:, 0], G[:, 1]
    eta = G[:, 2:] @ c
    s = c @ c
    r = np.sqrt(s + 1.0)
    y = r * x + eta
    em = (s / r) * x + xi / r + eta
    ep = -(s / r) * x + xi / r - eta
    return np.concatenate([y, em, ep]), n


def jacobian_psi(rho: UnitTangent, eta, h: float = 1e-5) -> float:
    """Numerical |det dPsi| in orthonormal frames of source and target.

    Source frame: the left-invariant fields X, A_k, R_{1k} (k = 2..n+1) of a
    frame gamma over (x, xi), plus translations of the fiber coordinates.
    Target frame: orthonormal bases of T_y H and of the tangent spaces of the
    two unit spheres, with covariant (normal-removed) vertical parts.
    """
    from .lorentz_core import basis_element, exp_basis

    n = rho.n
    gamma = frame_at(rho)
    basis = fiber_basis(rho, gamma)
    c0 = basis.coords(eta)
    G0 = gamma.matrix
    gens = [basis_element(n, "X")]
    gens += [basis_element(n, "A", k) for k in range(2, n + 2)]
    gens += [basis_element(n, "R", 1, k) for k in range(2, n + 2)]
    cols = []
    for a in gens:
        fp, _ = _psi_coords(G0 @ exp_basis(a, h).matrix, c0)
        fm, _ = _psi_coords(G0 @ exp_basis(a, -h).matrix, c0)
        cols.append((fp - fm) / (2 * h))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        fp, _ = _psi_coords(G0, c0 + e)
        fm, _ = _psi_coords(G0, c0 - e)
        cols.append((fp - fm) / (2 * h))
    y, tm, tp = psi_map(rho, eta)
    Ty = boost_to(y).matrix[:, 1:].T
    Fm = frame_at(tm).matrix[:, 2:].T
    Fp = frame_at(tp).matrix[:, 2:].T
    d = n + 2
    rows = []
    for v in cols:
        vy, vm, vp = v[:d], v[d:2 * d], v[2 * d:]
        Dm = vm - minkowski_inner(vm, y) * y
        Dp = vp - minkowski_inner(vp, y) * y
        rows.append(np.concatenate([-minkowski_inner(Ty, vy), -minkowski_inner(Fm, Dm),
                                    -minkowski_inner(Fp, Dp)]))
    return float(abs(np.linalg.det(np.array(rows))))


def twist_identity_sides(rho: UnitTangent, eta, S_plus: np.ndarray, S_minus: np.ndarray):
    """Both sides of the transport twist identity for ambient tangent tensors.

    ``S_plus`` (resp. ``S_minus``) is an m-tensor of vectors tangent to the
    sphere at B_+(x, xi) (resp. B_-).  Returns (lhs, rhs) where lhs pairs the
    transports at (y, eta_+-) and rhs pairs C_eta applied to the transports
    at (x, xi).
    """
    n = rho.n
    m = S_plus.ndim
    y, tm, tp = psi_map(rho, eta)

    def push(r, sign, S):
        return contract_axes(S, transport_matrix(r, sign))

    metric = -np.diag(np.concatenate(([1.0], -np.ones(n + 1))))

    def pair(U, V):
        Mv = contract_axes(V, metric)
        return float(np.sum(U * Mv))

    lhs = pair(push(tp, 1, S_plus), push(tm, -1, S_minus))
    s = -minkowski_inner(eta, eta)
    eta = np.asarray(eta, dtype=float)
    C = np.eye(n + 2) - (2.0 / (1.0 + s)) * np.outer(eta, eta @ metric)
    Pp = contract_axes(push(rho, 1, S_plus), C)
    rhs = pair(Pp, push(rho, -1, S_minus))
    return lhs, rhs


def equivariance_test_field(gamma: GroupElement, nu, W: np.ndarray, s: complex) -> Callable:
    """A tensor field defined at nu and L_gamma(nu) only, with
    w(L nu)(dL zeta, ...) = N(nu)^{-s-m} w(nu)(zeta, ...)."""
    nu = np.asarray(nu, dtype=float)
    N, L = boundary_action(gamma, nu)
    dL = boundary_differential(gamma, nu)
    m = W.ndim
    # a left inverse of dL on T_{L nu}: dL maps T_nu onto T_{L nu} conformally
    Pnu = tangent_projector(nu)
    dLinv = np.linalg.pinv(dL @ Pnu) @ tangent_projector(L.nu)
    W2 = N ** (-s - m) * contract_axes(W, dLinv.T)
    table = ((nu, W), (L.nu, W2))

    def w(point):
        for p, val in table:
            if np.allclose(point, p, atol=1e-12, rtol=0):
                return val
        raise KeyError("test field evaluated away from its two points")

    return w


def _tangent_trace_free(W: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Trace-free part of a tangent tensor for the metric of T_nu S^n."""
    m = W.ndim
    if m < 2:
        return W
    E = sphere_tangent_basis(nu)
    n = E.shape[0]
    local = contract_axes(W, E)
    from .sym_tensor import decompose_trace_free, multi_indices

    u = SymTensor(n, m, {K: local[K] for K in multi_indices(n, m)})
    u0 = decompose_trace_free(u)[0].to_full()
    return contract_axes(np.asarray(u0, dtype=W.dtype), E.T)


def polynomial_boundary_field(n: int, m: int, seed: int = 0, trace_free: bool = True,
                              complex_: bool = False, degree: int = 1) -> BoundaryTensorField:
    """A smooth test field: a random tensor polynomial in nu, projected to the
    tangent space (and to its trace-free part when requested)."""
    rng = np.random.default_rng(seed)
    shape = (n + 1,) * m
    coefs = [rng.standard_normal(shape + (n + 1,) * d) for d in range(degree + 1)]
    if complex_:
        coefs = [c + 1j * rng.standard_normal(c.shape) for c in coefs]

    def value(nu):
        nu = np.asarray(nu, dtype=float)
        W = np.zeros(shape, dtype=complex if complex_ else float)
        for d, c in enumerate(coefs):
            t = c
            for _ in range(d):
                t = t @ nu
            W = W + t
        if m:
            W = _symmetrize_full(W)
            W = contract_axes(W, tangent_projector(nu))
            if trace_free:
                W = _tangent_trace_free(W, nu)
        return W

    def batch(nus):
        nus = np.asarray(nus, dtype=float)
        W = 0
        for d, c in enumerate(coefs):
            t = np.broadcast_to(c, (nus.shape[0],) + c.shape)
            for _ in range(d):
                t = np.einsum("j...k,jk->j...", t, nus)
            W = W + t
        if m == 1:
            W = W - np.einsum("jk,jk->j", W, nus)[:, None] * nus
        elif m == 2:
            W = 0.5 * (W + np.swapaxes(W, 1, 2))
            P = np.eye(n + 1)[None] - nus[:, :, None] * nus[:, None, :]
            W = np.einsum("jab,jbc,jcd->jad", P, W, P)
            if trace_free:
                W = W - (np.einsum("jaa->j", W) / n)[:, None, None] * P
        return W

    return BoundaryTensorField(n, m, value, batch if m <= 2 else None)


def _symmetrize_full(W: np.ndarray) -> np.ndarray:
    from itertools import permutations
    from math import factorial

    perms = list(permutations(range(W.ndim)))
    return sum(np.transpose(W, p) for p in perms) / factorial(W.ndim)
