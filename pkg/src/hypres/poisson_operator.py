"""Poisson operators, their value on boundary delta data, half-space
component formulas for the Laplacian and divergence, indicial roots.

Output tensors of ``poisson_apply`` live on T_x H^{n+1} and are written in the
orthonormal frame given by columns 1..n+1 of ``boost_to(x)``.  Half-space
tensors use the 0-frame Z_0 = z0 d/dz0, Z_i = z0 d/dz_i; E_0 coefficients are
indexed by Z_1..Z_n (index 0..n-1 in ``SymTensor`` keys).
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
import sympy as sp
from scipy.special import gamma as _gamma, rgamma as _rgamma

from . import kernels
from .frame_transport import BoundaryTensorField, contract_axes, tangent_projector, _symmetrize_full
from .lorentz_core import DomainError, GroupElement, boost_to, boundary_action, minkowski_inner
from .frame_transport import boundary_differential
from .quadrature import QuadSpec, QuadratureWarning, integrate_adaptive, sphere_rule, sphere_volume
from .sym_tensor import SymTensor, insert_I, multi_indices, trace

__all__ = [
    "PoleError",
    "PoissonResult",
    "DeltaImage",
    "IndicialRoot",
    "HalfspaceSection",
    "HalfspaceProjections",
    "tangent_frame",
    "poisson_apply",
    "equivariant_pullback",
    "delta_value",
    "mollified_delta_field",
    "poisson_delta",
    "halfspace_symbols",
    "halfspace_to_hyperboloid",
    "halfspace_frame",
    "halfspace_coords_of",
    "scalar_laplacian",
    "halfspace_delta_div",
    "section_from_poisson",
    "indicial_roots",
    "indicial_roots_exact",
    "boundary_leading_constant",
    "boundary_constant_audit",
    "sphere_volume",
]


class PoleError(ArithmeticError):
    """A Gamma-function pole was hit; ``factor`` names the offending term."""

    def __init__(self, factor: str, value: complex):
        super().__init__(f"pole of {factor} at lambda = {value}")
        self.factor = factor
        self.value = value


# ---------------------------------------------------------------------------
# Quadrature Poisson operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonResult:
    tensor: SymTensor
    error: float
    order: int
    converged: bool


def tangent_frame(x) -> np.ndarray:
    """Orthonormal frame of T_x as columns, shape (n+2, n+1)."""
    return boost_to(x).matrix[:, 1:]


def _check_field(w: BoundaryTensorField, m: int, x: np.ndarray):
    if w.m != m:
        raise DomainError(f"field has order {w.m}, expected {m}")
    if x.shape[0] != w.n + 2:
        raise DomainError("point and field dimensions differ")
    if x[0] <= 0 or abs(minkowski_inner(x, x) - 1.0) > 1e-8 * max(1.0, x[0] ** 2):
        raise DomainError("x is not on the hyperboloid")


def poisson_apply(lam: complex, m: int, w: BoundaryTensorField, x, quad: QuadSpec = QuadSpec(),
                  sign: int = -1) -> PoissonResult:
    """P^{sign}_lam w at x by Gauss-Legendre quadrature on S^n.

    sign=-1 integrates P(x,nu)^{n+lam} against w transported by A_-^{-1};
    sign=+1 uses P^{n+conj(lam)} and A_+^{-1}.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    x = np.asarray(x, dtype=float)
    _check_field(w, m, x)
    n = w.n
    expo = n + (complex(lam) if sign < 0 else complex(lam).conjugate())
    F = tangent_frame(x)
    r = float(np.linalg.norm(x[1:]))
    spread = ((x[0] + r) / (x[0] - r)) ** abs(expo.real) if r > 0 else 1.0
    if spread > 1e12:
        warnings.warn(f"integrand spans {spread:.1e} in magnitude; quadrature may be unreliable",
                      QuadratureWarning, stacklevel=2)
    axis = x[1:] / r if r > 1e-8 else None

    def integrand(nodes, weights):
        P, T = kernels.poisson_transport(x, F, nodes, sign)
        W = np.asarray(w.values(nodes), dtype=complex)
        kw = weights * np.exp(expo * np.log(P))
        return kernels.poisson_accumulate(kw, T, W)

    res = integrate_adaptive(integrand, n, quad, axis=axis)
    if not res.converged:
        warnings.warn(f"quadrature did not converge at order {res.order}; error estimate {res.error:.2e}",
                      QuadratureWarning, stacklevel=2)
    val = np.asarray(res.value)
    tensor = SymTensor.from_full(val) if m else SymTensor.scalar(n + 1, complex(val))
    return PoissonResult(tensor, res.error, res.order, res.converged)


def equivariant_pullback(w: BoundaryTensorField, gamma: GroupElement, lam: complex) -> BoundaryTensorField:
    """nu -> N_gamma(nu)^{lam+m} dL^T w(L_gamma nu), so that
    P_lam(pullback)(x)(v, ...) = P_lam(w)(gamma x)(gamma v, ...)."""
    m = w.m

    def value(nu):
        N, L = boundary_action(gamma, nu)
        dL = boundary_differential(gamma, nu) @ tangent_projector(nu)
        W = np.asarray(w(L.nu), dtype=complex)
        return N ** (lam + m) * (contract_axes(W, dL.T) if m else W)

    return BoundaryTensorField(w.n, m, value)


# ---------------------------------------------------------------------------
# Delta data and the half-space chart
# ---------------------------------------------------------------------------

def halfspace_to_hyperboloid(z) -> np.ndarray:
    """Hyperboloid point of the half-space point z = (z0, z_1..z_n).

    Rational in z, so it accepts complex input (used for complex-step
    derivatives).  The boundary point e_1 sits at infinity.
    """
    z = np.asarray(z)
    z0, zz = z[0], z[1:]
    E = (1.0 + z0) ** 2 + zz @ zz
    y = np.concatenate(([z0 * z0 + zz @ zz - 1.0], 2.0 * zz)) / E
    s = y @ y
    return np.concatenate(([1.0 + s], 2.0 * y)) / (1.0 - s)


def halfspace_frame(z, h: float = 1e-20) -> np.ndarray:
    """Ambient vectors of Z_0..Z_n at z as rows, shape (n+1, n+2)."""
    z = np.asarray(z, dtype=float)
    rows = []
    for i in range(z.shape[0]):
        dz = np.zeros(z.shape[0], dtype=complex)
        dz[i] = 1j * h
        rows.append(z[0] * halfspace_to_hyperboloid(z + dz).imag / h)
    return np.array(rows)


def halfspace_coords_of(z) -> tuple[np.ndarray, np.ndarray]:
    """(x, C): the hyperboloid point and the coordinates of Z_0..Z_n in the
    frame of ``tangent_frame(x)``, C[i, a] = -<Z_i, t_a>."""
    x = halfspace_to_hyperboloid(np.asarray(z, dtype=float)).real
    F = tangent_frame(x)
    V = halfspace_frame(z)
    C = -(np.outer(V[:, 0], F[0]) - V[:, 1:] @ F[1:])
    return x, C


def delta_value(n: int, J: tuple) -> np.ndarray:
    """e*_{j_1+1} (x) ... (x) e*_{j_m+1} as an ambient tensor at e_1."""
    if any(not 1 <= j <= n for j in J):
        raise DomainError(f"indices must lie in 1..{n}")
    out = np.ones(())
    for j in J:
        e = np.zeros(n + 1)
        e[j] = 1.0
        out = np.multiply.outer(out, e)
    return out


@dataclass(frozen=True)
class DeltaImage:
    """z0^{n+lam} Z*_{j_1} (x) ... in the 0-coframe (index 0 = Z_0*)."""

    n: int
    lam: complex
    J: tuple
    z: tuple
    full: np.ndarray

    def symmetric(self) -> SymTensor:
        from .sym_tensor import symmetrize

        if not self.J:
            return SymTensor.scalar(self.n + 1, complex(self.full))
        return symmetrize(self.full)

    def evaluate(self, *vectors) -> complex:
        t = self.full
        for v in vectors:
            t = np.tensordot(np.asarray(v), t, axes=(0, 0))
        return complex(t)


def poisson_delta(lam: complex, m: int, J: tuple, z) -> DeltaImage:
    """Poisson image of the delta at e_1 with value e*_{j_1+1} (x) ...,
    evaluated at the half-space point z."""
    z = tuple(float(v) for v in z)
    n = len(z) - 1
    J = tuple(int(j) for j in J)
    if len(J) != m:
        raise DomainError("index tuple length must equal m")
    if any(not 1 <= j <= n for j in J):
        raise DomainError(f"indices must lie in 1..{n}")
    if z[0] <= 0:
        raise DomainError("half-space point must have z0 > 0")
    amp = complex(z[0]) ** (n + complex(lam))
    full = np.full((), amp, dtype=complex)
    for j in J:
        e = np.zeros(n + 1)
        e[j] = 1.0
        full = np.multiply.outer(full, e)
    return DeltaImage(n, complex(lam), J, z, full)


def mollified_delta_field(n: int, J: tuple, width: float, sym: bool = True) -> BoundaryTensorField:
    """A Gaussian bump of geodesic width ``width`` at e_1 with unit integral,
    times the tangent projection of the delta value."""
    base = delta_value(n, J)
    if sym and base.ndim > 1:
        base = _symmetrize_full(base)
    e1 = np.zeros(n + 1)
    e1[0] = 1.0
    pts, wts = sphere_rule(n, max(64, int(8 / width)), axis=e1)
    th = np.arccos(np.clip(pts[:, 0], -1, 1))
    Z = np.sum(wts * np.exp(-0.5 * (th / width) ** 2))

    def bump(nus):
        t = np.arccos(np.clip(nus[:, 0], -1, 1))
        return np.exp(-0.5 * (t / width) ** 2) / Z

    def batch(nus):
        nus = np.asarray(nus, dtype=float)
        b = bump(nus)
        if base.ndim == 0:
            return b
        out = np.empty((nus.shape[0],) + base.shape)
        for k, nu in enumerate(nus):
            out[k] = contract_axes(base, tangent_projector(nu))
        return b.reshape((-1,) + (1,) * base.ndim) * out

    return BoundaryTensorField(n, len(J), lambda nu: batch(np.asarray(nu)[None])[0], batch)


# ---------------------------------------------------------------------------
# Half-space component formulas
# ---------------------------------------------------------------------------

def halfspace_symbols(n: int) -> tuple:
    """Symbols (z0, z1, ..., zn) with z0 positive."""
    return (sp.Symbol("z0", positive=True),) + tuple(sp.Symbol(f"z{i}", real=True) for i in range(1, n + 1))


def scalar_laplacian(expr, n: int):
    """-z0^2 (d_0^2 + sum d_i^2) + (n-1) z0 d_0, acting on a sympy expression."""
    z = halfspace_symbols(n)
    second = sum(sp.diff(expr, v, 2) for v in z)
    return sp.expand(-z[0] ** 2 * second + (n - 1) * z[0] * sp.diff(expr, z[0]))


class _SymbolicOps:
    exact = True

    def __init__(self, n: int):
        self.n = n
        self.z = halfspace_symbols(n)

    def lap(self, e):
        return scalar_laplacian(e, self.n)

    def Z(self, i: int, e):
        return sp.expand(self.z[0] * sp.diff(e, self.z[i]))

    def q(self, a, b=1):
        return sp.Rational(a, b)

    def clean(self, e):
        return sp.simplify(sp.powsimp(sp.expand(e), force=True))


class _NumericOps:
    """Richardson-extrapolated central differences at a fixed point."""

    exact = False

    def __init__(self, n: int, point, h: float):
        self.n = n
        self.p = np.asarray(point, dtype=float)
        if self.p[0] <= 0:
            raise DomainError("half-space point must have z0 > 0")
        self.h = h * self.p[0]

    def _at(self, f, i, t):
        q = self.p.copy()
        q[i] += t
        return f(q)

    def _d1(self, f, i, h):
        return (self._at(f, i, h) - self._at(f, i, -h)) / (2 * h)

    def _d2(self, f, i, h):
        return (self._at(f, i, h) - 2 * f(self.p) + self._at(f, i, -h)) / (h * h)

    def d1(self, f, i):
        h = self.h
        return (4 * self._d1(f, i, h / 2) - self._d1(f, i, h)) / 3

    def d2(self, f, i):
        h = self.h
        return (4 * self._d2(f, i, h / 2) - self._d2(f, i, h)) / 3

    def lap(self, f):
        if not callable(f):
            return 0.0
        z0 = self.p[0]
        second = sum(self.d2(f, i) for i in range(self.n + 1))
        return -z0 * z0 * second + (self.n - 1) * z0 * self.d1(f, 0)

    def Z(self, i: int, f):
        if not callable(f):
            return 0.0
        return self.p[0] * self.d1(f, i)

    def q(self, a, b=1):
        return a / b

    def clean(self, e):
        return e

    def value(self, f):
        return f(self.p) if callable(f) else f


@dataclass(frozen=True, eq=False)
class HalfspaceSection:
    """u = sum f_I S(Z_I*) + sum g_J S(Z_0* (x) Z_J*) plus its trace-free completion.

    ``f`` (order m) and ``g`` (order m-1, None when m = 0) are ``SymTensor``
    objects over the n directions Z_1..Z_n whose coefficients are sympy
    expressions in ``halfspace_symbols(n)`` or callables of a point z.
    """

    n: int
    m: int
    f: SymTensor
    g: Optional[SymTensor] = None

    def __post_init__(self):
        if self.f.N != self.n or self.f.m != self.m:
            raise DomainError("f must have order m over n directions")
        if self.m == 0:
            if self.g is not None and any(v != 0 for v in self.g.coeffs.values()):
                raise DomainError("scalar sections have no E_1 part")
            object.__setattr__(self, "g", None)
        elif self.g is None:
            object.__setattr__(self, "g", SymTensor.zeros(self.n, self.m - 1))
        elif self.g.N != self.n or self.g.m != self.m - 1:
            raise DomainError("g must have order m-1 over n directions")

    def is_symbolic(self) -> bool:
        vals = list(self.f.coeffs.values()) + (list(self.g.coeffs.values()) if self.g is not None else [])
        return not any(callable(v) for v in vals)


@dataclass(frozen=True)
class HalfspaceProjections:
    """pi_0 Delta u, pi_1 Delta u, pi_0 div u, pi_1 div u as coefficient tensors.

    Entries that do not exist for the given m are None.
    """

    lap0: SymTensor
    lap1: Optional[SymTensor]
    div0: Optional[SymTensor]
    div1: Optional[SymTensor]

    def parts(self) -> list:
        return [p for p in (self.lap0, self.lap1, self.div0, self.div1) if p is not None]


def _sym_grad(D: list, ops) -> SymTensor:
    """S(sum_i Z_i* (x) D_i) for D_i = Z_i T of order k; result has order k+1."""
    N, k = D[0].N, D[0].m
    out = {}
    for K in multi_indices(N, k + 1):
        acc = 0
        for p in range(k + 1):
            acc = acc + D[K[p]][K[:p] + K[p + 1:]]
        out[K] = acc * ops.q(1, k + 1)
    return SymTensor(N, k + 1, out)


def _div(D: list) -> SymTensor:
    """C_K = sum_i D_i[(i,) + K]; result has order k-1."""
    N, k = D[0].N, D[0].m
    out = {}
    for K in multi_indices(N, k - 1):
        acc = 0
        for i in range(N):
            acc = acc + D[i][(i,) + K]
        out[K] = acc
    return SymTensor(N, k - 1, out)


def halfspace_delta_div(u: HalfspaceSection, point=None, h: float = 1e-2) -> HalfspaceProjections:
    """Component formulas for Delta u and div u on the E_0 / E_1 parts.

    Symbolic sections are processed exactly with sympy; sections with
    callable coefficients are evaluated at ``point`` by central differences.
    """
    n, m = u.n, u.m
    if u.is_symbolic():
        ops = _SymbolicOps(n)
        val = lambda e: e  # noqa: E731
    else:
        if point is None:
            raise DomainError("numeric sections need an evaluation point")
        ops = _NumericOps(n, point, h)
        val = ops.value
    f, g = u.f, u.g
    Lf = f.map(ops.lap)
    F0 = f.map(val)
    Zf = [f.map(lambda e, i=i: ops.Z(i, e)) for i in range(n + 1)]
    lap0 = Lf + F0 * m
    lap1 = div0 = div1 = None
    if m >= 2:
        lap0 = lap0 + insert_I(trace(F0)) * 2
    if m >= 1:
        G0 = g.map(val)
        Zg = [g.map(lambda e, i=i: ops.Z(i, e)) for i in range(n + 1)]
        Lg = g.map(ops.lap)
        lap0 = lap0 + _sym_grad(Zg[1:], ops) * 2
        C = _div(Zf[1:])
        lap1 = Lg + G0 * (n + 3 * (m - 1)) - C * (2 * m)
        if m >= 3:
            lap1 = lap1 + insert_I(trace(G0)) * 2
        if m >= 2:
            lap1 = lap1 - _sym_grad([trace(t) for t in Zf[1:]], ops) * (2 * m * (m - 1))
        div0 = -C + (G0 * (n + m - 1) - Zg[0]) * ops.q(1, m)
        if m >= 2:
            div1 = (trace(Zf[0]) - trace(F0) * (m + n - 1)) * (m - 1) - _div(Zg[1:]) * ops.q(m - 1, m)
    clean = lambda t: None if t is None else t.map(ops.clean)  # noqa: E731
    return HalfspaceProjections(clean(lap0), clean(lap1), clean(div0), clean(div1))


def section_from_poisson(lam: complex, w: BoundaryTensorField, quad: QuadSpec = QuadSpec(),
                         sign: int = -1) -> HalfspaceSection:
    """Half-space section whose coefficients are quadrature values of P_lam w.

    Only m <= 1 is supported: f_i = u(Z_i), g = u(Z_0).
    """
    n, m = w.n, w.m
    if m > 1:
        raise DomainError("section_from_poisson supports m <= 1")
    cache: dict = {}

    def comps(z):
        key = tuple(np.round(np.asarray(z, dtype=float), 15))
        if key not in cache:
            x, C = halfspace_coords_of(key)
            t = poisson_apply(lam, m, w, x, quad, sign).tensor
            if m == 0:
                cache[key] = np.array([t[()]])
            else:
                cache[key] = C @ t.to_full()
        return cache[key]

    if m == 0:
        return HalfspaceSection(n, 0, SymTensor.scalar(n, lambda z: comps(z)[0]))
    f = SymTensor(n, 1, {(i,): (lambda z, i=i: comps(z)[i + 1]) for i in range(n)})
    g = SymTensor(n, 0, {(): lambda z: comps(z)[0]})
    return HalfspaceSection(n, 1, f, g)


# ---------------------------------------------------------------------------
# Indicial roots and the boundary constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndicialRoot:
    lam: complex
    family: int
    k: int
    branch: int  # +1 or -1: the sign in front of the square root


def _indicial_shift(n: int, m: int, family: int, k: int) -> int:
    if family == 0:
        return m + 2 * k * (2 * m + n - 2 * k - 2)
    return n + 3 * (m - 1) + 2 * k * (n + 2 * m - 2 * k - 4)


def _indicial_labels(m: int):
    for k in range(m // 2 + 1):
        yield 0, k
    if m >= 1:
        for k in range((m - 1) // 2 + 1):
            yield 1, k


def indicial_roots(n: int, m: int, sigma: float) -> list[IndicialRoot]:
    """Solutions of -lam^2 + n lam + c = sigma for each family and k."""
    out = []
    for fam, k in _indicial_labels(m):
        c = _indicial_shift(n, m, fam, k)
        d = cmath.sqrt(n * n / 4.0 + c - sigma)
        for b in (1, -1):
            out.append(IndicialRoot(complex(n / 2.0 + b * d), fam, k, b))
    return out


def indicial_roots_exact(n: int, m: int, sigma) -> list[tuple]:
    """(lam, family, k, branch) with lam a sympy expression."""
    s = sp.nsimplify(sigma) if not isinstance(sigma, sp.Basic) else sigma
    out = []
    for fam, k in _indicial_labels(m):
        c = _indicial_shift(n, m, fam, k)
        d = sp.sqrt(sp.Rational(n * n, 4) + c - s)
        for b in (1, -1):
            out.append((sp.Rational(n, 2) + b * d, fam, k, b))
    return out


def _near_nonpositive_int(v: complex, tol: float = 1e-12) -> bool:
    r = round(v.real)
    return r <= 0 and abs(v - r) < tol


def boundary_leading_constant(n: int, m: int, lam: complex) -> complex:
    """Gamma(lam+n/2) / ((lam+n+m-1) Gamma(lam+n-1)).

    Evaluated as Gamma(lam+n/2) prod_{j=n-1}^{n+m-2} (lam+j) / Gamma(lam+n+m),
    which is the same meromorphic function with its removable singularities
    filled in.  Poles of Gamma(lam+n/2) raise ``PoleError``.
    """
    lam = complex(lam)
    a = lam + n / 2.0
    if _near_nonpositive_int(a):
        raise PoleError("Gamma(lambda+n/2)", lam)
    poly = 1.0 + 0j
    for j in range(n - 1, n + m - 1):
        poly *= lam + j
    return complex(_gamma(a) * poly * _rgamma(lam + n + m))


def boundary_constant_audit(n: int, m: int, lam: complex) -> dict:
    """Which factors of the Gamma quotient vanish or blow up at lam."""
    lam = complex(lam)
    zeros, poles = [], []
    if _near_nonpositive_int(lam + n / 2.0):
        poles.append("Gamma(lambda+n/2)")
    for j in range(n - 1, n + m - 1):
        if abs(lam + j) < 1e-12:
            zeros.append(f"(lambda+{j})")
    if _near_nonpositive_int(lam + n + m):
        zeros.append("1/Gamma(lambda+n+m)")
    return {"zeros": zeros, "poles": poles,
            "vanishes": bool(zeros) and not poles}
