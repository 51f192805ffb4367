"""Symmetric cotensors over an N-dimensional Euclidean space.

A ``SymTensor`` of order m stores one coefficient per sorted multi-index
K = (k1 <= ... <= km) with entries in range(N).  Coefficients may be
``fractions.Fraction`` (exact), float/complex, or any ring element that
supports + and * (sympy expressions are used by the half-space formulas).

Conventions:
  trace     (T u)_{K'}      = sum_i u_{i i K'}
  insert    (I u)_K         = sum_{l < r} delta_{k_l k_r} u_{K without l, r}
  bridge    P_u(x)          = u(x, ..., x)
  Laplacian Delta_E         = -sum_i d^2/dx_i^2
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

__all__ = [
    "SymTensor",
    "HomogPoly",
    "IdentityViolation",
    "multi_indices",
    "multiplicity",
    "symmetrize",
    "trace",
    "insert_I",
    "decompose_trace_free",
    "reconstruct",
    "poly_bridge",
    "tensor_from_poly",
    "flat_laplacian",
    "laplacian_power_contract",
    "laplacian_power_closed_form",
    "harmonic_projections",
]


class IdentityViolation(ArithmeticError):
    """An identity that must hold exactly was violated."""


@lru_cache(maxsize=None)
def multi_indices(N: int, m: int) -> tuple[tuple[int, ...], ...]:
    """Sorted multi-indices of order m over range(N)."""
    return tuple(itertools.combinations_with_replacement(range(N), m))


@lru_cache(maxsize=None)
def multiplicity(K: tuple[int, ...]) -> int:
    """Number of full index tuples equal to K up to permutation."""
    out = math.factorial(len(K))
    for c in Counter(K).values():
        out //= math.factorial(c)
    return out


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Dense symmetric m-cotensor stored on sorted multi-indices."""

    N: int
    m: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 1 or self.m < 0:
            raise ValueError("need N >= 1 and m >= 0")
        full = {K: self.coeffs.get(K, 0) for K in multi_indices(self.N, self.m)}
        extra = set(self.coeffs) - set(full)
        if extra:
            raise ValueError(f"coefficients on non-sorted or out-of-range indices: {sorted(extra)[:3]}")
        object.__setattr__(self, "coeffs", full)

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, N: int, m: int) -> "SymTensor":
        return cls(N, m, {})

    @classmethod
    def scalar(cls, N: int, value) -> "SymTensor":
        return cls(N, 0, {(): value})

    @classmethod
    def from_function(cls, N: int, m: int, f: Callable[[tuple], object]) -> "SymTensor":
        return cls(N, m, {K: f(K) for K in multi_indices(N, m)})

    @classmethod
    def random_rational(cls, rng: np.random.Generator, N: int, m: int, span: int = 9) -> "SymTensor":
        return cls.from_function(
            N, m, lambda K: Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1))))

    @classmethod
    def random_float(cls, rng: np.random.Generator, N: int, m: int, complex_: bool = False) -> "SymTensor":
        if complex_:
            return cls.from_function(N, m, lambda K: complex(rng.standard_normal(), rng.standard_normal()))
        return cls.from_function(N, m, lambda K: float(rng.standard_normal()))

    @classmethod
    def from_full(cls, t) -> "SymTensor":
        """Read the sorted-index entries of a full tensor assumed symmetric."""
        t = np.asarray(t, dtype=object if _object_array(t) else None)
        m = t.ndim
        N = t.shape[0] if m else 1
        return cls(N, m, {K: _unwrap(t[K]) for K in multi_indices(N, m)})

    # access ---------------------------------------------------------------
    def __getitem__(self, K) -> object:
        return self.coeffs[tuple(sorted(K))]

    def to_full(self) -> np.ndarray:
        dtype = object if not self.is_numeric() else np.result_type(*[np.asarray(v) for v in self.coeffs.values()])
        out = np.empty((self.N,) * self.m, dtype=dtype)
        for K, v in self.coeffs.items():
            for P in set(itertools.permutations(K)):
                out[P] = v
        return out

    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in self.coeffs.values())

    def is_numeric(self) -> bool:
        return all(isinstance(v, (int, float, complex, np.number)) and not isinstance(v, bool)
                   for v in self.coeffs.values())

    def map(self, f: Callable) -> "SymTensor":
        return SymTensor(self.N, self.m, {K: f(v) for K, v in self.coeffs.items()})

    def astype(self, kind: type) -> "SymTensor":
        return self.map(kind)

    def evaluate(self, vectors: Iterable) -> object:
        """u(v1, ..., vm) for vectors given in the same basis."""
        vs = [np.asarray(v) for v in vectors]
        if len(vs) != self.m:
            raise ValueError("need exactly m vectors")
        t = self.to_full()
        for v in vs:
            t = np.tensordot(v, t, axes=(0, 0)) if t.ndim else t
        return t[()] if isinstance(t, np.ndarray) else t

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.coeffs.values()), default=0.0)

    # algebra --------------------------------------------------------------
    def _check(self, other: "SymTensor"):
        if (self.N, self.m) != (other.N, other.m):
            raise ValueError("shape mismatch")

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.N, self.m, {K: self.coeffs[K] + other.coeffs[K] for K in self.coeffs})

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.N, self.m, {K: self.coeffs[K] - other.coeffs[K] for K in self.coeffs})

    def __neg__(self) -> "SymTensor":
        return self.map(lambda v: -v)

    def __mul__(self, c) -> "SymTensor":
        return self.map(lambda v: v * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymTensor):
            return NotImplemented
        return (self.N, self.m) == (other.N, other.m) and all(
            self.coeffs[K] == other.coeffs[K] for K in self.coeffs)

    def inner(self, other: "SymTensor"):
        """Full-tensor inner product sum_K u_K conj(v_K)."""
        self._check(other)
        return sum(multiplicity(K) * self.coeffs[K] * _conj(other.coeffs[K]) for K in self.coeffs)

    def norm(self) -> float:
        return math.sqrt(abs(complex(self.inner(self))))

    def trace(self) -> "SymTensor":
        return trace(self)

    def insert_I(self) -> "SymTensor":
        return insert_I(self)

    def is_trace_free(self, tol: float = 1e-12) -> bool:
        T = trace(self)
        if self.is_exact():
            return all(v == 0 for v in T.coeffs.values())
        return T.max_abs() < tol

    def __repr__(self):
        return f"SymTensor(N={self.N}, m={self.m})"


def _conj(v):
    return v.conjugate() if isinstance(v, (complex, np.complexfloating)) else v


def _object_array(t) -> bool:
    a = np.asarray(t)
    return a.dtype == object


def _unwrap(v):
    return v.item() if isinstance(v, np.generic) else v


def symmetrize(t) -> SymTensor:
    """Orthogonal projection of a full m-tensor onto symmetric tensors."""
    t = np.asarray(t, dtype=object if _object_array(t) else None)
    m = t.ndim
    N = t.shape[0] if m else 1
    if m == 0:
        return SymTensor(N, 0, {(): _unwrap(t[()])})
    if any(s != N for s in t.shape):
        raise ValueError("all tensor axes must have the same length")
    exact = t.dtype == object and all(_is_exact(v) for v in t.flat)
    coeffs = {}
    for K in multi_indices(N, m):
        perms = set(itertools.permutations(K))
        total = sum(_unwrap(t[P]) for P in perms)
        coeffs[K] = Fraction(total, len(perms)) if exact else total / len(perms)
    return SymTensor(N, m, coeffs)


def trace(u: SymTensor) -> SymTensor:
    """Contract the first two indices; zero tensor for m < 2."""
    if u.m < 2:
        return SymTensor.zeros(u.N, max(u.m - 2, 0))
    out = {}
    for K in multi_indices(u.N, u.m - 2):
        out[K] = sum(u.coeffs[tuple(sorted(K + (i, i)))] for i in range(u.N))
    return SymTensor(u.N, u.m - 2, out)


def insert_I(u: SymTensor) -> SymTensor:
    """I(u) = ((m+2)(m+1)/2) S(g (x) u)."""
    out = {}
    for K in multi_indices(u.N, u.m + 2):
        acc = 0
        for l, r in itertools.combinations(range(u.m + 2), 2):
            if K[l] == K[r]:
                acc = acc + u.coeffs[K[:l] + K[l + 1:r] + K[r + 1:]]
        out[K] = acc
    return SymTensor(u.N, u.m + 2, out)


@lru_cache(maxsize=None)
def _TI_matrix_exact(N: int, k: int):
    from sympy.polys.domains import QQ
    from sympy.polys.matrices import DomainMatrix

    keys = multi_indices(N, k)
    cols = []
    for K in keys:
        e = SymTensor(N, k, {K: 1})
        img = trace(insert_I(e))
        cols.append([QQ(int(img.coeffs[J])) for J in keys])
    M = DomainMatrix(cols, (len(keys), len(keys)), QQ).transpose()
    return M.inv()


@lru_cache(maxsize=None)
def _TI_matrix_float(N: int, k: int) -> np.ndarray:
    keys = multi_indices(N, k)
    M = np.zeros((len(keys), len(keys)))
    for c, K in enumerate(keys):
        img = trace(insert_I(SymTensor(N, k, {K: 1})))
        M[:, c] = [img.coeffs[J] for J in keys]
    return np.linalg.inv(M)


def _solve_TI(v: SymTensor) -> SymTensor:
    """Solve (T I) w = v for w of the same order as v."""
    keys = multi_indices(v.N, v.m)
    if v.is_exact():
        from sympy.polys.domains import QQ
        from sympy.polys.matrices import DomainMatrix

        inv = _TI_matrix_exact(v.N, v.m)
        rhs = DomainMatrix([[QQ(Fraction(v.coeffs[K]).numerator, Fraction(v.coeffs[K]).denominator)]
                            for K in keys], (len(keys), 1), QQ)
        sol = (inv * rhs).to_Matrix()
        return SymTensor(v.N, v.m, {K: Fraction(int(sol[i, 0].p), int(sol[i, 0].q))
                                    for i, K in enumerate(keys)})
    inv = _TI_matrix_float(v.N, v.m)
    sol = inv @ np.array([v.coeffs[K] for K in keys])
    return SymTensor(v.N, v.m, {K: _unwrap(sol[i]) for i, K in enumerate(keys)})


def decompose_trace_free(u: SymTensor) -> list[SymTensor]:
    """Trace-free u_r (order m - 2r) with u = sum_r I^r(u_r)."""
    if u.m < 2:
        return [u]
    w = _solve_TI(trace(u))
    u0 = u - insert_I(w)
    if u.is_exact():
        u0 = u0.map(Fraction)
    return [u0] + decompose_trace_free(w)


def reconstruct(parts: list[SymTensor]) -> SymTensor:
    """sum_r I^r(parts[r])."""
    total = parts[0]
    for r, p in enumerate(parts[1:], start=1):
        q = p
        for _ in range(r):
            q = insert_I(q)
        total = total + q
    return total


# ---------------------------------------------------------------------------
# Homogeneous polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomogPoly:
    """Homogeneous polynomial as {exponent tuple: coefficient}."""

    N: int
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for a, c in self.coeffs.items():
            a = tuple(int(e) for e in a)
            if len(a) != self.N or sum(a) != self.degree or min(a, default=0) < 0:
                raise ValueError(f"exponent {a} does not fit N={self.N}, degree={self.degree}")
            if c != 0:
                clean[a] = clean.get(a, 0) + c
        object.__setattr__(self, "coeffs", {a: c for a, c in clean.items() if c != 0})

    def __call__(self, x) -> object:
        return sum(c * math.prod(xi ** e for xi, e in zip(x, a)) for a, c in self.coeffs.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return (self.N, self.degree) == (other.N, other.degree) and self.coeffs == other.coeffs

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        d = dict(self.coeffs)
        for a, c in other.coeffs.items():
            d[a] = d.get(a, 0) + c
        return HomogPoly(self.N, self.degree, d)

    def __mul__(self, c) -> "HomogPoly":
        return HomogPoly(self.N, self.degree, {a: v * c for a, v in self.coeffs.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_harmonic(self) -> bool:
        return flat_laplacian(self).is_zero()

    def __repr__(self):
        return f"HomogPoly(N={self.N}, degree={self.degree}, terms={len(self.coeffs)})"


def _exponent(K: tuple[int, ...], N: int) -> tuple[int, ...]:
    a = [0] * N
    for k in K:
        a[k] += 1
    return tuple(a)


def poly_bridge(u: SymTensor) -> HomogPoly:
    """P_u(x) = u(x, ..., x)."""
    return HomogPoly(u.N, u.m, {_exponent(K, u.N): multiplicity(K) * v for K, v in u.coeffs.items()})


def tensor_from_poly(P: HomogPoly) -> SymTensor:
    """Inverse of ``poly_bridge``."""
    out = {}
    for K in multi_indices(P.N, P.degree):
        c = P.coeffs.get(_exponent(K, P.N), 0)
        mu = multiplicity(K)
        out[K] = Fraction(c, mu) if _is_exact(c) else c / mu
    return SymTensor(P.N, P.degree, out)


def flat_laplacian(P: HomogPoly) -> HomogPoly:
    """Delta_E P = -sum_i d^2 P / dx_i^2."""
    if P.degree < 2:
        return HomogPoly(P.N, max(P.degree - 2, 0), {})
    out: dict = {}
    for a, c in P.coeffs.items():
        for i, e in enumerate(a):
            if e >= 2:
                b = a[:i] + (e - 2,) + a[i + 1:]
                out[b] = out.get(b, 0) - e * (e - 1) * c
    return HomogPoly(P.N, P.degree - 2, out)


def laplacian_power_closed_form(m: int, r: int) -> int:
    """2^r m! r! / (m - r)!."""
    return 2 ** r * math.factorial(m) * math.factorial(r) // math.factorial(m - r)


def laplacian_power_contract(P: HomogPoly, r: int, x, check: bool = True) -> Fraction:
    """Delta_zeta^r P(x - zeta <zeta, x>) at zeta = 0, in exact arithmetic.

    With ``check`` the result is compared with 2^r m! r!/(m-r)! P(x) and an
    ``IdentityViolation`` is raised on mismatch.
    """
    from sympy.polys.domains import QQ
    from sympy.polys.rings import ring

    if not P.is_harmonic():
        raise ValueError("P must be harmonic")
    m = P.degree
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    x = [Fraction(v) for v in x]
    if len(x) != P.N:
        raise ValueError("x has the wrong dimension")
    R, *z = ring(",".join(f"z{i}" for i in range(P.N)), QQ)
    qx = [QQ(v.numerator, v.denominator) for v in x]
    t = sum((qx[i] * z[i] for i in range(P.N)), R.zero)
    lin = [qx[i] - z[i] * t for i in range(P.N)]
    poly = R.zero
    for a, c in P.coeffs.items():
        c = Fraction(c)
        term = R(QQ(c.numerator, c.denominator))
        for i, e in enumerate(a):
            if e:
                term *= lin[i] ** e
        poly += term
    for _ in range(r):
        poly = -sum((poly.diff(z[i]).diff(z[i]) for i in range(P.N)), R.zero)
    c0 = poly.coeff(1) if poly else QQ(0)
    value = Fraction(int(c0.numerator), int(c0.denominator))
    if check:
        expected = laplacian_power_closed_form(m, r) * Fraction(P(x))
        if value != expected:
            raise IdentityViolation(f"contraction identity failed: {value} != {expected}")
    return value


def harmonic_projections(N: int, m: int) -> list[HomogPoly]:
    """Harmonic parts of all monomials of degree m (nonzero ones, deduplicated)."""
    out: list[HomogPoly] = []
    for K in multi_indices(N, m):
        u = tensor_from_poly(HomogPoly(N, m, {_exponent(K, N): 1}))
        P = poly_bridge(decompose_trace_free(u)[0])
        if not P.is_zero() and P not in out:
            out.append(P)
    return out
