"""Horocyclic operators on frame coefficients over G and the ladder coefficients.

A ``Section`` of order m is a callable gamma -> array of shape (n,)*m holding
the coefficients u_K(gamma) = u(pi_S(gamma))(gamma e_{k1+1}, ..., gamma e_{km+1}).
Operators act on coefficients through left-invariant derivatives, computed
by central differences with one Richardson step.  Nesting is limited to
depth 4.

Sign conventions: ``sign=+1`` selects U^+_r, ``sign=-1`` selects U^-_r.
Ladder coefficient functions take ``mu``, the eigenvalue of the relevant
tensor under the operator X acting coefficientwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .lorentz_core import DomainError, GroupElement, basis_element, exp_basis
from .sym_tensor import SymTensor, decompose_trace_free, insert_I, multi_indices

__all__ = [
    "DepthError",
    "Section",
    "LadderCoeff",
    "finite_difference_step",
    "invariant_derivative",
    "apply_X",
    "apply_U",
    "apply_V",
    "horocyclic_laplacian",
    "section_from_function",
    "first_band_state",
    "trace_free_parts",
    "rotation_condition_residual",
    "ladder_dim2",
    "ladder_dim2_coeff",
    "sl2_ladder_oracle",
    "recovery_coefficient",
    "recovery_coeff",
    "recovery_coefficient_composed",
    "long_product_coefficient",
    "mixed_power_coefficient",
    "moins_penible_coefficient",
    "BandRecoveryReport",
    "verify_band_recovery",
]

MAX_DEPTH = 4


class DepthError(RuntimeError):
    """Finite-difference nesting deeper than the supported budget."""


def finite_difference_step(depth: int) -> float:
    """Base step for a chain of the given total depth."""
    if depth > MAX_DEPTH:
        raise DepthError(f"operator depth {depth} exceeds the budget of {MAX_DEPTH}")
    return 1e-3 if depth <= 2 else 1e-2


def _matrix(gamma) -> np.ndarray:
    return gamma.matrix if isinstance(gamma, GroupElement) else np.asarray(gamma, dtype=float)


@lru_cache(maxsize=4096)
def _exp_cached(n: int, name: str, idx: tuple, t: float) -> np.ndarray:
    return exp_basis(basis_element(n, name, *idx), t).matrix


def _gen(sign: int) -> str:
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return "U+" if sign > 0 else "U-"


@dataclass(frozen=True, eq=False)
class Section:
    """Frame coefficients of a section of the m-th symmetric power of E*.

    ``f(G, h)`` maps an (n+2)x(n+2) matrix and a base step to an array of
    shape (n,)*m.  ``depth`` counts nested derivatives.
    """

    n: int
    m: int
    f: Callable[[np.ndarray, float], np.ndarray]
    depth: int = 0

    def __post_init__(self):
        if self.depth > MAX_DEPTH:
            raise DepthError(f"operator depth {self.depth} exceeds the budget of {MAX_DEPTH}")

    def __call__(self, gamma, h: Optional[float] = None) -> np.ndarray:
        h = finite_difference_step(self.depth) if h is None else h
        return np.asarray(self.f(_matrix(gamma), h))

    def coeffs(self, gamma) -> SymTensor:
        """Coefficients at gamma as a SymTensor over N = n (symmetric part)."""
        a = self(gamma)
        if a.ndim == 0:
            return SymTensor.scalar(self.n, complex(a))
        return SymTensor(self.n, self.m, {K: complex(a[K]) for K in multi_indices(self.n, self.m)})

    def __add__(self, other: "Section") -> "Section":
        if (self.n, self.m) != (other.n, other.m):
            raise ValueError("sections of different shape")
        f, g = self.f, other.f
        return Section(self.n, self.m, lambda G, h: f(G, h) + g(G, h), max(self.depth, other.depth))

    def scale(self, c: complex) -> "Section":
        f = self.f
        return Section(self.n, self.m, lambda G, h: c * f(G, h), self.depth)


def section_from_function(n: int, m: int, f: Callable[[np.ndarray], np.ndarray]) -> Section:
    """Wrap a coefficient function of the group matrix alone."""
    return Section(n, m, lambda G, h: f(G), 0)


def _richardson_first(F: Callable[[np.ndarray], np.ndarray], G: np.ndarray, n: int,
                      name: str, idx: tuple, h: float) -> np.ndarray:
    def D(step):
        return (F(G @ _exp_cached(n, name, idx, step)) - F(G @ _exp_cached(n, name, idx, -step))) / (2 * step)

    return (4.0 * D(h / 2) - D(h)) / 3.0


def _richardson_second(F: Callable[[np.ndarray], np.ndarray], G: np.ndarray, n: int,
                       name: str, idx: tuple, h: float) -> np.ndarray:
    F0 = F(G)

    def D2(step):
        return (F(G @ _exp_cached(n, name, idx, step)) - 2 * F0
                + F(G @ _exp_cached(n, name, idx, -step))) / (step * step)

    return (4.0 * D2(h / 2) - D2(h)) / 3.0


def _spec(a) -> tuple[str, tuple]:
    tag = a.tag
    if tag == "X":
        return "X", ()
    if tag.startswith("A_"):
        return "A", (int(tag.split("_")[1]),)
    if tag.startswith("R_"):
        _, i, j = tag.split("_")
        return "R", (int(i), int(j))
    if tag.startswith("U_"):
        _, i, s = tag.split("_")
        return ("U+" if s == "plus" else "U-"), (int(i),)
    raise DomainError("invariant_derivative needs a tagged generator")


def invariant_derivative(F: Callable, a, gamma, h: float = 1e-3) -> complex | np.ndarray:
    """d/dt F(gamma exp(t a)) at t = 0 by Richardson-extrapolated central differences."""
    G = _matrix(gamma)
    n = G.shape[0] - 2
    if a.tag == "generic":
        import scipy.linalg

        M = np.asarray(a.matrix, dtype=float)

        def D(step):
            return (np.asarray(F(G @ scipy.linalg.expm(step * M)))
                    - np.asarray(F(G @ scipy.linalg.expm(-step * M)))) / (2 * step)

        out = (4.0 * D(h / 2) - D(h)) / 3.0
    else:
        name, idx = _spec(a)
        out = _richardson_first(lambda H: np.asarray(F(H)), G, n, name, idx, h)
    if np.any(np.isnan(out)):
        raise FloatingPointError("NaN in finite-difference derivative")
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def apply_X(s: Section) -> Section:
    """(X u)_K = X u_K."""
    f, n = s.f, s.n
    return Section(n, s.m, lambda G, h: _richardson_first(lambda H: f(H, h), G, n, "X", (), h), s.depth + 1)


def apply_U(s: Section, sign: int) -> Section:
    """(U u)_{rK} = U_r u_K, the new index first."""
    f, n, name = s.f, s.n, _gen(sign)

    def g(G, h):
        return np.stack([_richardson_first(lambda H: f(H, h), G, n, name, (r,), h)
                         for r in range(1, n + 1)])

    return Section(n, s.m + 1, g, s.depth + 1)


def apply_V(s: Section, sign: int) -> Section:
    """(V u)_K = sum_q U_q u_{qK}."""
    if s.m < 1:
        raise DomainError("V needs a section of order >= 1")
    f, n, name = s.f, s.n, _gen(sign)

    def g(G, h):
        return sum(_richardson_first(lambda H: np.asarray(f(H, h))[q - 1], G, n, name, (q,), h)
                   for q in range(1, n + 1))

    return Section(n, s.m - 1, g, s.depth + 1)


def horocyclic_laplacian(s: Section, sign: int) -> Section:
    """Delta u = -sum_q U_q U_q u, coefficientwise."""
    f, n, name = s.f, s.n, _gen(sign)

    def g(G, h):
        return -sum(_richardson_second(lambda H: f(H, h), G, n, name, (q,), h)
                    for q in range(1, n + 1))

    return Section(n, s.m, g, s.depth + 2)


def first_band_state(n: int, m: int, lam: complex, w: Callable) -> Section:
    """v = Phi_-^lam Q_-(w) as a section: X v = -lam v and U_- v = 0."""
    lam = complex(lam)

    def f(G, h):
        x, xi = G[:, 0], G[:, 1]
        phi = x[0] - xi[0]
        B = (x[1:] - xi[1:]) / phi
        B = B / np.linalg.norm(B)
        V = G[:, 2:].T
        T = V[:, 1:] - np.outer(V[:, 0], B)
        W = np.asarray(w(B))
        for _ in range(W.ndim):
            W = np.tensordot(W, T, axes=([0], [1]))
        return np.exp(lam * np.log(phi)) * W

    return Section(n, m, f, 0)


def _array_to_sym(a: np.ndarray, n: int) -> SymTensor:
    return SymTensor(n, a.ndim, {K: complex(a[K]) for K in multi_indices(n, a.ndim)})


def trace_free_parts(s: Section) -> list[Section]:
    """Sections v_r with v = sum_r I^r(v_r), each trace-free, pointwise."""
    n, m, f = s.n, s.m, s.f
    count = m // 2 + 1

    def part(r):
        def g(G, h):
            a = np.asarray(f(G, h))
            if a.ndim < 2:
                return a if r == 0 else np.zeros(())
            if a.ndim <= 3:
                # T I c = (2(m-2) + n) c when c has order < 2
                c = np.trace(a, axis1=0, axis2=1) / (n + 2 * (a.ndim - 2))
                if r == 1:
                    return c
                eye = np.eye(n)
                if a.ndim == 2:
                    return a - c * eye
                Ic = (np.einsum("ij,k->ijk", eye, c) + np.einsum("ik,j->ijk", eye, c)
                      + np.einsum("jk,i->ijk", eye, c))
                return a - Ic
            return decompose_trace_free(_array_to_sym(a, n))[r].to_full()

        return Section(n, m - 2 * r, g, s.depth)

    return [part(r) for r in range(count)]


def rotation_condition_residual(s: Section, gamma) -> float:
    """Max deviation in the rotation condition characterizing descent to S H.

    R_{i+1,j+1} f_K = sum_l (delta_{j k_l} f_{l->i} - delta_{i k_l} f_{l->j})
    with 1-based i < j <= n (array indices i-1, j-1).
    """
    G = _matrix(gamma)
    n, m = s.n, s.m
    h = finite_difference_step(s.depth + 1)
    f0 = np.asarray(s.f(G, h))
    worst = 0.0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs = _richardson_first(lambda H: np.asarray(s.f(H, h)), G, n, "R", (i + 1, j + 1), h)
            rhs = np.zeros_like(f0)
            for ax in range(m):
                src_i = np.take(f0, i - 1, axis=ax)
                src_j = np.take(f0, j - 1, axis=ax)
                sl_j = [slice(None)] * m
                sl_j[ax] = j - 1
                sl_i = [slice(None)] * m
                sl_i[ax] = i - 1
                rhs[tuple(sl_j)] += src_i
                rhs[tuple(sl_i)] -= src_j
            worst = max(worst, float(np.max(np.abs(lhs - rhs))) if m else float(abs(lhs)))
    return worst


# ---------------------------------------------------------------------------
# Ladder coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadderCoeff:
    """constant * prod (a * lam + b) over ``factors`` = ((a, b), ...)."""

    constant: Fraction
    factors: tuple

    def __call__(self, lam: complex) -> complex:
        out = complex(self.constant)
        for a, b in self.factors:
            out *= a * lam + b
        return out

    def exact(self, lam) -> Fraction:
        out = Fraction(self.constant)
        for a, b in self.factors:
            out *= a * Fraction(lam) + b
        return out

    def zeros(self) -> list[Fraction]:
        return sorted({Fraction(-b, a) for a, b in self.factors if a != 0})

    def normalized_roots(self) -> list[Fraction]:
        """Roots with multiplicity, sorted."""
        return sorted(Fraction(-b, a) for a, b in self.factors if a != 0)


def ladder_dim2_coeff(m: int) -> LadderCoeff:
    if m < 0:
        raise DomainError("m must be >= 0")
    return LadderCoeff(Fraction(math.factorial(m)), tuple((2, m + j) for j in range(1, m + 1)))


def ladder_dim2(m: int, lam: complex) -> complex:
    """m! prod_{j=1}^m (2 lam + m + j)."""
    return ladder_dim2_coeff(m)(lam)


def sl2_ladder_oracle(m: int, mu: complex) -> complex:
    """U_-^m U_+^m on u with U_- u = 0 and X u = -mu u, from [U+, U-] = 2X alone."""
    total, c = 1.0 + 0j, 0.0 + 0j
    for k in range(1, m + 1):
        c = c - 2 * (-mu + k - 1)
        total *= c
    return total


def recovery_coeff(n: int, m: int, r: int) -> LadderCoeff:
    """Factor list of the recovery coefficient."""
    if r < 0 or 2 * r > m:
        raise DomainError("need 0 <= 2r <= m")
    f = [(1, j) for j in range(n - 1, n + m - 2 * r - 1)]
    f += [(1, -j) for j in range(m - 2 * r, m - r)]
    f += [(2, n - 2 * j) for j in range(1, r + 1)]
    return LadderCoeff(Fraction(2 ** m * math.factorial(m - 2 * r)), tuple(f))


def recovery_coefficient(n: int, m: int, r: int, lam: complex) -> complex:
    """2^m (m-2r)! prod(lam+j) prod(lam-j) prod(2 lam + n - 2j)."""
    return recovery_coeff(n, m, r)(lam)


def long_product_coefficient(n: int, m: int, mu: complex, sign: int) -> complex:
    """U_sign^m V_{-sign}^m v = 2^m m! prod_{l=n-1}^{n+m-2} (l + sign mu) v, X v = mu v."""
    out = complex(2 ** m * math.factorial(m))
    for l in range(n - 1, n + m - 1):
        out *= l + sign * mu
    return out


def mixed_power_coefficient(n: int, m: int, r: int, mu: complex, sign: int,
                            trace: bool = False) -> complex:
    """(-1)^r 2^{2r} prod_{j<r} (mu - sign(m+j)) prod_{j=1}^r (2 mu + sign(n-2j)).

    ``mu`` is the X-eigenvalue of U_sign^m u.  With ``trace`` the extra factor
    r(n + 2m + 2r - 2) of the traced identity is included.
    """
    out = complex((-1) ** r * 2 ** (2 * r))
    for j in range(r):
        out *= mu - sign * (m + j)
    for j in range(1, r + 1):
        out *= 2 * mu + sign * (n - 2 * j)
    if trace:
        out *= r * (n + 2 * m + 2 * r - 2)
    return out


moins_penible_coefficient = mixed_power_coefficient


def recovery_coefficient_composed(n: int, m: int, r: int, lam: complex) -> complex:
    """The recovery coefficient rebuilt from the two ladder identities (lower sign)."""
    mp = m - 2 * r
    return (-1) ** r * mixed_power_coefficient(n, mp, r, -lam, -1) * long_product_coefficient(n, mp, -lam, -1)


# ---------------------------------------------------------------------------
# Band recovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandRecoveryReport:
    n: int
    m: int
    lam: complex
    points: int
    max_rel_deviation: float
    passed: bool
    tolerance: float


def verify_band_recovery(n: int, m: int, lam: complex, w: Callable, gammas,
                         tol: float = 1e-4) -> BandRecoveryReport:
    """Build u from v = Phi_-^lam Q_-(w) and check U_-^m u = v at ``gammas``."""
    if n not in (1, 2, 3):
        raise DomainError("band recovery is supported for n <= 3")
    if m > 2:
        raise DepthError("band recovery beyond m = 2 exceeds the depth budget")
    if n == 1 and m >= 2:
        raise DomainError("for n = 1 there are no nonzero trace-free tensors of order >= 2")
    lam = complex(lam)
    if abs(2 * lam - round((2 * lam).real)) < 1e-12:
        raise DomainError("lambda must avoid half-integers")
    v = first_band_state(n, m, lam, w)
    parts = trace_free_parts(v)
    u = None
    for r, vr in enumerate(parts):
        t = vr
        for _ in range(m - 2 * r):
            t = apply_V(t, +1)
        for _ in range(r):
            t = horocyclic_laplacian(t, +1).scale(-1.0)
        term = t.scale(1.0 / recovery_coefficient(n, m, r, lam))
        u = term if u is None else u + term
    Um = u
    for _ in range(m):
        Um = apply_U(Um, -1)
    worst = 0.0
    count = 0
    for g in gammas:
        target = v(g)
        got = Um(g)
        scale = max(float(np.max(np.abs(target))), 1e-300)
        worst = max(worst, float(np.max(np.abs(got - target))) / scale)
        count += 1
    return BandRecoveryReport(n, m, lam, count, worst, worst <= tol, tol)
