"""Minkowski space, the group PSO(1, n+1), hyperbolic models and boundary maps.

Vectors live in R^{1,n+1} with the metric diag(1, -1, ..., -1).  Points of
hyperbolic space are on the upper sheet of the hyperboloid <x, x> = 1, unit
tangent vectors are pairs (x, xi) with <xi, xi> = -1 and <x, xi> = 0.
Boundary points are unit vectors of R^{n+1}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "DomainError",
    "AlgebraElement",
    "GroupElement",
    "UnitTangent",
    "BoundaryPoint",
    "ModelPoint",
    "minkowski_matrix",
    "minkowski_inner",
    "algebra_basis",
    "basis_element",
    "bracket",
    "exp_basis",
    "geodesic_flow",
    "model_convert",
    "rho0",
    "boundary_maps",
    "poisson_kernel",
    "xi_pm",
    "boundary_action",
    "psl2_embed",
    "frame_at",
    "boost_to",
    "commutation_relations",
    "random_unit_tangent",
    "random_group_element",
    "random_boundary_point",
    "random_hyperboloid_point",
]

UNIT_TANGENT_TOL = 1e-6
GROUP_TOL = 1e-8
BOUNDARY_FLAG = 1.0 - 1e-12


class DomainError(ValueError):
    """Input outside the domain of an operation."""


def minkowski_matrix(n: int) -> np.ndarray:
    """J = diag(1, -1, ..., -1) of size n+2, as integers."""
    J = -np.eye(n + 2, dtype=np.int64)
    J[0, 0] = 1
    return J


def minkowski_inner(x, y) -> np.ndarray | float:
    """<x, y> = x0 y0 - sum_{j>=1} xj yj, broadcasting over leading axes."""
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., 0] * y[..., 0] - np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Lie algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of so(1, n+1).  Integer matrices for tagged basis elements."""

    matrix: np.ndarray
    tag: str = "generic"

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 3:
            raise DomainError("algebra element must be a square matrix of size >= 3")
        object.__setattr__(self, "matrix", _readonly(M))

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 2

    def is_exact(self) -> bool:
        return self.matrix.dtype.kind in "iu"

    def is_infinitesimal_isometry(self, tol: float = 0.0) -> bool:
        J = minkowski_matrix(self.n)
        R = self.matrix.T @ J + J @ self.matrix
        return bool(np.max(np.abs(R)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes()))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.matrix + other.matrix)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.matrix - other.matrix)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.matrix, self.tag if self.tag == "generic" else "generic")

    def __rmul__(self, c) -> "AlgebraElement":
        return AlgebraElement(c * self.matrix)

    def __repr__(self):
        return f"AlgebraElement(tag={self.tag!r}, n={self.n})"


def _elementary(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n + 2, n + 2), dtype=np.int64)
    E[i, j] = 1
    return E


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")


def basis_element(n: int, name: str, *idx: int) -> AlgebraElement:
    """One named generator: 'X', 'A' (k), 'R' (i, j), 'U+' (i), 'U-' (i).

    R accepts any i != j in 1..n+1 and returns E_ij - E_ji.
    """
    _check_n(n)
    if name == "X":
        return AlgebraElement(_elementary(n, 0, 1) + _elementary(n, 1, 0), "X")
    if name == "A":
        (k,) = idx
        if not 2 <= k <= n + 1:
            raise DomainError(f"A_k needs 2 <= k <= n+1, got {k}")
        return AlgebraElement(_elementary(n, 0, k) + _elementary(n, k, 0), f"A_{k}")
    if name == "R":
        i, j = idx
        if not (1 <= i <= n + 1 and 1 <= j <= n + 1 and i != j):
            raise DomainError(f"R_ij needs distinct 1 <= i, j <= n+1, got {i}, {j}")
        return AlgebraElement(_elementary(n, i, j) - _elementary(n, j, i), f"R_{i}_{j}")
    if name in ("U+", "U-"):
        (i,) = idx
        if not 1 <= i <= n:
            raise DomainError(f"U_i needs 1 <= i <= n, got {i}")
        A = basis_element(n, "A", i + 1).matrix
        R = basis_element(n, "R", 1, i + 1).matrix
        if name == "U+":
            return AlgebraElement(-A - R, f"U_{i}_plus")
        return AlgebraElement(-A + R, f"U_{i}_minus")
    raise DomainError(f"unknown generator {name!r}")


def algebra_basis(n: int) -> list[AlgebraElement]:
    """X, A_k (2<=k<=n+1), R_ij (1<=i<j<=n+1), then U_i^+, U_i^- (1<=i<=n).

    The list spans so(1, n+1) redundantly.  An independent subset is X, U_i^+,
    U_i^- and R_{i+1,j+1} (1<=i<j<=n), of size (n+1)(n+2)/2.
    """
    _check_n(n)
    out = [basis_element(n, "X")]
    out += [basis_element(n, "A", k) for k in range(2, n + 2)]
    out += [basis_element(n, "R", i, j) for i in range(1, n + 2) for j in range(i + 1, n + 2)]
    for i in range(1, n + 1):
        out += [basis_element(n, "U+", i), basis_element(n, "U-", i)]
    return out


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """[a, b] = ab - ba, in integer arithmetic when both inputs are exact."""
    if a.matrix.shape != b.matrix.shape:
        raise DomainError("bracket of elements with different n")
    A, B = a.matrix, b.matrix
    return AlgebraElement(A @ B - B @ A)


def commutation_relations(n: int) -> list[tuple[str, AlgebraElement, AlgebraElement]]:
    """All instances of the bracket table as (label, lhs, rhs) triples."""
    _check_n(n)
    X = basis_element(n, "X")
    U = {s: [basis_element(n, "U" + s, i) for i in range(1, n + 1)] for s in "+-"}
    zero = AlgebraElement(np.zeros((n + 2, n + 2), dtype=np.int64))
    R = lambda i, j: basis_element(n, "R", i + 1, j + 1)  # noqa: E731  (1-based i, j)
    rel = []
    for s, sgn in (("+", 1), ("-", -1)):
        other = "-" if s == "+" else "+"
        for i in range(n):
            rel.append((f"[X,U{i+1}{s}]", bracket(X, U[s][i]), sgn * U[s][i]))
            for j in range(n):
                rel.append((f"[U{i+1}{s},U{j+1}{s}]", bracket(U[s][i], U[s][j]), zero))
                if i != j:
                    rel.append((f"[U{i+1}{s},U{j+1}{other}]",
                                bracket(U[s][i], U[other][j]), 2 * R(i + 1, j + 1)))
    for i in range(n):
        rel.append((f"[U{i+1}+,U{i+1}-]", bracket(U["+"][i], U["-"][i]), 2 * X))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            Rij = R(i + 1, j + 1)
            rel.append((f"[R{i+2}{j+2},X]", bracket(Rij, X), zero))
            for k in range(n):
                for s in "+-":
                    rhs = zero.matrix.copy()
                    if j == k:
                        rhs = rhs + U[s][i].matrix
                    if i == k:
                        rhs = rhs - U[s][j].matrix
                    rel.append((f"[R{i+2}{j+2},U{k+1}{s}]", bracket(Rij, U[s][k]),
                                AlgebraElement(rhs)))
    return rel


# ---------------------------------------------------------------------------
# Group elements and exponentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupElement:
    """Element of PSO(1, n+1) as an (n+2) x (n+2) real matrix."""

    matrix: np.ndarray
    check: bool = True

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 3:
            raise DomainError("group element must be a square matrix of size >= 3")
        if self.check:
            J = minkowski_matrix(M.shape[0] - 2)
            scale = max(1.0, float(np.max(np.abs(M))) ** 2)
            if np.max(np.abs(M.T @ J @ M - J)) > GROUP_TOL * scale:
                raise DomainError("matrix does not preserve the Minkowski metric")
            if M[0, 0] <= 0 or abs(np.linalg.det(M) - 1.0) > GROUP_TOL * scale ** 2:
                raise DomainError("matrix is not in the identity component")
        object.__setattr__(self, "matrix", _readonly(M))

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 2

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            return GroupElement(self.matrix @ other.matrix, check=False)
        if isinstance(other, UnitTangent):
            return UnitTangent(self.matrix @ other.x, self.matrix @ other.xi)
        return self.matrix @ np.asarray(other)

    def inverse(self) -> "GroupElement":
        J = minkowski_matrix(self.n)
        return GroupElement(J @ self.matrix.T @ J, check=False)

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(np.eye(n + 2), check=False)

    def __repr__(self):
        return f"GroupElement(n={self.n})"


def exp_basis(a: AlgebraElement, t: float) -> GroupElement:
    """exp(t a), closed form for tagged generators, scipy expm otherwise."""
    n = a.n
    tag = a.tag
    M = np.asarray(a.matrix, dtype=float)
    if tag == "X" or tag.startswith("A_"):
        k = 1 if tag == "X" else int(tag.split("_")[1])
        G = np.eye(n + 2)
        G[0, 0] = G[k, k] = np.cosh(t)
        G[0, k] = G[k, 0] = np.sinh(t)
        return GroupElement(G, check=False)
    if tag.startswith("R_"):
        _, i, j = tag.split("_")
        i, j = int(i), int(j)
        G = np.eye(n + 2)
        c, s = np.cos(t), np.sin(t)
        G[i, i] = G[j, j] = c
        # E_ij - E_ji sends e_j to e_i
        G[i, j], G[j, i] = s, -s
        return GroupElement(G, check=False)
    if tag.startswith("U_"):
        return GroupElement(np.eye(n + 2) + t * M + 0.5 * t * t * (M @ M), check=False)
    return GroupElement(scipy.linalg.expm(t * M), check=False)


# ---------------------------------------------------------------------------
# Unit tangent bundle and geodesic flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UnitTangent:
    """(x, xi) on the unit tangent bundle; renormalized on construction."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        xi = np.asarray(self.xi, dtype=float).copy()
        if x.ndim != 1 or x.shape != xi.shape or x.shape[0] < 3:
            raise DomainError("x and xi must be vectors of equal length >= 3")
        xx = minkowski_inner(x, x)
        if x[0] <= 0 or abs(xx - 1.0) > UNIT_TANGENT_TOL * max(1.0, x[0] ** 2):
            raise DomainError("x is not on the upper hyperboloid sheet")
        x = x / np.sqrt(xx)
        d = minkowski_inner(x, xi)
        scale = max(1.0, abs(x[0]) * np.max(np.abs(xi)))
        if abs(d) > UNIT_TANGENT_TOL * scale:
            raise DomainError("xi is not tangent to the hyperboloid at x")
        xi = xi - d * x
        nn = -minkowski_inner(xi, xi)
        if abs(nn - 1.0) > UNIT_TANGENT_TOL * scale ** 2:
            raise DomainError("xi is not a unit spacelike vector")
        xi = xi / np.sqrt(nn)
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "xi", _readonly(xi))

    @property
    def n(self) -> int:
        return self.x.shape[0] - 2

    @classmethod
    def base(cls, n: int) -> "UnitTangent":
        x = np.zeros(n + 2)
        xi = np.zeros(n + 2)
        x[0] = 1.0
        xi[1] = 1.0
        return cls(x, xi)

    def __repr__(self):
        return f"UnitTangent(x={self.x.tolist()}, xi={self.xi.tolist()})"


def geodesic_flow(t: float, rho: UnitTangent) -> UnitTangent:
    """phi_t(x, xi) = (x cosh t + xi sinh t, x sinh t + xi cosh t)."""
    c, s = np.cosh(t), np.sinh(t)
    return UnitTangent(rho.x * c + rho.xi * s, rho.x * s + rho.xi * c)


# ---------------------------------------------------------------------------
# Models of hyperbolic space
# ---------------------------------------------------------------------------

_MODELS = ("hyperboloid", "ball", "halfspace")


@dataclass(frozen=True, eq=False)
class ModelPoint:
    """A point in one of the three models.

    hyperboloid: (n+2)-vector; ball: (n+1)-vector with |y| < 1;
    halfspace: (n+1)-vector (z0, z) with z0 > 0.
    ``near_boundary`` is set for ball points with |y| > 1 - 1e-12.
    """

    model: str
    coords: np.ndarray
    near_boundary: bool = False

    def __post_init__(self):
        if self.model not in _MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1:
            raise DomainError("coordinates must be a vector")
        if self.model == "hyperboloid":
            if c[0] <= 0 or abs(minkowski_inner(c, c) - 1.0) > 1e-8 * max(1.0, c[0] ** 2):
                raise DomainError("point is not on the hyperboloid")
        elif self.model == "ball":
            r = np.linalg.norm(c)
            if r >= 1.0:
                raise DomainError("ball point must satisfy |y| < 1")
            object.__setattr__(self, "near_boundary", bool(r > BOUNDARY_FLAG))
        elif c[0] <= 0:
            raise DomainError("half-space point must have z0 > 0")
        object.__setattr__(self, "coords", _readonly(c))

    @property
    def n(self) -> int:
        return self.coords.shape[0] - (2 if self.model == "hyperboloid" else 1)


def _to_ball(p: ModelPoint) -> np.ndarray:
    c = p.coords
    if p.model == "ball":
        return np.array(c)
    if p.model == "hyperboloid":
        return c[1:] / (c[0] + 1.0)
    z0, z = c[0], c[1:]
    E = (1.0 + z0) ** 2 + z @ z
    return np.concatenate(([z0 * z0 + z @ z - 1.0], 2.0 * z)) / E


def _from_ball(y: np.ndarray, target: str) -> np.ndarray:
    s = y @ y
    if target == "ball":
        return y
    if target == "hyperboloid":
        return np.concatenate(([1.0 + s], 2.0 * y)) / (1.0 - s)
    D = 1.0 + s - 2.0 * y[0]
    return np.concatenate(([1.0 - s], 2.0 * y[1:])) / D


def model_convert(p: ModelPoint, target: str) -> ModelPoint:
    """Convert between hyperboloid, ball and half-space coordinates."""
    if target not in _MODELS:
        raise DomainError(f"unknown model {target!r}")
    if target == p.model:
        return p
    if p.model == "hyperboloid" and target == "ball":
        return ModelPoint("ball", _to_ball(p))
    return ModelPoint(target, _from_ball(_to_ball(p), target))


def rho0(p: ModelPoint) -> float:
    """Boundary defining function 2(1 - |y|)/(1 + |y|) in ball coordinates."""
    r = float(np.linalg.norm(_to_ball(p)))
    return 2.0 * (1.0 - r) / (1.0 + r)


# ---------------------------------------------------------------------------
# Conformal boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Unit vector nu in R^{n+1}."""

    nu: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.nu, dtype=float)
        if v.ndim != 1 or v.shape[0] < 2:
            raise DomainError("boundary point must be a vector of length >= 2")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise DomainError("boundary point must have unit norm")
        object.__setattr__(self, "nu", _readonly(v))

    @property
    def n(self) -> int:
        return self.nu.shape[0] - 1

    @classmethod
    def normalized(cls, v) -> "BoundaryPoint":
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))


def _as_nu(nu) -> np.ndarray:
    return nu.nu if isinstance(nu, BoundaryPoint) else np.asarray(nu, dtype=float)


def boundary_maps(rho: UnitTangent):
    """(Phi_-, Phi_+, B_-, B_+) with x +- xi = Phi_+-(1, B_+-)."""
    x, xi = rho.x, rho.xi
    phi_m = x[0] - xi[0]
    phi_p = x[0] + xi[0]
    Bm = (x[1:] - xi[1:]) / phi_m
    Bp = (x[1:] + xi[1:]) / phi_p
    return phi_m, phi_p, BoundaryPoint.normalized(Bm), BoundaryPoint.normalized(Bp)


def poisson_kernel(x, nu) -> float:
    """P(x, nu) = 1/(x0 - x'.nu)."""
    x = np.asarray(x, dtype=float)
    v = _as_nu(nu)
    return 1.0 / (x[..., 0] - np.sum(x[..., 1:] * v, axis=-1))


def xi_pm(x, nu, sign: int) -> UnitTangent:
    """The unit tangent at x pointing to (sign=-1) or from (sign=+1) nu.

    xi_+-(x, nu) = -+x +- P(x, nu)(1, nu), so that B_sign = nu and
    Phi_sign = P(x, nu).
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    x = np.asarray(x, dtype=float)
    v = _as_nu(nu)
    P = poisson_kernel(x, v)
    xi = sign * (P * np.concatenate(([1.0], v)) - x)
    return UnitTangent(x, xi)


def boundary_action(gamma: GroupElement, nu):
    """(N_gamma(nu), L_gamma(nu)) with gamma(1, nu) = N (1, L)."""
    v = _as_nu(nu)
    w = gamma.matrix @ np.concatenate(([1.0], v))
    N = w[0]
    return N, BoundaryPoint.normalized(w[1:] / N)


def psl2_embed(a: float, b: float, c: float, d: float) -> GroupElement:
    """The homomorphism PSL(2, R) -> PSO(1, 2)."""
    if abs(a * d - b * c - 1.0) >= 1e-12:
        raise DomainError("input matrix must have determinant 1")
    M = np.array([
        [(a * a + b * b + c * c + d * d) / 2, (a * a - b * b + c * c - d * d) / 2, -a * b - c * d],
        [(a * a + b * b - c * c - d * d) / 2, (a * a - b * b - c * c + d * d) / 2, c * d - a * b],
        [-a * c - b * d, b * d - a * c, a * d + b * c],
    ])
    return GroupElement(M, check=False)


def frame_at(rho: UnitTangent) -> GroupElement:
    """A group element gamma with gamma e0 = x and gamma e1 = xi.

    Remaining columns come from Minkowski Gram-Schmidt on e2, ..., e_{n+1},
    then e0, e1 as fallback seeds.  The last column is flipped if needed to
    make the determinant 1.  The choice is deterministic but not canonical.
    """
    n = rho.n
    x, xi = rho.x, rho.xi
    cols = [x, xi]
    seeds = [np.eye(n + 2)[k] for k in list(range(2, n + 2)) + [0, 1]]
    for e in seeds:
        if len(cols) == n + 2:
            break
        v = e - minkowski_inner(e, x) * x + minkowski_inner(e, xi) * xi
        for c in cols[2:]:
            v = v + minkowski_inner(v, c) * c
        nn = -minkowski_inner(v, v)
        if nn < 1e-8:
            continue
        cols.append(v / np.sqrt(nn))
    M = np.column_stack(cols)
    if np.linalg.det(M) < 0:
        M[:, -1] = -M[:, -1]
    return GroupElement(M, check=False)


def boost_to(x) -> GroupElement:
    """The pure boost sending e0 to the hyperboloid point x."""
    x = np.asarray(x, dtype=float)
    xp = x[1:]
    M = np.empty((x.shape[0], x.shape[0]))
    M[0, 0] = x[0]
    M[0, 1:] = xp
    M[1:, 0] = xp
    M[1:, 1:] = np.eye(x.shape[0] - 1) + np.outer(xp, xp) / (1.0 + x[0])
    return GroupElement(M, check=False)


# ---------------------------------------------------------------------------
# Random sampling used by tests and verification suites
# ---------------------------------------------------------------------------

def random_boundary_point(rng: np.random.Generator, n: int) -> BoundaryPoint:
    return BoundaryPoint.normalized(rng.standard_normal(n + 1))


def random_hyperboloid_point(rng: np.random.Generator, n: int, max_dist: float = 2.0) -> np.ndarray:
    """A point at hyperbolic distance <= max_dist from e0."""
    r = rng.uniform(0.0, max_dist)
    u = rng.standard_normal(n + 1)
    u /= np.linalg.norm(u)
    return np.concatenate(([np.cosh(r)], np.sinh(r) * u))


def random_unit_tangent(rng: np.random.Generator, n: int, max_dist: float = 2.0) -> UnitTangent:
    x = random_hyperboloid_point(rng, n, max_dist)
    v = np.concatenate(([0.0], rng.standard_normal(n + 1)))
    v = boost_to(x).matrix @ v
    return UnitTangent(x, v / np.sqrt(-minkowski_inner(v, v)))


def random_group_element(rng: np.random.Generator, n: int, count: int = 4,
                         scale: float = 1.0) -> GroupElement:
    """Product of ``count`` exponentials of random tagged basis elements."""
    basis = algebra_basis(n)
    G = np.eye(n + 2)
    for _ in range(count):
        a = basis[rng.integers(len(basis))]
        G = G @ exp_basis(a, rng.uniform(-scale, scale)).matrix
    return GroupElement(G)
