"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a ``SuiteReport`` listing named checks with the largest
deviation seen, the tolerance applied and the number of cases.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

__all__ = ["Check", "SuiteReport", "SUITES", "run_suite", "run_suites", "DEFAULT_TOLS"]


@dataclass
class Check:
    name: str
    max_dev: float
    tol: float
    cases: int
    exact: bool = False

    @property
    def passed(self) -> bool:
        return self.max_dev == 0 if self.exact else self.max_dev <= self.tol


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def cases(self) -> int:
        return sum(c.cases for c in self.checks)

    def add(self, name: str, max_dev: float, tol: float, cases: int, exact: bool = False) -> Check:
        c = Check(name, float(max_dev), tol, cases, exact)
        self.checks.append(c)
        return c

    def lines(self) -> list[str]:
        out = [f"[{self.suite}] seed={self.seed} cases={self.cases} elapsed={self.elapsed:.2f}s "
               f"{'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            tol = "exact" if c.exact else f"{c.tol:.1e}"
            out.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}: max_dev={c.max_dev:.3e} "
                       f"tol={tol} cases={c.cases}")
        return out

    def as_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed, "elapsed": self.elapsed,
                "checks": [{"name": c.name, "max_dev": c.max_dev, "tol": c.tol, "exact": c.exact,
                            "cases": c.cases, "passed": c.passed} for c in self.checks]}


DEFAULT_TOLS = {
    "algebraic": 1e-11,
    "fd": 1e-6,
    "jacobian": 1e-5,
    "horo": 1e-6,
    "commutator": 1e-5,
    "recovery": 1e-4,
    "quad": 1e-10,
    "poisson_fd": 1e-4,
    "c00": 1e-12,
    "oracle": 1e-8,
    "pairing": 1e-10,
}


def _tol(overrides: Optional[dict], key: str) -> float:
    if overrides and key in overrides:
        return overrides[key]
    if overrides and "all" in overrides:
        return overrides["all"]
    return DEFAULT_TOLS[key]


# ---------------------------------------------------------------------------
# lie
# ---------------------------------------------------------------------------

def suite_lie(seed: int = 0, ns=(1, 2, 3, 4), tols=None, **_) -> SuiteReport:
    from .lorentz_core import algebra_basis, commutation_relations

    rep = SuiteReport("lie", seed)
    for n in ns:
        rels = commutation_relations(n)
        bad = 0
        for _, lhs, rhs in rels:
            if lhs.matrix.dtype.kind not in "iu" or not np.array_equal(lhs.matrix, rhs.matrix):
                bad += 1
        rep.add(f"commutation relations n={n}", bad, 0, len(rels), exact=True)
        # every basis element preserves the Minkowski form: a^T J + J a = 0
        J = np.diag([1] + [-1] * (n + 1))
        dev = max(int(np.abs(a.matrix.T @ J + J @ a.matrix).max()) for a in algebra_basis(n))
        rep.add(f"so(1,n+1) membership n={n}", dev, 0, len(algebra_basis(n)), exact=True)
    return rep


# ---------------------------------------------------------------------------
# boundary maps
# ---------------------------------------------------------------------------

def _batch_unit_tangents(rng: np.random.Generator, n: int, count: int, max_dist: float = 2.0):
    r = rng.uniform(0, max_dist, count)
    u = rng.standard_normal((count, n + 1))
    u /= np.linalg.norm(u, axis=1)[:, None]
    X = np.column_stack([np.cosh(r), np.sinh(r)[:, None] * u])
    v = rng.standard_normal((count, n + 1))
    # tangent vector at x: boost of (0, v)
    xp = X[:, 1:]
    dot = np.sum(xp * v, axis=1)
    V = np.column_stack([dot, v + (dot / (1.0 + X[:, 0]))[:, None] * xp])
    nrm = np.sqrt(np.sum(V[:, 1:] ** 2, axis=1) - V[:, 0] ** 2)
    return X, V / nrm[:, None]


def suite_boundary(seed: int = 0, samples: int = 10_000, ns=(1, 2, 3), tols=None, **_) -> SuiteReport:
    from . import kernels
    from .lorentz_core import boundary_action, random_group_element

    rep = SuiteReport("boundary", seed)
    rng = np.random.default_rng(seed)
    ta, tf = _tol(tols, "algebraic"), _tol(tols, "fd")
    per_n = -(-samples // len(ns))
    for n in ns:
        X, XI = _batch_unit_tangents(rng, n, per_n)
        pm, pp, Bm, Bp = kernels.boundary_batch(X, XI)
        rep.add(f"Phi+Phi-(1-B+.B-)=2 n={n}", np.abs(pp * pm * (1 - np.sum(Bp * Bm, axis=1)) - 2).max(),
                ta, per_n)
        t = rng.uniform(-1.5, 1.5, per_n)[:, None]
        Xt = np.cosh(t) * X + np.sinh(t) * XI
        XIt = np.sinh(t) * X + np.cosh(t) * XI
        pm2, pp2, Bm2, Bp2 = kernels.boundary_batch(Xt, XIt)
        e = np.exp(t[:, 0])
        rep.add(f"Phi+- along the flow n={n}",
                max(np.abs(pp2 / (e * pp) - 1).max(), np.abs(pm2 * e / pm - 1).max()), ta, per_n)
        rep.add(f"B+- flow invariant n={n}", max(np.abs(Bp2 - Bp).max(), np.abs(Bm2 - Bm).max()), ta, per_n)
        # Poisson kernel equivariance P(gamma x, L nu) = N(nu) P(x, nu)
        dev, groups = 0.0, 50
        for k in range(groups):
            g = random_group_element(rng, n)
            sl = slice(k * per_n // groups, (k + 1) * per_n // groups)
            x = X[sl]
            nu = Bm[sl]
            w = np.column_stack([np.ones(len(nu)), nu]) @ g.matrix.T
            N = w[:, 0]
            L = w[:, 1:] / N[:, None]
            gx = x @ g.matrix.T
            P = 1.0 / (x[:, 0] - np.sum(x[:, 1:] * nu, axis=1))
            Pg = 1.0 / (gx[:, 0] - np.sum(gx[:, 1:] * L, axis=1))
            dev = max(dev, np.abs(Pg / (N * P) - 1).max())
        rep.add(f"Poisson kernel equivariance n={n}", dev, ta, per_n)
        # conformality of nu -> xi_+-(x, nu): Gram matrix equals P^2 times the sphere metric
        dev, count, h = 0.0, 200, 1e-5
        for j in range(count):
            x, nu = X[j], Bm[j]
            E = np.linalg.qr(np.column_stack([nu, np.eye(n + 1)]))[0][:, 1:n + 1].T
            P = 1.0 / (x[0] - x[1:] @ nu)
            for sgn in (-1, 1):

                def xi(v):
                    v = v / np.linalg.norm(v)
                    p = 1.0 / (x[0] - x[1:] @ v)
                    return sgn * (p * np.concatenate(([1.0], v)) - x)

                D = np.array([(xi(nu + h * e) - xi(nu - h * e)) / (2 * h) for e in E])
                G = -(np.outer(D[:, 0], D[:, 0]) - D[:, 1:] @ D[:, 1:].T)
                dev = max(dev, np.abs(G / P ** 2 - np.eye(n)).max())
        rep.add(f"conformality of nu -> xi_+- n={n}", dev, tf, 2 * count)
    return rep


# ---------------------------------------------------------------------------
# tensor
# ---------------------------------------------------------------------------

def suite_tensor(seed: int = 0, m_max: int = 5, tols=None, **_) -> SuiteReport:
    from .sym_tensor import (HomogPoly, SymTensor, decompose_trace_free, flat_laplacian, harmonic_projections,
                             insert_I, laplacian_power_contract, poly_bridge, reconstruct, trace)

    rep = SuiteReport("tensor", seed)
    rng = np.random.default_rng(seed)
    bad = {"TI": 0, "round": 0, "tf": 0, "bridge": 0, "contract": 0}
    cnt = dict.fromkeys(bad, 0)
    for N in (1, 2, 3, 4):
        for m in range(0, m_max + 1):
            for _ in range(2):
                u = SymTensor.random_rational(rng, N, m)
                lhs = trace(insert_I(u))
                rhs = (insert_I(trace(u)) if m >= 2 else SymTensor.zeros(N, m)) + u * (N + 2 * m)
                bad["TI"] += lhs != rhs
                cnt["TI"] += 1
                parts = decompose_trace_free(u)
                bad["round"] += reconstruct(parts) != u
                bad["tf"] += sum(not p.is_trace_free() for p in parts)
                cnt["round"] += 1
                cnt["tf"] += len(parts)
                # P_{I u} = C(m+2, 2) |x|^2 P_u and Delta_E P_u = -m(m-1) P_{T u}
                P = poly_bridge(u)
                sq = HomogPoly(N, 2, {tuple(2 if j == i else 0 for j in range(N)): 1 for i in range(N)})
                x = [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(N)]
                ok = poly_bridge(insert_I(u))(x) == Fraction(math.comb(m + 2, 2)) * sq(x) * P(x)
                if m >= 2:
                    ok = ok and flat_laplacian(P) == poly_bridge(trace(u)) * (-m * (m - 1))
                bad["bridge"] += not ok
                cnt["bridge"] += 1
    for N in (2, 3, 4):
        for m in range(0, m_max + 1):
            for P in harmonic_projections(N, m)[:2]:
                x = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3))) for _ in range(N)]
                for r in range(m + 1):
                    try:
                        laplacian_power_contract(P, r, x)
                    except ArithmeticError:
                        bad["contract"] += 1
                    cnt["contract"] += 1
    rep.add("trace of insertion identity", bad["TI"], 0, cnt["TI"], exact=True)
    rep.add("decomposition round trip", bad["round"], 0, cnt["round"], exact=True)
    rep.add("decomposition parts trace-free", bad["tf"], 0, cnt["tf"], exact=True)
    rep.add("polynomial bridge intertwining", bad["bridge"], 0, cnt["bridge"], exact=True)
    rep.add("harmonic contraction identity", bad["contract"], 0, cnt["contract"], exact=True)
    return rep


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

def suite_transport(seed: int = 0, points: int = 1000, ns=(1, 2, 3), tols=None, **_) -> SuiteReport:
    from .frame_transport import (boundary_differential, fiber_basis, jacobian_psi, jacobian_psi_closed_form,
                                  psi_inv, psi_map, sphere_tangent_basis, transport_A, transport_A_inv)
    from .lorentz_core import GroupElement, UnitTangent, boundary_maps, minkowski_inner
    from .lorentz_core import random_group_element, random_unit_tangent

    rep = SuiteReport("transport", seed)
    rng = np.random.default_rng(seed)
    ta, tj = _tol(tols, "algebraic"), _tol(tols, "jacobian")
    for n in ns:
        iso = equi = rt = jac = 0.0
        for _ in range(points):
            rho = random_unit_tangent(rng, n)
            sign = int(rng.choice([-1, 1]))
            _, _, Bm, Bp = boundary_maps(rho)
            nu = (Bp if sign > 0 else Bm).nu
            zeta = rng.standard_normal(n) @ sphere_tangent_basis(nu)
            a = transport_A(rho, sign, zeta)
            iso = max(iso, abs(-minkowski_inner(a, a) - zeta @ zeta) / (zeta @ zeta),
                      abs(minkowski_inner(a, rho.x)), abs(minkowski_inner(a, rho.xi)))
            iso = max(iso, np.abs(transport_A_inv(rho, sign, a) - zeta).max())
            g = random_group_element(rng, n, scale=0.5)
            grho = UnitTangent(g.matrix @ rho.x, g.matrix @ rho.xi)
            N = g.matrix[0] @ np.concatenate(([1.0], nu))
            dL = boundary_differential(g, nu)
            lhs = g.matrix @ a
            rhs = transport_A(grho, sign, N * (dL @ zeta))
            equi = max(equi, np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))
            basis = fiber_basis(rho)
            c = rng.standard_normal(n) * rng.uniform(0.1, 1.5)
            eta = c @ basis.vectors
            y, em, ep = psi_map(rho, eta)
            rho2, eta2 = psi_inv(y, em, ep)
            rt = max(rt, np.abs(rho2.x - rho.x).max(), np.abs(rho2.xi - rho.xi).max(), np.abs(eta2 - eta).max())
            J = jacobian_psi(rho, eta)
            jac = max(jac, abs(J / jacobian_psi_closed_form(n, c @ c) - 1))
        rep.add(f"A+- isometry and inverse n={n}", iso, ta, points)
        rep.add(f"A+- equivariance n={n}", equi, ta * 100, points)
        rep.add(f"Psi round trip n={n}", rt, ta * 1000, points)
        rep.add(f"Jacobian of Psi vs 2^n(1+|eta|^2)^-n n={n}", jac, tj, points)
    return rep


# ---------------------------------------------------------------------------
# horocyclic
# ---------------------------------------------------------------------------

def suite_horocyclic(seed: int = 0, n: int = 2, m: Optional[int] = None, points: int = 20,
                     recovery_points: int = 3, tols=None, **_) -> SuiteReport:
    from .frame_transport import polynomial_boundary_field
    from .horocyclic import (Section, apply_U, apply_X, first_band_state, horocyclic_laplacian,
                             verify_band_recovery)
    from .lorentz_core import random_group_element

    rep = SuiteReport("horocyclic", seed)
    rng = np.random.default_rng(seed)
    th, tc, tr = _tol(tols, "horo"), _tol(tols, "commutator"), _tol(tols, "recovery")
    ms = (0, 1) if m is None else (m,)
    lam = 0.3 + 0.7j
    for mm in ms:
        if n == 1 and mm >= 2:
            continue
        w = polynomial_boundary_field(n, mm, seed=seed + 1, degree=2)
        v = first_band_state(n, mm, lam, w)
        Xv, Uv = apply_X(v), apply_U(v, -1)
        dx = du = 0.0
        for _ in range(points):
            g = random_group_element(rng, n)
            val = v(g)
            s = max(1.0, np.abs(val).max())
            dx = max(dx, np.abs(Xv(g) + lam * val).max() / s)
            du = max(du, np.abs(Uv(g)).max() / s)
        rep.add(f"(X+lam)v = 0 n={n} m={mm}", dx, th, points)
        rep.add(f"U_- v = 0 n={n} m={mm}", du, th, points)
    # commutators on a generic smooth function of the frame
    M = rng.standard_normal((n + 2, n + 2))
    f = Section(n, 0, lambda G, h: np.sin(np.sum(M * G) / 4.0), 0)
    cu = cd = 0.0
    for _ in range(max(3, points // 4)):
        g = random_group_element(rng, n)
        for sign in (1, -1):
            lhs = apply_X(apply_U(f, sign))(g) - apply_U(apply_X(f), sign)(g)
            rhs = sign * apply_U(f, sign)(g)
            cu = max(cu, np.abs(lhs - rhs).max())
            L = horocyclic_laplacian(f, sign)
            lhs = apply_X(L)(g) - horocyclic_laplacian(apply_X(f), sign)(g)
            cd = max(cd, abs(lhs - 2 * sign * L(g)))
    rep.add("[X, U+-] = +-U+-", cu, tc, 2 * max(3, points // 4))
    rep.add("[X, Delta+-] = +-2 Delta+-", cd, tc, 2 * max(3, points // 4))
    rms = (0, 1, 2) if m is None else (m,)
    for mm in rms:
        if (n == 1 and mm >= 2) or mm > 2 or n > 3:
            continue
        w = polynomial_boundary_field(n, mm, seed=seed + 2)
        gs = [random_group_element(rng, n) for _ in range(recovery_points)]
        r = verify_band_recovery(n, mm, 0.3 + 0.7j, w, gs, tol=tr)
        rep.add(f"band recovery U_-^m u = v n={n} m={mm}", r.max_rel_deviation, tr, r.points)
    return rep


# ---------------------------------------------------------------------------
# poisson
# ---------------------------------------------------------------------------

def _delta_checks(rep: SuiteReport, n: int, m: int):
    import sympy as sp

    from .poisson_operator import HalfspaceSection, halfspace_delta_div, halfspace_symbols
    from .sym_tensor import SymTensor, decompose_trace_free, multi_indices, symmetrize, trace

    z = halfspace_symbols(n)
    lam = sp.Symbol("lam")
    bad = 0
    cases = 0
    for J in _index_sets(n, m):
        # trace-free part of the symmetrised delta value, as in the boundary data
        base = symmetrize(_outer_e(n, J))
        A = decompose_trace_free(base)[0] if m >= 2 else base
        amp = z[0] ** (n + lam)
        f = SymTensor(n, m, {K: amp * sp.nsimplify(A.coeffs[K]) for K in multi_indices(n, m)})
        pr = halfspace_delta_div(HalfspaceSection(n, m, f))
        ev = -lam * (n + lam) + m
        ok = all(sp.simplify(pr.lap0.coeffs[K] - ev * f.coeffs[K]) == 0 for K in f.coeffs)
        for part in (pr.lap1, pr.div0, pr.div1):
            if part is not None:
                ok = ok and all(sp.simplify(v) == 0 for v in part.coeffs.values())
        if m >= 2:
            ok = ok and all(sp.simplify(v) == 0 for v in trace(f).coeffs.values())
        bad += not ok
        cases += 1
    rep.add(f"delta image: eigenvalue, divergence, trace n={n} m={m}", bad, 0, cases, exact=True)


def _index_sets(n: int, m: int):
    from itertools import combinations_with_replacement

    return [J for J in combinations_with_replacement(range(1, n + 1), m)][:4]


def _outer_e(n: int, J) -> np.ndarray:
    out = np.ones((), dtype=object)
    for j in J:
        e = np.zeros(n, dtype=object)
        e[:] = 0
        e[j - 1] = 1
        out = np.multiply.outer(out, e)
    return out


def suite_poisson(seed: int = 0, n: Optional[int] = None, m: Optional[int] = None, tols=None,
                  fd: bool = True, **_) -> SuiteReport:
    import sympy as sp

    from .frame_transport import BoundaryTensorField, polynomial_boundary_field
    from .poisson_operator import (halfspace_delta_div, indicial_roots, indicial_roots_exact, poisson_apply,
                                   scalar_laplacian, section_from_poisson, halfspace_symbols)
    from .quadrature import sphere_volume

    rep = SuiteReport("poisson", seed)
    ns = (1, 2, 3) if n is None else (n,)
    for nn in ns:
        for mm in ((0, 1, 2) if m is None else (m,)):
            if nn == 1 and mm >= 2:
                continue
            _delta_checks(rep, nn, mm)
    z = halfspace_symbols(2)
    rep.add("scalar Laplacian of z0^3 (n=2) is -3 z0^3", int(sp.simplify(scalar_laplacian(z[0] ** 3, 2) + 3 * z[0] ** 3) != 0),
            0, 1, exact=True)
    tq = _tol(tols, "quad")
    for nn in ns:
        one = BoundaryTensorField(nn, 0, lambda nu: 1.0, lambda nus: np.ones(len(nus)))
        x = np.zeros(nn + 2)
        x[0] = 1.0
        r = poisson_apply(0.0, 0, one, x)
        rep.add(f"P(1) at the centre = Vol(S^{nn})", abs(r.tensor[()] - sphere_volume(nn)) / sphere_volume(nn), tq, 1)
    # indicial roots
    def rootset(n_, m_, s_, fam=None, k=None):
        return sorted((round(r.lam.real, 12), round(r.lam.imag, 12)) for r in indicial_roots(n_, m_, s_)
                      if (fam is None or r.family == fam) and (k is None or r.k == k))
    dev = 0
    for nn in (1, 2, 3, 4):
        dev += rootset(nn, 0, 0) != [(0.0, 0.0), (float(nn), 0.0)]
        dev += {(r.family, r.k) for r in indicial_roots(nn, 0, 0.5)} != {(0, 0)}
    dev += rootset(3, 1, 3, 1, 0) != [(0.0, 0.0), (3.0, 0.0)]
    closed = 0
    for nn in (1, 2, 3):
        for mm in range(4):
            for s in (0, sp.Rational(3, 4), 5, sp.Rational(37, 3)):
                roots = indicial_roots_exact(nn, mm, s)
                for lam, fam, k, b in roots:
                    partner = [l for l, f, kk, bb in roots if (f, kk) == (fam, k) and bb == -b][0]
                    closed += sp.simplify(nn - lam - partner) != 0
    rep.add("indicial roots match the hand-solved quadratics", dev, 0, 10, exact=True)
    rep.add("indicial roots closed under lam -> n - lam", closed, 0, 3 * 4 * 4, exact=True)
    if fd:
        tp = _tol(tols, "poisson_fd")
        w = polynomial_boundary_field(2, 0, seed=seed + 3, degree=2)
        sec = section_from_poisson(-1.0, w)
        dev = 0.0
        pts = [(0.6, 0.1, -0.2), (0.9, -0.3, 0.2), (1.2, 0.4, 0.1), (0.8, 0.0, 0.5), (1.5, -0.2, -0.4)]
        for p in pts:
            pr = halfspace_delta_div(sec, point=p)
            u = sec.f[()](np.array(p))
            dev = max(dev, abs(pr.lap0[()] - u) / abs(u))
        rep.add("quadrature P_lam w: Delta u = u at lam=-1 (n=2, m=0)", dev, tp, len(pts))
        for lam in (-0.3, 0.5 + 1j):
            for mm in (0, 1):
                w = polynomial_boundary_field(2, mm, seed=seed + 4 + mm, degree=2, complex_=True)
                sec = section_from_poisson(lam, w)
                ev = -lam * (2 + lam) + mm
                dl = dd = 0.0
                for p in pts[:2]:
                    q = np.array(p)
                    pr = halfspace_delta_div(sec, point=p)
                    vals0 = [sec.f[K](q) for K in sec.f.coeffs]
                    got0 = list(pr.lap0.coeffs.values())
                    s = max(abs(v) for v in vals0)
                    if mm == 1:
                        g = sec.g[()](q)
                        s = max(s, abs(g))
                        dl = max(dl, abs(pr.lap1[()] - ev * g) / s)
                        dd = max(dd, abs(pr.div0[()]) / s)
                    dl = max(dl, max(abs(a - ev * b) for a, b in zip(got0, vals0)) / s)
                rep.add(f"quadrature eigenstate lam={lam} m={mm}", dl, tp, 2)
                if mm == 1:
                    rep.add(f"quadrature divergence-free lam={lam} m=1", dd, tp, 2)
    return rep


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def suite_constants(seed: int = 0, tols=None, **_) -> SuiteReport:
    from .poisson_operator import boundary_constant_audit, boundary_leading_constant
    from .resonance_spectrum import (analytic_constants, c00, pairing_constant, pairing_constant_audit,
                                     pairing_constant_literal)

    rep = SuiteReport("constants", seed)
    rep.add("c00(2, 1) = 1/(2 pi)", abs(c00(2, 1) - 1 / (2 * math.pi)), _tol(tols, "c00"), 1)
    to = _tol(tols, "oracle")
    grids = {
        "hadamard": [dict(alpha=1, beta=3), dict(alpha=0.5, beta=2.5), dict(alpha=1.5, beta=0.7 + 0.4j),
                     dict(alpha=2, beta=1.2, chi0=0.5), dict(alpha=0.3 + 0.2j, beta=4)],
        "sphere": [dict(n=n, ell=l) for n in (1, 2, 3, 4) for l in range(4)],
        "twist": [dict(n=n, m=m, r=r) for n in (1, 2, 3) for m in range(4) for r in (0.3, 1.0, 2.5)
                  if not (n == 1 and m >= 2)],
        "main": [dict(n=n, lam=l, m=m) for n in (1, 2, 3) for m in range(3) for l in (1.0, 0.4 + 0.8j)
                 if not (n == 1 and m >= 2)],
    }
    for name, grid in grids.items():
        dev = 0.0
        for p in grid:
            r = analytic_constants(name, seed=seed, **p) if name in ("twist", "main") else analytic_constants(name, **p)
            dev = max(dev, r.deviation)
        rep.add(f"{name} constant vs numerical oracle", dev, to, len(grid))
    d = 0.0
    h = 0.0
    for v in (1.0, 0.4 + 0.8j, 2.5):
        h = max(h, abs(analytic_constants("hadamard", alpha=1, beta=3).value - 0.5))
        d = max(d, abs(analytic_constants("main", n=2, lam=1, m=0).value - math.pi / 2))
    rep.add("hadamard (1, 3) = 1/2 and main (n=2, lam=1) = pi/2", max(h, d), 1e-12, 2)
    # zero set of the finite product factor; the constant itself vanishes there unless Gamma(lam+n/2) has a pole
    bad = cases = 0
    for n in (1, 2, 3, 4):
        for m in range(0, 5):
            zeros = set()
            for lam in range(-n - m - 3, 3):
                aud = boundary_constant_audit(n, m, lam)
                if any(z.startswith("(lambda+") for z in aud["zeros"]):
                    zeros.add(lam)
                    if not aud["poles"]:
                        bad += boundary_leading_constant(n, m, lam) != 0
            bad += zeros != set(range(-n - m + 2, -n + 2))
            cases += 1
    rep.add("boundary constant zero set {-n-m+2..-n+1}", bad, 0, cases, exact=True)
    # pairing constant: stable form vs literal display
    tp = _tol(tols, "pairing")
    dev, cnt = 0.0, 0
    rng = np.random.default_rng(seed)
    for n in (1, 2, 3, 4):
        for m in range(4):
            for ell in range(m // 2 + 1):
                if n == 1 and m >= 2:
                    continue
                for _ in range(3):
                    lam = complex(rng.uniform(-3.3, 2.0), rng.uniform(-3, 3))
                    a, b = pairing_constant(n, m, ell, lam), pairing_constant_literal(n, m, ell, lam)
                    dev = max(dev, abs(a - b) / abs(b))
                    cnt += 1
    rep.add("pairing constant vs literal formula", dev, tp, cnt)
    dev = 0.0
    for n, m, ell in ((1, 0, 0), (2, 0, 0), (2, 1, 0), (3, 2, 1), (3, 1, 0)):
        a = [abs(pairing_constant(n, m, ell, 1j * t)) for t in (10.0, 20.0, 40.0)]
        dev = max(dev, abs(a[2] / a[1] / 2 ** (n / 2 + m) - 1))
    rep.add("pairing constant growth |lam|^(n/2+m)", dev, 0.2, 5)
    bad = 0
    for n in (2, 3):
        for m in range(3):
            for ell in range(m // 2 + 1):
                for lam in (0.3, -0.7 + 2j, 1.5j):
                    aud = pairing_constant_audit(n, m, ell, lam)
                    bad += aud["nonzero"] and pairing_constant(n, m, ell, lam) == 0
    rep.add("pairing constant nonvanishing away from factor zeros", bad, 0, 24, exact=True)
    return rep


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def suite_spectrum(seed: int = 0, tols=None, **_) -> SuiteReport:
    from .resonance_spectrum import (SpectrumEntry as E, Window, admissible_region, dim2_resonances,
                                     enumerate_resonances, exceptional_points, m_loop_bound,
                                     synthetic_weyl_spectrum, weyl)
    from .resonance_spectrum import _roots

    rep = SuiteReport("spectrum", seed)
    rng = np.random.default_rng(seed)
    # golden enumerations
    r = enumerate_resonances(1, [E(0, 1.25, 1)], Window(-2, 0, 2))
    got = sorted((x.lam.real, x.lam.imag, x.m, x.mult) for x in r.resonances)
    want = sorted([(-0.5, 1, 0, 1), (-0.5, -1, 0, 1), (-1.5, 1, 1, 1), (-1.5, -1, 1, 1)])
    bad = got != want
    r = enumerate_resonances(1, [E(0, 0.0, 1)], Window(-0.4, 0, 2))
    bad += [(x.lam, x.mult) for x in r.resonances] != [(0j, 1)]
    r = enumerate_resonances(3, [E(1, 3.0, 2)], Window(-3.5, 0, 1))
    bad += sorted((x.lam.real, x.reason) for x in r.excluded) != [(-3.0, "exceptional"), (-2.0, "exceptional")]
    bad += len(r.resonances) != 0
    rep.add("golden enumerations", bad, 0, 3, exact=True)
    # dim2 vs general enumerator
    bad = 0
    win = Window(-4.2, 0, 60)
    for _ in range(50):
        t = rng.uniform(0.05, 50)
        sigma = 0.25 + t * t
        a = enumerate_resonances(1, [E(0, sigma, 1)], win)
        b = dim2_resonances([complex(0.5, t), complex(0.5, -t)], win)
        ka = sorted((round(x.lam.real, 9), round(x.lam.imag, 9), x.mult) for x in a.resonances)
        kb = sorted((round(x.lam.real, 9), round(x.lam.imag, 9), x.mult) for x in b.resonances)
        bad += ka != kb
    rep.add("dim2 formula agrees with the general enumerator", bad, 0, 50, exact=True)
    # exceptional sets
    bad = 0
    ex3 = exceptional_points(3)
    bad += ex3.first(3) != [-1.5, -2.0, -2.5]
    bad += not ex3.contains(-1.5 + 1e-12)
    bad += ex3.contains(-1.0)
    r1 = exceptional_points(1, 2)
    bad += not all(r1.contains(v) for v in (0, -0.5, -1, -1.5))
    bad += exceptional_points(1, 0).contains(0.0)
    d = dim2_resonances([0.5], Window(-3, 0, 1))
    bad += [x.lam for x in d.resonances] != [complex(-0.5)]
    bad += sorted(x.lam.real for x in d.excluded) != [-2.5, -1.5]
    r = enumerate_resonances(2, [E(2, 4.0 + 1.0, 1), E(0, 0.0, 1)], Window(-6, 0, 3))
    bad += any(x.m == 2 and abs(x.lam + 2) < 1e-9 for x in r.resonances)
    rep.add("exceptional exclusions", bad, 0, 8, exact=True)
    # invariants on random spectra
    rt = 0.0
    region = shift = 0
    cases = 0
    for n in (1, 2, 3):
        spec = [E(0, float(rng.uniform(0, 30)), int(rng.integers(1, 3))) for _ in range(6)]
        if n > 1:
            spec += [E(k, float(k + n - 1 + rng.uniform(0, 20)), 1) for k in (1, 2) for _ in range(3)]
        win = Window(-7.5, 0, 8)
        res = enumerate_resonances(n, spec, win)
        for x in res.resonances:
            k = x.m - 2 * x.ell
            s = -(x.lam + x.m + n / 2) ** 2 + n * n / 4 + k
            rt = max(rt, abs(s - x.source_sigma))
            region += not admissible_region(n, x.m, x.ell, x.lam) or x.lam.real > 1e-12
            cases += 1
        for x in res.resonances:
            partner = [y for y in res.resonances if (y.m, y.ell, y.source_sigma) == (x.m + 2, x.ell + 1, x.source_sigma)]
            target = x.lam - 2
            if win.contains(target) and not exceptional_points(n).contains(target) and target.real > win.re_min + 1e-9:
                ok = any(abs(y.lam - target) < 1e-12 for y in partner) or _dropped(res, x, target)
                shift += not ok
        # emptiness probe one step past the m-loop bound
        bound = m_loop_bound(n, win)
        for e in spec:
            for mm in (bound + 1, bound + 2):
                if (mm - e.m) % 2:
                    continue
                for lam in _roots(n, e.m, mm, e.sigma):
                    shift += win.contains(lam) and bool(admissible_region(n, mm, (mm - e.m) // 2, lam))
    rep.add("round trip sigma = -(lam+m+n/2)^2 + n^2/4 + m - 2l", rt, 1e-10, cases)
    rep.add("region soundness", region, 0, cases, exact=True)
    rep.add("band shifting by -2 and m-loop bound", shift, 0, cases, exact=True)
    # Weyl
    w = weyl(1, 0, 1.0, 1.0)
    dev = max(abs(w.band_coefficient - 1 / (2 * math.pi)), abs(w.eig_coefficient - 1 / (4 * math.pi)))
    w3 = weyl(3, 2, 20, 1)
    bad = (w3.c1, w3.c2) != (6, 5)
    rep.add("Weyl constants n=1, m=0", dev, 1e-15, 2)
    rep.add("c1(3,2) = 6, c2(3,2) = 5", bad, 0, 1, exact=True)
    vol, R = 7.3, 50.0
    spec = synthetic_weyl_spectrum(vol, int(R * R * vol / (4 * math.pi)) + 50, seed)
    res = enumerate_resonances(1, spec, Window(-0.75, 0, R), augment=False)
    count = sum(x.mult for x in res.resonances if x.m == 0 and abs(x.lam.real + 0.5) < 1e-9)
    lead = weyl(1, 0, R, vol).leading_band_count
    rep.add("synthetic Weyl count at R=50", abs(count / lead - 1), 0.1, 1)
    return rep


def _dropped(res, x, target) -> bool:
    return any(abs(e.lam - target) < 1e-9 for e in res.excluded)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "lie": suite_lie,
    "boundary": suite_boundary,
    "tensor": suite_tensor,
    "transport": suite_transport,
    "horocyclic": suite_horocyclic,
    "poisson": suite_poisson,
    "constants": suite_constants,
    "spectrum": suite_spectrum,
}


def run_suite(name: str, seed: int = 0, tols: Optional[dict] = None, **kw) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    t = time.perf_counter()
    rep = SUITES[name](seed=seed, tols=tols, **kw)
    rep.elapsed = time.perf_counter() - t
    return rep


def run_suites(names, seed: int = 0, tols: Optional[dict] = None, **kw) -> list[SuiteReport]:
    return [run_suite(n, seed, tols, **kw) for n in names]
