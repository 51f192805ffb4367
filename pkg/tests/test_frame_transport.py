import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypres.frame_transport import (
    EFiberBasis, boundary_differential, equivariance_test_field, eta_twist_C, fiber_basis, flow_push,
    jacobian_psi, jacobian_psi_closed_form, natural_norm, polynomial_boundary_field, psi_inv, psi_map,
    pullback_Q, sphere_tangent_basis, stable_unstable, tangent_projector, transport_A, transport_A_inv,
    twist_identity_sides,
)
from hypres.lorentz_core import (
    DomainError, UnitTangent, boundary_action, boundary_maps, geodesic_flow,
    minkowski_inner, random_group_element, random_unit_tangent,
)

seeds = st.integers(0, 2**32 - 1)


def tangent_at(rng, nu):
    return rng.standard_normal(len(nu) - 1) @ sphere_tangent_basis(nu)


def B(rho, sign):
    pm, pp, Bm, Bp = boundary_maps(rho)
    return (Bp if sign > 0 else Bm).nu


class TestSplitting:
    def test_contraction_and_expansion(self, rng):
        rho = random_unit_tangent(rng, 3)
        sp = stable_unstable(rho)
        for w in sp.Es:
            assert natural_norm(flow_push(rho, 1.0, w)) == pytest.approx(np.exp(-1) * natural_norm(w), rel=1e-12)
        for w in sp.Eu:
            assert natural_norm(flow_push(rho, 1.0, w)) == pytest.approx(np.exp(1) * natural_norm(w), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_span(self, rng, n):
        sp = stable_unstable(random_unit_tangent(rng, n))
        assert np.linalg.matrix_rank(sp.matrix()) == 2 * n + 1

    def test_fiber_basis(self, rng):
        rho = random_unit_tangent(rng, 2)
        V = fiber_basis(rho).vectors
        assert np.abs(minkowski_inner(V, rho.x)).max() < 1e-10
        with pytest.raises(DomainError):
            EFiberBasis(rho, np.vstack([V[0], V[0]]))


class TestTransport:
    @pytest.mark.parametrize("sign", [1, -1])
    def test_base_point(self, sign):
        rho = UnitTangent.base(2)
        zeta = np.array([0.0, 0.3, -0.4])
        assert np.allclose(transport_A(rho, sign, zeta), np.concatenate(([0.0], zeta)))

    @given(seeds, st.sampled_from([1, -1]), st.sampled_from([1, 2, 3]))
    def test_isometry_and_inverse(self, seed, sign, n):
        r = np.random.default_rng(seed)
        rho = random_unit_tangent(r, n)
        zeta = tangent_at(r, B(rho, sign))
        a = transport_A(rho, sign, zeta)
        assert -minkowski_inner(a, a) == pytest.approx(zeta @ zeta, rel=1e-11)
        assert abs(minkowski_inner(a, rho.x)) < 1e-10 and abs(minkowski_inner(a, rho.xi)) < 1e-10
        assert np.allclose(transport_A_inv(rho, sign, a), zeta, atol=1e-12)

    @given(seeds, st.sampled_from([1, -1]))
    def test_equivariance(self, seed, sign):
        r = np.random.default_rng(seed)
        rho, g = random_unit_tangent(r, 2), random_group_element(r, 2, scale=0.5)
        nu = B(rho, sign)
        zeta = tangent_at(r, nu)
        grho = UnitTangent(g.matrix @ rho.x, g.matrix @ rho.xi)
        N, _ = boundary_action(g, nu)
        lhs = transport_A(grho, sign, boundary_differential(g, nu) @ zeta)
        assert np.allclose(lhs, g.matrix @ transport_A(rho, sign, zeta) / N, atol=1e-10)

    def test_differential_matches_finite_difference(self, rng):
        g = random_group_element(rng, 2)
        nu = B(random_unit_tangent(rng, 2), 1)
        zeta = tangent_at(rng, nu)
        h = 1e-6

        def L(v):
            return boundary_action(g, v / np.linalg.norm(v))[1].nu

        fd = (L(nu + h * zeta) - L(nu - h * zeta)) / (2 * h)
        assert np.allclose(boundary_differential(g, nu) @ zeta, fd, atol=1e-7)


class TestPullback:
    def test_scalar(self, rng):
        w = polynomial_boundary_field(2, 0, seed=3)
        rho = random_unit_tangent(rng, 2)
        assert pullback_Q(w, -1, rho)[()] == pytest.approx(w(B(rho, -1)))

    def test_trace_free_preserved(self, rng):
        w = polynomial_boundary_field(3, 2, seed=4)
        for sign in (1, -1):
            u = pullback_Q(w, sign, random_unit_tangent(rng, 3))
            assert u.is_trace_free(tol=1e-12)

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_flow_eigenfunction(self, rng, m):
        lam = 0.4 - 0.3j
        w = polynomial_boundary_field(2, m, seed=5)
        rho = random_unit_tangent(rng, 2)
        basis = fiber_basis(rho)

        def v(t):
            r = geodesic_flow(t, rho)
            # parallel frame along the flow: the fiber vectors are flow invariant
            b = EFiberBasis(r, basis.vectors)
            return boundary_maps(r)[0] ** lam * pullback_Q(w, -1, r, b).to_full().astype(complex)

        h = 1e-5
        Xv = (v(h) - v(-h)) / (2 * h)
        assert np.abs(Xv + lam * v(0)).max() < 1e-6 * max(1.0, np.abs(v(0)).max())

    @pytest.mark.parametrize("m", [1, 2])
    def test_group_equivariance(self, rng, m):
        n, s = 2, 0.3 + 0.5j
        rho, g = random_unit_tangent(rng, n), random_group_element(rng, n, scale=0.5)
        nu = B(rho, -1)
        E = sphere_tangent_basis(nu)
        W = rng.standard_normal((n,) * m)
        W = (W + W.T) / 2 if m == 2 else W
        Wamb = W
        for _ in range(m):
            Wamb = np.tensordot(Wamb, E, axes=([0], [0]))
        w = equivariance_test_field(g, nu, Wamb, s)
        grho = UnitTangent(g.matrix @ rho.x, g.matrix @ rho.xi)
        b = fiber_basis(rho)
        gb = EFiberBasis(grho, (g.matrix @ b.vectors.T).T)
        v1 = boundary_maps(grho)[0] ** s * pullback_Q(w, -1, grho, gb).to_full().astype(complex)
        v0 = boundary_maps(rho)[0] ** s * pullback_Q(w, -1, rho, b).to_full().astype(complex)
        assert np.allclose(v1, v0, atol=1e-8)


class TestTwist:
    def test_examples(self, rng):
        assert np.allclose(eta_twist_C(np.zeros(3)), np.eye(3))
        eta = rng.standard_normal(3)
        s = eta @ eta
        assert np.allclose(eta_twist_C(eta) @ eta, (1 - s) / (1 + s) * eta)
        perp = np.cross(eta, rng.standard_normal(3))
        assert np.allclose(eta_twist_C(eta) @ perp, perp)

    @pytest.mark.parametrize("m", [1, 2])
    def test_twist_identity(self, rng, m):
        for _ in range(10):
            rho = random_unit_tangent(rng, 2)
            eta = rng.standard_normal(2) @ fiber_basis(rho).vectors
            Sp = tangent_at(rng, B(rho, 1))
            Sm = tangent_at(rng, B(rho, -1))
            if m == 2:
                Sp, Sm = np.outer(Sp, Sp), np.outer(Sm, tangent_at(rng, B(rho, -1)))
            lhs, rhs = twist_identity_sides(rho, eta, Sp, Sm)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


class TestPsi:
    def test_zero(self, rng):
        rho = random_unit_tangent(rng, 2)
        y, em, ep = psi_map(rho, np.zeros(4))
        assert np.allclose(y, rho.x) and np.allclose(ep.xi, rho.xi) and np.allclose(em.xi, rho.xi)

    @given(seeds, st.sampled_from([1, 2, 3]), st.floats(0.0, 5.0))
    def test_round_trip(self, seed, n, size):
        r = np.random.default_rng(seed)
        rho = random_unit_tangent(r, n)
        c = r.standard_normal(n)
        c *= size / max(np.linalg.norm(c), 1e-12)
        eta = c @ fiber_basis(rho).vectors
        y, em, ep = psi_map(rho, eta)
        rho2, eta2 = psi_inv(y, em, ep)
        assert np.allclose(rho2.x, rho.x, atol=1e-11 * np.abs(rho.x).max() * (1 + size) ** 2)
        assert np.allclose(eta2, eta, atol=1e-10 * (1 + size) ** 3)

    @given(seeds, st.sampled_from([1, 2, 3]))
    def test_boundary_relations(self, seed, n):
        r = np.random.default_rng(seed)
        rho = random_unit_tangent(r, n)
        c = r.standard_normal(n)
        s = c @ c
        y, em, ep = psi_map(rho, c @ fiber_basis(rho).vectors)
        pm, pp, Bm, Bp = boundary_maps(rho)
        assert np.allclose(boundary_maps(ep)[3].nu, Bp.nu, atol=1e-10)
        assert np.allclose(boundary_maps(em)[2].nu, Bm.nu, atol=1e-10)
        assert boundary_maps(ep)[1] == pytest.approx(pp / np.sqrt(1 + s), rel=1e-10)
        assert boundary_maps(em)[0] == pytest.approx(pm / np.sqrt(1 + s), rel=1e-10)
        d = ep.xi + em.xi
        assert np.sqrt(-minkowski_inner(d, d)) == pytest.approx(2 / np.sqrt(1 + s), rel=1e-10)

    def test_singular_rejected(self, rng):
        rho = random_unit_tangent(rng, 2)
        with pytest.raises(DomainError):
            psi_inv(rho.x, rho, UnitTangent(rho.x, -rho.xi))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_jacobian(self, rng, n):
        assert jacobian_psi_closed_form(n, 0.0) == 2 ** n
        assert jacobian_psi_closed_form(n, 1.0) == pytest.approx(1.0)
        for _ in range(5):
            rho = random_unit_tangent(rng, n)
            c = rng.standard_normal(n)
            J = jacobian_psi(rho, c @ fiber_basis(rho).vectors)
            assert J == pytest.approx(jacobian_psi_closed_form(n, c @ c), rel=1e-5)


def test_tangent_projector(rng):
    nu = rng.standard_normal(3)
    nu /= np.linalg.norm(nu)
    P = tangent_projector(nu)
    assert np.allclose(P @ nu, 0) and np.allclose(P @ P, P)
