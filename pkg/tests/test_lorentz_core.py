import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypres.lorentz_core import (
    AlgebraElement, BoundaryPoint, DomainError, GroupElement, ModelPoint, UnitTangent, algebra_basis,
    basis_element, boost_to, boundary_action, boundary_maps, bracket, commutation_relations, exp_basis,
    frame_at, geodesic_flow, minkowski_inner, minkowski_matrix, model_convert, poisson_kernel, psl2_embed,
    random_boundary_point, random_group_element, random_hyperboloid_point, random_unit_tangent, rho0, xi_pm,
)

seeds = st.integers(0, 2**32 - 1)


class TestAlgebra:
    def test_u1_plus_entries_n1(self):
        U = basis_element(1, "U+", 1).matrix
        expected = np.zeros((3, 3), dtype=int)
        expected[0, 2] = expected[1, 2] = expected[2, 0] = -1
        expected[2, 1] = 1
        assert np.array_equal(U, expected)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_X_has_two_entries(self, n):
        X = basis_element(n, "X").matrix
        assert np.count_nonzero(X) == 2 and X[0, 1] == X[1, 0] == 1

    def test_basis_count_n2(self):
        assert len(algebra_basis(2)) == 10

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_basis_is_exact_isometry(self, n):
        for a in algebra_basis(n):
            assert a.is_exact() and a.is_infinitesimal_isometry()

    def test_bracket_examples(self):
        X, Up, Um = basis_element(2, "X"), basis_element(2, "U+", 1), basis_element(2, "U-", 1)
        assert bracket(X, Up) == Up
        assert bracket(Up, Um) == 2 * X
        assert not np.any(bracket(X, X).matrix)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_commutation_table_exact(self, n):
        for label, lhs, rhs in commutation_relations(n):
            assert np.array_equal(lhs.matrix, rhs.matrix), label
            assert lhs.matrix.dtype.kind == "i"

    def test_mixed_bracket_is_rotation(self):
        lhs = bracket(basis_element(3, "U+", 1), basis_element(3, "U-", 2))
        assert lhs == 2 * basis_element(3, "R", 2, 3)

    def test_invalid_n(self):
        with pytest.raises(DomainError):
            algebra_basis(0)


class TestExponentials:
    def test_exp_X_n1(self):
        t = 0.7
        g = exp_basis(basis_element(1, "X"), t).matrix
        want = np.array([[np.cosh(t), np.sinh(t), 0], [np.sinh(t), np.cosh(t), 0], [0, 0, 1]])
        assert np.allclose(g, want, atol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_U_nilpotent(self, n):
        M = basis_element(n, "U+", 1).matrix
        assert not np.any(M @ M @ M)
        t = 1.3
        g = exp_basis(basis_element(n, "U+", 1), t).matrix
        assert np.allclose(g, np.eye(n + 2) + t * M + t * t * (M @ M) / 2, atol=1e-14)

    def test_exp_zero(self):
        for a in algebra_basis(2):
            assert np.allclose(exp_basis(a, 0.0).matrix, np.eye(4))

    def test_generic_matches_series(self):
        a = basis_element(2, "X") + basis_element(2, "R", 1, 2)
        g = exp_basis(AlgebraElement(a.matrix), 0.4).matrix
        J = minkowski_matrix(2)
        assert np.allclose(g.T @ J @ g, J, atol=1e-13)


class TestFlowAndBoundary:
    def test_flow_identity(self, rng):
        rho = random_unit_tangent(rng, 2)
        r2 = geodesic_flow(0.0, rho)
        assert np.allclose(r2.x, rho.x) and np.allclose(r2.xi, rho.xi)

    @given(seeds, st.floats(-3, 3), st.floats(-3, 3))
    def test_flow_group_law(self, seed, s, t):
        rho = random_unit_tangent(np.random.default_rng(seed), 2)
        a = geodesic_flow(s, geodesic_flow(t, rho))
        b = geodesic_flow(s + t, rho)
        assert np.allclose(a.x, b.x, atol=1e-10 * np.abs(b.x).max())

    def test_base_point_maps(self):
        pm, pp, Bm, Bp = boundary_maps(UnitTangent.base(2))
        assert pm == pytest.approx(1) and pp == pytest.approx(1)
        assert np.allclose(Bp.nu, [1, 0, 0]) and np.allclose(Bm.nu, [-1, 0, 0])

    @given(seeds, st.sampled_from([1, 2, 3]))
    def test_phi_product(self, seed, n):
        pm, pp, Bm, Bp = boundary_maps(random_unit_tangent(np.random.default_rng(seed), n))
        assert pp * pm * (1 - Bp.nu @ Bm.nu) == pytest.approx(2, rel=1e-11)

    @pytest.mark.parametrize("t", [-2.0, 1.0, 5.0])
    def test_flow_compatibility(self, rng, t):
        rho = random_unit_tangent(rng, 3)
        pm, pp, Bm, Bp = boundary_maps(rho)
        pm2, pp2, Bm2, Bp2 = boundary_maps(geodesic_flow(t, rho))
        assert pp2 == pytest.approx(np.exp(t) * pp, rel=1e-11)
        assert pm2 == pytest.approx(np.exp(-t) * pm, rel=1e-11)
        assert np.allclose(Bp2.nu, Bp.nu, atol=1e-11) and np.allclose(Bm2.nu, Bm.nu, atol=1e-11)

    @given(seeds)
    def test_equivariance(self, seed):
        r = np.random.default_rng(seed)
        rho, g = random_unit_tangent(r, 2), random_group_element(r, 2)
        pm, pp, Bm, Bp = boundary_maps(rho)
        grho = UnitTangent(g.matrix @ rho.x, g.matrix @ rho.xi)
        pm2, pp2, Bm2, Bp2 = boundary_maps(grho)
        N, L = boundary_action(g, Bp)
        assert np.allclose(Bp2.nu, L.nu, atol=1e-10)
        assert pp2 == pytest.approx(N * pp, rel=1e-10)

    def test_poisson_kernel_centre(self, rng):
        x = np.array([1.0, 0, 0])
        for _ in range(5):
            assert poisson_kernel(x, random_boundary_point(rng, 1)) == pytest.approx(1.0)

    def test_poisson_kernel_ball(self, rng):
        for _ in range(10):
            y = rng.uniform(-0.5, 0.5, 3)
            nu = random_boundary_point(rng, 2).nu
            x = model_convert(ModelPoint("ball", y), "hyperboloid").coords
            assert poisson_kernel(x, nu) == pytest.approx((1 - y @ y) / np.sum((y - nu) ** 2), rel=1e-12)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_xi_pm(self, rng, sign):
        for _ in range(50):
            x = random_hyperboloid_point(rng, 2)
            nu = random_boundary_point(rng, 2)
            pm, pp, Bm, Bp = boundary_maps(xi_pm(x, nu, sign))
            B, Phi = (Bp, pp) if sign > 0 else (Bm, pm)
            assert np.allclose(B.nu, nu.nu, atol=1e-11)
            assert Phi == pytest.approx(poisson_kernel(x, nu), rel=1e-11)

    def test_boundary_action_examples(self):
        t = 0.8
        N, L = boundary_action(exp_basis(basis_element(2, "X"), t), np.array([1.0, 0, 0]))
        assert N == pytest.approx(np.exp(t)) and np.allclose(L.nu, [1, 0, 0])
        N, L = boundary_action(GroupElement.identity(2), np.array([0.0, 1, 0]))
        assert N == 1 and np.allclose(L.nu, [0, 1, 0])

    @given(seeds)
    def test_poisson_equivariance(self, seed):
        r = np.random.default_rng(seed)
        g, x, nu = random_group_element(r, 3), random_hyperboloid_point(r, 3), random_boundary_point(r, 3)
        N, L = boundary_action(g, nu)
        assert poisson_kernel(g.matrix @ x, L) == pytest.approx(N * poisson_kernel(x, nu), rel=1e-10)


class TestModels:
    def test_conversions(self):
        p = model_convert(ModelPoint("hyperboloid", np.array([1.0, 0, 0])), "ball")
        assert np.allclose(p.coords, 0)
        h = model_convert(ModelPoint("ball", np.zeros(2)), "halfspace")
        assert np.allclose(h.coords, [1, 0])

    @given(seeds)
    def test_round_trip(self, seed):
        x = random_hyperboloid_point(np.random.default_rng(seed), 2)
        p = ModelPoint("hyperboloid", x)
        for tgt in ("ball", "halfspace"):
            back = model_convert(model_convert(p, tgt), "hyperboloid")
            assert np.allclose(back.coords, x, rtol=1e-10)

    def test_rho0_asymptotics(self):
        x0 = 1e3
        x = np.array([x0, np.sqrt(x0 * x0 - 1), 0.0])
        assert abs(rho0(ModelPoint("hyperboloid", x)) - 1 / x0) < 1e-5

    def test_near_boundary_flag(self):
        assert ModelPoint("ball", np.array([1 - 1e-13, 0.0])).near_boundary
        with pytest.raises(DomainError):
            ModelPoint("ball", np.array([1.0, 0.0]))
        with pytest.raises(DomainError):
            ModelPoint("halfspace", np.array([0.0, 1.0]))


class TestGroupHelpers:
    def test_psl2(self):
        assert np.allclose(psl2_embed(1, 0, 0, 1).matrix, np.eye(3))
        t = 0.9
        g = psl2_embed(np.exp(t / 2), 0, 0, np.exp(-t / 2)).matrix
        assert np.allclose(g, exp_basis(basis_element(1, "X"), t).matrix, atol=1e-14)
        with pytest.raises(DomainError):
            psl2_embed(1, 1, 1, 1)

    def test_psl2_homomorphism(self, rng):
        def rand_sl2():
            a, b, c = rng.uniform(0.5, 1.5, 3)
            return a, b, c, (1 + b * c) / a

        for _ in range(20):
            g1, g2 = rand_sl2(), rand_sl2()
            A = np.array(g1).reshape(2, 2) @ np.array(g2).reshape(2, 2)
            lhs = psl2_embed(*A.ravel()).matrix
            rhs = psl2_embed(*g1).matrix @ psl2_embed(*g2).matrix
            assert np.allclose(lhs, rhs, atol=1e-12 * np.abs(rhs).max())

    def test_psl2_algebra_map(self):
        h = 1e-6
        gens = {"X": np.array([[0.5, 0], [0, -0.5]])}
        I = np.eye(2)
        for name, Y in gens.items():
            A, B = I + h * Y, I - h * Y
            D = (psl2_embed(*A.ravel() / np.sqrt(np.linalg.det(A))).matrix
                 - psl2_embed(*B.ravel() / np.sqrt(np.linalg.det(B))).matrix) / (2 * h)
            assert np.allclose(D, basis_element(1, name).matrix, atol=1e-8)
        # the nilpotent generators map to U_1^+ and U_1^-
        for Y, name in ((np.array([[0, 1.0], [0, 0]]), "U+"), (np.array([[0, 0], [1.0, 0]]), "U-")):
            D = (psl2_embed(*(I + h * Y).ravel()).matrix - psl2_embed(*(I - h * Y).ravel()).matrix) / (2 * h)
            assert np.allclose(D, basis_element(1, name, 1).matrix, atol=1e-8)

    def test_frame_at(self, rng):
        assert np.allclose(frame_at(UnitTangent.base(3)).matrix, np.eye(5))
        J = minkowski_matrix(2)
        for _ in range(20):
            rho = random_unit_tangent(rng, 2)
            g = frame_at(rho).matrix
            assert np.allclose(g[:, 0], rho.x, atol=1e-12) and np.allclose(g[:, 1], rho.xi, atol=1e-12)
            assert np.allclose(g.T @ J @ g, J, atol=1e-10)
            assert np.linalg.det(g) == pytest.approx(1.0)

    def test_boost_to(self, rng):
        x = random_hyperboloid_point(rng, 2)
        assert np.allclose(boost_to(x).matrix[:, 0], x)

    def test_unit_tangent_validation(self):
        with pytest.raises(DomainError):
            UnitTangent(np.array([1.0, 0, 0]), np.array([1.0, 0, 0]))
        rho = UnitTangent(np.array([1.0, 0, 0]), np.array([1e-9, 1.0, 0]))
        assert abs(minkowski_inner(rho.x, rho.xi)) < 1e-14

    def test_boundary_point_norm(self):
        with pytest.raises(DomainError):
            BoundaryPoint(np.array([1.0, 1.0]))
        assert np.allclose(BoundaryPoint.normalized([3.0, 4.0]).nu, [0.6, 0.8])

    def test_group_element_check(self):
        with pytest.raises(DomainError):
            GroupElement(np.diag([1.0, 2.0, 1.0]))
