import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hypres.lorentz_core import DomainError
from hypres.poisson_operator import PoleError
from hypres.resonance_spectrum import (
    SpectrumEntry as E,
    Window,
    admissible_region,
    analytic_constants,
    c0,
    c00,
    c1,
    c2,
    decay_rate_nu0,
    dim2_resonances,
    enumerate_resonances,
    exceptional_points,
    hodge_augment,
    hodge_shift_m1,
    is_exceptional,
    m_loop_bound,
    pairing_constant,
    pairing_constant_audit,
    pairing_constant_literal,
    resonance_expansion_terms,
    s_from_sigma,
    synthetic_spectrum,
    synthetic_weyl_spectrum,
    weyl,
)


def _key(res):
    return sorted((round(x.lam.real, 9), round(x.lam.imag, 9), x.mult) for x in res.resonances)


class TestValidation:
    def test_lower_bound_violation(self):
        with pytest.raises(DomainError):
            enumerate_resonances(3, [E(1, 2.5, 1)], Window(-3, 0, 1))

    def test_negative_scalar_eigenvalue(self):
        with pytest.raises(DomainError):
            enumerate_resonances(2, [E(0, -0.1, 1)], Window(-3, 0, 1))

    @pytest.mark.parametrize("mult", [0, -1, 1.5])
    def test_bad_multiplicity(self, mult):
        with pytest.raises(DomainError):
            E(0, 1.0, mult).validate(2)

    def test_no_higher_tensors_for_n1(self):
        with pytest.raises(DomainError):
            E(2, 5.0, 1).validate(1)

    def test_nonfinite_sigma(self):
        with pytest.raises(DomainError):
            E(0, float("nan"), 1).validate(2)

    @pytest.mark.parametrize("args", [(float("-inf"), 0, 1), (-1, 0, float("inf")), (1, 0, 1), (-1, 0, -1)])
    def test_bad_window(self, args):
        with pytest.raises(DomainError):
            Window(*args)

    def test_bound_is_inclusive(self):
        E(1, 3.0, 1).validate(3)


class TestEnumerate:
    def test_n1_golden(self):
        r = enumerate_resonances(1, [E(0, 1.25, 1)], Window(-2, 0, 2))
        got = sorted((x.lam.real, x.lam.imag, x.m, x.mult) for x in r.resonances)
        assert got == sorted([(-0.5, 1, 0, 1), (-0.5, -1, 0, 1), (-1.5, 1, 1, 1), (-1.5, -1, 1, 1)])

    def test_n1_golden_matches_surface_formula(self):
        a = enumerate_resonances(1, [E(0, 1.25, 1)], Window(-2, 0, 2))
        b = dim2_resonances([0.5 + 1j, 0.5 - 1j], Window(-2, 0, 2))
        assert _key(a) == _key(b)

    def test_constants_only_zero(self):
        r = enumerate_resonances(1, [E(0, 0.0, 1)], Window(-0.4, 0, 2))
        assert [(x.lam, x.mult) for x in r.resonances] == [(0j, 1)]

    def test_n3_worked_example(self):
        r = enumerate_resonances(3, [E(1, 3.0, 2)], Window(-3.5, 0, 1))
        # both roots -2 and -3 of band m = 1 sit on -3/2 - N_0/2
        assert sorted((x.lam.real, x.m, x.mult, x.reason) for x in r.excluded) == [
            (-3.0, 1, 2, "exceptional"), (-2.0, 1, 2, "exceptional")]
        assert r.resonances == []

    def test_minus_2N_rule(self):
        # n = 5: the constant feeds band m = 2 with root -2 = -m, which is not exceptional
        r = enumerate_resonances(5, [E(0, 0.0, 1)], Window(-3, 0, 1))
        assert not any(x.m == 2 and abs(x.lam + 2) < 1e-9 for x in r.resonances)
        assert any(x.reason == "m=-lambda" and abs(x.lam + 2) < 1e-9 for x in r.excluded)

    def test_empty_window_region(self):
        r = enumerate_resonances(1, [E(0, 1.25, 1)], Window(-0.2, 0, 0.5))
        assert r.resonances == [] and r.excluded == []

    def test_double_root_dead_zone(self):
        # a vanishing discriminant gives one root at -m-n/2, which is always exceptional
        r = enumerate_resonances(2, [E(0, 1.0 - 1e-13, 1)], Window(-1.2, 0, 1))
        assert r.resonances == []
        assert [(x.lam, x.mult, x.reason) for x in r.excluded] == [(-1 + 0j, 1, "exceptional")]

    def test_collision_flag_and_aggregation(self):
        # n = 2: (k=0, m=2, l=1, sigma=5) and (k=2, m=2, l=0, sigma=7) both give -3 +- 2i
        r = enumerate_resonances(2, [E(0, 5.0, 1), E(2, 7.0, 2)], Window(-4, 0, 3))
        hit = [x for x in r.resonances if abs(x.lam - (-3 + 2j)) < 1e-12]
        assert len(hit) == 2 and all("collision" in x.flags for x in hit)
        assert not any("collision" in x.flags for x in r.resonances if x.m == 0)
        assert r.multiplicity_at(-3 + 2j) == 3
        assert sorted(k for _, k in r.aggregated()) == [1, 1, 3, 3]

    def test_vertical_line_flag(self):
        r = enumerate_resonances(2, [E(0, 5.0, 1)], Window(-2, 0, 3))
        assert all("on_vertical_line" in x.flags for x in r.resonances)

    def test_exceptional_adjacent_flag(self):
        n = 2
        lam = -1.5 + 3e-7
        sigma = -(lam + n / 2) ** 2 + n * n / 4
        r = enumerate_resonances(n, [E(0, sigma, 1)], Window(-2, 0, 1))
        near = [x for x in r.resonances if abs(x.lam - lam) < 1e-9]
        assert near and "exceptional_adjacent" in near[0].flags

    def test_sort_order_stable(self):
        spec = synthetic_spectrum(2, 6, seed=4)
        r = enumerate_resonances(2, spec, Window(-5, 0, 10))
        keys = [x.sort_key() for x in r.resonances]
        assert keys == sorted(keys)
        back = enumerate_resonances(2, list(reversed(spec)), Window(-5, 0, 10))
        assert [x.sort_key() for x in back.resonances] == keys

    def test_hodge_augment_n1(self):
        spec = hodge_augment(1, [E(0, 0.0, 1), E(0, 1.25, 2)])
        assert E(1, 2.25, 2) in spec and len(spec) == 3
        assert hodge_augment(1, [E(1, 3.0, 1)]) == [E(1, 3.0, 1)]
        assert hodge_augment(2, [E(0, 1.0, 1)]) == [E(0, 1.0, 1)]


class TestDim2:
    def test_constant_eigenfunction(self):
        r = dim2_resonances([1.0], Window(-0.5, 0, 1))
        assert [x.lam for x in r.resonances] == [0j]

    def test_shifted_band(self):
        r = dim2_resonances([0.5 + 6j], Window(-3, 0, 7))
        assert any(x.m == 2 and x.lam == complex(-2.5, 6) for x in r.resonances)

    def test_half_boundary(self):
        d = dim2_resonances([0.5], Window(-3, 0, 1))
        assert [x.lam for x in d.resonances] == [complex(-0.5)]
        assert sorted(x.lam.real for x in d.excluded) == [-2.5, -1.5]

    @pytest.mark.parametrize("s", [1.5, 0.3 + 1j, -0.1])
    def test_invalid_s(self, s):
        with pytest.raises(DomainError):
            dim2_resonances([s], Window(-1, 0, 1))

    def test_s_from_sigma(self):
        assert s_from_sigma(0.25 + 36) == pytest.approx(0.5 + 6j)
        assert s_from_sigma(0.0) == pytest.approx(1.0)
        assert s_from_sigma(0.21) == pytest.approx(0.7)

    @given(t=st.floats(0.05, 50))
    @settings(max_examples=50)
    def test_agrees_with_general_enumerator(self, t):
        win = Window(-4.2, 0, 60)
        a = enumerate_resonances(1, [E(0, 0.25 + t * t, 1)], win)
        b = dim2_resonances([complex(0.5, t), complex(0.5, -t)], win)
        assert _key(a) == _key(b)


class TestExceptional:
    def test_n3_first_points(self):
        assert exceptional_points(3).first(3) == [-1.5, -2.0, -2.5]

    def test_rm_n1(self):
        r = exceptional_points(1, 2)
        assert all(r.contains(v) for v in (0, -0.5, -1, -1.5))
        assert not exceptional_points(1, 0).contains(0.0)

    def test_tolerance(self):
        assert is_exceptional(3, -1.5 + 1e-12)
        assert not is_exceptional(3, -1.5 + 1e-6)
        assert not is_exceptional(3, -1.0)
        assert not is_exceptional(3, -2.0 + 0.5j)

    def test_describe(self):
        assert exceptional_points(2).describe() == "-1 - (1/2) N_0"


class TestRegion:
    def test_vertical(self):
        assert admissible_region(2, 1, 0, complex(-2, 5)) == {"vertical_line"}

    def test_n3_segment(self):
        assert admissible_region(3, 1, 0, -2.5) == {"real_segment", "vertical_line"}
        assert admissible_region(3, 1, 0, -2.2) == {"real_segment"}
        assert admissible_region(3, 1, 0, -1.5) == frozenset()

    def test_n1_m0(self):
        assert "real_segment" in admissible_region(1, 0, 0, -1.0)
        assert "real_segment" in admissible_region(1, 0, 0, 0.0)
        assert admissible_region(1, 0, 0, 0.1) == frozenset()

    def test_n1_odd_band(self):
        assert "real_segment" in admissible_region(1, 1, 0, -2.0)
        assert admissible_region(1, 1, 0, -0.9) == frozenset()

    def test_off_axis_nonvertical(self):
        assert admissible_region(2, 0, 0, complex(-0.5, 1)) == frozenset()


spectra = st.lists(
    st.tuples(st.integers(0, 2), st.floats(0, 30), st.integers(1, 3)), min_size=1, max_size=6)


class TestEnumerationProperties:
    @given(n=st.integers(1, 3), raw=spectra)
    @settings(max_examples=40)
    def test_round_trip_and_region(self, n, raw):
        spec = [E(k if n > 1 else 0, s + (k + n - 1 if k and n > 1 else 0), mu) for k, s, mu in raw]
        res = enumerate_resonances(n, spec, Window(-7.5, 0, 8))
        for x in res.resonances:
            k = x.m - 2 * x.ell
            s = -(x.lam + x.m + n / 2) ** 2 + n * n / 4 + k
            assert abs(s - x.source_sigma) < 1e-10
            assert admissible_region(n, x.m, x.ell, x.lam)
            assert x.lam.real <= 1e-12

    @given(n=st.integers(1, 3), k=st.integers(0, 2), s=st.floats(0, 30))
    def test_band_shift(self, n, k, s):
        if n == 1:
            k = min(k, 1)
        sigma = s + (k + n - 1 if k else 0)
        win = Window(-40, 0, 20)
        res = enumerate_resonances(n, [E(k, sigma, 1)], win, augment=False)
        allv = res.resonances + res.excluded
        for m in (k, k + 2):
            a = sorted((x.lam for x in allv if x.m == m), key=lambda z: (z.real, z.imag))
            b = sorted((x.lam for x in allv if x.m == m + 2), key=lambda z: (z.real, z.imag))
            shifted = sorted((z - 2 for z in a), key=lambda z: (z.real, z.imag))
            assert len(b) == len(shifted)
            for u, v in zip(b, shifted):
                assert abs(u - v) < 1e-12

    @given(n=st.integers(1, 3), k=st.integers(0, 2), s=st.floats(0, 30), re_min=st.floats(-12, -0.5))
    def test_loop_bound_emptiness(self, n, k, s, re_min):
        from hypres.resonance_spectrum import _roots

        if n == 1:
            k = min(k, 1)
        sigma = s + (k + n - 1 if k else 0)
        win = Window(re_min, 0, 8)
        b = m_loop_bound(n, win)
        for m in range(b + 1, b + 5):
            if (m - k) % 2:
                continue
            for lam in _roots(n, k, m, sigma):
                assert not (win.contains(lam) and admissible_region(n, m, (m - k) // 2, lam))


class TestDecayAndExpansion:
    def test_nu0_example(self):
        assert decay_rate_nu0(2, [E(0, 0.75, 1)]) == pytest.approx(0.5)

    def test_nu0_empty(self):
        assert decay_rate_nu0(2, []) is None
        assert decay_rate_nu0(2, [E(0, 0.0, 1), E(0, 5.0, 1)]) is None

    def test_nu0_minimum(self):
        assert decay_rate_nu0(3, [E(0, 2.0, 1), E(0, 1.25, 1)]) == pytest.approx(0.5)

    def test_higher_bands_ignored_for_small_n(self):
        assert decay_rate_nu0(2, [E(1, 2.0, 1)]) is None

    def test_hodge_shift(self):
        assert hodge_shift_m1(1, 2.0) == 1.0

    def test_expansion_terms(self):
        t = resonance_expansion_terms(2, [E(0, 0.0, 1), E(0, 0.75, 1)])
        assert [(x.lam, x.m) for x in t] == [(-0.5, 0)]
        assert t[0].rate == "exp(-0.5 t)"

    def test_no_expansion_terms(self):
        assert resonance_expansion_terms(2, [E(0, 0.0, 1), E(0, 3.0, 1)]) == []


class TestWeyl:
    def test_dimensions(self):
        assert (c1(3, 2), c2(3, 2)) == (6, 5)
        assert c1(2, 0) == 1 and c2(2, 1) == 2 and c1(3, -1) == 0

    @given(n=st.integers(1, 5), m=st.integers(0, 6))
    def test_c2_is_harmonic_dimension(self, n, m):
        if n == 1:
            assert c2(1, m) == (1 if m <= 1 else 0)
        else:
            assert c2(n, m) == math.comb(m + n - 1, n - 1) - (math.comb(m + n - 3, n - 1) if m >= 2 else 0)

    def test_n1_coefficients(self):
        w = weyl(1, 0, 1.0, 3.0)
        assert w.band_coefficient == pytest.approx(3.0 / (2 * math.pi), rel=1e-15)
        assert w.eig_coefficient == pytest.approx(3.0 / (4 * math.pi), rel=1e-15)
        assert w.band_coefficient == pytest.approx(2 * w.eig_coefficient, rel=1e-15)

    def test_c0(self):
        assert c0(1) == pytest.approx(1 / (4 * math.pi))
        assert c0(2) == pytest.approx((2 * math.sqrt(math.pi)) ** -3 / math.gamma(2.5))

    def test_leading_counts_scale(self):
        w = weyl(3, 2, 20.0, 1.0)
        assert w.leading_band_count == pytest.approx(w.band_coefficient * 20.0 ** 4)
        assert w.leading_eig_count == pytest.approx(c0(3) * 5 * 20.0 ** 4)

    def test_bad_args(self):
        with pytest.raises(DomainError):
            weyl(1, 0, 0.0, 1.0)
        with pytest.raises(DomainError):
            weyl(1, 0, 1.0, -1.0)

    def test_synthetic_count(self):
        vol, R = 7.3, 50.0
        spec = synthetic_weyl_spectrum(vol, int(R * R * vol / (4 * math.pi)) + 50, 0)
        res = enumerate_resonances(1, spec, Window(-0.75, 0, R), augment=False)
        count = sum(x.mult for x in res.resonances if x.m == 0 and abs(x.lam.real + 0.5) < 1e-9)
        assert abs(count / weyl(1, 0, R, vol).leading_band_count - 1) < 0.1


class TestPairing:
    def test_c00_value(self):
        assert abs(c00(2, 1) - 1 / (2 * math.pi)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("lam", [0.3, -0.4 + 1.1j, 2.5j])
    def test_c00_is_pairing_00(self, n, lam):
        a, b = pairing_constant(n, 0, 0, lam), c00(n, lam)
        assert abs(a - b) < 1e-10 * abs(b)

    def test_c00_mpmath(self):
        lam = 0.7 - 0.2j
        want = complex((4 * mp.pi) ** -1.5 * mp.gamma(3 + mp.mpc(lam)) / mp.gamma(1.5 + mp.mpc(lam)))
        assert abs(c00(3, lam) - want) < 1e-13 * abs(want)

    @given(n=st.integers(1, 4), m=st.integers(0, 3), re=st.floats(-3.3, 2.0), im=st.floats(-3, 3))
    @settings(max_examples=40)
    def test_stable_form_matches_literal(self, n, m, re, im):
        assume(not (n == 1 and m >= 2))
        lam = complex(re, im)
        # the literal form has removable singularities on the half-integer grid
        assume(abs(lam - round(2 * re) / 2) > 1e-3)
        for ell in range(m // 2 + 1):
            aud = pairing_constant_audit(n, m, ell, lam)
            assume(not aud["poles"])
            try:
                b = pairing_constant_literal(n, m, ell, lam)
            except ValueError:
                continue
            assume(abs(b) > 1e-200 and math.isfinite(abs(b)))
            try:
                a = pairing_constant(n, m, ell, lam)
            except PoleError:
                continue
            assert abs(a - b) <= 1e-10 * abs(b)

    @pytest.mark.parametrize("n,m,ell", [(1, 0, 0), (2, 0, 0), (2, 1, 0), (3, 2, 1), (3, 1, 0), (4, 2, 0)])
    def test_growth(self, n, m, ell):
        # the asymptotic regime is reached from t = 20 on for the larger (n, m)
        lo, hi = (abs(pairing_constant(n, m, ell, 1j * t)) for t in (20.0, 40.0))
        assert abs(hi / lo / 2 ** (n / 2 + m) - 1) < 0.2

    def test_nonvanishing(self):
        for n in (2, 3):
            for m in range(3):
                for ell in range(m // 2 + 1):
                    for lam in (0.3, -0.7 + 2j, 1.5j):
                        assert pairing_constant_audit(n, m, ell, lam)["nonzero"]
                        assert pairing_constant(n, m, ell, lam) != 0

    def test_factor_zero(self):
        aud = pairing_constant_audit(2, 2, 1, -2.0)
        assert not aud["nonzero"]
        assert pairing_constant(2, 2, 1, -2.0) == 0

    def test_poles(self):
        with pytest.raises(PoleError):
            pairing_constant(2, 0, 0, -2.0)
        with pytest.raises(PoleError):
            c00(2, -3.0)

    def test_bad_ell(self):
        with pytest.raises(DomainError):
            pairing_constant(2, 1, 1, 0.5)


class TestAnalyticConstants:
    def test_hadamard_example(self):
        r = analytic_constants("hadamard", alpha=1, beta=3)
        assert r.value == pytest.approx(0.5, abs=1e-14)
        assert r.deviation < 1e-8

    @pytest.mark.parametrize("alpha,beta,chi0", [(0.5, 2.5, 1.0), (1.5, 0.7 + 0.4j, 1.0), (2, 1.2, 0.5)])
    def test_hadamard_grid(self, alpha, beta, chi0):
        r = analytic_constants("hadamard", alpha=alpha, beta=beta, chi0=chi0)
        assert r.deviation < 1e-8

    def test_hadamard_divergent_flag(self):
        assert analytic_constants("hadamard", alpha=2, beta=1.2).divergent
        assert not analytic_constants("hadamard", alpha=1, beta=3).divergent

    def test_hadamard_mpmath(self):
        # convergent case: int_0^inf t^{a-1}(1+t)^{-b} dt
        a, b = 0.5, 2.5
        # t = u^2 removes the endpoint singularity
        want = float(mp.quad(lambda u: 2 * u ** (2 * a - 1) * (1 + u * u) ** (-b), [0, 1, mp.inf]))
        assert analytic_constants("hadamard", alpha=a, beta=b, oracle=False).value.real == pytest.approx(want, rel=1e-12)

    def test_sphere_example(self):
        r = analytic_constants("sphere", n=3, ell=1)
        assert r.value.real == pytest.approx(4 * math.pi / 3, rel=1e-14)
        assert r.deviation < 1e-8

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_sphere_grid(self, n):
        for ell in range(4):
            assert analytic_constants("sphere", n=n, ell=ell).deviation < 1e-8

    @pytest.mark.parametrize("n,m", [(1, 0), (1, 1), (2, 2), (3, 3)])
    def test_twist(self, n, m):
        for r in (0.3, 1.0, 2.5):
            assert analytic_constants("twist", n=n, m=m, r=r).deviation < 1e-8

    def test_main_example(self):
        r = analytic_constants("main", n=2, lam=1, m=0)
        assert r.value.real == pytest.approx(math.pi / 2, rel=1e-14)
        assert r.deviation < 1e-8

    @pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (3, 2)])
    def test_main_grid(self, n, m):
        assert analytic_constants("main", n=n, lam=0.4 + 0.8j, m=m).deviation < 1e-8

    def test_main_divergent(self):
        r = analytic_constants("main", n=2, lam=-1.5, m=0)
        assert r.divergent and r.oracle is None

    def test_unknown(self):
        with pytest.raises(DomainError):
            analytic_constants("nope")

    def test_no_oracle(self):
        r = analytic_constants("sphere", n=2, ell=1, oracle=False)
        assert r.oracle is None and r.deviation is None
