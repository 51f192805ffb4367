import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypres import kernels
from hypres.lorentz_core import random_hyperboloid_point
from hypres.poisson_operator import tangent_frame
from hypres.quadrature import (QuadSpec, default_order, integrate_adaptive, rotation_to, sphere_rule,
                               sphere_volume)


class TestSphereRule:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_weights_sum_to_volume(self, n):
        pts, wts = sphere_rule(n, 32)
        assert abs(wts.sum() - sphere_volume(n)) < 1e-12 * sphere_volume(n)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_second_moments(self, n):
        pts, wts = sphere_rule(n, 10)
        M = (pts * wts[:, None]).T @ pts
        np.testing.assert_allclose(M, np.eye(n + 1) * sphere_volume(n) / (n + 1), atol=1e-12)

    def test_quartic_moment_s2(self):
        pts, wts = sphere_rule(2, 32)
        assert np.sum(wts * pts[:, 0] ** 4) == pytest.approx(4 * np.pi / 5, rel=1e-13)

    def test_spectral_convergence(self):
        # Gauss-Legendre in the polar angle: geometric error decay, not exactness
        errs = []
        for q in (4, 8, 16):
            pts, wts = sphere_rule(3, q)
            errs.append(abs(wts.sum() - sphere_volume(3)))
        assert errs[1] < 1e-3 * errs[0] and errs[2] < 1e-12

    def test_rotated_axis(self):
        axis = np.array([0.3, -0.4, 0.5])
        pts, _ = sphere_rule(2, 6, axis=axis)
        R = rotation_to(axis)
        np.testing.assert_allclose(R @ np.array([1.0, 0, 0]), axis / np.linalg.norm(axis), atol=1e-14)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)

    def test_rule_is_read_only(self):
        pts, _ = sphere_rule(2, 4)
        with pytest.raises(ValueError):
            pts[0, 0] = 2.0

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            sphere_rule(0, 4)


class TestAdaptive:
    def test_converges(self):
        f = lambda p, w: np.sum(w * np.exp(p[:, 0]))  # noqa: E731
        r = integrate_adaptive(f, 2, QuadSpec(order=4))
        assert r.converged
        assert r.value == pytest.approx(2 * np.pi * (np.e - 1 / np.e), rel=1e-12)

    def test_cap_reports_nonconvergence(self):
        f = lambda p, w: np.sum(w * np.abs(p[:, 1]) ** 0.5)  # noqa: E731
        r = integrate_adaptive(f, 2, QuadSpec(order=4, max_order=8, tol=1e-15))
        assert not r.converged and r.order == 8

    def test_non_adaptive(self):
        r = integrate_adaptive(lambda p, w: w.sum(), 3, QuadSpec(order=5, adaptive=False))
        assert r.order == 5 and r.converged


class TestEnvOrder:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("RESONANCE_QUAD_ORDER", raising=False)
        assert default_order() == 48

    def test_override(self, monkeypatch):
        monkeypatch.setenv("RESONANCE_QUAD_ORDER", "20")
        assert default_order() == 20
        assert QuadSpec().start() == 20

    @pytest.mark.parametrize("raw", ["abc", "1"])
    def test_invalid(self, monkeypatch, raw):
        monkeypatch.setenv("RESONANCE_QUAD_ORDER", raw)
        with pytest.raises(ValueError):
            default_order()


def _backends():
    out = ["python"]
    try:
        kernels.backend_module("cython")
        out.append("cython")
    except ImportError:
        pass
    return out


class TestKernels:
    def test_backend_name(self):
        assert kernels.BACKEND in ("python", "cython")

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            kernels.backend_module("fortran")

    def test_pure_python_switch(self):
        env = dict(os.environ, HYPRES_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "import hypres; print(hypres.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"

    @pytest.mark.skipif(len(_backends()) < 2, reason="compiled extension not built")
    @given(seed=st.integers(0, 2 ** 16), n=st.integers(1, 3), m=st.integers(0, 3), sign=st.sampled_from([-1, 1]))
    def test_backends_agree(self, seed, n, m, sign):
        py, cy = (kernels.backend_module(b) for b in ("python", "cython"))
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(7, n + 1))
        X /= np.linalg.norm(X, axis=1)[:, None]
        XI = rng.normal(size=(7, n + 1))
        XI -= np.sum(XI * X, axis=1)[:, None] * X
        XI /= np.linalg.norm(XI, axis=1)[:, None]
        for a, b in zip(py.boundary_batch(X, XI), cy.boundary_batch(X, XI)):
            np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)
        x = random_hyperboloid_point(rng, n, 1.0)
        F = tangent_frame(x)
        nodes, wts = sphere_rule(n, 4)
        Pp, Tp = py.poisson_transport(x, F, nodes, sign)
        Pc, Tc = cy.poisson_transport(x, F, nodes, sign)
        np.testing.assert_allclose(Pp, Pc, rtol=1e-13)
        np.testing.assert_allclose(Tp, Tc, rtol=1e-12, atol=1e-12)
        W = rng.normal(size=(len(nodes),) + (n + 1,) * m) + 1j * rng.normal(size=(len(nodes),) + (n + 1,) * m)
        kw = wts * Pp ** (n + 0.3)
        np.testing.assert_allclose(py.poisson_accumulate(kw, Tp, W), cy.poisson_accumulate(kw, Tp, W),
                                   rtol=1e-12, atol=1e-12)
