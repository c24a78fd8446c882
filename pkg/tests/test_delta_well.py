import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson
from scipy.special import lambertw

from dwnls.delta_well import (
    DeltaWellParams,
    eigenfunction,
    eigenfunction_derivative,
    lambert_w0,
    odd_state_exists,
    resolvent_kernel,
    shooting_energies,
    spectrum,
    splitting,
    splitting_asymptote,
)
from dwnls.errors import DomainError, SingularPointError

from oracles import delta_grid_doublet

BASE = DeltaWellParams(a=1.0, alpha=-2.0)


class TestLambert:
    @pytest.mark.parametrize("x,w", [(0.0, 0.0), (math.e, 1.0), (-1 / math.e, -1.0)])
    def test_special_values(self, x, w):
        assert lambert_w0(x) == pytest.approx(w, abs=1e-15)

    def test_residual_on_log_grid(self):
        xs = np.concatenate((-1 / math.e + np.logspace(-12, math.log10(1 / math.e), 400), np.logspace(-12, 6, 400)))
        for x in xs:
            w = lambert_w0(float(x))
            assert abs(w * math.exp(w) - x) <= 1e-14 * max(1.0, abs(x))

    @given(st.floats(-1 / math.e + 1e-12, 1e6))
    def test_matches_scipy(self, x):
        assert lambert_w0(x) == pytest.approx(lambertw(x).real, rel=1e-13, abs=1e-13)

    @pytest.mark.parametrize("x", [-0.5, -1.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            lambert_w0(x)


class TestSpectrum:
    def test_reference_values(self):
        sp = spectrum(BASE)
        assert sp.e1 == pytest.approx(-1.2296, abs=1e-4)
        assert sp.e2 == pytest.approx(-0.6349, abs=1e-4)

    def test_single_eigenvalue(self):
        sp = spectrum(DeltaWellParams(a=0.4, alpha=-2.0))
        assert sp.e2 is None and sp.c2 is None and sp.e1 < 0

    def test_regime_switch_at_threshold(self):
        edge = 0.5
        assert not odd_state_exists(DeltaWellParams(a=edge, alpha=-2.0))
        assert spectrum(DeltaWellParams(a=math.nextafter(edge, 1.0), alpha=-2.0)).e2 is not None

    @given(st.floats(0.05, 20), st.floats(-60, -0.05))
    def test_ordering(self, a, alpha):
        sp = spectrum(DeltaWellParams(a, alpha))
        assert sp.e1 < 0
        assert sp.e1 == pytest.approx(-sp.kappa1**2)
        if sp.e2 is not None:
            # beyond |a alpha| ~ 37 the gap is below one ulp of e1, so only the
            # Lambert-difference form of the splitting still sees it
            assert sp.e1 <= sp.e2 < 0
            if a * alpha > -700:
                assert splitting(DeltaWellParams(a, alpha)) > 0
            if sp.e2 - sp.e1 > 1e-12 * abs(sp.e1):
                assert splitting(DeltaWellParams(a, alpha)) == pytest.approx(sp.e2 - sp.e1, rel=1e-6)

    def test_normalization_matches_printed_formula(self):
        sp = spectrum(BASE)
        k, al, a = sp.kappa1, BASE.alpha, BASE.a
        assert sp.c1 == pytest.approx(k / math.sqrt((2 * k + al) * (2 * k * a + a * al + 1)), rel=1e-13)
        k = sp.kappa2
        assert sp.c2 == pytest.approx(k / math.sqrt(-(2 * k + al) * (2 * k * a + a * al + 1)), rel=1e-12)

    def test_strong_separation_is_finite(self):
        sp = spectrum(DeltaWellParams(a=1.0, alpha=-71.0))
        assert np.isfinite([sp.c1, sp.c2]).all()
        assert 0 < splitting(DeltaWellParams(a=1.0, alpha=-71.0)) < 1e-25

    def test_shooting_agreement(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            alpha = -rng.uniform(0.5, 8.0)
            a = rng.uniform(1.05, 4.0) / -alpha
            sp = spectrum(DeltaWellParams(a, alpha))
            shot = shooting_energies(DeltaWellParams(a, alpha))
            assert len(shot) == 2
            assert shot[0] == pytest.approx(sp.e1, abs=1e-10, rel=1e-10)
            assert shot[1] == pytest.approx(sp.e2, abs=1e-10, rel=1e-10)

    def test_shooting_single_state(self):
        p = DeltaWellParams(a=0.4, alpha=-2.0)
        shot = shooting_energies(p)
        assert len(shot) == 1 and shot[0] == pytest.approx(spectrum(p).e1, rel=1e-10)

    @pytest.mark.parametrize("a,alpha", [(1.0, -2.0), (0.7, -3.0), (2.0, -1.5)])
    def test_grid_diagonalization(self, a, alpha):
        p = DeltaWellParams(a, alpha)
        sp = spectrum(p)
        e1, e2 = delta_grid_doublet(p)
        assert e1 == pytest.approx(sp.e1, abs=1e-6)
        assert e2 == pytest.approx(sp.e2, abs=1e-6)


class TestEigenfunction:
    @pytest.mark.parametrize("j,parity", [(1, 1.0), (2, -1.0)])
    def test_parity(self, j, parity):
        x = np.array([0.1, 0.7, 2.3])
        assert np.max(np.abs(eigenfunction(BASE, j, -x) - parity * eigenfunction(BASE, j, x))) < 1e-12

    @pytest.mark.parametrize("j", [1, 2])
    def test_normalization(self, j):
        kappa = spectrum(BASE).kappa1 if j == 1 else spectrum(BASE).kappa2
        x = np.linspace(-30 / kappa, 30 / kappa, 600001)
        assert np.trapezoid(eigenfunction(BASE, j, x) ** 2, x) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("j", [1, 2])
    @pytest.mark.parametrize("centre", [-1.0, 1.0])
    def test_jump_condition(self, j, centre):
        x = np.array([centre])
        jump = eigenfunction_derivative(BASE, j, x, +1) - eigenfunction_derivative(BASE, j, x, -1)
        assert jump[0] / eigenfunction(BASE, j, x)[0] == pytest.approx(BASE.alpha, abs=1e-8)

    @pytest.mark.parametrize("j", [1, 2])
    def test_jump_condition_by_differencing(self, j):
        a, h = BASE.a, 1e-3

        def one_sided(side):
            f = lambda t: float(eigenfunction(BASE, j, np.array([a + side * t]))[0])  # noqa: E731
            d = lambda t: side * (-3 * f(0) + 4 * f(t) - f(2 * t)) / (2 * t)  # noqa: E731
            return (4 * d(h / 2) - d(h)) / 3

        ratio = (one_sided(+1) - one_sided(-1)) / float(eigenfunction(BASE, j, np.array([a]))[0])
        assert ratio == pytest.approx(BASE.alpha, abs=1e-6)

    def test_continuity(self):
        for j in (1, 2):
            for c in (-1.0, 1.0):
                v = eigenfunction(BASE, j, np.array([c - 1e-12, c, c + 1e-12]))
                assert np.ptp(v) < 1e-10

    def test_extreme_separation(self):
        p = DeltaWellParams(a=30.0, alpha=-60.0)
        assert spectrum(p).c1 == math.inf
        kappa = spectrum(p).kappa1
        # the mass sits within a few 1/kappa of the centres; the rest is below e^-60
        edges = ((-31, -30), (-30, -29), (29, 30), (30, 31))
        pieces = [np.linspace(lo, hi, 20001) for lo, hi in edges]
        for j, parity in ((1, 1.0), (2, -1.0)):
            vals = [eigenfunction(p, j, x) for x in pieces]
            assert all(np.isfinite(v).all() for v in vals)
            assert sum(simpson(v**2, x=x) for v, x in zip(vals, pieces)) == pytest.approx(1.0, abs=1e-8)
            assert vals[3][5] == pytest.approx(parity * vals[0][-6], rel=1e-12)

    def test_missing_state(self):
        with pytest.raises(DomainError):
            eigenfunction(DeltaWellParams(0.4, -2.0), 2, np.zeros(1))
        with pytest.raises(DomainError):
            eigenfunction(BASE, 3, np.zeros(1))

    def test_ground_state_positive(self):
        assert np.all(eigenfunction(BASE, 1, np.linspace(-10, 10, 201)) > 0)


class TestSplitting:
    def test_reference_value(self):
        assert splitting(BASE) == pytest.approx(0.5947, abs=1e-4)
        sp = spectrum(BASE)
        assert splitting(BASE) == pytest.approx(sp.e2 - sp.e1, rel=1e-13)

    def test_physical_units(self):
        p = DeltaWellParams.semiclassical(1.0, -2.0, 1.0)
        assert splitting(p) == pytest.approx(splitting(BASE), rel=1e-14)

    def test_ratio_converges(self):
        hbars = [0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2]
        ratios = [splitting(p) / splitting_asymptote(p) for p in (DeltaWellParams.semiclassical(1.0, -1.0, h) for h in hbars)]
        changes = [abs(ratios[i + 1] / ratios[i] - 1) for i in range(len(ratios) - 1)]
        assert changes[-1] < 0.2
        assert all(changes[i + 1] <= changes[i] for i in range(len(changes) - 1))

    def test_positive_and_tiny(self):
        p = DeltaWellParams.semiclassical(1.0, -1.0, 0.1)
        s = splitting(p)
        assert 0 < s < 1e-30
        assert s / splitting_asymptote(p) == pytest.approx(1.0, rel=0.05)

    def test_missing_doublet(self):
        with pytest.raises(DomainError):
            splitting(DeltaWellParams(0.4, -2.0))


class TestResolvent:
    def test_weak_coupling_limit(self):
        x, y, k = np.array([0.3, -1.7]), np.array([2.0, 0.1]), 0.4 + 0.9j
        free = 1j / (2 * k) * np.exp(1j * k * np.abs(x - y))
        for al, tol in [(-1e-4, 1e-3), (-1e-7, 1e-6)]:
            diff = resolvent_kernel(DeltaWellParams(0.2, al), k, x, y) - free
            assert np.max(np.abs(diff)) < tol

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        x, y = rng.uniform(-4, 4, 20), rng.uniform(-4, 4, 20)
        k = 0.3 + 1.1j
        K = resolvent_kernel(BASE, k, x, y)
        assert np.max(np.abs(K - resolvent_kernel(BASE, k, y, x))) < 1e-14

    @pytest.mark.parametrize("centre", [-1.0, 1.0])
    def test_jump_condition(self, centre):
        k, h, y = 0.5 + 0.8j, 1e-6, np.array([0.37])
        K = lambda x: resolvent_kernel(BASE, k, np.array([x]), y)[0]  # noqa: E731
        right = (K(centre + h) - K(centre)) / h
        left = (K(centre) - K(centre - h)) / h
        assert abs((right - left) / K(centre) - BASE.alpha) < 1e-4

    def test_action_on_gaussian(self):
        y = np.linspace(-12, 12, 48001)
        src = np.exp(-y**2)
        hx = 1e-3
        xs = np.array([-2.5, -0.4, 0.3, 0.6, 2.0])
        residuals = []
        for x0 in xs:
            u = [np.trapezoid(resolvent_kernel(BASE, 1j, np.full_like(y, x), y) * src, y) for x in (x0 - hx, x0, x0 + hx)]
            lhs = -(u[2] - 2 * u[1] + u[0]) / hx**2 + u[1]
            residuals.append(abs(lhs - math.exp(-x0**2)) / math.exp(-x0**2))
        assert max(residuals) < 1e-4

    def test_pole(self):
        sp = spectrum(BASE)
        with pytest.raises(SingularPointError):
            resolvent_kernel(BASE, 1j * sp.kappa1, np.zeros(1), np.zeros(1))

    def test_upper_half_plane_only(self):
        with pytest.raises(DomainError):
            resolvent_kernel(BASE, 1.0 + 0j, np.zeros(1), np.zeros(1))


def test_params_validation():
    with pytest.raises(DomainError):
        DeltaWellParams(a=1.0, alpha=0.5)
    with pytest.raises(DomainError):
        DeltaWellParams(a=0.0, alpha=-1.0)
    p = DeltaWellParams.semiclassical(1.0, -0.5, 0.5)
    assert p.alpha == pytest.approx(-2.0)
