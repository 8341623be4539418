"""Dense-grid verifier: h profile, G1/G2 bounds, inflection, proof internals."""

import math

import numpy as np
import pytest

from tricomi import (
    TricomiDomain,
    find_inflection,
    proof_internals,
    sweep_grid,
    verify_G1_bounds,
    verify_G2_bounds,
    verify_h_profile,
)
from tricomi.constants import X0_CRITICAL, X3, X4, ledger
from tricomi.verifier import N_of_X, N_of_X_alt

X0_SAMPLES = [-0.2, -0.4, -0.45, -0.55, -0.8, -1.5]


class TestSweepGrid:
    def test_contains_breakpoints(self):
        x0 = -0.9
        led = ledger(x0)
        xs = sweep_grid(x0, 5000)
        for pt in (2.0 * x0, x0, 1.5 * x0, 0.5 * x0, led.x1, led.x2,
                   led.x_plus, led.x_minus, 0.0):
            assert np.min(np.abs(xs - pt)) < 1e-14
        assert np.all(np.diff(xs) > 0)
        assert xs[0] == 2.0 * x0 and xs[-1] == 0.0


class TestHProfile:
    @pytest.mark.parametrize("x0", X0_SAMPLES)
    def test_passes(self, x0):
        rep = verify_h_profile(x0, 20000)
        assert rep.passed, rep.notes
        assert rep.claim_id == "h_profile"

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            verify_h_profile(-0.5, 100)


class TestG1G2Bounds:
    @pytest.mark.parametrize("x0", X0_SAMPLES)
    def test_G1_passes(self, x0):
        rep = verify_G1_bounds(x0, 20000)
        assert rep.passed, rep.notes
        assert rep.worst_margin >= -1e-10 * max(1.0, abs(rep.worst_margin))

    @pytest.mark.parametrize("x0", X0_SAMPLES)
    def test_G2_passes(self, x0):
        rep = verify_G2_bounds(x0, 20000)
        assert rep.passed, rep.notes

    def test_G1_sharp_lower_at_special_abscissa(self):
        # At x0 = -1/sqrt(5) the lower G1 bound is attained on the grid.
        rep = verify_G1_bounds(-1.0 / math.sqrt(5.0), 200000)
        assert "sharp_lower=True" in rep.notes

    def test_G2_sharpness_abscissas(self):
        rep_hi = verify_G2_bounds(X3, 200000)
        rep_lo = verify_G2_bounds(X4, 200000)
        assert "sharp_upper=True" in rep_hi.notes
        assert "sharp_lower=True" in rep_lo.notes

    def test_bounds_not_sharp_generic(self):
        rep = verify_G1_bounds(-0.25, 50000)
        assert "sharp_lower=False" in rep.notes


class TestInflection:
    @pytest.mark.parametrize("x0", [-0.5, -0.9, -2.0])
    def test_root_and_range(self, x0):
        xbar = find_inflection(x0)
        led = ledger(x0)
        assert x0 < xbar < led.x_plus
        X = xbar - x0
        scale = max(1.0, abs(float(N_of_X_alt(x0, led.x_plus - x0))))
        assert abs(float(N_of_X_alt(x0, X))) <= 1e-9 * scale

    def test_curvature_changes_sign_at_inflection(self):
        x0 = -1.0
        dom = TricomiDomain(x0)
        xbar = find_inflection(x0)
        d = 1e-4

        def h2(x):
            return (dom.h(x - d) - 2.0 * dom.h(x) + dom.h(x + d)) / d**2

        assert h2(xbar + 0.05) > 0.0   # convex outside
        assert h2(xbar - 0.05) < 0.0   # concave inside

    def test_first_family_rejected(self):
        with pytest.raises(ValueError):
            find_inflection(-0.3)
        with pytest.raises(ValueError):
            find_inflection(X0_CRITICAL)


class TestDualForms:
    @pytest.mark.parametrize("x0", X0_SAMPLES)
    def test_N_forms_agree(self, x0):
        X = np.linspace(0.0, -x0, 2001)
        n1 = np.asarray(N_of_X(x0, X))
        n2 = np.asarray(N_of_X_alt(x0, X))
        scale = max(1.0, float(np.max(np.abs(n1))))
        assert float(np.max(np.abs(n1 - n2))) <= 1e-10 * scale


class TestProofInternals:
    def test_exactly_one_coordinate(self):
        with pytest.raises(ValueError):
            proof_internals(-0.5)
        with pytest.raises(ValueError):
            proof_internals(-0.5, X=0.1, x=-0.4)

    def test_H_matches_h(self):
        x0 = -0.8
        dom = TricomiDomain(x0)
        # The shifted coordinate X = x - x0 covers the right half [x0, 0].
        for x in (-0.8, -0.5, -0.3):
            out = proof_internals(x0, x=x)
            assert out["H"] == pytest.approx(float(dom.h(x)), rel=1e-13)

    def test_H_prime_matches_divided_difference(self):
        x0 = -0.8
        dom = TricomiDomain(x0)
        d = 1e-7
        for x in (-0.7, -0.4, -0.1):
            out = proof_internals(x0, x=x)
            num = (dom.h(x + d) - dom.h(x - d)) / (2 * d)
            assert out["H_prime"] == pytest.approx(num, rel=1e-6, abs=1e-8)

    def test_S1_sign_matches_G1_slope(self):
        # G1'(x) is a positive multiple of S1(x).
        from tricomi import G1
        x0 = -0.7
        dom = TricomiDomain(x0)
        d = 1e-7
        for x in (-1.2, -0.9, -0.5, -0.2):
            s1 = proof_internals(x0, x=x)["S1"]
            slope = (G1(dom, x + d) - G1(dom, x - d)) / (2 * d)
            if abs(slope) > 1e-4:
                assert math.copysign(1.0, s1) == math.copysign(1.0, slope)

    def test_S2_sign_matches_minus_G2_slope(self):
        # G2'(x) is a negative multiple of S2(x).
        from tricomi import G2
        x0 = -0.7
        dom = TricomiDomain(x0)
        d = 1e-7
        for x in (-1.2, -0.9, -0.5, -0.2):
            s2 = proof_internals(x0, x=x)["S2"]
            slope = (G2(dom, x + d) - G2(dom, x - d)) / (2 * d)
            if abs(slope) > 1e-4:
                assert math.copysign(1.0, s2) == -math.copysign(1.0, slope)

    def test_N_and_alt_present(self):
        out = proof_internals(-0.9, X=0.3)
        assert out["N"] == pytest.approx(out["N_alt"], rel=1e-10, abs=1e-10)
        assert "N1" in out and "R" in out
