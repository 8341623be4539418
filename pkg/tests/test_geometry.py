"""Geometry of the normal Tricomi domain: curves, membership, dilation flow."""

import math

import numpy as np
import pytest

from tricomi import (
    TricomiDomain,
    boundary_points,
    flow,
    reflected_membership,
    verify_star_shaped,
)


@pytest.fixture(params=[-0.3, -0.5, -1.0, -2.0])
def dom(request):
    return TricomiDomain(request.param)


class TestDomainBasics:
    def test_corners(self, dom):
        x0 = dom.x0
        assert dom.A == (2.0 * x0, 0.0)
        assert dom.B == (0.0, 0.0)
        cx, cy = dom.C
        assert cx == x0
        assert cy == pytest.approx(-((3.0 * abs(x0) / 2.0) ** (2.0 / 3.0)), rel=1e-15)

    def test_characteristics_meet_at_C(self, dom):
        # Both characteristic equations hold at C.
        cx, cy = dom.C
        assert 3.0 * (cx - 2.0 * dom.x0) == pytest.approx(2.0 * (-cy) ** 1.5, rel=1e-12)
        assert 3.0 * cx == pytest.approx(-2.0 * (-cy) ** 1.5, rel=1e-12)

    def test_g_endpoints_and_apex(self, dom):
        assert dom.g(0.0) == 0.0
        assert dom.g(2.0 * dom.x0) == 0.0
        ax, ay = dom.apex
        assert ax == dom.x0
        assert ay == pytest.approx((9.0 * dom.x0**2 / 4.0) ** (1.0 / 3.0), rel=1e-14)

    def test_g_on_normal_curve(self, dom):
        # (x, g(x)) satisfies the normal-curve equation.
        xs = np.linspace(2.0 * dom.x0, 0.0, 101)
        g = np.asarray(dom.g(xs))
        lhs = 9.0 * (xs - dom.x0) ** 2 + 4.0 * g**3
        assert np.allclose(lhs, 9.0 * dom.x0**2, rtol=0, atol=1e-11 * dom.x0**2)

    def test_g_prime_matches_divided_difference(self, dom):
        xs = np.linspace(1.9 * dom.x0, 0.1 * dom.x0, 41)
        d = 1e-7 * abs(dom.x0)
        num = (np.asarray(dom.g(xs + d)) - np.asarray(dom.g(xs - d))) / (2 * d)
        assert np.allclose(dom.g_prime(xs), num, rtol=1e-5, atol=1e-8)

    def test_g_prime_endpoint_raises(self, dom):
        with pytest.raises(ValueError):
            dom.g_prime(0.0)
        with pytest.raises(ValueError):
            dom.g_prime(2.0 * dom.x0)

    def test_h_endpoint_values(self, dom):
        # At both endpoints g = 0 and h reduces to |x - x0| = |x0|.
        assert dom.h(0.0) == pytest.approx(abs(dom.x0), rel=1e-14)
        assert dom.h(2.0 * dom.x0) == pytest.approx(abs(dom.x0), rel=1e-14)
        # At the midpoint the horizontal part vanishes.
        g_mid = dom.g(dom.x0)
        assert dom.h(dom.x0) == pytest.approx((2.0 / 3.0) * g_mid**2, rel=1e-14)

    def test_domain_validation(self):
        for bad in (0.0, 0.5, float("nan"), float("inf")):
            with pytest.raises(ValueError):
                TricomiDomain(bad)

    def test_range_check(self, dom):
        with pytest.raises(ValueError):
            dom.g(0.1)
        with pytest.raises(ValueError):
            dom.g(2.0 * dom.x0 - 0.1)


class TestBoundaryCurves:
    @pytest.mark.parametrize("kind", ["AC", "BC", "Sigma"])
    def test_unit_normals_and_arc_element(self, dom, kind):
        curve = dom.boundary_curve(kind)
        ts = curve.params(257)
        nx, ny = curve.normal(ts)
        assert np.all(np.abs(np.hypot(nx, ny) - 1.0) <= 1e-12)
        # |tangent| = arc element away from parametrization endpoints.
        interior = ts[5:-5] if kind == "Sigma" else ts
        tx, ty = curve.tangent(interior)
        assert np.allclose(np.hypot(tx, ty), curve.arc_element(interior),
                           rtol=1e-12, atol=1e-12)

    def test_orientation_endpoints(self, dom):
        # Counterclockwise: sigma B->A, AC A->C, BC C->B.
        sg = dom.boundary_curve("Sigma")
        ac = dom.boundary_curve("AC")
        bc = dom.boundary_curve("BC")
        for (curve, start, end) in ((sg, dom.B, dom.A), (ac, dom.A, dom.C),
                                    (bc, dom.C, dom.B)):
            a, b = curve.param_range
            xs, ys = curve.position(a)
            xe, ye = curve.position(b)
            assert (float(xs), float(ys)) == pytest.approx(start, abs=1e-12)
            assert (float(xe), float(ye)) == pytest.approx(end, abs=1e-12)

    def test_normals_point_outward(self, dom):
        for kind in ("AC", "BC", "Sigma"):
            curve = dom.boundary_curve(kind)
            for t in curve.params(33)[1:-1]:
                x, y = curve.position(t)
                nx, ny = curve.normal(t)
                eps = 1e-7
                outside = (float(x) + eps * float(nx), float(y) + eps * float(ny))
                inside = (float(x) - eps * float(nx), float(y) - eps * float(ny))
                assert dom.membership_slack(outside) < dom.membership_slack(inside)

    def test_unknown_kind(self, dom):
        with pytest.raises(ValueError):
            dom.boundary_curve("CD")


class TestStarlikeProducts:
    def test_bc_product_vanishes(self, dom):
        # The dilation field is tangent to the characteristic BC.
        curve = dom.boundary_curve("BC")
        for t in curve.params(65):
            assert abs(dom.starlike_product("BC", t)) <= 1e-12

    def test_ac_product_closed_form(self, dom):
        curve = dom.boundary_curve("AC")
        for t in curve.params(65):
            _, y = curve.position(t)
            expect = 6.0 * dom.x0 / math.sqrt(1.0 - float(y))
            assert dom.starlike_product("AC", t) == pytest.approx(expect, rel=1e-12)

    def test_sigma_product_closed_form(self, dom):
        curve = dom.boundary_curve("Sigma")
        for t in curve.params(65):
            x, _ = curve.position(t)
            expect = -3.0 * float(x) * dom.x0 / float(dom.h(float(x)))
            assert dom.starlike_product("Sigma", t) == pytest.approx(
                expect, rel=1e-12, abs=1e-12)

    def test_products_nonpositive(self, dom):
        for kind in ("AC", "BC", "Sigma"):
            curve = dom.boundary_curve(kind)
            assert np.all(np.asarray(
                [dom.starlike_product(kind, t) for t in curve.params(65)]) <= 1e-12)


class TestFlow:
    def test_identity_at_zero(self):
        assert flow((1.25, -3.5), 0.0) == (1.25, -3.5)

    def test_infinite_time_limit(self):
        assert flow((1.0, 1.0), math.inf) == (0.0, 0.0)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            flow((1.0, 1.0), -0.1)

    def test_exact_exponential(self):
        x, y = flow((2.0, -1.0), 0.7)
        assert x == pytest.approx(2.0 * math.exp(-2.1), rel=1e-15)
        assert y == pytest.approx(-math.exp(-1.4), rel=1e-15)

    def test_flow_preserves_characteristic_bc(self, dom):
        # BC is invariant under the dilation flow.
        curve = dom.boundary_curve("BC")
        for t in curve.params(17)[1:-1]:
            x, y = curve.position(t)
            fx, fy = flow((float(x), float(y)), 0.37)
            assert 3.0 * fx == pytest.approx(-2.0 * (-fy) ** 1.5, rel=1e-12)


class TestStarShaped:
    def test_positive(self, dom):
        rep = verify_star_shaped(dom, 120, 30)
        assert rep.passed
        assert rep.worst_margin >= -1e-10

    def test_reflected_negative_control(self, dom):
        rep = verify_star_shaped(dom, 120, 30,
                                 membership=reflected_membership(dom))
        assert not rep.passed

    def test_boundary_points_inside(self, dom):
        for p in boundary_points(dom, 60):
            assert dom.contains(p)

    def test_input_validation(self, dom):
        with pytest.raises(ValueError):
            verify_star_shaped(dom, 1, 30)
        with pytest.raises(ValueError):
            verify_star_shaped(dom, 30, 1)


def test_membership_grid_matches_scalar():
    dom = TricomiDomain(-0.7)
    rng = np.random.default_rng(3)
    X = rng.uniform(2.5 * dom.x0, 0.5, 200)
    Y = rng.uniform(1.5 * dom.y_C, 1.5, 200)
    grid = dom.membership_slack_grid(X, Y)
    scalar = np.array([dom.membership_slack((x, y)) for x, y in zip(X, Y)])
    assert np.allclose(grid, scalar, rtol=0, atol=1e-14)
