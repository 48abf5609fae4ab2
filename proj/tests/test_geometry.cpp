#include <gtest/gtest.h>

#include "potkern/geometry.hpp"
#include "potkern/reference.hpp"

using namespace potkern;

namespace {

Domain unit_disc() { return Domain({Curve::circle(0.0, 1.0)}, 0); }
Domain annulus(double r) { return Domain({Curve::circle(0.0, 1.0), Curve::circle(0.0, r, -1)}, 0); }

void expect_near(cplx a, cplx b, double tol) { EXPECT_LT(std::abs(a - b), tol) << a << " vs " << b; }

} // namespace

TEST(CurveEval, UnitCircleStart) {
    const auto p = curve_eval(Curve::circle(0.0, 1.0), 0.0);
    expect_near(p.z, 1.0, 1e-15);
    expect_near(p.dz, cplx(0.0, two_pi), 1e-14);
}

TEST(CurveEval, UnitCircleQuarter) {
    const auto p = curve_eval(Curve::circle(0.0, 1.0), 0.25);
    expect_near(p.z, I, 1e-15);
    expect_near(p.dz, -two_pi, 1e-14);
}

TEST(CurveEval, ClockwiseHalfRadius) {
    const auto p = curve_eval(Curve::circle(0.0, 0.5, -1), 0.0);
    expect_near(p.z, 0.5, 1e-15);
    expect_near(p.dz, cplx(0.0, -pi), 1e-14);
}

TEST(CurveEval, PeriodWraps) {
    const Curve c = Curve::trig({{1, 1.0}, {-2, cplx(0.1, 0.05)}});
    const auto a = c.eval(0.3), b = c.eval(2.3), d = c.eval(-0.7);
    expect_near(a.z, b.z, 1e-13);
    expect_near(a.z, d.z, 1e-13);
}

TEST(CurveEval, TrigDerivativesMatchFiniteDifferences) {
    const Curve c = Curve::trig({{1, 1.0}, {-1, 0.2}, {3, cplx(0.0, 0.03)}});
    const double t = 0.37, h = 1e-5;
    const auto p = c.eval(t);
    expect_near(p.dz, (c.eval(t + h).z - c.eval(t - h).z) / (2 * h), 1e-7);
    expect_near(p.d2z, (c.eval(t + h).dz - c.eval(t - h).dz) / (2 * h), 1e-5);
}

TEST(BuildGrid, FourNodeDisc) {
    const BoundaryGrid g = build_grid(unit_disc(), 4);
    const cplx expected[] = {1.0, I, -1.0, -I};
    for (int k = 0; k < 4; ++k) {
        expect_near(g.nodes()[k], expected[k], 1e-15);
        EXPECT_NEAR(g.weights()[k], two_pi / 4, 1e-15);
    }
}

TEST(BuildGrid, UnitCircleTangent) {
    const BoundaryGrid g = build_grid(unit_disc(), 32);
    for (Eigen::Index k = 0; k < g.size(); ++k) expect_near(g.tangents()[k], I * g.nodes()[k], 1e-14);
}

TEST(BuildGrid, InnerClockwiseTangent) {
    const BoundaryGrid g = build_grid(annulus(0.5), 32);
    for (Eigen::Index k = g.offset(0); k < g.offset(1); ++k) {
        const double t = g.param(k);
        expect_near(g.tangents()[k], -I * std::polar(1.0, -two_pi * t), 1e-14);
    }
}

TEST(BuildGrid, HolesFirstOuterLast) {
    const BoundaryGrid g = build_grid(annulus(0.5), 16);
    EXPECT_EQ(g.curve_count(), 2);
    EXPECT_NEAR(std::abs(g.nodes()[0]), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(g.nodes()[g.offset(1)]), 1.0, 1e-15);
    EXPECT_EQ(g.domain().input_index(1), 0);
}

TEST(BuildGrid, CircleLengthIsSpectral) {
    const BoundaryGrid g = build_grid(Domain({Curve::circle(cplx(0.2, 0.1), 0.7)}, 0), 16);
    EXPECT_NEAR(g.weights().sum(), two_pi * 0.7, 1e-13);
}

TEST(BuildGrid, QuadratureExactOnMonomials) {
    const int n = 32;
    const BoundaryGrid g = build_grid(unit_disc(), n);
    for (int m = -n / 2 + 1; m < n / 2; ++m) {
        cplx s = 0.0;
        for (Eigen::Index k = 0; k < g.size(); ++k) s += g.weights()[k] * std::pow(g.nodes()[k], m);
        if (m == 0)
            EXPECT_NEAR(std::abs(s - two_pi), 0.0, 1e-13);
        else
            EXPECT_LT(std::abs(s), 1e-13) << "m=" << m;
    }
}

TEST(BuildGrid, UnitTangentsHaveUnitLength) {
    const BoundaryGrid g = build_grid(reference::fixture("trig2").domain, 64);
    EXPECT_LT((g.tangents().cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-15);
}

TEST(BuildGrid, RejectsOddResolution) {
    try {
        build_grid(unit_disc(), 15);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.code(), "bad-resolution");
    }
}

TEST(BuildGrid, DegenerateCurveNamesCurve) {
    // z(t) = e^{2 pi i t} + (1/2) e^{4 pi i t} has z' = 0 at t = 1/2.
    const Domain d({Curve::circle(0.0, 5.0), Curve::trig({{0, 0.0}, {-1, 1.0}, {-2, 0.5}})}, 0);
    try {
        build_grid(d, 32);
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), "degenerate-curve");
        ASSERT_TRUE(e.curve().has_value());
        EXPECT_EQ(*e.curve(), 1);
    }
}

TEST(BuildGrid, OverlappingCurves) {
    const Domain d({Curve::circle(0.0, 1.0), Curve::circle(0.8, 0.4, -1)}, 0);
    try {
        build_grid(d, 64);
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), "curves-intersect");
    }
}

TEST(BuildGrid, WrongOrientation) {
    const Domain d({Curve::circle(0.0, 1.0), Curve::circle(0.0, 0.5, 1)}, 0);
    try {
        build_grid(d, 32);
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), "orientation");
    }
}

TEST(BuildGrid, HoleOutsideOuter) {
    const Domain d({Curve::circle(0.0, 1.0), Curve::circle(3.0, 0.5, -1)}, 0);
    EXPECT_THROW(build_grid(d, 32), GeometryError);
}

TEST(BuildGrid, NestedHoles) {
    const Domain d({Curve::circle(0.0, 1.0), Curve::circle(0.0, 0.5, -1), Curve::circle(0.0, 0.2, -1)}, 0);
    EXPECT_THROW(build_grid(d, 32), GeometryError);
}

TEST(BuildGrid, SelfIntersectingCurve) {
    // Figure-eight-like lobe crossing.
    const Domain d({Curve::trig({{1, 1.0}, {-3, 0.9}})}, 0);
    EXPECT_THROW(build_grid(d, 64), GeometryError);
}

TEST(SpectralDerivative, Sine) {
    const BoundaryGrid g = build_grid(unit_disc(), 16);
    CVector s(g.size()), expected(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        s[k] = std::sin(two_pi * g.param(k));
        expected[k] = two_pi * std::cos(two_pi * g.param(k));
    }
    EXPECT_LT(max_abs(CVector(spectral_derivative(s, g) - expected)), 1e-12);
}

TEST(SpectralDerivative, Constant) {
    const BoundaryGrid g = build_grid(annulus(0.5), 16);
    EXPECT_LT(max_abs(spectral_derivative(CVector::Constant(g.size(), cplx(2.0, -1.0)), g)), 1e-13);
}

TEST(SpectralDerivative, Exponential) {
    const BoundaryGrid g = build_grid(unit_disc(), 16);
    CVector s(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) s[k] = std::polar(1.0, two_pi * g.param(k));
    EXPECT_LT(max_abs(CVector(spectral_derivative(s, g) - two_pi * I * s)), 1e-12);
}

TEST(SpectralDerivative, PerCurveBandLimited) {
    const BoundaryGrid g = build_grid(annulus(0.5), 32);
    CVector s(g.size()), expected(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double t = g.param(k);
        const int m = g.curve_of(k) == 0 ? 3 : -5;
        s[k] = std::polar(1.0, two_pi * m * t) + 0.25 * std::cos(two_pi * 2 * t);
        expected[k] = two_pi * I * double(m) * std::polar(1.0, two_pi * m * t) - 0.25 * two_pi * 2 * std::sin(two_pi * 2 * t);
    }
    EXPECT_LT(max_abs(CVector(spectral_derivative(s, g) - expected)), 1e-11);
}

TEST(SpectralAntiderivative, InvertsDerivative) {
    const BoundaryGrid g = build_grid(unit_disc(), 32);
    CVector s(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k)
        s[k] = std::polar(1.0, two_pi * 2 * g.param(k)) + cplx(0.0, 0.3) * std::cos(two_pi * 5 * g.param(k));
    const CVector back = spectral_antiderivative(spectral_derivative(s, g), g);
    // Equal up to the mean.
    EXPECT_LT(max_abs(CVector(back.array() - back.mean() - (s.array() - s.mean()))), 1e-13);
}

TEST(Contains, Annulus) {
    const Domain d = annulus(0.5);
    EXPECT_TRUE(contains(d, 0.7));
    EXPECT_FALSE(contains(d, 0.2));
    EXPECT_FALSE(contains(d, 2.0));
}

TEST(Contains, OnBoundaryThrows) {
    try {
        contains(annulus(0.5), cplx(0.0, 0.5));
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_EQ(e.code(), "on-boundary");
    }
}

TEST(Contains, CloseToBoundaryBothSides) {
    const BoundaryGrid g = build_grid(annulus(0.5), 64);
    EXPECT_TRUE(contains(g, std::polar(1.0 - 1e-6, 0.3)));
    EXPECT_FALSE(contains(g, std::polar(1.0 + 1e-6, 0.3)));
    EXPECT_TRUE(contains(g, std::polar(0.5 + 1e-6, 2.0)));
    EXPECT_FALSE(contains(g, std::polar(0.5 - 1e-6, 2.0)));
}

TEST(Orientation, WindingNumbers) {
    const BoundaryGrid g = build_grid(annulus(0.5), 256);
    auto wind = [&g](cplx p) { return g.contour_integral(g.sample([p](cplx z) { return 1.0 / (z - p); })) / (two_pi * I); };
    expect_near(wind(0.75), 1.0, 1e-12);
    expect_near(wind(0.1), 0.0, 1e-12);
    expect_near(wind(3.0), 0.0, 1e-12);
}

TEST(NearestBoundaryPoint, TrigCurveDistance) {
    const BoundaryGrid g = build_grid(reference::fixture("trig2").domain, 64);
    const auto c = g.domain().curves()[1].eval(0.3);
    const cplx normal = -I * c.dz / std::abs(c.dz);
    const auto nb = nearest_boundary_point(g, c.z + 0.01 * normal);
    EXPECT_NEAR(nb.distance, 0.01, 1e-10);
    EXPECT_NEAR(nb.t, 0.3, 1e-9);
    EXPECT_EQ(nb.curve, 1);
}
