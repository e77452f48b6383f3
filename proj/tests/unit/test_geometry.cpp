#include "ahspec/geometry/curvature.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace ahspec;
using namespace ahspec::geometry;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::size_t index_of(const WarpedMetric& g, double t) { return g.grid().index_at_or_below(t + 1e-12); }
} // namespace

TEST_CASE("grid policies regenerate from their record", "[geometry]") {
    const auto u = RadialGrid::uniform(0.0, 10.0, 1001);
    REQUIRE(u.size() == 1001);
    REQUIRE(u.policy().kind == GridPolicy::Kind::Uniform);
    REQUIRE(RadialGrid::uniform(0.0, 10.0, u.policy().count).points()[500] == u.points()[500]);

    const auto g = RadialGrid::graded(0.0, 10.0, 0.05, 1e-4, 1.1);
    const auto& p = g.policy();
    const auto again = RadialGrid::graded(0.0, 10.0, p.spacing, p.pole_spacing, p.growth);
    REQUIRE(again.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(again[i] == g[i]);
    REQUIRE(g[1] - g[0] == Catch::Approx(1e-4));

    REQUIRE_THROWS_AS(RadialGrid::uniform(1.0, 0.5, 10), InputError);
    REQUIRE_THROWS_AS(RadialGrid::explicit_points({0.0, 1.0, 1.0}), InputError);
    REQUIRE_THROWS_AS(RadialGrid::uniform(-1.0, 1.0, 10), InputError);
}

TEST_CASE("make_hyperbolic is Einstein to 1e-8 under finite differences, n = 1..4", "[geometry]") {
    for (int n = 1; n <= 4; ++n) {
        const auto g = make_hyperbolic(n, default_grid(10.0));
        const auto c = curvature(g);
        INFO("n = " << n);
        REQUIRE(c.einstein_residual >= 0.0);
        REQUIRE(c.einstein_residual <= 1e-8);
        REQUIRE(c.interior_order == 4);
        const auto i = index_of(g, 3.0);
        REQUIRE_THAT(c.scalar[i], WithinAbs(-double(n) * (n + 1), 1e-7));
    }
}

TEST_CASE("H^4 with exact derivatives has residual below 1e-10", "[geometry]") {
    const auto g = make_hyperbolic(3, default_grid(10.0));
    CurvatureOptions o;
    o.derivatives = Derivatives::Auto;
    REQUIRE(curvature(g, o).einstein_residual <= 1e-10);
}

TEST_CASE("hyperbolic plane has sectional curvature -1", "[geometry]") {
    const auto g = make_hyperbolic(1, default_grid(10.0));
    const auto c = curvature(g);
    // n = 1: scalar = 2 K
    for (std::size_t i = c.first_interior; i <= c.last_interior; i += 97) REQUIRE_THAT(c.scalar[i] / 2.0, WithinAbs(-1.0, 1e-8));
}

TEST_CASE("coth t approaches 1 at t_max = 10", "[geometry]") {
    const auto g = make_hyperbolic(3, default_grid(10.0));
    const auto d = ah_diagnostic(g, 1e-3, 0.1, Derivatives::Auto);
    REQUIRE(d.passed);
    REQUIRE(std::abs(1.0 / std::tanh(10.0) - 1.0) < 1e-8);
    const auto j = profile_jets(g, Derivatives::FiniteDifference);
    const std::size_t last = g.grid().size() - 2;
    REQUIRE_THAT(j.df[0][last] / j.f[0][last], WithinAbs(1.0 / std::tanh(g.grid()[last]), 1e-8));
}

TEST_CASE("flat cone f = t has zero scalar curvature", "[geometry]") {
    const auto g = WarpedMetric::from_expressions(1, default_grid(5.0), {{Expr::parse("t"), 1}},
                                                  SliceGeometry::round_sphere(1), true, "plane");
    const auto c = curvature(g);
    for (std::size_t i = c.first_interior; i <= c.last_interior; ++i) REQUIRE_THAT(c.scalar[i], WithinAbs(0.0, 1e-9));
}

TEST_CASE("perturbed profile: residual matches symbolic oracle and converges at 4th order", "[geometry]") {
    // Rc + 3g for f = sinh t + sin(t)/100 on S^3, evaluated symbolically (frozen)
    const double radial_t1 = 0.042655948555206396568, tangential_t1 = 0.018708425617758506436;
    const double scalar_t1 = -11.901218774591518084;
    double err_prev = 0.0;
    for (double h : {0.02, 0.01, 0.005}) {
        const auto g = WarpedMetric::from_expressions(3, default_grid(8.0, h), {{Expr::parse("sinh(t) + 0.01*sin(t)"), 3}},
                                                      SliceGeometry::round_sphere(3), true);
        const auto c = curvature(g);
        const auto i = index_of(g, 1.0);
        REQUIRE(c.t[i] == Catch::Approx(1.0));
        REQUIRE(c.einstein_residual > 0.01);
        REQUIRE_THAT(c.residual[i], WithinAbs(std::max(radial_t1, tangential_t1), 1e-6));
        const double err = std::abs(c.scalar[i] - scalar_t1);
        if (err_prev > 0.0) REQUIRE(err_prev / err > 10.0); // ~16 for a 4th-order stencil
        err_prev = err;
    }
}

TEST_CASE("volume density is the product of the profiles", "[geometry]") {
    const auto g = make_hyperbolic(3, default_grid(4.0));
    const auto V = volume_density(g);
    for (std::size_t i = 0; i < V.size(); i += 50) REQUIRE_THAT(V[i], WithinAbs(std::pow(std::sinh(g.grid()[i]), 3), 1e-12));

    const auto b = WarpedMetric::from_expressions(3, default_grid(4.0), {{Expr::parse("sinh(t)"), 2}, {Expr::parse("sinh(2*t)/2"), 1}},
                                                  SliceGeometry::lie(StructureConstants::su2(1.0)), true);
    const auto Vb = volume_density(b);
    for (std::size_t i = 0; i < Vb.size(); i += 50) {
        const double t = b.grid()[i];
        REQUIRE_THAT(Vb[i], WithinAbs(std::sinh(t) * std::sinh(t) * std::sinh(2 * t) / 2, 1e-9));
    }
}

TEST_CASE("boundary scalar: round S^3 gives 6 and Berger follows Milnor's formula", "[geometry]") {
    REQUIRE_THAT(boundary_scalar({SliceGeometry::round_sphere(3), {1.0, 1.0, 1.0}}), WithinAbs(6.0, 1e-14));
    REQUIRE_THAT(boundary_scalar(berger(1.0)), WithinAbs(6.0, 1e-12));
    // Milnor: orthonormal brackets lambda = (2/sqrt t, 2/sqrt t, 2 sqrt t) give R = 8 - 2t
    for (double tb : {0.25, 0.5, 2.0, 4.0, 10.0, 250.0}) REQUIRE_THAT(boundary_scalar(berger(tb)), WithinAbs(8.0 - 2.0 * tb, 1e-10 * tb + 1e-12));
    REQUIRE_THROWS_AS(boundary_scalar({SliceGeometry::round_sphere(3), {1.0, 0.0, 1.0}}), InputError);
}

TEST_CASE("boundary scalar is homogeneous of degree -1 and yamabe sign is scale invariant", "[geometry]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> q(0.1, 10.0), lam(0.01, 100.0);
    const auto slice = SliceGeometry::lie(StructureConstants::su2(1.0));
    for (int k = 0; k < 200; ++k) {
        HomogeneousBoundaryMetric bm{slice, {q(rng), q(rng), q(rng)}};
        const double l = lam(rng);
        HomogeneousBoundaryMetric scaled = bm;
        for (auto& c : scaled.coefficients) c *= l;
        REQUIRE_THAT(boundary_scalar(scaled), WithinRel(boundary_scalar(bm) / l, 1e-12));
        REQUIRE(yamabe_sign(scaled).sign == yamabe_sign(bm).sign);
    }
}

TEST_CASE("yamabe sign: + for the round sphere, 0 at the crossing t_B = 4, - beyond", "[geometry]") {
    REQUIRE(yamabe_sign({SliceGeometry::round_sphere(3), {1.0, 1.0, 1.0}}).sign == Sign::Positive);
    REQUIRE(yamabe_sign(berger(4.0)).sign == Sign::Zero);
    REQUIRE(yamabe_sign(berger(3.99)).sign == Sign::Positive);
    REQUIRE(yamabe_sign(berger(40.0)).sign == Sign::Negative);
    REQUIRE_FALSE(yamabe_sign(berger(4.0)).rationale.empty());
}

TEST_CASE("structure constants must be antisymmetric and unimodular", "[geometry]") {
    StructureConstants c(3);
    c.set(0, 1, 0, 1.0); // [E1, E2] = E1: solvable, not unimodular
    REQUIRE_THROWS_AS(SliceGeometry::lie(c), InputError);
    REQUIRE_THROWS_AS(c.set(1, 1, 0, 1.0), InputError);
    const auto s = SliceGeometry::lie(StructureConstants::su2(1.0));
    REQUIRE(s.calibration_scale == Catch::Approx(2.0));
    REQUIRE(s.convention.find("lie-calibrated") == 0);
}

TEST_CASE("conformal infinity of H^{n+1} with C = 2 is the unit round sphere", "[geometry]") {
    for (int n = 1; n <= 4; ++n) {
        const auto g = make_hyperbolic(n, default_grid(14.0));
        GaugeChoice gc;
        gc.scale = 2.0;
        const auto ci = conformal_infinity(g, gc);
        REQUIRE(ci.boundary.coefficients.size() == static_cast<std::size_t>(n));
        for (double q : ci.boundary.coefficients) REQUIRE_THAT(q, WithinAbs(1.0, 1e-8));
        // default gauge picks the same representative
        REQUIRE_THAT(conformal_infinity(g).scale, WithinAbs(2.0, 1e-8));
    }
}

TEST_CASE("conformal infinity rejects an oscillating profile", "[geometry]") {
    const auto g = WarpedMetric::from_expressions(3, default_grid(14.0), {{Expr::parse("sinh(t)*(1 + 0.5*sin(3*t))"), 3}},
                                                  SliceGeometry::round_sphere(3), true);
    REQUIRE_THROWS_AS(conformal_infinity(g), NumericalDiagnostic);
}

TEST_CASE("degenerate metrics are rejected", "[geometry]") {
    REQUIRE_THROWS_AS(WarpedMetric::from_expressions(1, default_grid(5.0), {{Expr::parse("sin(t)"), 1}},
                                                     SliceGeometry::round_sphere(1), true),
                      InputError);
    REQUIRE_THROWS_AS(make_hyperbolic(3, RadialGrid::uniform(0.5, 5.0, 100)), InputError);
    REQUIRE_THROWS_AS(WarpedMetric::from_expressions(3, default_grid(5.0), {{Expr::parse("sinh(t)"), 2}},
                                                     SliceGeometry::round_sphere(3), true),
                      InputError);
}

TEST_CASE("curvature rejects a grid too coarse for the stencil", "[geometry]") {
    const auto g = make_hyperbolic(3, RadialGrid::uniform(0.0, 10.0, 11));
    REQUIRE_THROWS_AS(curvature(g), NumericalDiagnostic);
}

TEST_CASE("Einstein boundary identities on H^4", "[geometry]") {
    const auto g = make_hyperbolic(3, default_grid(14.0));
    const auto b = einstein_boundary_identities(g);
    REQUIRE(b.applicable);
    REQUIRE_THAT(b.scalar_at_boundary.value, WithinAbs(9.0, 1e-3));
    REQUIRE(b.trace_residual <= 1e-6);
    REQUIRE_THAT(b.boundary_scalar, WithinAbs(6.0, 1e-8));
    REQUIRE(b.scalar_identity_residual <= 1e-3);
}

TEST_CASE("boundary identities are flagged non-applicable off Einstein metrics", "[geometry]") {
    const auto g = WarpedMetric::from_expressions(3, default_grid(14.0), {{Expr::parse("sinh(t)*(1 + 0.3/cosh(t)^2)"), 3}},
                                                  SliceGeometry::round_sphere(3), true);
    const auto b = einstein_boundary_identities(g);
    REQUIRE_FALSE(b.applicable);
    REQUIRE_FALSE(b.note.empty());
}
