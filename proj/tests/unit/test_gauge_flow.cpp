#include "ahspec/gauge/gauge_flow.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace ahspec;
using namespace ahspec::gauge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
geometry::WarpedMetric h4() { return geometry::make_hyperbolic(3, geometry::default_grid(14.0)); }
} // namespace

TEST_CASE("geodesic gauge is C e^{-t} and agrees with rho to second order", "[gauge_flow]") {
    const auto g = h4();
    const auto rho = DefiningProfile::from_expr(g.grid(), Expr::parse("2*exp(-t) + exp(-2*t)"));
    REQUIRE_THAT(rho.leading.value, WithinAbs(2.0, 1e-8));
    const auto rep = geodesic_gauge(g, rho);
    REQUIRE_THAT(rep.scale, WithinAbs(2.0, 1e-8));
    REQUIRE(rep.eikonal_residual < 1e-12);
    REQUIRE(rep.characteristic_residual < 1e-9);
    REQUIRE(rep.scale_matched);
    REQUIRE(rep.matches_to_second_order);
    // |r - rho| / rho^2 = e^{-2t} / (2 e^{-t} + e^{-2t})^2 -> 1/4
    REQUIRE_THAT(rep.second_order_constant, WithinAbs(0.25, 1e-3));

    const auto exact = geodesic_gauge(g, DefiningProfile::from_expr(g.grid(), Expr::parse("2*exp(-t)")));
    REQUIRE(exact.second_order_constant < 1e-6);
    REQUIRE(exact.matches_to_second_order);
}

TEST_CASE("a mismatched scale breaks first-order agreement", "[gauge_flow]") {
    const auto g = h4();
    const auto rho = DefiningProfile::from_expr(g.grid(), Expr::parse("2*exp(-t)"));
    const auto rep = geodesic_gauge(g, rho, 3.0);
    REQUIRE_FALSE(rep.scale_matched);
    REQUIRE_FALSE(rep.matches_to_second_order);
    REQUIRE_THAT(rep.first_order_defect, WithinAbs(0.5, 1e-9));
    REQUIRE(rep.eikonal_residual < 1e-12);
    REQUIRE_THROWS_AS(geodesic_gauge(g, rho, -1.0), InputError);
}

TEST_CASE("flow map matches the logistic closed form", "[gauge_flow]") {
    const auto f = FlowField::from_expression("x*(1-x)", 0.5, 0.0, 1.0);
    for (double x : {0.1, 0.5, 0.9})
        for (double t : {0.0, 0.5, 2.0}) {
            const auto r = flow_map(f, {x}, t);
            REQUIRE(r.completed);
            const double e = std::exp(t);
            REQUIRE_THAT(r.y[0], WithinAbs(x * e / (1.0 - x + x * e), 1e-11));
        }
    // u = dy/dx = e^t / (1 - x + x e^t)^2
    const auto v = detail::variational(f, {0.3}, 1.5, 5, 1e-13);
    const double e = std::exp(1.5), den = 1.0 - 0.3 + 0.3 * e;
    REQUIRE_THAT(v.u(0, 0), WithinRel(e / (den * den), 1e-10));
}

TEST_CASE("flow map stops at the edge of the box", "[gauge_flow]") {
    const auto f = FlowField::from_expression("x", 0.5, -1.0, 1.0);
    const auto r = flow_map(f, {0.5}, 2.0);
    REQUIRE_FALSE(r.completed);
    REQUIRE_THAT(r.exit_time, WithinAbs(std::log(2.0), 1e-9));
    REQUIRE_THAT(r.y[0], WithinAbs(1.0, 1e-9));
    REQUIRE(f.inside(r.y));
    REQUIRE_THROWS_AS(flow_map(f, {1.5}, 1.0), InputError);
    REQUIRE_THROWS_AS(flow_map(f, {0.1, 0.2}, 1.0), InputError);
}

TEST_CASE("field construction rejects bad exponents and boxes", "[gauge_flow]") {
    REQUIRE_THROWS_AS(FlowField::from_expression("x", 0.0, -1.0, 1.0), InputError);
    REQUIRE_THROWS_AS(FlowField::from_expression("x", 1.0, -1.0, 1.0), InputError);
    REQUIRE_THROWS_AS(FlowField::from_expression("x", 0.5, 1.0, 1.0), InputError);
    REQUIRE_THROWS(FlowField::from_expression("x +", 0.5, -1.0, 1.0));
}

TEST_CASE("straddling pairs are reproducible and straddle 0", "[gauge_flow]") {
    const auto a = straddling_pairs(50, 1e-6, 1e-2, 42), b = straddling_pairs(50, 1e-6, 1e-2, 42);
    const auto c = straddling_pairs(50, 1e-6, 1e-2, 43);
    REQUIRE(a == b);
    REQUIRE(a != c);
    for (const auto& [x1, x2] : a) {
        REQUIRE(x1[0] < 0.0);
        REQUIRE(x2[0] > 0.0);
        REQUIRE(-x1[0] >= 1e-6 * (1 - 1e-12));
        REQUIRE(x2[0] <= 1e-2 * (1 + 1e-12));
    }
}

TEST_CASE("Holder bound for the linearised flow of x + |x|^{1+alpha}", "[gauge_flow]") {
    for (double alpha : {0.3, 0.5, 0.7}) {
        INFO("alpha = " << alpha);
        const auto f = FlowField::from_expression("x + abs(x)^(1+" + std::to_string(alpha) + ")", alpha, -1.0, 1.0);
        const auto rep = flow_holder_check(f, 1.0, straddling_pairs(40, 1e-6, 1e-2, 1));
        REQUIRE(rep.bound_holds);
        REQUIRE(rep.worst_ratio > 0.0);
        REQUIRE(rep.worst_ratio < 1.0);
        REQUIRE(rep.pairs.size() == 40);
        // the two sampling scales agree to a few percent
        REQUIRE_THAT(rep.norms.c0alpha_A, WithinRel(rep.norms.coarse_c0alpha_A, 0.05));

        // exponent of the derivative jump across 0 is alpha
        const auto ex = empirical_holder_exponent(f, 1.0);
        REQUIRE_THAT(ex.exponent, WithinAbs(alpha, 0.02));
    }
}

TEST_CASE("smooth field: no derivative jump, exponent is infinite", "[gauge_flow]") {
    const auto f = FlowField::from_expression("x", 0.5, -1.0, 1.0);
    const auto ex = empirical_holder_exponent(f, 0.5);
    REQUIRE(std::isinf(ex.exponent));
    const auto rep = flow_holder_check(f, 0.5, straddling_pairs(10, 1e-6, 1e-2, 3));
    REQUIRE(rep.bound_holds);
    REQUIRE(rep.worst_ratio == 0.0);
}

TEST_CASE("Holder check input validation", "[gauge_flow]") {
    const auto f = FlowField::from_expression("x", 0.5, -1.0, 1.0);
    REQUIRE_THROWS_AS(flow_holder_check(f, 0.0, {}), InputError);
    REQUIRE_THROWS_AS(flow_holder_check(f, 1.0, {{{-2.0}, {0.5}}}), InputError);
    // V = x from 0.9 leaves [-1, 1] before t = 1
    REQUIRE_THROWS_AS(flow_holder_check(f, 1.0, {{{-0.1}, {0.9}}}), InputError);
}
