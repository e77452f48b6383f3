#include "ahspec/einstein/einstein.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace ahspec;
using namespace ahspec::einstein;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::size_t at(const RadialGrid& g, double t) { return g.index_at_or_below(t + 1e-12); }
} // namespace

TEST_CASE("pole series solves the biaxial system to high order", "[einstein]") {
    for (double d : {-0.08, 0.0, 0.3}) {
        const auto S = PoleSeries::from_parameter(d);
        // smooth closure
        REQUIRE_THAT(12.0 * S.a[1] + 6.0 * S.c[1], WithinAbs(3.0, 1e-15));
        for (double t : {0.02, 0.04}) {
            const auto a = PoleSeries::eval(S.a, t), c = PoleSeries::eval(S.c, t);
            ode::State dy(4);
            biaxial_rhs({a[0], a[1], c[0], c[1]}, dy);
            // truncation at t^13 leaves O(t^11) in the second derivative; cancellation costs eps / t^2
            REQUIRE_THAT(dy[1] - a[2], WithinAbs(0.0, 1e-11));
            REQUIRE_THAT(dy[3] - c[2], WithinAbs(0.0, 1e-11));
        }
    }
}

TEST_CASE("delta = 0 is hyperbolic space", "[einstein]") {
    const auto grid = geometry::default_grid(16.0);
    const auto p = shoot_biaxial_einstein(3, 0.0, grid);
    for (double t : {0.5, 2.0, 8.0, 15.0}) {
        const auto i = at(grid, t);
        REQUIRE_THAT(p.metric.profiles()[0].f[i], WithinRel(std::sinh(t), 1e-10));
        REQUIRE_THAT(p.metric.profiles()[1].f[i], WithinRel(std::sinh(t), 1e-10));
    }
    REQUIRE_THAT(p.berger_t.value, WithinAbs(1.0, 1e-9));
    REQUIRE(p.einstein_residual < 1e-6);
}

TEST_CASE("shot profiles match the closed-form Pedersen family", "[einstein]") {
    // a, c from the rho-form of the metric with m = 12 delta, t(rho) by quadrature (mpmath, 30 digits)
    struct Case {
        double d, t, a, c;
    };
    const auto grid = geometry::default_grid(16.0);
    for (const auto& k : {Case{-0.05, 1.0, 1.1254845002721771, 1.2786612263963211},
                          Case{-0.05, 3.0, 8.6246541896631225, 13.249334683605197},
                          Case{0.05, 1.0, 1.2162201059670839, 1.0957125287980537},
                          Case{0.05, 3.0, 10.791409935199358, 8.5786895379145338},
                          Case{-0.08, 1.0, 1.089760449568526, 1.358340261746997},
                          Case{-0.08, 3.0, 6.4101132105548894, 21.334872869247988}}) {
        const auto p = shoot_biaxial_einstein(3, k.d, grid);
        INFO("delta = " << k.d << ", t = " << k.t);
        REQUIRE_THAT(p.metric.profiles()[0].f[at(grid, k.t)], WithinRel(k.a, 1e-10));
        REQUIRE_THAT(p.metric.profiles()[1].f[at(grid, k.t)], WithinRel(k.c, 1e-10));
    }
}

TEST_CASE("Berger parameter is 1/(1 + 12 delta) inside its error bar", "[einstein]") {
    const auto grid = geometry::default_grid(22.0);
    for (double d : {0.1, 0.05, -0.05, -0.07, -0.08, -0.082, -0.083}) {
        const auto p = shoot_biaxial_einstein(3, d, grid);
        const double exact = 1.0 / (1.0 + 12.0 * d);
        INFO("delta = " << d << " t_B = " << p.berger_t.value << " +- " << p.berger_t.error);
        REQUIRE(std::abs(p.berger_t.value - exact) <= p.berger_t.error);
        REQUIRE_THAT(p.berger_t.value, WithinRel(exact, 1e-7));
        REQUIRE(p.berger_t.error <= 1e-7 * exact);
        REQUIRE(p.einstein_residual < 1e-6);
        REQUIRE(p.ah.passed);
    }
}

TEST_CASE("Einstein residual converges under grid refinement", "[einstein]") {
    const double d = 0.5;
    const auto coarse = shoot_biaxial_einstein(3, d, geometry::default_grid(16.0, 0.01), {.residual_tol = 1.0});
    const auto fine = shoot_biaxial_einstein(3, d, geometry::default_grid(16.0, 0.005), {.residual_tol = 1.0});
    REQUIRE(fine.einstein_residual < coarse.einstein_residual / 10.0);
    REQUIRE(fine.einstein_residual < 1e-6);
    // default tolerance on the coarse grid reports instead of returning a bad profile
    REQUIRE_THROWS_AS(shoot_biaxial_einstein(3, d, geometry::default_grid(16.0, 0.01)), NumericalDiagnostic);
}

TEST_CASE("shooting failures are classified", "[einstein]") {
    const auto grid = geometry::default_grid(16.0);
    try {
        shoot_biaxial_einstein(3, -0.1, grid);
        FAIL("collapse expected");
    } catch (const NonAHBranch& e) {
        REQUIRE(e.branch == Branch::Collapse);
        REQUIRE(e.stop_time < 16.0);
    }
    REQUIRE_THROWS_AS(shoot_biaxial_einstein(3, 3.0, grid), InputError);
    REQUIRE_THROWS_AS(shoot_biaxial_einstein(4, 0.0, grid), InputError);
    REQUIRE_THROWS_AS(shoot_biaxial_einstein(3, 0.0, RadialGrid::uniform(1.0, 16.0, 1501)), InputError);
    REQUIRE_THROWS_AS(shoot_biaxial_einstein(3, 0.0, grid, {.t0 = 0.5}), InputError);
}

TEST_CASE("sweep: rows ordered by t_B, spectrum and certificate follow the Yamabe sign", "[einstein]") {
    const auto table = pedersen_sweep({-0.08, 0.0, 0.05, -0.05, -0.1});
    REQUIRE(table.rows.size() == 4);
    REQUIRE(table.failures.size() == 1);
    REQUIRE(table.failures[0].shoot_parameter == -0.1);
    REQUIRE(table.failures[0].branch == "collapse");
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        REQUIRE(table.rows[i - 1].berger_t.value < table.rows[i].berger_t.value);
    for (const auto& r : table.rows) {
        const double tb = r.berger_t.value;
        INFO("t_B = " << tb);
        REQUIRE_THAT(r.boundary_scalar, WithinAbs(8.0 - 2.0 * tb, 1e-6 * std::max(1.0, tb)));
        REQUIRE(r.identities_ok);
        REQUIRE(r.boundary_consistent);
        if (r.yamabe != geometry::Sign::Negative) {
            REQUIRE(r.certificate.success);
            REQUIRE(r.eigenvalues_below.empty());
            REQUIRE_THAT(r.lambda0.value, WithinAbs(2.25, 1e-3));
        } else {
            REQUIRE_FALSE(r.certificate.success);
            REQUIRE(r.certificate.sup_gradient_ratio > 1.0);
        }
    }
    REQUIRE(table.rows.back().yamabe == geometry::Sign::Negative);
    REQUIRE_THROWS_AS(pedersen_sweep({}), InputError);
}
