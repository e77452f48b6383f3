#include "ahspec/spectral/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace ahspec;
using namespace ahspec::spectral;
using Catch::Matchers::WithinAbs;

namespace {
geometry::WarpedMetric hyperbolic(int n, double t_max = 14.0) {
    return geometry::make_hyperbolic(n, geometry::default_grid(t_max));
}
} // namespace

TEST_CASE("Sturm bisection agrees with a dense symmetric eigensolver", "[spectrum]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t N = 40;
        std::vector<double> d(N), e(N - 1);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
        for (std::size_t i = 0; i < N; ++i) A(i, i) = d[i] = u(rng);
        for (std::size_t i = 0; i + 1 < N; ++i) A(i, i + 1) = A(i + 1, i) = e[i] = u(rng);
        const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
        const auto got = tridiagonal_smallest(d, e, 5);
        REQUIRE(got.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) REQUIRE_THAT(got[k], WithinAbs(ref(static_cast<Eigen::Index>(k)), 1e-11));
    }
}

TEST_CASE("Dirichlet eigenvalues match an independent shooting oracle", "[spectrum]") {
    // scipy DOP853 + brentq on the radial ODE
    struct Case {
        int n;
        double T, value;
    };
    for (const auto& c : {Case{3, 5.0, 2.7409281226453124}, Case{3, 12.0, 2.3258735845762573},
                          Case{1, 12.0, 0.30606169041624215}, Case{2, 6.0, 1.2741556778080236}}) {
        const auto r = dirichlet_spectrum(hyperbolic(c.n), c.T, 1);
        INFO("n = " << c.n << ", T = " << c.T);
        REQUIRE(r.T == c.T);
        REQUIRE_THAT(r.values[0], WithinAbs(c.value, 1e-6));
        REQUIRE(r.errors[0] < 1e-6);
    }
    // H^3 closed form: 1 + (pi/T)^2
    const double pi = std::acos(-1.0);
    REQUIRE_THAT(dirichlet_eigenvalues(hyperbolic(2), 6.0, 1)[0], WithinAbs(1.0 + pi * pi / 36.0, 1e-6));
    const auto two = dirichlet_eigenvalues(hyperbolic(2), 6.0, 2);
    REQUIRE_THAT(two[1], WithinAbs(1.0 + 4.0 * pi * pi / 36.0, 1e-6));
}

TEST_CASE("Dirichlet eigenvalues decrease with the domain", "[spectrum]") {
    const auto g = hyperbolic(3);
    double prev = INFINITY;
    for (double T = 3.0; T <= 13.0; T += 1.0) {
        const double v = dirichlet_eigenvalues(g, T, 1)[0];
        REQUIRE(v < prev);
        REQUIRE(v > 2.25);
        prev = v;
    }
    REQUIRE(prev < 2.35);
}

TEST_CASE("lambda0 of hyperbolic space is n^2/4", "[spectrum]") {
    for (int n = 1; n <= 4; ++n) {
        const auto g = hyperbolic(n);
        const auto r = lambda0_estimate(g);
        INFO("n = " << n << " value " << r.lambda0.value << " +- " << r.lambda0.error);
        REQUIRE(r.essential_threshold == 0.25 * n * n);
        REQUIRE_THAT(r.lambda0.value, WithinAbs(0.25 * n * n, 1e-3));
        REQUIRE(r.lambda0.error <= 1e-3);
        REQUIRE(r.discrete_eigenvalues.empty());
        REQUIRE(r.truncations.size() == r.dirichlet.size());
    }
}

TEST_CASE("no eigenvalues below n^2/4 for H^2 and H^4", "[spectrum]") {
    REQUIRE(eigenvalues_below_threshold(hyperbolic(1)).empty());
    REQUIRE(eigenvalues_below_threshold(hyperbolic(3)).empty());
}

TEST_CASE("lambda0 rejects bad schedules", "[spectrum]") {
    const auto g = hyperbolic(3);
    Lambda0Options o;
    o.schedule.T = {8.0, 10.0};
    REQUIRE_THROWS_AS(lambda0_estimate(g, o), InputError);
    o.schedule.T = {8.0, 12.0, 10.0};
    REQUIRE_THROWS_AS(lambda0_estimate(g, o), InputError);
    o.schedule.T = {8.0, 12.0, 20.0};
    REQUIRE_THROWS_AS(lambda0_estimate(g, o), InputError);
    REQUIRE_THROWS_AS(dirichlet_spectrum(g, 20.0, 1), InputError);
    REQUIRE_THROWS_AS(dirichlet_spectrum(g, 5.0, 0), InputError);
}

TEST_CASE("Sullivan formula", "[spectrum]") {
    REQUIRE(sullivan_lambda0(3, 2.0) == 2.0);
    REQUIRE(sullivan_lambda0(3, 1.0) == 2.25);
    REQUIRE(sullivan_lambda0(4, 2.0) == 4.0);
    REQUIRE(sullivan_lambda0(3, 3.0) == 0.0);
    REQUIRE(sullivan_lambda0(3, 0.0) == 2.25);
    // continuous at d = n/2 and non-increasing in d
    for (int n = 1; n <= 6; ++n) {
        REQUIRE_THAT(sullivan_lambda0(n, 0.5 * n + 1e-9), WithinAbs(0.25 * n * n, 1e-8));
        double prev = INFINITY;
        for (int k = 0; k <= 100; ++k) {
            const double v = sullivan_lambda0(n, n * k / 100.0);
            REQUIRE(v <= prev);
            prev = v;
        }
    }
    REQUIRE_THROWS_AS(sullivan_lambda0(3, -0.1), InputError);
    REQUIRE_THROWS_AS(sullivan_lambda0(3, 3.1), InputError);
    REQUIRE_THROWS_AS(sullivan_lambda0(0, 0.0), InputError);
}
