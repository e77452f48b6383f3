// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "ahspec/einstein/einstein.hpp"
#include "ahspec/gauge/gauge_flow.hpp"
#include "ahspec/indicial.hpp"
#include "ahspec/io/metric_json.hpp"
#include "ahspec/spectral/eigenfunction.hpp"
#include "ahspec/spectral/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace ahspec;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int k, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    o.detail.precision(10);
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s:%s\n", o.pass ? "PASS" : "FAIL", k, title, o.detail.str().c_str());
    std::fflush(stdout);
}

geometry::WarpedMetric hyperbolic(int n, double t_max = 14.0, double h = 0.01) {
    return geometry::make_hyperbolic(n, geometry::default_grid(t_max, h));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

einstein::SweepTable sweep() {
    static const einstein::SweepTable table = [] {
        const auto j = io::read_json_file("data/configs/pedersen_schedule.json");
        return einstein::pedersen_sweep(j.at("shoot_parameters").get<std::vector<double>>());
    }();
    return table;
}

} // namespace

int main() {
    criterion(1, "hyperbolic lambda0 = n^2/4", [](Outcome& o) {
        for (int n = 1; n <= 4; ++n) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = spectral::lambda0_estimate(hyperbolic(n));
            const double dt = seconds_since(t0);
            o.detail << " n=" << n << ": " << r.lambda0.value << " +- " << r.lambda0.error << " (" << dt << " s)";
            o.require(std::abs(r.lambda0.value - 0.25 * n * n) <= 1e-3, "n=" + std::to_string(n) + " within 1e-3");
            o.require(dt < 10.0, "n=" + std::to_string(n) + " under 10 s");
        }
    });

    criterion(2, "no eigenvalues below n^2/4 on H^4", [](Outcome& o) {
        const auto r = spectral::shoot_below_threshold(hyperbolic(3));
        o.detail << " scan points " << r.scan_lambda.size() << ", eigenvalues found " << r.eigenvalues.size();
        o.require(r.eigenvalues.empty(), "empty");
    });

    criterion(3, "growth eigenfunction on H^4 is cosh t", [](Outcome& o) {
        const auto ge = spectral::solve_growth_eigenfunction(hyperbolic(3), 2.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < ge.t.size() && ge.t[i] <= 10.0 + 1e-12; ++i)
            worst = std::max(worst, std::abs(ge.u[i] - std::cosh(ge.t[i])) / std::cosh(ge.t[i]));
        o.detail << " sup relative error on [0, 10] " << worst;
        o.require(worst <= 1e-6, "1e-6");
    });

    criterion(4, "boundary limits of v and G on H^4", [](Outcome& o) {
        const auto ge = spectral::solve_growth_eigenfunction(hyperbolic(3), 2.0);
        const auto v = spectral::boundary_v_limit(ge);
        const auto G = spectral::gradient_defect_boundary(ge);
        o.detail << " Rhat " << ge.boundary_scalar << ", v " << v.limit.value << " +- " << v.limit.error << ", G "
                 << G.limit.value << " +- " << G.limit.error;
        o.require(std::abs(v.limit.value - 0.25) <= 1e-3, "v = 0.25");
        o.require(std::abs(G.limit.value + 1.0) <= 1e-3, "G = -1");
    });

    criterion(5, "subharmonicity identity", [](Outcome& o) {
        // absolute residual is eps * u^2 roundoff, so the absolute bound is taken on [0, 10]
        for (int n : {3, 1}) {
            const auto expr = Expr::parse("cosh(t)");
            const auto rep = spectral::subharmonicity_check(
                spectral::growth_eigenfunction_from_expression(hyperbolic(n, 10.0), 2.0, expr));
            const auto full = spectral::subharmonicity_check(
                spectral::growth_eigenfunction_from_expression(hyperbolic(n), 2.0, expr));
            o.detail << " H^" << n + 1 << " closed form: " << rep.identity_residual << " on [0,10], relative "
                     << full.relative_identity_residual << " on [0,14];";
            o.require(rep.identity_checked && rep.identity_residual <= 1e-6, "closed form H^" + std::to_string(n + 1));
            o.require(full.identity_checked && full.relative_identity_residual <= 1e-12,
                      "relative closed form H^" + std::to_string(n + 1));
        }
        // shot profile, relative residual |identity| / u^2 under grid halving
        std::vector<double> res;
        for (double h : {0.02, 0.01, 0.005}) {
            const auto p = einstein::shoot_biaxial_einstein(3, -0.05, geometry::default_grid(16.0, h));
            const auto ge = spectral::solve_growth_eigenfunction(p.metric, p.infinity.scale);
            const auto rep = spectral::subharmonicity_check(ge);
            o.require(rep.identity_checked, "identity checked at h=" + std::to_string(h));
            res.push_back(rep.relative_identity_residual);
        }
        o.detail << " shot delta=-0.05, h=0.02/0.01/0.005: " << res[0] << " / " << res[1] << " / " << res[2];
        for (std::size_t i = 1; i < res.size(); ++i) {
            const double order = std::log2(res[i - 1] / res[i]);
            o.detail << ", order " << order;
            o.require(order >= 1.8, "order >= 2 under halving");
        }
    });

    criterion(6, "certificate on profiles with non-negative Yamabe sign", [](Outcome& o) {
        const auto table = sweep();
        int checked = 0;
        for (const auto& r : table.rows) {
            if (r.yamabe == geometry::Sign::Negative) continue;
            ++checked;
            const bool agree = std::abs(r.lambda0.value - 2.25) <= r.lambda0.error;
            o.detail << " t_B=" << r.berger_t.value << ": cert " << (r.certificate.success ? "ok" : "fail")
                     << " sup|du|^2/u^2 " << r.certificate.sup_gradient_ratio << ", lambda0 " << r.lambda0.value << " +- "
                     << r.lambda0.error << ";";
            o.require(r.certificate.success && r.certificate.bound == 2.25, "certificate at t_B=" + std::to_string(r.berger_t.value));
            o.require(agree, "lambda0 within error bar at t_B=" + std::to_string(r.berger_t.value));
        }
        o.detail << " rows checked " << checked;
        o.require(checked >= 3, "at least three profiles");
    });

    criterion(7, "Pedersen trend", [](Outcome& o) {
        const auto table = sweep();
        const auto& rows = table.rows;
        for (const auto& r : rows)
            o.detail << " (" << r.berger_t.value << ", " << r.lambda0.value << " +- " << r.lambda0.error << ", "
                     << geometry::to_string(r.yamabe) << (r.eigenvalues_below.empty() ? "" : ", eigenvalue") << ")";
        for (const auto& f : table.failures) o.detail << " shoot " << f.shoot_parameter << " -> " << f.branch << ";";
        for (std::size_t i = 1; i < rows.size(); ++i)
            o.require(rows[i].lambda0.value <= rows[i - 1].lambda0.value + rows[i].lambda0.error + rows[i - 1].lambda0.error,
                      "non-increasing at t_B=" + std::to_string(rows[i].berger_t.value));
        for (const auto& r : rows) {
            o.require(r.lambda0.value >= 2.0 - 1e-2, "lambda0 >= 2 - 1e-2");
            if (!r.eigenvalues_below.empty())
                o.require(r.yamabe == geometry::Sign::Negative,
                          "finding: eigenvalue below 9/4 with Yamabe sign not negative at t_B=" +
                              std::to_string(r.berger_t.value));
        }
        o.require(rows.size() >= 5, "at least five accepted profiles");
    });

    criterion(8, "Sullivan formula", [](Outcome& o) {
        std::mt19937_64 rng(8);
        int count = 0;
        for (int n : {2, 3, 4}) {
            std::uniform_real_distribution<double> hi(0.5 * n, n), lo(0.0, 0.5 * n);
            for (int k = 0; k < 20; ++k) {
                double d = hi(rng);
                if (d == 0.5 * n) d = n;
                o.require(spectral::sullivan_lambda0(n, d) == d * (n - d), "d(n-d)");
                o.require(spectral::sullivan_lambda0(n, lo(rng)) == 0.25 * n * n, "n^2/4 below n/2");
                ++count;
            }
            o.require(spectral::sullivan_lambda0(n, 0.5 * n) == 0.25 * n * n, "d = n/2");
        }
        o.detail << " " << count << " random d above and below n/2 for n = 2, 3, 4";
    });

    criterion(9, "flow derivative Holder bound", [](Outcome& o) {
        const auto pairs = gauge::straddling_pairs(100, 1e-6, 1e-2, 1);
        auto check = [&](const std::string& text, double alpha, const std::string& name) {
            const auto f = gauge::FlowField::from_expression(text, alpha, -1.0, 1.0);
            const auto rep = gauge::flow_holder_check(f, 1.0, pairs);
            const auto ex = gauge::empirical_holder_exponent(f, 1.0);
            o.detail << " " << name << ": worst ratio " << rep.worst_ratio << ", exponent " << ex.exponent << ";";
            o.require(rep.worst_ratio <= 1.0 + 1e-6, name + " bound");
            o.require(ex.exponent >= alpha - 0.05, name + " exponent");
        };
        check("x", 0.5, "V=x");
        for (double a : {0.3, 0.5, 0.7}) {
            char text[64];
            std::snprintf(text, sizeof text, "x + abs(x)^(1+%g)", a);
            check(text, a, "alpha=" + std::to_string(a).substr(0, 3));
        }
    });

    criterion(10, "indicial roots and conjugated boundary limit", [](Outcome& o) {
        std::mt19937_64 rng(10);
        std::uniform_int_distribution<int> ni(1, 8);
        std::uniform_real_distribution<double> kd(-20.0, 20.0), sd(-10.0, 20.0);
        double worst_root = 0.0;
        for (int k = 0; k < 100; ++k) {
            const int n = ni(rng);
            const double kappa = kd(rng);
            const auto d = indicial::indicial_roots(n, kappa);
            const double disc = 0.25 * n * n + kappa;
            o.require(d.complex == (disc < 0.0), "complex iff discriminant < 0");
            if (d.complex) continue;
            for (double s : {d.s_minus, d.s_plus}) worst_root = std::max(worst_root, std::abs(s * (n - s) + kappa));
            const double s = sd(rng);
            o.require(indicial::weight_admissible(s, n, kappa) == (std::abs(s - 0.5 * n) < std::sqrt(disc)), "admissibility");
        }
        o.detail << " 100 random (n, kappa), worst |s(n-s)+kappa| " << worst_root << ";";
        o.require(worst_root <= 1e-10, "roots");
        const auto g = hyperbolic(3);
        const auto rho = gauge::DefiningProfile::from_expr(g.grid(), Expr::parse("2*exp(-t)"));
        for (double kappa : {0.0, 4.0}) {
            for (double s : {-1.0, 0.0, 1.0, 1.5}) {
                const auto c = indicial::conjugated_coefficients(g, rho, s, kappa);
                const double diff = std::abs(c.boundary_limit_h.value - (kappa + s * (3.0 - s)));
                o.detail << " kappa=" << kappa << " s=" << s << ": " << diff << ";";
                o.require(diff <= 1e-6, "boundary limit");
            }
        }
    });

    return failures == 0 ? 0 : 1;
}
