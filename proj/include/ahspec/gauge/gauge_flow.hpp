#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/expr.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/core/ode.hpp"
#include "ahspec/core/parallel.hpp"
#include "ahspec/gauge/defining.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ahspec::gauge {

// ---------------------------------------------------------------- geodesic gauge

struct GaugeReport {
    DefiningProfile r;
    double scale = 0.0;
    double collar_start = 0.0;
    /// sup over the collar of | |dr|^2_{r^2 g} - 1 | = |(r'/r)^2 - 1|
    double eikonal_residual = 0.0;
    /// sup over the collar of |r_char - r| / r, where r_char = rho e^v with
    /// v' = -(1 + rho'/rho) integrated inward from t_max
    double characteristic_residual = 0.0;
    bool scale_matched = false;
    /// sup |r - rho| / rho^2 on the collar (bounded when r = rho + O(rho^2))
    double second_order_constant = 0.0;
    /// sup |r - rho| / rho on the outer half of the collar (-> 0 when matched)
    double first_order_defect = 0.0;
    bool matches_to_second_order = false;
};

struct GaugeOptions {
    double collar_width = 5.0;
    double ode_tol = 1e-12;
    double matching_tol = 1e-8;
};

/// Geodesic defining function for rho. In the radial gauge the eikonal
/// equation |dr|_{r^2 g} = 1 reads (r'/r)^2 = 1, so r = C e^{-t}; C defaults
/// to the leading coefficient of rho.
inline GaugeReport geodesic_gauge(const geometry::WarpedMetric& g, const DefiningProfile& rho,
                                  std::optional<double> target_scale = std::nullopt, const GaugeOptions& opt = {}) {
    const auto t = g.grid().points();
    if (rho.rho.size() != t.size()) throw InputError("geodesic_gauge: defining profile lives on a different grid");
    GaugeReport rep;
    rep.scale = target_scale ? *target_scale : rho.leading.value;
    if (!(rep.scale > 0.0)) throw InputError("geodesic_gauge: target scale must be positive");
    rep.scale_matched = !target_scale || std::abs(*target_scale - rho.leading.value) <=
                                             std::max(opt.matching_tol, 10.0 * rho.leading.error) * rho.leading.value;
    const Expr e = Expr::constant(rep.scale) * Expr::parse("exp(-t)");
    rep.r = DefiningProfile::from_expr(g.grid(), e);
    rep.collar_start = std::max(t.front(), t.back() - opt.collar_width);

    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < rep.collar_start) continue;
        const double l = rep.r.drho[i] / rep.r.rho[i];
        rep.eikonal_residual = std::max(rep.eikonal_residual, std::abs(l * l - 1.0));
    }

    // characteristics of the 1D eikonal problem for r = rho e^v
    const auto lrho = rho.log_derivative();
    std::vector<double> times;
    for (std::size_t i = t.size(); i-- > 0;)
        if (t[i] >= rep.collar_start) times.push_back(t[i]);
    if (times.size() >= 2) {
        const double v0 = std::log(rep.scale * std::exp(-t.back()) / rho.rho.back());
        auto rhs = [&](const ode::State&, ode::State& dy, double s) {
            dy[0] = -(1.0 + interpolate_cubic(t, lrho, s));
        };
        const auto tr = ode::integrate_dense(rhs, {v0}, times, opt.ode_tol, opt.ode_tol);
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            const double rc = interpolate_cubic(t, rho.rho, tr.times[k]) * std::exp(tr.states[k][0]);
            const double rr = rep.scale * std::exp(-tr.times[k]);
            rep.characteristic_residual = std::max(rep.characteristic_residual, std::abs(rc - rr) / rr);
        }
    }

    const double mid = 0.5 * (rep.collar_start + t.back());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < rep.collar_start) continue;
        const double d = std::abs(rep.r.rho[i] - rho.rho[i]);
        rep.second_order_constant = std::max(rep.second_order_constant, d / (rho.rho[i] * rho.rho[i]));
        if (t[i] >= mid) rep.first_order_defect = std::max(rep.first_order_defect, d / rho.rho[i]);
    }
    // O(rho^2): the ratio stays bounded and the relative defect is of size rho
    const double rho_mid = interpolate_cubic(t, rho.rho, mid);
    rep.matches_to_second_order =
        rep.scale_matched && std::isfinite(rep.second_order_constant) &&
        rep.first_order_defect <= (rep.second_order_constant + 1.0) * rho_mid * 1.01 + opt.matching_tol;
    return rep;
}

// ---------------------------------------------------------------- flows

/// Autonomous vector field V on the box [lo, hi]^m with its Jacobian.
struct FlowField {
    int dim = 1;
    std::function<void(const ode::State&, ode::State&)> V;
    std::function<Eigen::MatrixXd(const ode::State&)> jacobian;
    std::vector<double> lo, hi;
    double alpha = 0.5;
    std::vector<std::string> expressions;

    [[nodiscard]] bool inside(const ode::State& y) const {
        for (int i = 0; i < dim; ++i)
            if (!(y[static_cast<std::size_t>(i)] >= lo[static_cast<std::size_t>(i)] &&
                  y[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]))
                return false;
        return true;
    }

    /// One-dimensional field from an expression in x.
    static FlowField from_expression(const std::string& text, double alpha, double lo, double hi) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("flow field: alpha must lie in (0, 1)");
        if (!(hi > lo)) throw InputError("flow field: empty box");
        const Expr e = Expr::parse(text, "x");
        const Expr de = e.derivative();
        FlowField f;
        f.dim = 1;
        f.V = [e](const ode::State& y, ode::State& dy) { dy[0] = e(y[0]); };
        f.jacobian = [de](const ode::State& y) {
            Eigen::MatrixXd a(1, 1);
            a(0, 0) = de(y[0]);
            return a;
        };
        f.lo = {lo};
        f.hi = {hi};
        f.alpha = alpha;
        f.expressions = {text};
        return f;
    }
};

struct FlowResult {
    ode::State y;
    bool completed = true;
    double exit_time = 0.0; ///< time reached (== t when completed, else last time inside the box)
    double tolerance = 0.0;
};

inline FlowResult flow_map(const FlowField& field, const ode::State& x, double t, double tol = 1e-12) {
    if (x.size() != static_cast<std::size_t>(field.dim)) throw InputError("flow_map: point has the wrong dimension");
    if (!field.inside(x)) throw InputError("flow_map: start point outside the field's box");
    FlowResult out;
    out.tolerance = tol;
    if (t == 0.0) {
        out.y = x;
        return out;
    }
    const double times[2] = {0.0, t};
    auto rhs = [&](const ode::State& y, ode::State& dy, double) { field.V(y, dy); };
    auto valid = [&](double, const ode::State& y, std::string& why) {
        if (field.inside(y)) return true;
        why = "trajectory left the box";
        return false;
    };
    const auto tr = ode::integrate_dense(rhs, x, times, tol, tol, valid);
    out.completed = tr.completed;
    out.exit_time = tr.completed ? t : tr.stop_time;
    if (tr.completed) {
        out.y = tr.states.back();
    } else {
        // the halt comes from a trial stage, possibly past the exit: bisect on
        // the end state for the last time still inside the box
        auto end_state = [&](double s) {
            if (s == 0.0) return x;
            const double span[2] = {0.0, s};
            return ode::integrate_dense(rhs, x, span, tol, tol).states.back();
        };
        double lo = 0.0, hi = tr.stop_time;
        out.y = x;
        if (const auto y_hi = end_state(hi); field.inside(y_hi)) {
            lo = hi;
            out.y = y_hi;
        }
        while (hi - lo > 1e-12 * (1.0 + std::abs(t))) {
            const double mid = 0.5 * (lo + hi);
            const auto y = end_state(mid);
            if (field.inside(y)) {
                lo = mid;
                out.y = y;
            } else {
                hi = mid;
            }
        }
        out.exit_time = lo;
    }
    return out;
}

namespace detail {

struct Variational {
    ode::State y;
    Eigen::MatrixXd u;
    double u_sup = 0.0; ///< sup over sampled times of |u|
    std::vector<ode::State> path;
    bool completed = true;
};

/// Flow and its derivative u = dy/dx, sampled at `samples` equally spaced times.
inline Variational variational(const FlowField& f, const ode::State& x, double t, std::size_t samples, double tol) {
    const std::size_t m = static_cast<std::size_t>(f.dim);
    ode::State z(m + m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = x[i];
        z[m + i * m + i] = 1.0;
    }
    auto rhs = [&](const ode::State& s, ode::State& ds, double) {
        ode::State y(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m)), dy(m);
        f.V(y, dy);
        const Eigen::MatrixXd A = f.jacobian(y);
        Eigen::Map<const Eigen::MatrixXd> U(s.data() + m, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        const Eigen::MatrixXd dU = A * U;
        for (std::size_t i = 0; i < m; ++i) ds[i] = dy[i];
        std::copy(dU.data(), dU.data() + m * m, ds.begin() + static_cast<std::ptrdiff_t>(m));
    };
    auto valid = [&](double, const ode::State& s, std::string& why) {
        if (f.inside(ode::State(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m)))) return true;
        why = "trajectory left the box";
        return false;
    };
    std::vector<double> times(std::max<std::size_t>(samples, 2));
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = t * static_cast<double>(k) / (times.size() - 1);
    const auto tr = ode::integrate_dense(rhs, z, times, tol, tol, valid);
    Variational v;
    v.completed = tr.completed;
    for (const auto& s : tr.states) {
        Eigen::Map<const Eigen::MatrixXd> U(s.data() + m, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        v.u_sup = std::max(v.u_sup, U.norm());
        v.path.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m));
    }
    const auto& last = tr.states.back();
    v.y.assign(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(m));
    v.u = Eigen::Map<const Eigen::MatrixXd>(last.data() + m, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    return v;
}

} // namespace detail

struct HolderNorms {
    double sup_A = 0.0;
    double seminorm_A = 0.0;
    double c0alpha_A = 0.0; ///< sup + seminorm
    double sup_u = 0.0;
    std::size_t resolution = 0; ///< samples per box side on the finer scale
    double coarse_c0alpha_A = 0.0;
    std::size_t dropped = 0; ///< sample points whose trajectory left the box
};

struct PairCheck {
    ode::State x1, x2;
    double v = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

struct HolderReport {
    double t = 0.0;
    double alpha = 0.0;
    HolderNorms norms;
    std::optional<HolderNorms> refined; ///< re-estimate at double resolution after a violation
    std::vector<PairCheck> pairs;
    double worst_ratio = 0.0;
    bool bound_holds = true;
    std::string window;
};

struct HolderOptions {
    std::size_t resolution = 201;
    std::size_t time_samples = 11;
    double ode_tol = 1e-12;
    double ratio_tol = 1e-6;
    unsigned workers = worker_count();
};

namespace detail {

/// Finite-sample norms of A(x, s) = DV(y(x, s)) over [0, t] x box and sup |u|.
inline HolderNorms estimate_norms(const FlowField& f, double t, std::size_t res, const HolderOptions& opt,
                                  const std::vector<PairCheck>& pairs, const std::vector<double>& pair_usup) {
    if (f.dim != 1 && res > 41) res = 41;
    // lattice samples of the box
    std::vector<ode::State> pts;
    const std::size_t m = static_cast<std::size_t>(f.dim);
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
        ode::State x(m);
        for (std::size_t i = 0; i < m; ++i)
            x[i] = f.lo[i] + (f.hi[i] - f.lo[i]) * static_cast<double>(idx[i]) / static_cast<double>(res - 1);
        pts.push_back(x);
        std::size_t i = 0;
        while (i < m && ++idx[i] == res) idx[i++] = 0;
        if (i == m) break;
    }
    for (const auto& p : pairs) {
        pts.push_back(p.x1);
        pts.push_back(p.x2);
    }
    const auto runs = parallel_map<Variational>(
        pts.size(), [&](std::size_t k) { return variational(f, pts[k], t, opt.time_samples, opt.ode_tol); },
        opt.workers);
    HolderNorms h;
    h.resolution = res;
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (runs[k].completed) kept.push_back(k);
        else ++h.dropped;
    }
    for (double s : pair_usup) h.sup_u = std::max(h.sup_u, s);
    for (std::size_t s = 0; s < opt.time_samples; ++s) {
        std::vector<Eigen::MatrixXd> A;
        std::vector<const ode::State*> X;
        for (std::size_t k : kept) {
            A.push_back(f.jacobian(runs[k].path[s]));
            X.push_back(&pts[k]);
        }
        for (std::size_t a = 0; a < A.size(); ++a) {
            h.sup_A = std::max(h.sup_A, A[a].norm());
            for (std::size_t b = a + 1; b < A.size(); ++b) {
                double dx = 0.0;
                for (std::size_t i = 0; i < m; ++i) dx += ((*X[a])[i] - (*X[b])[i]) * ((*X[a])[i] - (*X[b])[i]);
                dx = std::sqrt(dx);
                if (dx == 0.0) continue;
                h.seminorm_A = std::max(h.seminorm_A, (A[a] - A[b]).norm() / std::pow(dx, f.alpha));
            }
        }
    }
    for (std::size_t k : kept) h.sup_u = std::max(h.sup_u, runs[k].u_sup);
    h.c0alpha_A = h.sup_A + h.seminorm_A;
    return h;
}

} // namespace detail

/// Checks |u(x1,t) - u(x2,t)| <= (exp(t ||A||_{C^{0,alpha}}) - 1) ||u||_inf |x1 - x2|^alpha
/// for each pair, with u = dy/dx from the linearised flow.
inline HolderReport flow_holder_check(const FlowField& f, double t, const std::vector<std::pair<ode::State, ode::State>>& pairs,
                                      const HolderOptions& opt = {}) {
    if (!(t > 0.0)) throw InputError("flow_holder_check: t must be positive");
    if (opt.resolution < 3) throw InputError("flow_holder_check: resolution must be >= 3");
    HolderReport rep;
    rep.t = t;
    rep.alpha = f.alpha;
    std::vector<PairCheck> checks;
    for (const auto& [a, b] : pairs) {
        if (!f.inside(a) || !f.inside(b)) throw InputError("flow_holder_check: pair outside the box");
        checks.push_back({a, b, 0.0, 0.0, 0.0});
    }
    const auto var = parallel_map<std::pair<detail::Variational, detail::Variational>>(
        checks.size(),
        [&](std::size_t k) {
            return std::make_pair(detail::variational(f, checks[k].x1, t, opt.time_samples, opt.ode_tol),
                                  detail::variational(f, checks[k].x2, t, opt.time_samples, opt.ode_tol));
        },
        opt.workers);
    std::vector<double> usup;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        if (!var[k].first.completed || !var[k].second.completed)
            throw InputError("flow_holder_check: a pair trajectory leaves the box before time t");
        checks[k].v = (var[k].first.u - var[k].second.u).norm();
        usup.push_back(std::max(var[k].first.u_sup, var[k].second.u_sup));
    }
    auto evaluate = [&](const HolderNorms& nm) {
        double worst = 0.0;
        for (auto& c : checks) {
            double dx = 0.0;
            for (std::size_t i = 0; i < c.x1.size(); ++i) dx += (c.x1[i] - c.x2[i]) * (c.x1[i] - c.x2[i]);
            c.bound = std::expm1(t * nm.c0alpha_A) * nm.sup_u * std::pow(std::sqrt(dx), f.alpha);
            c.ratio = c.v == 0.0 ? 0.0 : c.v / c.bound;
            worst = std::max(worst, c.ratio);
        }
        return worst;
    };
    // two scales; the finer one enters the bound
    HolderNorms coarse = detail::estimate_norms(f, t, (opt.resolution + 1) / 2, opt, checks, usup);
    rep.norms = detail::estimate_norms(f, t, opt.resolution, opt, checks, usup);
    rep.norms.coarse_c0alpha_A = coarse.c0alpha_A;
    if (!std::isfinite(rep.norms.c0alpha_A) || !std::isfinite(rep.norms.sup_u))
        throw NumericalDiagnostic("flow_holder_check: norm estimates are not finite");
    rep.worst_ratio = evaluate(rep.norms);
    if (rep.worst_ratio > 1.0 + opt.ratio_tol) {
        rep.refined = detail::estimate_norms(f, t, 2 * opt.resolution - 1, opt, checks, usup);
        rep.worst_ratio = evaluate(*rep.refined);
    }
    rep.bound_holds = rep.worst_ratio <= 1.0 + opt.ratio_tol;
    rep.pairs = std::move(checks);
    rep.window = "[0, t] x box sampled at " + std::to_string(rep.norms.resolution) + " points per side, " +
                 std::to_string(opt.time_samples) + " times";
    return rep;
}

/// Random pairs x1 < 0 < x2 with log-uniform distances to 0 in [min_gap, max_gap].
inline std::vector<std::pair<ode::State, ode::State>> straddling_pairs(std::size_t count, double min_gap, double max_gap,
                                                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(std::log(min_gap), std::log(max_gap));
    std::vector<std::pair<ode::State, ode::State>> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back({{-std::exp(u(rng))}, {std::exp(u(rng))}});
    return out;
}

struct HolderExponent {
    double exponent = 0.0;
    std::vector<double> gaps;
    std::vector<double> differences;
};

/// Log-log slope of |u(d, t) - u(-d, t)| against 2d for geometric d.
inline HolderExponent empirical_holder_exponent(const FlowField& f, double t, double d_min = 1e-6, double d_max = 1e-2,
                                                std::size_t count = 13, double tol = 1e-13) {
    if (f.dim != 1) throw InputError("empirical_holder_exponent: one-dimensional fields only");
    HolderExponent h;
    for (std::size_t k = 0; k < count; ++k) {
        const double d = d_min * std::pow(d_max / d_min, static_cast<double>(k) / static_cast<double>(count - 1));
        const auto a = detail::variational(f, {d}, t, 2, tol);
        const auto b = detail::variational(f, {-d}, t, 2, tol);
        h.gaps.push_back(2.0 * d);
        h.differences.push_back(std::abs(a.u(0, 0) - b.u(0, 0)));
    }
    // identical derivatives on both sides: no measurable modulus, any exponent holds
    if (*std::max_element(h.differences.begin(), h.differences.end()) == 0.0) {
        h.exponent = std::numeric_limits<double>::infinity();
        return h;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double N = static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = std::log(h.gaps[k]), y = std::log(h.differences[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    h.exponent = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    return h;
}

} // namespace ahspec::gauge
