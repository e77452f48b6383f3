#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/expr.hpp"
#include "ahspec/core/finite_difference.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/geometry/curvature.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::spectral {

/// Radial solution of (Delta_g + n + 1) u = 0 with u ~ 1/r, r = C e^{-t}.
/// Besides u and its derivatives it keeps the differences u' - u, u'' - u and
/// u''' - u', formed without cancellation, because G = |du|^2 - u^2 and the
/// subharmonicity identity live at scale e^{-2t} relative to u^2.
struct GrowthEigenfunction {
    geometry::WarpedMetric metric;
    double scale = 1.0; ///< C
    double boundary_scalar = 0.0;
    double boundary_anisotropy = 1.0; ///< q_max / q_min of the boundary metric
    double c = 0.0; ///< coefficient of r in the ansatz, Rhat / (4n(n-1))
    std::vector<double> t{}, r{}, u{}, du{}, d2u{}, d3u{};
    std::vector<double> e1{}; ///< u' - u
    std::vector<double> e2{}; ///< u'' - u
    std::vector<double> e3{}; ///< u''' - u'
    std::vector<double> v{};  ///< (u - 1/r) / r
    std::vector<double> G{};  ///< |du|^2 - u^2
    std::vector<double> w{};  ///< correction to the reference function
    double residual = 0.0;  ///< sup of the discrete residual of (Delta + n + 1)
    double relative_residual = 0.0; ///< sup |(Delta + n + 1) u| / u with stored derivatives
    double sup_u_minus_rinv = 0.0;
    std::string source{}; ///< "solver" or "closed-form"
    std::string scheme{};

    [[nodiscard]] int n() const { return metric.n(); }
};

struct EigenfunctionOptions {
    std::size_t refinement_steps = 2;
    /// Starting point of iterative refinement; zero when unset.
    std::optional<std::vector<double>> initial_iterate;
    double solver_tol = 1e-8;
};

namespace detail {

inline double anisotropy(const geometry::HomogeneousBoundaryMetric& b) {
    const auto [lo, hi] = std::minmax_element(b.coefficients.begin(), b.coefficients.end());
    return *hi / *lo;
}

inline double ansatz_coefficient(int n, double rhat) { return n >= 2 ? rhat / (4.0 * n * (n - 1)) : 0.0; }

/// Fill v, G, relative residual and the bounded-part diagnostic from u-derivatives and differences.
inline void finish_fields(GrowthEigenfunction& ge, const std::vector<double>& p) {
    const std::size_t N = ge.t.size();
    const int n = ge.n();
    ge.G.resize(N);
    ge.relative_residual = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        ge.G[i] = ge.e1[i] * (ge.du[i] + ge.u[i]);
        if (i == 0 && ge.metric.origin_closure()) continue;
        const double Lu = -ge.d2u[i] - p[i] * ge.du[i] + (n + 1) * ge.u[i];
        if (i > 0 && i + 1 < N) ge.relative_residual = std::max(ge.relative_residual, std::abs(Lu) / ge.u[i]);
    }
}

} // namespace detail

/// Solves -u'' - (V'/V) u' + (n+1) u = 0 with u r -> 1 for the geodesic
/// defining function r = C e^{-t}. Unknown: w = u - u0 with the even reference
///   u0 = (2/C) cosh t + b sech t,  b = (c - 1/C^2) C / 2,
/// which is 1/r + c r + O(r^3) at infinity and smooth at the pole, so w is
/// even and decays; Robin condition w' + (n+1) w = 0 at t_max.
inline GrowthEigenfunction solve_growth_eigenfunction(const geometry::WarpedMetric& g, double scale,
                                                      const EigenfunctionOptions& opt = {}) {
    if (!g.origin_closure()) throw InputError("growth eigenfunction: metric needs a smooth pole at t = 0");
    if (!(scale > 0.0)) throw InputError("growth eigenfunction: defining-function scale must be positive");
    const int n = g.n();
    const auto tt = g.grid().points();
    const std::size_t N = tt.size();

    GrowthEigenfunction ge{.metric = g};
    ge.scale = scale;
    ge.source = "solver";
    ge.t.assign(tt.begin(), tt.end());
    {
        geometry::GaugeChoice gc;
        gc.scale = scale;
        const auto ci = geometry::conformal_infinity(g, gc);
        ge.boundary_scalar = geometry::boundary_scalar(ci.boundary);
        ge.boundary_anisotropy = detail::anisotropy(ci.boundary);
    }
    ge.c = detail::ansatz_coefficient(n, ge.boundary_scalar);
    const auto jets = geometry::profile_jets(g, geometry::Derivatives::Auto);
    const auto p = geometry::log_volume_derivative(g, jets);
    if (n == 1) {
        // 1/r + c r solves the equation to this order iff c = kappa / (2 C^2),
        // p = n + kappa e^{-2t} + ...; for n >= 2 that is the Rhat formula.
        std::vector<double> xs, ys;
        for (double T : {g.grid().t_max() - 6.0, g.grid().t_max() - 5.0, g.grid().t_max() - 4.0}) {
            if (T < 2.0) throw InputError("growth eigenfunction: grid too short to read the collar expansion");
            xs.push_back(std::exp(-2.0 * T));
            ys.push_back(std::exp(2.0 * T) * (interpolate_cubic(ge.t, p, T) - n));
        }
        ge.c = extrapolate_to_zero(xs, ys).value / (2.0 * scale * scale);
    }
    const double c = ge.c;
    const double a0 = 2.0 / scale, b0 = (c - 1.0 / (scale * scale)) * scale / 2.0;
    const fd::Differentiator D(g.grid(), fd::Parity::Even, fd::EndOrder::Fourth);
    ge.scheme = D.scheme();

    // n - p without cancellation
    std::vector<double> n_minus_p(N, 0.0);
    for (std::size_t i = 1; i < N; ++i)
        for (std::size_t k = 0; k < jets.f.size(); ++k)
            n_minus_p[i] += g.profiles()[k].multiplicity * (1.0 - jets.df[k][i] / jets.f[k][i]);

    // reference function and its small differences
    std::vector<double> r(N), U0(N), dU0(N), E1(N), E2(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = tt[i], sech = 1.0 / std::cosh(t), th = std::tanh(t);
        r[i] = scale * std::exp(-t);
        U0[i] = a0 * std::cosh(t) + b0 * sech;
        dU0[i] = a0 * std::sinh(t) - b0 * sech * th;
        E1[i] = -a0 * std::exp(-t) - b0 * sech * (1.0 + th); // u0' - u0
        E2[i] = -2.0 * b0 * sech * sech * sech;              // u0'' - u0
    }
    // source -L u0, L u = -u'' - p u' + (n+1) u = -(u'' - u) - p (u' - u) + (n - p) u;
    // at the pole L u = (n+1)(u - u'')
    std::vector<double> S(N, 0.0);
    S[0] = (n + 1) * E2[0];
    for (std::size_t i = 1; i + 1 < N; ++i) S[i] = E2[i] + p[i] * E1[i] - n_minus_p[i] * U0[i];
    S[N - 1] = 0.0;

    using Sp = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& row = D.row(i);
        const auto ii = static_cast<int>(i);
        for (std::size_t k = 0; k < row.index.size(); ++k) {
            const int jj = static_cast<int>(row.index[k]);
            if (i == 0) trip.emplace_back(ii, jj, -(n + 1) * row.d2[k]);
            else if (i + 1 < N) trip.emplace_back(ii, jj, -row.d2[k] - p[i] * row.d1[k]);
            else trip.emplace_back(ii, jj, row.d1[k]);
        }
        trip.emplace_back(ii, ii, n + 1.0);
    }
    Sp A(static_cast<int>(N), static_cast<int>(N));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Sp> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw NumericalDiagnostic("growth eigenfunction: discrete system is singular; refine the grid (" +
                                  lu.lastErrorMessage() + ")");
    const Eigen::Map<const Eigen::VectorXd> rhs(S.data(), static_cast<Eigen::Index>(N));
    Eigen::VectorXd W = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    if (opt.initial_iterate) {
        if (opt.initial_iterate->size() != N) throw InputError("growth eigenfunction: initial iterate has the wrong size");
        W = Eigen::Map<const Eigen::VectorXd>(opt.initial_iterate->data(), static_cast<Eigen::Index>(N));
    }
    for (std::size_t k = 0; k <= opt.refinement_steps; ++k) {
        const Eigen::VectorXd res = rhs - A * W;
        W += lu.solve(res);
    }
    if (!W.allFinite()) throw NumericalDiagnostic("growth eigenfunction: solution is not finite; refine the grid");
    ge.residual = (A * W - rhs).cwiseAbs().maxCoeff();
    if (ge.residual > opt.solver_tol)
        throw NumericalDiagnostic("growth eigenfunction: solver residual " + std::to_string(ge.residual) +
                                  " exceeds tolerance; the discrete system is ill-conditioned");

    ge.w.assign(W.data(), W.data() + N);
    const auto dw = D.first(ge.w);
    const auto d2w = D.second(ge.w);
    ge.r = r;
    ge.u.resize(N);
    ge.du.resize(N);
    ge.d2u.resize(N);
    ge.d3u.resize(N);
    ge.e1.resize(N);
    ge.e2.resize(N);
    ge.e3.resize(N);
    ge.v.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        ge.u[i] = U0[i] + ge.w[i];
        ge.du[i] = dU0[i] + dw[i];
        ge.e1[i] = E1[i] + dw[i] - ge.w[i];
        // (u0 - 1/r) / r = 1/C^2 + b sech t / r
        ge.v[i] = 1.0 / (scale * scale) + (b0 / std::cosh(tt[i]) + ge.w[i]) / r[i];
        ge.sup_u_minus_rinv = std::max(ge.sup_u_minus_rinv, std::abs(r[i] * ge.v[i]));
    }
    // u'' and u''' by differencing w rather than from the equation, so the
    // subharmonicity identity sees the discretization error
    const auto d3w = D.first(d2w);
    for (std::size_t i = 0; i < N; ++i) {
        const double sech = 1.0 / std::cosh(tt[i]);
        const double E3 = 6.0 * b0 * sech * sech * sech * std::tanh(tt[i]); // u0''' - u0'
        ge.e2[i] = E2[i] + d2w[i] - ge.w[i];
        ge.e3[i] = E3 + d3w[i] - dw[i];
        ge.d2u[i] = ge.e2[i] + ge.u[i];
        ge.d3u[i] = ge.e3[i] + ge.du[i];
    }
    ge.du[0] = ge.d3u[0] = ge.e3[0] = 0.0;
    ge.e1[0] = -ge.u[0];
    for (std::size_t i = 0; i < N; ++i)
        if (!(ge.u[i] > 0.0))
            throw NumericalDiagnostic("growth eigenfunction: u <= 0 at t = " + std::to_string(tt[i]) +
                                      " (a positive solution must exist); refine the grid");
    detail::finish_fields(ge, p);
    return ge;
}

/// A known closed-form solution packaged with exact derivatives.
inline GrowthEigenfunction growth_eigenfunction_from_expression(const geometry::WarpedMetric& g, double scale,
                                                                const Expr& u_expr) {
    const int n = g.n();
    const auto tt = g.grid().points();
    const std::size_t N = tt.size();
    GrowthEigenfunction ge{.metric = g};
    ge.scale = scale;
    ge.source = "closed-form";
    ge.scheme = "exact";
    ge.t.assign(tt.begin(), tt.end());
    geometry::GaugeChoice gc;
    gc.scale = scale;
    const auto ci = geometry::conformal_infinity(g, gc);
    ge.boundary_scalar = geometry::boundary_scalar(ci.boundary);
    ge.boundary_anisotropy = detail::anisotropy(ci.boundary);
    ge.c = detail::ansatz_coefficient(n, ge.boundary_scalar);
    const Expr d1 = u_expr.derivative(), d2 = d1.derivative(), d3 = d2.derivative();
    const Expr E1 = d1 - u_expr, E2 = d2 - u_expr, E3 = d3 - d1;
    const auto jets = geometry::profile_jets(g, geometry::Derivatives::Auto);
    const auto p = geometry::log_volume_derivative(g, jets);
    ge.r = sample(tt, [&](double t) { return scale * std::exp(-t); });
    ge.u = sample(tt, u_expr);
    ge.du = sample(tt, d1);
    ge.d2u = sample(tt, d2);
    ge.d3u = sample(tt, d3);
    ge.e1 = sample(tt, E1);
    ge.e2 = sample(tt, E2);
    ge.e3 = sample(tt, E3);
    ge.v.resize(N);
    ge.w.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        ge.v[i] = (ge.u[i] - 1.0 / ge.r[i]) / ge.r[i];
        ge.w[i] = ge.u[i] - 1.0 / ge.r[i] - ge.c * ge.r[i];
        ge.sup_u_minus_rinv = std::max(ge.sup_u_minus_rinv, std::abs(ge.u[i] - 1.0 / ge.r[i]));
        if (!(ge.u[i] > 0.0)) throw InputError("growth eigenfunction: closed form is not positive");
    }
    detail::finish_fields(ge, p);
    ge.residual = 0.0;
    for (std::size_t i = 1; i < N; ++i)
        ge.residual = std::max(ge.residual, std::abs(-ge.d2u[i] - p[i] * ge.du[i] + (n + 1) * ge.u[i]));
    return ge;
}

// ---------------------------------------------------------------- boundary values

struct BoundaryLimit {
    Estimate limit{};
    std::optional<double> expected; ///< from Rhat; unset for n = 1
    double difference = std::numeric_limits<double>::quiet_NaN();
    bool inconclusive = false;
    std::vector<double> window;
    std::string note;
};

struct BoundaryLimitOptions {
    /// Moderate radii: sampling error in v and G grows like e^{2t}. Empty:
    /// {5, 6, 7} shifted out by ln(q_max/q_min)/2, because the expansion
    /// runs in (q_max/q_min) r^2.
    std::vector<double> window;
    double tol = 1e-3;
};

namespace detail {
inline BoundaryLimit extrapolated(const GrowthEigenfunction& ge, const std::vector<double>& field,
                                  const BoundaryLimitOptions& opt) {
    BoundaryLimit b;
    b.window = opt.window;
    if (b.window.empty()) {
        const double shift = 0.5 * std::log(ge.boundary_anisotropy);
        b.window = {5.0 + shift, 6.0 + shift, 7.0 + shift};
    }
    std::vector<double> xs, ys;
    for (double w : b.window) {
        if (w < ge.t.front() || w > ge.t.back()) throw InputError("boundary limit: window outside the grid");
        xs.push_back(std::exp(-w));
        ys.push_back(interpolate_cubic(ge.t, field, w));
    }
    b.limit = extrapolate_to_zero(xs, ys);
    b.inconclusive = !(b.limit.error <= opt.tol);
    return b;
}
} // namespace detail

/// lim v = Rhat / (4n(n-1)) at the boundary.
inline BoundaryLimit boundary_v_limit(const GrowthEigenfunction& ge, const BoundaryLimitOptions& opt = {}) {
    BoundaryLimit b = detail::extrapolated(ge, ge.v, opt);
    const int n = ge.n();
    if (n >= 2) {
        b.expected = ge.boundary_scalar / (4.0 * n * (n - 1));
        b.difference = b.limit.value - *b.expected;
    } else {
        b.note = "n = 1: the boundary is a curve and Rhat / (4n(n-1)) is undefined; raw limit only";
    }
    return b;
}

/// lim (|du|^2 - u^2) = -Rhat / (n(n-1)) at the boundary.
inline BoundaryLimit gradient_defect_boundary(const GrowthEigenfunction& ge, const BoundaryLimitOptions& opt = {}) {
    BoundaryLimit b = detail::extrapolated(ge, ge.G, opt);
    const int n = ge.n();
    if (n >= 2) {
        b.expected = -ge.boundary_scalar / (n * (n - 1.0));
        b.difference = b.limit.value - *b.expected;
    } else {
        b.note = "n = 1: the comparison value -Rhat / (n(n-1)) is undefined; raw limit only";
    }
    return b;
}

// ---------------------------------------------------------------- subharmonicity

struct SubharmonicityReport {
    std::vector<double> t;
    std::vector<double> laplacian_G; ///< Delta G = -(G'' + p G'), positive-spectrum convention
    std::vector<double> ricci_term;  ///< 2 (Rc + n g)(du, du)
    std::vector<double> b_squared;   ///< |b|^2, b = Hess u + (Delta u / (n+1)) g
    std::vector<double> identity;    ///< Delta G + ricci_term + 2 |b|^2
    double laplacian_G_at_pole = 0.0;
    double sup_laplacian_G = 0.0;          ///< sup of Delta G (must be <= tol)
    double sup_relative_laplacian_G = 0.0; ///< sup of Delta G / u^2
    bool subharmonic = false;
    bool identity_checked = true;
    double identity_residual = 0.0;          ///< sup |identity|
    double relative_identity_residual = 0.0; ///< sup |identity| / u^2
    double einstein_residual = 0.0;
    double max_principle_excess = 0.0; ///< max(0, sup G - max(G(pole), G(boundary)))
    std::string derivatives;
    std::vector<std::string> warnings;
};

struct SubharmonicityOptions {
    double tol = 1e-6;
    double einstein_tol = 1e-6;
    geometry::Derivatives derivatives = geometry::Derivatives::Auto;
    /// Window for the boundary value of G used by the maximum-principle check.
    BoundaryLimitOptions boundary{};
};

inline SubharmonicityReport subharmonicity_check(const GrowthEigenfunction& ge, const SubharmonicityOptions& opt = {}) {
    const auto& g = ge.metric;
    const int n = g.n();
    const std::size_t N = ge.t.size();
    SubharmonicityReport rep;
    rep.t = ge.t;
    const auto jets = geometry::profile_jets(g, opt.derivatives);
    rep.derivatives = jets.scheme;
    const auto p = geometry::log_volume_derivative(g, jets);
    const auto slot = g.frame_profile();
    rep.einstein_residual = geometry::curvature(g).einstein_residual;
    if (!(rep.einstein_residual <= opt.einstein_tol)) {
        rep.identity_checked = false;
        rep.warnings.push_back("metric is not Einstein within tolerance (residual " +
                               std::to_string(rep.einstein_residual) + "); identity skipped, sign check only");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.laplacian_G.assign(N, nan);
    rep.ricci_term.assign(N, nan);
    rep.b_squared.assign(N, nan);
    rep.identity.assign(N, nan);
    rep.sup_laplacian_G = -std::numeric_limits<double>::infinity();
    rep.sup_relative_laplacian_G = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        if (i == 0 && g.origin_closure()) continue;
        // G' = 2 u' (u'' - u), G'' = 2 u'' (u'' - u) + 2 u' (u''' - u')
        const double dG = 2.0 * ge.du[i] * ge.e2[i];
        const double d2G = 2.0 * ge.d2u[i] * ge.e2[i] + 2.0 * ge.du[i] * ge.e3[i];
        const double lapG = -(d2G + p[i] * dG);
        double ric_tt = 0.0;
        for (std::size_t k = 0; k < jets.f.size(); ++k)
            ric_tt -= g.profiles()[k].multiplicity * jets.d2f[k][i] / jets.f[k][i];
        const double ricci = 2.0 * (ric_tt + n) * ge.du[i] * ge.du[i];
        // traceless Hessian from small quantities: n - p, l_a - 1, u' - u, u'' - u
        double n_minus_p = 0.0;
        for (std::size_t k = 0; k < jets.f.size(); ++k)
            n_minus_p += g.profiles()[k].multiplicity * (1.0 - jets.df[k][i] / jets.f[k][i]);
        const double btt = (n * ge.e2[i] - p[i] * ge.e1[i] + n_minus_p * ge.u[i]) / (n + 1.0);
        double b2 = btt * btt;
        for (std::size_t a = 0; a < slot.size(); ++a) {
            const double lm1 = jets.df[slot[a]][i] / jets.f[slot[a]][i] - 1.0;
            const double baa =
                ((n + 1) * lm1 * ge.du[i] + n_minus_p * ge.u[i] + (n + 1 - p[i]) * ge.e1[i] - ge.e2[i]) / (n + 1.0);
            b2 += baa * baa;
        }
        rep.laplacian_G[i] = lapG;
        rep.ricci_term[i] = ricci;
        rep.b_squared[i] = b2;
        rep.identity[i] = lapG + ricci + 2.0 * b2;
        const double u2 = ge.u[i] * ge.u[i];
        if (i + 1 < N) {
            rep.sup_laplacian_G = std::max(rep.sup_laplacian_G, lapG);
            rep.sup_relative_laplacian_G = std::max(rep.sup_relative_laplacian_G, lapG / u2);
            if (rep.identity_checked) {
                rep.identity_residual = std::max(rep.identity_residual, std::abs(rep.identity[i]));
                rep.relative_identity_residual = std::max(rep.relative_identity_residual, std::abs(rep.identity[i]) / u2);
            }
        }
    }
    // Delta G at the pole: -(n+1) G''(0), G''(0) = 2 u''(0) (u''(0) - u(0))
    if (g.origin_closure()) rep.laplacian_G_at_pole = -(n + 1) * 2.0 * ge.d2u[0] * ge.e2[0];
    rep.subharmonic = rep.sup_relative_laplacian_G <= opt.tol;
    if (!rep.identity_checked) rep.identity_residual = rep.relative_identity_residual = nan;

    // beyond the window G is roundoff on top of u^2 ~ e^{2t}; its boundary value is the extrapolation
    const auto Gb = detail::extrapolated(ge, ge.G, opt.boundary);
    const double G_boundary = Gb.limit.value;
    const auto stop = g.grid().index_at_or_below(Gb.window.back() + 1e-12) + 1;
    const double G_max = *std::max_element(ge.G.begin(), ge.G.begin() + static_cast<std::ptrdiff_t>(stop));
    rep.max_principle_excess = std::max(0.0, G_max - std::max(ge.G.front(), G_boundary));
    return rep;
}

// ---------------------------------------------------------------- certificate

struct CertificateResult {
    double s = 0.0;
    bool success = false;
    double bound = 0.0;      ///< s(n - s), certified when success
    double inf_ratio = 0.0;  ///< inf Delta phi / phi over the grid
    double sup_gradient_ratio = 0.0; ///< sup |du|^2 / u^2
    bool gradient_estimate_holds = false;
    double tol = 0.0;
    /// Grid intervals where Delta phi / phi < s(n - s) - tol.
    std::vector<std::pair<double, double>> violations;
    std::string condition;
};

/// phi = u^{-s}: Delta phi / phi = s(n+1) - s(s+1) |du|^2 / u^2. When the
/// infimum is at least s(n-s), phi is a positive supersolution and
/// lambda_0 >= s(n-s).
inline CertificateResult certificate_lower_bound(const GrowthEigenfunction& ge, double s, double tol = 1e-6) {
    if (!(s > 0.0)) throw InputError("certificate: s must be positive");
    const int n = ge.n();
    CertificateResult c;
    c.s = s;
    c.tol = tol;
    c.bound = s * (n - s);
    c.condition = "conditional on the positive-supersolution principle: a positive phi with Delta phi >= lambda phi "
                  "implies lambda_0 >= lambda";
    c.inf_ratio = std::numeric_limits<double>::infinity();
    c.sup_gradient_ratio = 0.0;
    std::optional<double> open;
    double last_t = 0.0;
    for (std::size_t i = 0; i < ge.t.size(); ++i) {
        // |du|^2 / u^2 = 1 + G / u^2
        const double q = 1.0 + ge.G[i] / (ge.u[i] * ge.u[i]);
        const double ratio = s * (n + 1) - s * (s + 1) * q;
        c.inf_ratio = std::min(c.inf_ratio, ratio);
        c.sup_gradient_ratio = std::max(c.sup_gradient_ratio, q);
        const bool bad = ratio < c.bound - tol;
        if (bad && !open) open = ge.t[i];
        if (!bad && open) {
            c.violations.emplace_back(*open, last_t);
            open.reset();
        }
        last_t = ge.t[i];
    }
    if (open) c.violations.emplace_back(*open, last_t);
    c.gradient_estimate_holds = c.sup_gradient_ratio <= 1.0 + tol;
    c.success = c.violations.empty();
    return c;
}

} // namespace ahspec::spectral
