#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/geometry/homogeneous.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::geometry {

/// Normalization of the compactification r = C e^{-t}.
struct GaugeChoice {
    /// Explicit C; when unset, C is chosen so the profile family with the
    /// largest multiplicity gets boundary coefficient `representative`.
    std::optional<double> scale;
    double representative = 1.0;
};

struct ConformalInfinity {
    HomogeneousBoundaryMetric boundary;
    double scale = 1.0;                  ///< C in r = C e^{-t}
    std::vector<Estimate> profile_limits; ///< lim e^{-t} f_i(t) per profile
    std::vector<double> window;           ///< t values used for extrapolation
    double residual = 0.0;                ///< largest relative extrapolation spread
};

namespace detail {
inline std::vector<double> default_window(const RadialGrid& g) {
    const double T = g.t_max();
    return {T - 2.0, T - 1.0, T};
}
} // namespace detail

/// Boundary coefficients lim (C e^{-t} f_i)^2, extrapolated in x = e^{-t}.
inline ConformalInfinity conformal_infinity(const WarpedMetric& g, const GaugeChoice& gauge = {},
                                            std::vector<double> window = {}, double tol = 1e-6) {
    if (window.empty()) window = detail::default_window(g.grid());
    for (double w : window)
        if (w < g.grid().t_min() || w > g.grid().t_max())
            throw InputError("conformal_infinity: extrapolation window outside the grid");
    const auto t = g.grid().points();
    ConformalInfinity out;
    out.window = window;
    std::vector<double> xs;
    for (double w : window) xs.push_back(std::exp(-w));
    for (const auto& p : g.profiles()) {
        std::vector<double> ys;
        for (double w : window) ys.push_back(std::exp(-w) * interpolate_cubic(t, p.f, w));
        Estimate e = extrapolate_to_zero(xs, ys);
        if (!(e.value > 0.0) || !std::isfinite(e.value))
            throw NumericalDiagnostic("conformal_infinity: boundary limit of e^{-t} f is not positive");
        out.residual = std::max(out.residual, e.error / e.value);
        out.profile_limits.push_back(e);
    }
    if (out.residual > tol)
        throw NumericalDiagnostic("conformal_infinity: limit did not converge (relative spread " +
                                  std::to_string(out.residual) + ")");
    if (gauge.scale) {
        if (!(*gauge.scale > 0.0)) throw InputError("conformal_infinity: gauge scale must be positive");
        out.scale = *gauge.scale;
    } else {
        if (!(gauge.representative > 0.0)) throw InputError("conformal_infinity: representative must be positive");
        std::size_t lead = 0;
        for (std::size_t i = 1; i < g.profiles().size(); ++i)
            if (g.profiles()[i].multiplicity > g.profiles()[lead].multiplicity) lead = i;
        out.scale = std::sqrt(gauge.representative) / out.profile_limits[lead].value;
    }
    out.boundary.slice = g.slice();
    for (std::size_t k : g.frame_profile()) {
        const double c = out.scale * out.profile_limits[k].value;
        out.boundary.coefficients.push_back(c * c);
    }
    return out;
}

/// 1D asymptotic hyperbolicity: f_i'/f_i -> 1 and radial sectional curvature
/// -f_i''/f_i -> -1 towards t_max.
struct AHDiagnostic {
    std::vector<double> log_derivative_defect; ///< sup |f'/f - 1| on the collar, per profile
    std::vector<double> sectional_defect;      ///< sup |f''/f - 1| on the collar, per profile
    double collar_start = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

inline AHDiagnostic ah_diagnostic(const WarpedMetric& g, double tol = 1e-3, double collar_fraction = 0.1,
                                  Derivatives mode = Derivatives::Auto) {
    const ProfileJets j = profile_jets(g, mode);
    const auto t = g.grid().points();
    AHDiagnostic d;
    d.tolerance = tol;
    d.collar_start = g.grid().t_max() - collar_fraction * (g.grid().t_max() - g.grid().t_min());
    d.passed = true;
    for (std::size_t k = 0; k < j.f.size(); ++k) {
        double a = 0.0, b = 0.0;
        // skip the end node, where finite differences drop to one-sided stencils
        const std::size_t last = t.size() >= 2 ? t.size() - 2 : 0;
        for (std::size_t i = 0; i <= last; ++i) {
            if (t[i] < d.collar_start) continue;
            a = std::max(a, std::abs(j.df[k][i] / j.f[k][i] - 1.0));
            b = std::max(b, std::abs(j.d2f[k][i] / j.f[k][i] - 1.0));
        }
        d.log_derivative_defect.push_back(a);
        d.sectional_defect.push_back(b);
        if (!(a <= tol) || !(b <= tol)) d.passed = false;
    }
    return d;
}

struct CurvatureOptions {
    Derivatives derivatives = Derivatives::FiniteDifference;
    /// Largest grid spacing accepted for the five-point stencils.
    double coarse_limit = 0.25;
};

struct CurvatureReport {
    std::vector<double> t;
    /// Ricci eigenvalues in an orthonormal frame, ascending, per grid point.
    std::vector<std::vector<double>> ricci_eigenvalues;
    std::vector<double> radial_ricci; ///< Rc(d_t, d_t)
    std::vector<double> scalar;
    std::vector<double> residual; ///< operator norm of Rc + n g per point
    /// Points with centred stencils, away from the pole node.
    std::size_t first_interior = 0;
    std::size_t last_interior = 0;
    double einstein_residual = 0.0;
    std::string scheme;
    int interior_order = 4;
    int end_order = 2;
    std::optional<BoundaryScalar> boundary_scalar;
};

/// Ricci tensor of dt^2 + sum f_i^2 sigma_i^2 in the frame (d_t, f_i^{-1} E_i),
/// at a single point, from profile values and derivatives per frame slot.
inline Eigen::MatrixXd warped_ricci(const SliceGeometry& slice, const std::vector<double>& f,
                                    const std::vector<double>& df, const std::vector<double>& d2f) {
    const std::size_t n = f.size();
    std::vector<double> q(n);
    double trL = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        q[a] = f[a] * f[a];
        trL += df[a] / f[a];
    }
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    ric.bottomRightCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = slice_ricci(slice, q);
    for (std::size_t a = 0; a < n; ++a) {
        const double l = df[a] / f[a];
        const double k = d2f[a] / f[a];
        ric(0, 0) -= k;
        ric(static_cast<Eigen::Index>(a + 1), static_cast<Eigen::Index>(a + 1)) += -k + l * l - trL * l;
    }
    return ric;
}

inline CurvatureReport curvature(const WarpedMetric& g, const CurvatureOptions& opt = {}) {
    const auto t = g.grid().points();
    const std::size_t N = t.size();
    if (N < 5 || g.grid().max_spacing() > opt.coarse_limit)
        throw NumericalDiagnostic("curvature: grid too coarse for the five-point stencils (" + std::to_string(N) +
                                  " points, max spacing " + std::to_string(g.grid().max_spacing()) +
                                  "); refine the grid");
    const ProfileJets j = profile_jets(g, opt.derivatives);
    const auto slot = g.frame_profile();
    const int n = g.n();
    CurvatureReport rep;
    rep.t.assign(t.begin(), t.end());
    rep.scheme = j.scheme;
    rep.end_order = opt.derivatives == Derivatives::Auto && g.closed_form() ? 4 : 2;
    rep.first_interior = g.origin_closure() ? 1 : 2;
    rep.last_interior = N - 3;
    rep.ricci_eigenvalues.resize(N);
    rep.radial_ricci.assign(N, std::nan(""));
    rep.scalar.assign(N, std::nan(""));
    rep.residual.assign(N, std::nan(""));
    std::vector<double> f(slot.size()), df(slot.size()), d2f(slot.size());
    for (std::size_t i = 0; i < N; ++i) {
        if (i == 0 && g.origin_closure()) continue; // coordinate pole
        for (std::size_t a = 0; a < slot.size(); ++a) {
            f[a] = j.f[slot[a]][i];
            df[a] = j.df[slot[a]][i];
            d2f[a] = j.d2f[slot[a]][i];
        }
        const Eigen::MatrixXd ric = warped_ricci(g.slice(), f, df, d2f);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ric, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        rep.ricci_eigenvalues[i].assign(ev.data(), ev.data() + ev.size());
        rep.radial_ricci[i] = ric(0, 0);
        rep.scalar[i] = ric.trace();
        rep.residual[i] = (ev.array() + n).abs().maxCoeff();
        if (i >= rep.first_interior && i <= rep.last_interior)
            rep.einstein_residual = std::max(rep.einstein_residual, rep.residual[i]);
    }
    if (ah_diagnostic(g).passed) {
        try {
            rep.boundary_scalar = boundary_scalar_detail(conformal_infinity(g).boundary);
        } catch (const NumericalDiagnostic&) {
            rep.boundary_scalar.reset();
        }
    }
    return rep;
}

/// Einstein identities near the boundary in the compactified metric
/// r^2 g = dr^2 + sum F_i^2 sigma_i^2, F_i = r f_i, r = C e^{-t}:
///   trace:    sum m_i F_i'/F_i + r Rt / (2n) = 0
///   radial:   Rt_rr = Rt / (2n)
///   boundary: Rhat = ((n-1)/n) Rt(r=0) = Rt(0) - 2 Rt_rr(0)
struct BoundaryIdentityReport {
    bool applicable = true;
    std::string note;
    double einstein_residual = 0.0;
    double trace_residual = 0.0;  ///< sup over the window
    double radial_residual = 0.0; ///< sup over the window, relative to Rt
    Estimate scalar_at_boundary;  ///< Rt extrapolated to r = 0
    Estimate radial_at_boundary;  ///< Rt_rr extrapolated to r = 0
    double boundary_scalar = 0.0; ///< Rhat of the extracted conformal infinity
    double scalar_identity_residual = 0.0; ///< |Rhat - (n-1)/n Rt(0)|
    double scalar_identity_error = 0.0;    ///< extrapolation error carried into that difference
    double alternate_identity_residual = 0.0; ///< |Rhat - (Rt(0) - 2 Rt_rr(0))|
    std::vector<double> window_t;
    std::vector<double> r, trace, scalar_tilde, radial_tilde;
    double scale = 1.0;
};

struct BoundaryIdentityOptions {
    /// Evaluation window in t. Unset: [3 + ln(q_max/q_min)/2, +4], since the
    /// expansion in r is one in (q_max/q_min) r^2 for an anisotropic boundary.
    std::optional<double> window_lo;
    std::optional<double> window_hi;
    std::size_t extrapolation_points = 5;
    double einstein_tol = 1e-6;
    Derivatives derivatives = Derivatives::Auto;
    GaugeChoice gauge{};
};

inline BoundaryIdentityReport einstein_boundary_identities(const WarpedMetric& g,
                                                           const BoundaryIdentityOptions& opt = {}) {
    BoundaryIdentityReport rep;
    const CurvatureReport cr = curvature(g);
    rep.einstein_residual = cr.einstein_residual;
    if (!(cr.einstein_residual <= opt.einstein_tol)) {
        rep.applicable = false;
        rep.note = "metric is not Einstein within tolerance (residual " + std::to_string(cr.einstein_residual) +
                   "); identities reported for reference only";
    }
    const ConformalInfinity ci = conformal_infinity(g, opt.gauge);
    rep.scale = ci.scale;
    rep.boundary_scalar = boundary_scalar(ci.boundary);
    const auto [qmin, qmax] = std::minmax_element(ci.boundary.coefficients.begin(), ci.boundary.coefficients.end());
    const double auto_lo = 3.0 + 0.5 * std::log(*qmax / *qmin);
    const double lo = std::max(opt.window_lo.value_or(auto_lo), g.grid().t_min());
    const double hi = std::min(opt.window_hi.value_or(lo + 4.0), g.grid().t_max());
    if (!(hi > lo)) throw InputError("boundary identities: empty evaluation window");

    const ProfileJets j = profile_jets(g, opt.derivatives);
    const auto slot = g.frame_profile();
    const auto t = g.grid().points();
    const int n = g.n();
    std::vector<double> xr, ys, yrr;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        const double r = ci.scale * std::exp(-t[i]);
        std::vector<double> F(slot.size()), dF(slot.size()), d2F(slot.size());
        for (std::size_t a = 0; a < slot.size(); ++a) {
            const std::size_t k = slot[a];
            F[a] = r * j.f[k][i];
            dF[a] = j.f[k][i] - j.df[k][i];
            d2F[a] = (j.d2f[k][i] - j.df[k][i]) / r;
        }
        const Eigen::MatrixXd ric = warped_ricci(g.slice(), F, dF, d2F);
        const double R = ric.trace();
        double tr = 0.0;
        for (std::size_t a = 0; a < slot.size(); ++a) tr += dF[a] / F[a];
        rep.window_t.push_back(t[i]);
        rep.r.push_back(r);
        rep.scalar_tilde.push_back(R);
        rep.radial_tilde.push_back(ric(0, 0));
        rep.trace.push_back(tr + r * R / (2.0 * n));
        rep.trace_residual = std::max(rep.trace_residual, std::abs(rep.trace.back()));
        rep.radial_residual =
            std::max(rep.radial_residual, std::abs(ric(0, 0) - R / (2.0 * n)) / std::max(1.0, std::abs(R)));
    }
    const std::size_t m = rep.r.size();
    if (m < opt.extrapolation_points)
        throw NumericalDiagnostic("boundary identities: window holds too few grid points");
    // equally spaced picks towards the outer end of the window
    for (std::size_t q = 0; q < opt.extrapolation_points; ++q) {
        const std::size_t i = m - 1 - q * ((m - 1) / (2 * opt.extrapolation_points));
        xr.push_back(rep.r[i]);
        ys.push_back(rep.scalar_tilde[i]);
        yrr.push_back(rep.radial_tilde[i]);
    }
    rep.scalar_at_boundary = extrapolate_to_zero(xr, ys);
    rep.radial_at_boundary = extrapolate_to_zero(xr, yrr);
    rep.scalar_identity_residual =
        std::abs(rep.boundary_scalar - static_cast<double>(n - 1) / n * rep.scalar_at_boundary.value);
    rep.scalar_identity_error = static_cast<double>(n - 1) / n * rep.scalar_at_boundary.error;
    rep.alternate_identity_residual =
        std::abs(rep.boundary_scalar - (rep.scalar_at_boundary.value - 2.0 * rep.radial_at_boundary.value));
    return rep;
}

} // namespace ahspec::geometry
