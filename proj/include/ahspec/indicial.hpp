#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/finite_difference.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/gauge/defining.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace ahspec::indicial {

/// Roots of s(n - s) + kappa = 0 and the weight interval |s - n/2|^2 < n^2/4 + kappa.
struct IndicialData {
    int n = 0;
    double kappa = 0.0;
    double s_minus = 0.0;
    double s_plus = 0.0;
    bool complex = false;
    double imag = 0.0; ///< imaginary part of the pair n/2 +- i*imag when complex
    /// Open interval (lo, hi); empty when complex or a double root.
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool interval_empty() const { return !(hi > lo); }
};

inline IndicialData indicial_roots(int n, double kappa) {
    if (n < 1) throw InputError("indicial: n must be >= 1");
    IndicialData d;
    d.n = n;
    d.kappa = kappa;
    const double c = 0.5 * n;
    const double disc = c * c + kappa;
    if (disc >= 0.0) {
        const double w = std::sqrt(disc);
        d.s_minus = c - w;
        d.s_plus = c + w;
        d.lo = d.s_minus;
        d.hi = d.s_plus;
    } else {
        d.complex = true;
        d.s_minus = d.s_plus = c;
        d.imag = std::sqrt(-disc);
        d.lo = d.hi = c;
    }
    return d;
}

inline bool weight_admissible(double s, int n, double kappa) {
    const double c = 0.5 * n;
    return (s - c) * (s - c) < c * c + kappa;
}

struct ConjugatedCoefficients {
    std::vector<double> t;
    std::vector<double> X; ///< radial coefficient of X = -2 s rho grad_{rho^2 g} rho
    std::vector<double> h;
    std::vector<double> drho_sq; ///< |d rho|^2 in rho^2 g
    std::vector<double> rho_lap; ///< rho * Laplacian_{rho^2 g} rho
    Estimate boundary_limit_h{};
    double expected_boundary_limit = 0.0; ///< kappa + s(n - s)
    double collar_start = 0.0;
    double collar_inf = 0.0;
    double delta = 0.0;
    /// Smallest t beyond which h >= delta on the grid; unset when no such collar.
    std::optional<double> positive_collar_start;
};

struct ConjugatedOptions {
    double collar_width = 4.0;
    double delta = 1e-3;
    std::vector<double> window{}; ///< extrapolation abscissae, default t_max - {3, 2, 1}
};

/// Coefficients of rho^{-s} (Delta_g + kappa) rho^s = Delta_g + X + h in the
/// radial reduction, with Laplacian of rho taken in the compactified metric.
inline ConjugatedCoefficients conjugated_coefficients(const geometry::WarpedMetric& g, const gauge::DefiningProfile& rho,
                                                      double s, double kappa, const ConjugatedOptions& opt = {}) {
    const auto t = g.grid().points();
    const std::size_t N = t.size();
    if (rho.rho.size() != N) throw InputError("conjugated_coefficients: defining profile lives on a different grid");
    for (std::size_t i = 0; i < N; ++i)
        if (std::abs(rho.grid[i] - t[i]) > 1e-12 * (1.0 + std::abs(t[i])))
            throw InputError("conjugated_coefficients: defining profile lives on a different grid");
    const int n = g.n();
    // compactified volume density Vbar = rho^{n+1} V and flux F = Vbar rho^{-2} rho'
    const auto V = geometry::volume_density(g);
    std::vector<double> Vbar(N), F(N);
    for (std::size_t i = 0; i < N; ++i) {
        Vbar[i] = std::pow(rho.rho[i], n + 1) * V[i];
        F[i] = Vbar[i] * rho.drho[i] / (rho.rho[i] * rho.rho[i]);
    }
    fd::Differentiator D(g.grid(), fd::Parity::None);
    const auto dF = D.first(F);

    ConjugatedCoefficients out;
    out.t.assign(t.begin(), t.end());
    out.X.resize(N);
    out.h.resize(N);
    out.drho_sq.resize(N);
    out.rho_lap.resize(N);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < N; ++i) {
        const double l = rho.drho[i] / rho.rho[i];
        out.X[i] = -2.0 * s * l;
        out.drho_sq[i] = l * l;
        if (!(Vbar[i] > 0.0)) {
            out.rho_lap[i] = nan;
            out.h[i] = nan;
            continue;
        }
        out.rho_lap[i] = -rho.rho[i] * dF[i] / Vbar[i];
        out.h[i] = kappa + s * (n - s) * out.drho_sq[i] + s * out.rho_lap[i];
    }

    out.expected_boundary_limit = kappa + s * (n - s);
    std::vector<double> window = opt.window;
    if (window.empty()) window = {g.grid().t_max() - 3.0, g.grid().t_max() - 2.0, g.grid().t_max() - 1.0};
    std::vector<double> xs, ys;
    for (double w : window) {
        if (w < t.front() || w > t.back()) throw InputError("conjugated_coefficients: window outside the grid");
        xs.push_back(std::exp(-w));
        ys.push_back(interpolate_cubic(t, out.h, w));
    }
    out.boundary_limit_h = extrapolate_to_zero(xs, ys);

    out.delta = opt.delta;
    out.collar_start = std::max(t.front(), g.grid().t_max() - opt.collar_width);
    out.collar_inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i)
        if (t[i] >= out.collar_start && std::isfinite(out.h[i])) out.collar_inf = std::min(out.collar_inf, out.h[i]);
    // walk inward from the boundary while h stays above delta
    std::optional<double> start;
    for (std::size_t k = N; k-- > 0;) {
        if (!(out.h[k] >= opt.delta)) break;
        start = t[k];
    }
    out.positive_collar_start = start;
    return out;
}

} // namespace ahspec::indicial
