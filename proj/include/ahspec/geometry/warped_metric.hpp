#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/expr.hpp"
#include "ahspec/core/finite_difference.hpp"
#include "ahspec/core/grid.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/geometry/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::geometry {

/// One warping function f_i(t) with multiplicity m_i. Derivative samples are
/// optional; closed-form profiles keep their expression.
struct Profile {
    std::vector<double> f;
    std::optional<std::vector<double>> df;
    std::optional<std::vector<double>> d2f;
    std::optional<Expr> expr;
    int multiplicity = 1;
};

/// g = dt^2 + sum_i f_i(t)^2 (sigma_i^2 over its multiplicity block).
class WarpedMetric {
public:
    WarpedMetric(int n, RadialGrid grid, std::vector<Profile> profiles, SliceGeometry slice,
                 bool origin_closure, std::string label = {})
        : n_(n), grid_(std::move(grid)), profiles_(std::move(profiles)), slice_(std::move(slice)),
          origin_closure_(origin_closure), label_(std::move(label)) {
        validate();
    }

    static WarpedMetric from_expressions(int n, RadialGrid grid, const std::vector<std::pair<Expr, int>>& exprs,
                                         SliceGeometry slice, bool origin_closure, std::string label = {}) {
        std::vector<Profile> ps;
        for (const auto& [e, m] : exprs) {
            Profile p;
            p.f = sample(grid.points(), e);
            p.expr = e;
            p.multiplicity = m;
            ps.push_back(std::move(p));
        }
        return WarpedMetric(n, std::move(grid), std::move(ps), std::move(slice), origin_closure, std::move(label));
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] const RadialGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<Profile>& profiles() const { return profiles_; }
    [[nodiscard]] const SliceGeometry& slice() const { return slice_; }
    [[nodiscard]] bool origin_closure() const { return origin_closure_; }
    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] bool closed_form() const {
        for (const auto& p : profiles_)
            if (!p.expr) return false;
        return true;
    }

    /// Frame index -> profile index (profiles fill consecutive frame slots).
    [[nodiscard]] std::vector<std::size_t> frame_profile() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < profiles_.size(); ++i)
            for (int k = 0; k < profiles_[i].multiplicity; ++k) out.push_back(i);
        return out;
    }

    /// Same metric on a different grid; closed-form profiles only.
    [[nodiscard]] WarpedMetric resampled(RadialGrid grid) const {
        if (!closed_form()) throw InputError("metric: only closed-form metrics can be resampled");
        std::vector<std::pair<Expr, int>> exprs;
        for (const auto& p : profiles_) exprs.emplace_back(*p.expr, p.multiplicity);
        return from_expressions(n_, std::move(grid), exprs, slice_, origin_closure_, label_);
    }

    /// Restriction to the nodes with t <= T.
    [[nodiscard]] WarpedMetric truncated(double T) const {
        const std::size_t last = grid_.index_at_or_below(T);
        std::vector<double> pts(grid_.points().begin(), grid_.points().begin() + static_cast<std::ptrdiff_t>(last + 1));
        std::vector<Profile> ps;
        for (const auto& p : profiles_) {
            Profile q;
            auto cut = [&](const std::vector<double>& v) {
                return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(last + 1));
            };
            q.f = cut(p.f);
            if (p.df) q.df = cut(*p.df);
            if (p.d2f) q.d2f = cut(*p.d2f);
            q.expr = p.expr;
            q.multiplicity = p.multiplicity;
            ps.push_back(std::move(q));
        }
        return WarpedMetric(n_, RadialGrid::explicit_points(std::move(pts)), std::move(ps), slice_, origin_closure_, label_);
    }

private:
    void validate() const {
        if (n_ < 1) throw InputError("metric: boundary dimension n must be >= 1");
        if (profiles_.empty()) throw InputError("metric: at least one profile is required");
        int total = 0;
        for (const auto& p : profiles_) {
            if (p.multiplicity < 1) throw InputError("metric: profile multiplicity must be >= 1");
            total += p.multiplicity;
            if (p.f.size() != grid_.size()) throw InputError("metric: profile sample count does not match grid");
            if (p.df && p.df->size() != grid_.size()) throw InputError("metric: derivative sample count does not match grid");
            if (p.d2f && p.d2f->size() != grid_.size()) throw InputError("metric: second-derivative sample count does not match grid");
        }
        if (total != n_) throw InputError("metric: multiplicities must sum to n");
        if (slice_.dim != n_) throw InputError("metric: slice dimension must equal n");
        if (slice_.kind == SliceGeometry::Kind::RoundSphere && profiles_.size() != 1)
            throw InputError("metric: a round sphere slice takes exactly one profile");
        if (origin_closure_ && grid_.t_min() != 0.0)
            throw InputError("metric: origin closure requires t_min = 0");
        const auto t = grid_.points();
        for (const auto& p : profiles_) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i == 0 && origin_closure_) continue;
                if (!(p.f[i] > 0.0) || !std::isfinite(p.f[i]))
                    throw InputError("metric: profile vanishes or is not finite at t = " + std::to_string(t[i]) +
                                     " (degenerate metric)");
            }
        }
    }

    int n_;
    RadialGrid grid_;
    std::vector<Profile> profiles_;
    SliceGeometry slice_;
    bool origin_closure_;
    std::string label_;
};

/// dt^2 + sinh^2(t) g_{S^n}: hyperbolic space H^{n+1}.
inline WarpedMetric make_hyperbolic(int n, const RadialGrid& grid) {
    if (n < 1) throw InputError("make_hyperbolic: n must be >= 1");
    if (grid.t_min() > 0.0)
        throw InputError("make_hyperbolic: origin closure needs a grid starting at t = 0");
    return WarpedMetric::from_expressions(n, grid, {{Expr::parse("sinh(t)"), n}}, SliceGeometry::round_sphere(n),
                                          true, "H^" + std::to_string(n + 1));
}

/// Default grid for closed-form AH metrics.
inline RadialGrid default_grid(double t_max, double spacing = 0.01) {
    return RadialGrid::uniform(0.0, t_max, static_cast<std::size_t>(std::llround(t_max / spacing)) + 1);
}

/// How profile derivatives are obtained.
enum class Derivatives {
    FiniteDifference, ///< always differentiate the samples
    Auto              ///< exact (expression) > supplied samples > finite differences
};

struct ProfileJets {
    std::vector<std::vector<double>> f, df, d2f;
    std::string scheme;
};

inline ProfileJets profile_jets(const WarpedMetric& g, Derivatives mode) {
    ProfileJets out;
    const auto t = g.grid().points();
    std::optional<fd::Differentiator> diff;
    std::vector<std::string> parts;
    for (const auto& p : g.profiles()) {
        out.f.push_back(p.f);
        if (mode == Derivatives::Auto && p.expr) {
            const Expr d1 = p.expr->derivative();
            const Expr d2 = d1.derivative();
            out.df.push_back(sample(t, d1));
            out.d2f.push_back(sample(t, d2));
            parts.emplace_back("exact");
        } else if (mode == Derivatives::Auto && p.df && p.d2f) {
            out.df.push_back(*p.df);
            out.d2f.push_back(*p.d2f);
            parts.emplace_back("supplied");
        } else if (g.origin_closure()) {
            // f = t phi with phi even and smooth: differentiating phi keeps the
            // error of f'/f at O(h^4) right up to the pole instead of O(h^4/t).
            if (!diff) diff.emplace(g.grid(), fd::Parity::Even, fd::EndOrder::Second);
            const std::size_t N = t.size();
            std::vector<double> phi(N);
            for (std::size_t i = 1; i < N; ++i) phi[i] = p.f[i] / t[i];
            std::vector<double> x2, y;
            for (std::size_t i = 1; i <= 4 && i < N; ++i) {
                x2.push_back(t[i] * t[i]);
                y.push_back(phi[i]);
            }
            phi[0] = neville_at_zero(x2, y);
            const auto d1 = diff->first(phi);
            const auto d2 = diff->second(phi);
            std::vector<double> df(N), d2f(N);
            for (std::size_t i = 0; i < N; ++i) {
                df[i] = phi[i] + t[i] * d1[i];
                d2f[i] = 2.0 * d1[i] + t[i] * d2[i];
            }
            out.df.push_back(std::move(df));
            out.d2f.push_back(std::move(d2f));
            parts.emplace_back(diff->scheme() + ";pole-factored");
        } else {
            if (!diff) diff.emplace(g.grid(), fd::Parity::None, fd::EndOrder::Second);
            out.df.push_back(diff->first(p.f));
            out.d2f.push_back(diff->second(p.f));
            parts.emplace_back(diff->scheme());
        }
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    for (std::size_t i = 0; i < parts.size(); ++i) out.scheme += (i ? "+" : "") + parts[i];
    return out;
}

/// V(t) = prod_i f_i(t)^{m_i}; the radial Laplacian is -u'' - (V'/V) u'.
inline std::vector<double> volume_density(const WarpedMetric& g) {
    std::vector<double> v(g.grid().size(), 1.0);
    for (const auto& p : g.profiles())
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::pow(p.f[i], p.multiplicity);
    return v;
}

/// V'/V = sum_i m_i f_i'/f_i (undefined at a pole node, returned as +inf there).
inline std::vector<double> log_volume_derivative(const WarpedMetric& g, const ProfileJets& jets) {
    std::vector<double> p(g.grid().size(), 0.0);
    for (std::size_t k = 0; k < g.profiles().size(); ++k) {
        const int m = g.profiles()[k].multiplicity;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += m * jets.df[k][i] / jets.f[k][i];
    }
    if (g.origin_closure()) p[0] = std::numeric_limits<double>::infinity();
    return p;
}

} // namespace ahspec::geometry
