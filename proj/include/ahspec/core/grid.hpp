#pragma once

#include "ahspec/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace ahspec {

/// How a RadialGrid was generated. Together with t_min/t_max this record is
/// enough to regenerate the grid bit-for-bit.
struct GridPolicy {
    enum class Kind { Uniform, Graded, Explicit };
    Kind kind = Kind::Uniform;
    std::size_t count = 0;      // Uniform: number of points
    double spacing = 0.0;       // Graded: bulk spacing
    double pole_spacing = 0.0;  // Graded: first step away from t_min
    double growth = 1.0;        // Graded: max ratio of consecutive steps near the pole
};

inline std::string to_string(GridPolicy::Kind k) {
    switch (k) {
    case GridPolicy::Kind::Uniform: return "uniform";
    case GridPolicy::Kind::Graded: return "graded";
    case GridPolicy::Kind::Explicit: return "explicit";
    }
    return "unknown";
}

/// Strictly increasing samples of the radial coordinate t.
class RadialGrid {
public:
    RadialGrid() = default;

    static RadialGrid uniform(double t_min, double t_max, std::size_t count) {
        check_range(t_min, t_max);
        if (count < 2) throw InputError("grid: uniform policy needs count >= 2");
        std::vector<double> pts(count);
        const double h = (t_max - t_min) / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) pts[i] = t_min + h * static_cast<double>(i);
        pts.back() = t_max;
        GridPolicy p;
        p.kind = GridPolicy::Kind::Uniform;
        p.count = count;
        return RadialGrid(std::move(pts), p);
    }

    /// Geometric refinement near t_min: steps start at pole_spacing and grow
    /// by at most `growth` until they reach `spacing`; the remainder of the
    /// interval is uniform with spacing <= `spacing`.
    static RadialGrid graded(double t_min, double t_max, double spacing,
                             double pole_spacing = 1e-4, double growth = 1.1) {
        check_range(t_min, t_max);
        if (!(spacing > 0) || !(pole_spacing > 0) || pole_spacing > spacing || !(growth > 1.0))
            throw InputError("grid: graded policy needs 0 < pole_spacing <= spacing and growth > 1");
        std::vector<double> pts{t_min};
        double step = pole_spacing;
        while (step < spacing && pts.back() + step < t_max - spacing) {
            pts.push_back(pts.back() + step);
            step = std::min(spacing, step * growth);
        }
        const double start = pts.back();
        const auto rest = static_cast<std::size_t>(std::ceil((t_max - start) / spacing - 1e-12));
        const double h = (t_max - start) / static_cast<double>(std::max<std::size_t>(rest, 1));
        for (std::size_t i = 1; i <= std::max<std::size_t>(rest, 1); ++i)
            pts.push_back(start + h * static_cast<double>(i));
        pts.back() = t_max;
        GridPolicy p;
        p.kind = GridPolicy::Kind::Graded;
        p.spacing = spacing;
        p.pole_spacing = pole_spacing;
        p.growth = growth;
        return RadialGrid(std::move(pts), p);
    }

    static RadialGrid explicit_points(std::vector<double> pts) {
        if (pts.size() < 2) throw InputError("grid: explicit points need at least 2 samples");
        check_range(pts.front(), pts.back());
        GridPolicy p;
        p.kind = GridPolicy::Kind::Explicit;
        p.count = pts.size();
        return RadialGrid(std::move(pts), p);
    }

    /// Every other node, keeping both ends. Used for two-resolution checks.
    [[nodiscard]] RadialGrid coarsened() const {
        std::vector<double> pts;
        for (std::size_t i = 0; i < points_.size(); i += 2) pts.push_back(points_[i]);
        if (pts.back() != points_.back()) pts.back() = points_.back();
        GridPolicy p = policy_;
        p.kind = GridPolicy::Kind::Explicit;
        p.count = pts.size();
        return RadialGrid(std::move(pts), p);
    }

    [[nodiscard]] double t_min() const { return points_.front(); }
    [[nodiscard]] double t_max() const { return points_.back(); }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] std::span<const double> points() const { return points_; }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] const GridPolicy& policy() const { return policy_; }

    /// Index of the last node with t <= T (T clipped to the grid).
    [[nodiscard]] std::size_t index_at_or_below(double T) const {
        auto it = std::upper_bound(points_.begin(), points_.end(), T + 1e-12);
        if (it == points_.begin()) return 0;
        return static_cast<std::size_t>(std::distance(points_.begin(), it) - 1);
    }

    [[nodiscard]] double max_spacing() const {
        double h = 0.0;
        for (std::size_t i = 1; i < points_.size(); ++i) h = std::max(h, points_[i] - points_[i - 1]);
        return h;
    }

private:
    RadialGrid(std::vector<double> pts, GridPolicy policy)
        : points_(std::move(pts)), policy_(policy) {
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i] > points_[i - 1]))
                throw InputError("grid: points must be strictly increasing");
    }

    static void check_range(double t_min, double t_max) {
        if (!(t_min >= 0.0)) throw InputError("grid: t_min must be >= 0");
        if (!(t_max > t_min)) throw InputError("grid: t_max must exceed t_min");
    }

    std::vector<double> points_;
    GridPolicy policy_;
};

} // namespace ahspec
