#pragma once

#include "ahspec/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace ahspec {

/// A value with an error bar.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Neville evaluation at x = 0 of the interpolating polynomial through (xs, ys).
inline double neville_at_zero(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> p(ys.begin(), ys.end());
    const std::size_t n = xs.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
    return p[0];
}

/// Richardson-style limit x -> 0 from samples at decreasing |x|. The error
/// bar is the spread between the full extrapolant and the one that drops
/// the sample farthest from 0.
inline Estimate extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw InputError("extrapolation: need matching, non-empty samples");
    if (xs.size() == 1) return {ys[0], std::abs(ys[0])};
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(xs[a]) < std::abs(xs[b]); });
    std::vector<double> sx, sy;
    for (auto i : order) {
        sx.push_back(xs[i]);
        sy.push_back(ys[i]);
    }
    const double full = neville_at_zero(sx, sy);
    const double reduced = neville_at_zero(std::span(sx).first(sx.size() - 1), std::span(sy).first(sy.size() - 1));
    return {full, std::abs(full - reduced)};
}

/// Local cubic Lagrange interpolation on a non-uniform, increasing abscissa.
inline double interpolate_cubic(std::span<const double> t, std::span<const double> f, double x) {
    const std::size_t n = t.size();
    if (n < 4) throw InputError("interpolation: need at least 4 nodes");
    auto it = std::upper_bound(t.begin(), t.end(), x);
    std::size_t hi = static_cast<std::size_t>(std::distance(t.begin(), it));
    std::size_t lo = hi >= 2 ? hi - 2 : 0;
    if (lo + 4 > n) lo = n - 4;
    double acc = 0.0;
    for (std::size_t j = lo; j < lo + 4; ++j) {
        double w = 1.0;
        for (std::size_t k = lo; k < lo + 4; ++k)
            if (k != j) w *= (x - t[k]) / (t[j] - t[k]);
        acc += w * f[j];
    }
    return acc;
}

/// Sample a callable on a span of abscissae.
template <class F>
std::vector<double> sample(std::span<const double> t, F&& f) {
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = f(t[i]);
    return out;
}

} // namespace ahspec
