#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/grid.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace ahspec::fd {

/// Fornberg's recursion: weights c[k][j] such that the k-th derivative at x0
/// is approximated by sum_j c[k][j] f(xs[j]), for k = 0..max_order.
inline std::vector<std::vector<double>> fornberg_weights(std::span<const double> xs, double x0, int max_order) {
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(max_order) + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Symmetry of a sampled function under t -> -t about a smooth pole at t = 0.
/// Warping profiles are odd, radial functions on the ball are even.
enum class Parity { None, Even, Odd };

enum class EndOrder { Second, Fourth };

/// One stencil row: derivative at node i = sum weight * value[index].
struct Row {
    std::vector<std::size_t> index;
    std::vector<double> d1;
    std::vector<double> d2;
};

/// Precomputed first/second derivative stencils on a RadialGrid: centered
/// five-point (4th order on uniform spacing) in the interior, shifted
/// five-point next to the ends, one-sided at the end nodes. With a parity
/// the left end uses reflected ghost nodes instead of one-sided stencils.
class Differentiator {
public:
    Differentiator(const RadialGrid& grid, Parity parity, EndOrder ends = EndOrder::Second)
        : parity_(parity), ends_(ends) {
        const auto t = grid.points();
        const std::size_t n = t.size();
        if (n < 5) throw InputError("finite differences: grid has " + std::to_string(n) +
                                    " points, the five-point stencil needs at least 5");
        if (parity != Parity::None && t[0] != 0.0)
            throw InputError("finite differences: parity reflection needs t_min = 0");
        rows_.resize(n);
        for (std::size_t i = 0; i < n; ++i) rows_[i] = build(t, i);
    }

    [[nodiscard]] const Row& row(std::size_t i) const { return rows_[i]; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    [[nodiscard]] std::vector<double> first(std::span<const double> f) const { return apply(f, 1); }
    [[nodiscard]] std::vector<double> second(std::span<const double> f) const { return apply(f, 2); }

    [[nodiscard]] std::string scheme() const {
        std::string s = "fd4-centered-interior/";
        s += ends_ == EndOrder::Second ? "fd2-one-sided-ends" : "fd4-one-sided-ends";
        if (parity_ != Parity::None) s += "/parity-ghosts-at-pole";
        return s;
    }
    [[nodiscard]] int interior_order() const { return 4; }
    [[nodiscard]] int end_order() const { return ends_ == EndOrder::Second ? 2 : 4; }

private:
    [[nodiscard]] std::vector<double> apply(std::span<const double> f, int order) const {
        std::vector<double> out(rows_.size(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const Row& r = rows_[i];
            const auto& w = order == 1 ? r.d1 : r.d2;
            double acc = 0.0;
            for (std::size_t k = 0; k < r.index.size(); ++k) acc += w[k] * f[r.index[k]];
            out[i] = acc;
        }
        return out;
    }

    Row build(std::span<const double> t, std::size_t i) const {
        const std::size_t n = t.size();
        std::vector<double> xs;
        std::vector<std::size_t> idx;
        std::vector<double> sign;
        auto push = [&](std::size_t j, double s, double x) {
            idx.push_back(j);
            sign.push_back(s);
            xs.push_back(x);
        };
        const double ghost = parity_ == Parity::Odd ? -1.0 : 1.0;
        if (i >= 2 && i + 2 < n) {
            for (std::size_t j = i - 2; j <= i + 2; ++j) push(j, 1.0, t[j]);
        } else if (i < 2 && parity_ != Parity::None) {
            // Reflected nodes -t_j carry value parity * f_j.
            for (int j = -2; j <= 2; ++j) {
                const int k = static_cast<int>(i) + j;
                if (k < 0) push(static_cast<std::size_t>(-k), ghost, -t[static_cast<std::size_t>(-k)]);
                else push(static_cast<std::size_t>(k), 1.0, t[static_cast<std::size_t>(k)]);
            }
        } else if (i == 1) {
            for (std::size_t j = 0; j < 5; ++j) push(j, 1.0, t[j]);
        } else if (i + 2 == n) {
            for (std::size_t j = n - 5; j < n; ++j) push(j, 1.0, t[j]);
        } else {
            // End node: one-sided stencil, separate widths for d1 and d2.
            const bool left = i == 0;
            const std::size_t w1 = ends_ == EndOrder::Second ? 3 : 5;
            const std::size_t w2 = ends_ == EndOrder::Second ? 4 : 6;
            const std::size_t w = std::min(n, std::max(w1, w2));
            for (std::size_t k = 0; k < w; ++k) {
                const std::size_t j = left ? k : n - 1 - k;
                push(j, 1.0, t[j]);
            }
            Row r;
            r.index = idx;
            r.d1.assign(w, 0.0);
            r.d2.assign(w, 0.0);
            const auto c1 = fornberg_weights(std::span(xs).first(std::min(w1, w)), t[i], 1);
            const auto c2 = fornberg_weights(std::span(xs).first(std::min(w2, w)), t[i], 2);
            for (std::size_t k = 0; k < c1[1].size(); ++k) r.d1[k] = c1[1][k];
            for (std::size_t k = 0; k < c2[2].size(); ++k) r.d2[k] = c2[2][k];
            return r;
        }
        const auto c = fornberg_weights(xs, t[i], 2);
        Row r;
        // Fold reflected nodes onto their mirror images.
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::size_t pos = r.index.size();
            for (std::size_t m = 0; m < r.index.size(); ++m)
                if (r.index[m] == idx[k]) pos = m;
            if (pos == r.index.size()) {
                r.index.push_back(idx[k]);
                r.d1.push_back(0.0);
                r.d2.push_back(0.0);
            }
            r.d1[pos] += sign[k] * c[1][k];
            r.d2[pos] += sign[k] * c[2][k];
        }
        return r;
    }

    Parity parity_;
    EndOrder ends_;
    std::vector<Row> rows_;
};

} // namespace ahspec::fd
