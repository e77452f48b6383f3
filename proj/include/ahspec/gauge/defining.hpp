#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/expr.hpp"
#include "ahspec/core/finite_difference.hpp"
#include "ahspec/core/grid.hpp"
#include "ahspec/core/numerics.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::gauge {

/// Radial defining function rho(t) > 0, vanishing to first order in e^{-t}.
struct DefiningProfile {
    RadialGrid grid;
    std::vector<double> rho;
    std::vector<double> drho;
    std::optional<Expr> expr;
    /// lim e^t rho(t), with extrapolation spread.
    Estimate leading{};
    std::string derivative_source;

    static DefiningProfile from_expr(const RadialGrid& grid, const Expr& e, double tol = 1e-6) {
        DefiningProfile d{grid, sample(grid.points(), e), sample(grid.points(), e.derivative()), e, {}, "exact"};
        d.validate(tol);
        return d;
    }

    static DefiningProfile from_samples(const RadialGrid& grid, std::vector<double> rho,
                                        std::optional<std::vector<double>> drho = std::nullopt, double tol = 1e-6) {
        if (rho.size() != grid.size()) throw InputError("defining profile: sample count does not match grid");
        DefiningProfile d{grid, std::move(rho), {}, std::nullopt, {}, {}};
        if (drho) {
            if (drho->size() != grid.size()) throw InputError("defining profile: derivative count does not match grid");
            d.drho = std::move(*drho);
            d.derivative_source = "supplied";
        } else {
            fd::Differentiator D(grid, fd::Parity::None);
            d.drho = D.first(d.rho);
            d.derivative_source = D.scheme();
        }
        d.validate(tol);
        return d;
    }

    [[nodiscard]] std::vector<double> log_derivative() const {
        std::vector<double> l(rho.size());
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = drho[i] / rho[i];
        return l;
    }

private:
    void validate(double tol) {
        const auto t = grid.points();
        for (std::size_t i = 0; i < t.size(); ++i)
            if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
                throw InputError("defining profile: rho must be positive and finite (fails at t = " +
                                 std::to_string(t[i]) + ")");
        // e^t rho(t) must tend to a positive limit; extrapolate in e^{-t}
        const double T = grid.t_max();
        std::vector<double> xs, ys;
        for (double w : {T - 3.0, T - 2.0, T - 1.0}) {
            if (w < grid.t_min()) throw InputError("defining profile: grid too short to test first-order vanishing");
            xs.push_back(std::exp(-w));
            ys.push_back(std::exp(w) * interpolate_cubic(t, rho, w));
        }
        leading = extrapolate_to_zero(xs, ys);
        if (!(leading.value > 0.0) || !(leading.error <= tol * leading.value) || !std::isfinite(leading.value))
            throw InputError("defining profile: rho does not vanish to first order (e^t rho -> " +
                             std::to_string(leading.value) + " +- " + std::to_string(leading.error) + ")");
    }
};

} // namespace ahspec::gauge
