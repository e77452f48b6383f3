#pragma once

#include "ahspec/core/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ahspec::ode {

using State = std::vector<double>;

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    bool completed = false;
    double stop_time = 0.0;
    std::string reason;
};

namespace detail {
struct Halt {
    double t;
    std::string reason;
};
} // namespace detail

/// Adaptive Dormand-Prince integration with dense output, sampled at
/// `times` (increasing or decreasing). `valid(t, y)` is checked inside every
/// right-hand-side evaluation; the first failure ends the run with a partial
/// trajectory.
template <class Rhs, class Valid>
Trajectory integrate_dense(Rhs&& rhs, State y0, std::span<const double> times, double abs_tol, double rel_tol,
                           Valid&& valid, std::size_t max_steps = 2'000'000) {
    namespace odeint = boost::numeric::odeint;
    if (times.size() < 2) throw InputError("ode: need at least two output times");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InputError("ode: tolerances must be positive");
    Trajectory out;
    auto system = [&](const State& y, State& dy, double t) {
        for (double v : y)
            if (!std::isfinite(v)) throw detail::Halt{t, "state is not finite"};
        std::string why;
        if (!valid(t, y, why)) throw detail::Halt{t, why};
        rhs(y, dy, t);
    };
    auto observe = [&](const State& y, double t) {
        out.times.push_back(t);
        out.states.push_back(y);
    };
    auto stepper = odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
    const double span = times.back() - times.front();
    const double dt0 = span / 1000.0;
    try {
        odeint::integrate_times(stepper, system, y0, times.begin(), times.end(), dt0, observe,
                                odeint::max_step_checker(max_steps));
        out.completed = true;
        out.stop_time = times.back();
    } catch (const detail::Halt& h) {
        out.stop_time = h.t;
        out.reason = h.reason;
    } catch (const odeint::odeint_error& e) {
        out.stop_time = out.times.empty() ? times.front() : out.times.back();
        out.reason = std::string("step-size underflow: ") + e.what();
    }
    return out;
}

template <class Rhs>
Trajectory integrate_dense(Rhs&& rhs, State y0, std::span<const double> times, double abs_tol, double rel_tol) {
    return integrate_dense(std::forward<Rhs>(rhs), std::move(y0), times, abs_tol, rel_tol,
                           [](double, const State&, std::string&) { return true; });
}

} // namespace ahspec::ode
