#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/grid.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/core/ode.hpp"
#include "ahspec/core/parallel.hpp"
#include "ahspec/geometry/curvature.hpp"
#include "ahspec/geometry/homogeneous.hpp"
#include "ahspec/geometry/warped_metric.hpp"
#include "ahspec/spectral/eigenfunction.hpp"
#include "ahspec/spectral/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::einstein {

// Biaxial Bianchi IX: g = dt^2 + a^2 (s1^2 + s2^2) + c^2 s3^2 on the 4-ball,
// su(2) frame calibrated so a = c = 1 is the unit round sphere. Rc = -3 g gives
//   a'' = a [4/a^2 - 2c^2/a^4 - (a'/a)(a'/a + c'/c) + 3]
//   c'' = c [2c^2/a^4 - 2 a'c'/(a c) + 3]
// and the tt-component as a first integral, which the integrator ignores and
// the curvature check picks up.

/// Pole series a = t + A3 t^3 + ... + A11 t^11 (same for c), smooth closure
/// forces 12 A3 + 6 C3 = 3; the free parameter is delta = A3 - 1/6.
struct PoleSeries {
    std::array<double, 6> a{}; ///< coefficients of t, t^3, ..., t^11
    std::array<double, 6> c{};

    static PoleSeries from_parameter(double d) {
        const double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d;
        PoleSeries s;
        s.a = {1.0,
               1.0 / 6.0 + d,
               -12.0 * d2 / 5.0 - d / 8.0 + 1.0 / 120.0,
               258.0 * d3 / 35.0 + 249.0 * d2 / 280.0 + d / 40.0 + 1.0 / 5040.0,
               -892.0 * d4 / 35.0 - 761.0 * d3 / 168.0 - 3313.0 * d2 / 13440.0 - 23.0 * d / 6048.0 + 1.0 / 362880.0,
               181869.0 * d5 / 1925.0 + 337597.0 * d4 / 15400.0 + 1312321.0 * d3 / 739200.0 + 22961.0 * d2 / 403200.0 +
                   331.0 * d / 604800.0 + 1.0 / 39916800.0};
        s.c = {1.0,
               1.0 / 6.0 - 2.0 * d,
               33.0 * d2 / 5.0 + d / 4.0 + 1.0 / 120.0,
               -876.0 * d3 / 35.0 - 87.0 * d2 / 35.0 - d / 20.0 + 1.0 / 5040.0,
               3548.0 * d4 / 35.0 + 47.0 * d3 / 3.0 + 587.0 * d2 / 840.0 + 23.0 * d / 3024.0 + 1.0 / 362880.0,
               -821298.0 * d5 / 1925.0 - 341837.0 * d4 / 3850.0 - 41201.0 * d3 / 6600.0 - 8243.0 * d2 / 50400.0 -
                   331.0 * d / 302400.0 + 1.0 / 39916800.0};
        return s;
    }

    /// value, first and second derivative
    [[nodiscard]] static std::array<double, 3> eval(const std::array<double, 6>& k, double t) {
        const double t2 = t * t;
        double f = 0.0, df = 0.0, d2f = 0.0;
        for (std::size_t j = k.size(); j-- > 0;) {
            const double p = 2.0 * j + 1.0;
            f = f * t2 + k[j];
            df = df * t2 + p * k[j];
            d2f = d2f * t2 + p * (p - 1.0) * k[j];
        }
        return {t * f, df, d2f / t};
    }

    /// Handoff radius where the last term is below 1e-15 relative; the
    /// right-hand side loses eps/t^2 to cancellation, so not much closer in.
    [[nodiscard]] double handoff() const {
        const double last = std::max(std::abs(a.back()), std::abs(c.back()));
        return std::min(0.05, std::pow(1e-15 / last, 0.1));
    }
};

inline void biaxial_rhs(const ode::State& y, ode::State& dy) {
    const double a = y[0], da = y[1], c = y[2], dc = y[3];
    const double la = da / a, lc = dc / c, a2 = a * a, ca = c * c / (a2 * a2);
    dy[0] = da;
    dy[1] = a * (4.0 / a2 - 2.0 * ca - la * (la + lc) + 3.0);
    dy[2] = dc;
    dy[3] = c * (2.0 * ca - 2.0 * la * lc + 3.0);
}

struct ShootOptions {
    double t0 = 0.0; ///< series-to-integrator handoff; 0 picks PoleSeries::handoff()
    double abs_tol = 1e-14;
    double rel_tol = 1e-13;
    /// Accepted shoot parameters; the AH window is narrower and found by integration.
    double window_lo = -0.5;
    double window_hi = 2.0;
    double ah_tol = 1e-3;
    double ah_fraction = 0.1;
    double residual_tol = 1e-6;
};

enum class Branch { AsymptoticallyHyperbolic, Collapse, NonAH, Underflow };

inline const char* to_string(Branch b) {
    switch (b) {
    case Branch::AsymptoticallyHyperbolic: return "AH";
    case Branch::Collapse: return "collapse";
    case Branch::NonAH: return "non-AH";
    case Branch::Underflow: return "step-size-underflow";
    }
    return "?";
}

/// A shot that did not produce an AH Einstein profile.
class NonAHBranch : public NumericalDiagnostic {
public:
    NonAHBranch(Branch b, double t, const std::string& what)
        : NumericalDiagnostic(what), branch(b), stop_time(t) {}
    Branch branch;
    double stop_time;
};

struct EinsteinProfile {
    geometry::WarpedMetric metric;
    double shoot_parameter = 0.0;
    double einstein_residual = 0.0; ///< from geometry::curvature on the stored samples
    geometry::AHDiagnostic ah{};
    Estimate berger_t{};
    double berger_t_tolerance_spread = 0.0; ///< part of berger_t.error from the 10x-tolerance repeat
    geometry::ConformalInfinity infinity{};
    std::string integrator{};
};

/// Integrates the biaxial system from the pole. The stored profiles carry
/// samples of a, a', c, c' and a'' from the right-hand side; the residual is
/// recomputed by finite differences of the samples alone.
inline EinsteinProfile shoot_biaxial_einstein(int n, double shoot_parameter, const RadialGrid& grid,
                                              const ShootOptions& opt = {}) {
    if (n != 3) throw InputError("einstein: shooting is implemented for n = 3 (biaxial Bianchi IX) only");
    if (!(shoot_parameter >= opt.window_lo && shoot_parameter <= opt.window_hi))
        throw InputError("einstein: shoot parameter " + std::to_string(shoot_parameter) + " outside the window [" +
                         std::to_string(opt.window_lo) + ", " + std::to_string(opt.window_hi) + "]");
    if (grid.t_min() != 0.0) throw InputError("einstein: grid must start at the pole t = 0");
    if (!(opt.t0 >= 0.0 && opt.t0 <= 0.1)) throw InputError("einstein: handoff radius must lie in [0, 0.1], 0 for automatic");

    const auto S = PoleSeries::from_parameter(shoot_parameter);
    const double t0 = opt.t0 > 0.0 ? opt.t0 : S.handoff();
    const auto ta = PoleSeries::eval(S.a, t0), tc = PoleSeries::eval(S.c, t0);
    ode::State y0{ta[0], ta[1], tc[0], tc[1]};

    const auto pts = grid.points();
    // nodes at or below t0 come from the series
    std::size_t first = 1;
    while (first < pts.size() && pts[first] <= t0) ++first;
    if (first >= pts.size()) throw InputError("einstein: grid ends inside the series region");
    std::vector<double> times{t0};
    times.insert(times.end(), pts.begin() + static_cast<std::ptrdiff_t>(first), pts.end());
    auto valid = [](double, const ode::State& y, std::string& why) {
        if (!(y[0] > 0.0) || !(y[2] > 0.0)) {
            why = "profile collapse (a or c reached 0)";
            return false;
        }
        return true;
    };
    auto rhs = [](const ode::State& y, ode::State& dy, double) { biaxial_rhs(y, dy); };
    char label[64];
    std::snprintf(label, sizeof label, "biaxial-einstein(delta=%.6g)", shoot_parameter);

    auto integrate = [&](double rel_tol) {
        const auto tr = ode::integrate_dense(rhs, y0, times, opt.abs_tol, rel_tol, valid);
        if (!tr.completed) {
            const Branch b = tr.reason.rfind("step-size", 0) == 0 ? Branch::Underflow : Branch::Collapse;
            throw NonAHBranch(b, tr.stop_time,
                              "einstein: integration stopped at t = " + std::to_string(tr.stop_time) + ": " + tr.reason +
                                  (b == Branch::Collapse ? "; classified as non-AH branch" : ""));
        }
        const std::size_t N = pts.size();
        geometry::Profile pa, pc;
        pa.multiplicity = 2;
        pc.multiplicity = 1;
        for (auto* p : {&pa, &pc}) {
            p->f.resize(N);
            p->df.emplace(N);
            p->d2f.emplace(N);
        }
        pa.f[0] = pc.f[0] = 0.0;
        (*pa.df)[0] = (*pc.df)[0] = 1.0;
        (*pa.d2f)[0] = (*pc.d2f)[0] = 0.0;
        for (std::size_t i = 1; i < first; ++i) {
            const auto sa = PoleSeries::eval(S.a, pts[i]), sc = PoleSeries::eval(S.c, pts[i]);
            pa.f[i] = sa[0];
            (*pa.df)[i] = sa[1];
            (*pa.d2f)[i] = sa[2];
            pc.f[i] = sc[0];
            (*pc.df)[i] = sc[1];
            (*pc.d2f)[i] = sc[2];
        }
        for (std::size_t i = first; i < N; ++i) {
            const auto& y = tr.states[i - first + 1]; // states[0] is the handoff point
            ode::State dy(4);
            biaxial_rhs(y, dy);
            pa.f[i] = y[0];
            (*pa.df)[i] = y[1];
            (*pa.d2f)[i] = dy[1];
            pc.f[i] = y[2];
            (*pc.df)[i] = y[3];
            (*pc.d2f)[i] = dy[3];
        }
        return geometry::WarpedMetric(3, grid, {pa, pc},
                                      geometry::SliceGeometry::lie(geometry::StructureConstants::su2(1.0)), true, label);
    };
    const auto metric = integrate(opt.rel_tol);

    EinsteinProfile out{.metric = metric};
    out.shoot_parameter = shoot_parameter;
    char desc[128];
    std::snprintf(desc, sizeof desc, "series(t^11) to t0=%.4g, dopri5 dense, abs %.3g rel %.3g", t0, opt.abs_tol,
                  opt.rel_tol);
    out.integrator = desc;
    out.ah = geometry::ah_diagnostic(metric, opt.ah_tol, opt.ah_fraction, geometry::Derivatives::Auto);
    if (!out.ah.passed) {
        double worst = 0.0;
        for (double v : out.ah.log_derivative_defect) worst = std::max(worst, v);
        for (double v : out.ah.sectional_defect) worst = std::max(worst, v);
        throw NonAHBranch(Branch::NonAH, grid.t_max(),
                          "einstein: profile is not asymptotically hyperbolic on the outer collar (defect " +
                              std::to_string(worst) + " > " + std::to_string(opt.ah_tol) + ")");
    }
    out.einstein_residual = geometry::curvature(metric).einstein_residual;
    if (!(out.einstein_residual <= opt.residual_tol))
        throw NumericalDiagnostic("einstein: Einstein residual " + std::to_string(out.einstein_residual) +
                                  " exceeds tolerance " + std::to_string(opt.residual_tol) +
                                  "; refine the grid or tighten the integrator");
    out.infinity = geometry::conformal_infinity(metric);
    // Berger parameter c_inf^2 / a_inf^2 with a propagated relative error
    const auto& la = out.infinity.profile_limits[0];
    const auto& lc = out.infinity.profile_limits[1];
    out.berger_t.value = out.infinity.boundary.coefficients[2] / out.infinity.boundary.coefficients[0];
    out.berger_t.error = out.berger_t.value * 2.0 * (la.error / la.value + lc.error / lc.value);
    // integration error near the pole moves the effective delta, amplified by
    // dt_B/d delta = -12 t_B^2; measured by repeating at 10x the tolerance
    const auto loose = geometry::conformal_infinity(integrate(10.0 * opt.rel_tol)).boundary.coefficients;
    out.berger_t_tolerance_spread = std::abs(loose[2] / loose[0] - out.berger_t.value);
    out.berger_t.error += out.berger_t_tolerance_spread;
    return out;
}

/// Trace identity within 10x the profile residual; the scalar identity goes
/// through an extrapolation in r and is judged against its own error bar.
inline bool identities_coherent(const geometry::BoundaryIdentityReport& bi, double profile_residual) {
    const double floor = 10.0 * std::max(profile_residual, 1e-12);
    return bi.applicable && bi.trace_residual <= floor &&
           bi.scalar_identity_residual <= 3.0 * bi.scalar_identity_error + floor * std::max(1.0, std::abs(bi.boundary_scalar));
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    double t_max = 22.0;
    double spacing = 0.01;
    ShootOptions shoot{};
    spectral::Lambda0Options lambda0 = [] {
        spectral::Lambda0Options o;
        o.schedule.T = {14.0, 16.0, 18.0, 20.0};
        return o;
    }();
    double certificate_tol = 1e-6;
    /// Rows are computed in parallel; each row runs its own inner loops serially.
    unsigned workers = worker_count();
};

struct SweepRow {
    double shoot_parameter = 0.0;
    Estimate berger_t{};
    double boundary_scalar = 0.0;
    geometry::Sign yamabe = geometry::Sign::Zero;
    Estimate lambda0{};
    std::vector<double> eigenvalues_below;
    double einstein_residual = 0.0;
    spectral::BoundaryLimit gradient_defect;
    spectral::BoundaryLimit v_limit;
    bool boundary_consistent = false; ///< both limits within 3 error bars of the Rhat values
    spectral::CertificateResult certificate;
    bool identities_ok = false;
    double identity_residual = 0.0;
};

struct SweepFailure {
    double shoot_parameter = 0.0;
    std::string branch;
    std::string message;
};

struct SweepTable {
    std::vector<SweepRow> rows; ///< sorted by berger_t
    std::vector<SweepFailure> failures;
};

inline SweepRow sweep_row(double d, const SweepOptions& opt) {
    const auto grid = geometry::default_grid(opt.t_max, opt.spacing);
    const auto prof = shoot_biaxial_einstein(3, d, grid, opt.shoot);
    SweepRow row;
    row.shoot_parameter = d;
    row.berger_t = prof.berger_t;
    row.einstein_residual = prof.einstein_residual;
    const auto ys = geometry::yamabe_sign(prof.infinity.boundary);
    row.boundary_scalar = ys.scalar;
    row.yamabe = ys.sign;

    auto lopt = opt.lambda0;
    lopt.shoot.workers = 1;
    const auto spec = spectral::lambda0_estimate(prof.metric, lopt);
    row.lambda0 = spec.lambda0;
    for (const auto& e : spec.discrete_eigenvalues) row.eigenvalues_below.push_back(e.value);
    if (!row.eigenvalues_below.empty()) {
        // the bottom of the spectrum is the lowest eigenvalue when one exists
        row.lambda0.value = std::min(row.lambda0.value, row.eigenvalues_below.front());
    }

    const auto ge = spectral::solve_growth_eigenfunction(prof.metric, prof.infinity.scale);
    row.gradient_defect = spectral::gradient_defect_boundary(ge);
    row.v_limit = spectral::boundary_v_limit(ge);
    auto agrees = [](const spectral::BoundaryLimit& b) {
        return b.expected && std::abs(b.difference) <= 3.0 * b.limit.error + 1e-6 * std::max(1.0, std::abs(*b.expected));
    };
    row.boundary_consistent = agrees(row.gradient_defect) && agrees(row.v_limit);
    row.certificate = spectral::certificate_lower_bound(ge, 1.5, opt.certificate_tol);

    const auto bi = geometry::einstein_boundary_identities(prof.metric);
    row.identity_residual = std::max(bi.trace_residual, bi.scalar_identity_residual);
    row.identities_ok = identities_coherent(bi, prof.einstein_residual);
    return row;
}

/// One shoot per parameter; failed shoots are recorded, not fatal.
inline SweepTable pedersen_sweep(const std::vector<double>& schedule, const SweepOptions& opt = {}) {
    if (schedule.empty()) throw InputError("sweep: empty parameter schedule");
    struct Outcome {
        std::optional<SweepRow> row;
        SweepFailure failure;
    };
    const auto outcomes = parallel_map<Outcome>(
        schedule.size(),
        [&](std::size_t i) {
            Outcome o;
            try {
                o.row = sweep_row(schedule[i], opt);
            } catch (const NonAHBranch& e) {
                o.failure = {schedule[i], to_string(e.branch), e.what()};
            } catch (const std::exception& e) {
                o.failure = {schedule[i], "error", e.what()};
            }
            return o;
        },
        opt.workers);
    SweepTable table;
    for (const auto& o : outcomes) {
        if (o.row) table.rows.push_back(*o.row);
        else table.failures.push_back(o.failure);
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SweepRow& x, const SweepRow& y) { return x.berger_t.value < y.berger_t.value; });
    return table;
}

} // namespace ahspec::einstein
