#pragma once

#include "ahspec/core/error.hpp"
#include "ahspec/core/numerics.hpp"
#include "ahspec/core/parallel.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ahspec::spectral {

inline double essential_threshold(int n) { return 0.25 * n * n; }

/// Count of eigenvalues below x of the symmetric tridiagonal matrix (d, e).
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    std::size_t neg = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double off = i ? e[i - 1] * e[i - 1] : 0.0;
        q = d[i] - x - (i ? off / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++neg;
    }
    return neg;
}

/// The k smallest eigenvalues of a symmetric tridiagonal matrix by bisection.
inline std::vector<double> tridiagonal_smallest(const std::vector<double>& d, const std::vector<double>& e,
                                                std::size_t k) {
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = (i ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    std::vector<double> out;
    for (std::size_t j = 0; j < k; ++j) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
            const double m = 0.5 * (a + b);
            if (sturm_count(d, e, m) > j) b = m;
            else a = m;
        }
        out.push_back(0.5 * (a + b));
        lo = out.back();
    }
    return out;
}

namespace detail {

/// Warping-profile value at an arbitrary t: exact for closed forms, cubic otherwise.
inline double profile_at(const geometry::WarpedMetric& g, std::size_t k, double t) {
    const auto& p = g.profiles()[k];
    if (p.expr) return (*p.expr)(t);
    return interpolate_cubic(g.grid().points(), p.f, t);
}

inline double volume_at(const geometry::WarpedMetric& g, double t) {
    double v = 1.0;
    for (std::size_t k = 0; k < g.profiles().size(); ++k)
        v *= std::pow(profile_at(g, k, t), g.profiles()[k].multiplicity);
    return v;
}

/// Finite-volume Dirichlet problem -(V u')' = lambda V u on nodes
/// idx[0..m] (u = 0 at idx[m]), faces at `faces`, face volumes `vf`.
inline std::vector<double> fv_eigenvalues(const geometry::WarpedMetric& g, const std::vector<double>& nodes,
                                          const std::vector<double>& faces, const std::vector<double>& vf,
                                          const std::vector<double>& vn, std::size_t k) {
    const std::size_t m = nodes.size() - 1; // unknowns 0..m-1
    std::vector<double> mass(m), d(m, 0.0), e(m > 0 ? m - 1 : 0);
    const int n = g.n();
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            if (g.origin_closure()) mass[0] = vf[0] * (faces[0] - nodes[0]) / (n + 1); // V ~ t^n in the pole cell
            else mass[0] = vn[0] * (faces[0] - nodes[0]);
        } else {
            mass[i] = vn[i] * (faces[i] - faces[i - 1]);
        }
        const double right = vf[i] / (nodes[i + 1] - nodes[i]);
        d[i] += right;
        if (i + 1 < m) {
            d[i + 1] += right;
            e[i] = -right;
        }
    }
    for (std::size_t i = 0; i < m; ++i) d[i] /= mass[i];
    for (std::size_t i = 0; i + 1 < m; ++i) e[i] /= std::sqrt(mass[i] * mass[i + 1]);
    return tridiagonal_smallest(d, e, k);
}

} // namespace detail

struct DirichletOptions {
    bool richardson = true;
    /// Unknowns required per requested mode on the coarsest level.
    std::size_t nodes_per_mode = 20;
};

struct DirichletResult {
    double T = 0.0; ///< truncation radius actually used (a grid node)
    std::vector<double> values;
    std::vector<double> errors;
    std::string method;
};

/// First k Dirichlet eigenvalues of the radial Laplacian on (t_min, T).
/// Levels: the grid with interpolated mid-cell faces, and its 2x and 4x
/// subsamples whose faces are grid nodes; Richardson on the first two, with
/// the disagreement against the coarser pair as error bar.
inline DirichletResult dirichlet_spectrum(const geometry::WarpedMetric& g, double T, std::size_t k,
                                          const DirichletOptions& opt = {}) {
    if (k < 1) throw InputError("dirichlet_eigenvalues: k must be >= 1");
    const auto t = g.grid().points();
    if (T > g.grid().t_max() + 1e-9) throw InputError("dirichlet_eigenvalues: T exceeds the grid");
    std::size_t M = g.grid().index_at_or_below(T);
    if (opt.richardson) M -= M % 4;
    const std::size_t coarse = opt.richardson ? M / 4 : M;
    if (coarse < opt.nodes_per_mode * k)
        throw NumericalDiagnostic("dirichlet_eigenvalues: " + std::to_string(k) + " modes need at least " +
                                  std::to_string(opt.nodes_per_mode * k) + " cells on the coarsest level, have " +
                                  std::to_string(coarse) + "; refine the grid or lower k");
    DirichletResult out;
    out.T = t[M];
    const auto V = geometry::volume_density(g);

    auto level = [&](std::size_t step) {
        std::vector<double> nodes, faces, vf, vn;
        for (std::size_t i = 0; i <= M; i += step) {
            nodes.push_back(t[i]);
            vn.push_back(V[i]);
        }
        for (std::size_t i = 0; i + step <= M; i += step) {
            if (step == 1) {
                const double mid = 0.5 * (t[i] + t[i + 1]);
                faces.push_back(mid);
                vf.push_back(detail::volume_at(g, mid));
            } else {
                faces.push_back(t[i + step / 2]);
                vf.push_back(V[i + step / 2]);
            }
        }
        return detail::fv_eigenvalues(g, nodes, faces, vf, vn, k);
    };

    if (!opt.richardson) {
        out.values = level(1);
        out.errors.assign(k, std::nan(""));
        out.method = "finite-volume";
        return out;
    }
    const auto a1 = level(1), a2 = level(2), a4 = level(4);
    for (std::size_t j = 0; j < k; ++j) {
        const double r12 = (4.0 * a1[j] - a2[j]) / 3.0;
        const double r24 = (4.0 * a2[j] - a4[j]) / 3.0;
        out.values.push_back(r12);
        out.errors.push_back(std::abs(r12 - r24));
    }
    out.method = "finite-volume+richardson(h,2h;4h check)";
    return out;
}

inline std::vector<double> dirichlet_eigenvalues(const geometry::WarpedMetric& g, double T, std::size_t k,
                                                 const DirichletOptions& opt = {}) {
    return dirichlet_spectrum(g, T, k, opt).values;
}

// ---------------------------------------------------------------- shooting

struct ShootingOptions {
    std::size_t scan_points = 200;
    double tol = 1e-8;
    /// Matching point; default min(3, midpoint of the grid).
    std::optional<double> match_t;
    unsigned workers = worker_count();
};

struct DiscreteEigenvalue {
    double value = 0.0;
    bool simple = true;
};

namespace detail {

/// Radial ODE u'' = -p u' - lambda u integrated by RK4 over grid intervals,
/// with p = V'/V interpolated through t p (smooth at the pole).
class RadialShooter {
public:
    explicit RadialShooter(const geometry::WarpedMetric& g, std::optional<double> match)
        : n_(g.n()), closure_(g.origin_closure()) {
        const auto tt = g.grid().points();
        t_.assign(tt.begin(), tt.end());
        const auto jets = geometry::profile_jets(g, geometry::Derivatives::Auto);
        const auto p = geometry::log_volume_derivative(g, jets);
        tp_.resize(t_.size());
        for (std::size_t i = 0; i < t_.size(); ++i) tp_[i] = t_[i] * p[i];
        if (closure_) tp_[0] = n_;
        const double mt = match ? *match : std::min(3.0, 0.5 * (t_.front() + t_.back()));
        if (mt <= t_.front() || mt >= t_.back()) throw InputError("shooting: matching point outside the grid");
        match_ = std::min<std::size_t>(std::max<std::size_t>(1, static_cast<std::size_t>(
                                                                    std::lower_bound(t_.begin(), t_.end(), mt) - t_.begin())),
                                       t_.size() - 2);
        last_ = t_.size() - 1;
    }

    /// Normalised Wronskian of the regular and recessive solutions at the matching node.
    [[nodiscard]] double matching(double lambda) const { return matching(lambda, last_); }

    [[nodiscard]] double matching(double lambda, std::size_t outer) const {
        const double sp = 0.5 * n_ + std::sqrt(std::max(0.0, 0.25 * n_ * n_ - lambda));
        // regular solution from the pole (or Neumann at t_min)
        double u = 1.0, du = 0.0;
        std::size_t i = 0;
        if (closure_) {
            i = 1;
            const double t1 = t_[1];
            u = 1.0 - lambda * t1 * t1 / (2.0 * (n_ + 1));
            du = -lambda * t1 / (n_ + 1);
        }
        for (; i < match_; ++i) step(u, du, t_[i], t_[i + 1], lambda, i);
        double v = 1.0, dv = -sp;
        for (std::size_t j = outer; j > match_; --j) step(v, dv, t_[j], t_[j - 1], lambda, j - 1);
        const double w = (u * dv - du * v) / (std::hypot(u, du) * std::hypot(v, dv));
        return w;
    }

    [[nodiscard]] std::size_t outer() const { return last_; }
    [[nodiscard]] std::size_t match_index() const { return match_; }
    [[nodiscard]] const std::vector<double>& t() const { return t_; }

private:
    [[nodiscard]] double p_at(double x, std::size_t hint) const {
        // cubic through the 4 nodes around interval [hint, hint+1]
        std::size_t lo = hint >= 1 ? hint - 1 : 0;
        if (lo + 4 > t_.size()) lo = t_.size() - 4;
        double acc = 0.0;
        for (std::size_t j = lo; j < lo + 4; ++j) {
            double w = 1.0;
            for (std::size_t q = lo; q < lo + 4; ++q)
                if (q != j) w *= (x - t_[q]) / (t_[j] - t_[q]);
            acc += w * tp_[j];
        }
        return acc / x;
    }

    void step(double& u, double& du, double a, double b, double lambda, std::size_t hint) const {
        const double h = b - a;
        const double m = 0.5 * (a + b);
        const double pa = p_at(a, hint), pm = p_at(m, hint), pb = p_at(b, hint);
        auto f = [&](double p, double y, double dy, double& ky, double& kdy) {
            ky = dy;
            kdy = -p * dy - lambda * y;
        };
        double k1, l1, k2, l2, k3, l3, k4, l4;
        f(pa, u, du, k1, l1);
        f(pm, u + 0.5 * h * k1, du + 0.5 * h * l1, k2, l2);
        f(pm, u + 0.5 * h * k2, du + 0.5 * h * l2, k3, l3);
        f(pb, u + h * k3, du + h * l3, k4, l4);
        u += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
        du += h * (l1 + 2 * l2 + 2 * l3 + l4) / 6.0;
        const double s = std::hypot(u, du);
        if (s > 0.0 && std::isfinite(s)) {
            u /= s;
            du /= s;
        }
    }

    int n_;
    bool closure_;
    std::vector<double> t_, tp_;
    std::size_t match_ = 0, last_ = 0;
};

} // namespace detail

struct ShootingResult {
    std::vector<DiscreteEigenvalue> eigenvalues;
    std::vector<double> scan_lambda;
    std::vector<double> scan_matching;
    double outer_t = 0.0;
    double match_t = 0.0;
};

/// Zeros below n^2/4 of the matching functional between the regular
/// solution from the pole and the recessive solution from t_max.
inline ShootingResult shoot_below_threshold(const geometry::WarpedMetric& g, const ShootingOptions& opt = {}) {
    if (opt.scan_points < 2) throw InputError("shooting: scan needs at least 2 points");
    detail::RadialShooter sh(g, opt.match_t);
    const double top = essential_threshold(g.n());
    ShootingResult out;
    out.match_t = sh.t()[sh.match_index()];
    std::size_t outer = sh.outer();
    for (int attempt = 0;; ++attempt) {
        out.scan_lambda.resize(opt.scan_points);
        // uniform in sigma = sqrt(n^2/4 - lambda): dense near the threshold, where
        // weakly bound states sit
        const double smax = std::sqrt(top);
        for (std::size_t j = 0; j < opt.scan_points; ++j) {
            const double sigma = smax * static_cast<double>(opt.scan_points - j) / static_cast<double>(opt.scan_points);
            out.scan_lambda[j] = top - sigma * sigma;
        }
        out.scan_matching = parallel_map<double>(
            opt.scan_points, [&](std::size_t j) { return sh.matching(out.scan_lambda[j], outer); }, opt.workers);
        const bool finite = std::all_of(out.scan_matching.begin(), out.scan_matching.end(),
                                        [](double w) { return std::isfinite(w); });
        if (finite) break;
        // shorten the span and retry
        const double t_new = sh.t()[outer] - 2.0;
        if (attempt >= 2 || t_new <= out.match_t + 1.0)
            throw NumericalDiagnostic("shooting: matching functional is not finite; integration blew up");
        outer = static_cast<std::size_t>(std::lower_bound(sh.t().begin(), sh.t().end(), t_new) - sh.t().begin());
    }
    out.outer_t = sh.t()[outer];
    for (std::size_t j = 0; j + 1 < opt.scan_points; ++j) {
        double a = out.scan_lambda[j], b = out.scan_lambda[j + 1];
        double fa = out.scan_matching[j], fb = out.scan_matching[j + 1];
        if (fa == 0.0) {
            out.eigenvalues.push_back({a, true});
            continue;
        }
        if (fa * fb >= 0.0) continue;
        while (b - a > opt.tol) {
            const double m = 0.5 * (a + b);
            const double fm = sh.matching(m, outer);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.eigenvalues.push_back({0.5 * (a + b), true});
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const auto& x, const auto& y) { return x.value < y.value; });
    return out;
}

inline std::vector<double> eigenvalues_below_threshold(const geometry::WarpedMetric& g,
                                                       const ShootingOptions& opt = {}) {
    std::vector<double> v;
    for (const auto& e : shoot_below_threshold(g, opt).eigenvalues) v.push_back(e.value);
    return v;
}

// ---------------------------------------------------------------- lambda_0

inline double sullivan_lambda0(int n, double d) {
    if (n < 1) throw InputError("sullivan: n must be >= 1");
    if (!(d >= 0.0) || !(d <= n)) throw InputError("sullivan: d must lie in [0, n]");
    if (d > 0.5 * n) return d * (n - d);
    return 0.25 * n * n;
}

struct TruncationSchedule {
    std::vector<double> T{8.0, 10.0, 12.0};
};

struct CertificateRef {
    double s = 0.0;
    bool success = false;
    double bound = 0.0;
};

struct SpectralReport {
    int n = 0;
    Estimate lambda0{};
    double raw_fit = 0.0; ///< extrapolated limit before clipping at n^2/4
    double essential_threshold = 0.0;
    std::vector<DiscreteEigenvalue> discrete_eigenvalues;
    std::vector<double> truncations;
    std::vector<double> dirichlet;
    std::vector<double> dirichlet_errors;
    std::string method;
    std::string extrapolation;
    std::string reduction_rationale;
    std::optional<CertificateRef> certificate;
};

struct Lambda0Options {
    TruncationSchedule schedule{};
    DirichletOptions dirichlet{};
    bool shooting = true;
    ShootingOptions shoot{};
    double monotone_tol = 1e-9;
    /// Error amplification of discretisation errors through the extrapolation.
    double amplification = 3.0;
};

namespace detail {

/// Largest root below x_top of a function positive just below x_top.
template <class F>
std::optional<double> root_below(F&& f, double x_top, double span) {
    double hi = x_top - 1e-13 * std::max(1.0, std::abs(x_top));
    double fhi = f(hi);
    if (!std::isfinite(fhi)) return std::nullopt;
    double delta = 1e-10;
    for (int k = 0; k < 200; ++k, delta *= 1.5) {
        const double lo = x_top - delta;
        if (delta > span) return std::nullopt;
        const double flo = f(lo);
        if (!std::isfinite(flo)) return std::nullopt;
        if ((flo < 0.0) != (fhi < 0.0)) {
            double a = lo, b = hi, fa = flo;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        hi = lo;
        fhi = flo;
    }
    return std::nullopt;
}

/// sqrt(L - x)(T + a) = pi through two points; returns x.
inline std::optional<double> phase_fit2(double T1, double L1, double T2, double L2) {
    const double pi = std::numbers::pi;
    auto f = [&](double x) {
        const double a = pi / std::sqrt(L2 - x) - T2;
        return std::sqrt(L1 - x) * (T1 + a) - pi;
    };
    return root_below(f, std::min(L1, L2), 10.0 * (1.0 + std::abs(L2)));
}

/// sqrt(L - x)(T + a) + b (L - x)^{3/2} = pi through three points; returns x.
inline std::optional<double> phase_fit3(const double* T, const double* L) {
    const double pi = std::numbers::pi;
    auto f = [&](double x) {
        // a, b from the two outer points, residual at the inner one
        const double d1 = L[1] - x, d2 = L[2] - x;
        const double s1 = std::sqrt(d1), s2 = std::sqrt(d2);
        const double r1 = pi - s1 * T[1], r2 = pi - s2 * T[2];
        const double det = s1 * d2 * s2 - s2 * d1 * s1;
        const double a = (r1 * d2 * s2 - r2 * d1 * s1) / det;
        const double b = (s1 * r2 - s2 * r1) / det;
        const double d0 = L[0] - x;
        return std::sqrt(d0) * (T[0] + a) + b * d0 * std::sqrt(d0) - pi;
    };
    return root_below(f, std::min({L[0], L[1], L[2]}), 10.0 * (1.0 + std::abs(L[2])));
}

/// lambda(T) = x + A exp(-c T) through three points (Aitken for equal spacing).
inline std::optional<double> exponential_fit3(const double* T, const double* L) {
    const double r = (L[0] - L[1]) / (L[1] - L[2]);
    if (!(r > 0.0)) return std::nullopt;
    auto g = [&](double c) {
        return (std::exp(-c * T[0]) - std::exp(-c * T[1])) / (std::exp(-c * T[1]) - std::exp(-c * T[2])) - r;
    };
    double lo = 1e-8, hi = 50.0;
    if ((g(lo) < 0.0) == (g(hi) < 0.0)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if ((g(m) < 0.0) == (g(lo) < 0.0)) lo = m;
        else hi = m;
    }
    const double c = 0.5 * (lo + hi);
    const double A = (L[1] - L[2]) / (std::exp(-c * T[1]) - std::exp(-c * T[2]));
    return L[2] - A * std::exp(-c * T[2]);
}

/// lambda(T) = x + A exp(-2 sigma T), sigma = sqrt(n^2/4 - x), iterated on two points.
inline std::optional<double> decay_rate_fit2(int n, double T1, double L1, double T2, double L2) {
    const double top = 0.25 * n * n;
    double x = L2;
    for (int it = 0; it < 200; ++it) {
        const double sigma = std::sqrt(std::max(0.0, top - x));
        const double q = std::exp(-2.0 * sigma * (T2 - T1));
        const double xn = (L2 - q * L1) / (1.0 - q);
        if (!std::isfinite(xn)) return std::nullopt;
        if (std::abs(xn - x) < 1e-15) return xn;
        x = xn;
    }
    return x;
}

} // namespace detail

/// lambda_0 by domain exhaustion: Dirichlet ground states on (0, T) over a
/// truncation schedule, extrapolated T -> infinity. The ground state of a
/// cohomogeneity-one metric can be taken invariant, so the radial reduction
/// carries lambda_0.
inline SpectralReport lambda0_estimate(const geometry::WarpedMetric& g, const Lambda0Options& opt = {}) {
    const auto& Ts = opt.schedule.T;
    if (Ts.size() < 3) throw InputError("lambda0: schedule needs at least 3 truncation radii");
    for (std::size_t i = 1; i < Ts.size(); ++i)
        if (!(Ts[i] > Ts[i - 1])) throw InputError("lambda0: schedule must be increasing");
    if (Ts.back() > g.grid().t_max() + 1e-9)
        throw InputError("lambda0: schedule reaches beyond the grid (t_max = " + std::to_string(g.grid().t_max()) + ")");

    SpectralReport rep;
    rep.n = g.n();
    const double top = essential_threshold(g.n());
    rep.essential_threshold = top;
    rep.reduction_rationale = "radial reduction: the isometry group acts with cohomogeneity one and the positive "
                              "ground state is unique, hence invariant; lambda_0 is the bottom of the radial problem";
    const auto runs = parallel_map<DirichletResult>(
        Ts.size(), [&](std::size_t i) { return dirichlet_spectrum(g, Ts[i], 1, opt.dirichlet); }, opt.shoot.workers);
    double disc = 0.0;
    for (const auto& r : runs) {
        rep.truncations.push_back(r.T);
        rep.dirichlet.push_back(r.values[0]);
        rep.dirichlet_errors.push_back(r.errors[0]);
        if (std::isfinite(r.errors[0])) disc = std::max(disc, r.errors[0]);
    }
    for (std::size_t i = 1; i < rep.dirichlet.size(); ++i)
        if (!(rep.dirichlet[i] < rep.dirichlet[i - 1] + opt.monotone_tol))
            throw NumericalDiagnostic("lambda0: Dirichlet eigenvalues are not decreasing in T (" +
                                      std::to_string(rep.dirichlet[i - 1]) + " -> " +
                                      std::to_string(rep.dirichlet[i]) + "); grid too coarse");
    rep.method = "exhaustion:" + runs.front().method;

    const std::size_t m = rep.dirichlet.size();
    const double* T3 = rep.truncations.data() + (m - 3);
    const double* L3 = rep.dirichlet.data() + (m - 3);
    std::vector<double> fits;
    if (rep.dirichlet.back() < top) {
        // a bound state below the threshold: exponential approach
        rep.extrapolation = "exponential";
        if (auto x = detail::exponential_fit3(T3, L3)) fits.push_back(*x);
        if (auto x = detail::decay_rate_fit2(g.n(), T3[1], L3[1], T3[2], L3[2])) fits.push_back(*x);
        if (m >= 4)
            if (auto x = detail::exponential_fit3(T3 - 1, L3 - 1)) fits.push_back(*x);
    } else {
        // threshold regime: lowest mode behaves like sin(sqrt(lambda - lambda_0) (T + a))
        rep.extrapolation = "threshold-phase";
        if (auto x = detail::phase_fit3(T3, L3)) fits.push_back(*x);
        if (auto x = detail::phase_fit2(T3[1], L3[1], T3[2], L3[2])) fits.push_back(*x);
        if (m >= 4)
            if (auto x = detail::phase_fit3(T3 - 1, L3 - 1)) fits.push_back(*x);
    }
    if (fits.empty())
        throw NumericalDiagnostic("lambda0: extrapolation of the Dirichlet sequence failed to converge");
    rep.raw_fit = fits.front();
    double spread = 0.0;
    for (double f : fits) spread = std::max(spread, std::abs(f - fits.front()));
    rep.lambda0.value = std::min(rep.raw_fit, top);
    rep.lambda0.error = spread + opt.amplification * disc;

    if (opt.shooting) {
        const auto sh = shoot_below_threshold(g, opt.shoot);
        rep.discrete_eigenvalues = sh.eigenvalues;
        rep.method += "; shooting:recessive-wronskian(" + std::to_string(opt.shoot.scan_points) + " scan)";
    }
    return rep;
}

} // namespace ahspec::spectral
