#pragma once

// Left-invariant (homogeneous) metrics on the slices of a cohomogeneity-one
// metric, and the scalar curvature of the boundary metric at infinity.

#include "ahspec/core/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace ahspec::geometry {

/// Structure constants of a frame {E_i}: [E_i, E_j] = sum_k c(i,j,k) E_k.
class StructureConstants {
public:
    StructureConstants() = default;
    explicit StructureConstants(int dim) : dim_(dim), c_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

    /// Sets c(i,j,k) and c(j,i,k) = -value (indices 0-based).
    void set(int i, int j, int k, double value) {
        check(i), check(j), check(k);
        if (i == j) throw InputError("structure constants: [E_i, E_i] must vanish");
        at(i, j, k) = value;
        at(j, i, k) = -value;
    }

    [[nodiscard]] double operator()(int i, int j, int k) const { return c_[idx(i, j, k)]; }
    [[nodiscard]] int dim() const { return dim_; }

    [[nodiscard]] StructureConstants scaled(double s) const {
        StructureConstants out = *this;
        for (auto& v : out.c_) v *= s;
        return out;
    }

    [[nodiscard]] bool antisymmetric(double tol = 0.0) const {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k)
                    if (std::abs((*this)(i, j, k) + (*this)(j, i, k)) > tol) return false;
        return true;
    }

    /// tr ad(E_i) = 0 for all i.
    [[nodiscard]] bool unimodular(double tol = 1e-12) const {
        for (int i = 0; i < dim_; ++i) {
            double tr = 0.0;
            for (int j = 0; j < dim_; ++j) tr += (*this)(i, j, j);
            if (std::abs(tr) > tol) return false;
        }
        return true;
    }

    /// su(2) with [E_1,E_2] = s E_3 and cyclic permutations.
    static StructureConstants su2(double s) {
        StructureConstants c(3);
        c.set(0, 1, 2, s);
        c.set(1, 2, 0, s);
        c.set(2, 0, 1, s);
        return c;
    }

private:
    void check(int i) const {
        if (i < 0 || i >= dim_) throw InputError("structure constants: index out of range");
    }
    [[nodiscard]] std::size_t idx(int i, int j, int k) const {
        return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
    }
    double& at(int i, int j, int k) { return c_[idx(i, j, k)]; }

    int dim_ = 0;
    std::vector<double> c_;
};

/// Geometry of the slice S^n (or a unimodular Lie group) at fixed t.
struct SliceGeometry {
    enum class Kind { RoundSphere, Lie };
    Kind kind = Kind::RoundSphere;
    int dim = 0;
    StructureConstants structure;
    /// Factor applied to user structure constants by calibration (1 = raw).
    double calibration_scale = 1.0;
    std::string convention;

    /// Unit round S^n; a metric coefficient q means the round metric of radius sqrt(q).
    static SliceGeometry round_sphere(int n) {
        if (n < 1) throw InputError("slice: dimension must be >= 1");
        SliceGeometry s;
        s.kind = Kind::RoundSphere;
        s.dim = n;
        s.convention = "round-unit-sphere:R(1)=" + std::to_string(n * (n - 1));
        return s;
    }

    /// Lie-group slice. With `calibrate`, the structure constants are rescaled
    /// so that the equal-coefficient metric has scalar curvature n(n-1), i.e.
    /// it is the unit round sphere when the group is SU(2). Calibration only
    /// applies when that scalar curvature is positive.
    static SliceGeometry lie(StructureConstants c, bool calibrate = true);
};

/// Ricci tensor of the left-invariant metric sum_i q_i sigma_i^2 in the
/// orthonormal frame e_i = E_i / sqrt(q_i). Unimodular groups only.
inline Eigen::MatrixXd slice_ricci(const SliceGeometry& slice, const std::vector<double>& q) {
    const int d = slice.dim;
    if (static_cast<int>(q.size()) != d) throw InputError("slice: coefficient count does not match dimension");
    for (double v : q)
        if (!(v > 0.0)) throw InputError("slice: metric coefficients must be strictly positive");
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(d, d);
    if (slice.kind == SliceGeometry::Kind::RoundSphere) {
        for (int i = 1; i < d; ++i)
            if (std::abs(q[static_cast<std::size_t>(i)] - q[0]) > 1e-12 * q[0])
                throw InputError("slice: a round sphere slice needs equal coefficients");
        ric.diagonal().setConstant(static_cast<double>(d - 1) / q[0]);
        return ric;
    }
    // Orthonormal-frame structure constants.
    std::vector<double> C(static_cast<std::size_t>(d * d * d));
    auto Cat = [&](int i, int j, int k) -> double& { return C[static_cast<std::size_t>((i * d + j) * d + k)]; };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                Cat(i, j, k) = slice.structure(i, j, k) * std::sqrt(q[static_cast<std::size_t>(k)]) /
                               std::sqrt(q[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)]);
    // Ric(a,b) = -1/2 sum <[a,e_i],[b,e_i]> + 1/4 sum <[e_i,e_j],a><[e_i,e_j],b> - 1/2 B(a,b)
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            double t1 = 0.0, t2 = 0.0, killing = 0.0;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    t1 += Cat(a, i, j) * Cat(b, i, j);
                    t2 += Cat(i, j, a) * Cat(i, j, b);
                    killing += Cat(a, i, j) * Cat(b, j, i);
                }
            }
            const double v = -0.5 * t1 + 0.25 * t2 - 0.5 * killing;
            ric(a, b) = v;
            ric(b, a) = v;
        }
    }
    return ric;
}

inline SliceGeometry SliceGeometry::lie(StructureConstants c, bool calibrate) {
    if (c.dim() < 1) throw InputError("slice: empty structure constants");
    if (!c.antisymmetric(1e-14)) throw InputError("slice: structure constants must be antisymmetric in the first two indices");
    if (!c.unimodular()) throw InputError("slice: structure constants must define a unimodular Lie algebra");
    SliceGeometry s;
    s.kind = Kind::Lie;
    s.dim = c.dim();
    s.structure = std::move(c);
    std::ostringstream tag;
    if (calibrate) {
        const double r1 = slice_ricci(s, std::vector<double>(static_cast<std::size_t>(s.dim), 1.0)).trace();
        const double target = static_cast<double>(s.dim * (s.dim - 1));
        if (r1 > 0.0 && target > 0.0) {
            s.calibration_scale = std::sqrt(target / r1);
            s.structure = s.structure.scaled(s.calibration_scale);
            tag.precision(17);
            tag << "lie-calibrated:R(1,...,1)=" << s.dim * (s.dim - 1) << ";scale=" << s.calibration_scale;
            s.convention = tag.str();
            return s;
        }
    }
    s.convention = "lie-raw";
    return s;
}

/// Diagonal homogeneous metric on the boundary slice.
struct HomogeneousBoundaryMetric {
    SliceGeometry slice;
    std::vector<double> coefficients;
};

/// Berger metric sigma_1^2 + sigma_2^2 + t_B sigma_3^2 in the calibrated su(2) convention.
inline HomogeneousBoundaryMetric berger(double t_B) {
    return {SliceGeometry::lie(StructureConstants::su2(1.0)), {1.0, 1.0, t_B}};
}

struct BoundaryScalar {
    double value = 0.0;
    /// Magnitude of the largest cancelling contribution; sets the zero tolerance.
    double scale = 0.0;
    std::string convention;
};

inline BoundaryScalar boundary_scalar_detail(const HomogeneousBoundaryMetric& bm) {
    if (bm.coefficients.size() != static_cast<std::size_t>(bm.slice.dim))
        throw InputError("boundary metric: coefficient count does not match slice dimension");
    for (double q : bm.coefficients)
        if (!(q > 0.0)) throw InputError("boundary metric: coefficients must be strictly positive");
    const Eigen::MatrixXd ric = slice_ricci(bm.slice, bm.coefficients);
    BoundaryScalar out;
    out.value = ric.trace();
    out.convention = bm.slice.convention;
    double scale = 0.0;
    for (int i = 0; i < ric.rows(); ++i) scale += std::abs(ric(i, i));
    if (bm.slice.kind == SliceGeometry::Kind::Lie) {
        // Size of the individual structure-constant terms entering the trace.
        const int d = bm.slice.dim;
        double s2 = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double c = bm.slice.structure(i, j, k);
                    s2 += c * c * bm.coefficients[static_cast<std::size_t>(k)] /
                          (bm.coefficients[static_cast<std::size_t>(i)] * bm.coefficients[static_cast<std::size_t>(j)]);
                }
        scale = std::max(scale, s2);
    }
    out.scale = scale;
    return out;
}

/// Scalar curvature of the homogeneous boundary metric.
inline double boundary_scalar(const HomogeneousBoundaryMetric& bm) { return boundary_scalar_detail(bm).value; }

enum class Sign { Negative = -1, Zero = 0, Positive = 1 };

inline const char* to_string(Sign s) {
    switch (s) {
    case Sign::Negative: return "-";
    case Sign::Zero: return "0";
    case Sign::Positive: return "+";
    }
    return "?";
}

struct YamabeSign {
    Sign sign = Sign::Zero;
    double scalar = 0.0;
    std::string rationale;
};

/// Sign of the Yamabe invariant of a homogeneous boundary metric. A
/// homogeneous metric already has constant scalar curvature, so the sign of
/// the invariant is the sign of that constant.
inline YamabeSign yamabe_sign(const HomogeneousBoundaryMetric& bm, double relative_tol = 1e-12) {
    const BoundaryScalar r = boundary_scalar_detail(bm);
    YamabeSign out;
    out.scalar = r.value;
    if (std::abs(r.value) <= relative_tol * r.scale) out.sign = Sign::Zero;
    else out.sign = r.value > 0.0 ? Sign::Positive : Sign::Negative;
    out.rationale = "homogeneous representative has constant scalar curvature; "
                    "sign(Yamabe invariant) = sign(scalar curvature) under that assumption only";
    return out;
}

} // namespace ahspec::geometry
