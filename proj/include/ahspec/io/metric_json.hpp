#pragma once

// Metric and flow-field files.
//
//   {
//     "label": "H^4",
//     "n": 3,
//     "grid": {"t_min": 0, "t_max": 14, "policy": "uniform", "count": 1401}
//           | {"t_min": 0, "t_max": 14, "policy": "graded", "spacing": 0.01, "pole_spacing": 1e-4, "growth": 1.1}
//           | {"points": [...]},
//     "profiles": [{"expr": "sinh(t)", "multiplicity": 3}]
//               | [{"samples": [...], "derivative": [...], "second_derivative": [...], "multiplicity": 2}, ...],
//     "structure": [[1, 2, 3, 1.0], ...],   // optional, 1-based; absent means a round sphere slice
//     "calibrate": true,
//     "origin_closure": true
//   }
//
// Errors name the offending field as a JSON pointer.

#include "ahspec/core/error.hpp"
#include "ahspec/core/expr.hpp"
#include "ahspec/core/grid.hpp"
#include "ahspec/gauge/gauge_flow.hpp"
#include "ahspec/geometry/warped_metric.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace ahspec::io {

using Json = nlohmann::ordered_json;

/// InputError carrying "<source>: <pointer>: <message>".
inline InputError field_error(const std::string& source, const std::string& pointer, const std::string& msg) {
    return InputError(source + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
}

namespace detail {

struct Reader {
    std::string source;

    [[nodiscard]] const Json& need(const Json& j, const std::string& ptr, const char* key) const {
        if (!j.is_object()) throw field_error(source, ptr, "expected an object");
        auto it = j.find(key);
        if (it == j.end()) throw field_error(source, ptr + "/" + key, "missing required field");
        return *it;
    }
    [[nodiscard]] double number(const Json& v, const std::string& ptr) const {
        if (!v.is_number()) throw field_error(source, ptr, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw field_error(source, ptr, "not finite");
        return x;
    }
    [[nodiscard]] long long integer(const Json& v, const std::string& ptr) const {
        if (!v.is_number_integer()) throw field_error(source, ptr, "expected an integer");
        return v.get<long long>();
    }
    [[nodiscard]] bool boolean(const Json& v, const std::string& ptr) const {
        if (!v.is_boolean()) throw field_error(source, ptr, "expected true or false");
        return v.get<bool>();
    }
    [[nodiscard]] std::string string(const Json& v, const std::string& ptr) const {
        if (!v.is_string()) throw field_error(source, ptr, "expected a string");
        return v.get<std::string>();
    }
    [[nodiscard]] std::vector<double> numbers(const Json& v, const std::string& ptr) const {
        if (!v.is_array()) throw field_error(source, ptr, "expected an array of numbers");
        std::vector<double> out;
        out.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
        return out;
    }
    /// Rethrows library InputErrors with the pointer prepended.
    template <class F>
    auto at(const std::string& ptr, F&& f) const {
        try {
            return f();
        } catch (const InputError& e) {
            throw field_error(source, ptr, e.what());
        }
    }
};

inline RadialGrid parse_grid(const Reader& rd, const Json& j, const std::string& ptr) {
    if (!j.is_object()) throw field_error(rd.source, ptr, "expected an object");
    if (j.contains("points")) {
        auto pts = rd.numbers(j["points"], ptr + "/points");
        return rd.at(ptr + "/points", [&] { return RadialGrid::explicit_points(std::move(pts)); });
    }
    const double t0 = rd.number(rd.need(j, ptr, "t_min"), ptr + "/t_min");
    const double t1 = rd.number(rd.need(j, ptr, "t_max"), ptr + "/t_max");
    const std::string policy = j.contains("policy") ? rd.string(j["policy"], ptr + "/policy") : "uniform";
    if (policy == "uniform") {
        const auto c = rd.integer(rd.need(j, ptr, "count"), ptr + "/count");
        if (c < 2) throw field_error(rd.source, ptr + "/count", "need at least 2 points");
        return rd.at(ptr, [&] { return RadialGrid::uniform(t0, t1, static_cast<std::size_t>(c)); });
    }
    if (policy == "graded") {
        const double sp = rd.number(rd.need(j, ptr, "spacing"), ptr + "/spacing");
        const double ps = j.contains("pole_spacing") ? rd.number(j["pole_spacing"], ptr + "/pole_spacing") : 1e-4;
        const double gr = j.contains("growth") ? rd.number(j["growth"], ptr + "/growth") : 1.1;
        return rd.at(ptr, [&] { return RadialGrid::graded(t0, t1, sp, ps, gr); });
    }
    throw field_error(rd.source, ptr + "/policy", "unknown grid policy '" + policy + "' (uniform, graded, or give points)");
}

} // namespace detail

inline geometry::WarpedMetric parse_metric(const Json& j, const std::string& source = "metric") {
    const detail::Reader rd{source};
    if (!j.is_object()) throw field_error(source, "", "expected a JSON object");
    const auto n_raw = rd.integer(rd.need(j, "", "n"), "/n");
    if (n_raw < 1 || n_raw > 64) throw field_error(source, "/n", "boundary dimension must be in [1, 64]");
    const int n = static_cast<int>(n_raw);
    const RadialGrid grid = detail::parse_grid(rd, rd.need(j, "", "grid"), "/grid");

    const Json& pj = rd.need(j, "", "profiles");
    if (!pj.is_array() || pj.empty()) throw field_error(source, "/profiles", "expected a non-empty array");
    std::vector<geometry::Profile> profiles;
    for (std::size_t i = 0; i < pj.size(); ++i) {
        const std::string ptr = "/profiles/" + std::to_string(i);
        const Json& e = pj[i];
        if (!e.is_object()) throw field_error(source, ptr, "expected an object");
        geometry::Profile p;
        const auto m = rd.integer(rd.need(e, ptr, "multiplicity"), ptr + "/multiplicity");
        if (m < 1) throw field_error(source, ptr + "/multiplicity", "must be >= 1");
        p.multiplicity = static_cast<int>(m);
        const bool has_expr = e.contains("expr"), has_samples = e.contains("samples");
        if (has_expr == has_samples) throw field_error(source, ptr, "give exactly one of 'expr' or 'samples'");
        if (has_expr) {
            const auto text = rd.string(e["expr"], ptr + "/expr");
            const Expr ex = rd.at(ptr + "/expr", [&] { return Expr::parse(text, "t"); });
            p.f = sample(grid.points(), ex);
            p.expr = ex;
        } else {
            auto check = [&](const std::vector<double>& v, const std::string& q) {
                if (v.size() != grid.size())
                    throw field_error(source, q,
                                      "has " + std::to_string(v.size()) + " samples, grid has " + std::to_string(grid.size()));
            };
            p.f = rd.numbers(e["samples"], ptr + "/samples");
            check(p.f, ptr + "/samples");
            if (e.contains("derivative")) {
                p.df = rd.numbers(e["derivative"], ptr + "/derivative");
                check(*p.df, ptr + "/derivative");
            }
            if (e.contains("second_derivative")) {
                p.d2f = rd.numbers(e["second_derivative"], ptr + "/second_derivative");
                check(*p.d2f, ptr + "/second_derivative");
            }
        }
        profiles.push_back(std::move(p));
    }

    geometry::SliceGeometry slice;
    if (j.contains("structure")) {
        const Json& sj = j["structure"];
        if (!sj.is_array() || sj.empty()) throw field_error(source, "/structure", "expected a non-empty array of [i, j, k, c]");
        geometry::StructureConstants sc(n);
        for (std::size_t q = 0; q < sj.size(); ++q) {
            const std::string ptr = "/structure/" + std::to_string(q);
            const Json& e = sj[q];
            if (!e.is_array() || e.size() != 4) throw field_error(source, ptr, "expected [i, j, k, c]");
            int idx[3];
            for (int a = 0; a < 3; ++a) {
                const auto v = rd.integer(e[static_cast<std::size_t>(a)], ptr + "/" + std::to_string(a));
                if (v < 1 || v > n) throw field_error(source, ptr + "/" + std::to_string(a), "index must lie in [1, n]");
                idx[a] = static_cast<int>(v - 1);
            }
            const double c = rd.number(e[3], ptr + "/3");
            rd.at(ptr, [&] {
                sc.set(idx[0], idx[1], idx[2], c);
                return 0;
            });
        }
        const bool cal = j.contains("calibrate") ? rd.boolean(j["calibrate"], "/calibrate") : true;
        slice = rd.at("/structure", [&] { return geometry::SliceGeometry::lie(sc, cal); });
    } else {
        slice = geometry::SliceGeometry::round_sphere(n);
    }
    const bool closure = j.contains("origin_closure") ? rd.boolean(j["origin_closure"], "/origin_closure")
                                                      : grid.t_min() == 0.0;
    const std::string label = j.contains("label") ? rd.string(j["label"], "/label") : std::string{};
    return rd.at("", [&] { return geometry::WarpedMetric(n, grid, std::move(profiles), slice, closure, label); });
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": not valid JSON (" + std::string(e.what()) + ")");
    }
}

inline geometry::WarpedMetric load_metric(const std::string& path) { return parse_metric(read_json_file(path), path); }

/// Samples-based JSON for any metric; closed-form profiles keep their expression.
inline Json metric_to_json(const geometry::WarpedMetric& g) {
    Json j;
    if (!g.label().empty()) j["label"] = g.label();
    j["n"] = g.n();
    const auto& pol = g.grid().policy();
    Json gj;
    if (pol.kind == GridPolicy::Kind::Uniform) {
        gj["t_min"] = g.grid().t_min();
        gj["t_max"] = g.grid().t_max();
        gj["policy"] = "uniform";
        gj["count"] = pol.count;
    } else if (pol.kind == GridPolicy::Kind::Graded) {
        gj["t_min"] = g.grid().t_min();
        gj["t_max"] = g.grid().t_max();
        gj["policy"] = "graded";
        gj["spacing"] = pol.spacing;
        gj["pole_spacing"] = pol.pole_spacing;
        gj["growth"] = pol.growth;
    } else {
        gj["points"] = std::vector<double>(g.grid().points().begin(), g.grid().points().end());
    }
    j["grid"] = gj;
    Json ps = Json::array();
    for (const auto& p : g.profiles()) {
        Json e;
        if (p.expr) {
            e["expr"] = p.expr->str("t");
        } else {
            e["samples"] = p.f;
            if (p.df) e["derivative"] = *p.df;
            if (p.d2f) e["second_derivative"] = *p.d2f;
        }
        e["multiplicity"] = p.multiplicity;
        ps.push_back(e);
    }
    j["profiles"] = ps;
    const auto& s = g.slice();
    if (s.kind == geometry::SliceGeometry::Kind::Lie) {
        // raw (uncalibrated) constants, with calibration re-applied on load
        Json st = Json::array();
        const double k = s.calibration_scale;
        for (int a = 0; a < s.dim; ++a)
            for (int b = a + 1; b < s.dim; ++b)
                for (int c = 0; c < s.dim; ++c)
                    if (s.structure(a, b, c) != 0.0) st.push_back(Json::array({a + 1, b + 1, c + 1, s.structure(a, b, c) / k}));
        j["structure"] = st;
        j["calibrate"] = k != 1.0;
    }
    j["origin_closure"] = g.origin_closure();
    return j;
}

/// Replaces the identifier `alpha` by its value so field expressions can
/// carry the Hölder exponent symbolically.
inline std::string substitute_alpha(const std::string& text, double alpha) {
    std::ostringstream v;
    v.precision(17);
    v << "(" << alpha << ")";
    return std::regex_replace(text, std::regex(R"(\balpha\b)"), v.str());
}

struct FieldSpec {
    std::string expression;
    double alpha = 0.5;
    double lo = -1.0, hi = 1.0;
};

/// {"expression": "x + abs(x)^(1+alpha)", "alpha": 0.5, "box": [-1, 1]}
inline FieldSpec parse_field(const Json& j, const std::string& source = "field") {
    const detail::Reader rd{source};
    if (!j.is_object()) throw field_error(source, "", "expected a JSON object");
    FieldSpec f;
    f.expression = rd.string(rd.need(j, "", "expression"), "/expression");
    if (j.contains("alpha")) f.alpha = rd.number(j["alpha"], "/alpha");
    if (j.contains("box")) {
        const auto b = rd.numbers(j["box"], "/box");
        if (b.size() != 2 || !(b[1] > b[0])) throw field_error(source, "/box", "expected [lo, hi] with lo < hi");
        f.lo = b[0];
        f.hi = b[1];
    }
    return f;
}

inline gauge::FlowField make_field(const FieldSpec& f, const std::string& source = "field") {
    try {
        return gauge::FlowField::from_expression(substitute_alpha(f.expression, f.alpha), f.alpha, f.lo, f.hi);
    } catch (const InputError& e) {
        throw field_error(source, "/expression", e.what());
    }
}

} // namespace ahspec::io
