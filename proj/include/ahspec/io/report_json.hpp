#pragma once

// JSON views of module reports and a deterministic CSV writer.

#include "ahspec/einstein/einstein.hpp"
#include "ahspec/gauge/gauge_flow.hpp"
#include "ahspec/indicial.hpp"
#include "ahspec/io/metric_json.hpp"
#include "ahspec/spectral/eigenfunction.hpp"
#include "ahspec/spectral/spectrum.hpp"

#include <charconv>
#include <string>
#include <vector>

namespace ahspec::io {

/// Shortest round-trip decimal form; "nan"/"inf" spelled out.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) {
        if (row.size() != columns.size()) throw std::logic_error("table: row width mismatch");
        rows.push_back(std::move(row));
    }
    [[nodiscard]] std::string csv() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(columns);
        for (const auto& r : rows) line(r);
        return out;
    }
};

inline Json to_json(const Estimate& e) { return Json{{"value", e.value}, {"error", e.error}}; }

inline Json to_json(const indicial::IndicialData& d) {
    Json j{{"n", d.n}, {"kappa", d.kappa}, {"complex", d.complex}};
    if (d.complex) {
        j["roots"] = Json::array({Json{{"re", d.s_minus}, {"im", -d.imag}}, Json{{"re", d.s_plus}, {"im", d.imag}}});
    } else {
        j["roots"] = Json::array({d.s_minus, d.s_plus});
    }
    j["admissible_interval"] = d.interval_empty() ? Json() : Json::array({d.lo, d.hi});
    return j;
}

inline Json to_json(const spectral::SpectralReport& r) {
    Json j{{"n", r.n},
           {"lambda0", to_json(r.lambda0)},
           {"raw_fit", r.raw_fit},
           {"essential_threshold", r.essential_threshold}};
    Json ev = Json::array();
    for (const auto& e : r.discrete_eigenvalues) ev.push_back(Json{{"value", e.value}, {"simple", e.simple}});
    j["discrete_eigenvalues"] = ev;
    j["truncations"] = r.truncations;
    j["dirichlet"] = r.dirichlet;
    j["dirichlet_errors"] = r.dirichlet_errors;
    j["method"] = r.method;
    j["extrapolation"] = r.extrapolation;
    j["reduction_rationale"] = r.reduction_rationale;
    if (r.certificate)
        j["certificate"] = Json{{"s", r.certificate->s}, {"success", r.certificate->success}, {"bound", r.certificate->bound}};
    return j;
}

inline Json to_json(const spectral::BoundaryLimit& b) {
    Json j{{"limit", to_json(b.limit)}};
    j["expected"] = b.expected ? Json(*b.expected) : Json();
    j["difference"] = b.expected ? Json(b.difference) : Json();
    j["inconclusive"] = b.inconclusive;
    j["window"] = b.window;
    if (!b.note.empty()) j["note"] = b.note;
    return j;
}

/// Scalars only; the fields themselves go to CSV.
inline Json summary_json(const spectral::GrowthEigenfunction& ge) {
    return Json{{"n", ge.n()},
                {"scale", ge.scale},
                {"boundary_scalar", ge.boundary_scalar},
                {"boundary_anisotropy", ge.boundary_anisotropy},
                {"c", ge.c},
                {"points", ge.t.size()},
                {"residual", ge.residual},
                {"relative_residual", ge.relative_residual},
                {"sup_u_minus_rinv", ge.sup_u_minus_rinv},
                {"source", ge.source},
                {"scheme", ge.scheme}};
}

inline Json summary_json(const spectral::SubharmonicityReport& r) {
    return Json{{"subharmonic", r.subharmonic},
                {"sup_laplacian_G", r.sup_laplacian_G},
                {"sup_relative_laplacian_G", r.sup_relative_laplacian_G},
                {"laplacian_G_at_pole", r.laplacian_G_at_pole},
                {"identity_checked", r.identity_checked},
                {"identity_residual", r.identity_residual},
                {"relative_identity_residual", r.relative_identity_residual},
                {"einstein_residual", r.einstein_residual},
                {"max_principle_excess", r.max_principle_excess},
                {"derivatives", r.derivatives},
                {"warnings", r.warnings}};
}

inline Json to_json(const spectral::CertificateResult& c) {
    Json v = Json::array();
    for (const auto& [a, b] : c.violations) v.push_back(Json::array({a, b}));
    return Json{{"s", c.s},
                {"success", c.success},
                {"bound", c.bound},
                {"inf_ratio", c.inf_ratio},
                {"sup_gradient_ratio", c.sup_gradient_ratio},
                {"gradient_estimate_holds", c.gradient_estimate_holds},
                {"tol", c.tol},
                {"violations", v},
                {"condition", c.condition}};
}

inline Json summary_json(const einstein::EinsteinProfile& p) {
    Json lim = Json::array();
    for (const auto& e : p.infinity.profile_limits) lim.push_back(to_json(e));
    return Json{{"shoot_parameter", p.shoot_parameter},
                {"berger_t", to_json(p.berger_t)},
                {"berger_t_tolerance_spread", p.berger_t_tolerance_spread},
                {"einstein_residual", p.einstein_residual},
                {"ah", Json{{"passed", p.ah.passed},
                            {"log_derivative_defect", p.ah.log_derivative_defect},
                            {"sectional_defect", p.ah.sectional_defect},
                            {"collar_start", p.ah.collar_start}}},
                {"conformal_infinity", Json{{"coefficients", p.infinity.boundary.coefficients},
                                            {"scale", p.infinity.scale},
                                            {"profile_limits", lim},
                                            {"residual", p.infinity.residual}}},
                {"integrator", p.integrator},
                {"grid", Json{{"t_max", p.metric.grid().t_max()}, {"points", p.metric.grid().size()}}}};
}

inline Json to_json(const einstein::SweepRow& r) {
    return Json{{"shoot_parameter", r.shoot_parameter},
                {"berger_t", to_json(r.berger_t)},
                {"boundary_scalar", r.boundary_scalar},
                {"yamabe_sign", geometry::to_string(r.yamabe)},
                {"lambda0", to_json(r.lambda0)},
                {"eigenvalues_below", r.eigenvalues_below},
                {"einstein_residual", r.einstein_residual},
                {"gradient_defect", to_json(r.gradient_defect)},
                {"v_limit", to_json(r.v_limit)},
                {"boundary_consistent", r.boundary_consistent},
                {"certificate", to_json(r.certificate)},
                {"identities_ok", r.identities_ok},
                {"identity_residual", r.identity_residual}};
}

inline Json to_json(const einstein::SweepTable& t) {
    Json rows = Json::array(), fails = Json::array();
    for (const auto& r : t.rows) rows.push_back(to_json(r));
    for (const auto& f : t.failures)
        fails.push_back(Json{{"shoot_parameter", f.shoot_parameter}, {"branch", f.branch}, {"message", f.message}});
    return Json{{"rows", rows}, {"failures", fails}};
}

inline Table sweep_table(const einstein::SweepTable& t) {
    Table tab{{"shoot_parameter", "berger_t", "berger_t_error", "boundary_scalar", "yamabe_sign", "lambda0",
               "lambda0_error", "eigenvalues_below", "certificate", "gradient_defect", "gradient_defect_expected",
               "v_limit", "v_expected", "einstein_residual", "identities_ok"},
              {}};
    for (const auto& r : t.rows) {
        std::string ev;
        for (std::size_t i = 0; i < r.eigenvalues_below.size(); ++i) ev += (i ? ";" : "") + format_double(r.eigenvalues_below[i]);
        auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string("nan"); };
        tab.add({format_double(r.shoot_parameter), format_double(r.berger_t.value), format_double(r.berger_t.error),
                 format_double(r.boundary_scalar), geometry::to_string(r.yamabe), format_double(r.lambda0.value),
                 format_double(r.lambda0.error), ev, r.certificate.success ? "success" : "fail",
                 format_double(r.gradient_defect.limit.value), opt(r.gradient_defect.expected),
                 format_double(r.v_limit.limit.value), opt(r.v_limit.expected), format_double(r.einstein_residual),
                 r.identities_ok ? "true" : "false"});
    }
    return tab;
}

inline Json to_json(const gauge::HolderReport& r) {
    auto norms = [](const gauge::HolderNorms& h) {
        return Json{{"sup_A", h.sup_A},       {"seminorm_A", h.seminorm_A}, {"c0alpha_A", h.c0alpha_A},
                    {"sup_u", h.sup_u},       {"resolution", h.resolution}, {"coarse_c0alpha_A", h.coarse_c0alpha_A},
                    {"dropped", h.dropped}};
    };
    Json j{{"t", r.t}, {"alpha", r.alpha}, {"norms", norms(r.norms)}};
    j["refined"] = r.refined ? norms(*r.refined) : Json();
    j["pairs"] = r.pairs.size();
    j["worst_ratio"] = r.worst_ratio;
    j["bound_holds"] = r.bound_holds;
    j["window"] = r.window;
    return j;
}

} // namespace ahspec::io
