#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "charts.hpp"
#include "errors.hpp"
#include "field_types.hpp"
#include "functions.hpp"
#include "linalg.hpp"

namespace cigar {

enum class MetricFamily { cigar_rb, warped, flat, product, conformal_flat };

inline const char* to_string(MetricFamily f) {
    switch (f) {
        case MetricFamily::cigar_rb: return "cigar_rb";
        case MetricFamily::warped: return "warped";
        case MetricFamily::flat: return "flat";
        case MetricFamily::product: return "product";
        case MetricFamily::conformal_flat: return "conformal_flat";
    }
    return "?";
}

// A metric family pinned to one chart.  The cigar family is available in all
// three charts; the auxiliary families exist to exercise the calculus on
// independent closed forms.
struct MetricSpec {
    MetricFamily family = MetricFamily::cigar_rb;
    ChartKind chart = ChartKind::cartesian;
    SolitonParams params{};
    Curve psi; // warped: g = ds^2 + psi(s)^2 dtheta^2
    Curve phi; // conformal_flat: g = phi(r) (dx^2 + dy^2)

    static MetricSpec cigar(const SolitonParams& sp, ChartKind chart = ChartKind::cartesian) {
        return {MetricFamily::cigar_rb, chart, sp, {}, {}};
    }
    static MetricSpec flat(ChartKind chart = ChartKind::cartesian) {
        if (chart == ChartKind::geodesic_polar)
            throw ParameterError("flat metric: use the cartesian or polar chart");
        return {MetricFamily::flat, chart, {}, {}, {}};
    }
    static MetricSpec product() {
        return {MetricFamily::product, ChartKind::cartesian, {}, {}, {}};
    }
    static MetricSpec warped(Curve psi) {
        return {MetricFamily::warped, ChartKind::geodesic_polar, {}, std::move(psi), {}};
    }
    static MetricSpec conformal_flat(Curve phi) {
        return {MetricFamily::conformal_flat, ChartKind::cartesian, {}, {}, std::move(phi)};
    }
};

inline Mat2 metric_at(const MetricSpec& spec, const ChartPoint& p) {
    if (p.kind != spec.chart)
        throw DomainError(std::string("metric_at: metric fixed in chart '") +
                          to_string(spec.chart) + "', point given in '" + to_string(p.kind) +
                          "'");
    switch (spec.family) {
        case MetricFamily::cigar_rb: {
            const double D = spec.params.E + radius_squared(p, spec.params);
            switch (p.kind) {
                case ChartKind::cartesian: return Mat2::diag(1.0 / D, 1.0 / D);
                case ChartKind::polar: {
                    detail::require_radial(p, "metric_at");
                    return Mat2::diag(1.0 / D, p.c1 * p.c1 / D);
                }
                case ChartKind::geodesic_polar: {
                    detail::require_radial(p, "metric_at");
                    const double th = std::tanh(p.c1);
                    return Mat2::diag(1.0, th * th);
                }
            }
            break;
        }
        case MetricFamily::warped: {
            detail::require_radial(p, "metric_at");
            const double w = spec.psi(p.c1);
            return Mat2::diag(1.0, w * w);
        }
        case MetricFamily::flat:
            if (p.kind == ChartKind::cartesian) return Mat2::identity();
            detail::require_radial(p, "metric_at");
            return Mat2::diag(1.0, p.c1 * p.c1);
        case MetricFamily::product:
            return Mat2::identity();
        case MetricFamily::conformal_flat: {
            const double r = std::hypot(p.c1, p.c2);
            const double u = spec.phi(r);
            if (!(u > 0.0))
                throw SingularMetricError("metric_at: conformal factor " + std::to_string(u) +
                                          " not positive");
            return Mat2::diag(u, u);
        }
    }
    throw DomainError("metric_at: unreachable");
}

inline SymTensorField metric_field(const MetricSpec& spec) {
    return {spec.chart, [spec](const ChartPoint& p) { return metric_at(spec, p); }};
}

// Soliton potential; defined in every chart since it only needs r^2.
inline double potential_function(const SolitonParams& sp, const ChartPoint& p) {
    return -(1.0 - 2.0 * sp.rho) * std::log(sp.E + radius_squared(p, sp));
}

inline ScalarField potential_field(const SolitonParams& sp, ChartKind chart) {
    return {chart, [sp](const ChartPoint& p) { return potential_function(sp, p); }};
}

// Warping profile of the cigar in arclength coordinates: psi(s) = tanh(s)
// limits to 1 (cylinder of circumference 2 pi at infinity) and behaves like
// s at the tip (smooth cap, no cone angle).
struct AsymptoticProfile {
    std::vector<double> s;
    std::vector<double> psi;
    std::vector<double> psi_over_s;
    bool cylinder_limit = false;
    bool smooth_tip = false;
};

inline AsymptoticProfile asymptotic_profile(const MetricSpec& spec) {
    if (spec.family != MetricFamily::cigar_rb)
        throw ParameterError("asymptotic_profile: defined for the cigar family");
    AsymptoticProfile out;
    out.s = {1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
    for (double s : out.s) {
        const double ps = std::tanh(s);
        out.psi.push_back(ps);
        out.psi_over_s.push_back(ps / s);
    }
    out.cylinder_limit = std::abs(out.psi.back() - 1.0) < 1e-8;
    out.smooth_tip = std::abs(out.psi_over_s.front() - 1.0) < 1e-6;
    return out;
}

inline Curve curve_from_json(const nlohmann::json& j) {
    if (!j.contains("name")) throw ParameterError("curve: missing 'name'");
    const std::string name = j.at("name").get<std::string>();
    std::vector<double> coeffs;
    if (j.contains("coeffs")) coeffs = j.at("coeffs").get<std::vector<double>>();
    const double shift = j.value("shift", 0.0);
    return curve_from_name(name, coeffs, shift);
}

inline nlohmann::json curve_to_json(const Curve& c) {
    nlohmann::json j{{"name", c.name}};
    if (!c.coeffs.empty()) j["coeffs"] = c.coeffs;
    if (c.shift != 0.0) j["shift"] = c.shift;
    return j;
}

inline MetricSpec metric_from_json(const nlohmann::json& j) {
    if (!j.contains("family")) throw ParameterError("metric: missing 'family'");
    const std::string fam = j.at("family").get<std::string>();
    const ChartKind chart = chart_from_string(j.value("chart", std::string("cartesian")));
    if (fam == "cigar_rb") {
        const double rho = j.value("rho", 0.0);
        const double t = j.value("t", 0.0);
        return MetricSpec::cigar(SolitonParams::from_rho_t(rho, t), chart);
    }
    if (fam == "flat") return MetricSpec::flat(chart);
    if (fam == "product") return MetricSpec::product();
    if (fam == "warped") {
        if (!j.contains("psi")) throw ParameterError("warped metric: missing 'psi'");
        return MetricSpec::warped(curve_from_json(j.at("psi")));
    }
    if (fam == "conformal_flat") {
        if (!j.contains("phi")) throw ParameterError("conformal_flat metric: missing 'phi'");
        return MetricSpec::conformal_flat(curve_from_json(j.at("phi")));
    }
    throw UnknownNameError("unknown metric family '" + fam + "'");
}

inline nlohmann::json metric_to_json(const MetricSpec& spec) {
    nlohmann::json j{{"family", to_string(spec.family)}, {"chart", to_string(spec.chart)}};
    if (spec.family == MetricFamily::cigar_rb) {
        j["rho"] = spec.params.rho;
        j["t"] = spec.params.t;
    }
    if (spec.family == MetricFamily::warped) j["psi"] = curve_to_json(spec.psi);
    if (spec.family == MetricFamily::conformal_flat) j["phi"] = curve_to_json(spec.phi);
    return j;
}

} // namespace cigar
