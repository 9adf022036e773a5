#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "calculus.hpp"
#include "charts.hpp"
#include "errors.hpp"
#include "field_types.hpp"
#include "functions.hpp"
#include "metrics.hpp"
#include "sampling.hpp"

namespace cigar {

// Parameters consumed by catalog().  A, B are the coefficients of the radial
// family w(s)^2 = A tanh(s)^2 + B; C is the angular speed of the mixed
// family; v feeds the free-function families; negate flips the radial sign.
struct FieldParams {
    SolitonParams params{};
    double A = 1.0;
    double B = 0.0;
    double C = 0.0;
    Curve v{};
    bool negate = false;
    double domain_s_min = 0.2;
    double domain_s_max = 3.0;
};

inline const std::vector<std::string>& field_catalog_names() {
    static const std::vector<std::string> names = {
        "dx",        "dy",       "rotation",     "dilation",     "xi",
        "fifth_basis", "radial_mk", "mixed_mk",   "angular_test", "product_test"};
    return names;
}

namespace detail {

inline std::function<double(double)> radial_profile(double A, double B, bool negate,
                                                    double s_lo, double s_hi) {
    auto radicand = [A, B](double s) {
        const double th = std::tanh(s);
        return A * th * th + B;
    };
    // A tanh^2 + B is monotone in tanh^2, so endpoint checks cover the domain
    if (radicand(s_lo) < 0.0 || radicand(s_hi) < 0.0)
        throw ConstraintError("radial field: A tanh(s)^2 + B negative on [" +
                              std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]");
    const double sign = negate ? -1.0 : 1.0;
    return [radicand, sign](double s) {
        const double q = radicand(s);
        if (q < 0.0) throw ConstraintError("radial field: negative radicand at s = " +
                                           std::to_string(s));
        return sign * std::sqrt(q);
    };
}

} // namespace detail

inline VectorFieldSpec catalog(std::string_view name, const FieldParams& fp = {}) {
    VectorFieldSpec v;
    v.name = std::string(name);
    v.params["rho"] = fp.params.rho;
    v.params["t"] = fp.params.t;

    if (name == "dx") {
        v.chart = ChartKind::cartesian;
        v.components = [](const ChartPoint&) { return Vec2{1.0, 0.0}; };
        return v;
    }
    if (name == "dy") {
        v.chart = ChartKind::cartesian;
        v.components = [](const ChartPoint&) { return Vec2{0.0, 1.0}; };
        return v;
    }
    if (name == "rotation") {
        v.chart = ChartKind::cartesian;
        v.components = [](const ChartPoint& p) { return Vec2{-p.c2, p.c1}; };
        return v;
    }
    if (name == "dilation") {
        v.chart = ChartKind::cartesian;
        v.components = [](const ChartPoint& p) { return Vec2{p.c1, p.c2}; };
        return v;
    }
    if (name == "xi") {
        // gradient of the soliton potential: -2 (1 - 2 rho) (x, y)
        const double c = -2.0 * (1.0 - 2.0 * fp.params.rho);
        v.chart = ChartKind::cartesian;
        v.components = [c](const ChartPoint& p) { return Vec2{c * p.c1, c * p.c2}; };
        return v;
    }
    if (name == "fifth_basis") {
        // radial unit-speed direction of the geodesic chart, pushed to
        // cartesian components; undefined at the origin
        const double E = fp.params.E;
        v.chart = ChartKind::cartesian;
        v.params["E"] = E;
        v.components = [E](const ChartPoint& p) {
            const double r2 = p.c1 * p.c1 + p.c2 * p.c2;
            if (r2 < kRadialExclusion * kRadialExclusion)
                throw DomainError("fifth_basis: undefined at the origin");
            const double m = std::sqrt(1.0 + E / r2);
            return Vec2{m * p.c1, m * p.c2};
        };
        return v;
    }
    if (name == "radial_mk") {
        auto w = detail::radial_profile(fp.A, fp.B, fp.negate, fp.domain_s_min, fp.domain_s_max);
        v.chart = ChartKind::geodesic_polar;
        v.params["A"] = fp.A;
        v.params["B"] = fp.B;
        v.params["negate"] = fp.negate ? 1.0 : 0.0;
        v.components = [w](const ChartPoint& p) { return Vec2{w(p.c1), 0.0}; };
        return v;
    }
    if (name == "mixed_mk") {
        auto w = detail::radial_profile(fp.A, fp.B, fp.negate, fp.domain_s_min, fp.domain_s_max);
        v.chart = ChartKind::geodesic_polar;
        v.params["A"] = fp.A;
        v.params["B"] = fp.B;
        v.params["C"] = fp.C;
        v.components = [w, C = fp.C](const ChartPoint& p) { return Vec2{w(p.c1), C}; };
        return v;
    }
    if (name == "angular_test") {
        if (!fp.v.valid()) throw ParameterError("angular_test: needs a profile function 'v'");
        v.chart = ChartKind::polar;
        v.components = [vv = fp.v](const ChartPoint& p) { return Vec2{0.0, vv(p.c1)}; };
        return v;
    }
    if (name == "product_test") {
        if (!fp.v.valid()) throw ParameterError("product_test: needs a profile function 'v'");
        v.chart = ChartKind::cartesian;
        v.components = [vv = fp.v](const ChartPoint& p) { return Vec2{vv(p.c1), 0.0}; };
        return v;
    }
    throw UnknownNameError("no field named '" + std::string(name) + "' in the catalog");
}

// Express V in another chart: components transform with the chart Jacobian.
inline VectorFieldSpec pushforward(const VectorFieldSpec& V, ChartKind target,
                                   const SolitonParams& sp = {}) {
    if (V.chart == target) return V;
    VectorFieldSpec out = V;
    out.chart = target;
    const ChartKind src = V.chart;
    out.components = [V, src, target, sp](const ChartPoint& q) {
        const ChartPoint p = transform_point(q, src, sp);
        return chart_jacobian(p, target, sp) * V.components(p);
    };
    return out;
}

enum class FieldClassKind { killing, conformal, mixed_killing, none };

inline const char* to_string(FieldClassKind k) {
    switch (k) {
        case FieldClassKind::killing: return "killing";
        case FieldClassKind::conformal: return "conformal";
        case FieldClassKind::mixed_killing: return "mixed_killing";
        case FieldClassKind::none: return "none";
    }
    return "?";
}

struct FieldClass {
    FieldClassKind kind = FieldClassKind::none;
    // lambda(p) with L_V g = 2 lambda g, when conformal
    std::vector<std::pair<ChartPoint, double>> conformal_factor_samples;
    // f(p) with L_V L_V g = f L_V g, when mixed
    std::vector<std::pair<ChartPoint, double>> mixed_factor_samples;
    ProportionalityReport versus_metric;
    ProportionalityReport versus_first_lie;
    double max_first_lie_norm = 0.0;
};

// Hierarchy test: Killing, then conformal, then mixed.  A candidate Killing
// verdict is re-examined on a jittered sample; if it falls apart there the
// sample was degenerate and the caller gets an error, not a wrong class.
inline FieldClass classify(const VectorFieldSpec& V, const MetricSpec& gspec,
                           std::span<const ChartPoint> sample, double tol = 1e-6,
                           const CalcOptions& opt = {}) {
    if (V.chart != gspec.chart)
        throw ParameterError("classify: field chart does not match metric chart");
    if (sample.empty()) throw ParameterError("classify: empty sample");

    std::vector<ChartPoint> pts;
    pts.reserve(sample.size());
    for (const auto& p : sample) pts.push_back(transform_point(p, gspec.chart, gspec.params));

    const SymTensorField g = metric_field(gspec);
    const SymTensorField first{
        gspec.chart, [g, V, opt](const ChartPoint& q) { return lie_derivative(g, V, q, opt); }};

    FieldClass out;
    double gscale = 0.0;
    for (const auto& p : pts) gscale = std::max(gscale, max_abs(g.eval(p)));

    double max_l1 = 0.0;
    for (const auto& p : pts) max_l1 = std::max(max_l1, frobenius(first.eval(p)));
    out.max_first_lie_norm = max_l1;

    if (max_l1 < tol * gscale) {
        const auto jit = jitter_sample(pts, gspec.params);
        double max_j = 0.0;
        for (const auto& p : jit) max_j = std::max(max_j, frobenius(first.eval(p)));
        if (max_j >= tol * gscale)
            throw DegenerateSampleError(
                "classify: Lie derivative vanishes on the sample but not off it (sample max " +
                std::to_string(max_l1) + ", jittered max " + std::to_string(max_j) + ")");
        out.kind = FieldClassKind::killing;
        return out;
    }

    out.versus_metric = proportionality(first, g, pts, tol, opt);

    const SymTensorField second{gspec.chart, [g, V, opt](const ChartPoint& q) {
                                    return second_lie_derivative(g, V, q, opt);
                                }};
    out.versus_first_lie = proportionality(second, first, pts, tol, opt);
    if (out.versus_first_lie.is_proportional)
        out.mixed_factor_samples = out.versus_first_lie.factor_samples;

    // Every conformal field satisfies the mixed relation as well, so the
    // factor samples above stay available; the verdict is the strongest class.
    if (out.versus_metric.is_proportional && !out.versus_metric.is_zero) {
        out.kind = FieldClassKind::conformal;
        for (const auto& [p, c] : out.versus_metric.factor_samples)
            out.conformal_factor_samples.emplace_back(p, 0.5 * c);
        return out;
    }

    if (out.versus_first_lie.is_proportional) {
        out.kind = FieldClassKind::mixed_killing;
        return out;
    }

    out.kind = FieldClassKind::none;
    return out;
}

// Closed form of the mixed factor for the potential gradient field:
// f = -4 (1 - 2 rho) (E - r^2) / (E + r^2).  Degenerates at rho = 1/2,
// where the field itself vanishes.
inline double mixed_factor_xi(const SolitonParams& sp, const ChartPoint& p) {
    const double beta = 1.0 - 2.0 * sp.rho;
    if (std::abs(beta) < 1e-12)
        throw DegenerateRhoError("mixed_factor_xi: rho = 1/2 makes the field trivial");
    const double r2 = radius_squared(p, sp);
    return -4.0 * beta * (sp.E - r2) / (sp.E + r2);
}

// Mixed factor of a conformal field from its conformal factor:
// f = V(lambda)/lambda + 2 lambda.  Requires lambda(p) != 0.
inline double conformal_factor_formula(const VectorFieldSpec& V, const ScalarField& lambda,
                                       const ChartPoint& p, const CalcOptions& opt = {}) {
    detail::require_chart(V.chart, p, "conformal_factor_formula");
    detail::require_chart(lambda.chart, p, "conformal_factor_formula");
    const double lam = lambda.eval(p);
    if (std::abs(lam) < 1e-14)
        throw DomainError("conformal_factor_formula: lambda vanishes at the point");
    const Vec2 v0 = V.components(p);
    const double d0 = detail::partial(lambda, p, 0, opt.fd1);
    const double d1 = detail::partial(lambda, p, 1, opt.fd1);
    return (v0.x * d0 + v0.y * d1) / lam + 2.0 * lam;
}

// Mixed factor for v(x) d/dx on the flat product plane: v v''/v' + 2 v'.
inline double product_mixed_factor(const Curve& v, double x) {
    if (!v.valid()) throw ParameterError("product_mixed_factor: invalid profile");
    const double vp = v.d1(x);
    if (std::abs(vp) < 1e-14)
        throw DomainError("product_mixed_factor: v'(x) vanishes at x = " + std::to_string(x));
    return v(x) * v.d2(x) / vp + 2.0 * vp;
}

struct RankReport {
    int rank = 0;
    std::vector<double> singular_values;
};

// Numerical dimension of the span of a family of fields, from the singular
// values of their sampled component matrix.
inline RankReport rank_of_span(const std::vector<VectorFieldSpec>& fields,
                               std::span<const ChartPoint> sample, double tol = 1e-6,
                               const SolitonParams& sp = {}) {
    if (fields.empty()) throw ParameterError("rank_of_span: no fields");
    if (2 * sample.size() < fields.size())
        throw ParameterError("rank_of_span: sample too small for the family");

    std::vector<std::vector<double>> rows;
    rows.reserve(fields.size());
    for (const auto& f : fields) {
        std::vector<double> row;
        row.reserve(2 * sample.size());
        for (const auto& p : sample) {
            const Vec2 c = f.components(transform_point(p, f.chart, sp));
            row.push_back(c.x);
            row.push_back(c.y);
        }
        rows.push_back(std::move(row));
    }

    RankReport rep;
    rep.singular_values = singular_values(rows);
    const double top = rep.singular_values.empty() ? 0.0 : rep.singular_values.front();
    for (double s : rep.singular_values)
        if (s > tol * top) ++rep.rank;
    return rep;
}

inline VectorFieldSpec field_from_json(const nlohmann::json& j, const SolitonParams& sp = {}) {
    if (!j.contains("name")) throw ParameterError("field: missing 'name'");
    FieldParams fp;
    fp.params = sp;
    if (j.contains("rho") || j.contains("t"))
        fp.params = SolitonParams::from_rho_t(j.value("rho", 0.0), j.value("t", 0.0));
    fp.A = j.value("A", 1.0);
    fp.B = j.value("B", 0.0);
    fp.C = j.value("C", 0.0);
    fp.negate = j.value("negate", false);
    if (j.contains("v")) fp.v = curve_from_json(j.at("v"));
    return catalog(j.at("name").get<std::string>(), fp);
}

} // namespace cigar
