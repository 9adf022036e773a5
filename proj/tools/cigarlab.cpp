// cigarlab: command-line laboratory for the cigar soliton's geometry.
// Every subcommand writes its artifacts atomically and exits 0 only when the
// run's checks land inside tolerance; usage problems and runtime faults get
// their own statuses so scripts can tell them apart.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cigar/cigar.hpp>

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

constexpr int kExitPass = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string command; // from config; an explicit subcommand wins
    std::string config_path;
    std::string out_flag;   // --out
    std::string out_config; // output.path from config
    std::vector<std::string> formats{"csv", "json"};

    json metric; // explicit metric document; built from flags when absent
    json field;  // explicit field document

    double rho = 0.0;
    double t = 0.0;

    int sample_count = 24;
    std::uint64_t seed = 20260819ull;
    double s_min = 0.2;
    double s_max = 3.0;

    double tol = 1e-6;
    double drift_tol = 1e-8;
    double rig_tol = 1e-8;

    int grid_points = 25;
    double r_max = 5.0;
    double theta_ray = 0.7;

    std::string field_name;
    std::string metric_family = "cigar_rb";
    double A = 1.0, B = 0.0, C = 0.0;
    std::string profile;
    std::vector<double> profile_coeffs;
    double profile_shift = 0.0;

    double k = 1.0;
    double ell = 0.6;
    std::vector<double> span{-5.0, 5.0};
    int trace_points = 201;
    double s0 = 1.0;
    bool cartesian_check = false;
    bool svg = false;

    double rig_A = 1.0;
    double rig_r_max = 8.0;
    double rig_step = 0.01;

    bool json_stdout = false;
    std::string fault = "none";
};

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
    throw cigar::ParameterError("config " + where + ": unknown key '" + key + "'");
}

void apply_config(Options& o, const json& doc) {
    if (!doc.is_object()) throw cigar::ParameterError("config: root must be a JSON object");
    for (const auto& [key, val] : doc.items()) {
        if (key == "schema_version") {
            if (!val.is_number_integer() || val.get<int>() != kSchemaVersion)
                throw cigar::ParameterError("config: unsupported schema_version");
        } else if (key == "command") {
            o.command = val.get<std::string>();
        } else if (key == "metric") {
            o.metric = val;
            if (val.contains("rho")) o.rho = val.at("rho").get<double>();
            if (val.contains("t")) o.t = val.at("t").get<double>();
        } else if (key == "field") {
            o.field = val;
        } else if (key == "sample") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "count") o.sample_count = v2.get<int>();
                else if (k2 == "seed") o.seed = v2.get<std::uint64_t>();
                else if (k2 == "s_min") o.s_min = v2.get<double>();
                else if (k2 == "s_max") o.s_max = v2.get<double>();
                else bad_key("sample", k2);
            }
        } else if (key == "output") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "path") o.out_config = v2.get<std::string>();
                else if (k2 == "format") o.formats = v2.get<std::vector<std::string>>();
                else bad_key("output", k2);
            }
        } else if (key == "tolerances") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "check") o.tol = v2.get<double>();
                else if (k2 == "drift") o.drift_tol = v2.get<double>();
                else if (k2 == "rigidity_defect") o.rig_tol = v2.get<double>();
                else bad_key("tolerances", k2);
            }
        } else if (key == "grid") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "points") o.grid_points = v2.get<int>();
                else if (k2 == "r_max") o.r_max = v2.get<double>();
                else if (k2 == "theta") o.theta_ray = v2.get<double>();
                else bad_key("grid", k2);
            }
        } else if (key == "geodesic") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "k") o.k = v2.get<double>();
                else if (k2 == "ell") o.ell = v2.get<double>();
                else if (k2 == "span") o.span = v2.get<std::vector<double>>();
                else if (k2 == "points") o.trace_points = v2.get<int>();
                else if (k2 == "s0") o.s0 = v2.get<double>();
                else if (k2 == "cartesian_check") o.cartesian_check = v2.get<bool>();
                else bad_key("geodesic", k2);
            }
        } else if (key == "rigidity") {
            for (const auto& [k2, v2] : val.items()) {
                if (k2 == "A") o.rig_A = v2.get<double>();
                else if (k2 == "r_max") o.rig_r_max = v2.get<double>();
                else if (k2 == "step") o.rig_step = v2.get<double>();
                else bad_key("rigidity", k2);
            }
        } else if (key == "fault") {
            o.fault = val.get<std::string>();
        } else {
            bad_key("root", key);
        }
    }
}

void load_config(Options& o, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cigar::IoError("config: cannot open " + path);
    json doc;
    in >> doc;
    apply_config(o, doc);
}

// Output directory: --out beats the environment override, which beats the
// config, which beats the working directory.
std::filesystem::path resolve_out(const Options& o, bool* explicit_out = nullptr) {
    if (explicit_out) *explicit_out = true;
    if (!o.out_flag.empty()) return o.out_flag;
    if (const char* env = std::getenv("CIGARLAB_OUT"); env && *env) return env;
    if (!o.out_config.empty()) return o.out_config;
    if (explicit_out) *explicit_out = false;
    return ".";
}

bool has_format(const Options& o, std::string_view f) {
    return std::find(o.formats.begin(), o.formats.end(), f) != o.formats.end();
}

void validate_formats(const Options& o) {
    for (const auto& f : o.formats)
        if (f != "csv" && f != "json" && f != "svg")
            throw cigar::ParameterError("format must be csv, json or svg (got '" + f + "')");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * double(i) / double(n - 1));
    return v;
}

json base_doc(const Options& o, const char* command) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    doc["seed"] = o.seed;
    doc["outputs"] = json::array();
    return doc;
}

void emit(const std::filesystem::path& dir, const std::string& name, const std::string& content,
          json& doc) {
    cigar::atomic_write(dir / name, content);
    doc["outputs"].push_back(name);
}

void emit_summary(const std::filesystem::path& dir, const std::string& name, json& doc) {
    doc["outputs"].push_back(name);
    cigar::atomic_write(dir / name, doc.dump(2) + "\n");
}

void report_line(const char* command, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << command << ": " << detail << "\n";
}

// ---------------------------------------------------------------------------

int cmd_verify_soliton(const Options& o) {
    const auto dir = resolve_out(o);
    const auto sp = cigar::SolitonParams::from_rho_t(o.rho, o.t);
    if (o.grid_points < 2) throw cigar::ParameterError("verify-soliton: need at least 2 points");

    std::vector<cigar::SolitonResidualEntry> rows;
    double worst = 0.0;
    for (double r : linspace(0.0, o.r_max, o.grid_points)) {
        const cigar::ChartPoint p{cigar::ChartKind::cartesian, r * std::cos(o.theta_ray),
                                  r * std::sin(o.theta_ray)};
        rows.push_back(cigar::soliton_residual(sp, p));
        worst = std::max(worst, rows.back().norm);
    }
    const bool pass = worst < o.tol;

    json doc = base_doc(o, "verify-soliton");
    doc["rho"] = o.rho;
    doc["t"] = o.t;
    doc["E"] = sp.E;
    doc["points"] = o.grid_points;
    doc["r_max"] = o.r_max;
    doc["theta"] = o.theta_ray;
    doc["max_residual_norm"] = worst;
    doc["tolerance"] = o.tol;
    doc["pass"] = pass;
    if (has_format(o, "csv")) emit(dir, "verify_soliton.csv", cigar::residual_csv(rows, o.rho, o.t), doc);
    if (has_format(o, "json")) emit_summary(dir, "verify_soliton.json", doc);

    report_line("verify-soliton", pass,
                "max residual " + cigar::fmt_g17(worst) + " over " +
                    std::to_string(o.grid_points) + " points (tolerance " +
                    cigar::fmt_g17(o.tol) + ")");
    return pass ? kExitPass : kExitCheckFail;
}

cigar::MetricSpec metric_for(const Options& o, const cigar::SolitonParams& sp,
                             cigar::ChartKind field_chart) {
    if (!o.metric.is_null()) return cigar::metric_from_json(o.metric);
    if (o.metric_family == "cigar_rb") return cigar::MetricSpec::cigar(sp, field_chart);
    if (o.metric_family == "flat") return cigar::MetricSpec::flat(field_chart);
    if (o.metric_family == "product") return cigar::MetricSpec::product();
    throw cigar::UnknownNameError("classify-field: metric family '" + o.metric_family +
                                  "' needs a config document");
}

int cmd_classify_field(const Options& o) {
    const auto dir = resolve_out(o);
    const auto sp = cigar::SolitonParams::from_rho_t(o.rho, o.t);

    cigar::VectorFieldSpec V;
    if (!o.field.is_null()) {
        V = cigar::field_from_json(o.field, sp);
    } else {
        if (o.field_name.empty())
            throw cigar::ParameterError("classify-field: provide --name or a config 'field'");
        cigar::FieldParams fp{sp};
        fp.A = o.A;
        fp.B = o.B;
        fp.C = o.C;
        fp.domain_s_min = o.s_min;
        fp.domain_s_max = o.s_max;
        if (!o.profile.empty())
            fp.v = cigar::curve_from_name(o.profile, o.profile_coeffs, o.profile_shift);
        V = cigar::catalog(o.field_name, fp);
    }
    const cigar::MetricSpec m = metric_for(o, sp, V.chart);

    // the product plane has no radial structure; sample a line instead
    std::vector<cigar::ChartPoint> sample;
    if (m.family == cigar::MetricFamily::product) {
        for (int i = 0; i < o.sample_count; ++i)
            sample.push_back({cigar::ChartKind::cartesian, 0.5 + 0.2 * i, 0.3});
    } else {
        cigar::SampleSpec ss;
        ss.count = o.sample_count;
        ss.seed = o.seed;
        ss.s_min = o.s_min;
        ss.s_max = o.s_max;
        ss.chart = m.chart;
        sample = cigar::annulus_sample(ss, sp);
    }

    const cigar::FieldClass cls = cigar::classify(V, m, sample, o.tol);

    json doc = base_doc(o, "classify-field");
    doc["class"] = cigar::to_string(cls.kind);
    doc["field"] = {{"name", V.name}, {"A", o.A}, {"B", o.B}, {"C", o.C}};
    doc["metric"] = cigar::metric_to_json(m);
    doc["sample"] = {{"count", static_cast<int>(sample.size())},
                     {"seed", o.seed},
                     {"s_min", o.s_min},
                     {"s_max", o.s_max}};
    doc["tolerance"] = o.tol;
    doc["max_first_lie_norm"] = cls.max_first_lie_norm;
    doc["conformal_residual"] = cls.versus_metric.relative_residual;
    doc["mixed_residual"] = cls.versus_first_lie.relative_residual;
    auto dump_samples = [](const std::vector<std::pair<cigar::ChartPoint, double>>& fs) {
        json arr = json::array();
        for (const auto& [p, v] : fs)
            arr.push_back({{"chart", cigar::to_string(p.kind)},
                           {"c1", p.c1},
                           {"c2", p.c2},
                           {"value", v}});
        return arr;
    };
    if (cls.kind == cigar::FieldClassKind::conformal)
        doc["conformal_factor_samples"] = dump_samples(cls.conformal_factor_samples);
    if (cls.kind == cigar::FieldClassKind::mixed_killing)
        doc["mixed_factor_samples"] = dump_samples(cls.mixed_factor_samples);
    doc["pass"] = true;
    if (has_format(o, "json")) emit_summary(dir, "classify_field.json", doc);

    std::cout << json{{"class", cigar::to_string(cls.kind)}}.dump() << "\n";
    return kExitPass;
}

int cmd_geodesic(const Options& o) {
    const auto dir = resolve_out(o);
    if (o.span.size() != 2 || !(o.span[0] < o.span[1]))
        throw cigar::ParameterError("geodesic: --span needs two increasing numbers");
    if (o.trace_points < 2) throw cigar::ParameterError("geodesic: need at least 2 points");
    if (!(o.span[0] <= 0.0 && 0.0 <= o.span[1]))
        throw cigar::ParameterError("geodesic: span must contain sigma = 0");
    const auto sp = cigar::SolitonParams::from_rho_t(o.rho, o.t);

    cigar::GeodesicOptions gopt;
    gopt.params = sp;
    gopt.drift_budget_per_20 = o.drift_tol;
    gopt.output_grid = linspace(o.span[0], o.span[1], o.trace_points);

    const bool radial = o.ell == 0.0;
    cigar::GeodesicState init;
    if (radial) {
        if (!(o.k > 0.0)) throw cigar::ParameterError("geodesic: need k > 0");
        if (!(o.s0 > 0.0)) throw cigar::ParameterError("geodesic: radial start needs s0 > 0");
        init = {0.0, o.s0, 0.0, -std::sqrt(o.k), 0.0};
    } else {
        init = cigar::turning_point_state(o.k, o.ell);
    }

    const cigar::GeodesicTrace tr = cigar::integrate_geodesic(init, o.span[0], o.span[1], gopt);
    const cigar::ConservedPair c0{o.ell, o.k};

    json doc = base_doc(o, "geodesic");
    doc["k"] = o.k;
    doc["ell"] = o.ell;
    doc["rho"] = o.rho;
    doc["t"] = o.t;
    doc["E"] = sp.E;
    doc["span"] = {o.span[0], o.span[1]};
    doc["points"] = o.trace_points;
    doc["classification"] =
        tr.classification == cigar::GeodesicClass::radial ? "radial" : "non_radial";
    doc["max_ell_drift"] = tr.max_ell_drift;
    doc["max_k_drift"] = tr.max_k_drift;
    doc["drift_budget"] = tr.drift_budget;
    doc["drift_ok"] = tr.drift_ok;
    doc["total_winding"] = tr.total_winding;
    doc["tip_event"] = tr.tip_event;
    if (tr.tip_event) doc["tip_sigma"] = tr.tip_sigma;

    bool pass = tr.drift_ok;
    double closed_gap = 0.0;
    if (!radial) {
        for (const auto& e : tr.entries)
            closed_gap =
                std::max(closed_gap, std::abs(e.state.s - cigar::closed_form_s(c0, e.state.sigma)));
        doc["closed_form_max_gap"] = closed_gap;
        pass = pass && closed_gap < o.tol;

        const cigar::TurningPoint tp = cigar::turning_point(c0, sp);
        doc["s_min"] = tp.s_min;
        doc["r_min"] = tp.r_min;
        doc["min_r_trace"] = cigar::min_r_of_trace(tr);
        if (tr.turning) doc["turning_sigma"] = tr.turning->sigma;
    }

    if (o.cartesian_check) {
        // rerun in the cartesian chart, which is smooth through the tip, and
        // compare the radial profile at shared grid sigmas away from it
        const cigar::CartesianGeodesicState cinit = cigar::to_cartesian_state(init, sp);
        const double sqE = std::sqrt(sp.E);
        double worst = 0.0, end_r = std::hypot(cinit.x, cinit.y);
        int compared = 0;
        double cdrift_ell = 0.0, cdrift_k = 0.0;
        for (double end : {o.span[0], o.span[1]}) {
            if (end == init.sigma) continue;
            const auto ctr = cigar::integrate_geodesic_cartesian(cinit, end, gopt);
            cdrift_ell = std::max(cdrift_ell, ctr.max_ell_drift);
            cdrift_k = std::max(cdrift_k, ctr.max_k_drift);
            for (const auto& n : ctr.nodes) {
                const double s_cart = std::asinh(std::hypot(n.y[0], n.y[1]) / sqE);
                auto it = std::lower_bound(tr.entries.begin(), tr.entries.end(), n.t,
                                           [](const cigar::TraceEntry& e, double sig) {
                                               return e.state.sigma < sig;
                                           });
                if (it != tr.entries.end() &&
                    std::abs(it->state.sigma - n.t) <= 1e-12 * std::max(1.0, std::abs(n.t)) &&
                    it->state.s > 0.05) {
                    worst = std::max(worst, std::abs(s_cart - it->state.s));
                    ++compared;
                }
                if (std::abs(n.t - end) <= 1e-12 * std::max(1.0, std::abs(end)))
                    end_r = std::hypot(n.y[0], n.y[1]);
            }
        }
        doc["cartesian_check"] = {{"max_s_gap", worst},
                                  {"compared_points", compared},
                                  {"max_ell_drift", cdrift_ell},
                                  {"max_k_drift", cdrift_k},
                                  {"end_r", end_r}};
        pass = pass && compared > 0 && worst < o.tol;
    }

    doc["tolerance"] = o.tol;
    doc["pass"] = pass;

    if (has_format(o, "csv")) emit(dir, "geodesic_trace.csv", cigar::trace_csv(tr), doc);
    if (has_format(o, "svg")) {
        std::vector<std::pair<double, double>> markers;
        if (tr.turning && tr.turning->refined_from_trace) {
            const auto st = cigar::sample_trace(tr, tr.turning->sigma);
            const double r = std::sqrt(sp.E) * std::sinh(tr.turning->s_min);
            markers.emplace_back(r * std::cos(st.theta), r * std::sin(st.theta));
        }
        emit(dir, "geodesic_trace.svg", cigar::svg_plot({cigar::trace_xy(tr)}, markers), doc);
    }
    if (has_format(o, "json")) emit_summary(dir, "geodesic_summary.json", doc);

    std::string detail = "drift " + cigar::fmt_g17(std::max(tr.max_ell_drift, tr.max_k_drift)) +
                         ", winding " + cigar::fmt_g17(tr.total_winding);
    if (!radial)
        detail += ", s_min " + cigar::fmt_g17(doc["s_min"].get<double>()) + ", closed-form gap " +
                  cigar::fmt_g17(closed_gap);
    report_line("geodesic", pass, detail);
    return pass ? kExitPass : kExitCheckFail;
}

int cmd_curvature_profile(const Options& o) {
    const auto dir = resolve_out(o);
    if (o.grid_points < 2)
        throw cigar::ParameterError("curvature-profile: need at least 2 points");
    const auto sp = cigar::SolitonParams::from_rho_t(o.rho, o.t);
    const cigar::MetricSpec spec = cigar::MetricSpec::cigar(sp, cigar::ChartKind::cartesian);
    const cigar::SymTensorField g = cigar::metric_field(spec);

    std::ostringstream csv;
    csv << "r,curvature,closed_form,rel_defect,scalar_curvature\n";
    std::vector<std::pair<double, double>> curve;
    double worst = 0.0;
    for (double r : linspace(0.0, o.r_max, o.grid_points)) {
        const cigar::ChartPoint p{cigar::ChartKind::cartesian, r * std::cos(o.theta_ray),
                                  r * std::sin(o.theta_ray)};
        const double K = cigar::gauss_curvature(g, p);
        const double closed = 2.0 * sp.E / (sp.E + r * r);
        const double defect = std::abs(K - closed) / closed;
        worst = std::max(worst, defect);
        curve.emplace_back(r, K);
        csv << cigar::fmt_g17(r) << ',' << cigar::fmt_g17(K) << ',' << cigar::fmt_g17(closed)
            << ',' << cigar::fmt_g17(defect) << ',' << cigar::fmt_g17(2.0 * K) << '\n';
    }
    const bool pass = worst < o.tol;
    const auto prof = cigar::asymptotic_profile(spec);

    json doc = base_doc(o, "curvature-profile");
    doc["rho"] = o.rho;
    doc["t"] = o.t;
    doc["E"] = sp.E;
    doc["points"] = o.grid_points;
    doc["r_max"] = o.r_max;
    doc["closed_form"] = "2E/(E+r^2)";
    doc["max_rel_defect"] = worst;
    doc["tolerance"] = o.tol;
    doc["asymptotics"] = {{"cylinder_limit", prof.cylinder_limit},
                          {"smooth_tip", prof.smooth_tip}};
    doc["pass"] = pass;
    if (has_format(o, "csv")) emit(dir, "curvature_profile.csv", csv.str(), doc);
    if (has_format(o, "svg")) emit(dir, "curvature_profile.svg", cigar::svg_plot({curve}), doc);
    if (has_format(o, "json")) emit_summary(dir, "curvature_profile.json", doc);

    report_line("curvature-profile", pass,
                "max relative defect " + cigar::fmt_g17(worst) + " against 2E/(E+r^2)");
    return pass ? kExitPass : kExitCheckFail;
}

int cmd_rank_check(const Options& o) {
    const auto dir = resolve_out(o);
    const auto sp = cigar::SolitonParams::from_rho_t(o.rho, o.t);

    std::vector<cigar::VectorFieldSpec> five;
    for (const char* n : {"dx", "dy", "rotation", "dilation", "fifth_basis"})
        five.push_back(cigar::catalog(n, {sp}));
    const std::vector<cigar::VectorFieldSpec> four(five.begin(), five.begin() + 4);

    cigar::SampleSpec ss;
    ss.count = o.sample_count;
    ss.seed = o.seed;
    ss.s_min = o.s_min;
    ss.s_max = o.s_max;
    const auto sample = cigar::annulus_sample(ss, sp);

    const auto rep5 = cigar::rank_of_span(five, sample, o.tol, sp);
    const auto rep4 = cigar::rank_of_span(four, sample, o.tol, sp);
    const double ratio = rep5.singular_values.back() / rep5.singular_values.front();
    const bool pass = rep5.rank == 5 && rep4.rank == 4 && ratio > o.tol;

    json doc = base_doc(o, "rank-check");
    doc["rho"] = o.rho;
    doc["t"] = o.t;
    doc["sample_count"] = o.sample_count;
    doc["rank_five_family"] = rep5.rank;
    doc["rank_conformal_four"] = rep4.rank;
    doc["singular_values"] = rep5.singular_values;
    doc["sigma_ratio"] = ratio;
    doc["tolerance"] = o.tol;
    doc["pass"] = pass;
    if (has_format(o, "json")) emit_summary(dir, "rank_check.json", doc);

    report_line("rank-check", pass,
                "rank " + std::to_string(rep5.rank) + " (conformal four: " +
                    std::to_string(rep4.rank) + "), sigma ratio " + cigar::fmt_g17(ratio));
    return pass ? kExitPass : kExitCheckFail;
}

int cmd_rigidity_ode(const Options& o) {
    const auto dir = resolve_out(o);
    if (!(o.rig_A > 0.0)) throw cigar::ParameterError("rigidity-ode: need A > 0");
    if (std::abs(1.0 - 2.0 * o.rho) < 1e-12)
        throw cigar::ParameterError("rigidity-ode: rho = 1/2 collapses the profile equation");

    const cigar::RigidityProfile pr = cigar::rigidity_ode_solve(o.rig_A, o.rig_r_max, o.rig_step);
    const double defect = cigar::rigidity_profile_defect(pr);
    const double beta = 1.0 - 2.0 * o.rho;
    const cigar::RigidityReport rep =
        cigar::rigidity_consistency(o.rig_A, -2.0 * o.rig_A * beta, o.rho, o.rig_r_max, 0.002);
    const bool pass = defect < o.rig_tol && rep.curvature_positive;

    json doc = base_doc(o, "rigidity-ode");
    doc["A"] = o.rig_A;
    doc["rho"] = o.rho;
    doc["r_max"] = o.rig_r_max;
    doc["step"] = o.rig_step;
    doc["max_defect"] = defect;
    doc["defect_tolerance"] = o.rig_tol;
    doc["coupling"] = rep.a;
    doc["max_ode_residual"] = rep.max_ode_residual;
    doc["max_rr_residual"] = rep.max_rr_residual;
    doc["max_tt_residual"] = rep.max_tt_residual;
    doc["min_curvature"] = rep.min_curvature;
    doc["curvature_positive"] = rep.curvature_positive;
    doc["pass"] = pass;
    if (has_format(o, "csv")) emit(dir, "rigidity_profile.csv", cigar::rigidity_csv(pr), doc);
    if (has_format(o, "svg")) {
        std::vector<std::pair<double, double>> solved, closed;
        for (std::size_t i = 0; i < pr.r.size(); ++i) {
            solved.emplace_back(pr.r[i], pr.h[i]);
            closed.emplace_back(pr.r[i], cigar::rigidity_closed_form(pr.A, pr.r[i]));
        }
        emit(dir, "rigidity_profile.svg", cigar::svg_plot({solved, closed}), doc);
    }
    if (has_format(o, "json")) emit_summary(dir, "rigidity_profile.json", doc);

    report_line("rigidity-ode", pass,
                "max |h - closed form| " + cigar::fmt_g17(defect) + ", min curvature " +
                    cigar::fmt_g17(rep.min_curvature));
    return pass ? kExitPass : kExitCheckFail;
}

int cmd_full_suite(const Options& o) {
    bool explicit_out = false;
    const auto dir = resolve_out(o, &explicit_out);

    cigar::SuiteOptions so;
    so.seed = o.seed;
    so.fault = cigar::fault_from_string(o.fault);
    const cigar::SuiteResult res = cigar::run_full_suite(so);
    json doc = cigar::suite_to_json(res);

    if (o.json_stdout)
        std::cout << doc.dump(2) << "\n";
    else
        cigar::print_suite(std::cout, res);
    if (explicit_out && has_format(o, "json"))
        cigar::atomic_write(dir / "full_suite.json", doc.dump(2) + "\n");

    return res.all_pass ? kExitPass : kExitCheckFail;
}

} // namespace

int main(int argc, char** argv) {
    Options o;

    // the config is applied before the regular parse, so flags override it
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string_view a = argv[i];
            if (a == "--config" || a == "-c") {
                if (i + 1 >= argc) throw cigar::ParameterError("--config needs a path");
                load_config(o, argv[i + 1]);
            } else if (a.rfind("--config=", 0) == 0) {
                load_config(o, std::string(a.substr(9)));
            } else if (a.size() > 2 && a.rfind("-c", 0) == 0 && a[2] != '-') {
                load_config(o, std::string(a.substr(2)));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App app{"numerical laboratory for the cigar soliton's geometry"};
    app.require_subcommand(0, 1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config,-c", o.config_path, "JSON run configuration; flags override");
        cmd->add_option("--out", o.out_flag, "output directory (else $CIGARLAB_OUT, else '.')");
        cmd->add_option("--format", o.formats, "artifact formats: csv, json, svg")
            ->delimiter(',');
        cmd->add_option("--seed", o.seed, "sampling seed, recorded in every summary");
        cmd->add_option("--tol", o.tol, "check tolerance");
        return cmd;
    };
    add_common(&app);

    CLI::App* vs = add_common(app.add_subcommand(
        "verify-soliton", "residual of the steady identity over a radial grid"));
    vs->add_option("--rho", o.rho, "interpolation parameter");
    vs->add_option("--t", o.t, "flow time");
    vs->add_option("--points", o.grid_points, "grid size");
    vs->add_option("--r-max", o.r_max, "outer radius of the grid");
    vs->add_option("--theta", o.theta_ray, "ray direction");

    CLI::App* cf = add_common(app.add_subcommand(
        "classify-field", "Killing / conformal / mixed classification of a catalog field"));
    cf->add_option("--name", o.field_name, "catalog field name");
    cf->add_option("--A", o.A, "radial profile coefficient");
    cf->add_option("--B", o.B, "radial profile offset");
    cf->add_option("--C", o.C, "angular component");
    cf->add_option("--rho", o.rho, "interpolation parameter");
    cf->add_option("--t", o.t, "flow time");
    cf->add_option("--metric", o.metric_family, "metric family: cigar_rb, flat, product");
    cf->add_option("--profile", o.profile, "profile curve name (exp, sin, poly, tanh_shift)");
    cf->add_option("--coeffs", o.profile_coeffs, "polynomial coefficients, constant first")
        ->delimiter(',');
    cf->add_option("--shift", o.profile_shift, "tanh_shift offset");
    cf->add_option("--count", o.sample_count, "sample size");
    cf->add_option("--s-min", o.s_min, "inner arclength bound of the sample annulus");
    cf->add_option("--s-max", o.s_max, "outer arclength bound of the sample annulus");

    CLI::App* ge = add_common(
        app.add_subcommand("geodesic", "integrate one trajectory and audit its invariants"));
    ge->add_option("--k", o.k, "squared speed");
    ge->add_option("--ell", o.ell, "angular momentum (0 = radial)");
    ge->add_option("--span", o.span, "affine parameter range")->expected(2);
    ge->add_option("--points", o.trace_points, "output grid size");
    ge->add_option("--rho", o.rho, "interpolation parameter");
    ge->add_option("--t", o.t, "flow time");
    ge->add_option("--s0", o.s0, "starting arclength for radial runs");
    ge->add_option("--drift-tol", o.drift_tol, "conserved-quantity drift budget per 20 units");
    ge->add_flag("--cartesian-check", o.cartesian_check,
                 "re-integrate in the cartesian chart and compare");

    CLI::App* cp = add_common(app.add_subcommand(
        "curvature-profile", "numerical curvature along a ray against the closed form"));
    cp->add_option("--rho", o.rho, "interpolation parameter");
    cp->add_option("--t", o.t, "flow time");
    cp->add_option("--points", o.grid_points, "grid size");
    cp->add_option("--r-max", o.r_max, "outer radius of the grid");
    cp->add_option("--theta", o.theta_ray, "ray direction");

    CLI::App* rc = add_common(app.add_subcommand(
        "rank-check", "numerical dimension of the mixed symmetry algebra"));
    rc->add_option("--rho", o.rho, "interpolation parameter");
    rc->add_option("--t", o.t, "flow time");
    rc->add_option("--count", o.sample_count, "sample size");
    rc->add_option("--s-min", o.s_min, "inner arclength bound of the sample annulus");
    rc->add_option("--s-max", o.s_max, "outer arclength bound of the sample annulus");

    CLI::App* ro = add_common(app.add_subcommand(
        "rigidity-ode", "radial profile equation against its closed-form solution"));
    ro->add_option("--A", o.rig_A, "curvature scale");
    ro->add_option("--rho", o.rho, "interpolation parameter");
    ro->add_option("--r-max", o.rig_r_max, "integration endpoint");
    ro->add_option("--step", o.rig_step, "output grid step");
    ro->add_option("--defect-tol", o.rig_tol, "profile defect tolerance");

    CLI::App* fs = add_common(app.add_subcommand(
        "full-suite", "run every acceptance check and print the pass/fail table"));
    fs->add_flag("--json", o.json_stdout, "print the machine-readable document instead");
    fs->add_option("--fault", o.fault,
                   "inject a deliberate defect: none, christoffel_sign, geodesic_rhs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    std::string command = o.command;
    for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();
    if (command.empty()) {
        std::cerr << "no command given; see --help\n";
        return kExitUsage;
    }

    try {
        validate_formats(o);
        if (command == "verify-soliton") return cmd_verify_soliton(o);
        if (command == "classify-field") return cmd_classify_field(o);
        if (command == "geodesic") return cmd_geodesic(o);
        if (command == "curvature-profile") return cmd_curvature_profile(o);
        if (command == "rank-check") return cmd_rank_check(o);
        if (command == "rigidity-ode") return cmd_rigidity_ode(o);
        if (command == "full-suite") return cmd_full_suite(o);
        std::cerr << "unknown command '" << command << "'\n";
        return kExitUsage;
    } catch (const cigar::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cigar::UnknownNameError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cigar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
