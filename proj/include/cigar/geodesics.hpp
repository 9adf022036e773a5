#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "charts.hpp"
#include "errors.hpp"
#include "ode.hpp"

namespace cigar {

// State of the geodesic flow in the arclength chart, y = (s, theta, s', th').
struct GeodesicState {
    double sigma = 0.0;
    double s = 0.0;
    double theta = 0.0;
    double s_dot = 0.0;
    double theta_dot = 0.0;
};

// ell = tanh(s)^2 theta' (Clairaut momentum), k = squared speed.
struct ConservedPair {
    double ell = 0.0;
    double k = 0.0;
};

inline ConservedPair conserved_of(const GeodesicState& st) {
    const double ps = std::tanh(st.s);
    const double w = ps * ps * st.theta_dot;
    return {w, st.s_dot * st.s_dot + w * st.theta_dot};
}

enum class GeodesicClass { radial, non_radial };

struct TurningPoint {
    double sigma = 0.0;
    double s_min = 0.0;
    double r_min = 0.0;
    bool refined_from_trace = false;
};

struct GeodesicOptions {
    OdeOptions ode{};
    SolitonParams params{};
    double s_floor = 1e-6;
    double drift_budget_per_20 = 1e-8;
    std::vector<double> output_grid;
    // fault injection: relative perturbation of the radial acceleration term
    double debug_rhs_perturbation = 0.0;
};

struct TraceEntry {
    GeodesicState state;
    ConservedPair conserved;
};

struct GeodesicTrace {
    std::vector<TraceEntry> entries;
    std::vector<OdePoint<4>> nodes; // raw integrator nodes, ascending sigma
    GeodesicClass classification = GeodesicClass::non_radial;
    std::optional<TurningPoint> turning;
    bool tip_event = false;
    double tip_sigma = 0.0;
    double max_ell_drift = 0.0;
    double max_k_drift = 0.0;
    double drift_budget = 0.0;
    bool drift_ok = true;
    double total_winding = 0.0; // accumulated delta theta over the span
    SolitonParams params{};
};

// Right-hand side of the geodesic equations for g = ds^2 + tanh(s)^2 dth^2:
//   s''  =  psi psi' th'^2,   th'' = -2 (psi'/psi) s' th'.
// The angular branch is skipped when th' is exactly zero, so radial motion
// never touches the cone-point singularity of psi'/psi.
inline std::array<double, 4> geodesic_rhs(double s, double s_dot, double theta_dot,
                                          const GeodesicOptions& opt = {}) {
    if (s <= opt.s_floor && std::abs(theta_dot) > 1e-12)
        throw TipProximityError("geodesic_rhs: angular motion at s = " + std::to_string(s));
    const double ps = std::tanh(s);
    const double ch = std::cosh(s);
    const double dps = 1.0 / (ch * ch);
    std::array<double, 4> d{};
    d[0] = s_dot;
    d[1] = theta_dot;
    d[2] = ps * dps * theta_dot * theta_dot * (1.0 + opt.debug_rhs_perturbation);
    d[3] = theta_dot == 0.0 ? 0.0 : -2.0 * (dps / ps) * s_dot * theta_dot;
    return d;
}

namespace detail {

inline std::vector<OdePoint<4>> geodesic_leg(const GeodesicState& init, double sigma_end,
                                             const GeodesicOptions& opt, bool& tip,
                                             double& tip_sigma) {
    auto rhs = [&opt](double, const std::array<double, 4>& y) {
        return geodesic_rhs(y[0], y[2], y[3], opt);
    };
    std::vector<double> grid;
    for (double g : opt.output_grid)
        if ((g - init.sigma) * (sigma_end - init.sigma) > 0 &&
            std::abs(g - init.sigma) < std::abs(sigma_end - init.sigma))
            grid.push_back(g);
    OdeStopInfo<4> info;
    auto stop = [&opt](double, const std::array<double, 4>& y) { return y[0] - opt.s_floor; };
    auto nodes = integrate_adaptive<4>(rhs, init.sigma, sigma_end,
                                       {init.s, init.theta, init.s_dot, init.theta_dot},
                                       opt.ode, grid, stop, &info);
    if (info.triggered) {
        tip = true;
        tip_sigma = info.t;
    }
    return nodes;
}

inline GeodesicState state_of(const OdePoint<4>& n) {
    return {n.t, n.y[0], n.y[1], n.y[2], n.y[3]};
}

} // namespace detail

inline GeodesicState turning_point_state(double k, double ell) {
    if (!(k > ell * ell) || !(k > 0.0))
        throw DomainError("turning_point_state: need k > ell^2 > 0");
    if (ell == 0.0) throw DomainError("turning_point_state: radial flow has no turning point");
    const double s_min = std::asinh(std::abs(ell) / std::sqrt(k - ell * ell));
    const double ps = std::tanh(s_min);
    return {0.0, s_min, 0.0, 0.0, ell / (ps * ps)};
}

// s(sigma) for the trajectory whose turning point sits at sigma = 0:
// cosh s = sqrt(k/(k - ell^2)) cosh(sqrt(k - ell^2) sigma).
inline double closed_form_s(const ConservedPair& c, double sigma) {
    const double mu = c.k - c.ell * c.ell;
    if (!(mu > 0.0) || !(c.k > 0.0)) throw DomainError("closed_form_s: need k > ell^2 > 0");
    const double root = std::sqrt(mu);
    const double amp = std::sqrt(c.k / mu);
    return std::acosh(amp * std::cosh(root * sigma));
}

// Closest approach of a non-radial trajectory, in both radial coordinates.
inline TurningPoint turning_point(const ConservedPair& c, const SolitonParams& sp) {
    const double mu = c.k - c.ell * c.ell;
    if (!(mu > 0.0) || c.ell == 0.0)
        throw DomainError("turning_point: need k > ell^2 and ell != 0");
    TurningPoint tp;
    tp.s_min = std::asinh(std::abs(c.ell) / std::sqrt(mu));
    tp.r_min = std::sqrt(sp.E) * std::abs(c.ell) / std::sqrt(mu);
    return tp;
}

inline GeodesicTrace integrate_geodesic(const GeodesicState& init, double sigma_a,
                                        double sigma_b, const GeodesicOptions& opt = {}) {
    if (!(sigma_a <= init.sigma && init.sigma <= sigma_b))
        throw ParameterError("integrate_geodesic: initial sigma outside the span");

    GeodesicTrace tr;
    tr.params = opt.params;

    bool tip_b = false, tip_f = false;
    double tip_sb = 0.0, tip_sf = 0.0;
    std::vector<OdePoint<4>> back, fwd;
    if (init.sigma > sigma_a) back = detail::geodesic_leg(init, sigma_a, opt, tip_b, tip_sb);
    if (init.sigma < sigma_b) fwd = detail::geodesic_leg(init, sigma_b, opt, tip_f, tip_sf);

    if (!back.empty()) {
        for (auto it = back.rbegin(); it != back.rend(); ++it) tr.nodes.push_back(*it);
    }
    if (!fwd.empty()) {
        auto it = fwd.begin();
        if (!tr.nodes.empty()) ++it; // shared initial node
        for (; it != fwd.end(); ++it) tr.nodes.push_back(*it);
    }
    if (tr.nodes.empty()) {
        auto rhs0 = geodesic_rhs(init.s, init.s_dot, init.theta_dot, opt);
        tr.nodes.push_back({init.sigma, {init.s, init.theta, init.s_dot, init.theta_dot}, rhs0});
    }

    tr.tip_event = tip_b || tip_f;
    tr.tip_sigma = tip_b ? tip_sb : tip_sf;

    for (const auto& n : tr.nodes) {
        const GeodesicState st = detail::state_of(n);
        tr.entries.push_back({st, conserved_of(st)});
    }

    const ConservedPair c0 = conserved_of(init);
    tr.classification = std::abs(c0.ell) < 1e-14 * std::max(1.0, std::abs(c0.k))
                            ? GeodesicClass::radial
                            : GeodesicClass::non_radial;

    for (const auto& e : tr.entries) {
        tr.max_ell_drift = std::max(tr.max_ell_drift, std::abs(e.conserved.ell - c0.ell));
        tr.max_k_drift = std::max(tr.max_k_drift, std::abs(e.conserved.k - c0.k));
    }
    tr.drift_budget = opt.drift_budget_per_20 * std::max(1.0, (sigma_b - sigma_a) / 20.0);
    tr.drift_ok = tr.max_ell_drift <= tr.drift_budget && tr.max_k_drift <= tr.drift_budget;
    tr.total_winding = tr.entries.back().state.theta - tr.entries.front().state.theta;

    if (tr.classification == GeodesicClass::non_radial) {
        TurningPoint tp = turning_point(c0, opt.params);
        tp.refined_from_trace = false;
        // look for the s' sign change in the recorded nodes
        bool found = false;
        for (std::size_t i = 0; i + 1 < tr.nodes.size() && !found; ++i) {
            const double da = tr.nodes[i].y[2];
            const double db = tr.nodes[i + 1].y[2];
            if (da == 0.0) {
                tp.sigma = tr.nodes[i].t;
                tp.s_min = tr.nodes[i].y[0];
                found = true;
            } else if (da < 0.0 && db >= 0.0) {
                double lo = tr.nodes[i].t, hi = tr.nodes[i + 1].t;
                for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const auto ym = hermite_eval(tr.nodes[i], tr.nodes[i + 1], mid);
                    (ym[2] < 0.0 ? lo : hi) = mid;
                }
                tp.sigma = 0.5 * (lo + hi);
                tp.s_min = hermite_eval(tr.nodes[i], tr.nodes[i + 1], tp.sigma)[0];
                found = true;
            }
        }
        if (found) {
            tp.r_min = std::sqrt(opt.params.E) * std::sinh(tp.s_min);
            tp.refined_from_trace = true;
        } else {
            // span never brackets the minimum; place it from the closed form
            const double mu = c0.k - c0.ell * c0.ell;
            const double amp = std::sqrt(c0.k / mu);
            const double tau =
                std::acosh(std::max(1.0, std::cosh(init.s) / amp)) / std::sqrt(mu);
            tp.sigma = init.sigma - (init.s_dot >= 0 ? tau : -tau);
        }
        tr.turning = tp;
    }
    return tr;
}

// Interpolated state anywhere inside the recorded span.
inline GeodesicState sample_trace(const GeodesicTrace& tr, double sigma) {
    if (tr.nodes.empty()) throw ParameterError("sample_trace: empty trace");
    if (sigma <= tr.nodes.front().t) return detail::state_of(tr.nodes.front());
    if (sigma >= tr.nodes.back().t) return detail::state_of(tr.nodes.back());
    std::size_t lo = 0, hi = tr.nodes.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (tr.nodes[mid].t <= sigma ? lo : hi) = mid;
    }
    const auto y = hermite_eval(tr.nodes[lo], tr.nodes[lo + 1], sigma);
    return {sigma, y[0], y[1], y[2], y[3]};
}

// Independent check that the trace satisfies the reduced radial equation
// s'^2 = k - ell^2 coth(s)^2 with the conserved pair frozen at the start.
inline double radial_equation_defect(const GeodesicTrace& tr) {
    if (tr.entries.empty()) throw ParameterError("radial_equation_defect: empty trace");
    const ConservedPair c0 = tr.entries.front().conserved;
    double worst = 0.0;
    for (const auto& e : tr.entries) {
        double rhs = c0.k;
        if (c0.ell != 0.0) {
            const double th = std::tanh(e.state.s);
            rhs -= c0.ell * c0.ell / (th * th);
        }
        worst = std::max(worst, std::abs(e.state.s_dot * e.state.s_dot - rhs));
    }
    return worst;
}

inline double min_r_of_trace(const GeodesicTrace& tr) {
    if (tr.entries.empty()) throw ParameterError("min_r_of_trace: empty trace");
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& e : tr.entries)
        mn = std::min(mn, std::sqrt(tr.params.E) * std::sinh(e.state.s));
    if (tr.turning && tr.turning->refined_from_trace) mn = std::min(mn, tr.turning->r_min);
    return mn;
}

// Geodesic flow in the cartesian conformal chart, y = (x, y, x', y').  The
// chart is smooth at the origin, so trajectories may run straight through
// the tip; used to cross-check the arclength-chart integration, which must
// stop there instead.
struct CartesianGeodesicState {
    double sigma = 0.0;
    double x = 0.0;
    double y = 0.0;
    double x_dot = 0.0;
    double y_dot = 0.0;
};

inline ConservedPair cartesian_conserved(const CartesianGeodesicState& st,
                                         const SolitonParams& sp) {
    const double D = sp.E + st.x * st.x + st.y * st.y;
    return {(st.x * st.y_dot - st.y * st.x_dot) / D,
            (st.x_dot * st.x_dot + st.y_dot * st.y_dot) / D};
}

struct CartesianGeodesicTrace {
    std::vector<OdePoint<4>> nodes;
    double max_ell_drift = 0.0;
    double max_k_drift = 0.0;
    SolitonParams params{};
};

inline CartesianGeodesicTrace integrate_geodesic_cartesian(const CartesianGeodesicState& init,
                                                           double sigma_end,
                                                           const GeodesicOptions& opt = {}) {
    const double E = opt.params.E;
    auto rhs = [E](double, const std::array<double, 4>& v) {
        const double x = v[0], y = v[1], xd = v[2], yd = v[3];
        const double D = E + x * x + y * y;
        return std::array<double, 4>{
            xd, yd, (x * xd * xd + 2.0 * y * xd * yd - x * yd * yd) / D,
            (-y * xd * xd + 2.0 * x * xd * yd + y * yd * yd) / D};
    };
    CartesianGeodesicTrace tr;
    tr.params = opt.params;
    tr.nodes = integrate_adaptive<4>(rhs, init.sigma, sigma_end,
                                     {init.x, init.y, init.x_dot, init.y_dot}, opt.ode,
                                     opt.output_grid);
    const ConservedPair c0 = cartesian_conserved(init, opt.params);
    for (const auto& n : tr.nodes) {
        const ConservedPair c =
            cartesian_conserved({n.t, n.y[0], n.y[1], n.y[2], n.y[3]}, opt.params);
        tr.max_ell_drift = std::max(tr.max_ell_drift, std::abs(c.ell - c0.ell));
        tr.max_k_drift = std::max(tr.max_k_drift, std::abs(c.k - c0.k));
    }
    return tr;
}

// Arclength state expressed in the cartesian chart, for mode cross-checks.
inline CartesianGeodesicState to_cartesian_state(const GeodesicState& st,
                                                 const SolitonParams& sp) {
    const double sqE = std::sqrt(sp.E);
    const double r = sqE * std::sinh(st.s);
    const double r_dot = sqE * std::cosh(st.s) * st.s_dot;
    const double cs = std::cos(st.theta), sn = std::sin(st.theta);
    return {st.sigma, r * cs, r * sn, r_dot * cs - r * sn * st.theta_dot,
            r_dot * sn + r * cs * st.theta_dot};
}

} // namespace cigar
