#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "charts.hpp"
#include "errors.hpp"
#include "field_types.hpp"
#include "metrics.hpp"
#include "ode.hpp"

namespace cigar {

// Pointwise defect of the steady identity  Ric + Hess f - rho R g = 0.
// Ricci enters as K g (surface identity) with K from the Brioschi form, the
// Hessian through the Christoffel pipeline, so the two derivative routes
// cross-check each other inside a single residual.
struct SolitonResidualEntry {
    ChartPoint point;
    Mat2 residual;
    double norm = 0.0;
};

inline Mat2 soliton_residual_matrix(const SymTensorField& g, const ScalarField& f, double rho,
                                    const ChartPoint& p, const CalcOptions& opt = {}) {
    const Mat2 g0 = g.eval(p);
    const double K = gauss_curvature(g, p, opt);
    const Mat2 hess = hessian(g, f, p, opt);
    return g0 * K + hess - g0 * (rho * 2.0 * K);
}

// Residual of the cigar family at a point in any chart.  Radial charts
// degenerate at the axis, so points close to it are evaluated through the
// cartesian chart instead.
inline SolitonResidualEntry soliton_residual(const SolitonParams& sp, const ChartPoint& p,
                                             const CalcOptions& opt = {}) {
    ChartPoint q = p;
    if (p.kind != ChartKind::cartesian && p.c1 < 1e-3)
        q = transform_point(p, ChartKind::cartesian, sp);

    const MetricSpec spec = MetricSpec::cigar(sp, q.kind);
    const SymTensorField g = metric_field(spec);
    const ScalarField f = potential_field(sp, q.kind);

    SolitonResidualEntry e;
    e.point = p;
    e.residual = soliton_residual_matrix(g, f, sp.rho, q, opt);
    e.norm = frobenius(e.residual);
    return e;
}

// Defect of the reduction  Hess f = (rho - 1/2) R g  that the steady
// identity collapses to on this family.
inline double hessian_reduction_defect(const SolitonParams& sp, const ChartPoint& p,
                                       const CalcOptions& opt = {}) {
    ChartPoint q = p;
    if (p.kind != ChartKind::cartesian && p.c1 < 1e-3)
        q = transform_point(p, ChartKind::cartesian, sp);
    const MetricSpec spec = MetricSpec::cigar(sp, q.kind);
    const SymTensorField g = metric_field(spec);
    const ScalarField f = potential_field(sp, q.kind);
    const Mat2 g0 = g.eval(q);
    const double R = scalar_curvature(g, q, opt);
    const Mat2 hess = hessian(g, f, q, opt);
    return max_abs(hess - g0 * ((sp.rho - 0.5) * R));
}

// Rotationally symmetric rigidity profile: h' = 1 - A h^2, h(0) = 0.
struct RigidityProfile {
    double A = 1.0;
    double step = 0.0;
    std::vector<double> r;
    std::vector<double> h;
    std::vector<double> dh; // integrator's h', recorded per node
};

inline double rigidity_closed_form(double A, double r) {
    const double q = std::sqrt(A);
    return std::tanh(q * r) / q;
}

inline RigidityProfile rigidity_ode_solve(double A, double r_max, double step,
                                          const OdeOptions& opt = {}) {
    if (!(A > 0.0)) throw ParameterError("rigidity_ode_solve: A must be positive");
    if (!(r_max > 0.0) || !(step > 0.0) || step > r_max)
        throw ParameterError("rigidity_ode_solve: need 0 < step <= r_max");

    std::vector<double> grid;
    const long n = std::lround(r_max / step);
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) grid.push_back(std::min(r_max, double(i) * step));

    auto rhs = [A](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{1.0 - A * y[0] * y[0]};
    };
    const auto nodes = integrate_adaptive<1>(rhs, 0.0, grid.back(), {0.0}, opt, grid);

    RigidityProfile out;
    out.A = A;
    out.step = step;
    std::size_t gi = 0;
    for (const auto& nd : nodes) {
        if (gi < grid.size() && std::abs(nd.t - grid[gi]) < 1e-12) {
            out.r.push_back(nd.t);
            out.h.push_back(nd.y[0]);
            out.dh.push_back(nd.dy[0]);
            ++gi;
        }
    }
    if (out.r.size() != grid.size())
        throw Error("rigidity_ode_solve: integrator missed grid nodes");
    return out;
}

inline double rigidity_profile_defect(const RigidityProfile& pr) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pr.r.size(); ++i)
        worst = std::max(worst, std::abs(pr.h[i] - rigidity_closed_form(pr.A, pr.r[i])));
    return worst;
}

namespace detail {

// 4th-order stencils on a uniform grid; endpoints are left out by callers.
inline double grid_d1(const std::vector<double>& f, std::size_t i, double dx) {
    return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
}
inline double grid_d2(const std::vector<double>& f, std::size_t i, double dx) {
    return (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
           (12.0 * dx * dx);
}

} // namespace detail

// Consistency of the warped metric dr^2 + h(r)^2 dtheta^2 with potential
// slope f' = a h against the steady identity, on a uniform grid.  The
// division-free form (1-2rho) h'' - a h h' is checked everywhere; the
// component forms divide by h and are restricted to r >= r_component_min.
struct RigidityReport {
    double A = 0.0;
    double a = 0.0;
    double rho = 0.0;
    double implied_a = 0.0; // value of a forced by the closed form for this (A, rho)
    double max_ode_residual = 0.0;
    double max_rr_residual = 0.0;
    double max_tt_residual = 0.0;
    double min_curvature = 0.0;
    bool curvature_positive = false;
};

inline RigidityReport rigidity_consistency(double A, double a, double rho, double r_max = 5.0,
                                           double step = 0.002,
                                           double r_component_min = 0.1) {
    const double beta = 1.0 - 2.0 * rho;
    if (std::abs(beta) < 1e-12)
        throw DegenerateRhoError("rigidity_consistency: rho = 1/2 removes the h'' term");

    const double implied_a = -2.0 * A * beta;
    if (std::abs(a - implied_a) > 1e-9 * std::max(1.0, std::abs(a)))
        throw ParameterError("rigidity_consistency: A = " + std::to_string(A) +
                             " inconsistent with a = " + std::to_string(a) + ", rho = " +
                             std::to_string(rho) + " (requires A = -a/(2(1-2 rho)))");

    const RigidityProfile pr = rigidity_ode_solve(A, r_max, step);
    const std::size_t n = pr.r.size();

    RigidityReport rep;
    rep.A = A;
    rep.a = a;
    rep.rho = rho;
    rep.implied_a = implied_a;
    rep.min_curvature = std::numeric_limits<double>::infinity();

    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double h = pr.h[i];
        const double h1 = pr.dh[i];
        const double h2 = detail::grid_d1(pr.dh, i, step); // h'' by differencing h'
        rep.max_ode_residual =
            std::max(rep.max_ode_residual, std::abs(beta * h2 - a * h * h1));
        if (pr.r[i] >= r_component_min) {
            // Hess f = (rho - 1/2) R g with R = -2 h''/h
            rep.max_rr_residual =
                std::max(rep.max_rr_residual, std::abs(a * h1 - beta * h2 / h));
            rep.max_tt_residual =
                std::max(rep.max_tt_residual, std::abs(a * h * h * h1 - beta * h2 * h));
            const double K = -h2 / h;
            rep.min_curvature = std::min(rep.min_curvature, K);
        }
    }
    rep.curvature_positive = rep.min_curvature > 0.0;
    return rep;
}

} // namespace cigar
