#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "charts.hpp"
#include "errors.hpp"
#include "fd.hpp"
#include "field_types.hpp"
#include "linalg.hpp"

namespace cigar {

// Finite-difference policies per derivative kind.  fd_outer is for
// differencing fields that are themselves finite-difference results (second
// Lie derivatives, derivatives of Christoffel data): looser target, larger
// floor, so the noise of the inner evaluation is not chased.
struct CalcOptions {
    FdOptions fd1{0.05, 1e-5, 1e-9, 12};
    FdOptions fd2{0.10, 1e-3, 1e-8, 10};
    FdOptions fd_mixed{0.10, 5e-3, 1e-8, 6};
    FdOptions fd_outer{0.10, 1e-3, 5e-7, 10};
    double det_floor = 1e-14;
    // Fault injection for end-to-end sanity checks: flips the sign of every
    // Christoffel symbol so curvature-free identities keep passing while
    // connection-based ones break.
    bool debug_flip_christoffel_sign = false;
};

namespace detail {

inline void require_chart(ChartKind field_chart, const ChartPoint& p, const char* who) {
    if (field_chart != p.kind)
        throw DomainError(std::string(who) + ": field given in chart '" +
                          to_string(field_chart) + "' evaluated at a '" +
                          to_string(p.kind) + "' point");
}

inline ChartPoint shifted(const ChartPoint& p, int axis, double d) {
    ChartPoint q = p;
    (axis == 0 ? q.c1 : q.c2) += d;
    return q;
}

// Keep radial stencils on the chart's side of the axis.
inline FdOptions clamp_radial(const ChartPoint& p, int axis, FdOptions o) {
    if (p.kind != ChartKind::cartesian && axis == 0) {
        const double cap = p.c1 / 4.0;
        if (cap < o.initial_step) {
            o.initial_step = cap;
            o.min_step = std::min(o.min_step, cap / 16.0);
        }
    }
    return o;
}

template <class Field>
auto partial(const Field& f, const ChartPoint& p, int axis, const FdOptions& opt)
    -> decltype(f.eval(p)) {
    const FdOptions o = clamp_radial(p, axis, opt);
    return differentiate([&](double d) { return f.eval(shifted(p, axis, d)); }, 0.0, o);
}

inline double second_partial(const ScalarField& f, const ChartPoint& p, int axis,
                             const FdOptions& opt) {
    const FdOptions o = clamp_radial(p, axis, opt);
    return second_derivative([&](double d) { return f.eval(shifted(p, axis, d)); }, 0.0, o);
}

inline double mixed_partial(const ScalarField& f, const ChartPoint& p,
                            const CalcOptions& opt) {
    const FdOptions outer = clamp_radial(p, 0, opt.fd_mixed);
    return differentiate(
        [&](double du) {
            const ChartPoint q = shifted(p, 0, du);
            const FdOptions inner = clamp_radial(q, 1, opt.fd1);
            return differentiate([&](double dv) { return f.eval(shifted(q, 1, dv)); }, 0.0,
                                 inner);
        },
        0.0, outer);
}

} // namespace detail

struct Christoffel {
    // v[k][i][j] is the coefficient mapping coordinate directions (i,j) to k.
    double v[2][2][2] = {};
    double operator()(int k, int i, int j) const { return v[k][i][j]; }
};

inline Christoffel christoffel(const SymTensorField& g, const ChartPoint& p,
                               const CalcOptions& opt = {}) {
    detail::require_chart(g.chart, p, "christoffel");
    const Mat2 g0 = g.eval(p);
    if (g0.det() < opt.det_floor)
        throw SingularMetricError("christoffel: det g = " + std::to_string(g0.det()));
    const Mat2 gi = inverse(g0, opt.det_floor);
    const Mat2 dg[2] = {detail::partial(g, p, 0, opt.fd1), detail::partial(g, p, 1, opt.fd1)};

    Christoffel G;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += gi(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
                s *= 0.5;
                if (opt.debug_flip_christoffel_sign) s = -s;
                G.v[k][i][j] = s;
                G.v[k][j][i] = s;
            }
    return G;
}

// Gauss curvature from metric components alone (Brioschi determinant form);
// independent of the Christoffel pipeline, so the two can cross-check.
inline double gauss_curvature(const SymTensorField& g, const ChartPoint& p,
                              const CalcOptions& opt = {}) {
    detail::require_chart(g.chart, p, "gauss_curvature");
    const Mat2 g0 = g.eval(p);
    const double det = g0.det();
    if (det < opt.det_floor)
        throw SingularMetricError("gauss_curvature: det g = " + std::to_string(det));

    const ScalarField E{g.chart, [&g](const ChartPoint& q) { return g.eval(q).a11; }};
    const ScalarField F{g.chart, [&g](const ChartPoint& q) { return g.eval(q).a12; }};
    const ScalarField G{g.chart, [&g](const ChartPoint& q) { return g.eval(q).a22; }};

    const double Eu = detail::partial(E, p, 0, opt.fd1);
    const double Ev = detail::partial(E, p, 1, opt.fd1);
    const double Gu = detail::partial(G, p, 0, opt.fd1);
    const double Gv = detail::partial(G, p, 1, opt.fd1);
    const double Fu = detail::partial(F, p, 0, opt.fd1);
    const double Fv = detail::partial(F, p, 1, opt.fd1);
    const double Evv = detail::second_partial(E, p, 1, opt.fd2);
    const double Guu = detail::second_partial(G, p, 0, opt.fd2);
    const double Fuv = detail::mixed_partial(F, p, opt);

    const std::array<std::array<double, 3>, 3> m1 = {{
        {-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev},
        {Fv - 0.5 * Gu, g0.a11, g0.a12},
        {0.5 * Gv, g0.a12, g0.a22},
    }};
    const std::array<std::array<double, 3>, 3> m2 = {{
        {0.0, 0.5 * Ev, 0.5 * Gu},
        {0.5 * Ev, g0.a11, g0.a12},
        {0.5 * Gu, g0.a12, g0.a22},
    }};
    return (det3(m1) - det3(m2)) / (det * det);
}

inline double scalar_curvature(const SymTensorField& g, const ChartPoint& p,
                               const CalcOptions& opt = {}) {
    return 2.0 * gauss_curvature(g, p, opt);
}

// Ricci by contraction of the curvature of the connection.  Slower and
// noisier than gauss_curvature (it differences Christoffel symbols, which
// are themselves differences); kept as an independent oracle.
inline Mat2 ricci_tensor(const SymTensorField& g, const ChartPoint& p,
                         const CalcOptions& opt = {}) {
    detail::require_chart(g.chart, p, "ricci_tensor");
    const Christoffel G0 = christoffel(g, p, opt);

    // dG[a].v[k][i][j] = d_a Gamma^k_ij
    Christoffel dG[2];
    for (int a = 0; a < 2; ++a) {
        const FdOptions o = detail::clamp_radial(p, a, opt.fd_outer);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = i; j < 2; ++j) {
                    const double d = differentiate(
                        [&](double dd) {
                            return christoffel(g, detail::shifted(p, a, dd), opt).v[k][i][j];
                        },
                        0.0, o);
                    dG[a].v[k][i][j] = d;
                    dG[a].v[k][j][i] = d;
                }
    }

    Mat2 ric;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 2; ++n) {
            double val = 0.0;
            for (int m = 0; m < 2; ++m) {
                val += dG[m].v[m][n][s] - dG[n].v[m][m][s];
                for (int l = 0; l < 2; ++l)
                    val += G0(m, m, l) * G0(l, n, s) - G0(m, n, l) * G0(l, m, s);
            }
            ric.at(s, n) = val;
        }
    // exact symmetry
    const double off = 0.5 * (ric.a12 + ric.a21);
    ric.a12 = off;
    ric.a21 = off;
    return ric;
}

inline Mat2 hessian(const SymTensorField& g, const ScalarField& f, const ChartPoint& p,
                    const CalcOptions& opt = {}) {
    detail::require_chart(g.chart, p, "hessian");
    detail::require_chart(f.chart, p, "hessian");
    const Christoffel G = christoffel(g, p, opt);
    const double df[2] = {detail::partial(f, p, 0, opt.fd1), detail::partial(f, p, 1, opt.fd1)};
    const double fuu = detail::second_partial(f, p, 0, opt.fd2);
    const double fvv = detail::second_partial(f, p, 1, opt.fd2);
    const double fuv = detail::mixed_partial(f, p, opt);

    Mat2 h;
    const double d2[2][2] = {{fuu, fuv}, {fuv, fvv}};
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            double val = d2[i][j];
            for (int k = 0; k < 2; ++k) val -= G(k, i, j) * df[k];
            h.at(i, j) = val;
            h.at(j, i) = val;
        }
    return h;
}

namespace detail {

// Shared assembly for first and second Lie derivatives: the tensor argument
// differs (metric vs. first Lie derivative), so the step policy for its
// partials is a parameter.
inline Mat2 lie_of_tensor(const SymTensorField& T, const VectorFieldSpec& V,
                          const ChartPoint& p, const FdOptions& tensor_fd,
                          const FdOptions& vector_fd) {
    require_chart(T.chart, p, "lie_derivative");
    require_chart(V.chart, p, "lie_derivative");
    const Mat2 t0 = T.eval(p);
    const Vec2 v0 = V.components(p);
    const Mat2 dT[2] = {partial(T, p, 0, tensor_fd), partial(T, p, 1, tensor_fd)};
    struct VF {
        const VectorFieldSpec& v;
        ChartKind chart;
        Vec2 eval(const ChartPoint& q) const { return v.components(q); }
    };
    const VF vf{V, V.chart};
    const Vec2 dV[2] = {partial(vf, p, 0, vector_fd), partial(vf, p, 1, vector_fd)};
    auto dv = [&](int k, int a) { return k == 0 ? dV[a].x : dV[a].y; };
    auto vcomp = [&](int k) { return k == 0 ? v0.x : v0.y; };

    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            double val = 0.0;
            for (int k = 0; k < 2; ++k) {
                val += vcomp(k) * dT[k](i, j);
                val += t0(k, j) * dv(k, i);
                val += t0(i, k) * dv(k, j);
            }
            out.at(i, j) = val;
            out.at(j, i) = val;
        }
    return out;
}

} // namespace detail

inline Mat2 lie_derivative(const SymTensorField& g, const VectorFieldSpec& V,
                           const ChartPoint& p, const CalcOptions& opt = {}) {
    return detail::lie_of_tensor(g, V, p, opt.fd1, opt.fd1);
}

inline Mat2 second_lie_derivative(const SymTensorField& g, const VectorFieldSpec& V,
                                  const ChartPoint& p, const CalcOptions& opt = {}) {
    // The outer differencing sees the inner pass's tolerance as evaluation
    // noise, so the inner pass runs much tighter than a standalone first
    // derivative would need to.
    CalcOptions inner = opt;
    inner.fd1.rel_tol = std::min(inner.fd1.rel_tol, 1e-11);
    const SymTensorField first{
        g.chart, [&g, &V, inner](const ChartPoint& q) { return lie_derivative(g, V, q, inner); }};
    return detail::lie_of_tensor(first, V, p, opt.fd_outer, opt.fd1);
}

// Pointwise least-squares test of A = c(p) B over a sample.
//
// is_zero: A vanishes relative to the scale of B everywhere on the sample.
// A zero field counts as proportional (factor 0); its raw residual would be
// pure noise, so the reported residual is zeroed in that case.
struct ProportionalityReport {
    bool is_zero = false;
    bool is_proportional = false;
    double relative_residual = 0.0;
    std::vector<std::pair<ChartPoint, double>> factor_samples;
};

inline ProportionalityReport proportionality(const SymTensorField& A, const SymTensorField& B,
                                             std::span<const ChartPoint> sample, double tol,
                                             const CalcOptions& = {}) {
    if (sample.empty()) throw ParameterError("proportionality: empty sample");
    std::vector<Mat2> av, bv;
    av.reserve(sample.size());
    bv.reserve(sample.size());
    double scale_b = 0.0, max_a = 0.0;
    for (const auto& p : sample) {
        detail::require_chart(A.chart, p, "proportionality");
        detail::require_chart(B.chart, p, "proportionality");
        av.push_back(A.eval(p));
        bv.push_back(B.eval(p));
        scale_b = std::max(scale_b, max_abs(bv.back()));
        max_a = std::max(max_a, frobenius(av.back()));
    }
    const double eps = 1e-10 * std::max(scale_b, 1e-300);

    ProportionalityReport rep;
    rep.is_zero = max_a < tol * std::max(scale_b, 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double bb = frobenius_inner(bv[i], bv[i]);
        const double c = bb > eps * eps ? frobenius_inner(av[i], bv[i]) / bb : 0.0;
        const double res = frobenius(av[i] - bv[i] * c) / std::max(frobenius(av[i]), eps);
        worst = std::max(worst, res);
        rep.factor_samples.emplace_back(sample[i], c);
    }
    rep.relative_residual = rep.is_zero ? 0.0 : worst;
    rep.is_proportional = rep.is_zero || rep.relative_residual <= tol;
    return rep;
}

} // namespace cigar
