#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace cigar {

enum class ChartKind { cartesian, polar, geodesic_polar };

inline const char* to_string(ChartKind k) {
    switch (k) {
        case ChartKind::cartesian: return "cartesian";
        case ChartKind::polar: return "polar";
        case ChartKind::geodesic_polar: return "geodesic_polar";
    }
    return "?";
}

inline ChartKind chart_from_string(const std::string& s) {
    if (s == "cartesian") return ChartKind::cartesian;
    if (s == "polar") return ChartKind::polar;
    if (s == "geodesic_polar") return ChartKind::geodesic_polar;
    throw UnknownNameError("unknown chart '" + s + "'");
}

// c1,c2 are (x,y), (r,theta) or (s,theta) depending on kind.  theta is kept
// unwrapped; reduce mod 2*pi only when formatting output.
struct ChartPoint {
    ChartKind kind = ChartKind::cartesian;
    double c1 = 0.0;
    double c2 = 0.0;
};

// Radial coordinates this close to the axis are rejected by chart
// transforms; computations that need the tip go through the Cartesian chart.
inline constexpr double kRadialExclusion = 1e-8;

// Soliton scale.  E is always derived from (rho, t); the raw constructor
// exists so tests can pin E exactly and must not appear in production paths.
struct SolitonParams {
    double rho = 0.0;
    double t = 0.0;
    double E = 1.0;

    static SolitonParams from_rho_t(double rho, double t) {
        SolitonParams p;
        p.rho = rho;
        p.t = t;
        p.E = std::exp(4.0 * (1.0 - 2.0 * rho) * t);
        return p;
    }

    static SolitonParams raw_e_for_testing(double E, double rho = 0.0) {
        if (!(E > 0.0)) throw ParameterError("E must be positive");
        SolitonParams p;
        p.rho = rho;
        p.E = E;
        const double beta = 1.0 - 2.0 * rho;
        p.t = std::abs(beta) > 1e-12 ? std::log(E) / (4.0 * beta) : 0.0;
        return p;
    }
};

namespace detail {
inline void require_radial(const ChartPoint& p, const char* who) {
    if (p.kind != ChartKind::cartesian && p.c1 < kRadialExclusion)
        throw DomainError(std::string(who) + ": radial coordinate " +
                          std::to_string(p.c1) + " inside exclusion zone");
}
} // namespace detail

inline ChartPoint cartesian_to_polar(const ChartPoint& p) {
    if (p.kind != ChartKind::cartesian) throw DomainError("cartesian_to_polar: wrong chart");
    const double r = std::hypot(p.c1, p.c2);
    if (r < kRadialExclusion)
        throw DomainError("cartesian_to_polar: point too close to the origin");
    return {ChartKind::polar, r, std::atan2(p.c2, p.c1)};
}

inline ChartPoint polar_to_cartesian(const ChartPoint& p) {
    if (p.kind != ChartKind::polar) throw DomainError("polar_to_cartesian: wrong chart");
    detail::require_radial(p, "polar_to_cartesian");
    return {ChartKind::cartesian, p.c1 * std::cos(p.c2), p.c1 * std::sin(p.c2)};
}

// r = sqrt(E) sinh s maps the geodesic radial coordinate to the polar one.
inline ChartPoint polar_to_geodesic(const ChartPoint& p, const SolitonParams& sp) {
    if (p.kind != ChartKind::polar) throw DomainError("polar_to_geodesic: wrong chart");
    detail::require_radial(p, "polar_to_geodesic");
    return {ChartKind::geodesic_polar, std::asinh(p.c1 / std::sqrt(sp.E)), p.c2};
}

inline ChartPoint geodesic_to_polar(const ChartPoint& p, const SolitonParams& sp) {
    if (p.kind != ChartKind::geodesic_polar) throw DomainError("geodesic_to_polar: wrong chart");
    detail::require_radial(p, "geodesic_to_polar");
    return {ChartKind::polar, std::sqrt(sp.E) * std::sinh(p.c1), p.c2};
}

inline ChartPoint transform_point(const ChartPoint& p, ChartKind target,
                                  const SolitonParams& sp = {}) {
    if (p.kind == target) return p;
    // hub through polar
    ChartPoint q = p;
    if (q.kind == ChartKind::cartesian) q = cartesian_to_polar(q);
    else if (q.kind == ChartKind::geodesic_polar) q = geodesic_to_polar(q, sp);
    if (target == ChartKind::polar) return q;
    if (target == ChartKind::cartesian) return polar_to_cartesian(q);
    return polar_to_geodesic(q, sp);
}

// d(target coords)/d(source coords) at p, p given in the source chart.
inline Mat2 chart_jacobian(const ChartPoint& p, ChartKind target,
                           const SolitonParams& sp = {}) {
    if (p.kind == target) return Mat2::identity();

    auto jac_cart_to_polar = [](const ChartPoint& c) {
        const double r = std::hypot(c.c1, c.c2);
        if (r < kRadialExclusion) throw DomainError("chart_jacobian: origin");
        // rows: (dr/dx, dr/dy), (dtheta/dx, dtheta/dy)
        return Mat2{c.c1 / r, c.c2 / r, -c.c2 / (r * r), c.c1 / (r * r)};
    };
    auto jac_polar_to_cart = [](const ChartPoint& c) {
        detail::require_radial(c, "chart_jacobian");
        const double cs = std::cos(c.c2), sn = std::sin(c.c2);
        return Mat2{cs, -c.c1 * sn, sn, c.c1 * cs};
    };
    auto jac_polar_to_geo = [&sp](const ChartPoint& c) {
        detail::require_radial(c, "chart_jacobian");
        // ds/dr = 1 / sqrt(E + r^2)
        return Mat2::diag(1.0 / std::sqrt(sp.E + c.c1 * c.c1), 1.0);
    };
    auto jac_geo_to_polar = [&sp](const ChartPoint& c) {
        detail::require_radial(c, "chart_jacobian");
        return Mat2::diag(std::sqrt(sp.E) * std::cosh(c.c1), 1.0);
    };

    switch (p.kind) {
        case ChartKind::cartesian: {
            const Mat2 j1 = jac_cart_to_polar(p);
            if (target == ChartKind::polar) return j1;
            return jac_polar_to_geo(cartesian_to_polar(p)) * j1;
        }
        case ChartKind::polar: {
            if (target == ChartKind::cartesian) return jac_polar_to_cart(p);
            return jac_polar_to_geo(p);
        }
        case ChartKind::geodesic_polar: {
            const Mat2 j1 = jac_geo_to_polar(p);
            if (target == ChartKind::polar) return j1;
            return jac_polar_to_cart(geodesic_to_polar(p, sp)) * j1;
        }
    }
    throw DomainError("chart_jacobian: unreachable");
}

// Squared distance to the rotation center, computable in every chart.
inline double radius_squared(const ChartPoint& p, const SolitonParams& sp = {}) {
    switch (p.kind) {
        case ChartKind::cartesian: return p.c1 * p.c1 + p.c2 * p.c2;
        case ChartKind::polar: return p.c1 * p.c1;
        case ChartKind::geodesic_polar: {
            const double sh = std::sinh(p.c1);
            return sp.E * sh * sh;
        }
    }
    return 0.0;
}

inline double wrap_angle(double theta) {
    const double two_pi = 6.283185307179586476925286766559;
    double w = std::fmod(theta, two_pi);
    if (w < 0) w += two_pi;
    return w;
}

} // namespace cigar
