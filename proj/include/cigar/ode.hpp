#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cigar {

// Embedded Dormand-Prince 5(4) pair with PI-free step control, forced
// checkpoints (output grid nodes are hit exactly, no interpolation drift in
// exported tables) and an optional stop event located on the dense output.
struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_initial = 1e-3;
    double h_max = 0.05;
    double h_min = 1e-12;
    long max_steps = 2000000;
};

template <std::size_t N>
struct OdePoint {
    double t = 0.0;
    std::array<double, N> y{};
    std::array<double, N> dy{};
};

template <std::size_t N>
struct OdeStopInfo {
    bool triggered = false;
    double t = 0.0;
    std::array<double, N> y{};
};

namespace detail {

template <std::size_t N>
std::array<double, N> ode_lincomb(const std::array<double, N>& y, double h,
                                  std::initializer_list<std::pair<double, const std::array<double, N>*>> terms) {
    std::array<double, N> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
}

} // namespace detail

// Cubic Hermite interpolation between two accepted steps.
template <std::size_t N>
std::array<double, N> hermite_eval(const OdePoint<N>& a, const OdePoint<N>& b, double t) {
    const double dt = b.t - a.t;
    if (dt == 0.0) return a.y;
    const double u = (t - a.t) / dt;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * a.y[i] + h10 * dt * a.dy[i] + h01 * b.y[i] + h11 * dt * b.dy[i];
    return out;
}

template <std::size_t N, class F>
std::vector<OdePoint<N>> integrate_adaptive(
    F&& rhs, double t0, double t1, std::array<double, N> y0, const OdeOptions& opt = {},
    std::span<const double> checkpoints = {},
    const std::function<double(double, const std::array<double, N>&)>& stop = {},
    OdeStopInfo<N>* stop_info = nullptr) {
    using Y = std::array<double, N>;

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    if (!(opt.abs_tol > 0) || !(opt.rel_tol > 0))
        throw ParameterError("integrate_adaptive: tolerances must be positive");

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    std::vector<double> cks(checkpoints.begin(), checkpoints.end());
    std::sort(cks.begin(), cks.end());
    if (dir < 0) std::reverse(cks.begin(), cks.end());
    std::size_t next_ck = 0;
    auto skip_passed = [&](double t) {
        while (next_ck < cks.size() && dir * (cks[next_ck] - t) <= 1e-14 * std::max(1.0, span))
            ++next_ck;
    };

    std::vector<OdePoint<N>> out;
    OdePoint<N> cur{t0, y0, rhs(t0, y0)};
    out.push_back(cur);
    skip_passed(t0);

    if (stop) {
        const double s0 = stop(t0, y0);
        if (s0 <= 0.0) {
            if (stop_info) *stop_info = {true, t0, y0};
            return out;
        }
    }
    if (span == 0.0) return out;

    double h = std::min(opt.h_initial, opt.h_max);
    double stop_prev = stop ? stop(t0, y0) : 1.0;

    for (long step = 0; step < opt.max_steps; ++step) {
        const double remaining = std::abs(t1 - cur.t);
        if (remaining <= 1e-14 * std::max(1.0, span)) break;
        h = std::min(h, opt.h_max);
        h = std::min(h, remaining);
        // the landing window is wider than the free-step rounding error, so a
        // pending checkpoint can never be drifted past without an exact node
        const double land = 1e-13 * std::max(1.0, span);
        double target = std::numeric_limits<double>::quiet_NaN();
        if (next_ck < cks.size() && dir * (cks[next_ck] - cur.t) <= h + land) {
            h = std::abs(cks[next_ck] - cur.t);
            target = cks[next_ck];
        } else if (remaining <= h + land) {
            target = t1;
            h = remaining;
        }
        if (std::isnan(target) && h < opt.h_min)
            throw StepSizeError("integrate_adaptive: step size underflow at t = " +
                                std::to_string(cur.t));

        const double hs = dir * h;
        const Y& y = cur.y;
        const Y& k1 = cur.dy;
        const Y y2 = detail::ode_lincomb<N>(y, hs, {{a21, &k1}});
        const Y k2 = rhs(cur.t + 0.2 * hs, y2);
        const Y y3 = detail::ode_lincomb<N>(y, hs, {{a31, &k1}, {a32, &k2}});
        const Y k3 = rhs(cur.t + 0.3 * hs, y3);
        const Y y4 = detail::ode_lincomb<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        const Y k4 = rhs(cur.t + 0.8 * hs, y4);
        const Y y5 = detail::ode_lincomb<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        const Y k5 = rhs(cur.t + (8.0 / 9.0) * hs, y5);
        const Y y6 = detail::ode_lincomb<N>(
            y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        const Y k6 = rhs(cur.t + hs, y6);
        const Y ynew = detail::ode_lincomb<N>(
            y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double tnew = std::isnan(target) ? cur.t + hs : target;
        const Y k7 = rhs(tnew, ynew);
        const Y ylow = detail::ode_lincomb<N>(
            y, hs, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e = (ynew[i] - ylow[i]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            OdePoint<N> nxt{tnew, ynew, k7};
            if (stop) {
                const double sv = stop(tnew, ynew);
                if (sv <= 0.0 && stop_prev > 0.0) {
                    // bisect the dense output for the crossing
                    double lo = cur.t, hi = tnew;
                    for (int it = 0; it < 200 && std::abs(hi - lo) >
                                                     1e-14 * std::max(1.0, std::abs(tnew));
                         ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const Y ym = hermite_eval(cur, nxt, mid);
                        (stop(mid, ym) > 0.0 ? lo : hi) = mid;
                    }
                    const Y ystar = hermite_eval(cur, nxt, hi);
                    OdePoint<N> last{hi, ystar, rhs(hi, ystar)};
                    out.push_back(last);
                    if (stop_info) *stop_info = {true, hi, ystar};
                    return out;
                }
                stop_prev = sv;
            }
            cur = nxt;
            out.push_back(cur);
            skip_passed(cur.t);
            const double grow = err > 1e-30 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = h * std::min(5.0, std::max(0.2, grow));
        } else {
            h = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }

    if (std::abs(cur.t - t1) > 1e-10 * std::max(1.0, span))
        throw Error("integrate_adaptive: step budget exhausted before reaching the endpoint");
    return out;
}

} // namespace cigar
