#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace cigar {

// Step policy for the adaptive central-difference engine.  Two 4th-order
// stencils at h and h/2 are compared; their Richardson combination is
// returned once the pair agrees to rel_tol (relative to max(1, |value|)).
// If agreement is never reached the differencing reports failure instead of
// returning a silently bad number.
struct FdOptions {
    double initial_step = 0.05;
    double min_step = 1e-5;
    double rel_tol = 1e-9;
    int max_refine = 12;
};

inline double fd_norm(double v) { return std::abs(v); }
inline double fd_norm(const Vec2& v) { return max_abs(v); }
inline double fd_norm(const Mat2& m) { return max_abs(m); }

namespace detail {

template <class F>
auto stencil_d1(F&& f, double x, double h) -> decltype(f(x)) {
    return (f(x - 2 * h) - f(x + 2 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h));
}

template <class F>
auto stencil_d2(F&& f, double x, double h) -> decltype(f(x)) {
    return ((f(x + h) + f(x - h)) * 16.0 - (f(x + 2 * h) + f(x - 2 * h)) -
            f(x) * 30.0) * (1.0 / (12.0 * h * h));
}

template <class Stencil, class F>
auto adaptive(Stencil&& stencil, F&& f, double x, const FdOptions& opt, const char* what)
    -> decltype(f(x)) {
    using T = decltype(f(x));
    double h = opt.initial_step;
    T coarse = stencil(f, x, h);
    double best_err = -1.0;
    for (int it = 0; it < opt.max_refine && h * 0.5 >= opt.min_step; ++it) {
        const T fine = stencil(f, x, h * 0.5);
        const T rich = (fine * 16.0 - coarse) * (1.0 / 15.0);
        const double err = fd_norm(fine - coarse) / 15.0;
        const double scale = std::max(1.0, fd_norm(rich));
        if (err <= opt.rel_tol * scale) return rich;
        if (best_err < 0.0 || err < best_err) best_err = err;
        coarse = fine;
        h *= 0.5;
    }
    throw StepSizeError(std::string(what) + ": step pairs disagree (best residual " +
                        std::to_string(best_err) + ", requested " +
                        std::to_string(opt.rel_tol) + ")");
}

} // namespace detail

// d/dx of f at x.  T = double, Vec2 or Mat2.
template <class F>
auto differentiate(F&& f, double x, const FdOptions& opt = {}) -> decltype(f(x)) {
    return detail::adaptive([](F& g, double x0, double h) { return detail::stencil_d1(g, x0, h); },
                            f, x, opt, "differentiate");
}

// d2/dx2 of f at x.
template <class F>
auto second_derivative(F&& f, double x, const FdOptions& opt = {}) -> decltype(f(x)) {
    return detail::adaptive([](F& g, double x0, double h) { return detail::stencil_d2(g, x0, h); },
                            f, x, opt, "second_derivative");
}

} // namespace cigar
