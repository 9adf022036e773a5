#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace cigar {

// Named one-variable function carrying its first two derivatives in closed
// form.  Free-function slots in field and metric families draw from the
// builtin table below so that runs stay reproducible from a config file.
struct Curve {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    // construction parameters, kept so a curve serializes back to a config
    std::vector<double> coeffs;
    double shift = 0.0;

    bool valid() const { return static_cast<bool>(f); }
    double operator()(double x) const { return f(x); }
};

inline Curve curve_exp() {
    return {"exp",
            [](double x) { return std::exp(x); },
            [](double x) { return std::exp(x); },
            [](double x) { return std::exp(x); }};
}

inline Curve curve_sin() {
    return {"sin",
            [](double x) { return std::sin(x); },
            [](double x) { return std::cos(x); },
            [](double x) { return -std::sin(x); }};
}

// coeffs[i] multiplies x^i
inline Curve curve_poly(std::vector<double> coeffs) {
    if (coeffs.empty()) throw ParameterError("poly curve: empty coefficient list");
    auto horner = [](const std::vector<double>& c, double x) {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    };
    std::vector<double> c1, c2;
    for (std::size_t i = 1; i < coeffs.size(); ++i) c1.push_back(coeffs[i] * double(i));
    for (std::size_t i = 1; i < c1.size(); ++i) c2.push_back(c1[i] * double(i));
    if (c1.empty()) c1.push_back(0.0);
    if (c2.empty()) c2.push_back(0.0);
    Curve out{"poly",
              [coeffs, horner](double x) { return horner(coeffs, x); },
              [c1, horner](double x) { return horner(c1, x); },
              [c2, horner](double x) { return horner(c2, x); }};
    out.coeffs = coeffs;
    return out;
}

inline Curve curve_tanh_shift(double shift) {
    Curve out{"tanh_shift",
              [shift](double x) { return std::tanh(x) + shift; },
              [](double x) { const double c = std::cosh(x); return 1.0 / (c * c); },
              [](double x) {
                  const double t = std::tanh(x);
                  const double c = std::cosh(x);
                  return -2.0 * t / (c * c);
              }};
    out.shift = shift;
    return out;
}

inline Curve curve_from_name(const std::string& name,
                             const std::vector<double>& coeffs = {},
                             double shift = 0.0) {
    if (name == "exp") return curve_exp();
    if (name == "sin") return curve_sin();
    if (name == "poly") return curve_poly(coeffs);
    if (name == "tanh_shift") return curve_tanh_shift(shift);
    throw UnknownNameError("no builtin function named '" + name + "'");
}

} // namespace cigar
