#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace cigar {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double max_abs(const Vec2& v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// Dense 2x2, row major.  Not assumed symmetric: also used for Jacobians.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    double operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
    }
    double& at(int i, int j) {
        return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
    }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline double frobenius(const Mat2& m) {
    return std::sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
}

inline double max_abs(const Mat2& m) {
    return std::max(std::max(std::abs(m.a11), std::abs(m.a12)),
                    std::max(std::abs(m.a21), std::abs(m.a22)));
}

inline double frobenius_inner(const Mat2& a, const Mat2& b) {
    return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}

inline Mat2 inverse(const Mat2& m, double det_floor = 1e-14) {
    const double d = m.det();
    if (std::abs(d) < det_floor)
        throw SingularMetricError("2x2 inverse: |det| = " + std::to_string(std::abs(d)) +
                                  " below floor");
    return Mat2{m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

inline double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Singular values of a small dense matrix given as a list of rows, via
// one-sided Jacobi on the transpose.  Plenty for rank decisions on spans
// of half a dozen vector fields; no attempt to be fast.
inline std::vector<double> singular_values(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t k = rows.size();
    const std::size_t m = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != m) throw ParameterError("singular_values: ragged rows");

    // columns of B are the input rows
    std::vector<std::vector<double>> b(k, std::vector<double>(m));
    for (std::size_t i = 0; i < k; ++i) b[i] = rows[i];

    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += b[p][r] * b[q][r];
        return s;
    };

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = col_dot(p, q);
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                off = std::max(off, std::abs(apq) / std::max(1e-300, std::sqrt(app * aqq)));
                if (std::abs(apq) < 1e-300) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double bp = b[p][r];
                    const double bq = b[q][r];
                    b[p][r] = c * bp - s * bq;
                    b[q][r] = s * bp + c * bq;
                }
            }
        }
        if (off < 1e-15) break;
    }

    std::vector<double> sv(k);
    for (std::size_t p = 0; p < k; ++p) sv[p] = std::sqrt(col_dot(p, p));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

} // namespace cigar
