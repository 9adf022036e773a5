#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "charts.hpp"
#include "errors.hpp"

namespace cigar {

// Annulus sampler used by classifiers and rank checks.  Low-discrepancy
// points (Halton) with a seeded rotation, so samples are well spread,
// reproducible, and distinct across seeds.  Bounds are in the geodesic
// radial coordinate: the lower one stays clear of the axis, the upper one
// away from the cylinder regime where everything flattens out.
struct SampleSpec {
    int count = 24;
    std::uint64_t seed = 20260819ull;
    double s_min = 0.2;
    double s_max = 3.0;
    ChartKind chart = ChartKind::cartesian;
};

namespace detail {
inline double halton(int index, int base) {
    double f = 1.0, out = 0.0;
    for (int i = index; i > 0; i /= base) {
        f /= base;
        out += f * (i % base);
    }
    return out;
}
} // namespace detail

inline std::vector<ChartPoint> annulus_sample(const SampleSpec& spec,
                                              const SolitonParams& sp = {}) {
    if (spec.count < 1) throw ParameterError("annulus_sample: count must be positive");
    if (!(spec.s_min > 0.0) || !(spec.s_max > spec.s_min))
        throw ParameterError("annulus_sample: need 0 < s_min < s_max");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double rot1 = unit(rng);
    const double rot2 = unit(rng);

    std::vector<ChartPoint> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        double u = detail::halton(i + 1, 2) + rot1;
        double v = detail::halton(i + 1, 3) + rot2;
        u -= std::floor(u);
        v -= std::floor(v);
        const double s = spec.s_min + (spec.s_max - spec.s_min) * u;
        const double theta = 6.283185307179586 * v;
        const ChartPoint gp{ChartKind::geodesic_polar, s, theta};
        out.push_back(transform_point(gp, spec.chart, sp));
    }
    return out;
}

// Jittered copy of a sample; used to cross-examine classifications that
// look exact on the original points.
inline std::vector<ChartPoint> jitter_sample(const std::vector<ChartPoint>& sample,
                                             const SolitonParams& sp = {}) {
    std::vector<ChartPoint> out;
    out.reserve(sample.size());
    for (const auto& p : sample) {
        ChartPoint gp = transform_point(p, ChartKind::geodesic_polar, sp);
        gp.c1 *= 1.07;
        gp.c2 += 0.13;
        out.push_back(transform_point(gp, p.kind, sp));
    }
    return out;
}

} // namespace cigar
