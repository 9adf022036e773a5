#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <cigar/calculus.hpp>
#include <cigar/fd.hpp>
#include <cigar/fields.hpp>
#include <cigar/metrics.hpp>

using namespace cigar;

TEST_CASE("adaptive differencing nails smooth derivatives", "[calculus]") {
    const double d = differentiate([](double x) { return std::sin(x); }, 0.3);
    CHECK_THAT(d, Catch::Matchers::WithinAbs(std::cos(0.3), 1e-10));
    const double d2 = second_derivative([](double x) { return std::exp(x); }, 0.2);
    CHECK_THAT(d2, Catch::Matchers::WithinAbs(std::exp(0.2), 1e-8));
}

TEST_CASE("differencing refuses to certify a noisy function", "[calculus]") {
    auto noisy = [](double x) { return std::sin(x) + 1e-3 * std::sin(1e6 * x); };
    CHECK_THROWS_AS(differentiate(noisy, 0.3), StepSizeError);
}

TEST_CASE("connection coefficients of the arclength warped form", "[calculus]") {
    const SolitonParams sp;
    const SymTensorField g = metric_field(MetricSpec::cigar(sp, ChartKind::geodesic_polar));
    const ChartPoint p{ChartKind::geodesic_polar, 1.0, 0.4};
    const Christoffel G = christoffel(g, p);

    // warped form ds^2 + tanh(s)^2 dth^2: the only nonzero symbols are
    // G^s_thth = -tanh sech^2 and G^th_sth = sech^2 / tanh
    CHECK_THAT(G(0, 1, 1), Catch::Matchers::WithinAbs(-0.31985000422461225, 1e-8));
    CHECK_THAT(G(1, 0, 1), Catch::Matchers::WithinAbs(0.55144112954356642, 1e-8));
    CHECK_THAT(G(1, 1, 0), Catch::Matchers::WithinAbs(0.55144112954356642, 1e-8));
    CHECK_THAT(G(0, 0, 0), Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK_THAT(G(0, 0, 1), Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK_THAT(G(1, 0, 0), Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK_THAT(G(1, 1, 1), Catch::Matchers::WithinAbs(0.0, 1e-8));
}

TEST_CASE("deliberate sign flip corrupts the connection", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::cigar({}, ChartKind::geodesic_polar));
    const ChartPoint p{ChartKind::geodesic_polar, 1.0, 0.4};
    CalcOptions opt;
    opt.debug_flip_christoffel_sign = true;
    CHECK_THAT(christoffel(g, p, opt)(0, 1, 1),
               Catch::Matchers::WithinAbs(0.31985000422461225, 1e-8));
}

TEST_CASE("curvature of the cigar family", "[calculus]") {
    const SolitonParams sp = SolitonParams::raw_e_for_testing(4.0);
    const SymTensorField g = metric_field(MetricSpec::cigar(sp, ChartKind::cartesian));
    // K = 2E/(E + r^2): 1 at r = 2, maximal value 2 at the tip
    CHECK_THAT(gauss_curvature(g, {ChartKind::cartesian, 1.2, 1.6}),
               Catch::Matchers::WithinAbs(1.0, 1e-6));
    CHECK_THAT(gauss_curvature(g, {ChartKind::cartesian, 0.0, 0.0}),
               Catch::Matchers::WithinAbs(2.0, 1e-6));
    CHECK_THAT(scalar_curvature(g, {ChartKind::cartesian, 1.2, 1.6}),
               Catch::Matchers::WithinAbs(2.0, 2e-6));
}

TEST_CASE("flat families have vanishing curvature", "[calculus]") {
    const SymTensorField cart = metric_field(MetricSpec::flat(ChartKind::cartesian));
    CHECK_THAT(gauss_curvature(cart, {ChartKind::cartesian, 0.4, -0.7}),
               Catch::Matchers::WithinAbs(0.0, 1e-8));
    const SymTensorField pol = metric_field(MetricSpec::flat(ChartKind::polar));
    CHECK_THAT(gauss_curvature(pol, {ChartKind::polar, 1.3, 0.5}),
               Catch::Matchers::WithinAbs(0.0, 1e-8));
}

TEST_CASE("curvature of independent closed forms", "[calculus]") {
    // ds^2 + sin(s)^2 dth^2 is the unit sphere away from the poles
    const SymTensorField sph = metric_field(MetricSpec::warped(curve_sin()));
    CHECK_THAT(gauss_curvature(sph, {ChartKind::geodesic_polar, 1.0, 0.3}),
               Catch::Matchers::WithinAbs(1.0, 1e-6));

    // (1 + r^2)(dx^2 + dy^2) has K = -2/(1 + r^2)^3
    const SymTensorField conf = metric_field(MetricSpec::conformal_flat(
        curve_poly({1.0, 0.0, 1.0})));
    CHECK_THAT(gauss_curvature(conf, {ChartKind::cartesian, 0.6, 0.8}),
               Catch::Matchers::WithinAbs(-0.25, 1e-6));
}

TEST_CASE("contracted curvature agrees with the determinant formula", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::cigar({}, ChartKind::cartesian));
    const ChartPoint p{ChartKind::cartesian, 0.5, 0.4};
    const Mat2 ric = ricci_tensor(g, p);
    const Mat2 expect = g.eval(p) * gauss_curvature(g, p);
    CHECK(max_abs(ric - expect) < 5e-6);
    CHECK(ric.a12 == ric.a21);
}

TEST_CASE("covariant second derivative on the flat plane", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::flat(ChartKind::cartesian));
    const ScalarField f{ChartKind::cartesian,
                        [](const ChartPoint& p) { return p.c1 * p.c1 + 3.0 * p.c1 * p.c2; }};
    const Mat2 h = hessian(g, f, {ChartKind::cartesian, 0.7, -0.2});
    CHECK_THAT(h.a11, Catch::Matchers::WithinAbs(2.0, 1e-7));
    CHECK_THAT(h.a12, Catch::Matchers::WithinAbs(3.0, 1e-7));
    CHECK_THAT(h.a22, Catch::Matchers::WithinAbs(0.0, 1e-7));
    CHECK(h.a12 == h.a21);
}

TEST_CASE("connection is compatible with its metric", "[calculus]") {
    const CalcOptions opt;
    const SolitonParams sp;
    for (const MetricSpec& spec : {MetricSpec::cigar(sp, ChartKind::cartesian),
                                   MetricSpec::cigar(sp, ChartKind::geodesic_polar)}) {
        const SymTensorField g = metric_field(spec);
        const ChartPoint p = spec.chart == ChartKind::cartesian
                                 ? ChartPoint{ChartKind::cartesian, 0.7, -0.4}
                                 : ChartPoint{ChartKind::geodesic_polar, 0.9, 1.1};
        const Christoffel G = christoffel(g, p, opt);
        const Mat2 g0 = g.eval(p);
        for (int k = 0; k < 2; ++k) {
            const Mat2 dg = detail::partial(g, p, k, opt.fd1);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double nabla = dg(i, j);
                    for (int l = 0; l < 2; ++l)
                        nabla -= G(l, k, i) * g0(l, j) + G(l, k, j) * g0(i, l);
                    CHECK_THAT(nabla, Catch::Matchers::WithinAbs(0.0, 1e-8));
                }
        }
    }
}

TEST_CASE("metric flow along fields is linear in the field", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::cigar({}, ChartKind::cartesian));
    const VectorFieldSpec R = catalog("rotation");
    const VectorFieldSpec D = catalog("dilation");
    VectorFieldSpec mix;
    mix.name = "mix";
    mix.chart = ChartKind::cartesian;
    mix.components = [&](const ChartPoint& p) {
        return R.components(p) * 2.0 - D.components(p) * 3.0;
    };
    const ChartPoint p{ChartKind::cartesian, 0.8, 0.3};
    const Mat2 lhs = lie_derivative(g, mix, p);
    const Mat2 rhs = lie_derivative(g, R, p) * 2.0 - lie_derivative(g, D, p) * 3.0;
    CHECK(max_abs(lhs - rhs) < 1e-9);
}

TEST_CASE("rotation leaves the cigar metric unchanged", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::cigar({}, ChartKind::cartesian));
    for (const ChartPoint p : {ChartPoint{ChartKind::cartesian, 0.8, 0.3},
                               ChartPoint{ChartKind::cartesian, -1.4, 2.2}})
        CHECK(frobenius(lie_derivative(g, catalog("rotation"), p)) < 1e-9);
}

TEST_CASE("scaling the flat plane doubles the metric", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::flat(ChartKind::cartesian));
    const VectorFieldSpec D = catalog("dilation");
    std::vector<ChartPoint> sample;
    for (int i = 0; i < 5; ++i) sample.push_back({ChartKind::cartesian, 0.4 + 0.3 * i, 0.6});

    const SymTensorField first{ChartKind::cartesian, [&](const ChartPoint& q) {
                                   return lie_derivative(g, D, q);
                               }};
    const auto rep = proportionality(first, g, sample, 1e-6);
    REQUIRE(rep.is_proportional);
    for (const auto& [p, c] : rep.factor_samples)
        CHECK_THAT(c, Catch::Matchers::WithinAbs(2.0, 1e-9));

    // iterating the flow multiplies by the same factor again
    const SymTensorField second{ChartKind::cartesian, [&](const ChartPoint& q) {
                                    return second_lie_derivative(g, D, q);
                                }};
    const auto rep2 = proportionality(second, first, sample, 1e-6);
    REQUIRE(rep2.is_proportional);
    for (const auto& [p, c] : rep2.factor_samples)
        CHECK_THAT(c, Catch::Matchers::WithinAbs(2.0, 1e-8));
}

TEST_CASE("conformal factor of the dilation on the cigar", "[calculus]") {
    const SolitonParams sp;
    const SymTensorField g = metric_field(MetricSpec::cigar(sp, ChartKind::cartesian));
    const VectorFieldSpec D = catalog("dilation", {sp});
    const SymTensorField first{ChartKind::cartesian, [&](const ChartPoint& q) {
                                   return lie_derivative(g, D, q);
                               }};
    const std::vector<ChartPoint> sample{{ChartKind::cartesian, 0.8, 0.0}};
    const auto rep = proportionality(first, g, sample, 1e-6);
    REQUIRE(rep.is_proportional);
    // L_D g = 2 lambda g with lambda = E/(E + r^2) = 1/1.64 at r = 0.8
    CHECK_THAT(rep.factor_samples[0].second,
               Catch::Matchers::WithinAbs(2.0 * 0.60975609756097561, 1e-6));
}

TEST_CASE("proportionality verdicts", "[calculus]") {
    const SymTensorField g = metric_field(MetricSpec::cigar({}, ChartKind::cartesian));
    std::vector<ChartPoint> sample;
    for (int i = 0; i < 6; ++i) sample.push_back({ChartKind::cartesian, 0.3 + 0.4 * i, -0.5});

    const SymTensorField scaled{ChartKind::cartesian,
                                [&](const ChartPoint& q) { return g.eval(q) * 3.7; }};
    const auto rep = proportionality(scaled, g, sample, 1e-6);
    REQUIRE(rep.is_proportional);
    CHECK(rep.relative_residual < 1e-12);
    for (const auto& [p, c] : rep.factor_samples)
        CHECK_THAT(c, Catch::Matchers::WithinAbs(3.7, 1e-12));

    const SymTensorField bent{ChartKind::cartesian, [&](const ChartPoint& q) {
                                  Mat2 m = g.eval(q);
                                  m.a11 += 0.5 * q.c1;
                                  return m;
                              }};
    CHECK_FALSE(proportionality(bent, g, sample, 1e-6).is_proportional);

    const SymTensorField zero{ChartKind::cartesian, [](const ChartPoint&) { return Mat2{}; }};
    const auto repz = proportionality(zero, g, sample, 1e-6);
    CHECK(repz.is_zero);
    CHECK(repz.is_proportional);
    CHECK(repz.relative_residual == 0.0);

    CHECK_THROWS_AS(proportionality(zero, g, std::vector<ChartPoint>{}, 1e-6), ParameterError);
}

TEST_CASE("derivatives survive next to the radial exclusion zone", "[calculus]") {
    const ScalarField f{ChartKind::polar, [](const ChartPoint& p) { return p.c1 * p.c1; }};
    const ChartPoint p{ChartKind::polar, 1e-3, 0.2};
    // the stencil is clamped to stay inside the chart
    CHECK_THAT(detail::partial(f, p, 0, FdOptions{}),
               Catch::Matchers::WithinAbs(2e-3, 1e-9));
}
