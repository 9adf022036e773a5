#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <cigar/charts.hpp>
#include <cigar/metrics.hpp>

using namespace cigar;

TEST_CASE("cigar metric components in all three charts", "[metrics]") {
    const SolitonParams sp = SolitonParams::raw_e_for_testing(4.0);

    const Mat2 gc = metric_at(MetricSpec::cigar(sp, ChartKind::cartesian),
                              {ChartKind::cartesian, 1.2, 1.6});
    CHECK_THAT(gc.a11, Catch::Matchers::WithinAbs(0.125, 1e-15));
    CHECK_THAT(gc.a22, Catch::Matchers::WithinAbs(0.125, 1e-15));
    CHECK(gc.a12 == 0.0);

    const Mat2 gp = metric_at(MetricSpec::cigar(sp, ChartKind::polar),
                              {ChartKind::polar, 2.0, 0.7});
    CHECK_THAT(gp.a11, Catch::Matchers::WithinAbs(0.125, 1e-15));
    CHECK_THAT(gp.a22, Catch::Matchers::WithinAbs(0.5, 1e-15));

    const Mat2 gg = metric_at(MetricSpec::cigar(sp, ChartKind::geodesic_polar),
                              {ChartKind::geodesic_polar, 1.0, 0.7});
    CHECK(gg.a11 == 1.0);
    CHECK_THAT(gg.a22, Catch::Matchers::WithinAbs(0.58002565838597393, 1e-15));
}

TEST_CASE("chart representations agree under pullback", "[metrics]") {
    // g in the source chart must equal J^T g J for J = d(target)/d(source)
    const SolitonParams sp = SolitonParams::raw_e_for_testing(4.0);
    const ChartPoint p{ChartKind::cartesian, 0.9, 0.4};
    const Mat2 g_cart = metric_at(MetricSpec::cigar(sp, ChartKind::cartesian), p);
    for (ChartKind target : {ChartKind::polar, ChartKind::geodesic_polar}) {
        const ChartPoint q = transform_point(p, target, sp);
        const Mat2 g_t = metric_at(MetricSpec::cigar(sp, target), q);
        const Mat2 J = chart_jacobian(p, target, sp);
        const Mat2 pulled = J.transpose() * g_t * J;
        CHECK(max_abs(pulled - g_cart) < 1e-12);
    }
}

TEST_CASE("soliton potential values", "[metrics]") {
    CHECK(potential_function({}, {ChartKind::cartesian, 0.0, 0.0}) == 0.0);
    CHECK_THAT(potential_function({}, {ChartKind::cartesian, 1.0, 0.0}),
               Catch::Matchers::WithinAbs(-0.69314718055994531, 1e-15));
    const SolitonParams half = SolitonParams::from_rho_t(0.25, 0.0);
    CHECK_THAT(potential_function(half, {ChartKind::cartesian, 1.0, 0.0}),
               Catch::Matchers::WithinAbs(-0.34657359027997265, 1e-15));
    // same value regardless of the chart the point is given in
    const SolitonParams sp = SolitonParams::raw_e_for_testing(4.0);
    const ChartPoint p{ChartKind::cartesian, 0.9, 0.4};
    for (ChartKind target : {ChartKind::polar, ChartKind::geodesic_polar})
        CHECK_THAT(potential_function(sp, transform_point(p, target, sp)),
                   Catch::Matchers::WithinRel(potential_function(sp, p), 1e-12));
}

TEST_CASE("auxiliary families", "[metrics]") {
    const Mat2 w = metric_at(MetricSpec::warped(curve_sin()),
                             {ChartKind::geodesic_polar, 1.0, 0.3});
    CHECK(w.a11 == 1.0);
    CHECK_THAT(w.a22, Catch::Matchers::WithinAbs(0.70807341827357119, 1e-15));

    const Mat2 pr = metric_at(MetricSpec::product(), {ChartKind::cartesian, 3.0, -2.0});
    CHECK(pr.a11 == 1.0);
    CHECK(pr.a22 == 1.0);
    CHECK(pr.a12 == 0.0);

    const Mat2 cf = metric_at(MetricSpec::conformal_flat(curve_poly({1.0, 0.0, 1.0})),
                              {ChartKind::cartesian, 0.6, 0.8});
    CHECK_THAT(cf.a11, Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(cf.a22, Catch::Matchers::WithinAbs(2.0, 1e-14));
}

TEST_CASE("degenerate metric configurations are rejected", "[metrics]") {
    CHECK_THROWS_AS(MetricSpec::flat(ChartKind::geodesic_polar), ParameterError);
    CHECK_THROWS_AS(metric_at(MetricSpec::conformal_flat(curve_poly({-1.0})),
                              {ChartKind::cartesian, 0.3, 0.3}),
                    SingularMetricError);
    // chart mismatch between spec and point
    CHECK_THROWS_AS(metric_at(MetricSpec::cigar({}, ChartKind::cartesian),
                              {ChartKind::polar, 1.0, 0.0}),
                    DomainError);
    // radial coordinate on the axis
    CHECK_THROWS_AS(metric_at(MetricSpec::cigar({}, ChartKind::polar),
                              {ChartKind::polar, 0.0, 0.0}),
                    DomainError);
}

TEST_CASE("warping profile limits", "[metrics]") {
    const auto prof = asymptotic_profile(MetricSpec::cigar({}, ChartKind::geodesic_polar));
    CHECK(prof.cylinder_limit);  // psi -> 1: asymptotic cylinder
    CHECK(prof.smooth_tip);      // psi/s -> 1: no cone angle at the tip
    REQUIRE(prof.s.size() == prof.psi.size());
    CHECK_THAT(prof.psi.back(), Catch::Matchers::WithinAbs(1.0, 1e-8));
    CHECK_THAT(prof.psi_over_s.front(), Catch::Matchers::WithinAbs(1.0, 1e-6));
    CHECK_THROWS_AS(asymptotic_profile(MetricSpec::flat(ChartKind::cartesian)),
                    ParameterError);
}

TEST_CASE("metric specs round trip through json", "[metrics]") {
    const MetricSpec cig = MetricSpec::cigar(SolitonParams::from_rho_t(0.25, 0.3),
                                             ChartKind::polar);
    const MetricSpec cig2 = metric_from_json(metric_to_json(cig));
    CHECK(cig2.family == MetricFamily::cigar_rb);
    CHECK(cig2.chart == ChartKind::polar);
    CHECK(cig2.params.rho == 0.25);
    CHECK(cig2.params.t == 0.3);
    CHECK_THAT(cig2.params.E, Catch::Matchers::WithinAbs(cig.params.E, 1e-15));

    const MetricSpec warped = MetricSpec::warped(curve_sin());
    const MetricSpec warped2 = metric_from_json(metric_to_json(warped));
    CHECK(warped2.family == MetricFamily::warped);
    CHECK_THAT(warped2.psi(1.0), Catch::Matchers::WithinAbs(std::sin(1.0), 1e-15));

    // polynomial coefficients survive serialization
    const MetricSpec conf = MetricSpec::conformal_flat(curve_poly({1.0, 0.0, 2.0}));
    const MetricSpec conf2 = metric_from_json(metric_to_json(conf));
    CHECK_THAT(conf2.phi(0.5), Catch::Matchers::WithinAbs(1.5, 1e-15));

    CHECK_THROWS_AS(metric_from_json(nlohmann::json{{"family", "hyperbolic"}}),
                    UnknownNameError);
    CHECK_THROWS_AS(metric_from_json(nlohmann::json{{"chart", "polar"}}), ParameterError);
}

TEST_CASE("builtin curves expose consistent derivatives", "[metrics]") {
    const Curve p = curve_poly({2.0, -1.0, 0.0, 3.0}); // 2 - x + 3x^3
    CHECK_THAT(p(0.5), Catch::Matchers::WithinAbs(1.875, 1e-15));
    CHECK_THAT(p.d1(0.5), Catch::Matchers::WithinAbs(-1.0 + 9.0 * 0.25, 1e-15));
    CHECK_THAT(p.d2(0.5), Catch::Matchers::WithinAbs(18.0 * 0.5, 1e-15));
    CHECK_THROWS_AS(curve_poly({}), ParameterError);

    const Curve ts = curve_tanh_shift(0.3);
    CHECK_THAT(ts(1.0), Catch::Matchers::WithinAbs(0.76159415595576489 + 0.3, 1e-15));
    CHECK_THAT(ts.d1(1.0), Catch::Matchers::WithinAbs(0.41997434161402607, 1e-15));

    CHECK_THROWS_AS(curve_from_name("sigmoid"), UnknownNameError);
}
