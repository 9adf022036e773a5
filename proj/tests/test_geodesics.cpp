#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <cigar/geodesics.hpp>
#include <cigar/ode.hpp>

using namespace cigar;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
}

bool has_node_at(const std::vector<OdePoint<4>>& nodes, double t) {
    return std::any_of(nodes.begin(), nodes.end(),
                       [t](const OdePoint<4>& n) { return n.t == t; });
}

} // namespace

TEST_CASE("adaptive integrator reproduces closed-form flows", "[geodesics][ode]") {
    auto exp_rhs = [](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{y[0]};
    };
    const auto fwd = integrate_adaptive<1>(exp_rhs, 0.0, 2.0, {1.0});
    CHECK_THAT(fwd.back().y[0], Catch::Matchers::WithinRel(std::exp(2.0), 1e-7));

    const auto bwd = integrate_adaptive<1>(exp_rhs, 0.0, -1.0, {1.0});
    CHECK_THAT(bwd.back().y[0], Catch::Matchers::WithinRel(std::exp(-1.0), 1e-7));

    // dense output between accepted nodes
    REQUIRE(fwd.size() > 7);
    const double mid = 0.5 * (fwd[5].t + fwd[6].t);
    CHECK_THAT(hermite_eval(fwd[5], fwd[6], mid)[0],
               Catch::Matchers::WithinRel(std::exp(mid), 1e-6));

    auto osc = [](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -y[0]};
    };
    const auto pi_run = integrate_adaptive<2>(osc, 0.0, 3.141592653589793, {0.0, 1.0});
    CHECK_THAT(pi_run.back().y[0], Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK_THAT(pi_run.back().y[1], Catch::Matchers::WithinAbs(-1.0, 1e-8));
}

TEST_CASE("integrator lands on requested output nodes exactly", "[geodesics][ode]") {
    auto rhs = [](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{y[0]};
    };
    const std::vector<double> grid = {0.3, 0.7, 1.1};
    const auto nodes = integrate_adaptive<1>(rhs, 0.0, 1.5, {1.0}, {}, grid);
    for (double g : grid) {
        const auto it = std::find_if(nodes.begin(), nodes.end(),
                                     [g](const OdePoint<1>& n) { return n.t == g; });
        REQUIRE(it != nodes.end());
        CHECK_THAT(it->y[0], Catch::Matchers::WithinRel(std::exp(g), 1e-7));
    }
}

TEST_CASE("integrator stop events and failure modes", "[geodesics][ode]") {
    auto rhs = [](double, const std::array<double, 1>&) {
        return std::array<double, 1>{-1.0};
    };
    OdeStopInfo<1> info;
    const auto nodes = integrate_adaptive<1>(
        rhs, 0.0, 5.0, {1.0}, {}, {},
        [](double, const std::array<double, 1>& y) { return y[0]; }, &info);
    REQUIRE(info.triggered);
    CHECK_THAT(info.t, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK(nodes.back().t == info.t);

    // already past the event at the start
    OdeStopInfo<1> at_start;
    const auto single = integrate_adaptive<1>(
        rhs, 0.0, 5.0, {-1.0}, {}, {},
        [](double, const std::array<double, 1>& y) { return y[0]; }, &at_start);
    CHECK(at_start.triggered);
    CHECK(single.size() == 1);

    OdeOptions bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate_adaptive<1>(rhs, 0.0, 1.0, {1.0}, bad), ParameterError);

    OdeOptions starved;
    starved.max_steps = 5;
    CHECK_THROWS_AS(integrate_adaptive<1>(rhs, 0.0, 10.0, {1.0}, starved), Error);
}

TEST_CASE("turning point state encodes the conserved pair", "[geodesics]") {
    const GeodesicState st = turning_point_state(1.0, 0.6);
    CHECK_THAT(st.s, Catch::Matchers::WithinAbs(0.69314718055994531, 1e-15));
    CHECK(st.s_dot == 0.0);
    CHECK_THAT(st.theta_dot, Catch::Matchers::WithinRel(5.0 / 3.0, 1e-14));

    const ConservedPair c = conserved_of(st);
    CHECK_THAT(c.ell, Catch::Matchers::WithinAbs(0.6, 1e-15));
    CHECK_THAT(c.k, Catch::Matchers::WithinAbs(1.0, 1e-15));

    CHECK_THROWS_AS(turning_point_state(0.36, 0.6), DomainError);
    CHECK_THROWS_AS(turning_point_state(1.0, 0.0), DomainError);
}

TEST_CASE("closest approach in both radial coordinates", "[geodesics]") {
    const TurningPoint t1 = turning_point({0.6, 1.0}, SolitonParams{});
    CHECK_THAT(t1.s_min, Catch::Matchers::WithinAbs(0.69314718055994531, 1e-15));
    CHECK_THAT(t1.r_min, Catch::Matchers::WithinAbs(0.75, 1e-15));

    const TurningPoint t4 = turning_point({0.6, 1.0}, SolitonParams::raw_e_for_testing(4.0));
    CHECK_THAT(t4.r_min, Catch::Matchers::WithinAbs(1.5, 1e-15));

    CHECK_THROWS_AS(turning_point({0.6, 0.36}, SolitonParams{}), DomainError);
}

TEST_CASE("radial profile closed form", "[geodesics]") {
    CHECK_THAT(closed_form_s({0.6, 1.0}, 0.0),
               Catch::Matchers::WithinAbs(0.69314718055994531, 1e-14));
    CHECK_THAT(closed_form_s({0.6, 1.0}, 1.3),
               Catch::Matchers::WithinAbs(1.310682387824095, 1e-12));
    CHECK(closed_form_s({0.6, 1.0}, -0.9) == closed_form_s({0.6, 1.0}, 0.9));
    CHECK_THROWS_AS(closed_form_s({0.6, 0.36}, 1.0), DomainError);
}

TEST_CASE("scattering trajectory matches the closed form", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    opt.output_grid = linspace(-3.0, 3.0, 13);
    const GeodesicState init = turning_point_state(1.0, 0.6);
    const GeodesicTrace tr = integrate_geodesic(init, -3.0, 3.0, opt);

    CHECK(tr.classification == GeodesicClass::non_radial);
    CHECK_FALSE(tr.tip_event);
    CHECK(tr.drift_ok);
    CHECK(tr.max_ell_drift < 1e-8);
    CHECK(tr.max_k_drift < 1e-8);
    CHECK(tr.entries.size() == tr.nodes.size());

    double worst = 0.0;
    for (const auto& e : tr.entries)
        worst = std::max(worst,
                         std::abs(e.state.s - closed_form_s({0.6, 1.0}, e.state.sigma)));
    CHECK(worst < 1e-6);

    REQUIRE(tr.turning.has_value());
    CHECK(tr.turning->refined_from_trace);
    CHECK_THAT(tr.turning->sigma, Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(tr.turning->s_min, Catch::Matchers::WithinAbs(0.69314718055994531, 1e-8));
    CHECK_THAT(tr.turning->r_min, Catch::Matchers::WithinAbs(0.75, 1e-7));
    CHECK_THAT(min_r_of_trace(tr), Catch::Matchers::WithinAbs(0.75, 1e-7));

    CHECK(tr.total_winding > 0.0); // theta is monotone along the scatter
    CHECK_THAT(tr.total_winding,
               Catch::Matchers::WithinAbs(tr.entries.back().state.theta -
                                              tr.entries.front().state.theta,
                                          1e-15));
    CHECK(radial_equation_defect(tr) < 1e-7);

    // requested output sigmas appear verbatim among the nodes
    for (double g : opt.output_grid)
        if (g > -3.0 && g < 3.0) CHECK(has_node_at(tr.nodes, g));

    // scale factor only enters through r
    GeodesicOptions opt4 = opt;
    opt4.params = SolitonParams::raw_e_for_testing(4.0);
    const GeodesicTrace tr4 = integrate_geodesic(init, -3.0, 3.0, opt4);
    REQUIRE(tr4.turning.has_value());
    CHECK_THAT(tr4.turning->r_min, Catch::Matchers::WithinAbs(1.5, 1e-6));
}

TEST_CASE("radial trajectories terminate at the tip", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    const GeodesicState init{0.0, 1.0, 0.7, -1.0, 0.0};
    const GeodesicTrace tr = integrate_geodesic(init, 0.0, 3.0, opt);

    CHECK(tr.classification == GeodesicClass::radial);
    REQUIRE(tr.tip_event);
    CHECK_THAT(tr.tip_sigma, Catch::Matchers::WithinAbs(1.0, 1e-5));
    CHECK_THAT(tr.nodes.back().y[0], Catch::Matchers::WithinAbs(1e-6, 1e-9));
    CHECK(tr.total_winding == 0.0);
    CHECK_FALSE(tr.turning.has_value());
    CHECK(radial_equation_defect(tr) < 1e-10);

    // angular motion at the tip is refused outright
    CHECK_THROWS_AS(geodesic_rhs(1e-7, 0.0, 0.5), TipProximityError);
}

TEST_CASE("trace sampling interpolates between nodes", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    const GeodesicTrace tr = integrate_geodesic(turning_point_state(1.0, 0.6), -3.0, 3.0, opt);

    const GeodesicState mid = sample_trace(tr, 0.37);
    CHECK(mid.sigma == 0.37);
    CHECK_THAT(mid.s, Catch::Matchers::WithinAbs(closed_form_s({0.6, 1.0}, 0.37), 1e-6));

    // out-of-span requests clamp to the recorded ends
    CHECK(sample_trace(tr, -99.0).sigma == tr.nodes.front().t);
    CHECK(sample_trace(tr, 99.0).sigma == tr.nodes.back().t);
}

TEST_CASE("degenerate spans still produce a one-point trace", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    const GeodesicState init = turning_point_state(1.0, 0.6);
    const GeodesicTrace tr = integrate_geodesic(init, 0.0, 0.0, opt);
    REQUIRE(tr.entries.size() == 1);
    CHECK(tr.total_winding == 0.0);
    REQUIRE(tr.turning.has_value());
    CHECK_THAT(min_r_of_trace(tr), Catch::Matchers::WithinAbs(0.75, 1e-12));

    CHECK_THROWS_AS(integrate_geodesic(init, 1.0, 3.0, opt), ParameterError);
}

TEST_CASE("perturbed flow drifts off the closed form", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    opt.debug_rhs_perturbation = 1e-3;
    const GeodesicTrace tr = integrate_geodesic(turning_point_state(1.0, 0.6), -3.0, 3.0, opt);
    double worst = 0.0;
    for (const auto& e : tr.entries)
        worst = std::max(worst,
                         std::abs(e.state.s - closed_form_s({0.6, 1.0}, e.state.sigma)));
    CHECK(worst > 1e-4);
}

TEST_CASE("conformal chart states mirror arclength states", "[geodesics]") {
    const SolitonParams sp = SolitonParams::from_rho_t(0.0, 0.0);
    const GeodesicState st{0.0, 1.0, 0.7, 0.3, 0.2};
    const CartesianGeodesicState cs = to_cartesian_state(st, sp);
    CHECK_THAT(std::hypot(cs.x, cs.y), Catch::Matchers::WithinRel(std::sinh(1.0), 1e-14));

    const ConservedPair a = conserved_of(st);
    const ConservedPair b = cartesian_conserved(cs, sp);
    CHECK_THAT(b.ell, Catch::Matchers::WithinRel(a.ell, 1e-13));
    CHECK_THAT(b.k, Catch::Matchers::WithinRel(a.k, 1e-13));
}

TEST_CASE("conformal chart flow crosses the tip smoothly", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    const CartesianGeodesicState init{0.0, -2.0, 0.0, std::sqrt(5.0), 0.0};
    const CartesianGeodesicTrace tr = integrate_geodesic_cartesian(init, 4.0, opt);

    CHECK(tr.max_ell_drift < 1e-8);
    CHECK(tr.max_k_drift < 1e-8);
    CHECK(tr.nodes.front().y[0] < 0.0);
    CHECK(tr.nodes.back().y[0] > 0.0); // ran straight through the origin
    for (const auto& n : tr.nodes) CHECK_THAT(n.y[1], Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("both chart flows agree away from the tip", "[geodesics]") {
    GeodesicOptions opt;
    opt.params = SolitonParams::from_rho_t(0.0, 0.0);
    opt.output_grid = {0.5, 1.0, 1.5, 2.0, 2.5};
    const GeodesicState init = turning_point_state(1.0, 0.6);
    const GeodesicTrace polar = integrate_geodesic(init, 0.0, 3.0, opt);
    const CartesianGeodesicTrace cart =
        integrate_geodesic_cartesian(to_cartesian_state(init, opt.params), 3.0, opt);

    int compared = 0;
    for (double g : opt.output_grid) {
        const auto pi = std::find_if(polar.nodes.begin(), polar.nodes.end(),
                                     [g](const OdePoint<4>& n) { return n.t == g; });
        const auto ci = std::find_if(cart.nodes.begin(), cart.nodes.end(),
                                     [g](const OdePoint<4>& n) { return n.t == g; });
        REQUIRE(pi != polar.nodes.end());
        REQUIRE(ci != cart.nodes.end());
        const double s_cart = std::asinh(std::hypot(ci->y[0], ci->y[1]));
        CHECK_THAT(s_cart, Catch::Matchers::WithinAbs(pi->y[0], 1e-8));
        ++compared;
    }
    CHECK(compared == 5);
}
