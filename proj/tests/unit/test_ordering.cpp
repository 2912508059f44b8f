#include <doctest.h>

#include <cmath>
#include <vector>

#include "failsafe/error.hpp"
#include "failsafe/io.hpp"
#include "failsafe/ordering.hpp"

using namespace failsafe;
using BF = BaselineFamily;
using GF = GeneratorFamily;

namespace {

SystemSpec config(const char* name) {
    return io::load_system(std::string(FAILSAFE_SOURCE_DIR) + "/configs/" + name + ".json");
}

std::vector<double> unit_grid(double hi = 10.0, int points = 1000) {
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = hi * (i + 1) / points;
    return xs;
}

SurvivalCurve make(std::vector<double> xs, std::vector<double> v) { return {std::move(xs), std::move(v)}; }

} // namespace

TEST_CASE("compare_curves on hand-built curves") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto a = make(xs, {1.0, 0.8, 0.5, 0.2});
    const auto b = make(xs, {1.0, 0.7, 0.4, 0.2});
    const auto c = make(xs, {0.9, 0.9, 0.3, 0.1});

    CHECK(compare_curves(a, a).relation == Relation::TiesWithinTol);
    CHECK(compare_curves(a, b).relation == Relation::XDominatesY);
    CHECK(compare_curves(b, a).relation == Relation::YDominatesX);
    const auto v = compare_curves(a, c);
    CHECK(v.relation == Relation::Crossing);
    REQUIRE(v.crossings.size() == 2);
    CHECK(v.crossings[0].first == 1.0);
    CHECK(v.crossings[0].second == 2.0);
    CHECK(v.min_gap == doctest::Approx(-0.1));
    CHECK(v.max_gap == doctest::Approx(0.2));
    CHECK(compare_curves(c, a).relation == Relation::Crossing);

    // A dip below −tol but within the crossing tolerance is chatter, not a crossing.
    const auto d = make(xs, {1.0, 0.8 + 5e-9, 0.4, 0.2});
    const auto w = compare_curves(a, d);
    CHECK(w.relation == Relation::XDominatesY);
    CHECK(w.chatter);

    CHECK_THROWS_AS(compare_curves(a, make({1, 2, 3}, {1, 1, 1})), ValidationError);
    CHECK_THROWS_AS(compare_curves(a, make({1, 2, 3, 5}, {1, 1, 1, 1})), ValidationError);
}

TEST_CASE("Example 1 dominance on (0, 10]") {
    const auto x = config("example1_x"), y = config("example1_y");
    const auto xs = unit_grid();
    const auto v = compare_curves(curve(x, xs), curve(y, xs));
    CHECK(v.relation == Relation::XDominatesY);
    CHECK(v.min_gap >= -1e-10);
    CHECK(v.max_gap > 0.01);
}

TEST_CASE("Example 2 curves do not cross") {
    // θ_X is componentwise below θ_Y in a Scale model, so X₂:₅ ≥st Y₂:₅ under
    // any shared copula; the computed gap stays positive.
    const auto x = config("example2_x"), y = config("example2_y");
    const auto xs = unit_grid();
    const auto cx = curve(x, xs), cy = curve(y, xs);
    const auto v = compare_curves(cx, cy);
    CHECK(v.relation == Relation::XDominatesY);
    CHECK(v.min_gap > 1e-3);
    // The survival ratio is still not monotone on this grid.
    CHECK_FALSE(hazard_ratio_monotone(cx, cy));
}

TEST_CASE("hazard_ratio_monotone") {
    const auto xs = unit_grid(5.0, 200);
    std::vector<double> e1(xs.size()), e2(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        e1[i] = std::exp(-xs[i]);
        e2[i] = std::exp(-2 * xs[i]);
    }
    const auto c1 = make(xs, e1), c2 = make(xs, e2);
    CHECK(hazard_ratio_monotone(c1, c1));
    CHECK(hazard_ratio_monotone(c2, c1));
    CHECK_FALSE(hazard_ratio_monotone(c1, c2));
    // Ratio nondecreasing from a start ≥ 1 implies cy ≥ cx pointwise.
    CHECK(compare_curves(c2, c1).relation == Relation::YDominatesX);
    auto zero = e2;
    zero[10] = 0.0;
    CHECK_THROWS(hazard_ratio_monotone(make(xs, zero), c1));
}

TEST_CASE("verify_theorem1 on Example 1") {
    const auto r = verify_theorem1(config("example1_x"), config("example1_y"));
    CHECK(r.theorem == "t1");
    CHECK(r.find("shared_generator")->holds);
    CHECK(r.find("generator_log_concave")->holds);
    CHECK(r.find("p_larger")->holds);
    CHECK(r.find("condition2_decreasing")->holds);
    // Log-convexity in log θ is DPFR of the baseline, which fails here.
    const auto* lc = r.find("condition2_log_convex");
    REQUIRE(lc != nullptr);
    CHECK_FALSE(lc->holds);
    CHECK(lc->value == doctest::Approx(0.807).epsilon(0.01));
    CHECK_FALSE(r.overall);
    REQUIRE(r.dominance.has_value());
    CHECK(r.dominance->relation == Relation::XDominatesY);
    CHECK_FALSE(r.inconsistent);
}

TEST_CASE("verify_theorem1 on Example 2") {
    const auto r = verify_theorem1(config("example2_x"), config("example2_y"));
    CHECK_FALSE(r.find("generator_log_concave")->holds);
    CHECK_FALSE(r.overall);
}

TEST_CASE("verify_theorem1 with identical systems") {
    const auto x = config("example1_x");
    const auto r = verify_theorem1(x, x);
    CHECK(r.find("p_larger")->holds);
    REQUIRE(r.dominance.has_value());
    CHECK(r.dominance->relation == Relation::TiesWithinTol);
    CHECK_FALSE(r.inconsistent);
}

TEST_CASE("mismatched systems are reported, not thrown") {
    auto x = config("example1_x");
    auto y = config("example2_y");
    const auto r = verify_theorem1(x, y);
    CHECK_FALSE(r.find("shared_generator")->holds);
    CHECK_FALSE(r.overall);
}

TEST_CASE("inconsistency escalation") {
    // Tolerances loose enough to pass every hypothesis while Y dominates X.
    GridPolicy loose;
    loose.shape_tol = 1e6;
    loose.preorder_tol = 1e6;
    const auto x = config("example1_y"), y = config("example1_x");
    CHECK_THROWS_AS(verify_theorem1(x, y, loose), InconsistencyError);
    const auto r = verify_theorem1(x, y, loose, false);
    CHECK(r.overall);
    CHECK(r.inconsistent);
    CHECK(r.dominance->relation == Relation::YDominatesX);
}

TEST_CASE("verify_theorem2 on the Location/GP example") {
    const auto x = config("theorem2_x"), y = config("theorem2_y");
    const auto r = verify_theorem2(x, y);
    CHECK(r.find("generator_log_convex")->holds);
    CHECK(r.find("reciprocal_majorize")->holds);
    CHECK(r.find("condition2_increasing")->holds);
    // log F̄(x − θ) has a concave kink where θ reaches x.
    CHECK_FALSE(r.find("condition2_log_convex")->holds);
    CHECK_FALSE(r.overall);
    REQUIRE(r.dominance.has_value());
    CHECK(r.dominance->relation == Relation::Crossing);
    CHECK(r.dominance->min_gap < -0.02);
    CHECK(r.dominance->max_gap > 0.02);
}

TEST_CASE("verify_theorem2 rejects a Scale model") {
    const auto r = verify_theorem2(config("clayton_demo"), config("clayton_demo"));
    CHECK_FALSE(r.find("condition2_increasing")->holds);
    CHECK_FALSE(r.overall);
    CHECK(r.dominance->relation == Relation::TiesWithinTol);
}

TEST_CASE("Proposition verifiers") {
    const Generator g(GF::GumbelBarnett, 0.5);
    const Baseline gg(BF::GeneralizedGamma, {0.5, 0.5});
    {
        const SemiParamModel m(ModelKind::MPHRS, gg, {0.5, 1.0});
        const SystemSpec x{m, {0.5, 1.0, 2.0}, g}, y{m, {1.0, 1.5, 2.5}, g};
        const auto r = verify_prop_mphrs(x, y);
        CHECK(r.find("generator_log_concave")->holds);
        CHECK(r.find("p_larger")->holds);
        // GG(0.5, 0.5) is Weibull with shape 0.5: x·h(x) = 0.5√x increases.
        CHECK_FALSE(r.find("baseline_dpfr")->holds);
        CHECK_FALSE(r.overall);
        CHECK(r.dominance->relation == Relation::XDominatesY);
    }
    {
        const SemiParamModel m(ModelKind::MPHRS, Baseline(BF::Exponential, {1.0}), {1.0, 1.0});
        const SystemSpec x{m, {0.5, 1.0}, g}, y{m, {1.0, 1.5}, g};
        CHECK_FALSE(verify_prop_mphrs(x, y).find("baseline_dpfr")->holds);
    }
    {
        const SemiParamModel a(ModelKind::MPHRS, gg, {1.5, 1.0});
        const SystemSpec x{a, {0.5, 1.0}, g};
        CHECK_THROWS_AS(verify_prop_mphrs(x, x), ValidationError);
        const SemiParamModel b(ModelKind::MPHRS, gg, {0.5, 2.0});
        const SemiParamModel c(ModelKind::MPHRS, gg, {0.5, 1.0});
        CHECK_THROWS_AS(verify_prop_mphrs(SystemSpec{b, {1, 2}, g}, SystemSpec{c, {1, 2}, g}),
                        ValidationError);
        CHECK_THROWS_AS(verify_prop_mphrs(config("example1_x"), config("example1_y")),
                        ValidationError);
    }
    {
        const SemiParamModel m(ModelKind::LS, gg, {1.0, 1.0});
        const SystemSpec x{m, {0.5, 1.0, 2.0}, g}, y{m, {1.0, 1.5, 2.5}, g};
        const auto r = verify_prop_ls(x, y);
        CHECK_FALSE(r.find("baseline_dpfr")->holds);
        CHECK_FALSE(r.overall);
        CHECK(r.dominance->relation == Relation::XDominatesY);
        // Below the location both systems survive with certainty.
        CHECK(survival_x2n(x, 0.9) == 1.0);
        CHECK(survival_x2n(y, 0.9) == 1.0);
    }
    {
        const SemiParamModel m(ModelKind::LS, Baseline(BF::Weibull, {1.0, 2.0}), {1.0, 1.0});
        const SystemSpec x{m, {0.5, 1.0}, g};
        CHECK_FALSE(verify_prop_ls(x, x).find("baseline_dpfr")->holds);
        const SemiParamModel m2(ModelKind::LS, Baseline(BF::Weibull, {1.0, 2.0}), {1.0, 2.0});
        CHECK_THROWS_AS(verify_prop_ls(x, SystemSpec{m2, {0.5, 1.0}, g}), ValidationError);
    }
}

TEST_CASE("Schur probe") {
    // A symmetric point gives exactly zero.
    auto sym = config("example1_x");
    sym.theta = {0.4, 0.4, 0.4, 0.4, 0.4};
    CHECK(schur_condition_probe(sym).worst == 0.0);

    // Theorem 1 hypotheses fail at Example 1 and the proof inequality fails with them.
    const auto p1 = schur_condition_probe(config("example1_x"));
    CHECK(p1.worst < -0.1);
    CHECK(p1.p >= 0);
    CHECK(p1.q > p1.p);

    CHECK(schur_condition_probe(config("example2_x")).worst < 0.0);

    const std::pair<int, int> one[] = {{0, 1}};
    const auto p2 = schur_condition_probe(config("example1_x"), one);
    CHECK(p2.p == 0);
    CHECK(p2.q == 1);
    CHECK_THROWS_AS(schur_condition_probe(config("example1_x"), {}, {}, 1e-12), ValidationError);
    const std::pair<int, int> bad[] = {{0, 7}};
    CHECK_THROWS_AS(schur_condition_probe(config("example1_x"), bad), ValidationError);
}
