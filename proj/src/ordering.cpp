#include "failsafe/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "failsafe/error.hpp"

namespace failsafe {

std::string_view to_string(Relation r) {
    switch (r) {
    case Relation::XDominatesY: return "XDominatesY";
    case Relation::YDominatesX: return "YDominatesX";
    case Relation::Crossing: return "Crossing";
    case Relation::TiesWithinTol: return "TiesWithinTol";
    }
    return "?";
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_same_grid(const SurvivalCurve& cx, const SurvivalCurve& cy) {
    require(cx.xs.size() == cx.values.size() && cy.xs.size() == cy.values.size(),
            "curve: xs and values differ in length");
    require(!cx.xs.empty(), "curve: empty grid");
    require(cx.xs == cy.xs, "curves are evaluated on different grids");
}

} // namespace

DominanceVerdict compare_curves(const SurvivalCurve& cx, const SurvivalCurve& cy, double tol,
                                double crossing_tol) {
    require_same_grid(cx, cy);
    require(tol >= 0.0 && crossing_tol >= tol, "compare_curves: need 0 <= tol <= crossing_tol");
    DominanceVerdict v;
    v.tol = tol;
    v.crossing_tol = crossing_tol;
    v.xs = cx.xs;
    v.min_gap = std::numeric_limits<double>::infinity();
    v.max_gap = -std::numeric_limits<double>::infinity();

    int last_sign = 0;
    double last_x = 0.0;
    for (std::size_t i = 0; i < cx.xs.size(); ++i) {
        const double gap = cx.values[i] - cy.values[i];
        v.min_gap = std::min(v.min_gap, gap);
        v.max_gap = std::max(v.max_gap, gap);
        if (std::abs(gap) > crossing_tol) {
            const int sign = gap > 0.0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign) v.crossings.emplace_back(last_x, cx.xs[i]);
            last_sign = sign;
            last_x = cx.xs[i];
        }
    }

    const bool below = v.min_gap < -tol;
    const bool above = v.max_gap > tol;
    if (!below && !above) {
        v.relation = Relation::TiesWithinTol;
    } else if (!below) {
        v.relation = Relation::XDominatesY;
    } else if (!above) {
        v.relation = Relation::YDominatesX;
    } else if (!v.crossings.empty()) {
        v.relation = Relation::Crossing;
    } else {
        // Both sides exceed tol but at most one exceeds the crossing tolerance.
        v.chatter = true;
        v.relation = v.max_gap >= -v.min_gap ? Relation::XDominatesY : Relation::YDominatesX;
    }
    if (v.relation != Relation::Crossing) v.crossings.clear();
    return v;
}

bool hazard_ratio_monotone(const SurvivalCurve& cx, const SurvivalCurve& cy) {
    require_same_grid(cx, cy);
    double prev = 0.0;
    for (std::size_t i = 0; i < cx.xs.size(); ++i) {
        require(cx.values[i] > 0.0, "hazard ratio: zero denominator at x = " + fmt(cx.xs[i]));
        const double r = cy.values[i] / cx.values[i];
        if (i > 0 && r < prev - 1e-9 * std::max(1.0, std::abs(prev))) return false;
        prev = r;
    }
    return true;
}

const Check* ConditionReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::vector<double> shape_x_grid(const SystemSpec& x, const SystemSpec& y, const GridPolicy& g) {
    if (g.x_range) return logspace(g.x_range->first, g.x_range->second, g.x_points);
    const SystemSpec* both[] = {&x, &y};
    return default_grid(both, g.x_points);
}

std::vector<double> curve_grid(const SystemSpec& x, const SystemSpec& y, const GridPolicy& g) {
    if (g.x_range) return logspace(g.x_range->first, g.x_range->second, g.curve_points);
    const SystemSpec* both[] = {&x, &y};
    return default_grid(both, g.curve_points);
}

std::pair<double, double> theta_span(const SystemSpec& x, const SystemSpec& y,
                                     const GridPolicy& g) {
    if (g.param_range) return *g.param_range;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* s : {&x, &y})
        for (double t : s->theta) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    return {lo, hi};
}

std::vector<double> log_theta_grid(const SystemSpec& x, const SystemSpec& y, const GridPolicy& g) {
    auto [lo, hi] = theta_span(x, y, g);
    require(lo > 0.0, "log-parameter grid needs positive parameters");
    double a = std::log(lo), b = std::log(hi);
    if (b - a < 1e-6) {
        a -= 0.1;
        b += 0.1;
    }
    return linspace(a, b, g.param_points);
}

std::vector<double> theta_grid(const SystemSpec& x, const SystemSpec& y, const GridPolicy& g) {
    auto [lo, hi] = theta_span(x, y, g);
    if (hi - lo < 1e-6 * std::max(1.0, std::abs(hi))) {
        const double w = 0.1 * std::max(1.0, std::abs(hi));
        lo -= w;
        hi += w;
    }
    return linspace(lo, hi, g.param_points);
}

// Runs `fn`, turning a validation failure into a failed check.
template <class Fn>
void run_check(ConditionReport& r, const std::string& name, Fn&& fn) {
    Check c;
    c.name = name;
    try {
        fn(c);
    } catch (const ValidationError& e) {
        c.holds = false;
        c.evidence = std::string("not applicable: ") + e.what();
    }
    r.checks.push_back(std::move(c));
}

void add_shape_check(ConditionReport& r, const std::string& name, const ShapeVerdict& v) {
    Check c;
    c.name = name;
    c.holds = v.holds;
    c.value = v.worst_violation;
    c.evidence = std::string(to_string(v.property)) + ": worst violation " +
                 fmt(v.worst_violation) + " (tol " + fmt(v.tol) + ") at x=" + fmt(v.at_x) +
                 ", param=" + fmt(v.at_param) + "; " + v.probe;
    r.checks.push_back(std::move(c));
}

void add_common_checks(ConditionReport& r, const SystemSpec& x, const SystemSpec& y) {
    Check same;
    same.name = "same_model";
    same.holds = x.model == y.model && x.n() == y.n();
    same.evidence = same.holds ? "model kind, baseline, fixed parameters and n agree"
                               : "systems differ in model or component count";
    r.checks.push_back(same);

    Check gen;
    gen.name = "shared_generator";
    gen.holds = x.generator == y.generator;
    gen.evidence = std::string(to_string(x.generator.family())) + "(" + fmt(x.generator.theta()) +
                   ") vs " + std::string(to_string(y.generator.family())) + "(" +
                   fmt(y.generator.theta()) + ")";
    r.checks.push_back(gen);
}

void add_generator_shape(ConditionReport& r, const Generator& g, bool want_concave,
                         const GridPolicy& grid) {
    const auto rep = classify_log_shape(g, grid.log_shape_t_max);
    Check c;
    c.name = want_concave ? "generator_log_concave" : "generator_log_convex";
    c.holds = rep.shape == LogShape::Both ||
              rep.shape == (want_concave ? LogShape::LogConcave : LogShape::LogConvex);
    c.value = want_concave ? rep.max_second : rep.min_second;
    c.evidence = std::string(to_string(rep.shape)) + "; (log psi)'' in [" + fmt(rep.min_second) +
                 ", " + fmt(rep.max_second) + "] on " + std::to_string(rep.grid_points) +
                 " points up to t=" + fmt(rep.t_max);
    r.checks.push_back(c);
}

void add_preorder(ConditionReport& r, preorders::Kind kind, const std::vector<double>& a,
                  const std::vector<double>& b, double tol) {
    run_check(r, std::string(preorders::to_string(kind)), [&](Check& c) {
        c.holds = preorders::holds(kind, a, b, tol);
        c.evidence = std::string("theta_X ") + (c.holds ? "" : "not ") +
                     std::string(preorders::to_string(kind)) + " theta_Y";
    });
}

void finish(ConditionReport& r, const SystemSpec& x, const SystemSpec& y, const GridPolicy& grid,
            bool throw_on_inconsistency) {
    r.overall = std::all_of(r.checks.begin(), r.checks.end(),
                            [](const Check& c) { return c.holds; });
    const auto xs = curve_grid(x, y, grid);
    const auto cx = curve(x, xs);
    const auto cy = curve(y, xs);
    r.dominance = compare_curves(cx, cy, grid.dominance_tol, grid.crossing_tol);
    r.inconsistent = r.overall && !r.dominance->x_dominates_or_ties();
    if (r.inconsistent && throw_on_inconsistency)
        throw InconsistencyError(r.theorem + ": hypotheses hold but grid verdict is " +
                                 std::string(to_string(r.dominance->relation)) +
                                 " (min gap " + fmt(r.dominance->min_gap) + ")");
}

void require_fixed_match(const SystemSpec& x, const SystemSpec& y, ModelKind kind,
                         const char* what) {
    require(x.model.kind() == kind && y.model.kind() == kind,
            std::string(what) + ": both systems must use the " +
                std::string(to_string(kind)) + " model");
    require(x.model.fixed() == y.model.fixed(),
            std::string(what) + ": fixed parameters differ between systems");
}

} // namespace

ConditionReport verify_theorem1(const SystemSpec& x, const SystemSpec& y, const GridPolicy& grid,
                                bool throw_on_inconsistency) {
    x.validate();
    y.validate();
    ConditionReport r;
    r.theorem = "t1";
    add_common_checks(r, x, y);
    add_generator_shape(r, x.generator, true, grid);
    try {
        const auto v = check_theorem1_condition2(x.model, shape_x_grid(x, y, grid),
                                                 log_theta_grid(x, y, grid), grid.shape_tol);
        add_shape_check(r, "condition2_decreasing", v.monotone);
        add_shape_check(r, "condition2_log_convex", v.log_convex);
    } catch (const ValidationError& e) {
        r.checks.push_back({"condition2", false, std::string("not applicable: ") + e.what(), 0});
    }
    add_preorder(r, preorders::Kind::PLarger, x.theta, y.theta, grid.preorder_tol);
    finish(r, x, y, grid, throw_on_inconsistency);
    return r;
}

ConditionReport verify_theorem2(const SystemSpec& x, const SystemSpec& y, const GridPolicy& grid,
                                bool throw_on_inconsistency) {
    x.validate();
    y.validate();
    ConditionReport r;
    r.theorem = "t2";
    add_common_checks(r, x, y);
    add_generator_shape(r, x.generator, false, grid);
    const auto v = check_theorem2_condition2(x.model, shape_x_grid(x, y, grid),
                                             theta_grid(x, y, grid), grid.shape_tol);
    add_shape_check(r, "condition2_increasing", v.monotone);
    add_shape_check(r, "condition2_log_convex", v.log_convex);
    add_preorder(r, preorders::Kind::ReciprocalMajorize, x.theta, y.theta, grid.preorder_tol);
    finish(r, x, y, grid, throw_on_inconsistency);
    return r;
}

ConditionReport verify_prop_mphrs(const SystemSpec& x, const SystemSpec& y,
                                  const GridPolicy& grid, bool throw_on_inconsistency) {
    x.validate();
    y.validate();
    require_fixed_match(x, y, ModelKind::MPHRS, "p-mphrs");
    const double alpha = x.model.fixed().alpha;
    require(alpha > 0.0 && alpha <= 1.0, "p-mphrs: alpha must be in (0, 1]");
    ConditionReport r;
    r.theorem = "p-mphrs";
    add_common_checks(r, x, y);
    add_generator_shape(r, x.generator, true, grid);
    const auto& b = x.model.baseline();
    add_shape_check(r, "baseline_dpfr", check_dpfr(b, default_x_grid(b, grid.x_points),
                                                   grid.shape_tol));
    add_preorder(r, preorders::Kind::PLarger, x.theta, y.theta, grid.preorder_tol);
    finish(r, x, y, grid, throw_on_inconsistency);
    return r;
}

ConditionReport verify_prop_ls(const SystemSpec& x, const SystemSpec& y, const GridPolicy& grid,
                               bool throw_on_inconsistency) {
    x.validate();
    y.validate();
    require_fixed_match(x, y, ModelKind::LS, "p-ls");
    ConditionReport r;
    r.theorem = "p-ls";
    add_common_checks(r, x, y);
    add_generator_shape(r, x.generator, true, grid);
    const auto& b = x.model.baseline();
    add_shape_check(r, "baseline_dpfr", check_dpfr(b, default_x_grid(b, grid.x_points),
                                                   grid.shape_tol));
    add_preorder(r, preorders::Kind::PLarger, x.theta, y.theta, grid.preorder_tol);
    finish(r, x, y, grid, throw_on_inconsistency);
    return r;
}

SchurProbe schur_condition_probe(const SystemSpec& sys, std::span<const std::pair<int, int>> pairs,
                                 std::span<const double> xs, double step) {
    sys.validate();
    require(step >= 1e-9 && step < 0.1, "schur probe: step must be in [1e-9, 0.1)");
    const int n = sys.n();
    for (double t : sys.theta) require(t > 0.0, "schur probe: parameters must be > 0");

    std::vector<std::pair<int, int>> all;
    if (pairs.empty()) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) all.emplace_back(p, q);
    } else {
        for (auto [p, q] : pairs) {
            require(p >= 0 && q >= 0 && p < n && q < n, "schur probe: pair index out of range");
            all.emplace_back(p, q);
        }
    }
    std::vector<double> grid;
    if (xs.empty())
        grid = default_grid(sys, 200);
    else
        grid.assign(xs.begin(), xs.end());

    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = std::log(sys.theta[i]);

    SchurProbe out;
    out.worst = std::numeric_limits<double>::infinity();
    SystemSpec work = sys;
    std::vector<double> d(n);
    for (double x : grid) {
        for (int i = 0; i < n; ++i) {
            const double h = step * std::max(1.0, std::abs(a[i]));
            work.theta[i] = std::exp(a[i] + h);
            const double up = survival_x2n(work, x);
            work.theta[i] = std::exp(a[i] - h);
            const double dn = survival_x2n(work, x);
            work.theta[i] = sys.theta[i];
            d[i] = (up - dn) / (2.0 * h);
        }
        for (auto [p, q] : all) {
            const double v = (a[p] - a[q]) * (d[p] - d[q]);
            if (v < out.worst) {
                out.worst = v;
                out.p = p;
                out.q = q;
                out.at_x = x;
            }
        }
    }
    if (all.empty()) out.worst = 0.0;
    return out;
}

} // namespace failsafe
