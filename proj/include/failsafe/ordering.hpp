#pragma once

// Usual-stochastic-order verdicts between fail-safe systems and verifiers for
// the sufficient conditions that imply them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "failsafe/generators.hpp"
#include "failsafe/models.hpp"
#include "failsafe/preorders.hpp"
#include "failsafe/systems.hpp"

namespace failsafe {

enum class Relation { XDominatesY, YDominatesX, Crossing, TiesWithinTol };

std::string_view to_string(Relation r);

inline constexpr double kDominanceTol = 1e-10;
inline constexpr double kCrossingTol = 1e-8;

struct DominanceVerdict {
    Relation relation = Relation::TiesWithinTol;
    double min_gap = 0.0;  // min of cx − cy
    double max_gap = 0.0;  // max of cx − cy
    // Bracketing x-intervals of significant sign changes (Crossing only).
    std::vector<std::pair<double, double>> crossings;
    // Gap dipped past tol on the minor side but stayed within the crossing tolerance.
    bool chatter = false;
    double tol = kDominanceTol;
    double crossing_tol = kCrossingTol;
    std::vector<double> xs;

    bool x_dominates_or_ties() const {
        return relation == Relation::XDominatesY || relation == Relation::TiesWithinTol;
    }
};

DominanceVerdict compare_curves(const SurvivalCurve& cx, const SurvivalCurve& cy,
                                double tol = kDominanceTol, double crossing_tol = kCrossingTol);

// Ratio cy/cx nondecreasing along the grid within 1e−9 (relative) slack.
bool hazard_ratio_monotone(const SurvivalCurve& cx, const SurvivalCurve& cy);

// Ranges and point counts shared by every hypothesis check and grid comparison.
struct GridPolicy {
    int x_points = 200;        // shape-check x grid
    int param_points = 100;    // shape-check parameter grid
    int curve_points = 1000;   // dominance grid
    double shape_tol = kShapeTol;
    double dominance_tol = kDominanceTol;
    double crossing_tol = kCrossingTol;
    double preorder_tol = preorders::kDefaultTol;
    double log_shape_t_max = kLogShapeTMax;
    // Overrides; empty means derive from the systems.
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> param_range;  // θ range (not log θ)
};

struct Check {
    std::string name;
    bool holds = false;
    std::string evidence;
    double value = 0.0;  // worst violation or similar signed evidence
};

struct ConditionReport {
    std::string theorem;  // t1, t2, p-mphrs, p-ls
    std::vector<Check> checks;
    bool overall = false;
    std::optional<DominanceVerdict> dominance;
    // Hypotheses pass but the grid does not show X ≥st Y.
    bool inconsistent = false;

    const Check* find(std::string_view name) const;
};

// Each verifier reports hypothesis checks, always evaluates both curves on the
// grid, and throws InconsistencyError (when `throw_on_inconsistency`) if the
// hypotheses pass while dominance fails.
ConditionReport verify_theorem1(const SystemSpec& x, const SystemSpec& y,
                                const GridPolicy& grid = {}, bool throw_on_inconsistency = true);
ConditionReport verify_theorem2(const SystemSpec& x, const SystemSpec& y,
                                const GridPolicy& grid = {}, bool throw_on_inconsistency = true);
ConditionReport verify_prop_mphrs(const SystemSpec& x, const SystemSpec& y,
                                  const GridPolicy& grid = {}, bool throw_on_inconsistency = true);
ConditionReport verify_prop_ls(const SystemSpec& x, const SystemSpec& y,
                               const GridPolicy& grid = {}, bool throw_on_inconsistency = true);

struct SchurProbe {
    double worst = 0.0;  // min over pairs and x of (a_p − a_q)(∂_p − ∂_q)
    int p = -1;
    int q = -1;
    double at_x = 0.0;
};

// Finite-difference partials of F̄_{X2:n}(x) in aᵢ = log θᵢ at the system's own
// θ, central differences with relative step `step`. `pairs` empty means all
// pairs; `xs` empty means the system's default grid with 200 points.
SchurProbe schur_condition_probe(const SystemSpec& sys,
                                 std::span<const std::pair<int, int>> pairs = {},
                                 std::span<const double> xs = {}, double step = 1e-5);

} // namespace failsafe
