#pragma once

// Baseline lifetime distributions and semi-parametric families F̄(x; θ).
//
// Baselines (all parameters > 0):
//   Exponential(rate)            F̄ = exp(−rate·x)
//   Weibull(a, b)                F̄ = exp(−(x/a)^b)
//   ExpWeibull(α, β)             F  = (1 − exp(−x^α))^β
//   Burr(c, k[, s])              F̄ = (1 + (x/s)^c)^(−k), s = 1 when omitted
//   GeneralizedPareto(α)         F̄ = (1 + αx)^(−1/α)
//   GeneralizedGamma(p, q)       f = p x^(q−1) exp(−x^p) / Γ(q/p)
//   Gamma(shape, rate)
//
// Semi-parametric kinds:
//   Scale     F̄(θx)                        θ > 0
//   PHR       F̄(x)^θ                       θ > 0
//   Location  F̄(x − θ)                     θ real
//   MPHRS     αG / (1 − (1−α)G), G = F̄(xμ)^λ, μ = θ > 0
//   LS        F̄(θ(x − λ)) for x > λ        θ > 0
// SPH, MPHR and PO are MPHRS with α = 1, μ = 1, and μ = λ = 1 respectively.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace failsafe {

// Survival values below this are treated as zero wherever logs are taken.
inline constexpr double kSurvivalFloor = 1e-300;

enum class BaselineFamily {
    Exponential,
    Weibull,
    ExpWeibull,
    Burr,
    GeneralizedPareto,
    GeneralizedGamma,
    Gamma,
};

std::string_view to_string(BaselineFamily family);
BaselineFamily baseline_family_from_string(std::string_view name);

class Baseline {
  public:
    Baseline(BaselineFamily family, std::vector<double> params);

    BaselineFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

    double log_sf(double x) const;
    double sf(double x) const;
    double cdf(double x) const;
    double log_pdf(double x) const;
    double pdf(double x) const;
    double hazard(double x) const;
    double quantile(double p) const;

    bool operator==(const Baseline& other) const = default;

  private:
    BaselineFamily family_;
    std::vector<double> params_;
};

enum class ModelKind { Scale, PHR, Location, MPHRS, LS };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct FixedParams {
    double alpha = 1.0;   // MPHRS tilt
    double lambda = 1.0;  // MPHRS power, LS location
    bool operator==(const FixedParams& other) const = default;
};

class SemiParamModel {
  public:
    SemiParamModel(ModelKind kind, Baseline baseline, FixedParams fixed = {});

    ModelKind kind() const { return kind_; }
    const Baseline& baseline() const { return baseline_; }
    const FixedParams& fixed() const { return fixed_; }

    // Throws ValidationError when θ is outside the kind's domain.
    void validate_theta(double theta) const;

    double log_survival(double x, double theta) const;
    double survival(double x, double theta) const;
    // Smallest x with survival ≤ 1 − p, by bisection.
    double quantile(double p, double theta) const;
    // Left end of the support (survival is 1 below it).
    double support_start(double theta) const;

    bool operator==(const SemiParamModel& other) const = default;

  private:
    ModelKind kind_;
    Baseline baseline_;
    FixedParams fixed_;
};

enum class ShapeProperty {
    DFR,
    DPFR,
    DecreasingInLogTheta,
    LogConvexInLogTheta,
    IncreasingInTheta,
    LogConvexInTheta,
};

std::string_view to_string(ShapeProperty property);

inline constexpr double kShapeTol = 1e-9;

// holds ⇔ worst_violation ≤ tol. Violations are scaled by max(1, |value|).
struct ShapeVerdict {
    ShapeProperty property = ShapeProperty::DFR;
    bool holds = false;
    double worst_violation = 0.0;
    double at_x = 0.0;      // where the worst violation occurred
    double at_param = 0.0;  // parameter coordinate, when applicable
    double tol = kShapeTol;
    std::string probe;
};

// Both halves of a condition (ii): monotonicity and log-convexity.
struct ConditionTwoVerdict {
    ShapeVerdict monotone;
    ShapeVerdict log_convex;
    bool holds() const { return monotone.holds && log_convex.holds; }
};

// 200 log-spaced points on [q(0.001), q(0.999)] of the baseline.
std::vector<double> default_x_grid(const Baseline& b, int points = 200);
std::vector<double> linspace(double lo, double hi, int points);
std::vector<double> logspace(double lo, double hi, int points);

// Hazard h = f/F̄ nonincreasing on the grid.
ShapeVerdict check_dfr(const Baseline& b, std::span<const double> x_grid,
                       double tol = kShapeTol);
// x·h(x) nonincreasing on the grid.
ShapeVerdict check_dpfr(const Baseline& b, std::span<const double> x_grid,
                        double tol = kShapeTol);

// F̄(x; eᵃ) decreasing and log-convex in a, for every x in the grid.
ConditionTwoVerdict check_theorem1_condition2(const SemiParamModel& m,
                                              std::span<const double> x_grid,
                                              std::span<const double> a_grid,
                                              double tol = kShapeTol);
// F̄(x; θ) increasing and log-convex in θ, for every x in the grid.
ConditionTwoVerdict check_theorem2_condition2(const SemiParamModel& m,
                                              std::span<const double> x_grid,
                                              std::span<const double> theta_grid,
                                              double tol = kShapeTol);

} // namespace failsafe
