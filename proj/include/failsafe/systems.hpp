#pragma once

// Survival of the smallest and second-smallest lifetimes of n dependent
// components whose joint survival is C(F̄(x;θ₁), …, F̄(x;θₙ)) for an
// Archimedean copula C.
//
//   F̄_{X1:n}(x) = ψ(T),  T = Σ φ(F̄(x;θᵢ))
//   F̄_{X2:n}(x) = Σᵢ ψ(T − φ(F̄(x;θᵢ))) − (n−1) ψ(T)

#include <span>
#include <vector>

#include "failsafe/generators.hpp"
#include "failsafe/models.hpp"

namespace failsafe {

struct SystemSpec {
    SemiParamModel model;
    std::vector<double> theta;
    Generator generator;

    int n() const { return static_cast<int>(theta.size()); }
    // n ≥ 2 and every θᵢ in the model's domain.
    void validate() const;
};

struct SurvivalCurve {
    std::vector<double> xs;
    std::vector<double> values;
};

double survival_x2n(const SystemSpec& sys, double x);
double survival_x1n(const SystemSpec& sys, double x);

// n·ψ((n−1)φ(F̄)) − (n−1)·ψ(n·φ(F̄)) for n components sharing θ.
double homogeneous_survival_x2n(const SemiParamModel& model, const Generator& g, int n,
                                double theta, double x);

double geometric_mean(std::span<const double> theta);
double harmonic_mean(std::span<const double> theta);

// Homogeneous survival at θ* = geometric mean (p-larger bound).
double lower_bound_plarger(const SystemSpec& sys, double x);
// Homogeneous survival at θ* = harmonic mean (reciprocal-majorization bound).
double lower_bound_rm(const SystemSpec& sys, double x);

// xs strictly increasing and positive; throws NumericError if the result is
// not nonincreasing within 1e−10.
SurvivalCurve curve(const SystemSpec& sys, std::span<const double> xs);

// Quantile of the equal-weight mixture of the component laws of all systems.
double mixture_quantile(std::span<const SystemSpec* const> systems, double p);

// `points` log-spaced points on [q(0.001), q(0.999)] of the component mixture.
std::vector<double> default_grid(std::span<const SystemSpec* const> systems, int points = 1000);
std::vector<double> default_grid(const SystemSpec& sys, int points = 1000);

} // namespace failsafe
