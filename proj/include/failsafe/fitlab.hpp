#pragma once

// Lifetime-data pipeline: marginal maximum likelihood with AIC/BIC ranking,
// rank-based copula estimation, Cramér–von Mises bootstrap goodness of fit,
// and p-larger subset recommendation.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "failsafe/generators.hpp"
#include "failsafe/mcsim.hpp"
#include "failsafe/models.hpp"
#include "failsafe/ordering.hpp"

namespace failsafe::fitlab {

// ---- data ------------------------------------------------------------------

struct LifetimeDataset {
    std::vector<std::string> labels;          // component labels, in column order
    std::vector<std::string> groups;          // row ids (long format: cable)
    std::vector<std::vector<double>> cells;   // group × component, NaN when missing

    // Observed values of component j, in group order.
    std::vector<double> values(std::size_t j) const;

    std::size_t components() const { return labels.size(); }
    // Rows where every component has a value; one row per group.
    Matrix complete_rows() const;
    void validate(std::size_t min_per_component = 5) const;
};

// Long format `cable,wire,strength` (any column order, matched by name) or wide
// format with one column per component; detected from the header.
LifetimeDataset parse_csv(const std::string& text);
LifetimeDataset load_csv(const std::string& path);

// ---- marginal fits ---------------------------------------------------------

enum class FitFamily { Exponential, Gamma, Weibull, Burr };

std::string_view to_string(FitFamily f);
FitFamily fit_family_from_string(std::string_view name);
inline constexpr FitFamily kAllFitFamilies[] = {FitFamily::Exponential, FitFamily::Gamma,
                                                FitFamily::Weibull, FitFamily::Burr};

// Parameters follow Baseline: Exponential(rate), Gamma(shape, rate),
// Weibull(scale, shape), Burr(c, k, scale).
Baseline to_baseline(FitFamily f, const std::vector<double>& params);
int parameter_count(FitFamily f);

struct FitResult {
    FitFamily family = FitFamily::Exponential;
    std::vector<double> params;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    int k = 0;
    bool converged = false;
    std::vector<double> start_logliks;  // log-likelihood at each multi-start point
    std::uint64_t data_fingerprint = 0;
};

double aic(double loglik, int k);
double bic(double loglik, int k, std::size_t n);

inline constexpr int kMultiStarts = 5;
inline constexpr double kObjectiveTol = 1e-10;

FitResult mle_fit(FitFamily family, std::span<const double> data);

struct RankedFit {
    FitResult fit;
    double delta_aic = 0.0;
    double delta_bic = 0.0;
};

// Ascending AIC, ties broken by BIC. Throws if fits come from different data.
std::vector<RankedFit> rank_models(std::vector<FitResult> results);

// ---- copulas ---------------------------------------------------------------

// Column-wise average ranks divided by (rows + 1).
Matrix pseudo_observations(const Matrix& data);

// Kendall's tau-b in O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);
// Average of pairwise tau over all column pairs.
double average_kendall_tau(const Matrix& m);

// Frank: τ(θ) = 1 − 4/θ + 4 D₁(θ)/θ.
double frank_tau(double theta);
// θ attaining τ; throws ValidationError when τ is outside the family's range.
double invert_tau(GeneratorFamily family, double tau);

enum class CopulaMethod { TauInversion, PseudoLikelihood };

bool is_fit_copula_family(GeneratorFamily f);
// Log density of the copula at u (d = 2 for every family; any d for Clayton).
double copula_log_density(const Generator& g, std::span<const double> u);

double fit_copula(GeneratorFamily family, const Matrix& pseudo,
                  CopulaMethod method = CopulaMethod::TauInversion);

struct GofResult {
    GeneratorFamily family = GeneratorFamily::Clayton;
    double theta = 0.0;
    double statistic = 0.0;
    double p_value = 0.0;
    int boot_n = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultBootN = 200;

// Σᵢ (Cₙ(Uᵢ) − C_θ(Uᵢ))² with Cₙ the empirical copula of `pseudo`.
double cvm_statistic(const Generator& g, const Matrix& pseudo);

GofResult cvm_gof(GeneratorFamily family, const Matrix& pseudo, int boot_n, std::uint64_t seed,
                  CopulaMethod method = CopulaMethod::TauInversion);

// ---- subset recommendation -------------------------------------------------

struct Candidate {
    std::string name;
    std::vector<double> theta;
};

struct Certificate {
    std::string winner;
    std::string loser;
    bool p_larger = false;
    Relation grid_relation = Relation::TiesWithinTol;
    double min_gap = 0.0;
    bool theorem1_verified = false;
};

struct SubsetRecommendation {
    std::vector<std::string> maximal;
    std::vector<std::string> ranking;  // by number of candidates beaten, then name
    std::vector<Certificate> certificates;
    std::vector<std::pair<std::string, std::string>> incomparable;
    std::vector<std::pair<std::string, std::string>> ties;
};

// An edge a → b needs θ_a ⪰p θ_b and grid dominance of a over b; with
// `require_theorem` it additionally needs verify_theorem1 to pass.
SubsetRecommendation recommend_subset(std::span<const Candidate> candidates,
                                      const SemiParamModel& model, const Generator& generator,
                                      const GridPolicy& grid = {}, bool require_theorem = false);

} // namespace failsafe::fitlab
