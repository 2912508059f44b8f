#pragma once

// Archimedean generators ψ with pseudo-inverse φ = ψ⁻¹.
//
//   family                 ψ(t)                                   θ range
//   Independence           exp(−t)                                 —
//   Clayton                (θt + 1)^(−1/θ)                         (0, ∞)
//   GumbelTable3           exp(−t^(1/θ))                           [1, ∞)
//   Frank                  −(1/θ) log(1 + (e^(−θ) − 1) e^(−t))     (0, ∞)
//   AliMikhailHaq          (1 − θ)/(e^t − θ)                       [−1, 1)
//   GumbelBarnett          exp((1 − e^t)/θ)                        (0, 1]
//   GumbelHougaardTable1   exp(1 − (1 + t)^θ)                      (1, ∞)

#include <span>
#include <string>
#include <string_view>

namespace failsafe {

enum class GeneratorFamily {
    Independence,
    Clayton,
    GumbelTable3,
    Frank,
    AliMikhailHaq,
    GumbelBarnett,
    GumbelHougaardTable1,
};

std::string_view to_string(GeneratorFamily family);
GeneratorFamily generator_family_from_string(std::string_view name);

// Which published catalog an Ali–Mikhail–Haq parameter falls in.
enum class AmhBranch { NotAmh, LogConcaveBranch, LogConvexBranch, BothBranches };

class Generator {
  public:
    // Validates the parameter range and probes ψ(0)=1 and monotone decrease.
    Generator(GeneratorFamily family, double theta = 0.0);

    static Generator independence() { return Generator(GeneratorFamily::Independence); }

    GeneratorFamily family() const { return family_; }
    double theta() const { return theta_; }
    AmhBranch amh_branch() const;

    double psi(double t) const;
    double phi(double u) const;
    double psi_prime(double t) const;
    double log_psi(double t) const;
    // Closed-form d²/dt² log ψ(t).
    double log_psi_second_derivative(double t) const;

    // C(u₁,…,uₙ) = ψ(Σ φ(uᵢ)).
    double copula(std::span<const double> u) const;

    bool operator==(const Generator& other) const {
        return family_ == other.family_ && theta_ == other.theta_;
    }

  private:
    double psi_unchecked(double t) const;
    double phi_unchecked(double u) const;

    GeneratorFamily family_;
    double theta_;
};

enum class LogShape { LogConcave, LogConvex, Both, Neither };

std::string_view to_string(LogShape shape);

struct LogShapeReport {
    LogShape shape = LogShape::Neither;
    double max_second = 0.0;  // max of d²/dt² log ψ on the probe grid
    double min_second = 0.0;  // min of d²/dt² log ψ on the probe grid
    double t_max = 0.0;
    int grid_points = 0;
};

inline constexpr double kLogShapeTMax = 50.0;
inline constexpr int kLogShapePoints = 200;
inline constexpr double kLogShapeTol = 1e-9;

// Sign-classifies d²/dt² log ψ on a log-spaced grid in (1e−6, t_max].
LogShapeReport classify_log_shape(const Generator& g, double t_max = kLogShapeTMax,
                                  int grid_points = kLogShapePoints,
                                  double tol = kLogShapeTol);

// Central second difference of log ψ at t with relative step `rel_step`; the
// finite-difference counterpart of log_psi_second_derivative.
double log_psi_second_difference(const Generator& g, double t, double rel_step = 1e-5);

} // namespace failsafe
