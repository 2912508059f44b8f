#pragma once

// Monte-Carlo oracle: frailty sampling of Archimedean copulas, lifetimes by
// inverting the component survival functions, and empirical survival of the
// second-smallest lifetime.
//
// Random numbers: std::mt19937_64, uniforms (k >> 11)·2⁻⁵³ shifted off zero.
// Rows are generated in blocks of kBlockRows; block b is seeded with
// splitmix64(seed ⊕ splitmix64(b)), so results do not depend on threading.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "failsafe/generators.hpp"
#include "failsafe/systems.hpp"

namespace failsafe {

inline constexpr std::size_t kBlockRows = 4096;

std::uint64_t splitmix64(std::uint64_t x);

// Thin wrapper around mt19937_64 with the samplers the oracle needs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();      // in (0, 1)
    double exponential();  // unit rate
    double normal();       // polar method
    double gamma(double shape);  // unit scale, Marsaglia–Tsang
    // Positive stable with Laplace transform exp(−t^alpha), 0 < alpha ≤ 1.
    double positive_stable(double alpha);
    // Logarithmic series P(V = k) = −p^k / (k log(1−p)), 0 < p < 1.
    std::uint64_t log_series(double p);
    // Geometric on {1, 2, …}: P(V = k) = (1−q) q^(k−1), 0 ≤ q < 1.
    std::uint64_t geometric(double q);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

// Row-major count × n matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct SampleBatch {
    Matrix uniforms;
    std::uint64_t seed = 0;
    Generator generator = Generator::independence();
};

// True when frailty sampling exists for the generator.
bool supports_sampling(const Generator& g);

// Uᵢ = ψ(Eᵢ / V). Throws UnsupportedError for GumbelBarnett,
// GumbelHougaardTable1 and Ali–Mikhail–Haq with θ < 0.
SampleBatch sample_copula(const Generator& g, int n, std::size_t count, std::uint64_t seed);

// Xᵢ = F̄⁻¹(Uᵢ; θᵢ) by bisection to 1e−10 resolution in x.
Matrix sample_lifetimes(const SystemSpec& sys, std::size_t count, std::uint64_t seed);

// Smallest x with survival(x; θ) ≤ u, by bisection.
double inverse_survival(const SemiParamModel& m, double theta, double u);

std::vector<double> second_smallest(const Matrix& lifetimes);
double empirical_survival_x2n(const Matrix& lifetimes, double x);
// Same, from pre-extracted second-smallest values sorted ascending.
double empirical_survival_sorted(std::span<const double> sorted_second, double x);

// CSV with header x1,...,xn and 17 significant digits.
void write_matrix_csv(const Matrix& m, const std::string& path);

} // namespace failsafe
