#include "failsafe/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "failsafe/error.hpp"

namespace failsafe {

void SystemSpec::validate() const {
    require(theta.size() >= 2, "system: need n >= 2 components");
    for (double t : theta) model.validate_theta(t);
}

namespace {

// φ(F̄(x;θᵢ)) per component, with survivals clipped at the floor.
// Returns false when every component is below the floor.
bool phi_terms(const SystemSpec& sys, double x, std::vector<double>& out) {
    require(std::isfinite(x) && x >= 0.0, "survival: x must be finite and >= 0");
    sys.validate();
    out.resize(sys.theta.size());
    bool any_alive = false;
    for (std::size_t i = 0; i < sys.theta.size(); ++i) {
        double u = sys.model.survival(x, sys.theta[i]);
        if (u >= kSurvivalFloor) any_alive = true;
        u = std::max(u, kSurvivalFloor);
        out[i] = sys.generator.phi(u);
    }
    return any_alive;
}

double clamp_unit(double v) {
    if (v < 0.0 && v > -1e-10) return 0.0;
    if (v > 1.0 && v < 1.0 + 1e-10) return 1.0;
    return v;
}

} // namespace

double survival_x2n(const SystemSpec& sys, double x) {
    std::vector<double> phis;
    if (!phi_terms(sys, x, phis)) return 0.0;
    const double total = std::accumulate(phis.begin(), phis.end(), 0.0);
    const auto& g = sys.generator;
    double s = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        // Leave-one-out sums are formed directly: φ can overflow to +inf.
        double rest = 0.0;
        for (std::size_t j = 0; j < phis.size(); ++j)
            if (j != i) rest += phis[j];
        s += g.psi(rest);
    }
    s -= static_cast<double>(phis.size() - 1) * g.psi(total);
    return clamp_unit(s);
}

double survival_x1n(const SystemSpec& sys, double x) {
    std::vector<double> phis;
    if (!phi_terms(sys, x, phis)) return 0.0;
    return sys.generator.psi(std::accumulate(phis.begin(), phis.end(), 0.0));
}

double homogeneous_survival_x2n(const SemiParamModel& model, const Generator& g, int n,
                                double theta, double x) {
    require(n >= 2, "homogeneous survival: n must be >= 2");
    require(std::isfinite(x) && x >= 0.0, "survival: x must be finite and >= 0");
    const double u = model.survival(x, theta);
    if (u < kSurvivalFloor) return 0.0;
    const double p = g.phi(u);
    return clamp_unit(n * g.psi((n - 1) * p) - (n - 1) * g.psi(n * p));
}

double geometric_mean(std::span<const double> theta) {
    require(!theta.empty(), "geometric mean: empty vector");
    double s = 0.0;
    for (double t : theta) {
        require(t > 0.0, "geometric mean: entries must be > 0");
        s += std::log(t);
    }
    return std::exp(s / static_cast<double>(theta.size()));
}

double harmonic_mean(std::span<const double> theta) {
    require(!theta.empty(), "harmonic mean: empty vector");
    double s = 0.0;
    for (double t : theta) {
        require(t > 0.0, "harmonic mean: entries must be > 0");
        s += 1.0 / t;
    }
    return static_cast<double>(theta.size()) / s;
}

double lower_bound_plarger(const SystemSpec& sys, double x) {
    sys.validate();
    return homogeneous_survival_x2n(sys.model, sys.generator, sys.n(), geometric_mean(sys.theta),
                                    x);
}

double lower_bound_rm(const SystemSpec& sys, double x) {
    sys.validate();
    return homogeneous_survival_x2n(sys.model, sys.generator, sys.n(), harmonic_mean(sys.theta),
                                    x);
}

SurvivalCurve curve(const SystemSpec& sys, std::span<const double> xs) {
    require(!xs.empty(), "curve: empty grid");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(std::isfinite(xs[i]) && xs[i] > 0.0, "curve: grid points must be positive");
        if (i > 0) require(xs[i] > xs[i - 1], "curve: grid must be strictly increasing");
    }
    SurvivalCurve c;
    c.xs.assign(xs.begin(), xs.end());
    c.values.reserve(xs.size());
    for (double x : xs) c.values.push_back(survival_x2n(sys, x));
    for (std::size_t i = 1; i < c.values.size(); ++i)
        if (c.values[i] > c.values[i - 1] + 1e-10)
            throw NumericError("curve: survival increases at x = " + std::to_string(c.xs[i]));
    return c;
}

double mixture_quantile(std::span<const SystemSpec* const> systems, double p) {
    require(!systems.empty(), "mixture quantile: no systems");
    require(p > 0.0 && p < 1.0, "mixture quantile: p must be in (0, 1)");
    std::size_t count = 0;
    for (const auto* s : systems) {
        s->validate();
        count += s->theta.size();
    }
    auto mix_sf = [&](double x) {
        double acc = 0.0;
        for (const auto* s : systems)
            for (double t : s->theta) acc += s->model.survival(x, t);
        return acc / static_cast<double>(count);
    };
    // The mixture quantile lies between the smallest and largest component quantiles.
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto* s : systems)
        for (double t : s->theta) {
            const double q = s->model.quantile(p, t);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    const double target = 1.0 - p;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mix_sf(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::vector<double> default_grid(std::span<const SystemSpec* const> systems, int points) {
    double lo = mixture_quantile(systems, 0.001);
    const double hi = mixture_quantile(systems, 0.999);
    if (lo <= 0.0) lo = hi * 1e-6;
    require(hi > lo, "default grid: degenerate quantile range");
    return logspace(lo, hi, points);
}

std::vector<double> default_grid(const SystemSpec& sys, int points) {
    const SystemSpec* one[] = {&sys};
    return default_grid(one, points);
}

} // namespace failsafe
