#include "failsafe/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "failsafe/error.hpp"
#include "failsafe/fileio.hpp"

namespace failsafe {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
    for (;;) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double Rng::gamma(double shape) {
    require(shape > 0.0, "gamma sampler: shape must be > 0");
    if (shape < 1.0) {
        // Boost to shape + 1 and rescale by U^(1/shape).
        const double g = gamma(shape + 1.0);
        return g * std::exp(std::log(uniform()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::positive_stable(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "stable sampler: alpha must be in (0, 1]");
    if (alpha == 1.0) return 1.0;
    // Kanter's representation (Chambers–Mallows–Stuck with skewness 1).
    const double u = std::numbers::pi * uniform();
    const double e = exponential();
    const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return a * b;
}

std::uint64_t Rng::log_series(double p) {
    require(p > 0.0 && p < 1.0, "log-series sampler: p must be in (0, 1)");
    // Kemp's LK algorithm.
    const double v = uniform();
    if (v >= p) return 1;
    const double q = -std::expm1(uniform() * std::log1p(-p));
    if (v <= q * q) return static_cast<std::uint64_t>(std::floor(1.0 + std::log(v) / std::log(q)));
    return v <= q ? 2 : 1;
}

std::uint64_t Rng::geometric(double q) {
    require(q >= 0.0 && q < 1.0, "geometric sampler: q must be in [0, 1)");
    if (q == 0.0) return 1;
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(uniform()) / std::log(q)));
}

bool supports_sampling(const Generator& g) {
    switch (g.family()) {
    case GeneratorFamily::Independence:
    case GeneratorFamily::Clayton:
    case GeneratorFamily::GumbelTable3:
    case GeneratorFamily::Frank: return true;
    case GeneratorFamily::AliMikhailHaq: return g.theta() >= 0.0;
    default: return false;
    }
}

namespace {

double frailty(const Generator& g, Rng& rng) {
    const double th = g.theta();
    switch (g.family()) {
    case GeneratorFamily::Independence: return 1.0;
    case GeneratorFamily::Clayton: return th * rng.gamma(1.0 / th);
    case GeneratorFamily::GumbelTable3: return rng.positive_stable(1.0 / th);
    case GeneratorFamily::Frank: return static_cast<double>(rng.log_series(-std::expm1(-th)));
    case GeneratorFamily::AliMikhailHaq: return static_cast<double>(rng.geometric(th));
    default: break;
    }
    throw UnsupportedError("no frailty sampler for this generator");
}

template <class RowFn>
void for_each_block(std::size_t count, std::uint64_t seed, RowFn&& fn) {
    const std::size_t blocks = (count + kBlockRows - 1) / kBlockRows;
    for (std::size_t b = 0; b < blocks; ++b) {
        Rng rng(splitmix64(seed ^ splitmix64(b)));
        const std::size_t end = std::min(count, (b + 1) * kBlockRows);
        for (std::size_t i = b * kBlockRows; i < end; ++i) fn(i, rng);
    }
}

} // namespace

SampleBatch sample_copula(const Generator& g, int n, std::size_t count, std::uint64_t seed) {
    require(n >= 1, "sample_copula: n must be >= 1");
    require(count >= 1, "sample_copula: count must be >= 1");
    if (!supports_sampling(g))
        throw UnsupportedError("frailty sampling is not available for " +
                               std::string(to_string(g.family())) + "(" +
                               std::to_string(g.theta()) +
                               "); supported: Independence, Clayton, GumbelTable3, Frank, "
                               "AliMikhailHaq with theta in [0, 1)");
    SampleBatch batch;
    batch.seed = seed;
    batch.generator = g;
    batch.uniforms.rows = count;
    batch.uniforms.cols = static_cast<std::size_t>(n);
    batch.uniforms.data.resize(count * static_cast<std::size_t>(n));
    for_each_block(count, seed, [&](std::size_t i, Rng& rng) {
        const double v = frailty(g, rng);
        for (int j = 0; j < n; ++j) {
            double u = g.psi(rng.exponential() / v);
            // Keep strictly inside (0, 1).
            u = std::clamp(u, 1e-300, std::nextafter(1.0, 0.0));
            batch.uniforms(i, static_cast<std::size_t>(j)) = u;
        }
    });
    return batch;
}

double inverse_survival(const SemiParamModel& m, double theta, double u) {
    require(u > 0.0 && u < 1.0, "inverse_survival: u must be in (0, 1)");
    const double target = std::log(u);
    double lo = m.support_start(theta);
    double hi = std::max(2.0 * lo, lo + 1.0);
    while (m.log_survival(hi, theta) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("inverse_survival: bracket failure");
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (m.log_survival(mid, theta) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Matrix sample_lifetimes(const SystemSpec& sys, std::size_t count, std::uint64_t seed) {
    sys.validate();
    auto batch = sample_copula(sys.generator, sys.n(), count, seed);
    Matrix out = std::move(batch.uniforms);
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j)
            out(i, j) = inverse_survival(sys.model, sys.theta[j], out(i, j));
    return out;
}

std::vector<double> second_smallest(const Matrix& lifetimes) {
    require(lifetimes.rows >= 1 && lifetimes.cols >= 2,
            "second_smallest: need at least one row and two columns");
    std::vector<double> out(lifetimes.rows);
    for (std::size_t i = 0; i < lifetimes.rows; ++i) {
        double m1 = std::numeric_limits<double>::infinity(), m2 = m1;
        for (double v : lifetimes.row(i)) {
            if (v < m1) {
                m2 = m1;
                m1 = v;
            } else if (v < m2) {
                m2 = v;
            }
        }
        out[i] = m2;
    }
    return out;
}

double empirical_survival_sorted(std::span<const double> sorted_second, double x) {
    require(!sorted_second.empty(), "empirical survival: no samples");
    const auto it = std::upper_bound(sorted_second.begin(), sorted_second.end(), x);
    return static_cast<double>(sorted_second.end() - it) /
           static_cast<double>(sorted_second.size());
}

double empirical_survival_x2n(const Matrix& lifetimes, double x) {
    auto s = second_smallest(lifetimes);
    std::sort(s.begin(), s.end());
    return empirical_survival_sorted(s, x);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
    std::string out;
    for (std::size_t j = 0; j < m.cols; ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j + 1);
    }
    out += '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace failsafe
