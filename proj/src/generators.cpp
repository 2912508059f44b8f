#include "failsafe/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "failsafe/error.hpp"

namespace failsafe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string_view s) {
    std::string out;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

// log1p(w) − w without cancellation for small |w|.
double log1p_minus_identity(double w) {
    if (std::abs(w) < 1e-3) {
        const double w2 = w * w;
        return -w2 / 2.0 + w2 * w / 3.0 - w2 * w2 / 4.0 + w2 * w2 * w / 5.0;
    }
    return std::log1p(w) - w;
}

} // namespace

std::string_view to_string(GeneratorFamily family) {
    switch (family) {
    case GeneratorFamily::Independence: return "Independence";
    case GeneratorFamily::Clayton: return "Clayton";
    case GeneratorFamily::GumbelTable3: return "GumbelTable3";
    case GeneratorFamily::Frank: return "Frank";
    case GeneratorFamily::AliMikhailHaq: return "AliMikhailHaq";
    case GeneratorFamily::GumbelBarnett: return "GumbelBarnett";
    case GeneratorFamily::GumbelHougaardTable1: return "GumbelHougaardTable1";
    }
    return "?";
}

GeneratorFamily generator_family_from_string(std::string_view name) {
    const std::string key = lower(name);
    if (key == "independence" || key == "product") return GeneratorFamily::Independence;
    if (key == "clayton") return GeneratorFamily::Clayton;
    if (key == "gumbeltable3" || key == "gumbel") return GeneratorFamily::GumbelTable3;
    if (key == "frank") return GeneratorFamily::Frank;
    if (key == "alimikhailhaq" || key == "amh") return GeneratorFamily::AliMikhailHaq;
    if (key == "gumbelbarnett") return GeneratorFamily::GumbelBarnett;
    if (key == "gumbelhougaardtable1" || key == "gumbelhougaard")
        return GeneratorFamily::GumbelHougaardTable1;
    throw ValidationError("unknown generator family: " + std::string(name));
}

std::string_view to_string(LogShape shape) {
    switch (shape) {
    case LogShape::LogConcave: return "LogConcave";
    case LogShape::LogConvex: return "LogConvex";
    case LogShape::Both: return "Both";
    case LogShape::Neither: return "Neither";
    }
    return "?";
}

Generator::Generator(GeneratorFamily family, double theta) : family_(family), theta_(theta) {
    const std::string name(to_string(family));
    if (family == GeneratorFamily::Independence) {
        theta_ = 0.0;
    } else {
        require(std::isfinite(theta), name + ": parameter must be finite");
    }
    switch (family) {
    case GeneratorFamily::Independence: break;
    case GeneratorFamily::Clayton:
    case GeneratorFamily::Frank:
        require(theta > 0.0, name + ": theta must be in (0, inf)");
        break;
    case GeneratorFamily::GumbelTable3:
        require(theta >= 1.0, name + ": theta must be in [1, inf)");
        break;
    case GeneratorFamily::AliMikhailHaq:
        require(theta >= -1.0 && theta < 1.0, name + ": theta must be in [-1, 1)");
        break;
    case GeneratorFamily::GumbelBarnett:
        require(theta > 0.0 && theta <= 1.0, name + ": theta must be in (0, 1]");
        break;
    case GeneratorFamily::GumbelHougaardTable1:
        require(theta > 1.0, name + ": theta must be in (1, inf)");
        break;
    }

    // Boundary condition and monotone decrease on a probe grid.
    require(std::abs(psi_unchecked(0.0) - 1.0) <= 1e-15, name + ": psi(0) != 1");
    double prev = 1.0;
    for (int k = 0; k <= 60; ++k) {
        const double t = 1e-4 * std::pow(10.0, k / 10.0);
        const double v = psi_unchecked(t);
        require(v >= 0.0 && v <= prev * (1.0 + 1e-14), name + ": psi is not decreasing");
        prev = v;
    }
}

AmhBranch Generator::amh_branch() const {
    if (family_ != GeneratorFamily::AliMikhailHaq) return AmhBranch::NotAmh;
    if (theta_ == 0.0) return AmhBranch::BothBranches;
    return theta_ < 0.0 ? AmhBranch::LogConcaveBranch : AmhBranch::LogConvexBranch;
}

double Generator::psi_unchecked(double t) const {
    if (t == kInf) return 0.0;
    if (t == 0.0) return 1.0;
    const double th = theta_;
    switch (family_) {
    case GeneratorFamily::Independence: return std::exp(-t);
    case GeneratorFamily::Clayton: return std::exp(-std::log1p(th * t) / th);
    case GeneratorFamily::GumbelTable3: return std::exp(-std::pow(t, 1.0 / th));
    case GeneratorFamily::Frank: return -std::log1p(std::expm1(-th) * std::exp(-t)) / th;
    case GeneratorFamily::AliMikhailHaq: return (1.0 - th) / (std::exp(t) - th);
    case GeneratorFamily::GumbelBarnett: return std::exp(-std::expm1(t) / th);
    case GeneratorFamily::GumbelHougaardTable1:
        return std::exp(-std::expm1(th * std::log1p(t)));
    }
    return 0.0;
}

double Generator::phi_unchecked(double u) const {
    const double th = theta_;
    const double lu = std::log(u);
    switch (family_) {
    case GeneratorFamily::Independence: return -lu;
    case GeneratorFamily::Clayton: return std::expm1(-th * lu) / th;
    case GeneratorFamily::GumbelTable3: return std::pow(-lu, th);
    case GeneratorFamily::Frank: return -std::log(std::expm1(-th * u) / std::expm1(-th));
    case GeneratorFamily::AliMikhailHaq: return std::log1p(-th * (1.0 - u)) - lu;
    case GeneratorFamily::GumbelBarnett: return std::log1p(-th * lu);
    case GeneratorFamily::GumbelHougaardTable1: return std::expm1(std::log1p(-lu) / th);
    }
    return 0.0;
}

double Generator::psi(double t) const {
    require(t >= 0.0, "psi: t must be >= 0");
    return psi_unchecked(t);
}

double Generator::phi(double u) const {
    require(u > 0.0 && u <= 1.0, "phi: u must be in (0, 1]");
    if (u == 1.0) return 0.0;
    return std::max(0.0, phi_unchecked(u));
}

double Generator::log_psi(double t) const {
    require(t >= 0.0, "log_psi: t must be >= 0");
    const double th = theta_;
    switch (family_) {
    case GeneratorFamily::Independence: return -t;
    case GeneratorFamily::Clayton: return -std::log1p(th * t) / th;
    case GeneratorFamily::GumbelTable3: return -std::pow(t, 1.0 / th);
    case GeneratorFamily::GumbelBarnett: return -std::expm1(t) / th;
    case GeneratorFamily::GumbelHougaardTable1: return -std::expm1(th * std::log1p(t));
    case GeneratorFamily::AliMikhailHaq:
        // log(1−θ) − t − log(1 − θe^(−t))
        return std::log1p(-th) - t - std::log1p(-th * std::exp(-t));
    case GeneratorFamily::Frank: return std::log(psi_unchecked(t));
    }
    return 0.0;
}

double Generator::psi_prime(double t) const {
    require(t >= 0.0, "psi_prime: t must be >= 0");
    const double th = theta_;
    switch (family_) {
    case GeneratorFamily::Independence: return -std::exp(-t);
    case GeneratorFamily::Clayton: return -std::exp((-1.0 / th - 1.0) * std::log1p(th * t));
    case GeneratorFamily::GumbelTable3: {
        if (t == 0.0) return th == 1.0 ? -1.0 : -kInf;
        const double s = std::pow(t, 1.0 / th);
        return -(s / (th * t)) * std::exp(-s);
    }
    case GeneratorFamily::Frank: {
        const double w = std::expm1(-th) * std::exp(-t);
        return w / (th * (1.0 + w));
    }
    case GeneratorFamily::AliMikhailHaq: {
        const double e = std::exp(-t);
        const double d = 1.0 - th * e;
        return -(1.0 - th) * e / (d * d);
    }
    case GeneratorFamily::GumbelBarnett: return -(std::exp(t) / th) * psi_unchecked(t);
    case GeneratorFamily::GumbelHougaardTable1:
        return -th * std::pow(1.0 + t, th - 1.0) * psi_unchecked(t);
    }
    return 0.0;
}

double Generator::log_psi_second_derivative(double t) const {
    require(t >= 0.0, "log_psi_second_derivative: t must be >= 0");
    const double th = theta_;
    switch (family_) {
    case GeneratorFamily::Independence: return 0.0;
    case GeneratorFamily::Clayton: {
        const double d = 1.0 + th * t;
        return th / (d * d);
    }
    case GeneratorFamily::GumbelTable3:
        if (th == 1.0) return 0.0;
        if (t == 0.0) return kInf;
        return (1.0 / th) * (1.0 - 1.0 / th) * std::pow(t, 1.0 / th - 2.0);
    case GeneratorFamily::Frank: {
        const double w = std::expm1(-th) * std::exp(-t);
        if (w == 0.0) return 0.0;
        const double g = std::log1p(w);
        const double q = (1.0 + w) * g;
        return w * log1p_minus_identity(w) / (q * q);
    }
    case GeneratorFamily::AliMikhailHaq: {
        const double e = std::exp(-t);
        const double d = 1.0 - th * e;
        return th * e / (d * d);
    }
    case GeneratorFamily::GumbelBarnett: return -std::exp(t) / th;
    case GeneratorFamily::GumbelHougaardTable1:
        return -th * (th - 1.0) * std::pow(1.0 + t, th - 2.0);
    }
    return 0.0;
}

double Generator::copula(std::span<const double> u) const {
    require(!u.empty(), "copula: empty argument");
    double total = 0.0;
    for (double v : u) {
        require(v > 0.0 && v <= 1.0, "copula: arguments must be in (0, 1]");
        total += phi(v);
    }
    return psi_unchecked(total);
}

LogShapeReport classify_log_shape(const Generator& g, double t_max, int grid_points, double tol) {
    constexpr double t_min = 1e-6;
    require(std::isfinite(t_max) && t_max > t_min, "classify_log_shape: t_max must exceed 1e-6");
    require(grid_points >= 50, "classify_log_shape: need at least 50 grid points");
    require(tol >= 0.0, "classify_log_shape: tolerance must be >= 0");

    LogShapeReport report;
    report.t_max = t_max;
    report.grid_points = grid_points;
    report.max_second = -kInf;
    report.min_second = kInf;
    const double lo = std::log(t_min), hi = std::log(t_max);
    for (int k = 0; k < grid_points; ++k) {
        const double t = std::exp(lo + (hi - lo) * k / (grid_points - 1));
        const double d2 = g.log_psi_second_derivative(t);
        report.max_second = std::max(report.max_second, d2);
        report.min_second = std::min(report.min_second, d2);
    }
    const bool concave = report.max_second <= tol;
    const bool convex = report.min_second >= -tol;
    if (concave && convex)
        report.shape = LogShape::Both;
    else if (concave)
        report.shape = LogShape::LogConcave;
    else if (convex)
        report.shape = LogShape::LogConvex;
    else
        report.shape = LogShape::Neither;
    return report;
}

double log_psi_second_difference(const Generator& g, double t, double rel_step) {
    require(t > 0.0 && rel_step > 0.0 && rel_step < 1.0,
            "log_psi_second_difference: need t > 0 and 0 < rel_step < 1");
    const double h = rel_step * t;
    return (g.log_psi(t + h) - 2.0 * g.log_psi(t) + g.log_psi(t - h)) / (h * h);
}

} // namespace failsafe
