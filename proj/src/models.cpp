#include "failsafe/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "failsafe/error.hpp"

namespace failsafe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogFloor = std::log(kSurvivalFloor);

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::size_t expected_params(BaselineFamily f) {
    switch (f) {
    case BaselineFamily::Exponential:
    case BaselineFamily::GeneralizedPareto: return 1;
    default: return 2;
    }
}

// log(−log1p(−e^(−s))) for s > 0, stable in the tail.
double log_neg_log1m_exp(double s) {
    if (s > 700.0) return -s;
    return std::log(-std::log1p(-std::exp(-s)));
}

void require_grid(std::span<const double> g, const char* what, std::size_t min_points) {
    require(g.size() >= min_points, std::string(what) + ": too few grid points");
    for (std::size_t i = 0; i < g.size(); ++i) {
        require(std::isfinite(g[i]), std::string(what) + ": non-finite grid point");
        if (i > 0) require(g[i] > g[i - 1], std::string(what) + ": grid must be strictly increasing");
    }
}

} // namespace

std::string_view to_string(BaselineFamily family) {
    switch (family) {
    case BaselineFamily::Exponential: return "Exponential";
    case BaselineFamily::Weibull: return "Weibull";
    case BaselineFamily::ExpWeibull: return "ExpWeibull";
    case BaselineFamily::Burr: return "Burr";
    case BaselineFamily::GeneralizedPareto: return "GeneralizedPareto";
    case BaselineFamily::GeneralizedGamma: return "GeneralizedGamma";
    case BaselineFamily::Gamma: return "Gamma";
    }
    return "?";
}

BaselineFamily baseline_family_from_string(std::string_view name) {
    const std::string k = squash(name);
    if (k == "exponential" || k == "exp") return BaselineFamily::Exponential;
    if (k == "weibull") return BaselineFamily::Weibull;
    if (k == "expweibull" || k == "exponentiatedweibull" || k == "ew")
        return BaselineFamily::ExpWeibull;
    if (k == "burr") return BaselineFamily::Burr;
    if (k == "generalizedpareto" || k == "gp") return BaselineFamily::GeneralizedPareto;
    if (k == "generalizedgamma" || k == "gg") return BaselineFamily::GeneralizedGamma;
    if (k == "gamma") return BaselineFamily::Gamma;
    throw ValidationError("unknown baseline family: " + std::string(name));
}

Baseline::Baseline(BaselineFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    const std::string name(to_string(family));
    const std::size_t want = expected_params(family);
    if (family == BaselineFamily::Burr)
        require(params_.size() == 2 || params_.size() == 3,
                "Burr: expects (c, k) or (c, k, scale)");
    else
        require(params_.size() == want,
                name + ": expects " + std::to_string(want) + " parameter(s)");
    for (double p : params_)
        require(std::isfinite(p) && p > 0.0, name + ": parameters must be finite and > 0");
}

double Baseline::log_sf(double x) const {
    require(x >= 0.0, "baseline: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x == kInf) return -kInf;
    const auto& p = params_;
    switch (family_) {
    case BaselineFamily::Exponential: return -p[0] * x;
    case BaselineFamily::Weibull: return -std::pow(x / p[0], p[1]);
    case BaselineFamily::ExpWeibull: {
        const double s = std::pow(x, p[0]);
        // log1p(−e^(−s)) < 0; F̄ = −expm1(β·log1p(−e^(−s))).
        const double lneg = log_neg_log1m_exp(s);  // log(−log1p(−e^(−s)))
        const double y = -p[1] * std::exp(lneg);   // β·log1p(−e^(−s))
        if (y > -1e-8) return std::log(p[1]) + lneg + std::log1p(y / 2.0 + y * y / 6.0);
        return std::log(-std::expm1(y));
    }
    case BaselineFamily::Burr: {
        const double s = p.size() == 3 ? p[2] : 1.0;
        return -p[1] * std::log1p(std::pow(x / s, p[0]));
    }
    case BaselineFamily::GeneralizedPareto: return -std::log1p(p[0] * x) / p[0];
    case BaselineFamily::GeneralizedGamma: {
        const double q = boost::math::gamma_q(p[1] / p[0], std::pow(x, p[0]));
        return q > 0.0 ? std::log(q) : -kInf;
    }
    case BaselineFamily::Gamma: {
        const double q = boost::math::gamma_q(p[0], p[1] * x);
        return q > 0.0 ? std::log(q) : -kInf;
    }
    }
    return 0.0;
}

double Baseline::sf(double x) const { return std::exp(log_sf(x)); }

double Baseline::cdf(double x) const { return -std::expm1(log_sf(x)); }

double Baseline::log_pdf(double x) const {
    require(x >= 0.0, "baseline: x must be >= 0");
    if (x == kInf) return -kInf;
    const auto& p = params_;
    const double lx = std::log(x);
    switch (family_) {
    case BaselineFamily::Exponential: return std::log(p[0]) - p[0] * x;
    case BaselineFamily::Weibull: {
        const double z = x / p[0];
        return std::log(p[1] / p[0]) + (p[1] - 1.0) * std::log(z) - std::pow(z, p[1]);
    }
    case BaselineFamily::ExpWeibull: {
        const double s = std::pow(x, p[0]);
        return std::log(p[1]) + (p[1] - 1.0) * std::log(-std::expm1(-s)) - s + std::log(p[0]) +
               (p[0] - 1.0) * lx;
    }
    case BaselineFamily::Burr: {
        const double sc = p.size() == 3 ? p[2] : 1.0;
        const double lz = lx - std::log(sc);
        return std::log(p[0] * p[1] / sc) + (p[0] - 1.0) * lz -
               (p[1] + 1.0) * std::log1p(std::exp(p[0] * lz));
    }
    case BaselineFamily::GeneralizedPareto: return -(1.0 / p[0] + 1.0) * std::log1p(p[0] * x);
    case BaselineFamily::GeneralizedGamma:
        return std::log(p[0]) + (p[1] - 1.0) * lx - std::pow(x, p[0]) -
               boost::math::lgamma(p[1] / p[0]);
    case BaselineFamily::Gamma:
        return p[0] * std::log(p[1]) + (p[0] - 1.0) * lx - p[1] * x - boost::math::lgamma(p[0]);
    }
    return 0.0;
}

double Baseline::pdf(double x) const { return std::exp(log_pdf(x)); }

double Baseline::hazard(double x) const {
    const double ls = log_sf(x);
    if (ls == -kInf) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(log_pdf(x) - ls);
}

double Baseline::quantile(double prob) const {
    require(prob > 0.0 && prob < 1.0, "baseline quantile: p must be in (0, 1)");
    const auto& p = params_;
    const double e = -std::log1p(-prob);  // −log(1 − prob)
    switch (family_) {
    case BaselineFamily::Exponential: return e / p[0];
    case BaselineFamily::Weibull: return p[0] * std::pow(e, 1.0 / p[1]);
    case BaselineFamily::ExpWeibull: {
        const double s = -std::log1p(-std::pow(prob, 1.0 / p[1]));
        return std::pow(s, 1.0 / p[0]);
    }
    case BaselineFamily::Burr: {
        const double sc = p.size() == 3 ? p[2] : 1.0;
        return sc * std::pow(std::expm1(e / p[1]), 1.0 / p[0]);
    }
    case BaselineFamily::GeneralizedPareto: return std::expm1(p[0] * e) / p[0];
    case BaselineFamily::GeneralizedGamma:
        return std::pow(boost::math::gamma_p_inv(p[1] / p[0], prob), 1.0 / p[0]);
    case BaselineFamily::Gamma: return boost::math::gamma_p_inv(p[0], prob) / p[1];
    }
    return 0.0;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Scale: return "Scale";
    case ModelKind::PHR: return "PHR";
    case ModelKind::Location: return "Location";
    case ModelKind::MPHRS: return "MPHRS";
    case ModelKind::LS: return "LS";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
    const std::string k = squash(name);
    if (k == "scale" || k == "sc") return ModelKind::Scale;
    if (k == "phr" || k == "proportionalhazard") return ModelKind::PHR;
    if (k == "location") return ModelKind::Location;
    if (k == "mphrs") return ModelKind::MPHRS;
    if (k == "ls" || k == "locationscale") return ModelKind::LS;
    throw ValidationError("unknown model kind: " + std::string(name));
}

SemiParamModel::SemiParamModel(ModelKind kind, Baseline baseline, FixedParams fixed)
    : kind_(kind), baseline_(std::move(baseline)), fixed_(fixed) {
    switch (kind) {
    case ModelKind::MPHRS:
        require(std::isfinite(fixed_.alpha) && fixed_.alpha > 0.0, "MPHRS: alpha must be > 0");
        require(std::isfinite(fixed_.lambda) && fixed_.lambda > 0.0,
                "MPHRS: lambda must be > 0");
        break;
    case ModelKind::LS:
        require(std::isfinite(fixed_.lambda) && fixed_.lambda >= 0.0,
                "LS: location lambda must be >= 0");
        fixed_.alpha = 1.0;
        break;
    default: fixed_ = FixedParams{}; break;
    }
}

void SemiParamModel::validate_theta(double theta) const {
    if (kind_ == ModelKind::Location)
        require(std::isfinite(theta), "Location: theta must be finite");
    else
        require(std::isfinite(theta) && theta > 0.0,
                std::string(to_string(kind_)) + ": theta must be finite and > 0");
}

double SemiParamModel::support_start(double theta) const {
    if (kind_ == ModelKind::Location) return std::max(0.0, theta);
    if (kind_ == ModelKind::LS) return fixed_.lambda;
    return 0.0;
}

double SemiParamModel::log_survival(double x, double theta) const {
    validate_theta(theta);
    require(x >= 0.0, "survival: x must be >= 0");
    switch (kind_) {
    case ModelKind::Scale: return baseline_.log_sf(theta * x);
    case ModelKind::PHR: {
        const double l = baseline_.log_sf(x);
        return l == 0.0 ? 0.0 : theta * l;
    }
    case ModelKind::Location: return x - theta <= 0.0 ? 0.0 : baseline_.log_sf(x - theta);
    case ModelKind::MPHRS: {
        const double lb = baseline_.log_sf(x * theta);
        if (lb == 0.0) return 0.0;
        const double lg = fixed_.lambda * lb;
        if (fixed_.alpha == 1.0) return lg;
        return std::log(fixed_.alpha) + lg - std::log1p(-(1.0 - fixed_.alpha) * std::exp(lg));
    }
    case ModelKind::LS:
        return x <= fixed_.lambda ? 0.0 : baseline_.log_sf(theta * (x - fixed_.lambda));
    }
    return 0.0;
}

double SemiParamModel::survival(double x, double theta) const {
    return std::exp(log_survival(x, theta));
}

double SemiParamModel::quantile(double p, double theta) const {
    require(p > 0.0 && p < 1.0, "model quantile: p must be in (0, 1)");
    const double target = std::log1p(-p);
    double lo = support_start(theta);
    double hi = std::max(2.0 * lo, lo + 1.0);
    while (log_survival(hi, theta) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("model quantile: survival does not reach target");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_survival(mid, theta) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::string_view to_string(ShapeProperty property) {
    switch (property) {
    case ShapeProperty::DFR: return "DFR";
    case ShapeProperty::DPFR: return "DPFR";
    case ShapeProperty::DecreasingInLogTheta: return "DecreasingInLogTheta";
    case ShapeProperty::LogConvexInLogTheta: return "LogConvexInLogTheta";
    case ShapeProperty::IncreasingInTheta: return "IncreasingInTheta";
    case ShapeProperty::LogConvexInTheta: return "LogConvexInTheta";
    }
    return "?";
}

std::vector<double> linspace(double lo, double hi, int points) {
    require(points >= 2, "linspace: need at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) out[k] = lo + (hi - lo) * k / (points - 1);
    out.back() = hi;
    return out;
}

std::vector<double> logspace(double lo, double hi, int points) {
    require(lo > 0.0 && hi > lo, "logspace: need 0 < lo < hi");
    auto out = linspace(std::log(lo), std::log(hi), points);
    for (double& v : out) v = std::exp(v);
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_x_grid(const Baseline& b, int points) {
    return logspace(b.quantile(0.001), b.quantile(0.999), points);
}

namespace {

// Shared monotone check of g(x) = scale(x)·h(x) along a grid.
ShapeVerdict hazard_shape(const Baseline& b, std::span<const double> x_grid, double tol,
                          ShapeProperty prop) {
    require_grid(x_grid, "hazard check", 100);
    require(x_grid.front() > 0.0, "hazard check: grid outside support (x must be > 0)");
    ShapeVerdict v;
    v.property = prop;
    v.tol = tol;
    v.worst_violation = -kInf;
    double prev = 0.0, prev_x = 0.0;
    bool have_prev = false;
    int used = 0;
    for (double x : x_grid) {
        if (b.log_sf(x) < kLogFloor) continue;
        double h = b.hazard(x);
        if (prop == ShapeProperty::DPFR) h *= x;
        if (!std::isfinite(h)) continue;
        ++used;
        if (have_prev) {
            const double viol = (h - prev) / std::max(1.0, std::abs(prev));
            if (viol > v.worst_violation) {
                v.worst_violation = viol;
                v.at_x = prev_x;
            }
        }
        prev = h;
        prev_x = x;
        have_prev = true;
    }
    require(used >= 2, "hazard check: grid outside support");
    v.holds = v.worst_violation <= tol;
    v.probe = std::string(prop == ShapeProperty::DFR ? "h(x)" : "x*h(x)") +
              " nonincreasing on " + std::to_string(used) + " grid points in [" +
              std::to_string(x_grid.front()) + ", " + std::to_string(x_grid.back()) + "]";
    return v;
}

// Monotonicity and log-convexity of θ ↦ F̄(x; θ(t)) along the grid t.
// `decreasing` selects the required direction; `exp_param` maps t = log θ.
ConditionTwoVerdict param_shape(const SemiParamModel& m, std::span<const double> x_grid,
                                std::span<const double> t_grid, double tol, bool decreasing,
                                bool exp_param) {
    require_grid(t_grid, "parameter grid", 3);
    require(!x_grid.empty(), "condition (ii): empty x grid");
    for (double x : x_grid) require(std::isfinite(x) && x >= 0.0, "condition (ii): x must be >= 0");

    ConditionTwoVerdict out;
    out.monotone.property =
        decreasing ? ShapeProperty::DecreasingInLogTheta : ShapeProperty::IncreasingInTheta;
    out.log_convex.property =
        exp_param ? ShapeProperty::LogConvexInLogTheta : ShapeProperty::LogConvexInTheta;
    for (ShapeVerdict* v : {&out.monotone, &out.log_convex}) {
        v->tol = tol;
        v->worst_violation = -kInf;
    }

    const std::size_t k = t_grid.size();
    std::vector<double> l(k);
    for (double x : x_grid) {
        for (std::size_t i = 0; i < k; ++i)
            l[i] = m.log_survival(x, exp_param ? std::exp(t_grid[i]) : t_grid[i]);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            const double d = std::exp(l[i + 1]) - std::exp(l[i]);
            const double viol = decreasing ? d : -d;
            if (viol > out.monotone.worst_violation) {
                out.monotone.worst_violation = viol;
                out.monotone.at_x = x;
                out.monotone.at_param = t_grid[i];
            }
        }
        for (std::size_t i = 1; i + 1 < k; ++i) {
            if (l[i - 1] < kLogFloor || l[i] < kLogFloor || l[i + 1] < kLogFloor) continue;
            const double s1 = (l[i] - l[i - 1]) / (t_grid[i] - t_grid[i - 1]);
            const double s2 = (l[i + 1] - l[i]) / (t_grid[i + 1] - t_grid[i]);
            const double d2 = 2.0 * (s2 - s1) / (t_grid[i + 1] - t_grid[i - 1]);
            const double viol = -d2 / std::max(1.0, std::abs(l[i]));
            if (viol > out.log_convex.worst_violation) {
                out.log_convex.worst_violation = viol;
                out.log_convex.at_x = x;
                out.log_convex.at_param = t_grid[i];
            }
        }
    }
    const std::string where = std::to_string(x_grid.size()) + " x-points x " +
                              std::to_string(k) + (exp_param ? " log-theta" : " theta") +
                              " points in [" + std::to_string(t_grid.front()) + ", " +
                              std::to_string(t_grid.back()) + "]";
    out.monotone.probe = std::string("first differences of survival, ") + where;
    out.log_convex.probe = std::string("second differences of log survival, ") + where;
    // No usable triple (all survivals below the floor) counts as vacuous.
    if (out.log_convex.worst_violation == -kInf) out.log_convex.worst_violation = 0.0;
    out.monotone.holds = out.monotone.worst_violation <= tol;
    out.log_convex.holds = out.log_convex.worst_violation <= tol;
    return out;
}

} // namespace

ShapeVerdict check_dfr(const Baseline& b, std::span<const double> x_grid, double tol) {
    return hazard_shape(b, x_grid, tol, ShapeProperty::DFR);
}

ShapeVerdict check_dpfr(const Baseline& b, std::span<const double> x_grid, double tol) {
    return hazard_shape(b, x_grid, tol, ShapeProperty::DPFR);
}

ConditionTwoVerdict check_theorem1_condition2(const SemiParamModel& m,
                                              std::span<const double> x_grid,
                                              std::span<const double> a_grid, double tol) {
    return param_shape(m, x_grid, a_grid, tol, true, true);
}

ConditionTwoVerdict check_theorem2_condition2(const SemiParamModel& m,
                                              std::span<const double> x_grid,
                                              std::span<const double> theta_grid, double tol) {
    for (double t : theta_grid) m.validate_theta(t);
    return param_shape(m, x_grid, theta_grid, tol, false, false);
}

} // namespace failsafe
