#include "failsafe/fitlab.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "failsafe/error.hpp"
#include "failsafe/fileio.hpp"

namespace failsafe::fitlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) || c == '"' || c == '\''; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("csv line " + std::to_string(line_no) + ": not a number: '" + s +
                              "'");
    }
}

} // namespace

// ---- data ------------------------------------------------------------------

std::vector<double> LifetimeDataset::values(std::size_t j) const {
    std::vector<double> out;
    for (const auto& row : cells)
        if (j < row.size() && !std::isnan(row[j])) out.push_back(row[j]);
    return out;
}

Matrix LifetimeDataset::complete_rows() const {
    Matrix m;
    m.cols = labels.size();
    for (const auto& row : cells) {
        if (std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) continue;
        m.data.insert(m.data.end(), row.begin(), row.end());
        ++m.rows;
    }
    return m;
}

void LifetimeDataset::validate(std::size_t min_per_component) const {
    require(!labels.empty(), "dataset: no components");
    for (const auto& row : cells) {
        require(row.size() == labels.size(), "dataset: ragged rows");
        for (double v : row)
            require(std::isnan(v) || (std::isfinite(v) && v > 0.0),
                    "dataset: observations must be positive and finite");
    }
    for (std::size_t j = 0; j < labels.size(); ++j)
        require(values(j).size() >= min_per_component,
                "dataset: component '" + labels[j] + "' has fewer than " +
                    std::to_string(min_per_component) + " observations");
}

LifetimeDataset parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        rows.push_back(split_csv_line(line));
    }
    require(rows.size() >= 2, "csv: need a header and at least one data row");
    const auto& header = rows.front();
    int wire_col = -1, strength_col = -1, cable_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto h = lower(header[i]);
        if (h == "wire" || h == "component") wire_col = static_cast<int>(i);
        if (h == "strength" || h == "lifetime" || h == "value") strength_col = static_cast<int>(i);
        if (h == "cable" || h == "group") cable_col = static_cast<int>(i);
    }

    LifetimeDataset ds;
    if (wire_col >= 0 && strength_col >= 0) {
        std::map<std::string, std::size_t> comp_index, group_index;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            require(row.size() == header.size(),
                    "csv line " + std::to_string(r + 1) + ": wrong number of fields");
            const std::string wire = row[wire_col];
            const std::string group =
                cable_col >= 0 ? row[cable_col] : std::to_string(r);
            const double v = parse_number(row[strength_col], r + 1);
            if (!comp_index.count(wire)) {
                comp_index[wire] = ds.labels.size();
                ds.labels.push_back(wire);
                for (auto& c : ds.cells) c.push_back(kNaN);
            }
            if (!group_index.count(group)) {
                group_index[group] = ds.groups.size();
                ds.groups.push_back(group);
                ds.cells.emplace_back(ds.labels.size(), kNaN);
            }
            double& cell = ds.cells[group_index[group]][comp_index[wire]];
            require(std::isnan(cell), "csv line " + std::to_string(r + 1) +
                                          ": duplicate value for group " + group + ", component " +
                                          wire);
            cell = v;
        }
    } else {
        ds.labels = header;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            require(row.size() <= header.size(),
                    "csv line " + std::to_string(r + 1) + ": too many fields");
            std::vector<double> cells(header.size(), kNaN);
            for (std::size_t j = 0; j < row.size(); ++j)
                if (!row[j].empty()) cells[j] = parse_number(row[j], r + 1);
            ds.cells.push_back(std::move(cells));
            ds.groups.push_back(std::to_string(r));
        }
    }
    ds.validate(1);
    return ds;
}

LifetimeDataset load_csv(const std::string& path) { return parse_csv(read_file(path)); }

// ---- marginal fits ---------------------------------------------------------

std::string_view to_string(FitFamily f) {
    switch (f) {
    case FitFamily::Exponential: return "Exponential";
    case FitFamily::Gamma: return "Gamma";
    case FitFamily::Weibull: return "Weibull";
    case FitFamily::Burr: return "Burr";
    }
    return "?";
}

FitFamily fit_family_from_string(std::string_view name) {
    const auto k = lower(std::string(name));
    if (k == "exponential") return FitFamily::Exponential;
    if (k == "gamma") return FitFamily::Gamma;
    if (k == "weibull") return FitFamily::Weibull;
    if (k == "burr") return FitFamily::Burr;
    throw ValidationError("unknown fit family: " + std::string(name));
}

int parameter_count(FitFamily f) {
    switch (f) {
    case FitFamily::Exponential: return 1;
    case FitFamily::Gamma:
    case FitFamily::Weibull: return 2;
    case FitFamily::Burr: return 3;
    }
    return 0;
}

Baseline to_baseline(FitFamily f, const std::vector<double>& params) {
    switch (f) {
    case FitFamily::Exponential: return Baseline(BaselineFamily::Exponential, params);
    case FitFamily::Gamma: return Baseline(BaselineFamily::Gamma, params);
    case FitFamily::Weibull: return Baseline(BaselineFamily::Weibull, params);
    case FitFamily::Burr: return Baseline(BaselineFamily::Burr, params);
    }
    throw ValidationError("unknown fit family");
}

double aic(double loglik, int k) { return 2.0 * k - 2.0 * loglik; }

double bic(double loglik, int k, std::size_t n) {
    return k * std::log(static_cast<double>(n)) - 2.0 * loglik;
}

namespace {

struct Simplex {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
};

// Nelder–Mead with standard coefficients; stops when the spread of objective
// values over the simplex is below tol·(1 + |f_best|).
template <class Fn>
Simplex nelder_mead(Fn&& f, std::vector<double> x0, double step, double tol, int max_iter) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(d + 1);
    Simplex out;
    for (int it = 0; it < max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
        if (std::abs(fv[worst] - fv[best]) <= tol * (1.0 + std::abs(fv[best]))) {
            out.converged = true;
            break;
        }
        std::vector<double> c(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j) c[j] += pts[i][j] / static_cast<double>(d);
        auto along = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t j = 0; j < d; ++j) p[j] = c[j] + t * (pts[worst][j] - c[j]);
            return p;
        };
        auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fv[best]) {
            auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    out.x = pts[best];
    out.f = fv[best];
    return out;
}

std::uint64_t fingerprint(std::span<const double> data) {
    std::uint64_t h = splitmix64(data.size());
    for (double v : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = splitmix64(h ^ bits);
    }
    return h;
}

double loglik_of(FitFamily f, const std::vector<double>& params, std::span<const double> data) {
    try {
        const Baseline b = to_baseline(f, params);
        double s = 0.0;
        for (double x : data) s += b.log_pdf(x);
        return std::isfinite(s) ? s : -std::numeric_limits<double>::infinity();
    } catch (const ValidationError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

// Moment-based starting point in natural parameters.
std::vector<double> moment_start(FitFamily f, std::span<const double> data) {
    const double n = static_cast<double>(data.size());
    double m = 0.0, ml = 0.0;
    for (double x : data) {
        m += x;
        ml += std::log(x);
    }
    m /= n;
    ml /= n;
    double v = 0.0, vl = 0.0;
    for (double x : data) {
        v += (x - m) * (x - m);
        vl += (std::log(x) - ml) * (std::log(x) - ml);
    }
    v /= n - 1.0;
    vl /= n - 1.0;
    // sd(log X) = π / (b√6) for a Weibull law.
    const double b = 1.2825498301618641 / std::sqrt(vl);
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    switch (f) {
    case FitFamily::Exponential: return {1.0 / m};
    case FitFamily::Gamma: return {m * m / v, m / v};
    case FitFamily::Weibull: return {std::exp(ml + 0.5772156649015329 / b), b};
    case FitFamily::Burr: return {b, 1.0, median};
    }
    return {};
}

} // namespace

FitResult mle_fit(FitFamily family, std::span<const double> data) {
    require(data.size() >= 5, "mle_fit: need at least 5 observations");
    for (double x : data)
        require(std::isfinite(x) && x > 0.0, "mle_fit: observations must be positive and finite");
    require(std::any_of(data.begin(), data.end(), [&](double x) { return x != data[0]; }),
            "mle_fit: degenerate data (all observations equal)");

    FitResult r;
    r.family = family;
    r.n = data.size();
    r.k = parameter_count(family);
    r.data_fingerprint = fingerprint(data);

    const auto start = moment_start(family, data);
    if (family == FitFamily::Exponential) {
        r.params = start;  // closed-form MLE: rate = 1 / mean
        r.loglik = loglik_of(family, r.params, data);
        r.start_logliks = {r.loglik};
        r.converged = true;
    } else {
        auto objective = [&](const std::vector<double>& s) {
            std::vector<double> p(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) p[i] = std::exp(s[i]);
            const double ll = loglik_of(family, p, data);
            return std::isfinite(ll) ? -ll : 1e300;
        };
        static constexpr double offsets[kMultiStarts] = {0.0, 0.5, -0.5, 1.0, -1.0};
        double best = std::numeric_limits<double>::infinity();
        bool any_converged = false;
        for (int j = 0; j < kMultiStarts; ++j) {
            std::vector<double> s0(start.size());
            for (std::size_t i = 0; i < start.size(); ++i)
                s0[i] = std::log(start[i]) + offsets[j] * (i % 2 == 0 ? 1.0 : -1.0);
            r.start_logliks.push_back(-objective(s0));
            Simplex res = nelder_mead(objective, s0, 0.25, kObjectiveTol, 20000);
            // Restart from the optimum until the objective stops moving.
            for (int restart = 0; restart < 5; ++restart) {
                Simplex again = nelder_mead(objective, res.x, 0.05, kObjectiveTol, 20000);
                const bool settled = std::abs(again.f - res.f) <= kObjectiveTol * (1.0 + std::abs(res.f));
                if (again.f <= res.f) res = again;
                if (settled) break;
            }
            any_converged = any_converged || res.converged;
            if (res.f < best) {
                best = res.f;
                r.params.resize(res.x.size());
                for (std::size_t i = 0; i < res.x.size(); ++i) r.params[i] = std::exp(res.x[i]);
                r.converged = res.converged;
            }
        }
        if (!any_converged || !std::isfinite(best) || best >= 1e300)
            throw NumericError("mle_fit: " + std::string(to_string(family)) +
                               " did not converge from any start");
        r.loglik = -best;
    }
    r.aic = aic(r.loglik, r.k);
    r.bic = bic(r.loglik, r.k, r.n);
    return r;
}

std::vector<RankedFit> rank_models(std::vector<FitResult> results) {
    require(!results.empty(), "rank_models: no fits");
    for (const auto& r : results)
        require(r.n == results.front().n && r.data_fingerprint == results.front().data_fingerprint,
                "rank_models: fits come from different datasets");
    std::stable_sort(results.begin(), results.end(), [](const FitResult& a, const FitResult& b) {
        if (a.aic != b.aic) return a.aic < b.aic;
        return a.bic < b.bic;
    });
    std::vector<RankedFit> out;
    for (auto& r : results) {
        RankedFit rf;
        rf.delta_aic = r.aic - results.front().aic;
        rf.delta_bic = r.bic - results.front().bic;
        rf.fit = std::move(r);
        out.push_back(std::move(rf));
    }
    return out;
}

// ---- copulas ---------------------------------------------------------------

Matrix pseudo_observations(const Matrix& data) {
    require(data.rows >= 2, "pseudo_observations: need at least 2 rows");
    Matrix out;
    out.rows = data.rows;
    out.cols = data.cols;
    out.data.resize(data.data.size());
    std::vector<std::size_t> idx(data.rows);
    for (std::size_t j = 0; j < data.cols; ++j) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return data(a, j) < data(b, j); });
        require(data(idx.front(), j) != data(idx.back(), j),
                "pseudo_observations: constant column " + std::to_string(j));
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t k = i;
            while (k + 1 < idx.size() && data(idx[k + 1], j) == data(idx[i], j)) ++k;
            // Ranks i+1..k+1 share their average.
            const double rank = 0.5 * static_cast<double>(i + k) + 1.0;
            for (std::size_t t = i; t <= k; ++t)
                out(idx[t], j) = rank / static_cast<double>(data.rows + 1);
            i = k + 1;
        }
    }
    return out;
}

namespace {

// Counts inversions (strictly decreasing pairs) by merge sort.
std::uint64_t count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                          std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = (lo + hi) / 2;
    std::uint64_t s = count_swaps(v, buf, lo, mid) + count_swaps(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            s += mid - i;
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return s;
}

std::uint64_t tie_pairs(const std::vector<double>& sorted) {
    std::uint64_t t = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t k = i;
        while (k + 1 < sorted.size() && sorted[k + 1] == sorted[i]) ++k;
        const std::uint64_t c = k - i + 1;
        t += c * (c - 1) / 2;
        i = k + 1;
    }
    return t;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "kendall_tau: length mismatch");
    require(x.size() >= 2, "kendall_tau: need at least 2 pairs");
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::uint64_t n1 = 0, n3 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t k = i;
        while (k + 1 < n && x[idx[k + 1]] == x[idx[i]]) ++k;
        const std::uint64_t c = k - i + 1;
        n1 += c * (c - 1) / 2;
        for (std::size_t a = i; a <= k;) {
            std::size_t b = a;
            while (b + 1 <= k && y[idx[b + 1]] == y[idx[a]]) ++b;
            const std::uint64_t cc = b - a + 1;
            n3 += cc * (cc - 1) / 2;
            a = b + 1;
        }
        i = k + 1;
    }
    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
    const std::uint64_t swaps = count_swaps(ys, buf, 0, n);
    const std::uint64_t n2 = tie_pairs(ys);
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    require(denom > 0.0, "kendall_tau: a constant variable has no tau");
    const double concordant_minus_discordant =
        n0 - static_cast<double>(n1) - static_cast<double>(n2) + static_cast<double>(n3) -
        2.0 * static_cast<double>(swaps);
    return concordant_minus_discordant / denom;
}

double average_kendall_tau(const Matrix& m) {
    require(m.cols >= 2, "average_kendall_tau: need at least 2 columns");
    std::vector<std::vector<double>> cols(m.cols, std::vector<double>(m.rows));
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) cols[j][i] = m(i, j);
    double s = 0.0;
    int pairs = 0;
    for (std::size_t a = 0; a < m.cols; ++a)
        for (std::size_t b = a + 1; b < m.cols; ++b) {
            s += kendall_tau(cols[a], cols[b]);
            ++pairs;
        }
    return s / pairs;
}

double frank_tau(double theta) {
    require(theta > 0.0 && std::isfinite(theta), "frank_tau: theta must be > 0");
    if (theta < 1e-2) {
        const double t2 = theta * theta;
        return theta / 9.0 - theta * t2 / 900.0 + theta * t2 * t2 / 52920.0;
    }
    auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, theta, 15,
                                                                      1e-14);
    const double d1 = integral / theta;
    return 1.0 - 4.0 / theta + 4.0 * d1 / theta;
}

double invert_tau(GeneratorFamily family, double tau) {
    require(std::isfinite(tau), "invert_tau: tau must be finite");
    switch (family) {
    case GeneratorFamily::Clayton:
        require(tau > 0.0 && tau < 1.0, "Clayton: tau must be in (0, 1)");
        return 2.0 * tau / (1.0 - tau);
    case GeneratorFamily::GumbelTable3:
        require(tau >= 0.0 && tau < 1.0, "Gumbel: tau must be in [0, 1)");
        return 1.0 / (1.0 - tau);
    case GeneratorFamily::Frank: {
        constexpr double lo = 1e-8, hi = 1e4;
        require(tau > frank_tau(lo) && tau < frank_tau(hi),
                "Frank: tau outside the attainable range for theta > 0");
        boost::uintmax_t iters = 200;
        auto [a, b] = boost::math::tools::toms748_solve(
            [&](double th) { return frank_tau(th) - tau; }, lo, hi,
            boost::math::tools::eps_tolerance<double>(50), iters);
        return 0.5 * (a + b);
    }
    default: break;
    }
    throw ValidationError("invert_tau: unsupported family " + std::string(to_string(family)));
}

bool is_fit_copula_family(GeneratorFamily f) {
    return f == GeneratorFamily::Clayton || f == GeneratorFamily::GumbelTable3 ||
           f == GeneratorFamily::Frank;
}

double copula_log_density(const Generator& g, std::span<const double> u) {
    const double th = g.theta();
    for (double v : u) require(v > 0.0 && v < 1.0, "copula density: u must be in (0, 1)");
    switch (g.family()) {
    case GeneratorFamily::Clayton: {
        const double d = static_cast<double>(u.size());
        double s = 1.0, lsum = 0.0, lead = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            lead += std::log1p(static_cast<double>(k) * th);
            const double lu = std::log(u[k]);
            lsum += lu;
            s += std::expm1(-th * lu);
        }
        return lead - (th + 1.0) * lsum - (1.0 / th + d) * std::log(s);
    }
    case GeneratorFamily::GumbelTable3: {
        require(u.size() == 2, "Gumbel density: only d = 2 is implemented");
        const double x = -std::log(u[0]), y = -std::log(u[1]);
        const double s = std::pow(x, th) + std::pow(y, th);
        const double a = std::pow(s, 1.0 / th);
        return -a + x + y + (th - 1.0) * (std::log(x) + std::log(y)) +
               (1.0 / th - 2.0) * std::log(s) + std::log(a + th - 1.0);
    }
    case GeneratorFamily::Frank: {
        require(u.size() == 2, "Frank density: only d = 2 is implemented");
        const double em = -std::expm1(-th);
        const double den = em - std::expm1(-th * u[0]) * std::expm1(-th * u[1]);
        return std::log(th) + std::log(em) - th * (u[0] + u[1]) - 2.0 * std::log(den);
    }
    default: break;
    }
    throw ValidationError("copula density: unsupported family");
}

namespace {

Generator make_fit_generator(GeneratorFamily family, double theta) {
    if (family == GeneratorFamily::GumbelTable3) theta = std::max(theta, 1.0);
    return Generator(family, theta);
}

double fit_pseudo_likelihood(GeneratorFamily family, const Matrix& pseudo) {
    require(family == GeneratorFamily::Clayton || pseudo.cols == 2,
            "pseudo-likelihood: d > 2 is supported for Clayton only");
    // Parametrize so the search interval is unconstrained-friendly.
    auto theta_of = [&](double s) {
        return family == GeneratorFamily::GumbelTable3 ? 1.0 + std::exp(s) : std::exp(s);
    };
    auto nll = [&](double s) {
        const Generator g = make_fit_generator(family, theta_of(s));
        double acc = 0.0;
        for (std::size_t i = 0; i < pseudo.rows; ++i) acc -= copula_log_density(g, pseudo.row(i));
        return std::isfinite(acc) ? acc : 1e300;
    };
    const double lo = std::log(1e-6);
    const double hi = std::log(family == GeneratorFamily::Frank ? 200.0 : 100.0);
    boost::uintmax_t iters = 500;
    const auto best = boost::math::tools::brent_find_minima(nll, lo, hi, 40, iters);
    return theta_of(best.first);
}

// Tau inversion with τ clipped into the family's range; used for bootstrap
// replicates, where a weakly dependent resample may show τ ≤ 0.
double fit_clipped(GeneratorFamily family, const Matrix& pseudo, CopulaMethod method) {
    if (method == CopulaMethod::PseudoLikelihood) return fit_pseudo_likelihood(family, pseudo);
    double tau = average_kendall_tau(pseudo);
    const double floor = family == GeneratorFamily::GumbelTable3 ? 0.0 : 1e-6;
    tau = std::clamp(tau, floor, 0.999);
    return invert_tau(family, tau);
}

} // namespace

double fit_copula(GeneratorFamily family, const Matrix& pseudo, CopulaMethod method) {
    require(is_fit_copula_family(family),
            "fit_copula: family must be Clayton, GumbelTable3 or Frank");
    require(pseudo.cols >= 2 && pseudo.rows >= 2, "fit_copula: need at least 2 x 2 data");
    for (double v : pseudo.data) require(v > 0.0 && v < 1.0, "fit_copula: data must be in (0, 1)");
    if (method == CopulaMethod::PseudoLikelihood) return fit_pseudo_likelihood(family, pseudo);
    return invert_tau(family, average_kendall_tau(pseudo));
}

double cvm_statistic(const Generator& g, const Matrix& pseudo) {
    const std::size_t n = pseudo.rows, d = pseudo.cols;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t below = 0;
        for (std::size_t j = 0; j < n; ++j) {
            bool all = true;
            for (std::size_t k = 0; k < d && all; ++k) all = pseudo(j, k) <= pseudo(i, k);
            below += all;
        }
        const double emp = static_cast<double>(below) / static_cast<double>(n);
        const double diff = emp - g.copula(pseudo.row(i));
        s += diff * diff;
    }
    return s;
}

GofResult cvm_gof(GeneratorFamily family, const Matrix& pseudo, int boot_n, std::uint64_t seed,
                  CopulaMethod method) {
    require(boot_n >= 100, "cvm_gof: boot_n must be >= 100");
    GofResult r;
    r.family = family;
    r.boot_n = boot_n;
    r.seed = seed;
    r.theta = fit_copula(family, pseudo, method);
    const Generator g = make_fit_generator(family, r.theta);
    if (!supports_sampling(g))
        throw UnsupportedError("cvm_gof: no sampler for the fitted copula");
    r.statistic = cvm_statistic(g, pseudo);

    int exceed = 0;
    for (int b = 0; b < boot_n; ++b) {
        const std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(b) + 1));
        const auto batch = sample_copula(g, static_cast<int>(pseudo.cols), pseudo.rows, s);
        const Matrix p = pseudo_observations(batch.uniforms);
        const Generator gb = make_fit_generator(family, fit_clipped(family, p, method));
        if (cvm_statistic(gb, p) >= r.statistic) ++exceed;
    }
    r.p_value = static_cast<double>(exceed) / boot_n;
    return r;
}

// ---- subset recommendation -------------------------------------------------

SubsetRecommendation recommend_subset(std::span<const Candidate> candidates,
                                      const SemiParamModel& model, const Generator& generator,
                                      const GridPolicy& grid, bool require_theorem) {
    require(candidates.size() >= 2, "recommend_subset: need at least 2 candidates");
    std::vector<SystemSpec> systems;
    for (const auto& c : candidates) {
        require(c.theta.size() == candidates.front().theta.size(),
                "recommend_subset: candidates differ in size");
        systems.push_back(SystemSpec{model, c.theta, generator});
        systems.back().validate();
    }
    std::vector<const SystemSpec*> ptrs;
    for (const auto& s : systems) ptrs.push_back(&s);
    const auto xs = grid.x_range ? logspace(grid.x_range->first, grid.x_range->second,
                                            grid.curve_points)
                                 : default_grid(ptrs, grid.curve_points);
    std::vector<SurvivalCurve> curves;
    for (const auto& s : systems) curves.push_back(curve(s, xs));

    const std::size_t m = candidates.size();
    std::vector<std::vector<bool>> edge(m, std::vector<bool>(m, false));
    SubsetRecommendation out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            if (!preorders::holds(preorders::Kind::PLarger, systems[i].theta, systems[j].theta,
                                  grid.preorder_tol))
                continue;
            Certificate c;
            c.winner = candidates[i].name;
            c.loser = candidates[j].name;
            c.p_larger = true;
            const auto v = compare_curves(curves[i], curves[j], grid.dominance_tol,
                                          grid.crossing_tol);
            c.grid_relation = v.relation;
            c.min_gap = v.min_gap;
            c.theorem1_verified = verify_theorem1(systems[i], systems[j], grid, false).overall;
            edge[i][j] = v.x_dominates_or_ties() && (!require_theorem || c.theorem1_verified);
            out.certificates.push_back(std::move(c));
        }

    std::vector<int> wins(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto& a = candidates[i].name;
            const auto& b = candidates[j].name;
            if (edge[i][j] && edge[j][i])
                out.ties.emplace_back(a, b);
            else if (edge[i][j])
                ++wins[i];
            else if (edge[j][i])
                ++wins[j];
            else
                out.incomparable.emplace_back(a, b);
        }
    for (std::size_t i = 0; i < m; ++i) {
        bool beaten = false;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i && edge[j][i] && !edge[i][j]) beaten = true;
        if (!beaten) out.maximal.push_back(candidates[i].name);
    }
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        if (wins[a] != wins[b]) return wins[a] > wins[b];
        return candidates[a].name < candidates[b].name;
    });
    for (auto i : idx) out.ranking.push_back(candidates[i].name);
    return out;
}

} // namespace failsafe::fitlab
