#include "failsafe/preorders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "failsafe/error.hpp"

namespace failsafe::preorders {

namespace {

void validate(std::span<const double> a, std::span<const double> b, double tol) {
    require(!a.empty(), "preorder: vectors must be nonempty");
    require(a.size() == b.size(), "preorder: length mismatch (" + std::to_string(a.size()) +
                                      " vs " + std::to_string(b.size()) + ")");
    require(std::isfinite(tol) && tol >= 0.0, "preorder: tolerance must be finite and >= 0");
    for (double v : a) require(std::isfinite(v), "preorder: non-finite entry in a");
    for (double v : b) require(std::isfinite(v), "preorder: non-finite entry in b");
}

bool all_positive(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

std::vector<double> ascending(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Core check on already-sorted inputs.
bool holds_sorted(Kind kind, const std::vector<double>& a, const std::vector<double>& b,
                  double tol) {
    const std::size_t n = a.size();
    double sa = 0.0, sb = 0.0;
    switch (kind) {
    case Kind::Majorize:
        for (std::size_t i = 0; i < n; ++i) {
            sa += a[i];
            sb += b[i];
            if (i + 1 < n && sa > sb + tol) return false;
        }
        return std::abs(sa - sb) <= tol;
    case Kind::WeakSuper:
        for (std::size_t i = 0; i < n; ++i) {
            sa += a[i];
            sb += b[i];
            if (sa > sb + tol) return false;
        }
        return true;
    case Kind::WeakSub:
        for (std::size_t i = 0; i < n; ++i) {
            sa += a[i];
            sb += b[i];
            if (sa < sb - tol) return false;
        }
        return true;
    case Kind::PLarger:
        // Partial products compared through partial sums of logarithms.
        for (std::size_t i = 0; i < n; ++i) {
            sa += std::log(a[i]);
            sb += std::log(b[i]);
            if (sa > sb + tol) return false;
        }
        return true;
    case Kind::ReciprocalMajorize:
        for (std::size_t i = 0; i < n; ++i) {
            sa += 1.0 / a[i];
            sb += 1.0 / b[i];
            if (sa < sb - tol) return false;
        }
        return true;
    }
    return false;
}

} // namespace

std::string_view to_string(Kind kind) {
    switch (kind) {
    case Kind::Majorize: return "majorize";
    case Kind::WeakSuper: return "weak_super";
    case Kind::WeakSub: return "weak_sub";
    case Kind::PLarger: return "p_larger";
    case Kind::ReciprocalMajorize: return "reciprocal_majorize";
    }
    return "?";
}

Kind kind_from_string(std::string_view name) {
    for (Kind k : kAllKinds)
        if (to_string(k) == name) return k;
    if (name == "m") return Kind::Majorize;
    if (name == "w" || name == "weak-super") return Kind::WeakSuper;
    if (name == "weak-sub") return Kind::WeakSub;
    if (name == "p" || name == "p-larger") return Kind::PLarger;
    if (name == "rm" || name == "reciprocal-majorize") return Kind::ReciprocalMajorize;
    throw ValidationError("unknown preorder kind: " + std::string(name));
}

bool holds(Kind kind, std::span<const double> a, std::span<const double> b, double tol) {
    validate(a, b, tol);
    if (needs_positive(kind)) {
        require(all_positive(a) && all_positive(b),
                std::string(to_string(kind)) + " requires strictly positive entries");
    }
    return holds_sorted(kind, ascending(a), ascending(b), tol);
}

const RelationResult& OrderReport::get(Kind kind) const {
    return relations[static_cast<std::size_t>(kind)];
}

OrderReport classify(std::span<const double> a, std::span<const double> b, double tol) {
    validate(a, b, tol);
    OrderReport report;
    report.tol = tol;
    report.a_sorted = ascending(a);
    report.b_sorted = ascending(b);
    const bool positive = all_positive(a) && all_positive(b);
    for (Kind k : kAllKinds) {
        RelationResult& r = report.relations[static_cast<std::size_t>(k)];
        r.kind = k;
        if (needs_positive(k) && !positive) {
            r.skipped = true;
            continue;
        }
        r.a_over_b = holds_sorted(k, report.a_sorted, report.b_sorted, tol);
        r.b_over_a = holds_sorted(k, report.b_sorted, report.a_sorted, tol);
    }
    return report;
}

} // namespace failsafe::preorders
