#pragma once

// Vector preorders used to compare heterogeneous parameter vectors.
//
// Every relation is evaluated on the ascending rearrangements of its
// arguments. For a "⪰" b:
//   Majorize            prefix sums of a ≤ prefix sums of b (i < n), equal totals
//   WeakSuper           prefix sums of a ≤ prefix sums of b (all i)
//   WeakSub             prefix sums of a ≥ prefix sums of b (all i)
//   PLarger             prefix products of a ≤ prefix products of b (a, b > 0)
//   ReciprocalMajorize  prefix sums of 1/a ≥ prefix sums of 1/b (a, b > 0)
// Each inequality is relaxed by an absolute tolerance.

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace failsafe::preorders {

enum class Kind { Majorize, WeakSuper, WeakSub, PLarger, ReciprocalMajorize };

inline constexpr std::array<Kind, 5> kAllKinds = {
    Kind::Majorize, Kind::WeakSuper, Kind::WeakSub, Kind::PLarger, Kind::ReciprocalMajorize};

inline constexpr double kDefaultTol = 1e-12;

std::string_view to_string(Kind kind);
Kind kind_from_string(std::string_view name);

// True when the relation needs strictly positive entries.
constexpr bool needs_positive(Kind kind) {
    return kind == Kind::PLarger || kind == Kind::ReciprocalMajorize;
}

// Does a ⪰ b hold under `kind`? Throws ValidationError on length mismatch,
// NaN/inf entries, negative tol, or nonpositive entries for PLarger/ReciprocalMajorize.
bool holds(Kind kind, std::span<const double> a, std::span<const double> b,
           double tol = kDefaultTol);

struct RelationResult {
    Kind kind;
    bool a_over_b = false;  // a ⪰ b
    bool b_over_a = false;  // b ⪰ a
    bool skipped = false;   // relation needs positive entries and some are not
};

struct OrderReport {
    std::vector<double> a_sorted;
    std::vector<double> b_sorted;
    std::array<RelationResult, 5> relations{};
    double tol = kDefaultTol;

    const RelationResult& get(Kind kind) const;
};

OrderReport classify(std::span<const double> a, std::span<const double> b,
                     double tol = kDefaultTol);

} // namespace failsafe::preorders
