#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "failsafe/error.hpp"
#include "failsafe/preorders.hpp"

using namespace failsafe;
using namespace failsafe::preorders;

namespace {

using Vec = std::vector<double>;

// Independent re-evaluation of the definitions: explicit partial products
// (not log sums), fresh sorting, no shared helpers.
bool oracle(Kind k, Vec a, Vec b, double tol = kDefaultTol) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    for (std::size_t i = 1; i <= n; ++i) {
        double sa = 0, sb = 0, pa = 1, pb = 1, ra = 0, rb = 0;
        for (std::size_t j = 0; j < i; ++j) {
            sa += a[j];
            sb += b[j];
            pa *= a[j];
            pb *= b[j];
            ra += 1 / a[j];
            rb += 1 / b[j];
        }
        switch (k) {
        case Kind::Majorize:
            if (i < n && sa > sb + tol) return false;
            if (i == n && std::abs(sa - sb) > tol) return false;
            break;
        case Kind::WeakSuper:
            if (sa > sb + tol) return false;
            break;
        case Kind::WeakSub:
            if (sa < sb - tol) return false;
            break;
        case Kind::PLarger:
            // Relative slack matches the log-domain comparison up to rounding.
            if (pa > pb * (1 + 1e-9)) return false;
            break;
        case Kind::ReciprocalMajorize:
            if (ra < rb - tol) return false;
            break;
        }
    }
    return true;
}

Vec random_positive(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 3.0);
    Vec v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

} // namespace

TEST_CASE("paper examples") {
    const Vec a{0.12, 0.28, 0.51, 0.62, 0.73}, b{0.21, 0.42, 0.73, 0.89, 0.92};
    CHECK(holds(Kind::PLarger, a, b));
    const auto r = classify(Vec{0.13, 0.31, 0.49, 0.61, 0.72}, Vec{0.22, 0.41, 0.71, 0.88, 0.92});
    CHECK(r.get(Kind::PLarger).a_over_b);
}

TEST_CASE("hand-computed relations") {
    CHECK(holds(Kind::Majorize, Vec{1, 3}, Vec{2, 2}));
    CHECK_FALSE(holds(Kind::Majorize, Vec{2, 2}, Vec{1, 3}));
    CHECK(holds(Kind::ReciprocalMajorize, Vec{1, 4}, Vec{2, 2}));
    CHECK(holds(Kind::WeakSuper, Vec{1, 1}, Vec{2, 2}));
    CHECK(holds(Kind::WeakSub, Vec{2, 2}, Vec{1, 1}));
    // Order of the inputs does not matter.
    CHECK(holds(Kind::Majorize, Vec{3, 1}, Vec{2, 2}));
}

TEST_CASE("reflexivity and all-true report for equal vectors") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const auto a = random_positive(rng, 1 + t % 6);
        for (Kind k : kAllKinds) CHECK(holds(k, a, a));
        const auto r = classify(a, a);
        for (const auto& rel : r.relations) {
            CHECK(rel.a_over_b);
            CHECK(rel.b_over_a);
            CHECK_FALSE(rel.skipped);
        }
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(holds(Kind::Majorize, Vec{1, 2}, Vec{1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(holds(Kind::Majorize, Vec{}, Vec{}), ValidationError);
    CHECK_THROWS_AS(holds(Kind::WeakSuper, Vec{1, NAN}, Vec{1, 2}), ValidationError);
    CHECK_THROWS_AS(holds(Kind::PLarger, Vec{0, 1}, Vec{1, 2}), ValidationError);
    CHECK_THROWS_AS(holds(Kind::ReciprocalMajorize, Vec{1, 2}, Vec{-1, 2}), ValidationError);
    CHECK_THROWS_AS(holds(Kind::Majorize, Vec{1}, Vec{1}, -1.0), ValidationError);
    // Real-valued relations accept negative entries.
    CHECK(holds(Kind::WeakSuper, Vec{-1, 2}, Vec{-1, 2}));
}

TEST_CASE("classify skips positive-only relations") {
    const auto r = classify(Vec{-1, 2}, Vec{0, 1});
    CHECK(r.get(Kind::PLarger).skipped);
    CHECK(r.get(Kind::ReciprocalMajorize).skipped);
    CHECK_FALSE(r.get(Kind::Majorize).skipped);
    CHECK(r.a_sorted == Vec{-1, 2});
}

TEST_CASE("names round-trip") {
    for (Kind k : kAllKinds) CHECK(kind_from_string(to_string(k)) == k);
    CHECK(kind_from_string("p") == Kind::PLarger);
    CHECK(kind_from_string("rm") == Kind::ReciprocalMajorize);
    CHECK_THROWS_AS(kind_from_string("nope"), ValidationError);
}

TEST_CASE("classify agrees with brute-force definitions on random pairs") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + t % 5;
        auto a = random_positive(rng, n);
        auto b = random_positive(rng, n);
        if (t % 3 == 0) {
            // Bias towards related pairs so both outcomes occur.
            std::sort(a.begin(), a.end());
            b = a;
            for (auto& x : b) x *= 1.0 + 0.3 * std::generate_canonical<double, 53>(rng);
        }
        const auto r = classify(a, b);
        for (Kind k : kAllKinds) {
            CHECK(r.get(k).a_over_b == oracle(k, a, b));
            CHECK(r.get(k).b_over_a == oracle(k, b, a));
        }
    }
}

TEST_CASE("p-larger equals weak supermajorization of logs") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 3000; ++t) {
        const std::size_t n = 1 + t % 6;
        auto a = random_positive(rng, n), b = random_positive(rng, n);
        Vec la(n), lb(n);
        for (std::size_t i = 0; i < n; ++i) {
            la[i] = std::log(a[i]);
            lb[i] = std::log(b[i]);
        }
        REQUIRE(holds(Kind::PLarger, a, b) == holds(Kind::WeakSuper, la, lb));
    }
}

TEST_CASE("implication chain m => weak-super => p => rm") {
    std::mt19937_64 rng(12);
    int m_count = 0, w_count = 0, p_count = 0;
    for (int t = 0; t < 5000; ++t) {
        const std::size_t n = 2 + t % 5;
        auto a = random_positive(rng, n);
        Vec b = a;
        // Small perturbations make the relations hold often enough to test.
        std::uniform_real_distribution<double> d(-0.2, 0.4);
        for (auto& x : b) x = std::max(0.01, x + d(rng));
        const bool m = holds(Kind::Majorize, a, b), w = holds(Kind::WeakSuper, a, b),
                   p = holds(Kind::PLarger, a, b), rm = holds(Kind::ReciprocalMajorize, a, b);
        m_count += m;
        w_count += w;
        p_count += p;
        REQUIRE((!m || w));
        REQUIRE((!w || p));
        REQUIRE((!p || rm));
    }
    CHECK(w_count > 100);
    CHECK(p_count > w_count);
    (void)m_count;
}

TEST_CASE("majorization implies weak supermajorization for constructed pairs") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        auto a = random_positive(rng, 4);
        std::sort(a.begin(), a.end());
        // A Robin Hood transfer from the largest to the smallest entry.
        Vec b = a;
        const double delta = u(rng) * (b[3] - b[0]) / 2;
        b[3] -= delta;
        b[0] += delta;
        REQUIRE(holds(Kind::Majorize, a, b, 1e-12));
        REQUIRE(holds(Kind::WeakSuper, a, b, 1e-12));
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 200; ++t) {
        auto a = random_positive(rng, 5), b = random_positive(rng, 5);
        auto pa = a, pb = b;
        std::shuffle(pa.begin(), pa.end(), rng);
        std::shuffle(pb.begin(), pb.end(), rng);
        for (Kind k : kAllKinds) REQUIRE(holds(k, a, b) == holds(k, pa, pb));
    }
}

TEST_CASE("transitivity on constructed chains") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        auto a = random_positive(rng, 5);
        std::sort(a.begin(), a.end());
        // Larger sorted entries give b ⪯ a for weak-super, p and rm style relations.
        Vec b = a, c = a;
        for (std::size_t i = 0; i < 5; ++i) {
            b[i] = a[i] * (1 + 0.5 * u(rng));
            c[i] = b[i] * (1 + 0.5 * u(rng));
        }
        for (Kind k : {Kind::WeakSuper, Kind::PLarger, Kind::ReciprocalMajorize}) {
            REQUIRE(holds(k, a, b));
            REQUIRE(holds(k, b, c));
            REQUIRE(holds(k, a, c));
        }
        // The reverse direction gives the weak-sub chain.
        REQUIRE(holds(Kind::WeakSub, c, b));
        REQUIRE(holds(Kind::WeakSub, b, a));
        REQUIRE(holds(Kind::WeakSub, c, a));

        // Two successive transfers towards the mean: a ⪰m b ⪰m c.
        Vec mb = a;
        const double d1 = u(rng) * (mb[4] - mb[0]) / 2;
        mb[4] -= d1;
        mb[0] += d1;
        Vec mc = mb;
        std::sort(mc.begin(), mc.end());
        const double d2 = u(rng) * (mc[4] - mc[0]) / 2;
        mc[4] -= d2;
        mc[0] += d2;
        REQUIRE(holds(Kind::Majorize, a, mb, 1e-12));
        REQUIRE(holds(Kind::Majorize, mb, mc, 1e-12));
        REQUIRE(holds(Kind::Majorize, a, mc, 1e-12));
    }
}
