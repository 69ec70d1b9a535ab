#include "cqlab/permaction.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

using namespace cqlab;

namespace {

SequenceN random_sequence(int n, int k, Rng& rng) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = 1 + static_cast<int>(rng.below(k));
    return SequenceN(std::move(s), k);
}

}  // namespace

TEST_CASE("apply basics", "[permaction]") {
    SequenceN x({1, 2, 2}, 2);
    CHECK(apply(Permutation::identity(3), x) == x);
    // swap of positions 1 and 2 (one-line 2 1 3)
    Permutation swap12 = Permutation::from_one_line({2, 1, 3});
    CHECK(apply(swap12, x) == SequenceN({2, 1, 2}, 2));
    CHECK_THROWS_AS(apply(Permutation::identity(4), x), LengthMismatch);
}

TEST_CASE("action is a homomorphism and preserves type", "[permaction]") {
    Rng rng(20240811);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 3 + static_cast<int>(rng.below(5));
        Permutation s = sample_permutation(n, rng);
        Permutation t = sample_permutation(n, rng);
        SequenceN x = random_sequence(n, 3, rng);
        CHECK(apply(s * t, x) == apply(s, apply(t, x)));
        CHECK(type_of(apply(s, x)) == type_of(x));
    }
}

TEST_CASE("group laws on random samples", "[permaction]") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng.below(6));
        Permutation s = sample_permutation(n, rng);
        Permutation t = sample_permutation(n, rng);
        Permutation u = sample_permutation(n, rng);
        CHECK((s * t) * u == s * (t * u));
        CHECK(s * Permutation::identity(n) == s);
        CHECK(s * s.inverse() == Permutation::identity(n));
        CHECK(s.inverse().inverse() == s);
    }
}

TEST_CASE("find_permutation_to", "[permaction]") {
    SequenceN xp({1, 1, 2}, 2);
    CHECK(find_permutation_to(xp, xp).is_identity());

    SequenceN x({2, 1, 1}, 2);
    Permutation s = find_permutation_to(xp, x);
    CHECK(apply(s, xp) == x);
    // stable matching: occurrences map in order (positions 0,1 of symbol 1 in
    // x_P go to positions 1,2 in x; the single 2 goes to position 0)
    CHECK(s.one_line() == std::vector<int>{2, 3, 1});

    CHECK_THROWS_AS(find_permutation_to(xp, SequenceN({2, 2, 1}, 2)), TypeMismatch);

    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.below(6));
        SequenceN a = random_sequence(n, 3, rng);
        std::vector<int> shuffled = a.symbols();
        for (int i = n - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
        SequenceN b(shuffled, 3);
        CHECK(apply(find_permutation_to(a, b), a) == b);
    }
}

TEST_CASE("isotropy", "[permaction]") {
    CHECK(isotropy_size(SequenceN({1, 1, 2, 2}, 2)) == 4);
    CHECK(isotropy_size(SequenceN({1, 2, 3}, 3)) == 1);

    SequenceN c3({1, 1, 1}, 2);
    CHECK(isotropy_size(c3) == 6);
    auto elems = enumerate_isotropy(c3);
    REQUIRE(elems.size() == 6);
    for (const auto& s : elems) CHECK(apply(s, c3) == c3);

    Limits lim;
    lim.max_enumeration = 3;
    CHECK_THROWS_AS(enumerate_isotropy(c3, lim), CapExceeded);
    CHECK(isotropy_size(c3) == 6);
}

TEST_CASE("isotropy orbit of y equals its conditional class", "[permaction]") {
    // orbit fact used inside the collision-average lemma
    for (int n = 3; n <= 5; ++n) {
        for (const auto& p : enumerate_types(n, 2)) {
            auto klass = type_class(p);
            const SequenceN x = klass.front();
            auto iso = enumerate_isotropy(x);
            for (const auto& y : klass) {
                std::set<SequenceN> orbit;
                for (const auto& s : iso) orbit.insert(apply(s, y));
                auto v = conditional_type_of(x, y);
                auto tvx = conditional_type_class(x, v);
                std::set<SequenceN> tvx_set(tvx.begin(), tvx.end());
                REQUIRE(orbit == tvx_set);
            }
        }
    }
}

TEST_CASE("coset transversal", "[permaction]") {
    auto tv = coset_transversal(TypeComposition({1, 1}));
    REQUIRE(tv.size() == 2);
    std::set<SequenceN> seqs;
    for (const auto& [s, x] : tv) seqs.insert(x);
    CHECK(seqs.count(SequenceN({1, 2}, 2)) == 1);
    CHECK(seqs.count(SequenceN({2, 1}, 2)) == 1);

    CHECK(coset_transversal(TypeComposition({2, 2})).size() == 6);

    // Lagrange count |S_n| = |transversal| * |S_{x_P}|, exhaustive for n <= 6
    for (int n = 1; n <= 6; ++n) {
        for (int k = 1; k <= 3; ++k) {
            for (const auto& p : enumerate_types(n, k)) {
                auto t = coset_transversal(p);
                SequenceN xp = canonical_sequence(p);
                REQUIRE(factorial(n) == t.size() * isotropy_size(xp));
                // bijectivity: each element once, permutation maps x_P there
                std::set<SequenceN> seen;
                for (const auto& [s, x] : t) {
                    CHECK(apply(s, xp) == x);
                    seen.insert(x);
                }
                REQUIRE(seen.size() == t.size());
                REQUIRE(seen.size() == type_class_size(p));
            }
        }
    }
}

TEST_CASE("symmetrize", "[permaction]") {
    Rng rng(5);
    PermMultiset s;
    for (int i = 0; i < 7; ++i) s.elements.push_back(sample_permutation(5, rng));
    PermMultiset sym = symmetrize(s);
    CHECK(sym.size() == 2 * s.size());
    CHECK(sym.symmetric_flag);
    CHECK(sym.is_symmetric_multiset());
    // contains each element and its inverse
    for (const auto& g : s.elements) {
        CHECK(std::count(sym.elements.begin(), sym.elements.end(), g) >= 1);
        CHECK(std::count(sym.elements.begin(), sym.elements.end(), g.inverse()) >= 1);
    }
}

TEST_CASE("uniform sampling frequencies", "[permaction]") {
    // empirical distribution of the first image over 1e5 samples, 4-sigma band
    const int n = 6;
    const int num = 100000;
    PermMultiset sample = sample_uniform(n, num, 123456);
    std::vector<int> hist(n, 0);
    for (const auto& s : sample.elements) ++hist[s.image(0)];
    double p = 1.0 / n;
    double sigma = std::sqrt(num * p * (1 - p));
    for (int v = 0; v < n; ++v) {
        CHECK(std::abs(hist[v] - num * p) <= 4 * sigma);
    }
}

TEST_CASE("sampling is deterministic given seed", "[permaction]") {
    auto a = sample_uniform(8, 50, 42);
    auto b = sample_uniform(8, 50, 42);
    REQUIRE(a.elements == b.elements);
    auto c = sample_uniform(8, 50, 43);
    CHECK(a.elements != c.elements);
}
