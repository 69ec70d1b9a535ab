#include "cqlab/schreier.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

using namespace cqlab;

TEST_CASE("full-group generators give the rank-one projector", "[schreier]") {
    TypeComposition p({2, 1});
    PermMultiset full;
    full.elements = all_permutations(3);
    full.symmetric_flag = true;
    SchreierGraph g = build_schreier(p, full);
    const int m = static_cast<int>(g.vertices.size());
    REQUIRE(m == 3);
    RMat p1 = RMat::Constant(m, m, 1.0 / m);
    CHECK((g.transition - p1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectral_report(g).lambda == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("two-vertex swap graph", "[schreier]") {
    TypeComposition p({1, 1});
    Permutation swap = Permutation::from_one_line({2, 1});
    PermMultiset s;
    s.elements = {swap, swap};
    s.symmetric_flag = true;
    SchreierGraph g = build_schreier(p, s);
    REQUIRE(g.vertices.size() == 2);
    CHECK(g.transition(0, 0) == 0.0);
    CHECK(g.transition(0, 1) == 1.0);
    CHECK(g.transition(1, 0) == 1.0);
    CHECK(g.transition(1, 1) == 0.0);

    SpectralReport rep = spectral_report(g);
    CHECK(rep.lambda == Catch::Approx(1.0));  // eigenvalues +-1, bipartite
    CHECK(rep.connected);
    CHECK(rep.bipartite_indicator);
    CHECK(rep.eigenvalues.front() == Catch::Approx(1.0));
    CHECK(rep.eigenvalues.back() == Catch::Approx(-1.0));
}

TEST_CASE("transition matrix is symmetric doubly stochastic", "[schreier]") {
    TypeComposition p({3, 2});
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        PermMultiset s = random_expander_multiset(p, 0.6, 0.5, seed);
        SchreierGraph g = build_schreier(p, s);
        CHECK((g.transition - g.transition.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        RVec rows = g.transition.rowwise().sum();
        for (Eigen::Index i = 0; i < rows.size(); ++i) CHECK(rows(i) == Catch::Approx(1.0));
        // entries are multiples of 1/|S'|
        for (Eigen::Index i = 0; i < g.transition.rows(); ++i)
            for (Eigen::Index j = 0; j < g.transition.cols(); ++j) {
                double scaled = g.transition(i, j) * static_cast<double>(g.degree);
                CHECK(std::abs(scaled - std::llround(scaled)) < 1e-9);
            }
    }
}

TEST_CASE("non-symmetric multiset rejected", "[schreier]") {
    TypeComposition p({2, 1});
    PermMultiset s;
    s.elements = {Permutation::from_one_line({2, 3, 1})};  // 3-cycle, no inverse
    s.symmetric_flag = true;
    CHECK_THROWS_AS(build_schreier(p, s), NotSymmetricMultiset);
    PermMultiset t = symmetrize(PermMultiset{{Permutation::from_one_line({2, 3, 1})}, false});
    CHECK_NOTHROW(build_schreier(p, t));
}

TEST_CASE("transition equals averaged coset permutation matrices", "[schreier]") {
    // cross-check edge counting against explicit matrix averaging
    TypeComposition p({2, 2});
    PermMultiset s = random_expander_multiset(p, 0.7, 0.5, 99);
    SchreierGraph g = build_schreier(p, s);
    const int m = static_cast<int>(g.vertices.size());
    RMat avg = RMat::Zero(m, m);
    std::map<SequenceN, int> index;
    for (int i = 0; i < m; ++i) index.emplace(g.vertices[i], i);
    for (const auto& perm : s.elements) {
        RMat pm = RMat::Zero(m, m);
        for (int j = 0; j < m; ++j) pm(index.at(apply(perm, g.vertices[j])), j) = 1.0;
        avg += pm;
    }
    avg /= static_cast<double>(s.size());
    CHECK((avg - g.transition).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lambda equals operator norm of T - P1 and P1 is group average", "[schreier]") {
    for (int n : {3, 4, 5}) {
        TypeComposition p = enumerate_types(n, 2)[n / 2];
        if (type_class_size(p) < 2) continue;
        PermMultiset s = random_expander_multiset(p, 0.6, 0.5, 7 + n);
        SchreierGraph g = build_schreier(p, s);
        const int m = static_cast<int>(g.vertices.size());
        RMat p1 = RMat::Constant(m, m, 1.0 / m);

        // P1 from full group averaging
        RMat avg = RMat::Zero(m, m);
        std::map<SequenceN, int> index;
        for (int i = 0; i < m; ++i) index.emplace(g.vertices[i], i);
        for (const auto& perm : all_permutations(n)) {
            for (int j = 0; j < m; ++j) avg(index.at(apply(perm, g.vertices[j])), j) += 1.0;
        }
        avg /= static_cast<double>(factorial(n));
        CHECK((avg - p1).cwiseAbs().maxCoeff() < 1e-12);

        SpectralReport rep = spectral_report(g);
        Eigen::SelfAdjointEigenSolver<RMat> es(g.transition - p1);
        double opnorm = es.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(std::abs(rep.lambda - opnorm) < 1e-10);

        // lambda < 1 iff connected and not bipartite
        CHECK((rep.lambda < 1.0 - 1e-12) == (rep.connected && !rep.bipartite_indicator));
    }
}

TEST_CASE("doubling the multiset leaves T and lambda unchanged", "[schreier]") {
    TypeComposition p({3, 2});
    PermMultiset s = random_expander_multiset(p, 0.6, 0.5, 21);
    PermMultiset doubled;
    doubled.symmetric_flag = true;
    for (const auto& g : s.elements) {
        doubled.elements.push_back(g);
        doubled.elements.push_back(g);
    }
    SchreierGraph g1 = build_schreier(p, s);
    SchreierGraph g2 = build_schreier(p, doubled);
    CHECK((g1.transition - g2.transition).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(spectral_report(g1).lambda - spectral_report(g2).lambda) < 1e-12);
}

TEST_CASE("sample size follows the ceiling formula", "[schreier]") {
    // eps = delta = 0.5, |T_P| = 10: ceil((log4/0.25) log(40)) = 21
    TypeComposition p({3, 2});
    REQUIRE(type_class_size(p) == 10);
    CHECK(expander_sample_size(p, 0.5, 0.5) == 21);
    PermMultiset s = random_expander_multiset(p, 0.5, 0.5, 4);
    CHECK(s.size() == 42);
    CHECK(s.symmetric_flag);
    CHECK(s.is_symmetric_multiset());
}

TEST_CASE("build_until_gap reaches modest targets and is seed-deterministic", "[schreier]") {
    TypeComposition p({2, 2});
    auto [s1, rep1] = build_until_gap(p, 0.9, 31337, 3);
    CHECK(rep1.lambda <= 0.9);
    auto [s2, rep2] = build_until_gap(p, 0.9, 31337, 3);
    CHECK(s1.elements == s2.elements);
    CHECK(rep1.lambda == rep2.lambda);
}

TEST_CASE("impossible gap target exhausts retries", "[schreier]") {
    TypeComposition p({2, 2});
    // a tiny fixed multiset cannot reach lambda ~ 0; cap retries small
    CHECK_THROWS_AS(build_until_gap(p, 1e-9, 1, 2, 0.5, /*size_override=*/2),
                    RetriesExhausted);
}

TEST_CASE("edge list dump", "[schreier]") {
    TypeComposition p({1, 1});
    Permutation swap = Permutation::from_one_line({2, 1});
    PermMultiset s;
    s.elements = {swap, swap};
    s.symmetric_flag = true;
    SchreierGraph g = build_schreier(p, s);
    std::ostringstream os;
    dump_edge_list(g, os);
    CHECK(os.str() == "2 2 2\n0 1 2\n");
}
