#include "cqlab/infoquant.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace cqlab;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m.diagonal() << a, b;
    return m;
}

CqChannel random_qubit_channel(Rng& rng, int k) {
    std::vector<Mat> outs;
    for (int i = 0; i < k; ++i) outs.push_back(random_density(rng, 2));
    return CqChannel(std::move(outs), 2);
}

double classical_renyi(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) acc += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
    return std::log(acc) / (alpha - 1.0);
}

double classical_sibson(const std::vector<std::vector<double>>& w, const std::vector<double>& p,
                        double alpha) {
    std::size_t out = w[0].size();
    double trace = 0.0;
    for (std::size_t y = 0; y < out; ++y) {
        double inner = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x) inner += p[x] * std::pow(w[x][y], alpha);
        trace += std::pow(inner, 1.0 / alpha);
    }
    return (alpha / (alpha - 1.0)) * std::log(trace);
}

// Golden-section oracle for a scalar convex objective on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int i = 0; i < iters; ++i) {
        if (f(c) < f(d)) b = d; else a = c;
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("petz renyi basics", "[infoquant]") {
    Rng rng(401);
    Mat rho = random_density(rng, 2);
    for (double alpha : {0.3, 0.5, 2.0}) {
        auto r = petz_renyi(rho, rho, alpha);
        CHECK(r.value == Catch::Approx(0.0).margin(1e-10));
        CHECK(r.support_condition_met);
    }

    // commuting case against the classical formula
    auto r = petz_renyi(diag2(0.5, 0.5), diag2(0.9, 0.1), 0.5);
    CHECK(r.value == Catch::Approx(classical_renyi({0.5, 0.5}, {0.9, 0.1}, 0.5)).epsilon(1e-12));
}

TEST_CASE("alpha monotonicity of both divergences", "[infoquant]") {
    Rng rng(403);
    Mat rho = random_density(rng, 2);
    Mat sigma = 0.85 * random_density(rng, 2) + 0.15 * Mat::Identity(2, 2) / 2.0;
    double prev_p = -kInf;
    for (int i = 0; i < 20; ++i) {
        double alpha = 0.05 + i * 0.1;
        if (std::abs(alpha - 1.0) < 1e-9) continue;
        double dp = petz_renyi(rho, sigma, alpha).value;
        CHECK(dp >= prev_p - 1e-9);
        prev_p = dp;
    }
    // sandwiched grid restricted to alpha >= 1/2, where the formula is
    // numerically well posed
    double prev_s = -kInf;
    for (int i = 0; i < 20; ++i) {
        double alpha = 0.5 + i * 0.075;
        if (std::abs(alpha - 1.0) < 1e-9) continue;
        double ds = sandwiched_renyi(rho, sigma, alpha).value;
        double dp = petz_renyi(rho, sigma, alpha).value;
        CHECK(ds >= prev_s - 1e-9);
        // ordering between the two families
        CHECK(ds <= dp + 1e-9);
        prev_s = ds;
    }
}

TEST_CASE("sandwiched renyi", "[infoquant]") {
    Rng rng(405);
    Mat rho = random_density(rng, 2);
    CHECK(sandwiched_renyi(rho, rho, 1.5).value == Catch::Approx(0.0).margin(1e-10));

    // commuting case equals petz exactly
    for (double alpha : {0.3, 0.5, 0.9, 1.5, 2.0}) {
        double s = sandwiched_renyi(diag2(0.7, 0.3), diag2(0.2, 0.8), alpha).value;
        double p = petz_renyi(diag2(0.7, 0.3), diag2(0.2, 0.8), alpha).value;
        CHECK(s == Catch::Approx(p).margin(1e-10));
        CHECK(s == Catch::Approx(classical_renyi({0.7, 0.3}, {0.2, 0.8}, alpha)).margin(1e-10));
    }

    // alpha = 2 against an independent formula path
    for (int trial = 0; trial < 10; ++trial) {
        Mat r = random_density(rng, 2);
        Mat s = 0.9 * random_density(rng, 2) + 0.1 * Mat::Identity(2, 2) / 2.0;
        double direct = sandwiched_renyi(r, s, 2.0).value;
        Mat sinv = psd_power(s, -0.5);
        double alt = std::log(std::real((r * sinv * r * sinv).trace()));
        CHECK(direct == Catch::Approx(alt).margin(1e-10));
    }

    // support condition: pure states with orthogonal supports are infinitely far
    Mat p0 = diag2(1.0, 0.0), p1 = diag2(0.0, 1.0);
    auto res = sandwiched_renyi(p0, p1, 1.5);
    CHECK(!res.support_condition_met);
    CHECK(std::isinf(res.value));
}

TEST_CASE("relative entropy and alpha -> 1 limits", "[infoquant]") {
    Rng rng(407);
    Mat rho = random_density(rng, 2);
    Mat sigma = 0.85 * random_density(rng, 2) + 0.15 * Mat::Identity(2, 2) / 2.0;
    double d1 = relative_entropy(rho, sigma).value;
    CHECK(relative_entropy(rho, rho).value == Catch::Approx(0.0).margin(1e-10));
    CHECK(petz_renyi(rho, sigma, 1.0 - 1e-6).value == Catch::Approx(d1).margin(1e-4));
    CHECK(petz_renyi(rho, sigma, 1.0 + 1e-6).value == Catch::Approx(d1).margin(1e-4));
    CHECK(sandwiched_renyi(rho, sigma, 1.0 - 1e-6).value == Catch::Approx(d1).margin(1e-4));
    CHECK(sandwiched_renyi(rho, sigma, 1.0 + 1e-6).value == Catch::Approx(d1).margin(1e-4));
}

TEST_CASE("mutual information", "[infoquant]") {
    Rng rng(409);
    Mat rho = random_density(rng, 2);
    CqChannel useless({rho, rho}, 2);
    CHECK(mutual_information(useless, {0.5, 0.5}) == Catch::Approx(0.0).margin(1e-12));

    // classical binary symmetric channel
    double e = 0.1;
    CqChannel bsc({diag2(1 - e, e), diag2(e, 1 - e)}, 2);
    double h2 = -(e * std::log(e) + (1 - e) * std::log(1 - e));
    CHECK(mutual_information(bsc, {0.5, 0.5}) == Catch::Approx(std::log(2.0) - h2).epsilon(1e-10));
}

TEST_CASE("sibson closed form", "[infoquant]") {
    Rng rng(411);

    SECTION("identical outputs give zero for every alpha") {
        Mat rho = random_density(rng, 2);
        CqChannel useless({rho, rho}, 2);
        for (double alpha : {0.0, 0.3, 0.5, 0.9})
            CHECK(sibson_alpha_mutual(useless, {0.5, 0.5}, alpha) ==
                  Catch::Approx(0.0).margin(1e-10));
    }

    SECTION("classical collapse is exact") {
        CqChannel bsc({diag2(0.8, 0.2), diag2(0.3, 0.7)}, 2);
        std::vector<std::vector<double>> w{{0.8, 0.2}, {0.3, 0.7}};
        for (double alpha : {0.3, 0.5, 0.9})
            CHECK(sibson_alpha_mutual(bsc, {0.4, 0.6}, alpha) ==
                  Catch::Approx(classical_sibson(w, {0.4, 0.6}, alpha)).margin(1e-10));
    }

    SECTION("limit alpha -> 1 approaches the mutual information") {
        CqChannel w = random_qubit_channel(rng, 2);
        double mi = mutual_information(w, {0.5, 0.5});
        CHECK(std::abs(sibson_alpha_mutual(w, {0.5, 0.5}, 1.0 - 1e-4) - mi) <= 1e-3);
    }

    SECTION("alpha monotone on a 20-point grid") {
        CqChannel w = random_qubit_channel(rng, 2);
        double prev = -kInf;
        for (int i = 0; i < 20; ++i) {
            double alpha = 0.025 + i * 0.05;
            double v = sibson_alpha_mutual(w, {0.3, 0.7}, alpha);
            CHECK(v >= prev - 1e-9);
            prev = v;
        }
    }

    SECTION("closed form equals grid minimization and the Sibson identity holds") {
        CqChannel w = random_qubit_channel(rng, 2);
        std::vector<double> p{0.5, 0.5};
        for (double alpha : {0.5, 0.8}) {
            double closed = sibson_alpha_mutual(w, p, alpha);
            auto [gridval, gridsig] = minimize_over_qubit_states(
                [&](const Mat& s) { return cq_petz_vs_product(w, p, s, alpha); });
            CHECK(std::abs(closed - gridval) <= 1e-3);
            // explicit minimizer achieves the closed form
            Mat star = sibson_minimizer(w, p, alpha);
            CHECK(cq_petz_vs_product(w, p, star, alpha) == Catch::Approx(closed).margin(1e-8));
        }
    }
}

TEST_CASE("augustin information", "[infoquant]") {
    Rng rng(413);

    SECTION("identical outputs give zero") {
        Mat rho = random_density(rng, 2);
        CqChannel useless({rho, rho}, 2);
        for (double alpha : {1.2, 1.5, 2.0})
            CHECK(augustin_info(useless, {0.5, 0.5}, alpha) == Catch::Approx(0.0).margin(1e-8));
    }

    SECTION("classical channel matches the scalar convex oracle") {
        CqChannel bsc({diag2(0.8, 0.2), diag2(0.3, 0.7)}, 2);
        std::vector<double> p{0.4, 0.6};
        std::vector<std::vector<double>> w{{0.8, 0.2}, {0.3, 0.7}};
        for (double alpha : {1.5, 2.0}) {
            double oracle = golden_min(
                [&](double q) {
                    double acc = 0.0;
                    for (int x = 0; x < 2; ++x)
                        acc += p[x] * classical_renyi(w[x], {q, 1 - q}, alpha);
                    return acc;
                },
                1e-6, 1.0 - 1e-6);
            CHECK(augustin_info(bsc, p, alpha) == Catch::Approx(oracle).margin(1e-8));
        }
    }

    SECTION("qubit fixed point agrees with the Bloch grid") {
        CqChannel w = random_qubit_channel(rng, 2);
        std::vector<double> p{0.5, 0.5};
        for (double alpha : {1.5, 2.0}) {
            double fp = augustin_info(w, p, alpha);
            auto [gridval, gridsig] = minimize_over_qubit_states(
                [&](const Mat& s) { return augustin_objective(w, p, s, alpha); });
            CHECK(std::abs(fp - gridval) <= 1e-3);
            // the fixed point can only overestimate the infimum
            CHECK(fp <= gridval + 1e-3);
        }
    }

    SECTION("monotone in alpha and correct alpha -> 1 limit") {
        CqChannel w = random_qubit_channel(rng, 2);
        std::vector<double> p{0.6, 0.4};
        double mi = mutual_information(w, p);
        CHECK(std::abs(augustin_info(w, p, 1.0 + 1e-4) - mi) <= 1e-3);
        double prev = -kInf;
        for (int i = 1; i <= 20; ++i) {
            double alpha = 1.0 + i * 0.05;
            double v = augustin_info(w, p, alpha);
            CHECK(v >= prev - 1e-9);
            prev = v;
        }
    }

    SECTION("classical collapse exact for commuting outputs") {
        CqChannel bsc({diag2(0.9, 0.1), diag2(0.25, 0.75)}, 2);
        std::vector<double> p{0.5, 0.5};
        std::vector<std::vector<double>> w{{0.9, 0.1}, {0.25, 0.75}};
        for (double alpha : {1.5, 2.0}) {
            double oracle = golden_min(
                [&](double q) {
                    double acc = 0.0;
                    for (int x = 0; x < 2; ++x)
                        acc += p[x] * classical_renyi(w[x], {q, 1 - q}, alpha);
                    return acc;
                },
                1e-6, 1.0 - 1e-6);
            CHECK(augustin_info(bsc, p, alpha) == Catch::Approx(oracle).margin(1e-9));
        }
    }
}
