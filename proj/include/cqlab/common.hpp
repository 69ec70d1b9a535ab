#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqlab {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct TypeMismatch : Error {
    using Error::Error;
};
struct InconsistentConditionalType : Error {
    using Error::Error;
};
struct NotSymmetricMultiset : Error {
    using Error::Error;
};
struct RetriesExhausted : Error {
    using Error::Error;
};
struct SingularDenominator : Error {
    using Error::Error;
};
struct DimMismatch : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct MissingCertificate : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Central tolerance and cap ledger
// ---------------------------------------------------------------------------

namespace tol {
// Hermiticity / commutator / projector checks.
inline constexpr double atol = 1e-9;
// POVM completeness.
inline constexpr double completeness = 1e-8;
// Relative threshold below which two denominator eigenvalues count as equal.
inline constexpr double degenerate_rel = 1e-12;
// Relative floor for strictly-positive denominators.
inline constexpr double positivity_floor_rel = 1e-12;
// Relative eigenvalue-sign threshold for positive-eigenspace projections.
inline constexpr double eig_sign_rel = 1e-10;
// Relative support threshold for divergence computations.
inline constexpr double support_rel = 1e-10;
}  // namespace tol

struct Limits {
    // Maximum number of sequences materialized by any enumeration.
    std::size_t max_enumeration = 1'000'000;
    // Maximum Hilbert-space dimension d^n for dense operators.
    long long max_dim = 4096;
    // Maximum group order for exhaustive group averaging (7! = 5040).
    long long max_group_order = 5040;
};

inline const Limits& default_limits() {
    static const Limits lim{};
    return lim;
}

// ---------------------------------------------------------------------------
// Deterministic RNG: explicit seeds everywhere, portable derivations.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** with splitmix64 seeding. Self-contained so that streams do not
// depend on the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = x = splitmix64(x);
    }

    std::uint64_t seed() const { return seed_; }

    // Child stream for parallel / per-trial work.
    Rng split(std::uint64_t index) const {
        return Rng(splitmix64(seed_ ^ (0xa076'1d64'78bd'642fULL + index)));
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw Error("Rng::below: bound must be positive");
        std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Cplx normal_complex() { return Cplx(normal(), normal()) / std::sqrt(2.0); }

  private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
};

// ---------------------------------------------------------------------------
// Small dense linear-algebra helpers shared across modules.
// ---------------------------------------------------------------------------

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct Eigh {
    RVec values;  // ascending
    Mat vectors;  // columns
};

inline Eigh eigh(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(hermitize(a));
    if (solver.info() != Eigen::Success) throw Error("eigh: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// f applied to the spectrum of a Hermitian matrix.
template <typename F>
Mat spectral_map(const Mat& a, F f) {
    Eigh eh = eigh(a);
    RVec mapped(eh.values.size());
    for (Eigen::Index i = 0; i < eh.values.size(); ++i) mapped(i) = f(eh.values(i));
    return eh.vectors * mapped.asDiagonal() * eh.vectors.adjoint();
}

// A^p on the support of a PSD matrix A. Eigenvalues at or below the relative
// support cutoff map to zero, so negative powers are pseudo-inverse powers.
inline Mat psd_power(const Mat& a, double p, double support_rel = tol::support_rel) {
    Eigh eh = eigh(a);
    double cutoff = support_rel * std::max(1e-300, eh.values.cwiseAbs().maxCoeff());
    RVec mapped(eh.values.size());
    for (Eigen::Index i = 0; i < eh.values.size(); ++i)
        mapped(i) = eh.values(i) > cutoff ? std::pow(eh.values(i), p) : 0.0;
    return eh.vectors * mapped.asDiagonal() * eh.vectors.adjoint();
}

inline double hermitian_spectral_norm(const Mat& a) {
    Eigh eh = eigh(a);
    return eh.values.cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Mat& a) { return eigh(a).values.minCoeff(); }

// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
inline double hermitian_trace_norm(const Mat& a) { return eigh(a).values.cwiseAbs().sum(); }

inline double commutator_norm(const Mat& a, const Mat& b) {
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

// Random full-rank density operator (Ginibre ensemble).
inline Mat random_density(Rng& rng, int dim) {
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal_complex();
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return hermitize(rho);
}

inline Mat random_hermitian(Rng& rng, int dim) {
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal_complex();
    return hermitize(g);
}

inline long long checked_pow_ll(long long base, int exp, long long cap) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > cap / base) return cap + 1;
        out *= base;
    }
    return out;
}

}  // namespace cqlab
