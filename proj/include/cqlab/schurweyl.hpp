#pragma once

#include "cqlab/permaction.hpp"

#include <map>
#include <vector>

namespace cqlab {

struct TooManyRows : Error {
    using Error::Error;
};

// Young diagram with n boxes, stored without trailing zero rows.
struct YoungDiagram {
    std::vector<int> rows;  // weakly decreasing, positive

    int boxes() const {
        int n = 0;
        for (int r : rows) n += r;
        return n;
    }
    int num_rows() const { return static_cast<int>(rows.size()); }

    friend bool operator==(const YoungDiagram& a, const YoungDiagram& b) { return a.rows == b.rows; }
    friend bool operator<(const YoungDiagram& a, const YoungDiagram& b) { return a.rows < b.rows; }
};

// Partitions of n into at most d parts, largest part first; ordered with the
// first row decreasing (so (n), (n-1,1), ...).
inline std::vector<YoungDiagram> young_diagrams(int n, int d) {
    if (n < 1 || d < 1) throw Error("young_diagrams: need n >= 1, d >= 1");
    std::vector<YoungDiagram> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int rest, int maxpart, int rows_left) -> void {
        if (rest == 0) {
            out.push_back(YoungDiagram{cur});
            return;
        }
        if (rows_left == 0) return;
        for (int part = std::min(rest, maxpart); part >= 1; --part) {
            cur.push_back(part);
            self(self, rest - part, part, rows_left - 1);
            cur.pop_back();
        }
    };
    rec(rec, n, n, d);
    std::sort(out.begin(), out.end(), [](const YoungDiagram& a, const YoungDiagram& b) {
        return b.rows < a.rows;  // descending lexicographic: (n) first
    });
    return out;
}

// Weyl dimension formula for the SU(d) irrep labeled by lambda:
// prod_{i<j} (l_i - l_j + j - i) / (j - i), lambda padded with zeros.
inline long long dim_unitary_irrep(const YoungDiagram& lambda, int d) {
    if (lambda.num_rows() > d)
        throw TooManyRows("dim_unitary_irrep: diagram has more rows than the dimension");
    std::vector<long long> l(d, 0);
    for (int i = 0; i < lambda.num_rows(); ++i) l[i] = lambda.rows[i];
    long long num = 1, den = 1;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            num *= l[i] - l[j] + j - i;
            den *= j - i;
        }
    return num / den;
}

// Hook-length formula for the S_n irrep dimension.
inline long long dim_symmetric_irrep(const YoungDiagram& lambda) {
    int n = lambda.boxes();
    std::vector<int> conj(lambda.rows.empty() ? 0 : lambda.rows[0], 0);
    for (int i = 0; i < lambda.num_rows(); ++i)
        for (int j = 0; j < lambda.rows[i]; ++j) ++conj[j];
    // n! / prod(hooks), kept integral by dividing greedily
    unsigned long long out = 1;
    std::vector<long long> hooks;
    for (int i = 0; i < lambda.num_rows(); ++i)
        for (int j = 0; j < lambda.rows[i]; ++j)
            hooks.push_back((lambda.rows[i] - j) + (conj[j] - i) - 1);
    for (long long f = 1; f <= n; ++f) {
        out = detail::mul_checked(out, static_cast<unsigned long long>(f));
        for (auto& h : hooks) {
            if (h > 1 && out % static_cast<unsigned long long>(h) == 0) {
                out /= static_cast<unsigned long long>(h);
                h = 1;
            }
        }
    }
    for (long long h : hooks) out /= static_cast<unsigned long long>(h);
    return static_cast<long long>(out);
}

namespace detail {

// Murnaghan-Nakayama recursion on beta-sets: removing a border strip of
// length r moves one beta number down by r; the sign counts the beta numbers
// it jumps over.
inline long long mn_character(const std::vector<int>& lambda, const std::vector<int>& mu,
                              std::map<std::pair<std::vector<int>, std::vector<int>>, long long>& memo) {
    if (lambda.empty() && mu.empty()) return 1;
    auto key = std::make_pair(lambda, mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    int r = mu.front();
    std::vector<int> rest(mu.begin() + 1, mu.end());
    int m = static_cast<int>(lambda.size());
    std::vector<int> beta(m);
    for (int i = 0; i < m; ++i) beta[i] = lambda[i] + (m - 1 - i);

    long long total = 0;
    for (int i = 0; i < m; ++i) {
        int target = beta[i] - r;
        if (target < 0) continue;
        bool clash = false;
        int jumped = 0;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            if (beta[j] == target) clash = true;
            if (beta[j] > target && beta[j] < beta[i]) ++jumped;
        }
        if (clash) continue;
        std::vector<int> nb = beta;
        nb[i] = target;
        std::sort(nb.rbegin(), nb.rend());
        std::vector<int> nl(m);
        for (int j = 0; j < m; ++j) nl[j] = nb[j] - (m - 1 - j);
        while (!nl.empty() && nl.back() == 0) nl.pop_back();
        long long sub = mn_character(nl, rest, memo);
        total += (jumped % 2 == 0) ? sub : -sub;
    }
    memo[key] = total;
    return total;
}

}  // namespace detail

// Character of the S_n irrep lambda on the conjugacy class with the given
// cycle type (a partition of n).
inline long long character(const YoungDiagram& lambda, const std::vector<int>& cycle_type) {
    int n = 0;
    for (int c : cycle_type) n += c;
    if (n != lambda.boxes()) throw Error("character: cycle type is not a partition of n");
    static thread_local std::map<std::pair<std::vector<int>, std::vector<int>>, long long> memo;
    return detail::mn_character(lambda.rows, cycle_type, memo);
}

// Conjugacy class size n!/z_mu with z_mu = prod_k k^{a_k} a_k!.
inline unsigned long long conjugacy_class_size(const std::vector<int>& cycle_type) {
    long long n = 0;
    std::map<int, int> mult;
    for (int c : cycle_type) {
        n += c;
        ++mult[c];
    }
    unsigned long long z = 1;
    for (auto [k, a] : mult) {
        for (int i = 0; i < a; ++i) z = detail::mul_checked(z, static_cast<unsigned long long>(k));
        z = detail::mul_checked(z, factorial(a));
    }
    return factorial(n) / z;
}

// ---------------------------------------------------------------------------
// Operators on (C^d)^{\otimes n}
// ---------------------------------------------------------------------------

inline long long tensor_dim_checked(int d, int n, const Limits& lim) {
    long long dim = checked_pow_ll(d, n, lim.max_dim);
    if (dim > lim.max_dim)
        throw CapExceeded("tensor space dimension d^n exceeds cap");
    return dim;
}

// Basis-index permutation realizing V_s on (C^d)^{\otimes n}: position 1 is
// the most significant digit, and V_s|i_1...i_n> = |j_1...j_n> with
// j_{s(k)} = i_k, matching apply() on sequences.
inline std::vector<long long> tensor_index_map(const Permutation& s, int d,
                                               const Limits& lim = default_limits()) {
    int n = s.degree();
    long long dim = tensor_dim_checked(d, n, lim);
    std::vector<long long> weight(n);  // weight of position k (0-based)
    weight[n - 1] = 1;
    for (int k = n - 2; k >= 0; --k) weight[k] = weight[k + 1] * d;
    std::vector<long long> map(dim);
    std::vector<int> digits(n);
    for (long long b = 0; b < dim; ++b) {
        long long rem = b;
        for (int k = 0; k < n; ++k) {
            digits[k] = static_cast<int>(rem / weight[k]);
            rem %= weight[k];
        }
        long long out = 0;
        for (int k = 0; k < n; ++k) out += digits[k] * weight[s.image(k)];
        map[b] = out;
    }
    return map;
}

inline Mat permutation_operator(const Permutation& s, int d,
                                const Limits& lim = default_limits()) {
    auto map = tensor_index_map(s, d, lim);
    Mat v = Mat::Zero(map.size(), map.size());
    for (std::size_t b = 0; b < map.size(); ++b) v(map[b], b) = 1.0;
    return v;
}

// V_s A V_s^dagger without forming V_s.
inline Mat conjugate_by_permutation(const Mat& a, const std::vector<long long>& index_map) {
    Mat out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out(index_map[i], index_map[j]) = a(i, j);
    return out;
}

struct SchurBlock {
    YoungDiagram diagram;
    long long dimU = 0;
    long long dimV = 0;
    Mat projector;
};

// Isotypic projectors of the S_n action on (C^d)^{\otimes n}, built by
// character-weighted group averaging: Pi_lambda = (dimV/n!) sum_s chi(s) V_s.
inline std::vector<SchurBlock> block_projectors(int n, int d,
                                                const Limits& lim = default_limits()) {
    long long dim = tensor_dim_checked(d, n, lim);
    if (factorial(n) > static_cast<unsigned long long>(lim.max_group_order))
        throw CapExceeded("block_projectors: n! exceeds group-order cap");
    std::vector<YoungDiagram> diagrams = young_diagrams(n, d);

    std::vector<SchurBlock> blocks(diagrams.size());
    for (std::size_t b = 0; b < diagrams.size(); ++b) {
        blocks[b].diagram = diagrams[b];
        blocks[b].dimU = dim_unitary_irrep(diagrams[b], d);
        blocks[b].dimV = dim_symmetric_irrep(diagrams[b]);
        blocks[b].projector = Mat::Zero(dim, dim);
    }

    const double norm = 1.0 / static_cast<double>(factorial(n));
    for (const auto& s : all_permutations(n, lim)) {
        auto map = tensor_index_map(s, d, lim);
        auto ct = s.cycle_type();
        for (std::size_t b = 0; b < diagrams.size(); ++b) {
            double coeff = norm * static_cast<double>(blocks[b].dimV) *
                           static_cast<double>(character(diagrams[b], ct));
            if (coeff == 0.0) continue;
            for (long long col = 0; col < dim; ++col)
                blocks[b].projector(map[col], col) += coeff;
        }
    }
    for (auto& blk : blocks) blk.projector = hermitize(blk.projector);
    return blocks;
}

struct UniversalSymmetricState {
    Mat op;  // density operator on (C^d)^{\otimes n}
    int n = 0;
    int d = 0;
};

// sigma_{U,n}: uniform mixture over Schur blocks of the normalized projectors.
inline UniversalSymmetricState universal_symmetric_state(int n, int d,
                                                         const Limits& lim = default_limits()) {
    if (n == 0) return {Mat::Identity(1, 1), 0, d};
    auto blocks = block_projectors(n, d, lim);
    long long dim = tensor_dim_checked(d, n, lim);
    Mat sigma = Mat::Zero(dim, dim);
    const double per_block = 1.0 / static_cast<double>(blocks.size());
    for (const auto& blk : blocks)
        sigma += per_block / static_cast<double>(blk.dimU * blk.dimV) * blk.projector;
    return {hermitize(sigma), n, d};
}

// sigma_x = V_s (sigma_{U,m_1} x ... x sigma_{U,m_k}) V_s^dagger for any s
// with s(x_P) = x; empty blocks contribute a scalar factor 1.
inline Mat sigma_x(const SequenceN& x, int d, const Limits& lim = default_limits()) {
    TypeComposition p = type_of(x);
    int n = x.length();
    tensor_dim_checked(d, n, lim);
    Mat base = Mat::Identity(1, 1);
    std::map<long long, Mat> cache;
    for (long long m : p.counts()) {
        if (m == 0) continue;
        auto it = cache.find(m);
        if (it == cache.end())
            it = cache.emplace(m, universal_symmetric_state(static_cast<int>(m), d, lim).op).first;
        base = kron(base, it->second);
    }
    Permutation s = find_permutation_to(canonical_sequence(p), x);
    if (s.is_identity()) return base;
    return conjugate_by_permutation(base, tensor_index_map(s, d, lim));
}

// sigma_{U,P}: uniform average of sigma_x over the type class.
inline Mat sigma_UP(const TypeComposition& p, int d, const Limits& lim = default_limits()) {
    int n = static_cast<int>(p.length());
    long long dim = tensor_dim_checked(d, n, lim);
    Mat base = Mat::Identity(1, 1);
    std::map<long long, Mat> cache;
    for (long long m : p.counts()) {
        if (m == 0) continue;
        auto it = cache.find(m);
        if (it == cache.end())
            it = cache.emplace(m, universal_symmetric_state(static_cast<int>(m), d, lim).op).first;
        base = kron(base, it->second);
    }
    auto transversal = coset_transversal(p, lim);
    Mat out = Mat::Zero(dim, dim);
    for (const auto& [s, x] : transversal)
        out += conjugate_by_permutation(base, tensor_index_map(s, d, lim));
    out /= static_cast<double>(transversal.size());
    return hermitize(out);
}

}  // namespace cqlab
