#pragma once

#include "cqlab/common.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace cqlab {

// Empirical distribution of a length-n string over the alphabet {1, ..., k},
// stored as integer counts (m_1, ..., m_k) with sum n.
class TypeComposition {
  public:
    // Placeholder composition (k = 1, n = 0) so aggregates holding one can be
    // default-constructed.
    TypeComposition() : counts_{0}, n_(0) {}

    explicit TypeComposition(std::vector<long long> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw Error("TypeComposition: empty alphabet");
        n_ = 0;
        for (long long m : counts_) {
            if (m < 0) throw Error("TypeComposition: negative count");
            n_ += m;
        }
    }

    int alphabet_size() const { return static_cast<int>(counts_.size()); }
    long long length() const { return n_; }
    const std::vector<long long>& counts() const { return counts_; }
    long long count(int symbol) const { return counts_.at(symbol - 1); }

    // Shannon entropy of the type, in nats.
    double entropy() const {
        double h = 0.0;
        for (long long m : counts_) {
            if (m == 0) continue;
            double p = static_cast<double>(m) / static_cast<double>(n_);
            h -= p * std::log(p);
        }
        return h;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i)
            p[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
        return p;
    }

    friend bool operator==(const TypeComposition& a, const TypeComposition& b) {
        return a.counts_ == b.counts_;
    }
    friend bool operator<(const TypeComposition& a, const TypeComposition& b) {
        return a.counts_ < b.counts_;
    }

  private:
    std::vector<long long> counts_;
    long long n_;
};

// Length-n string with symbols in {1, ..., k}.
class SequenceN {
  public:
    SequenceN(std::vector<int> symbols, int alphabet_size)
        : symbols_(std::move(symbols)), k_(alphabet_size) {
        if (k_ < 1) throw Error("SequenceN: empty alphabet");
        for (int s : symbols_)
            if (s < 1 || s > k_) throw Error("SequenceN: symbol out of alphabet bounds");
    }

    int length() const { return static_cast<int>(symbols_.size()); }
    int alphabet_size() const { return k_; }
    int operator[](int pos) const { return symbols_[pos]; }  // 0-based position
    const std::vector<int>& symbols() const { return symbols_; }

    friend bool operator==(const SequenceN& a, const SequenceN& b) {
        return a.k_ == b.k_ && a.symbols_ == b.symbols_;
    }
    friend bool operator<(const SequenceN& a, const SequenceN& b) {
        return a.symbols_ < b.symbols_;
    }

  private:
    std::vector<int> symbols_;
    int k_;
};

// Joint counts c[u][v] = #{i : x_i = u, y_i = v}. Row marginals reproduce the
// type of the conditioning string, so zero-probability rows stay unambiguous.
class ConditionalTypeMatrix {
  public:
    ConditionalTypeMatrix(std::vector<long long> joint_counts, int k)
        : counts_(std::move(joint_counts)), k_(k) {
        if (k_ < 1 || counts_.size() != static_cast<std::size_t>(k_) * k_)
            throw Error("ConditionalTypeMatrix: bad shape");
        for (long long c : counts_)
            if (c < 0) throw Error("ConditionalTypeMatrix: negative count");
    }

    static ConditionalTypeMatrix identity(const TypeComposition& p) {
        int k = p.alphabet_size();
        std::vector<long long> c(static_cast<std::size_t>(k) * k, 0);
        for (int u = 1; u <= k; ++u) c[(u - 1) * k + (u - 1)] = p.count(u);
        return ConditionalTypeMatrix(std::move(c), k);
    }

    int alphabet_size() const { return k_; }
    long long count(int u, int v) const { return counts_[(u - 1) * static_cast<long long>(k_) + (v - 1)]; }
    long long total() const { return std::accumulate(counts_.begin(), counts_.end(), 0LL); }

    std::vector<long long> row_marginals() const {
        std::vector<long long> m(k_, 0);
        for (int u = 0; u < k_; ++u)
            for (int v = 0; v < k_; ++v) m[u] += counts_[u * static_cast<long long>(k_) + v];
        return m;
    }

    bool is_identity() const {
        for (int u = 1; u <= k_; ++u)
            for (int v = 1; v <= k_; ++v)
                if (u != v && count(u, v) != 0) return false;
        return true;
    }

    friend bool operator==(const ConditionalTypeMatrix& a, const ConditionalTypeMatrix& b) {
        return a.k_ == b.k_ && a.counts_ == b.counts_;
    }
    friend bool operator<(const ConditionalTypeMatrix& a, const ConditionalTypeMatrix& b) {
        return a.counts_ < b.counts_;
    }

  private:
    std::vector<long long> counts_;  // row-major k x k
    int k_;
};

// ---------------------------------------------------------------------------
// Exact counting
// ---------------------------------------------------------------------------

namespace detail {

inline unsigned long long mul_checked(unsigned long long a, unsigned long long b) {
    if (b != 0 && a > std::numeric_limits<unsigned long long>::max() / b)
        throw Error("integer overflow in exact count");
    return a * b;
}

}  // namespace detail

// n! / (m_1! ... m_k!), computed exactly as a product of binomials.
inline unsigned long long multinomial(const std::vector<long long>& counts) {
    unsigned long long out = 1;
    long long seen = 0;
    for (long long m : counts) {
        for (long long i = 1; i <= m; ++i) {
            // out *= (seen + i) / i, kept integral at every step
            out = detail::mul_checked(out, static_cast<unsigned long long>(seen + i));
            out /= static_cast<unsigned long long>(i);
        }
        seen += m;
    }
    return out;
}

inline unsigned long long factorial(long long n) {
    unsigned long long out = 1;
    for (long long i = 2; i <= n; ++i) out = detail::mul_checked(out, i);
    return out;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// All types of length-n strings over {1..k}; deterministic order with m_1
// decreasing first (so (2,0), (1,1), (0,2) for n = k = 2).
inline std::vector<TypeComposition> enumerate_types(long long n, int k) {
    if (n < 0 || k < 1) throw Error("enumerate_types: need n >= 0, k >= 1");
    std::vector<TypeComposition> out;
    std::vector<long long> cur(k, 0);
    auto rec = [&](auto&& self, int pos, long long rest) -> void {
        if (pos == k - 1) {
            cur[pos] = rest;
            out.emplace_back(cur);
            return;
        }
        for (long long m = rest; m >= 0; --m) {
            cur[pos] = m;
            self(self, pos + 1, rest - m);
        }
    };
    rec(rec, 0, n);
    return out;
}

inline TypeComposition type_of(const SequenceN& x) {
    std::vector<long long> counts(x.alphabet_size(), 0);
    for (int s : x.symbols()) ++counts[s - 1];
    return TypeComposition(std::move(counts));
}

inline unsigned long long type_class_size(const TypeComposition& p) { return multinomial(p.counts()); }

// The sorted block string (1...1, 2...2, ...) with block lengths m_i; this is
// the lexicographically smallest element of the type class.
inline SequenceN canonical_sequence(const TypeComposition& p) {
    std::vector<int> symbols;
    symbols.reserve(static_cast<std::size_t>(p.length()));
    for (int a = 1; a <= p.alphabet_size(); ++a)
        for (long long i = 0; i < p.count(a); ++i) symbols.push_back(a);
    return SequenceN(std::move(symbols), p.alphabet_size());
}

// All strings of type P in lexicographic order. Refuses to materialize more
// than `lim.max_enumeration` sequences; the size itself is always exact.
inline std::vector<SequenceN> type_class(const TypeComposition& p,
                                         const Limits& lim = default_limits()) {
    unsigned long long size = type_class_size(p);
    if (size > lim.max_enumeration)
        throw CapExceeded("type_class: |T_P| = " + std::to_string(size) + " above enumeration cap");
    std::vector<SequenceN> out;
    out.reserve(size);
    std::vector<int> seq = canonical_sequence(p).symbols();
    do {
        out.emplace_back(seq, p.alphabet_size());
    } while (std::next_permutation(seq.begin(), seq.end()));
    return out;
}

inline double empirical_entropy(const SequenceN& x) {
    if (x.length() < 1) throw Error("empirical_entropy: empty sequence");
    return type_of(x).entropy();
}

inline ConditionalTypeMatrix conditional_type_of(const SequenceN& x, const SequenceN& y) {
    if (x.length() != y.length()) throw LengthMismatch("conditional_type_of: unequal lengths");
    int k = std::max(x.alphabet_size(), y.alphabet_size());
    std::vector<long long> c(static_cast<std::size_t>(k) * k, 0);
    for (int i = 0; i < x.length(); ++i) ++c[(x[i] - 1) * static_cast<long long>(k) + (y[i] - 1)];
    return ConditionalTypeMatrix(std::move(c), k);
}

// |T_V(x)| = prod_u multinomial(m_u; c_u1, ..., c_uk).
inline unsigned long long conditional_type_class_size(const SequenceN& x,
                                                      const ConditionalTypeMatrix& v) {
    TypeComposition px = type_of(x);
    int k = v.alphabet_size();
    if (px.alphabet_size() > k) throw InconsistentConditionalType("alphabet mismatch");
    auto rows = v.row_marginals();
    for (int u = 1; u <= k; ++u) {
        long long mu = u <= px.alphabet_size() ? px.count(u) : 0;
        if (rows[u - 1] != mu)
            throw InconsistentConditionalType("conditional type row marginals disagree with x");
    }
    unsigned long long out = 1;
    for (int u = 1; u <= k; ++u) {
        std::vector<long long> row(k);
        for (int w = 1; w <= k; ++w) row[w - 1] = v.count(u, w);
        out = detail::mul_checked(out, multinomial(row));
    }
    return out;
}

// All y compatible with the conditional type V given x, in lexicographic order.
inline std::vector<SequenceN> conditional_type_class(const SequenceN& x,
                                                     const ConditionalTypeMatrix& v,
                                                     const Limits& lim = default_limits()) {
    unsigned long long size = conditional_type_class_size(x, v);
    if (size > lim.max_enumeration)
        throw CapExceeded("conditional_type_class: size above enumeration cap");
    int k = v.alphabet_size();
    int n = x.length();

    // Positions of each conditioning symbol, then every arrangement of the
    // row multiset within each group of positions.
    std::vector<std::vector<int>> positions(k);
    for (int i = 0; i < n; ++i) positions[x[i] - 1].push_back(i);

    std::vector<std::vector<int>> rows(k);
    for (int u = 1; u <= k; ++u)
        for (int w = 1; w <= k; ++w)
            for (long long c = 0; c < v.count(u, w); ++c) rows[u - 1].push_back(w);

    std::vector<SequenceN> out;
    out.reserve(size);
    std::vector<int> cur(n, 1);
    auto rec = [&](auto&& self, int u) -> void {
        if (u == k) {
            out.emplace_back(cur, k);
            return;
        }
        std::vector<int>& arrangement = rows[u];
        std::sort(arrangement.begin(), arrangement.end());
        do {
            for (std::size_t j = 0; j < positions[u].size(); ++j)
                cur[positions[u][j]] = arrangement[j];
            self(self, u + 1);
        } while (std::next_permutation(arrangement.begin(), arrangement.end()));
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cqlab
