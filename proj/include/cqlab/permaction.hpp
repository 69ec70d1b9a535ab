#pragma once

#include "cqlab/typelab.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace cqlab {

// Element of S_n in one-line notation. Internally 0-based: image(i) is the
// position that position i maps to.
class Permutation {
  public:
    static Permutation identity(int n) {
        std::vector<int> img(n);
        std::iota(img.begin(), img.end(), 0);
        return Permutation(std::move(img));
    }

    // One-line notation over {1..n}, as printed in serialized files.
    static Permutation from_one_line(const std::vector<int>& one_based) {
        std::vector<int> img(one_based.size());
        for (std::size_t i = 0; i < one_based.size(); ++i) img[i] = one_based[i] - 1;
        return Permutation(std::move(img));
    }

    explicit Permutation(std::vector<int> images) : img_(std::move(images)) {
        std::vector<char> seen(img_.size(), 0);
        for (int v : img_) {
            if (v < 0 || v >= static_cast<int>(img_.size()) || seen[v])
                throw Error("Permutation: not a bijection");
            seen[v] = 1;
        }
    }

    int degree() const { return static_cast<int>(img_.size()); }
    int image(int i) const { return img_[i]; }
    const std::vector<int>& images() const { return img_; }

    std::vector<int> one_line() const {
        std::vector<int> out(img_.size());
        for (std::size_t i = 0; i < img_.size(); ++i) out[i] = img_[i] + 1;
        return out;
    }

    Permutation inverse() const {
        std::vector<int> inv(img_.size());
        for (std::size_t i = 0; i < img_.size(); ++i) inv[img_[i]] = static_cast<int>(i);
        return Permutation(std::move(inv));
    }

    // Composition (s * t)(i) = s(t(i)).
    friend Permutation operator*(const Permutation& s, const Permutation& t) {
        if (s.degree() != t.degree()) throw LengthMismatch("Permutation product: degree mismatch");
        std::vector<int> img(s.degree());
        for (int i = 0; i < s.degree(); ++i) img[i] = s.img_[t.img_[i]];
        return Permutation(std::move(img));
    }

    bool is_identity() const {
        for (int i = 0; i < degree(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    // Cycle type as a partition of n (descending).
    std::vector<int> cycle_type() const {
        std::vector<char> seen(img_.size(), 0);
        std::vector<int> lens;
        for (int i = 0; i < degree(); ++i) {
            if (seen[i]) continue;
            int len = 0;
            for (int j = i; !seen[j]; j = img_[j]) {
                seen[j] = 1;
                ++len;
            }
            lens.push_back(len);
        }
        std::sort(lens.rbegin(), lens.rend());
        return lens;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.img_ == b.img_; }
    friend bool operator<(const Permutation& a, const Permutation& b) { return a.img_ < b.img_; }

  private:
    std::vector<int> img_;
};

// Position-permuting action: result[s(i)] = x[i], i.e. result[i] = x[s^{-1}(i)].
// With this convention apply(s*t, x) = apply(s, apply(t, x)).
inline SequenceN apply(const Permutation& s, const SequenceN& x) {
    if (s.degree() != x.length()) throw LengthMismatch("apply: permutation/sequence length mismatch");
    std::vector<int> out(x.length());
    for (int i = 0; i < x.length(); ++i) out[s.image(i)] = x[i];
    return SequenceN(std::move(out), x.alphabet_size());
}

// Ordered multiset of permutations; `symmetric` means the multiset equals its
// inverse-closure as a multiset.
struct PermMultiset {
    std::vector<Permutation> elements;
    bool symmetric_flag = false;

    std::size_t size() const { return elements.size(); }

    bool is_symmetric_multiset() const {
        std::vector<Permutation> a = elements;
        std::vector<Permutation> b;
        b.reserve(elements.size());
        for (const auto& s : elements) b.push_back(s.inverse());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }
};

inline PermMultiset symmetrize(const PermMultiset& s) {
    PermMultiset out;
    out.elements.reserve(2 * s.elements.size());
    for (const auto& g : s.elements) out.elements.push_back(g);
    for (const auto& g : s.elements) out.elements.push_back(g.inverse());
    out.symmetric_flag = true;
    return out;
}

// The stable order-preserving matching: the i-th occurrence of each symbol in
// x_from maps to the i-th occurrence of that symbol in x_to. Deterministic;
// any permutation with apply(s, x_from) = x_to would do.
inline Permutation find_permutation_to(const SequenceN& x_from, const SequenceN& x_to) {
    if (!(type_of(x_from) == type_of(x_to)))
        throw TypeMismatch("find_permutation_to: sequences have different types");
    int k = x_from.alphabet_size();
    std::vector<std::vector<int>> to_positions(k);
    for (int i = 0; i < x_to.length(); ++i) to_positions[x_to[i] - 1].push_back(i);
    std::vector<int> next(k, 0);
    std::vector<int> img(x_from.length());
    for (int i = 0; i < x_from.length(); ++i) {
        int sym = x_from[i] - 1;
        img[i] = to_positions[sym][next[sym]++];
    }
    return Permutation(std::move(img));
}

// |S_x| = prod_i m_i!.
inline unsigned long long isotropy_size(const SequenceN& x) {
    TypeComposition p = type_of(x);
    unsigned long long out = 1;
    for (long long m : p.counts()) out = detail::mul_checked(out, factorial(m));
    return out;
}

// All permutations fixing x: independent permutations within each block of
// equal symbols.
inline std::vector<Permutation> enumerate_isotropy(const SequenceN& x,
                                                   const Limits& lim = default_limits()) {
    unsigned long long size = isotropy_size(x);
    if (size > lim.max_enumeration)
        throw CapExceeded("enumerate_isotropy: group order above enumeration cap");
    int k = x.alphabet_size();
    std::vector<std::vector<int>> positions(k);
    for (int i = 0; i < x.length(); ++i) positions[x[i] - 1].push_back(i);

    std::vector<Permutation> out;
    out.reserve(size);
    std::vector<int> img(x.length());
    std::iota(img.begin(), img.end(), 0);
    std::vector<std::vector<int>> arr = positions;  // arrangement per symbol block
    auto rec = [&](auto&& self, int sym) -> void {
        if (sym == k) {
            out.emplace_back(img);
            return;
        }
        std::vector<int>& a = arr[sym];
        std::sort(a.begin(), a.end());
        do {
            for (std::size_t j = 0; j < positions[sym].size(); ++j) img[positions[sym][j]] = a[j];
            self(self, sym + 1);
        } while (std::next_permutation(a.begin(), a.end()));
    };
    rec(rec, 0);
    return out;
}

// Coset representatives of S_n / S_{x_P} paired with the type-class element
// each maps x_P to; the sequence column enumerates T_P exactly once.
inline std::vector<std::pair<Permutation, SequenceN>> coset_transversal(
    const TypeComposition& p, const Limits& lim = default_limits()) {
    std::vector<SequenceN> klass = type_class(p, lim);
    SequenceN xp = canonical_sequence(p);
    std::vector<std::pair<Permutation, SequenceN>> out;
    out.reserve(klass.size());
    for (const auto& x : klass) out.emplace_back(find_permutation_to(xp, x), x);
    return out;
}

// Fisher-Yates over the library RNG: exact uniform sampling from S_n.
inline Permutation sample_permutation(int n, Rng& rng) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(img[i], img[j]);
    }
    return Permutation(std::move(img));
}

inline PermMultiset sample_uniform(int n, std::size_t count, std::uint64_t rng_seed) {
    if (count < 1) throw Error("sample_uniform: count must be >= 1");
    Rng rng(rng_seed);
    PermMultiset out;
    out.elements.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.elements.push_back(sample_permutation(n, rng));
    return out;
}

// All of S_n in lexicographic order; capped by max_group_order.
inline std::vector<Permutation> all_permutations(int n, const Limits& lim = default_limits()) {
    unsigned long long order = factorial(n);
    if (order > static_cast<unsigned long long>(lim.max_group_order))
        throw CapExceeded("all_permutations: group order above cap");
    std::vector<Permutation> out;
    out.reserve(order);
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    do {
        out.emplace_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

}  // namespace cqlab
