#pragma once

#include "cqlab/schreier.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <limits>
#include <sstream>

namespace cqlab {

// Constant-composition codebook; multiset semantics (repeated words allowed,
// mixtures weight by multiplicity).
struct Codebook {
    std::vector<SequenceN> words;
    TypeComposition P;
    double rate = 0.0;  // nats per symbol

    long long n() const { return P.length(); }
    std::size_t size() const { return words.size(); }
};

struct GoodCertificate {
    bool checked = false;
    double delta_effective = 0.0;  // nR - ln|L|
    double worst_ratio = 0.0;      // max over (x, V) of count / (|T_V(x)| e^{-n(H-R)})
    std::optional<SequenceN> worst_x;
    std::optional<ConditionalTypeMatrix> worst_v;
};

// Per-conditional-type occupancy check of the good-set definition: for every
// V realized by some y in L, |T_V(x) cap L| <= |T_V(x)| e^{-n(H-R)}. Classes
// not realized have zero intersection and hold trivially.
inline GoodCertificate verify_good_set(const std::vector<SequenceN>& set, const SequenceN& x,
                                       const TypeComposition& p, double rate) {
    GoodCertificate cert;
    const double n = static_cast<double>(p.length());
    const double h = p.entropy();
    cert.delta_effective = set.empty() ? std::numeric_limits<double>::infinity()
                                       : n * rate - std::log(static_cast<double>(set.size()));
    cert.checked = true;

    for (const auto& y : set) {
        if (!(type_of(y) == p)) {
            cert.checked = false;
            cert.worst_ratio = std::numeric_limits<double>::infinity();
            cert.worst_x = y;
            return cert;
        }
    }

    std::map<ConditionalTypeMatrix, long long> occupancy;
    for (const auto& y : set) ++occupancy[conditional_type_of(x, y)];

    for (const auto& [v, count] : occupancy) {
        double class_size = static_cast<double>(conditional_type_class_size(x, v));
        double threshold = class_size * std::exp(-n * (h - rate));
        double ratio = static_cast<double>(count) / threshold;
        if (ratio > cert.worst_ratio) {
            cert.worst_ratio = ratio;
            cert.worst_x = x;
            cert.worst_v = v;
        }
        if (ratio > 1.0 + 1e-12) cert.checked = false;
    }
    return cert;
}

// Good codebook: for every word, the remaining words form a good set for it.
inline GoodCertificate verify_good_codebook(const Codebook& m) {
    GoodCertificate cert;
    cert.checked = true;
    const double n = static_cast<double>(m.P.length());
    cert.delta_effective = m.words.empty()
                               ? std::numeric_limits<double>::infinity()
                               : n * m.rate - std::log(static_cast<double>(m.words.size()));
    for (std::size_t i = 0; i < m.words.size(); ++i) {
        std::vector<SequenceN> rest;
        rest.reserve(m.words.size() - 1);
        for (std::size_t j = 0; j < m.words.size(); ++j)
            if (j != i) rest.push_back(m.words[j]);
        GoodCertificate sub = verify_good_set(rest, m.words[i], m.P, m.rate);
        if (sub.worst_ratio > cert.worst_ratio) {
            cert.worst_ratio = sub.worst_ratio;
            cert.worst_x = sub.worst_x;
            cert.worst_v = sub.worst_v;
        }
        if (!sub.checked) cert.checked = false;
    }
    return cert;
}

// Randomized draw-and-check search for a good codebook of the requested size.
// Returns nullopt when the budget runs out.
inline std::optional<Codebook> search_good_codebook(const TypeComposition& p, double rate,
                                                    std::size_t target_size, int budget,
                                                    std::uint64_t rng_seed,
                                                    const Limits& lim = default_limits()) {
    if (target_size < 1) throw Error("search_good_codebook: target size must be >= 1");
    if (!(rate > 0.0) || rate >= p.entropy())
        throw Error("search_good_codebook: definition requires 0 < R < H(P)");
    auto klass = type_class(p, lim);
    if (target_size > klass.size()) return std::nullopt;

    Rng rng(rng_seed);
    std::vector<std::size_t> idx(klass.size());
    for (int attempt = 0; attempt < budget; ++attempt) {
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < target_size; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        Codebook candidate{{}, p, rate};
        for (std::size_t i = 0; i < target_size; ++i) candidate.words.push_back(klass[idx[i]]);
        std::sort(candidate.words.begin(), candidate.words.end());
        if (verify_good_codebook(candidate).checked) return candidate;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Radical spectral expander codebooks
// ---------------------------------------------------------------------------

struct ExpanderCodebook {
    Codebook book;
    PermMultiset generators;
    double lambda = 1.0;

    double lambda_target() const {
        return std::exp(-0.5 * static_cast<double>(book.P.length()) * book.rate);
    }
    // Realized size offset ln|M| - nR of the definition's second condition.
    double delta_realized() const {
        return std::log(static_cast<double>(book.words.size())) -
               static_cast<double>(book.P.length()) * book.rate;
    }
};

inline ExpanderCodebook build_expander_codebook(const TypeComposition& p, double rate,
                                                std::uint64_t rng_seed, int max_retries = 64,
                                                double delta = 0.5,
                                                const Limits& lim = default_limits()) {
    if (type_class_size(p) < 2)
        throw Error("build_expander_codebook: degenerate type class (no positive R < H exists)");
    if (!(rate > 0.0) || rate >= p.entropy())
        throw Error("build_expander_codebook: definition requires 0 < R < H(P)");
    double target = std::exp(-0.5 * static_cast<double>(p.length()) * rate);
    auto [gens, rep] = build_until_gap(p, target, rng_seed, max_retries, delta, 0, lim);
    ExpanderCodebook out;
    out.book.P = p;
    out.book.rate = rate;
    SequenceN xp = canonical_sequence(p);
    out.book.words.reserve(gens.size());
    for (const auto& s : gens.elements) out.book.words.push_back(apply(s, xp));
    out.generators = std::move(gens);
    out.lambda = rep.lambda;
    return out;
}

// Re-derives everything from the generators: multiset equality of words,
// symmetry, and the gap condition by an independent eigensolve.
inline bool verify_radical_expander(const ExpanderCodebook& book,
                                    const Limits& lim = default_limits()) {
    if (book.book.words.size() != book.generators.size()) return false;
    if (!book.generators.is_symmetric_multiset()) return false;

    SequenceN xp = canonical_sequence(book.book.P);
    std::vector<SequenceN> derived;
    derived.reserve(book.generators.size());
    for (const auto& s : book.generators.elements) derived.push_back(apply(s, xp));
    std::vector<SequenceN> stored = book.book.words;
    std::sort(derived.begin(), derived.end());
    std::sort(stored.begin(), stored.end());
    if (!(derived == stored)) return false;

    PermMultiset gens = book.generators;
    gens.symmetric_flag = true;
    SchreierGraph g = build_schreier(book.book.P, gens, lim);
    SpectralReport rep = spectral_report(g);
    if (std::abs(rep.lambda - book.lambda) > 1e-10) return false;
    return rep.lambda <= book.lambda_target() + 1e-12;
}

// ---------------------------------------------------------------------------
// Setwise-good codebooks
// ---------------------------------------------------------------------------

struct SetwiseCodebook {
    std::vector<ExpanderCodebook> subbooks;  // J subbooks, each size K, rate R_E
    std::vector<std::vector<int>> excluded;  // word indices L^j inside subbook j
    TypeComposition P;
    double rate_B = 0.0;
    double rate_E = 0.0;
    double alpha = 0.0;  // measured max_j |L^j| / K
    double beta = 1.0;   // occupancy relaxation factor used for exclusion

    int J() const { return static_cast<int>(subbooks.size()); }
    std::size_t K() const { return subbooks.empty() ? 0 : subbooks.front().book.words.size(); }

    std::vector<SequenceN> words_outside(int j) const {
        std::vector<SequenceN> out;
        for (int l = 0; l < J(); ++l) {
            if (l == j) continue;
            out.insert(out.end(), subbooks[l].book.words.begin(), subbooks[l].book.words.end());
        }
        return out;
    }

    std::vector<SequenceN> kept_words(int j) const {
        std::vector<char> drop(subbooks[j].book.words.size(), 0);
        for (int idx : excluded[j]) drop[idx] = 1;
        std::vector<SequenceN> out;
        for (std::size_t i = 0; i < subbooks[j].book.words.size(); ++i)
            if (!drop[i]) out.push_back(subbooks[j].book.words[i]);
        return out;
    }

    double delta1_realized() const {
        return static_cast<double>(P.length()) * rate_B -
               std::log(static_cast<double>(K() * (J() - 1)));
    }
};

// Worst occupancy ratio of x against a multiset of other words, normalized by
// |T_V(x)| e^{-n(H-R)}; the third condition of the setwise definition asks
// for this to stay below beta.
inline double worst_occupancy_ratio(const SequenceN& x, const std::vector<SequenceN>& others,
                                    const TypeComposition& p, double rate) {
    std::map<ConditionalTypeMatrix, long long> occupancy;
    for (const auto& y : others) ++occupancy[conditional_type_of(x, y)];
    const double n = static_cast<double>(p.length());
    const double h = p.entropy();
    double worst = 0.0;
    for (const auto& [v, count] : occupancy) {
        double class_size = static_cast<double>(conditional_type_class_size(x, v));
        double threshold = class_size * std::exp(-n * (h - rate));
        worst = std::max(worst, static_cast<double>(count) / threshold);
    }
    return worst;
}

struct SetwiseReport {
    bool ok = false;
    double alpha_measured = 0.0;
    double worst_kept_ratio = 0.0;  // max over kept words; must be <= beta
    double delta1_realized = 0.0;
};

// Core conditions 1-3 on plain word lists; also used for the equivalence with
// good codebooks via singleton subbooks.
inline SetwiseReport verify_setwise_conditions(const std::vector<std::vector<SequenceN>>& subbooks,
                                               const std::vector<std::vector<int>>& excluded,
                                               const TypeComposition& p, double rate_B,
                                               double alpha, double beta) {
    SetwiseReport rep;
    const int j_count = static_cast<int>(subbooks.size());
    if (j_count < 1 || excluded.size() != subbooks.size()) return rep;
    const std::size_t k_count = subbooks.front().size();
    rep.ok = true;

    for (const auto& kj : subbooks) {
        if (kj.size() != k_count) rep.ok = false;
        for (const auto& x : kj)
            if (!(type_of(x) == p)) rep.ok = false;
    }
    rep.delta1_realized = static_cast<double>(p.length()) * rate_B -
                          std::log(static_cast<double>(k_count * (j_count - 1)));

    for (int j = 0; j < j_count; ++j) {
        rep.alpha_measured = std::max(
            rep.alpha_measured, static_cast<double>(excluded[j].size()) / static_cast<double>(k_count));
        if (static_cast<double>(excluded[j].size()) > alpha * static_cast<double>(k_count) + 1e-9)
            rep.ok = false;

        std::vector<SequenceN> others;
        for (int l = 0; l < j_count; ++l) {
            if (l == j) continue;
            others.insert(others.end(), subbooks[l].begin(), subbooks[l].end());
        }
        std::vector<char> drop(k_count, 0);
        for (int idx : excluded[j]) drop[idx] = 1;
        for (std::size_t i = 0; i < k_count; ++i) {
            if (drop[i]) continue;
            double ratio = worst_occupancy_ratio(subbooks[j][i], others, p, rate_B);
            rep.worst_kept_ratio = std::max(rep.worst_kept_ratio, ratio);
            if (ratio > beta + 1e-9) rep.ok = false;
        }
    }
    return rep;
}

inline SetwiseReport verify_setwise_good(const SetwiseCodebook& book, double alpha, double beta) {
    std::vector<std::vector<SequenceN>> subbooks;
    for (const auto& sb : book.subbooks) subbooks.push_back(sb.book.words);
    return verify_setwise_conditions(subbooks, book.excluded, book.P, book.rate_B, alpha, beta);
}

// Isotropy-averaged codeword density per conditional-type class:
// (1/|S_x|) sum_s p_L(s(y)) = |T_V(x) cap L| / (|T_V(x)| |L|).
inline std::map<ConditionalTypeMatrix, double> collision_average(const std::vector<SequenceN>& set,
                                                                 const SequenceN& x) {
    std::map<ConditionalTypeMatrix, long long> occupancy;
    for (const auto& y : set) ++occupancy[conditional_type_of(x, y)];
    std::map<ConditionalTypeMatrix, double> out;
    const double size = static_cast<double>(set.size());
    for (const auto& [v, count] : occupancy) {
        double class_size = static_cast<double>(conditional_type_class_size(x, v));
        out.emplace(v, static_cast<double>(count) / (class_size * size));
    }
    return out;
}

// Lemma-11-style construction at desk scale: build 2J candidate expander
// subbooks at rate R_E, score each against the union of the other candidates'
// conditional-type occupancies at level beta, keep the J least-violating
// (ties by index), then record the surviving violations as exclusions.
inline SetwiseCodebook build_setwise_codebook(const TypeComposition& p, double rate_B,
                                              double rate_E, std::uint64_t rng_seed, int j_count = 2,
                                              double beta = 4.0, int max_retries = 64,
                                              const Limits& lim = default_limits()) {
    if (!(rate_E > 0.0) || !(rate_E < rate_B) || !(rate_B < p.entropy()))
        throw Error("build_setwise_codebook: need 0 < R_E < R_B < H(P)");
    if (j_count < 2) throw Error("build_setwise_codebook: need at least 2 subbooks");

    Rng root(rng_seed);
    std::vector<ExpanderCodebook> candidates;
    candidates.reserve(2 * j_count);
    for (int c = 0; c < 2 * j_count; ++c)
        candidates.push_back(build_expander_codebook(
            p, rate_E, root.split(static_cast<std::uint64_t>(c)).seed(), max_retries, 0.5, lim));

    auto violations_against = [&](int j, const std::vector<ExpanderCodebook>& pool,
                                  const std::vector<int>& members) {
        std::vector<SequenceN> others;
        for (int l : members) {
            if (l == j) continue;
            others.insert(others.end(), pool[l].book.words.begin(), pool[l].book.words.end());
        }
        std::vector<int> bad;
        const auto& words = pool[j].book.words;
        for (std::size_t i = 0; i < words.size(); ++i)
            if (worst_occupancy_ratio(words[i], others, p, rate_B) > beta) bad.push_back(static_cast<int>(i));
        return bad;
    };

    std::vector<int> all(2 * j_count);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::pair<std::size_t, int>> scored;  // (violations, index)
    for (int j = 0; j < 2 * j_count; ++j)
        scored.emplace_back(violations_against(j, candidates, all).size(), j);
    std::stable_sort(scored.begin(), scored.end());

    std::vector<int> kept;
    for (int j = 0; j < j_count; ++j) kept.push_back(scored[j].second);
    std::sort(kept.begin(), kept.end());

    SetwiseCodebook out{{}, {}, p, rate_B, rate_E, 0.0, beta};
    for (int j : kept) out.subbooks.push_back(candidates[j]);
    for (int jj = 0; jj < j_count; ++jj) {
        std::vector<int> members(j_count);
        std::iota(members.begin(), members.end(), 0);
        out.excluded.push_back(violations_against(jj, out.subbooks, members));
        out.alpha = std::max(out.alpha, static_cast<double>(out.excluded.back().size()) /
                                            static_cast<double>(out.K()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization: structured text with a header and words as integer rows.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_words(std::ostream& os, const std::vector<SequenceN>& words) {
    os << "words " << words.size() << '\n';
    for (const auto& w : words) {
        for (int i = 0; i < w.length(); ++i) os << (i ? " " : "") << w[i];
        os << '\n';
    }
}

inline void write_generators(std::ostream& os, const PermMultiset& gens) {
    os << "generators " << gens.size() << '\n';
    for (const auto& s : gens.elements) {
        auto line = s.one_line();
        for (std::size_t i = 0; i < line.size(); ++i) os << (i ? " " : "") << line[i];
        os << '\n';
    }
}

struct CodebookReader {
    std::istream& is;
    std::string expect_key(const std::string& key) {
        std::string line;
        if (!std::getline(is, line)) throw Error("codebook file: unexpected end of file");
        if (line.rfind(key + " ", 0) != 0 && line != key)
            throw Error("codebook file: expected '" + key + "', got '" + line + "'");
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
    }
    std::vector<SequenceN> read_words(int n, int k) {
        std::size_t count = std::stoull(expect_key("words"));
        std::vector<SequenceN> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::string line;
            if (!std::getline(is, line)) throw Error("codebook file: truncated word list");
            std::istringstream row(line);
            std::vector<int> sym(n);
            for (int j = 0; j < n; ++j) row >> sym[j];
            out.emplace_back(sym, k);
        }
        return out;
    }
    PermMultiset read_generators(int n) {
        std::size_t count = std::stoull(expect_key("generators"));
        PermMultiset out;
        out.symmetric_flag = true;
        out.elements.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::string line;
            if (!std::getline(is, line)) throw Error("codebook file: truncated generator list");
            std::istringstream row(line);
            std::vector<int> img(n);
            for (int j = 0; j < n; ++j) row >> img[j];
            out.elements.push_back(Permutation::from_one_line(img));
        }
        return out;
    }
};

inline TypeComposition read_header(CodebookReader& r, int& n, int& k) {
    n = std::stoi(r.expect_key("n"));
    k = std::stoi(r.expect_key("k"));
    std::istringstream prow(r.expect_key("P"));
    std::vector<long long> counts(k);
    for (int i = 0; i < k; ++i) prow >> counts[i];
    return TypeComposition(counts);
}

}  // namespace detail

inline void save_codebook(const Codebook& m, std::ostream& os) {
    os << "cqlab-codebook v1\nkind good\n";
    os << "n " << m.P.length() << "\nk " << m.P.alphabet_size() << "\nP";
    for (long long c : m.P.counts()) os << ' ' << c;
    os << "\nR " << detail::fmt_double(m.rate) << '\n';
    detail::write_words(os, m.words);
}

inline void save_codebook(const ExpanderCodebook& m, std::ostream& os) {
    os << "cqlab-codebook v1\nkind expander\n";
    os << "n " << m.book.P.length() << "\nk " << m.book.P.alphabet_size() << "\nP";
    for (long long c : m.book.P.counts()) os << ' ' << c;
    os << "\nR " << detail::fmt_double(m.book.rate) << '\n';
    detail::write_words(os, m.book.words);
    os << "lambda " << detail::fmt_double(m.lambda) << '\n';
    detail::write_generators(os, m.generators);
}

inline void save_codebook(const SetwiseCodebook& m, std::ostream& os) {
    os << "cqlab-codebook v1\nkind setwise\n";
    os << "n " << m.P.length() << "\nk " << m.P.alphabet_size() << "\nP";
    for (long long c : m.P.counts()) os << ' ' << c;
    os << "\nRB " << detail::fmt_double(m.rate_B) << "\nRE " << detail::fmt_double(m.rate_E)
       << "\nJ " << m.J() << "\nalpha " << detail::fmt_double(m.alpha) << "\nbeta "
       << detail::fmt_double(m.beta) << '\n';
    for (int j = 0; j < m.J(); ++j) {
        os << "subbook " << j << '\n';
        os << "lambda " << detail::fmt_double(m.subbooks[j].lambda) << '\n';
        detail::write_words(os, m.subbooks[j].book.words);
        detail::write_generators(os, m.subbooks[j].generators);
        os << "excluded " << m.excluded[j].size();
        for (int idx : m.excluded[j]) os << ' ' << idx;
        os << '\n';
    }
}

template <typename BookT>
void save_codebook_file(const BookT& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open codebook file for writing: " + path);
    save_codebook(m, os);
}

inline std::string peek_codebook_kind(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open codebook file: " + path);
    std::string magic, kindline;
    std::getline(is, magic);
    std::getline(is, kindline);
    if (magic != "cqlab-codebook v1" || kindline.rfind("kind ", 0) != 0)
        throw Error("not a cqlab codebook file: " + path);
    return kindline.substr(5);
}

inline Codebook load_good_codebook(std::istream& is) {
    detail::CodebookReader r{is};
    r.expect_key("cqlab-codebook");
    if (r.expect_key("kind") != "good") throw Error("codebook file: expected kind good");
    int n, k;
    TypeComposition p = detail::read_header(r, n, k);
    double rate = std::stod(r.expect_key("R"));
    return Codebook{r.read_words(n, k), p, rate};
}

inline ExpanderCodebook load_expander_codebook(std::istream& is) {
    detail::CodebookReader r{is};
    r.expect_key("cqlab-codebook");
    if (r.expect_key("kind") != "expander") throw Error("codebook file: expected kind expander");
    int n, k;
    TypeComposition p = detail::read_header(r, n, k);
    double rate = std::stod(r.expect_key("R"));
    ExpanderCodebook out;
    out.book = Codebook{r.read_words(n, k), p, rate};
    out.lambda = std::stod(r.expect_key("lambda"));
    out.generators = r.read_generators(n);
    return out;
}

inline SetwiseCodebook load_setwise_codebook(std::istream& is) {
    detail::CodebookReader r{is};
    r.expect_key("cqlab-codebook");
    if (r.expect_key("kind") != "setwise") throw Error("codebook file: expected kind setwise");
    int n, k;
    TypeComposition p = detail::read_header(r, n, k);
    double rate_B = std::stod(r.expect_key("RB"));
    double rate_E = std::stod(r.expect_key("RE"));
    int j_count = std::stoi(r.expect_key("J"));
    double alpha = std::stod(r.expect_key("alpha"));
    double beta = std::stod(r.expect_key("beta"));
    SetwiseCodebook out{{}, {}, p, rate_B, rate_E, alpha, beta};
    for (int j = 0; j < j_count; ++j) {
        r.expect_key("subbook");
        ExpanderCodebook sb;
        sb.lambda = std::stod(r.expect_key("lambda"));
        sb.book.P = p;
        sb.book.rate = rate_E;
        sb.book.words = r.read_words(n, k);
        sb.generators = r.read_generators(n);
        out.subbooks.push_back(std::move(sb));
        std::istringstream ex(r.expect_key("excluded"));
        std::size_t count;
        ex >> count;
        std::vector<int> idxs(count);
        for (std::size_t i = 0; i < count; ++i) ex >> idxs[i];
        out.excluded.push_back(std::move(idxs));
    }
    return out;
}

inline Codebook load_good_codebook(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open codebook file: " + path);
    return load_good_codebook(is);
}

inline ExpanderCodebook load_expander_codebook(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open codebook file: " + path);
    return load_expander_codebook(is);
}

inline SetwiseCodebook load_setwise_codebook(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open codebook file: " + path);
    return load_setwise_codebook(is);
}

}  // namespace cqlab
