#pragma once

#include "cqlab/permaction.hpp"

#include <map>
#include <ostream>
#include <queue>

namespace cqlab {

// Schreier graph Gamma(S_n, S_n/S_{x_P}, S') realized on the type class: the
// coset space is identified with T_P through the coset bijection, so vertices
// are the sequences of T_P in lexicographic order.
struct SchreierGraph {
    std::vector<SequenceN> vertices;
    RMat transition;  // symmetric, doubly stochastic, entries multiples of 1/|S'|
    std::size_t degree = 0;
};

struct SpectralReport {
    double lambda = 0.0;  // max(lambda_2, -lambda_min)
    bool connected = false;
    bool bipartite_indicator = false;
    std::vector<double> eigenvalues;  // descending
};

inline SchreierGraph build_schreier(const TypeComposition& p, const PermMultiset& generators,
                                    const Limits& lim = default_limits()) {
    if (!generators.symmetric_flag || !generators.is_symmetric_multiset())
        throw NotSymmetricMultiset("build_schreier: generator multiset is not symmetric");
    SchreierGraph g;
    g.vertices = type_class(p, lim);
    g.degree = generators.size();
    const int m = static_cast<int>(g.vertices.size());

    std::map<SequenceN, int> index;
    for (int i = 0; i < m; ++i) index.emplace(g.vertices[i], i);

    g.transition = RMat::Zero(m, m);
    for (const auto& s : generators.elements) {
        for (int j = 0; j < m; ++j) {
            int i = index.at(apply(s, g.vertices[j]));
            g.transition(i, j) += 1.0;
        }
    }
    g.transition /= static_cast<double>(generators.size());
    return g;
}

inline bool graph_connected(const RMat& t) {
    const int m = static_cast<int>(t.rows());
    std::vector<char> seen(m, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int visited = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w = 0; w < m; ++w) {
            if (!seen[w] && t(w, v) > 0) {
                seen[w] = 1;
                ++visited;
                q.push(w);
            }
        }
    }
    return visited == m;
}

// 2-colorability over nonzero transitions; a self-loop is an odd cycle.
inline bool graph_bipartite(const RMat& t) {
    const int m = static_cast<int>(t.rows());
    for (int v = 0; v < m; ++v)
        if (t(v, v) > 0) return false;
    std::vector<int> color(m, -1);
    for (int start = 0; start < m; ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        std::queue<int> q;
        q.push(start);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w = 0; w < m; ++w) {
                if (t(w, v) <= 0) continue;
                if (color[w] == -1) {
                    color[w] = 1 - color[v];
                    q.push(w);
                } else if (color[w] == color[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

inline SpectralReport spectral_report(const SchreierGraph& g) {
    Eigen::SelfAdjointEigenSolver<RMat> solver(0.5 * (g.transition + g.transition.transpose()));
    if (solver.info() != Eigen::Success) throw Error("spectral_report: eigensolver failed");
    SpectralReport rep;
    const auto& ev = solver.eigenvalues();  // ascending
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
    if (rep.eigenvalues.size() == 1) {
        rep.lambda = 0.0;  // single vertex: no nontrivial eigenvalue
    } else {
        rep.lambda = std::max(rep.eigenvalues[1], -rep.eigenvalues.back());
        rep.lambda = std::max(0.0, rep.lambda);
    }
    rep.connected = graph_connected(g.transition);
    rep.bipartite_indicator = graph_bipartite(g.transition);
    return rep;
}

// Sample size |I| = ceil((log 4 / eps^2) log(2 |G/H| / delta)) of the random
// generator lemma, with |G/H| = |T_P|.
inline std::size_t expander_sample_size(const TypeComposition& p, double epsilon, double delta) {
    if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1))
        throw Error("expander_sample_size: need epsilon, delta in (0,1)");
    double cosets = static_cast<double>(type_class_size(p));
    double raw = (std::log(4.0) / (epsilon * epsilon)) * std::log(2.0 * cosets / delta);
    return static_cast<std::size_t>(std::ceil(raw));
}

// Uniform multiset of the lemma size, symmetrized; |result| = 2|I|.
inline PermMultiset random_expander_multiset(const TypeComposition& p, double epsilon,
                                             double delta, std::uint64_t rng_seed) {
    std::size_t count = expander_sample_size(p, epsilon, delta);
    return symmetrize(sample_uniform(static_cast<int>(p.length()), count, rng_seed));
}

// Retry random construction until the measured gap reaches the target.
// Deterministic given the seed: trial t uses the t-th derived stream. The
// pre-symmetrization sample size follows the lemma formula unless overridden.
inline std::pair<PermMultiset, SpectralReport> build_until_gap(const TypeComposition& p,
                                                               double lambda_target,
                                                               std::uint64_t rng_seed,
                                                               int max_retries = 64,
                                                               double delta = 0.5,
                                                               std::size_t size_override = 0,
                                                               const Limits& lim = default_limits()) {
    if (!(lambda_target > 0 && lambda_target < 1))
        throw Error("build_until_gap: lambda target must be in (0,1)");
    std::size_t count = size_override > 0 ? size_override
                                          : expander_sample_size(p, lambda_target, delta);
    if (count > lim.max_enumeration)
        throw CapExceeded("build_until_gap: lemma sample size above enumeration cap");
    Rng root(rng_seed);
    for (int trial = 0; trial < max_retries; ++trial) {
        std::uint64_t trial_seed = root.split(static_cast<std::uint64_t>(trial)).seed();
        PermMultiset s = symmetrize(sample_uniform(static_cast<int>(p.length()), count, trial_seed));
        SchreierGraph g = build_schreier(p, s, lim);
        SpectralReport rep = spectral_report(g);
        if (rep.lambda <= lambda_target) return {std::move(s), std::move(rep)};
    }
    throw RetriesExhausted("build_until_gap: no multiset reached the gap target after " +
                           std::to_string(max_retries) + " retries");
}

// Edge-list dump: header "n k degree", then one "i j multiplicity" line per
// unordered vertex pair with at least one edge (0-based indices).
inline void dump_edge_list(const SchreierGraph& g, std::ostream& os) {
    const int m = static_cast<int>(g.vertices.size());
    int n = m > 0 ? g.vertices.front().length() : 0;
    int k = m > 0 ? g.vertices.front().alphabet_size() : 0;
    os << n << ' ' << k << ' ' << g.degree << '\n';
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            long long mult = std::llround(g.transition(i, j) * static_cast<double>(g.degree));
            if (mult > 0) os << i << ' ' << j << ' ' << mult << '\n';
        }
    }
}

}  // namespace cqlab
