#pragma once

#include "cqlab/schurweyl.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <vector>

namespace cqlab {

inline void validate_density(const Mat& rho, double atol = 1e-8) {
    if (rho.rows() != rho.cols()) throw DimMismatch("density operator must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > atol)
        throw Error("density operator is not Hermitian within tolerance");
    if (std::abs(rho.trace().real() - 1.0) > atol || std::abs(rho.trace().imag()) > atol)
        throw Error("density operator trace differs from 1");
    if (min_eigenvalue(rho) < -atol) throw Error("density operator has a negative eigenvalue");
}

// Classical-quantum channel: symbol x in {1..k} -> density operator W(x). A
// joint channel on B(x)E declares d_E > 0 and d_out = d_B * d_E.
class CqChannel {
  public:
    CqChannel(std::vector<Mat> outputs, int d_B, int d_E = 0)
        : outputs_(std::move(outputs)), d_B_(d_B), d_E_(d_E) {
        if (outputs_.empty()) throw Error("CqChannel: empty alphabet");
        int dim = dim_out();
        for (const auto& w : outputs_) {
            if (w.rows() != dim || w.cols() != dim)
                throw DimMismatch("CqChannel: output dimension mismatch");
            validate_density(w);
        }
    }

    int alphabet_size() const { return static_cast<int>(outputs_.size()); }
    int d_B() const { return d_B_; }
    int d_E() const { return d_E_; }
    bool joint() const { return d_E_ > 0; }
    int dim_out() const { return d_E_ > 0 ? d_B_ * d_E_ : d_B_; }
    const Mat& output(int symbol) const { return outputs_.at(symbol - 1); }
    const std::vector<Mat>& outputs() const { return outputs_; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["alphabet_size"] = alphabet_size();
        j["d_B"] = d_B_;
        if (d_E_ > 0) j["d_E"] = d_E_;
        j["outputs"] = nlohmann::json::array();
        for (int x = 1; x <= alphabet_size(); ++x) {
            const Mat& w = output(x);
            nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
                for (Eigen::Index c = 0; c < w.cols(); ++c) {
                    rrow.push_back(w(r, c).real());
                    irow.push_back(w(r, c).imag());
                }
                re.push_back(rrow);
                im.push_back(irow);
            }
            j["outputs"].push_back({{"symbol", x}, {"real", re}, {"imag", im}});
        }
        return j;
    }

    static CqChannel from_json(const nlohmann::json& j) {
        int k = j.at("alphabet_size").get<int>();
        int d_B = j.at("d_B").get<int>();
        int d_E = j.contains("d_E") ? j.at("d_E").get<int>() : 0;
        int dim = d_E > 0 ? d_B * d_E : d_B;
        std::vector<Mat> outputs(k);
        for (const auto& entry : j.at("outputs")) {
            int sym = entry.at("symbol").get<int>();
            if (sym < 1 || sym > k) throw Error("channel file: symbol out of range");
            const auto& re = entry.at("real");
            const auto& im = entry.at("imag");
            Mat w(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    w(r, c) = Cplx(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
            outputs[sym - 1] = w;
        }
        for (const auto& w : outputs)
            if (w.size() == 0) throw Error("channel file: missing output for some symbol");
        return CqChannel(std::move(outputs), d_B, d_E);
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw Error("cannot open channel file for writing: " + path);
        os << to_json().dump(2) << '\n';
    }

    static CqChannel load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error("cannot open channel file: " + path);
        nlohmann::json j;
        is >> j;
        return from_json(j);
    }

  private:
    std::vector<Mat> outputs_;
    int d_B_;
    int d_E_;
};

// Single-letter partial trace of a bipartite operator on B x E.
inline Mat partial_trace_single(const Mat& rho, int d_B, int d_E, bool keep_B) {
    if (rho.rows() != static_cast<Eigen::Index>(d_B) * d_E || rho.rows() != rho.cols())
        throw DimMismatch("partial_trace: dimensions do not factorize as declared");
    int dk = keep_B ? d_B : d_E;
    int dt = keep_B ? d_E : d_B;
    Mat out = Mat::Zero(dk, dk);
    for (int i = 0; i < dk; ++i)
        for (int j = 0; j < dk; ++j)
            for (int t = 0; t < dt; ++t) {
                int row = keep_B ? i * d_E + t : t * d_E + i;
                int col = keep_B ? j * d_E + t : t * d_E + j;
                out(i, j) += rho(row, col);
            }
    return out;
}

// Partial trace over every E factor of an operator on (B x E)^{\otimes n}.
inline Mat partial_trace(const Mat& rho, int d_B, int d_E, int n, bool keep_B,
                         const Limits& lim = default_limits()) {
    long long df = static_cast<long long>(d_B) * d_E;
    long long dim = 1;
    for (int i = 0; i < n; ++i) {
        dim *= df;
        if (dim > lim.max_dim) throw CapExceeded("partial_trace: dimension above cap");
    }
    if (rho.rows() != dim || rho.cols() != dim)
        throw DimMismatch("partial_trace: dimensions do not factorize as declared");
    int dk = keep_B ? d_B : d_E;
    long long out_dim = 1;
    for (int i = 0; i < n; ++i) out_dim *= dk;
    int dt = keep_B ? d_E : d_B;
    long long t_dim = 1;
    for (int i = 0; i < n; ++i) t_dim *= dt;

    auto full_index = [&](long long kept, long long traced) {
        // digits per factor: kept digit k_i, traced digit t_i; factor index is
        // b_i * d_E + e_i with factor 0 most significant.
        long long idx = 0;
        long long kw = out_dim, tw = t_dim;
        for (int i = 0; i < n; ++i) {
            kw /= dk;
            tw /= dt;
            long long kd = (kept / kw) % dk;
            long long td = (traced / tw) % dt;
            long long b = keep_B ? kd : td;
            long long e = keep_B ? td : kd;
            idx = idx * df + (b * d_E + e);
        }
        return idx;
    };

    Mat out = Mat::Zero(out_dim, out_dim);
    for (long long i = 0; i < out_dim; ++i)
        for (long long j = 0; j < out_dim; ++j)
            for (long long t = 0; t < t_dim; ++t) out(i, j) += rho(full_index(i, t), full_index(j, t));
    return out;
}

// Marginal channels W_B, W_E of a joint channel.
inline CqChannel marginal_channel(const CqChannel& w, bool keep_B) {
    if (!w.joint()) throw Error("marginal_channel: channel has no E system");
    std::vector<Mat> outs;
    outs.reserve(w.alphabet_size());
    for (int x = 1; x <= w.alphabet_size(); ++x)
        outs.push_back(partial_trace_single(w.output(x), w.d_B(), w.d_E(), keep_B));
    return CqChannel(std::move(outs), keep_B ? w.d_B() : w.d_E());
}

// W^{\otimes n}(x) = W(x_1) x ... x W(x_n).
inline Mat channel_output_product(const CqChannel& w, const SequenceN& x,
                                  const Limits& lim = default_limits()) {
    if (x.alphabet_size() > w.alphabet_size())
        throw Error("channel_output_product: sequence alphabet larger than channel alphabet");
    tensor_dim_checked(w.dim_out(), x.length(), lim);
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < x.length(); ++i) out = kron(out, w.output(x[i]));
    return out;
}

// Target state of resolvability: uniform mixture of W^{\otimes n}(x) over T_P.
inline Mat target_state(const CqChannel& w, const TypeComposition& p,
                        const Limits& lim = default_limits()) {
    auto klass = type_class(p, lim);
    long long dim = tensor_dim_checked(w.dim_out(), static_cast<int>(p.length()), lim);
    Mat out = Mat::Zero(dim, dim);
    for (const auto& x : klass) out += channel_output_product(w, x, lim);
    out /= static_cast<double>(klass.size());
    return hermitize(out);
}

// Schatten alpha-norm via singular values.
inline double schatten_norm(const Mat& t, double alpha) {
    if (alpha < 1.0) throw Error("schatten_norm: alpha must be >= 1");
    Eigen::JacobiSVD<Mat> svd(t);
    const auto& sv = svd.singularValues();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), alpha);
    return std::pow(acc, 1.0 / alpha);
}

inline double trace_distance(const Mat& rho, const Mat& sigma) {
    return hermitian_trace_norm(rho - sigma);
}

// Operator division A/B = int_0^inf (B+t)^{-1} A (B+t)^{-1} dt, evaluated in
// closed form in B's eigenbasis: the integral kernel is the first divided
// difference of log, (ln b_i - ln b_j)/(b_i - b_j), with 1/b on the diagonal.
inline Mat operator_division(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimMismatch("operator_division: shape mismatch");
    Eigh eb = eigh(b);
    double bnorm = eb.values.cwiseAbs().maxCoeff();
    if (bnorm <= 0.0 || eb.values.minCoeff() < tol::positivity_floor_rel * bnorm)
        throw SingularDenominator("operator_division: denominator is not strictly positive");
    Mat at = eb.vectors.adjoint() * a * eb.vectors;
    const Eigen::Index m = at.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            double bi = eb.values(i), bj = eb.values(j);
            double kernel = std::abs(bi - bj) < tol::degenerate_rel * bnorm
                                ? 2.0 / (bi + bj)
                                : (std::log(bi) - std::log(bj)) / (bi - bj);
            at(i, j) *= kernel;
        }
    }
    return hermitize(eb.vectors * at * eb.vectors.adjoint());
}

// Projection onto the strictly positive eigenspaces of a Hermitian operator.
inline Mat positive_eigenspace_projector(const Mat& a) {
    Eigh ea = eigh(a);
    double cutoff = tol::eig_sign_rel * std::max(1e-300, ea.values.cwiseAbs().maxCoeff());
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < ea.values.size(); ++i)
        if (ea.values(i) > cutoff) out += ea.vectors.col(i) * ea.vectors.col(i).adjoint();
    return hermitize(out);
}

// E_S(A) = (1/|S|) sum_{s in S} V_s A V_s^dagger.
inline Mat average_over_subgroup(const Mat& a, const std::vector<Permutation>& subgroup, int d,
                                 const Limits& lim = default_limits()) {
    if (subgroup.empty()) throw Error("average_over_subgroup: empty subgroup");
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (const auto& s : subgroup) out += conjugate_by_permutation(a, tensor_index_map(s, d, lim));
    return out / static_cast<double>(subgroup.size());
}

// Theta_{S'}(A) = (1/|M|) sum_{s in S'} V_s E_{S_{x_P}}(A) V_s^dagger - E_{S_n}(A),
// with |M| = |S'|. Index maps are precomputed so the map can be iterated.
class ThetaMap {
  public:
    ThetaMap(const TypeComposition& p, const PermMultiset& generators, int d,
             const Limits& lim = default_limits())
        : dim_(tensor_dim_checked(d, static_cast<int>(p.length()), lim)) {
        SequenceN xp = canonical_sequence(p);
        for (const auto& s : enumerate_isotropy(xp, lim))
            iso_maps_.push_back(tensor_index_map(s, d, lim));
        for (const auto& s : generators.elements)
            gen_maps_.push_back(tensor_index_map(s, d, lim));
        for (const auto& s : all_permutations(static_cast<int>(p.length()), lim))
            full_maps_.push_back(tensor_index_map(s, d, lim));
    }

    Eigen::Index dim() const { return dim_; }

    Mat operator()(const Mat& a) const {
        Mat iso = average(a, iso_maps_);
        return average(iso, gen_maps_) - average(a, full_maps_);
    }

    // Hilbert-Schmidt adjoint: the generator average is self-adjoint for a
    // symmetric multiset, so only the composition order flips.
    Mat adjoint(const Mat& a) const {
        Mat gen = average(a, gen_maps_, /*inverse=*/true);
        return average(gen, iso_maps_) - average(a, full_maps_);
    }

  private:
    static void conj_add(const Mat& a, const std::vector<long long>& map, Mat& acc, bool inverse) {
        const Eigen::Index m = a.rows();
        if (!inverse) {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j) acc(map[i], map[j]) += a(i, j);
        } else {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j) acc(i, j) += a(map[i], map[j]);
        }
    }

    Mat average(const Mat& a, const std::vector<std::vector<long long>>& maps,
                bool inverse = false) const {
        Mat acc = Mat::Zero(dim_, dim_);
        for (const auto& map : maps) conj_add(a, map, acc, inverse);
        return acc / static_cast<double>(maps.size());
    }

    Eigen::Index dim_;
    std::vector<std::vector<long long>> iso_maps_;
    std::vector<std::vector<long long>> gen_maps_;
    std::vector<std::vector<long long>> full_maps_;
};

inline Mat theta_map(const Mat& a, const TypeComposition& p, const PermMultiset& generators,
                     int d, const Limits& lim = default_limits()) {
    return ThetaMap(p, generators, d, lim)(a);
}

// Largest singular value of Theta as an operator on Hilbert-Schmidt space,
// estimated by power iteration on Theta^dagger Theta. Rayleigh quotients never
// overshoot the true norm.
inline double theta_two_norm(const ThetaMap& theta, int iterations, std::uint64_t seed) {
    Rng rng(seed);
    const Eigen::Index m = theta.dim();
    Mat x(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) x(i, j) = rng.normal_complex();
    x /= x.norm();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Mat y = theta.adjoint(theta(x));
        double quad = std::real((x.adjoint() * y).trace());  // <x, T†T x> = ||T x||^2
        est = std::max(est, std::sqrt(std::max(0.0, quad)));
        double norm = y.norm();
        if (norm < 1e-300) break;
        x = y / norm;
    }
    return est;
}

}  // namespace cqlab
