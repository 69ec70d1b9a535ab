#pragma once

#include "cqlab/qstate.hpp"

#include <limits>
#include <optional>

namespace cqlab {

struct DivergenceResult {
    double value = 0.0;  // nats; +inf when the support condition fails
    double alpha = 1.0;
    bool support_condition_met = true;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline Mat support_projector(const Mat& a) {
    Eigh ea = eigh(a);
    double cutoff = tol::support_rel * std::max(1e-300, ea.values.cwiseAbs().maxCoeff());
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < ea.values.size(); ++i)
        if (ea.values(i) > cutoff) out += ea.vectors.col(i) * ea.vectors.col(i).adjoint();
    return out;
}

inline bool support_contained(const Mat& rho, const Mat& sigma) {
    Mat off = Mat::Identity(sigma.rows(), sigma.cols()) - support_projector(sigma);
    return std::real((rho * off).trace()) < 1e-9;
}

}  // namespace detail

// Petz alpha-Renyi divergence (1/(alpha-1)) ln Tr[rho^alpha sigma^{1-alpha}].
inline DivergenceResult petz_renyi(const Mat& rho, const Mat& sigma, double alpha) {
    if (alpha < 0 || alpha == 1.0) throw Error("petz_renyi: need alpha >= 0, alpha != 1");
    DivergenceResult res;
    res.alpha = alpha;
    res.support_condition_met = detail::support_contained(rho, sigma);
    if (alpha > 1.0 && !res.support_condition_met) {
        res.value = kInf;
        return res;
    }
    double t = std::real((psd_power(rho, alpha) * psd_power(sigma, 1.0 - alpha)).trace());
    res.value = t <= 0.0 ? kInf : std::log(t) / (alpha - 1.0);
    return res;
}

inline DivergenceResult relative_entropy(const Mat& rho, const Mat& sigma) {
    DivergenceResult res;
    res.alpha = 1.0;
    res.support_condition_met = detail::support_contained(rho, sigma);
    if (!res.support_condition_met) {
        res.value = kInf;
        return res;
    }
    Eigh er = eigh(rho);
    double cutoff = tol::support_rel * std::max(1e-300, er.values.cwiseAbs().maxCoeff());
    double h = 0.0;
    for (Eigen::Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > cutoff) h += er.values(i) * std::log(er.values(i));
    Eigh es = eigh(sigma);
    double scut = tol::support_rel * std::max(1e-300, es.values.cwiseAbs().maxCoeff());
    RVec logs(es.values.size());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
        logs(i) = es.values(i) > scut ? std::log(es.values(i)) : 0.0;
    Mat log_sigma = es.vectors * logs.asDiagonal() * es.vectors.adjoint();
    res.value = h - std::real((rho * log_sigma).trace());
    return res;
}

// Sandwiched alpha-Renyi divergence
// (alpha/(alpha-1)) ln || sigma^{(1-alpha)/2alpha} rho sigma^{(1-alpha)/2alpha} ||_alpha.
inline DivergenceResult sandwiched_renyi(const Mat& rho, const Mat& sigma, double alpha) {
    if (alpha < 0 || alpha == 1.0) throw Error("sandwiched_renyi: need alpha >= 0, alpha != 1");
    DivergenceResult res;
    res.alpha = alpha;
    res.support_condition_met = detail::support_contained(rho, sigma);
    if (alpha > 1.0 && !res.support_condition_met) {
        res.value = kInf;
        return res;
    }
    double c = (1.0 - alpha) / (2.0 * alpha);
    Mat g = psd_power(sigma, c);
    Eigh eg = eigh(g * rho * g);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eg.values.size(); ++i)
        acc += std::pow(std::max(0.0, eg.values(i)), alpha);
    res.value = acc <= 0.0 ? kInf : std::log(acc) / (alpha - 1.0);
    return res;
}

inline double von_neumann_entropy(const Mat& rho) {
    Eigh er = eigh(rho);
    double cutoff = tol::support_rel * std::max(1e-300, er.values.cwiseAbs().maxCoeff());
    double h = 0.0;
    for (Eigen::Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > cutoff) h -= er.values(i) * std::log(er.values(i));
    return h;
}

inline void check_distribution(const CqChannel& w, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != w.alphabet_size())
        throw Error("distribution length does not match the channel alphabet");
    double total = 0.0;
    for (double v : p) {
        if (v < -1e-12) throw Error("negative probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("probabilities do not sum to 1");
}

// Holevo mutual information I(X:B) of the c-q state W^P, in nats.
inline double mutual_information(const CqChannel& w, const std::vector<double>& p) {
    check_distribution(w, p);
    Mat bar = Mat::Zero(w.dim_out(), w.dim_out());
    for (int x = 1; x <= w.alphabet_size(); ++x) bar += p[x - 1] * w.output(x);
    double h = von_neumann_entropy(bar);
    for (int x = 1; x <= w.alphabet_size(); ++x)
        if (p[x - 1] > 0) h -= p[x - 1] * von_neumann_entropy(w.output(x));
    return h;
}

// Sibson closed form for alpha in [0,1):
// I_alpha = (alpha/(alpha-1)) ln Tr[(sum_x p(x) W(x)^alpha)^{1/alpha}],
// with the alpha -> 0 limit -ln ||sum_x p(x) Pi_x||.
inline double sibson_alpha_mutual(const CqChannel& w, const std::vector<double>& p, double alpha) {
    check_distribution(w, p);
    if (alpha < 0 || alpha >= 1.0) throw Error("sibson_alpha_mutual: need alpha in [0,1)");
    Mat m = Mat::Zero(w.dim_out(), w.dim_out());
    if (alpha == 0.0) {
        for (int x = 1; x <= w.alphabet_size(); ++x)
            if (p[x - 1] > 0) m += p[x - 1] * detail::support_projector(w.output(x));
        return -std::log(eigh(m).values.maxCoeff());
    }
    for (int x = 1; x <= w.alphabet_size(); ++x)
        if (p[x - 1] > 0) m += p[x - 1] * psd_power(w.output(x), alpha);
    double t = std::real(psd_power(m, 1.0 / alpha).trace());
    return (alpha / (alpha - 1.0)) * std::log(t);
}

// The explicit Sibson minimizer sigma_B^* = M^{1/alpha} / Tr[M^{1/alpha}].
inline Mat sibson_minimizer(const CqChannel& w, const std::vector<double>& p, double alpha) {
    check_distribution(w, p);
    if (alpha <= 0 || alpha >= 1.0) throw Error("sibson_minimizer: need alpha in (0,1)");
    Mat m = Mat::Zero(w.dim_out(), w.dim_out());
    for (int x = 1; x <= w.alphabet_size(); ++x)
        if (p[x - 1] > 0) m += p[x - 1] * psd_power(w.output(x), alpha);
    Mat s = psd_power(m, 1.0 / alpha);
    return s / s.trace().real();
}

// D_alpha(W^P || rho_X x sigma_B) for a c-q state; blockwise formula.
inline double cq_petz_vs_product(const CqChannel& w, const std::vector<double>& p, const Mat& sigma,
                                 double alpha) {
    check_distribution(w, p);
    Mat spow = psd_power(sigma, 1.0 - alpha);
    double acc = 0.0;
    for (int x = 1; x <= w.alphabet_size(); ++x)
        if (p[x - 1] > 0)
            acc += p[x - 1] * std::real((psd_power(w.output(x), alpha) * spow).trace());
    return std::log(acc) / (alpha - 1.0);
}

// Objective of the Augustin minimization: sum_x p(x) D~_alpha(W(x) || sigma).
inline double augustin_objective(const CqChannel& w, const std::vector<double>& p, const Mat& sigma,
                                 double alpha) {
    double acc = 0.0;
    for (int x = 1; x <= w.alphabet_size(); ++x) {
        if (p[x - 1] <= 0) continue;
        double d = sandwiched_renyi(w.output(x), sigma, alpha).value;
        if (!std::isfinite(d)) return kInf;
        acc += p[x - 1] * d;
    }
    return acc;
}

// Deterministic minimization of f over qubit density operators on a Bloch-ball
// product grid, then two shrinking refinement passes around the best point.
template <typename F>
std::pair<double, Mat> minimize_over_qubit_states(F f, int r_pts = 50, int th_pts = 45,
                                                  int ph_pts = 45) {
    auto bloch = [](double r, double th, double ph) {
        Mat s(2, 2);
        double x = r * std::sin(th) * std::cos(ph);
        double y = r * std::sin(th) * std::sin(ph);
        double z = r * std::cos(th);
        s(0, 0) = 0.5 * (1 + z);
        s(1, 1) = 0.5 * (1 - z);
        s(0, 1) = 0.5 * Cplx(x, -y);
        s(1, 0) = 0.5 * Cplx(x, y);
        return s;
    };
    const double pi = std::numbers::pi;
    double r_lo = 0.0, r_hi = 0.999, th_lo = 0.0, th_hi = pi, ph_lo = 0.0, ph_hi = 2 * pi;
    double best = kInf, br = 0, bth = 0, bph = 0;
    for (int stage = 0; stage < 3; ++stage) {
        int nr = stage == 0 ? r_pts : 21, nt = stage == 0 ? th_pts : 21,
            np = stage == 0 ? ph_pts : 21;
        for (int ir = 0; ir < nr; ++ir) {
            double r = r_lo + (r_hi - r_lo) * ir / (nr - 1);
            for (int it = 0; it < nt; ++it) {
                double th = th_lo + (th_hi - th_lo) * it / (nt - 1);
                for (int ip = 0; ip < np; ++ip) {
                    double ph = ph_lo + (ph_hi - ph_lo) * ip / (np - 1);
                    double v = f(bloch(r, th, ph));
                    if (v < best) {
                        best = v;
                        br = r;
                        bth = th;
                        bph = ph;
                    }
                }
            }
        }
        double r_span = (r_hi - r_lo) / 5, th_span = (th_hi - th_lo) / 5,
               ph_span = (ph_hi - ph_lo) / 5;
        r_lo = std::max(0.0, br - r_span);
        r_hi = std::min(0.999, br + r_span);
        th_lo = std::max(0.0, bth - th_span);
        th_hi = std::min(pi, bth + th_span);
        ph_lo = std::max(0.0, bph - ph_span);
        ph_hi = std::min(2 * pi, bph + ph_span);
    }
    return {best, bloch(br, bth, bph)};
}

// Sandwiched alpha-Augustin information for alpha in (1,2], by damped
// fixed-point iteration on the first-order optimality condition
//   sigma^{(2alpha-1)/alpha} prop. sum_x (p_x/Q_x) T_x(sigma),
//   T_x(sigma) = rho_x^{1/2} (rho_x^{1/2} sigma^{(1-alpha)/alpha} rho_x^{1/2})^{alpha-1} rho_x^{1/2},
// which reduces to the classical Augustin iteration in the commuting case.
// Falls back to the Bloch grid for qubit outputs if the iteration stalls.
inline double augustin_info(const CqChannel& w, const std::vector<double>& p, double alpha,
                            int max_iters = 5000, double damping = 0.5) {
    check_distribution(w, p);
    if (!(alpha > 1.0 && alpha <= 2.0)) throw Error("augustin_info: need alpha in (1,2]");
    const int d = w.dim_out();
    const double gamma = (1.0 - alpha) / alpha;

    std::vector<Mat> sqrt_rho;
    for (int x = 1; x <= w.alphabet_size(); ++x) sqrt_rho.push_back(psd_power(w.output(x), 0.5));

    Mat sigma = Mat::Identity(d, d) / (2.0 * d);
    for (int x = 1; x <= w.alphabet_size(); ++x) sigma += 0.5 * p[x - 1] * w.output(x);
    sigma = hermitize(sigma / sigma.trace().real());

    double prev = augustin_objective(w, p, sigma, alpha);
    double best = prev;
    for (int it = 0; it < max_iters; ++it) {
        Mat sgamma = psd_power(sigma, gamma);
        Mat s = Mat::Zero(d, d);
        for (int x = 1; x <= w.alphabet_size(); ++x) {
            if (p[x - 1] <= 0) continue;
            Mat core = hermitize(sqrt_rho[x - 1] * sgamma * sqrt_rho[x - 1]);
            Mat powered = psd_power(core, alpha - 1.0);
            double q = std::real((core * powered).trace());  // Tr[core^alpha]
            s += (p[x - 1] / q) * (sqrt_rho[x - 1] * powered * sqrt_rho[x - 1]);
        }
        Mat snew = psd_power(hermitize(s), alpha / (2.0 * alpha - 1.0));
        snew = hermitize(snew / snew.trace().real());
        sigma = hermitize((1.0 - damping) * sigma + damping * snew);
        sigma /= sigma.trace().real();
        double cur = augustin_objective(w, p, sigma, alpha);
        best = std::min(best, cur);
        if (std::abs(cur - prev) < 1e-10) return best;
        prev = cur;
    }
    if (d == 2) {
        auto [gridval, gridsig] =
            minimize_over_qubit_states([&](const Mat& s) { return augustin_objective(w, p, s, alpha); });
        return std::min(best, gridval);
    }
    throw NonConvergence("augustin_info: fixed point did not converge");
}

}  // namespace cqlab
