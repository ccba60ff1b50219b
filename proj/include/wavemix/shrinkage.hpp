#pragma once

// Spike-and-slab machinery for wavelet detail coefficients: slab-convolution
// marginals, posterior spike weights, posterior coefficient draws, and
// per-level empirical-Bayes hyperparameter selection by marginal maximum
// likelihood. The latent noise scale is 1 throughout (the probit
// augmentation fixes unit noise), so every density is taken at sigma = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wavemix/distributions.hpp"
#include "wavemix/wavelet.hpp"

namespace wavemix {

struct SlabFamily {
    enum class Kind { gaussian, laplace };

    Kind kind = Kind::gaussian;
    double param = 1.0;  // slab variance v^2 (gaussian) or scale a (laplace)

    static SlabFamily gaussian(double variance) {
        if (!(variance > 0.0)) throw std::invalid_argument("gaussian slab: variance must be positive");
        return {Kind::gaussian, variance};
    }
    static SlabFamily laplace(double scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("laplace slab: scale must be positive");
        return {Kind::laplace, scale};
    }
};

struct LevelHyperParams {
    int level = 0;   // resolution level j
    double pi = 0.5; // prior probability that a coefficient is nonzero
    SlabFamily slab;
};

// Hyperparameter search box (see fit_level_hyperparams).
inline constexpr double kPiMin = 1e-3;
inline constexpr double kPiMax = 1.0;
inline constexpr double kGaussVarMin = 1e-4;
inline constexpr double kGaussVarMax = 1e4;
inline constexpr double kLaplaceScaleMin = 0.1;
inline constexpr double kLaplaceScaleMax = 3.0;

// log g(d) where g is the convolution of the slab density with the standard
// normal. Gaussian slab: N(0, 1 + v^2). Laplace slab:
//   g_a(d) = (a/2) [ e^{a^2/2 - a d} Phi(d - a) + e^{a^2/2 + a d} (1 - Phi(d + a)) ],
// assembled in log space so the value stays accurate far into the tails.
inline double log_marginal_density(double d, const SlabFamily& slab) {
    if (slab.kind == SlabFamily::Kind::gaussian) {
        const double s2 = 1.0 + slab.param;
        return -0.5 * d * d / s2 - 0.5 * std::log(s2) - kLogSqrt2Pi;
    }
    const double a = slab.param;
    const double lp = -a * d + normal_logcdf(d - a);
    const double lm = a * d + normal_logcdf(-(d + a));
    return std::log(0.5 * a) + 0.5 * a * a + log_sum_exp(lp, lm);
}

// pi_post = pi g(d) / (pi g(d) + (1 - pi) phi(d)).
inline double posterior_spike_weight(double d, double pi, const SlabFamily& slab) {
    if (!(pi >= 0.0) || !(pi <= 1.0))
        throw std::invalid_argument("posterior_spike_weight: pi outside [0, 1]");
    if (pi <= 0.0) return 0.0;
    if (pi >= 1.0) return 1.0;
    const double slab_term = std::log(pi) + log_marginal_density(d, slab);
    const double spike_term = std::log1p(-pi) + normal_logpdf(d);
    return 1.0 / (1.0 + std::exp(spike_term - slab_term));
}

// Mixing weight between the two truncated-normal branches of the
// Laplace-slab posterior: eta = e^{-ad} Phi(d-a) / (e^{ad} (1-Phi(d+a)) + e^{-ad} Phi(d-a)).
inline double eta_weight(double d, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("eta_weight: scale must be positive");
    const double lp = -a * d + normal_logcdf(d - a);
    const double lm = a * d + normal_logcdf(-(d + a));
    return 1.0 / (1.0 + std::exp(lm - lp));
}

// One posterior draw for a detail coefficient given its empirical value d:
// exact zero with probability 1 - pi_post, otherwise a slab-posterior draw.
inline double sample_coefficient(RngStream& rng, double d, const LevelHyperParams& params) {
    const double pi_post = posterior_spike_weight(d, params.pi, params.slab);
    if (rng.uniform() >= pi_post) return 0.0;
    if (params.slab.kind == SlabFamily::Kind::gaussian) {
        const double v2 = params.slab.param;
        const double shrink = v2 / (1.0 + v2);
        return sample_normal(rng, shrink * d, std::sqrt(shrink));
    }
    const double a = params.slab.param;
    const double inf = std::numeric_limits<double>::infinity();
    if (rng.uniform() < eta_weight(d, a))
        return sample_general_truncated_normal(rng, d - a, 1.0, 0.0, inf);
    return sample_general_truncated_normal(rng, d + a, 1.0, -inf, 0.0);
}

// sum_i log{ (1 - pi) phi(d_i) + pi g(d_i) } over one level's coefficients.
inline double log_marginal_likelihood(std::span<const double> coeffs, double pi,
                                      const SlabFamily& slab) {
    if (coeffs.empty())
        throw std::invalid_argument("log_marginal_likelihood: empty coefficient set");
    if (!(pi >= 0.0) || !(pi <= 1.0))
        throw std::invalid_argument("log_marginal_likelihood: pi outside [0, 1]");
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const double log_pi = pi > 0.0 ? std::log(pi) : neg_inf;
    const double log_1mpi = pi < 1.0 ? std::log1p(-pi) : neg_inf;
    double total = 0.0;
    for (double d : coeffs)
        total += log_sum_exp(log_1mpi + normal_logpdf(d), log_pi + log_marginal_density(d, slab));
    return total;
}

namespace detail {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Projected Nelder-Mead on a box; candidates are clamped before evaluation.
// Returns the best vertex and its value. f is minimized.
template <class F>
std::pair<Point2, double> nelder_mead_box(F&& f, Point2 start, Point2 step, Point2 lo, Point2 hi,
                                          int max_evals) {
    auto clamp = [&](Point2 p) {
        p.x = std::clamp(p.x, lo.x, hi.x);
        p.y = std::clamp(p.y, lo.y, hi.y);
        return p;
    };
    int evals = 0;
    auto eval = [&](const Point2& p) {
        ++evals;
        return f(p.x, p.y);
    };

    std::array<Point2, 3> v{clamp(start), clamp({start.x + step.x, start.y}),
                            clamp({start.x, start.y + step.y})};
    std::array<double, 3> fv{eval(v[0]), eval(v[1]), eval(v[2])};

    auto order = [&] {
        if (fv[0] > fv[1]) { std::swap(fv[0], fv[1]); std::swap(v[0], v[1]); }
        if (fv[1] > fv[2]) { std::swap(fv[1], fv[2]); std::swap(v[1], v[2]); }
        if (fv[0] > fv[1]) { std::swap(fv[0], fv[1]); std::swap(v[0], v[1]); }
    };
    order();

    while (evals < max_evals && std::abs(fv[2] - fv[0]) > 1e-11 * (1.0 + std::abs(fv[0]))) {
        const Point2 centroid{0.5 * (v[0].x + v[1].x), 0.5 * (v[0].y + v[1].y)};
        const Point2 refl = clamp({2.0 * centroid.x - v[2].x, 2.0 * centroid.y - v[2].y});
        const double fr = eval(refl);
        if (fr < fv[0]) {
            const Point2 exp_ = clamp({3.0 * centroid.x - 2.0 * v[2].x, 3.0 * centroid.y - 2.0 * v[2].y});
            const double fe = eval(exp_);
            if (fe < fr) { v[2] = exp_; fv[2] = fe; }
            else { v[2] = refl; fv[2] = fr; }
        } else if (fr < fv[1]) {
            v[2] = refl;
            fv[2] = fr;
        } else {
            const Point2 contr = clamp({0.5 * (centroid.x + v[2].x), 0.5 * (centroid.y + v[2].y)});
            const double fc = eval(contr);
            if (fc < fv[2]) { v[2] = contr; fv[2] = fc; }
            else {
                for (int i = 1; i < 3; ++i) {
                    v[i] = clamp({0.5 * (v[0].x + v[i].x), 0.5 * (v[0].y + v[i].y)});
                    fv[i] = eval(v[i]);
                }
            }
        }
        order();
    }
    return {v[0], fv[0]};
}

// Negative marginal log likelihood over (pi, t) with the slab parameter on a
// transformed axis: t = log v^2 for the gaussian slab, t = a for the laplace.
// Spike log-densities are hoisted out since they do not move with the
// hyperparameters.
struct LevelObjective {
    std::span<const double> coeffs;
    SlabFamily::Kind kind;
    std::vector<double> log_phi;

    explicit LevelObjective(std::span<const double> c, SlabFamily::Kind k) : coeffs(c), kind(k) {
        log_phi.reserve(c.size());
        for (double d : c) log_phi.push_back(normal_logpdf(d));
    }

    double operator()(double pi, double t) const {
        const double neg_inf = -std::numeric_limits<double>::infinity();
        const double log_pi = pi > 0.0 ? std::log(pi) : neg_inf;
        const double log_1mpi = pi < 1.0 ? std::log1p(-pi) : neg_inf;
        double total = 0.0;
        if (kind == SlabFamily::Kind::gaussian) {
            const double s2 = 1.0 + std::exp(t);
            const double norm = -0.5 * std::log(s2) - kLogSqrt2Pi;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                const double lg = -0.5 * coeffs[i] * coeffs[i] / s2 + norm;
                total += log_sum_exp(log_1mpi + log_phi[i], log_pi + lg);
            }
        } else {
            const double a = t;
            const double norm = std::log(0.5 * a) + 0.5 * a * a;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                const double d = coeffs[i];
                const double lg = norm + log_sum_exp(-a * d + normal_logcdf(d - a),
                                                     a * d + normal_logcdf(-(d + a)));
                total += log_sum_exp(log_1mpi + log_phi[i], log_pi + lg);
            }
        }
        return -total;
    }
};

}  // namespace detail

// Empirical-Bayes selection of (pi_j, slab parameter) by marginal maximum
// likelihood over the box [kPiMin, 1] x [param_min, param_max]. Deterministic:
// projected Nelder-Mead from four fixed corner/center starts, best kept, ties
// broken toward the smaller pi.
inline LevelHyperParams fit_level_hyperparams(std::span<const double> coeffs,
                                              SlabFamily::Kind kind, int level = 0) {
    if (coeffs.empty())
        throw std::invalid_argument("fit_level_hyperparams: empty coefficient set");

    const bool gaussian = kind == SlabFamily::Kind::gaussian;
    const double t_lo = gaussian ? std::log(kGaussVarMin) : kLaplaceScaleMin;
    const double t_hi = gaussian ? std::log(kGaussVarMax) : kLaplaceScaleMax;
    const double span = t_hi - t_lo;

    const detail::LevelObjective objective(coeffs, kind);
    const detail::Point2 lo{kPiMin, t_lo};
    const detail::Point2 hi{kPiMax, t_hi};
    const detail::Point2 starts[4] = {{0.1, t_lo + 0.2 * span},
                                      {0.1, t_hi - 0.2 * span},
                                      {0.9, t_hi - 0.2 * span},
                                      {0.5, t_lo + 0.5 * span}};
    const detail::Point2 step{0.15, 0.2 * span};

    detail::Point2 best{};
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        auto [p, f] = detail::nelder_mead_box(objective, s, step, lo, hi, 200);
        if (f < best_f - 1e-12 || (std::abs(f - best_f) <= 1e-12 && p.x < best.x)) {
            best = p;
            best_f = f;
        }
    }
    const double param = gaussian ? std::exp(best.y) : best.y;
    return {level, best.x, gaussian ? SlabFamily::gaussian(param) : SlabFamily::laplace(param)};
}

// Fit every resolution level of a coefficient vector. Levels with fewer than
// 8 coefficients inherit from the coarsest level that has at least 8; when no
// level qualifies (n <= 8) a single fit over all pooled details is shared.
inline std::vector<LevelHyperParams> fit_all_levels(const CoefficientVector& coeffs,
                                                    SlabFamily::Kind kind) {
    const int J = coeffs.levels;
    std::vector<LevelHyperParams> out(static_cast<std::size_t>(J));
    int first_fitted = -1;
    for (int j = 0; j < J; ++j) {
        if ((std::size_t{1} << j) >= 8) {
            out[j] = fit_level_hyperparams(coeffs.detail(j), kind, j);
            if (first_fitted < 0) first_fitted = j;
        }
    }
    if (first_fitted < 0) {
        std::span<const double> pooled{coeffs.values.data() + 1, coeffs.values.size() - 1};
        const LevelHyperParams shared = fit_level_hyperparams(pooled, kind, 0);
        for (int j = 0; j < J; ++j) {
            out[j] = shared;
            out[j].level = j;
        }
        return out;
    }
    for (int j = 0; j < first_fitted; ++j) {
        out[j] = out[first_fitted];
        out[j].level = j;
    }
    return out;
}

}  // namespace wavemix
