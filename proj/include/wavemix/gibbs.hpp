#pragma once

// Data-augmentation Gibbs sampler for the two-component Gaussian mixture
// with a time-varying weight alpha_t = Phi((W^T theta)_t). One iteration,
// in order: conjugate draws of (mu_1, tau2_1, mu_2, tau2_2); relabeling so
// mu_1 <= mu_2; allocations z; probit latents l; per-level hyperparameters
// by marginal ML; wavelet coefficients theta; weight path alpha.
//
// tau2_k is the component precision: y_t | z_t = k-1 ~ N(mu_k, 1/tau2_k).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wavemix/distributions.hpp"
#include "wavemix/shrinkage.hpp"
#include "wavemix/wavelet.hpp"

namespace wavemix {

struct PriorSpec {
    std::array<double, 2> b0{0.0, 0.0};    // mean-prior means
    std::array<double, 2> B0{1.0, 1.0};    // mean-prior variances
    std::array<double, 2> c0{0.01, 0.01};  // precision-prior shapes
    std::array<double, 2> C0{0.01, 0.01};  // precision-prior rates

    void validate() const {
        for (int k = 0; k < 2; ++k)
            if (!(B0[k] > 0.0) || !(c0[k] > 0.0) || !(C0[k] > 0.0))
                throw std::invalid_argument("PriorSpec: B0, c0, C0 must be positive");
    }
};

struct ChainConfig {
    int iterations = 6000;
    int burn_in = 1000;
    int thin = 5;
    std::uint64_t seed = 1;
    SlabFamily::Kind slab = SlabFamily::Kind::gaussian;
    int hyperparam_refit_every = 1;  // 1 refits at every iteration
    bool store_z = false;
    bool store_theta = false;
    WaveletFilter filter = filters::coif3();

    void validate() const {
        if (iterations <= 0 || burn_in < 0 || burn_in >= iterations)
            throw std::invalid_argument("ChainConfig: need 0 <= burn_in < iterations");
        if (thin < 1) throw std::invalid_argument("ChainConfig: thin must be >= 1");
        if (hyperparam_refit_every < 1)
            throw std::invalid_argument("ChainConfig: hyperparam_refit_every must be >= 1");
    }
};

struct ModelState {
    std::array<double, 2> mu{0.0, 0.0};
    std::array<double, 2> tau2{1.0, 1.0};
    std::vector<int> z;
    std::vector<double> latent;  // l
    CoefficientVector theta;
    std::vector<double> alpha;
};

struct PosteriorChains {
    std::vector<double> mu1, tau21, mu2, tau22;
    std::vector<std::vector<double>> alpha;  // one full weight path per retained draw
    std::vector<std::vector<int>> z;         // only when requested
    std::vector<std::vector<double>> theta;  // only when requested

    std::size_t retained() const { return mu1.size(); }
};

namespace detail {

// Type-7 quantile (linear interpolation between order statistics).
inline double quantile_type7(std::vector<double> sorted_copy, double p) {
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const std::size_t n = sorted_copy.size();
    if (n == 0) throw std::invalid_argument("quantile of empty vector");
    const double h = p * static_cast<double>(n - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= n) return sorted_copy[n - 1];
    return sorted_copy[i] + (h - static_cast<double>(i)) * (sorted_copy[i + 1] - sorted_copy[i]);
}

inline double sample_variance(std::span<const double> y) {
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n - 1);
}

}  // namespace detail

// Data-driven defaults: mu_k ~ N(quartile, s^2), tau2_k ~ Gamma(0.01, 0.01).
inline PriorSpec default_priors_from_data(std::span<const double> y) {
    if (y.size() < 4) throw std::invalid_argument("default_priors_from_data: need n >= 4");
    const double s2 = detail::sample_variance(y);
    if (!(s2 > 0.0))
        throw std::invalid_argument("default_priors_from_data: zero-variance data gives a degenerate prior");
    std::vector<double> copy(y.begin(), y.end());
    PriorSpec p;
    p.b0 = {detail::quantile_type7(copy, 0.25), detail::quantile_type7(copy, 0.75)};
    p.B0 = {s2, s2};
    p.c0 = {0.01, 0.01};
    p.C0 = {0.01, 0.01};
    return p;
}

// mu_k | tau2_k, z, y ~ N(b_k, B_k) with B_k = (B0k^-1 + tau2_k T_k)^-1 and
// b_k = B_k (tau2_k s_k + B0k^-1 b0k). Component k is 0-based here; z_t == k
// selects membership.
inline double draw_component_mean(RngStream& rng, std::span<const double> y,
                                  std::span<const int> z, int k, const PriorSpec& priors,
                                  double tau2_k) {
    double count = 0.0, sum = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (z[t] == k) {
            count += 1.0;
            sum += y[t];
        }
    }
    const double Bk = 1.0 / (1.0 / priors.B0[k] + tau2_k * count);
    const double bk = Bk * (tau2_k * sum + priors.b0[k] / priors.B0[k]);
    return sample_normal(rng, bk, std::sqrt(Bk));
}

// tau2_k | mu_k, z, y ~ Gamma(c0k + T_k/2, C0k + sum (y_t - mu_k)^2 / 2).
inline double draw_component_precision(RngStream& rng, std::span<const double> y,
                                       std::span<const int> z, int k, const PriorSpec& priors,
                                       double mu_k) {
    double count = 0.0, ss = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (z[t] == k) {
            count += 1.0;
            ss += (y[t] - mu_k) * (y[t] - mu_k);
        }
    }
    return sample_gamma(rng, priors.c0[k] + 0.5 * count, priors.C0[k] + 0.5 * ss);
}

// Steps 4-7: mu_1, tau2_1, mu_2, tau2_2 in sequence, each conditional using
// the most recent values. Empty components fall back to their priors.
inline void update_component_params(RngStream& rng, std::span<const double> y,
                                    std::span<const int> z, const PriorSpec& priors,
                                    std::array<double, 2>& mu, std::array<double, 2>& tau2) {
    for (int k = 0; k < 2; ++k) {
        mu[k] = draw_component_mean(rng, y, z, k, priors, tau2[k]);
        tau2[k] = draw_component_precision(rng, y, z, k, priors, mu[k]);
    }
}

// Label-switching correction: swap the (mu_k, tau2_k) pairs when mu_2 < mu_1.
// Nothing else is touched.
inline void enforce_ordering(std::array<double, 2>& mu, std::array<double, 2>& tau2) {
    if (mu[1] < mu[0]) {
        std::swap(mu[0], mu[1]);
        std::swap(tau2[0], tau2[1]);
    }
}

inline void enforce_ordering(ModelState& state) { enforce_ordering(state.mu, state.tau2); }

// z_t ~ Bern(beta_t) with beta_t the posterior odds of component 2, computed
// in log space.
inline std::vector<int> update_allocations(RngStream& rng, std::span<const double> y,
                                           const std::array<double, 2>& mu,
                                           const std::array<double, 2>& tau2,
                                           std::span<const double> alpha) {
    const double half_log_tau1 = 0.5 * std::log(tau2[0]);
    const double half_log_tau2 = 0.5 * std::log(tau2[1]);
    std::vector<int> z(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double a = alpha[t];
        if (!(a >= 0.0) || !(a <= 1.0))
            throw std::invalid_argument("update_allocations: alpha outside [0, 1]");
        const double r1 = y[t] - mu[0];
        const double r2 = y[t] - mu[1];
        const double lw1 = std::log1p(-a) + half_log_tau1 - 0.5 * tau2[0] * r1 * r1;
        const double lw2 = std::log(a) + half_log_tau2 - 0.5 * tau2[1] * r2 * r2;
        const double beta = 1.0 / (1.0 + std::exp(lw1 - lw2));
        z[t] = sample_bernoulli(rng, beta);
    }
    return z;
}

// l_t ~ N((W^T theta)_t, 1) truncated to the half-line named by z_t.
inline std::vector<double> update_latents(RngStream& rng, std::span<const int> z,
                                          const CoefficientVector& theta,
                                          const WaveletFilter& filter) {
    const std::vector<double> mean = idwt(theta, filter);
    std::vector<double> l(mean.size());
    for (std::size_t t = 0; t < mean.size(); ++t)
        l[t] = sample_truncated_normal(rng, mean[t],
                                       z[t] == 1 ? TruncationSide::right_of_zero
                                                 : TruncationSide::left_of_zero);
    return l;
}

// theta draw given the empirical coefficients d* = dwt(l): the scaling slot
// gets the diffuse-prior posterior N(d*_1, 1), every detail slot a
// spike-and-slab draw under its level's hyperparameters.
inline CoefficientVector draw_coefficients(RngStream& rng, const CoefficientVector& dstar,
                                           const std::vector<LevelHyperParams>& hyper) {
    if (static_cast<int>(hyper.size()) != dstar.levels)
        throw std::invalid_argument("draw_coefficients: one LevelHyperParams per level required");
    CoefficientVector theta;
    theta.levels = dstar.levels;
    theta.values.assign(dstar.size(), 0.0);
    theta.values[0] = sample_normal(rng, dstar.values[0], 1.0);
    for (int j = 0; j < dstar.levels; ++j) {
        const auto src = dstar.detail(j);
        auto dst = theta.detail(j);
        for (std::size_t k = 0; k < src.size(); ++k)
            dst[k] = sample_coefficient(rng, src[k], hyper[j]);
    }
    return theta;
}

inline CoefficientVector update_coefficients(RngStream& rng, std::span<const double> l,
                                             const std::vector<LevelHyperParams>& hyper,
                                             const WaveletFilter& filter) {
    return draw_coefficients(rng, dwt(l, filter), hyper);
}

// alpha = Phi(W^T theta), elementwise.
inline std::vector<double> compute_weights(const CoefficientVector& theta,
                                           const WaveletFilter& filter) {
    std::vector<double> alpha = idwt(theta, filter);
    for (double& a : alpha) a = normal_cdf(a);
    return alpha;
}

inline ModelState initial_state(std::span<const double> y, const PriorSpec& priors) {
    const std::size_t n = y.size();
    std::vector<double> copy(y.begin(), y.end());
    const double med = detail::quantile_type7(copy, 0.5);
    const double s2 = detail::sample_variance(y);

    ModelState state;
    state.mu = {priors.b0[0], priors.b0[1]};
    state.tau2 = {1.0 / s2, 1.0 / s2};
    state.z.resize(n);
    for (std::size_t t = 0; t < n; ++t) state.z[t] = y[t] > med ? 1 : 0;
    state.latent.assign(n, 0.0);
    state.theta.levels = levels_for_length(n);
    state.theta.values.assign(n, 0.0);
    state.alpha.assign(n, 0.5);
    return state;
}

// The full sampler. Deterministic given (y, config, priors) and the stream.
inline PosteriorChains run_chain(std::span<const double> y, const ChainConfig& config,
                                 const PriorSpec& priors, RngStream& rng) {
    config.validate();
    priors.validate();
    const std::size_t n = y.size();
    if (!is_power_of_two(n) || n < 8)
        throw std::invalid_argument(
            "run_chain: series length must be a power of two >= 8 "
            "(pad or truncate at the ingestion layer)");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("run_chain: data contain NaN or Inf");

    ModelState state = initial_state(y, priors);
    std::vector<LevelHyperParams> hyper;

    const std::size_t m =
        static_cast<std::size_t>((config.iterations - config.burn_in) / config.thin);
    PosteriorChains chains;
    chains.mu1.reserve(m);
    chains.tau21.reserve(m);
    chains.mu2.reserve(m);
    chains.tau22.reserve(m);
    chains.alpha.reserve(m);

    for (int iter = 1; iter <= config.iterations; ++iter) {
        update_component_params(rng, y, state.z, priors, state.mu, state.tau2);
        enforce_ordering(state);
        state.z = update_allocations(rng, y, state.mu, state.tau2, state.alpha);
        state.latent = update_latents(rng, state.z, state.theta, config.filter);
        const CoefficientVector dstar = dwt(state.latent, config.filter);
        if ((iter - 1) % config.hyperparam_refit_every == 0)
            hyper = fit_all_levels(dstar, config.slab);
        state.theta = draw_coefficients(rng, dstar, hyper);
        state.alpha = compute_weights(state.theta, config.filter);

        if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
            chains.mu1.push_back(state.mu[0]);
            chains.tau21.push_back(state.tau2[0]);
            chains.mu2.push_back(state.mu[1]);
            chains.tau22.push_back(state.tau2[1]);
            chains.alpha.push_back(state.alpha);
            if (config.store_z) chains.z.push_back(state.z);
            if (config.store_theta) chains.theta.push_back(state.theta.values);
        }
    }
    return chains;
}

inline PosteriorChains run_chain(std::span<const double> y, const ChainConfig& config,
                                 const PriorSpec& priors) {
    RngStream rng(config.seed, 0);
    return run_chain(y, config, priors, rng);
}

}  // namespace wavemix
