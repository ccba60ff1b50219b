#pragma once

// Synthetic-data side of the artifact: true weight curves (sinusoidal plus
// the rescaled blocks/bumps test signals), series generation from the
// dynamic mixture, and a reproducible multi-threaded Monte Carlo driver.

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wavemix/distributions.hpp"
#include "wavemix/gibbs.hpp"
#include "wavemix/inference.hpp"

namespace wavemix {

struct WeightCurve {
    enum class Kind { sinusoidal, blocks, bumps, constant, tabulated };

    Kind kind = Kind::sinusoidal;
    std::size_t n = 0;
    double level = 0.5;          // constant curve height
    std::vector<double> values;  // tabulated curve

    static Kind kind_from_string(const std::string& s) {
        if (s == "sinusoidal") return Kind::sinusoidal;
        if (s == "blocks") return Kind::blocks;
        if (s == "bumps") return Kind::bumps;
        if (s == "constant") return Kind::constant;
        if (s == "tabulated") return Kind::tabulated;
        throw std::invalid_argument("unknown weight curve '" + s + "'");
    }
    static std::string kind_to_string(Kind k) {
        switch (k) {
            case Kind::sinusoidal: return "sinusoidal";
            case Kind::blocks: return "blocks";
            case Kind::bumps: return "bumps";
            case Kind::constant: return "constant";
            case Kind::tabulated: return "tabulated";
        }
        return "?";
    }
};

namespace detail {

// Standard 11-breakpoint parameter tables for the blocks/bumps test signals.
inline constexpr std::array<double, 11> kTestBreakpoints = {
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
inline constexpr std::array<double, 11> kBlocksHeights = {4.0, -5.0, 3.0,  -4.0, 5.0, -4.2,
                                                          2.1, 4.3,  -3.1, 2.1,  -4.2};
inline constexpr std::array<double, 11> kBumpsHeights = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                                         2.1, 4.3, 3.1, 5.1, 4.2};
inline constexpr std::array<double, 11> kBumpsWidths = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                        0.01,  0.01,  0.005, 0.008, 0.005};

inline double blocks_raw(double t) {
    double v = 0.0;
    for (std::size_t j = 0; j < 11; ++j) {
        const double d = t - kTestBreakpoints[j];
        const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        v += kBlocksHeights[j] * 0.5 * (1.0 + sgn);
    }
    return v;
}

inline double bumps_raw(double t) {
    double v = 0.0;
    for (std::size_t j = 0; j < 11; ++j) {
        const double u = 1.0 + std::abs(t - kTestBreakpoints[j]) / kBumpsWidths[j];
        v += kBumpsHeights[j] / (u * u * u * u);
    }
    return v;
}

}  // namespace detail

// Fraction of the rescaled bumps peak below which the curve is flushed to an
// exact zero, so the baseline carries true nulls.
inline constexpr double kBumpsNullThreshold = 0.01;

// Evaluate a weight curve on the unit grid t/n, t = 1..n. Blocks is mapped
// affinely onto [0.05, 0.95]; bumps is scaled to peak 0.9 with its baseline
// flushed to exact zeros. All outputs lie in [0, 1].
inline std::vector<double> weight_curve(const WeightCurve& curve) {
    if (!is_power_of_two(curve.n) || curve.n < 2)
        throw std::invalid_argument("weight_curve: n must be a power of two >= 2");
    const std::size_t n = curve.n;
    std::vector<double> alpha(n);

    switch (curve.kind) {
        case WeightCurve::Kind::sinusoidal: {
            for (std::size_t t = 1; t <= n; ++t) {
                const double u = static_cast<double>(t) / static_cast<double>(n);
                alpha[t - 1] = 0.4 * std::cos(2.0 * std::numbers::pi * (u + std::numbers::pi)) + 0.5;
            }
            break;
        }
        case WeightCurve::Kind::blocks: {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t t = 1; t <= n; ++t) {
                alpha[t - 1] = detail::blocks_raw(static_cast<double>(t) / static_cast<double>(n));
                lo = std::min(lo, alpha[t - 1]);
                hi = std::max(hi, alpha[t - 1]);
            }
            for (double& a : alpha) a = 0.05 + 0.9 * (a - lo) / (hi - lo);
            break;
        }
        case WeightCurve::Kind::bumps: {
            double hi = 0.0;
            for (std::size_t t = 1; t <= n; ++t) {
                alpha[t - 1] = detail::bumps_raw(static_cast<double>(t) / static_cast<double>(n));
                hi = std::max(hi, alpha[t - 1]);
            }
            for (double& a : alpha) {
                a *= 0.9 / hi;
                if (a < 0.9 * kBumpsNullThreshold) a = 0.0;
            }
            break;
        }
        case WeightCurve::Kind::constant: {
            if (!(curve.level >= 0.0) || !(curve.level <= 1.0))
                throw std::invalid_argument("weight_curve: constant level outside [0, 1]");
            std::fill(alpha.begin(), alpha.end(), curve.level);
            break;
        }
        case WeightCurve::Kind::tabulated: {
            if (curve.values.size() != n)
                throw std::invalid_argument("weight_curve: tabulated values must have length n");
            for (double v : curve.values)
                if (!(v >= 0.0) || !(v <= 1.0))
                    throw std::invalid_argument("weight_curve: tabulated values outside [0, 1]");
            alpha = curve.values;
            break;
        }
    }
    for (double& a : alpha) a = std::clamp(a, 0.0, 1.0);
    return alpha;
}

struct SimulatedSeries {
    std::vector<double> y;
    std::vector<int> z_true;
};

// z_t ~ Bern(alpha_t), then y_t ~ N(mu_2, 1/tau2_2) if z_t = 1 else
// N(mu_1, 1/tau2_1).
inline SimulatedSeries generate_series(RngStream& rng, std::span<const double> alpha, double mu1,
                                       double mu2, double tau21, double tau22) {
    if (!(tau21 > 0.0) || !(tau22 > 0.0))
        throw std::invalid_argument("generate_series: precisions must be positive");
    const double sd1 = 1.0 / std::sqrt(tau21);
    const double sd2 = 1.0 / std::sqrt(tau22);
    SimulatedSeries out;
    out.y.resize(alpha.size());
    out.z_true.resize(alpha.size());
    for (std::size_t t = 0; t < alpha.size(); ++t) {
        out.z_true[t] = sample_bernoulli(rng, alpha[t]);
        out.y[t] = out.z_true[t] == 1 ? sample_normal(rng, mu2, sd2) : sample_normal(rng, mu1, sd1);
    }
    return out;
}

struct ScenarioConfig {
    WeightCurve curve;
    double mu1 = 0.0, mu2 = 2.0;
    double tau21 = 4.0, tau22 = 4.0;
    int replicates = 30;
    ChainConfig chain;
    int threads = 0;  // 0 picks hardware concurrency

    void validate() const {
        chain.validate();
        if (!(mu1 < mu2))
            throw std::invalid_argument("ScenarioConfig: mu1 < mu2 required (identifiability)");
        if (!(tau21 > 0.0) || !(tau22 > 0.0))
            throw std::invalid_argument("ScenarioConfig: precisions must be positive");
        if (replicates < 1) throw std::invalid_argument("ScenarioConfig: replicates >= 1");
    }
};

struct McStudy {
    std::vector<int> replicate_ids;                // 1-based ids of completed replicates
    std::vector<std::array<double, 4>> estimates;  // per replicate: mu1, tau21, mu2, tau22
    std::vector<std::vector<double>> alpha_hat;    // per replicate pointwise medians
    std::vector<double> alpha_true;
    std::vector<double> alpha_mean, alpha_lower, alpha_upper;
    std::array<ParamSummary, 4> params;
    bool interval_is_hpd = true;  // false: min/max fallback for < 20 replicates
    std::vector<std::string> failures;
};

// Deterministic study: replicate r owns RngStream(seed, r); data generation
// and the chain consume the same stream in sequence. Results are identical
// for any thread count because replicates land in preassigned slots.
inline McStudy run_monte_carlo(const ScenarioConfig& scenario) {
    scenario.validate();
    const int R = scenario.replicates;
    const std::vector<double> alpha_true = weight_curve(scenario.curve);
    const std::size_t n = alpha_true.size();

    std::vector<std::array<double, 4>> estimates(static_cast<std::size_t>(R));
    std::vector<std::vector<double>> alpha_hat(static_cast<std::size_t>(R));
    std::vector<std::string> errors(static_cast<std::size_t>(R));
    std::vector<char> failed(static_cast<std::size_t>(R), 0);

    auto run_one = [&](int r) {
        RngStream rng(scenario.chain.seed, static_cast<std::uint64_t>(r) + 1);
        const SimulatedSeries sim =
            generate_series(rng, alpha_true, scenario.mu1, scenario.mu2, scenario.tau21,
                            scenario.tau22);
        const PriorSpec priors = default_priors_from_data(sim.y);
        const PosteriorChains chains = run_chain(sim.y, scenario.chain, priors, rng);
        const PointEstimates est = point_estimates(chains);
        estimates[static_cast<std::size_t>(r)] = {est.mu1, est.tau21, est.mu2, est.tau22};
        alpha_hat[static_cast<std::size_t>(r)] = est.alpha;
    };

    int threads = scenario.threads > 0 ? scenario.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, R);
    if (threads == 1) {
        for (int r = 0; r < R; ++r) {
            try {
                run_one(r);
            } catch (const std::exception& e) {
                failed[static_cast<std::size_t>(r)] = 1;
                errors[static_cast<std::size_t>(r)] = e.what();
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= R) return;
                    try {
                        run_one(r);
                    } catch (const std::exception& e) {
                        failed[static_cast<std::size_t>(r)] = 1;
                        errors[static_cast<std::size_t>(r)] = e.what();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    McStudy study;
    study.alpha_true = alpha_true;
    int n_failed = 0;
    for (int r = 0; r < R; ++r) {
        if (failed[static_cast<std::size_t>(r)]) {
            ++n_failed;
            study.failures.push_back("replicate " + std::to_string(r + 1) + ": " +
                                     errors[static_cast<std::size_t>(r)]);
        } else {
            study.replicate_ids.push_back(r + 1);
            study.estimates.push_back(estimates[static_cast<std::size_t>(r)]);
            study.alpha_hat.push_back(std::move(alpha_hat[static_cast<std::size_t>(r)]));
        }
    }
    if (n_failed * 20 > R)  // more than 5% failed
        throw std::runtime_error("run_monte_carlo: " + std::to_string(n_failed) + " of " +
                                 std::to_string(R) + " replicates failed; first: " +
                                 study.failures.front());

    const std::size_t kept = study.estimates.size();
    study.interval_is_hpd = kept >= 20;
    auto interval = [&](std::vector<double>& column) -> std::pair<double, double> {
        if (study.interval_is_hpd) return hpd_interval(column);
        auto [lo, hi] = std::minmax_element(column.begin(), column.end());
        return {*lo, *hi};
    };

    std::vector<double> column(kept);
    for (int p = 0; p < 4; ++p) {
        long double acc = 0.0L;
        for (std::size_t r = 0; r < kept; ++r) {
            column[r] = study.estimates[r][static_cast<std::size_t>(p)];
            acc += column[r];
        }
        const auto [lo, hi] = interval(column);
        study.params[static_cast<std::size_t>(p)] =
            ParamSummary{static_cast<double>(acc / static_cast<long double>(kept)), lo, hi};
    }

    study.alpha_mean.resize(n);
    study.alpha_lower.resize(n);
    study.alpha_upper.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        long double acc = 0.0L;
        for (std::size_t r = 0; r < kept; ++r) {
            column[r] = study.alpha_hat[r][t];
            acc += column[r];
        }
        const auto [lo, hi] = interval(column);
        study.alpha_mean[t] = static_cast<double>(acc / static_cast<long double>(kept));
        study.alpha_lower[t] = lo;
        study.alpha_upper[t] = hi;
    }
    return study;
}

}  // namespace wavemix
