#pragma once

// Chain post-processing: absolute-loss point estimates (medians), highest
// posterior density intervals by the sorted-window method, Bayes-classifier
// regime labels with change points, and Monte Carlo study summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavemix/gibbs.hpp"

namespace wavemix {

// Sample median; even counts take the midpoint of the two central order
// statistics.
inline double median(std::vector<double> draws) {
    if (draws.empty()) throw std::invalid_argument("median: empty draw set");
    std::sort(draws.begin(), draws.end());
    const std::size_t n = draws.size();
    if (n % 2 == 1) return draws[n / 2];
    return 0.5 * (draws[n / 2 - 1] + draws[n / 2]);
}

// Shortest window of ceil(mass*m) consecutive sorted draws; ties go to the
// lower-indexed window.
inline std::pair<double, double> hpd_interval(std::vector<double> draws, double mass = 0.95) {
    if (draws.size() < 20) throw std::invalid_argument("hpd_interval: need at least 20 draws");
    if (!(mass > 0.0) || !(mass < 1.0)) throw std::invalid_argument("hpd_interval: mass in (0, 1)");
    std::sort(draws.begin(), draws.end());
    const std::size_t m = draws.size();
    const std::size_t w = std::min(m, static_cast<std::size_t>(std::ceil(mass * static_cast<double>(m))));
    std::size_t best = 0;
    double best_len = draws[w - 1] - draws[0];
    for (std::size_t i = 1; i + w <= m; ++i) {
        const double len = draws[i + w - 1] - draws[i];
        if (len < best_len) {
            best_len = len;
            best = i;
        }
    }
    return {draws[best], draws[best + w - 1]};
}

struct PointEstimates {
    double mu1 = 0.0, tau21 = 0.0, mu2 = 0.0, tau22 = 0.0;
    std::vector<double> alpha;
};

inline PointEstimates point_estimates(const PosteriorChains& chains) {
    if (chains.retained() == 0) throw std::invalid_argument("point_estimates: empty chains");
    PointEstimates est;
    est.mu1 = median(chains.mu1);
    est.tau21 = median(chains.tau21);
    est.mu2 = median(chains.mu2);
    est.tau22 = median(chains.tau22);
    const std::size_t n = chains.alpha.front().size();
    const std::size_t m = chains.retained();
    est.alpha.resize(n);
    std::vector<double> column(m);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < m; ++i) column[i] = chains.alpha[i][t];
        est.alpha[t] = median(column);
    }
    return est;
}

struct RegimeClassification {
    std::vector<int> labels;                 // label_t = 1 iff alpha_hat_t > 0.5
    std::vector<std::size_t> change_points;  // 1-based t with label_t != label_{t-1}
};

inline RegimeClassification classify_regimes(std::span<const double> alpha_hat) {
    RegimeClassification out;
    out.labels.resize(alpha_hat.size());
    for (std::size_t t = 0; t < alpha_hat.size(); ++t) {
        if (!(alpha_hat[t] >= 0.0) || !(alpha_hat[t] <= 1.0))
            throw std::invalid_argument("classify_regimes: entries must lie in [0, 1]");
        out.labels[t] = alpha_hat[t] > 0.5 ? 1 : 0;  // exact 0.5 stays in regime 0
    }
    for (std::size_t t = 1; t < alpha_hat.size(); ++t)
        if (out.labels[t] != out.labels[t - 1]) out.change_points.push_back(t + 1);
    return out;
}

struct ParamSummary {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct FitSummary {
    ParamSummary mu1, tau21, mu2, tau22;
    std::vector<double> alpha_hat, alpha_lower, alpha_upper;
    std::vector<int> labels;
    std::vector<std::size_t> change_points;
};

inline FitSummary summarize_chains(const PosteriorChains& chains, double mass = 0.95) {
    const PointEstimates est = point_estimates(chains);
    FitSummary s;
    auto summarize = [&](const std::vector<double>& draws, double estimate) {
        const auto [lo, hi] = hpd_interval(draws, mass);
        return ParamSummary{estimate, lo, hi};
    };
    s.mu1 = summarize(chains.mu1, est.mu1);
    s.tau21 = summarize(chains.tau21, est.tau21);
    s.mu2 = summarize(chains.mu2, est.mu2);
    s.tau22 = summarize(chains.tau22, est.tau22);

    const std::size_t n = est.alpha.size();
    const std::size_t m = chains.retained();
    s.alpha_hat = est.alpha;
    s.alpha_lower.resize(n);
    s.alpha_upper.resize(n);
    std::vector<double> column(m);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < m; ++i) column[i] = chains.alpha[i][t];
        const auto [lo, hi] = hpd_interval(column, mass);
        s.alpha_lower[t] = lo;
        s.alpha_upper[t] = hi;
    }
    const RegimeClassification reg = classify_regimes(s.alpha_hat);
    s.labels = reg.labels;
    s.change_points = reg.change_points;
    return s;
}

// Study-level aggregation in the layout of the simulation tables: per
// parameter, the mean of the replicate point estimates and the 95% HPD
// interval of that replicate set. Order: mu1, tau21, mu2, tau22.
inline std::array<ParamSummary, 4> monte_carlo_summary(
    const std::vector<std::array<double, 4>>& replicate_estimates, double mass = 0.95) {
    if (replicate_estimates.size() < 20)
        throw std::invalid_argument("monte_carlo_summary: need at least 20 replicates");
    std::array<ParamSummary, 4> out;
    std::vector<double> column(replicate_estimates.size());
    for (int p = 0; p < 4; ++p) {
        long double acc = 0.0L;
        for (std::size_t r = 0; r < replicate_estimates.size(); ++r) {
            column[r] = replicate_estimates[r][static_cast<std::size_t>(p)];
            acc += column[r];
        }
        const auto [lo, hi] = hpd_interval(column, mass);
        out[static_cast<std::size_t>(p)] =
            ParamSummary{static_cast<double>(acc / replicate_estimates.size()), lo, hi};
    }
    return out;
}

}  // namespace wavemix
