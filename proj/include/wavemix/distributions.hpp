#pragma once

// Seedable random streams, sampling kernels, and normal special functions.
// Every sampler consumes uniforms from an RngStream in a fixed order, so a
// run is reproducible bit for bit from (seed, stream_id).

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace wavemix {

inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;  // log sqrt(2 pi)
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;
inline constexpr double kTwoPi = 6.2831853071795864769252868;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// log(exp(a) + exp(b)); tolerates -inf in either slot.
inline double log_sum_exp(double a, double b) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }
inline double normal_logpdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

// Phi(x); saturates to 0/1 in the extreme tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// log Phi(x). erfc carries the left tail down to x ~ -37 with near-full
// precision; below that a Mills-ratio expansion takes over before erfc
// drops into the denormal range.
inline double normal_logcdf(double x) {
    if (x >= 0.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
    if (x > -36.0) return std::log(0.5 * std::erfc(-x * kInvSqrt2));
    const double r2 = 1.0 / (x * x);
    const double series = 1.0 + r2 * (-1.0 + r2 * (3.0 + r2 * (-15.0 + r2 * 105.0)));
    return normal_logpdf(x) - std::log(-x) + std::log(series);
}

// A reproducible uniform source. Distinct stream_ids derived from one seed
// give streams suitable for parallel replicates (replicate r owns stream r).
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t s = seed ^ (0xA3EC4E9318A3F563ull * (stream_id + 1));
        const std::uint64_t w0 = detail::splitmix64(s);
        const std::uint64_t w1 = detail::splitmix64(s);
        const std::uint64_t w2 = detail::splitmix64(s);
        const std::uint64_t w3 = detail::splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                          static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                          static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                          static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

namespace detail {

// Box-Muller, one value per call (the sine companion is discarded so the
// stream position never depends on caller history).
inline double standard_normal(RngStream& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Z ~ N(0,1) conditioned on Z > a. Naive rejection while the retained mass
// is reasonable; Robert's translated-exponential proposal in the far tail,
// where naive rejection stalls.
inline double standard_normal_above(RngStream& rng, double a) {
    if (a <= 0.4) {
        for (;;) {
            const double z = standard_normal(rng);
            if (z > a) return z;
        }
    }
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double x = a - std::log(rng.uniform()) / alpha;
        const double d = x - alpha;
        if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
    }
}

}  // namespace detail

inline double sample_normal(RngStream& rng, double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("sample_normal: sd must be positive");
    return mean + sd * detail::standard_normal(rng);
}

// Gamma(shape, rate), mean shape/rate. Marsaglia-Tsang for shape >= 1,
// boosted by U^(1/shape) below that (handles the Gamma(0.01, 0.01) priors).
inline double sample_gamma(RngStream& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("sample_gamma: shape and rate must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0, rate);
        const double boosted = g * std::exp(std::log(rng.uniform()) / shape);
        return std::max(boosted, std::numeric_limits<double>::min());
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = detail::standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

inline int sample_bernoulli(RngStream& rng, double p) {
    if (!(p >= 0.0) || !(p <= 1.0))
        throw std::invalid_argument("sample_bernoulli: p outside [0, 1]");
    return rng.uniform() < p ? 1 : 0;
}

// Which half-line survives the truncation at zero.
enum class TruncationSide { left_of_zero, right_of_zero };

// N(mean, 1) restricted to the given half-line. Stable far into the wrong
// tail (|mean| up to 30 and beyond on the discarded side).
inline double sample_truncated_normal(RngStream& rng, double mean, TruncationSide side) {
    if (side == TruncationSide::left_of_zero)
        return -sample_truncated_normal(rng, -mean, TruncationSide::right_of_zero);
    for (;;) {
        const double x = mean + detail::standard_normal_above(rng, -mean);
        if (x > 0.0) return x;  // guards the rare rounding of mean + z to 0
    }
}

// N(location, scale^2) restricted to (lower, upper); either bound may be infinite.
inline double sample_general_truncated_normal(RngStream& rng, double location, double scale,
                                              double lower, double upper) {
    if (!(scale > 0.0))
        throw std::invalid_argument("sample_general_truncated_normal: scale must be positive");
    if (!(lower < upper))
        throw std::invalid_argument("sample_general_truncated_normal: empty interval");
    const double inf = std::numeric_limits<double>::infinity();
    const double a = (lower == -inf) ? -inf : (lower - location) / scale;
    const double b = (upper == inf) ? inf : (upper - location) / scale;

    double z;
    if (a == -inf && b == inf) {
        z = detail::standard_normal(rng);
    } else if (b == inf) {
        z = detail::standard_normal_above(rng, a);
    } else if (a == -inf) {
        z = -detail::standard_normal_above(rng, -b);
    } else if (normal_cdf(b) - normal_cdf(a) > 0.25) {
        do {
            z = detail::standard_normal(rng);
        } while (z < a || z > b);
    } else {
        // Uniform proposal with the density peak inside [a, b] as the envelope.
        double c2 = 0.0;
        if (a > 0.0) c2 = a * a;
        else if (b < 0.0) c2 = b * b;
        for (;;) {
            z = a + (b - a) * rng.uniform();
            if (rng.uniform() <= std::exp(0.5 * (c2 - z * z))) break;
        }
    }
    double x = location + scale * z;
    if (x <= lower) x = std::nextafter(lower, inf);
    if (x >= upper) x = std::nextafter(upper, -inf);
    return x;
}

}  // namespace wavemix
