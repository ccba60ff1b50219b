#pragma once

// Orthonormal periodic discrete wavelet transform via the pyramid algorithm,
// full decomposition down to a single scaling coefficient. Coefficient
// vectors follow the layout (c00, d00, d1, ..., d_{J-1}): the detail block of
// level j sits at 1-based positions [2^j + 1, 2^{j+1}].
//
// Phase convention, fixed once: analysis correlates the filter with the
// signal starting at even offsets, a_out[k] = sum_i h[i] a[(2k + i) mod m].
// Synthesis is the adjoint, which by orthonormality is the exact inverse.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavemix {

struct WaveletFilter {
    std::string name;
    std::vector<double> lowpass;  // h0..h_{L-1}
    int vanishing_moments = 0;

    // Quadrature mirror: g[i] = (-1)^i h[L-1-i].
    std::vector<double> highpass() const {
        const std::size_t L = lowpass.size();
        std::vector<double> g(L);
        for (std::size_t i = 0; i < L; ++i) {
            const double h = lowpass[L - 1 - i];
            g[i] = (i % 2 == 0) ? h : -h;
        }
        return g;
    }

    // Sum sqrt(2), unit energy, double-shift orthogonality.
    void validate() const {
        const std::size_t L = lowpass.size();
        if (L < 2 || L % 2 != 0)
            throw std::invalid_argument("wavelet filter '" + name + "': length must be even and >= 2");
        double sum = 0.0, sumsq = 0.0;
        for (double h : lowpass) {
            sum += h;
            sumsq += h * h;
        }
        if (std::abs(sum - std::sqrt(2.0)) > 1e-12)
            throw std::invalid_argument("wavelet filter '" + name + "': coefficients do not sum to sqrt(2)");
        if (std::abs(sumsq - 1.0) > 1e-12)
            throw std::invalid_argument("wavelet filter '" + name + "': coefficients are not unit-energy");
        for (std::size_t m = 1; 2 * m < L; ++m) {
            double dot = 0.0;
            for (std::size_t i = 0; i + 2 * m < L; ++i) dot += lowpass[i] * lowpass[i + 2 * m];
            if (std::abs(dot) > 1e-10)
                throw std::invalid_argument("wavelet filter '" + name + "': double-shift orthogonality fails");
        }
    }
};

namespace filters {

// Coiflet, six vanishing moments (18 taps). The library default.
inline WaveletFilter coif3() {
    WaveletFilter f{"coif3",
                    {-3.4599773199847657438e-05, -7.0983302518172710322e-05,
                     4.6621695984435122892e-04, 1.1175187709288212035e-03,
                     -2.5745176882166835813e-03, -9.0079761370168839671e-03,
                     1.5880544863273790747e-02, 3.4555027573379587476e-02,
                     -8.2301927107010633914e-02, -7.1799821619099790058e-02,
                     4.2848347637741937284e-01, 7.9377722262582425188e-01,
                     4.0517690240940701258e-01, -6.1123390002474615255e-02,
                     -6.5771911281965171819e-02, 2.3452696142201830543e-02,
                     7.7825964269953339787e-03, -3.7935128646775047139e-03},
                    6};
    f.validate();
    return f;
}

inline WaveletFilter haar() {
    const double r = 1.0 / std::sqrt(2.0);
    WaveletFilter f{"haar", {r, r}, 1};
    f.validate();
    return f;
}

inline WaveletFilter db2() {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    WaveletFilter f{"db2", {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d}, 2};
    f.validate();
    return f;
}

inline WaveletFilter db4() {
    WaveletFilter f{"db4",
                    {0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
                     -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
                     0.032883011666885199735, -0.010597401785069032105},
                    4};
    f.validate();
    return f;
}

}  // namespace filters

inline const std::vector<std::string>& filter_names() {
    static const std::vector<std::string> names{"coif3", "haar", "db2", "db4"};
    return names;
}

inline WaveletFilter filter_by_name(std::string_view name) {
    if (name == "coif3") return filters::coif3();
    if (name == "haar") return filters::haar();
    if (name == "db2") return filters::db2();
    if (name == "db4") return filters::db4();
    throw std::invalid_argument("unknown wavelet filter '" + std::string(name) + "'");
}

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// J such that n = 2^J; rejects non-dyadic lengths.
inline int levels_for_length(std::size_t n) {
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument("signal length must be a power of two >= 2, got " +
                                    std::to_string(n));
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

// Wavelet-domain vector theta = (c00, d00, d1, ..., d_{J-1}).
struct CoefficientVector {
    std::vector<double> values;
    int levels = 0;  // J, with values.size() == 2^J

    std::size_t size() const { return values.size(); }
    double& scaling() { return values[0]; }
    double scaling() const { return values[0]; }

    std::span<double> detail(int j) {
        check_level(j);
        return {values.data() + (std::size_t{1} << j), std::size_t{1} << j};
    }
    std::span<const double> detail(int j) const {
        check_level(j);
        return {values.data() + (std::size_t{1} << j), std::size_t{1} << j};
    }

private:
    void check_level(int j) const {
        if (j < 0 || j >= levels) throw std::out_of_range("detail level out of range");
    }
};

// 1-based inclusive positions [2^j + 1, 2^{j+1}] of the level-j detail block.
inline std::pair<std::size_t, std::size_t> level_range(int j, int total_levels) {
    if (j < 0 || j >= total_levels)
        throw std::out_of_range("level_range: j must lie in [0, J-1]");
    return {(std::size_t{1} << j) + 1, std::size_t{1} << (j + 1)};
}

namespace detail {

// One analysis step: a (even length m) -> approx, det (length m/2) by
// periodic correlation and even-phase downsampling.
inline void pyramid_analysis(std::span<const double> a, const std::vector<double>& h,
                             const std::vector<double>& g, std::span<double> approx,
                             std::span<double> det) {
    const std::size_t m = a.size();
    const std::size_t L = h.size();
    for (std::size_t k = 0; k < m / 2; ++k) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double v = a[(2 * k + i) % m];
            sa += h[i] * v;
            sd += g[i] * v;
        }
        approx[k] = sa;
        det[k] = sd;
    }
}

// Adjoint of pyramid_analysis: scatter approx/detail back to length m.
inline void pyramid_synthesis(std::span<const double> approx, std::span<const double> det,
                              const std::vector<double>& h, const std::vector<double>& g,
                              std::span<double> out) {
    const std::size_t m = out.size();
    const std::size_t L = h.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < m / 2; ++k) {
        const double ca = approx[k];
        const double cd = det[k];
        for (std::size_t i = 0; i < L; ++i) out[(2 * k + i) % m] += h[i] * ca + g[i] * cd;
    }
}

}  // namespace detail

// Full decomposition to the coarsest level: returns W * signal.
inline CoefficientVector dwt(std::span<const double> signal, const WaveletFilter& filter) {
    const int J = levels_for_length(signal.size());
    const std::vector<double> h = filter.lowpass;
    const std::vector<double> g = filter.highpass();

    CoefficientVector out;
    out.levels = J;
    out.values.assign(signal.size(), 0.0);

    std::vector<double> a(signal.begin(), signal.end());
    std::vector<double> next, det;
    for (int j = J - 1; j >= 0; --j) {
        const std::size_t half = std::size_t{1} << j;
        next.assign(half, 0.0);
        det.assign(half, 0.0);
        detail::pyramid_analysis(a, h, g, next, det);
        std::copy(det.begin(), det.end(), out.values.begin() + half);
        a.swap(next);
    }
    out.values[0] = a[0];
    return out;
}

// Inverse transform: returns W^T * coeffs, the exact inverse of dwt.
inline std::vector<double> idwt(const CoefficientVector& coeffs, const WaveletFilter& filter) {
    const int J = levels_for_length(coeffs.values.size());
    if (coeffs.levels != J)
        throw std::invalid_argument("idwt: coefficient vector levels inconsistent with its length");
    const std::vector<double> h = filter.lowpass;
    const std::vector<double> g = filter.highpass();

    std::vector<double> a{coeffs.values[0]};
    std::vector<double> next;
    for (int j = 0; j < J; ++j) {
        const std::size_t half = std::size_t{1} << j;
        next.assign(2 * half, 0.0);
        detail::pyramid_synthesis(a, coeffs.detail(j), h, g, next);
        a.swap(next);
    }
    return a;
}

// Explicit n x n transform matrix M with M y = dwt(y), built column by column
// from unit vectors. Test oracle; capped well below production sizes.
inline std::vector<std::vector<double>> build_matrix(std::size_t n, const WaveletFilter& filter) {
    if (n > 1024) throw std::invalid_argument("build_matrix: n > 1024 (oracle sizes only)");
    levels_for_length(n);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        e[c] = 1.0;
        const CoefficientVector col = dwt(e, filter);
        for (std::size_t r = 0; r < n; ++r) m[r][c] = col.values[r];
        e[c] = 0.0;
    }
    return m;
}

}  // namespace wavemix
