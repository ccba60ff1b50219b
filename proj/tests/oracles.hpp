#pragma once

// Independent numerical oracles for the test suites. Everything here is
// deliberately written against first principles (quadrature, series,
// brute-force scans) rather than through the library's own code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Composite-Simpson integral of f over [a, b] with n panels (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Quadrature-backed standard normal CDF for |x| <= ~12.
inline double normal_cdf_quadrature(double x) {
    const double ax = std::abs(x);
    const int panels = std::max(2000, static_cast<int>(ax * 4000));
    const double half = simpson([](double t) { return phi(t); }, 0.0, ax, panels);
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

// log of the Laplace(scale a) * N(0,1) convolution at d, by quadrature of the
// exponent-shifted integrand so extreme tails keep full relative precision.
// Panel width is halved once as a self-check; disagreement throws.
inline double log_laplace_marginal_quadrature(double d, double a) {
    auto log_integrand = [&](double u) {
        return std::log(0.5 * a) - a * std::abs(u) - 0.5 * (d - u) * (d - u) -
               0.5 * std::log(2.0 * M_PI);
    };
    const double lo = std::min(0.0, d) - 60.0;
    const double hi = std::max(0.0, d) + 60.0;
    // peak of the exponent over a coarse scan
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i)
        peak = std::max(peak, log_integrand(lo + (hi - lo) * i / 4000.0));

    auto integrate = [&](double step) {
        auto g = [&](double u) { return std::exp(log_integrand(u) - peak); };
        double total = 0.0;
        for (double seg_lo : {lo, std::min(0.0, d), std::max(0.0, d)}) {
            double seg_hi = hi;
            if (seg_lo == lo) seg_hi = std::min(0.0, d);
            else if (seg_lo == std::min(0.0, d)) seg_hi = std::max(0.0, d);
            if (seg_hi <= seg_lo) continue;
            const int n = std::max(8, static_cast<int>((seg_hi - seg_lo) / step));
            total += simpson(g, seg_lo, seg_hi, n);
        }
        return total;
    };
    const double coarse = integrate(0.004);
    const double fine = integrate(0.002);
    if (std::abs(fine - coarse) > 1e-10 * std::abs(fine))
        throw std::runtime_error("laplace marginal quadrature did not converge");
    return peak + std::log(fine);
}

// Regularized lower incomplete gamma P(a, x) (series + continued fraction).
inline double reg_lower_gamma(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("reg_lower_gamma domain");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, dd = 1.0 / b, h = dd;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

inline double gamma_cdf(double x, double shape, double rate) {
    return x <= 0.0 ? 0.0 : reg_lower_gamma(shape, x * rate);
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// CDF of N(mean, 1) truncated to (lower, upper), built on erfc directly.
inline double truncated_normal_cdf(double x, double mean, double lower, double upper) {
    auto Phi = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
    const double flo = std::isinf(lower) ? 0.0 : Phi(lower - mean);
    const double fhi = std::isinf(upper) ? 1.0 : Phi(upper - mean);
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    return (Phi(x - mean) - flo) / (fhi - flo);
}

inline double mean_of(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    long double s = 0.0L;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / static_cast<long double>(v.size() - 1));
}

}  // namespace oracles
