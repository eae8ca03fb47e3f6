#pragma once
// Statistical helpers for the test suites and estimators: stable summation,
// moments, normal/chi-square tails, and Kolmogorov-Smirnov tests with the
// asymptotic p-value (Stephens' small-sample correction).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace starbm {

// Deterministic pairwise reduction; independent of chunking used upstream.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0; // unbiased

    double se() const { return n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0; }
};

inline Moments moments(std::span<const double> v) {
    Moments m;
    m.n = v.size();
    if (m.n == 0) return m;
    m.mean = pairwise_sum(v) / static_cast<double>(m.n);
    if (m.n < 2) return m;
    double acc = 0.0;
    for (double x : v) acc += (x - m.mean) * (x - m.mean);
    m.var = acc / static_cast<double>(m.n - 1);
    return m;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace detail {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) { // P by series, Q = 1 - P
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Q by Lentz's continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

} // namespace detail

// Survival function of chi-square with k degrees of freedom.
inline double chi2_sf(double x, double dof) { return detail::gamma_q(0.5 * dof, 0.5 * x); }

// Kolmogorov survival Q(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2).
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double d = 0.0; // sup distance
    double p = 1.0; // asymptotic p-value
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

inline KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("ks: empty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double rn = std::sqrt(n);
    return {d, kolmogorov_q((rn + 0.12 + 0.11 / rn) * d)};
}

// Pearson chi-square against expected counts; returns the p-value with
// dof = bins - 1 - extra_constraints.
inline double chi2_test(std::span<const double> observed, std::span<const double> expected,
                        int extra_constraints = 0) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("chi2: nonpositive expectation");
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const int dof = static_cast<int>(observed.size()) - 1 - extra_constraints;
    if (dof < 1) throw std::invalid_argument("chi2: no degrees of freedom");
    return chi2_sf(stat, dof);
}

} // namespace starbm
