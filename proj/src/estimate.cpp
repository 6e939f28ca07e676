#include "cpm/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace cpm {

void MeanAccumulator::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
    const double d = other.mean_ - mean_;
    const double nt = na + nb;
    mean_ += d * nb / nt;
    m2_ += other.m2_ + d * d * na * nb / nt;
    n_ += other.n_;
}

double MeanAccumulator::variance() const {
    if (n_ < 2) return 0.0;
    return m2_ / static_cast<double>(n_ - 1);
}

double MeanAccumulator::std_error() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

EstimateWithError MeanAccumulator::estimate() const {
    return EstimateWithError{mean_, std_error(), n_};
}

EstimateWithError estimate_of(const std::vector<double>& samples) {
    MeanAccumulator acc;
    for (double s : samples) acc.add(s);
    return acc.estimate();
}

double z_score(const EstimateWithError& a, const EstimateWithError& b) {
    const double se = std::sqrt(sqr(a.std_error) + sqr(b.std_error));
    if (se == 0.0) return a.value == b.value ? 0.0 : HUGE_VAL;
    return (a.value - b.value) / se;
}

double z_score(const EstimateWithError& a, double reference) {
    if (a.std_error == 0.0) return a.value == reference ? 0.0 : HUGE_VAL;
    return (a.value - reference) / a.std_error;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // Asymptotic Kolmogorov tail.
    const double en = std::sqrt(na * nb / (na + nb));
    const double t = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return KsResult{d, std::clamp(2.0 * p, 0.0, 1.0)};
}

double chi_square_uniform(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    require(total > 0 && !counts.empty(), "chi_square_uniform: no data");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi2 = 0.0;
    for (auto c : counts) chi2 += sqr(static_cast<double>(c) - expected) / expected;
    return chi2;
}

namespace {

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double chi_square_critical(int dof, double alpha) {
    require(dof >= 1 && alpha > 0.0 && alpha < 1.0, "chi_square_critical: bad arguments");
    // Bisection on the cdf; plenty fast for test-harness use.
    double lo = 0.0, hi = dof + 200.0 * std::sqrt(2.0 * dof) + 200.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_p(dof / 2.0, mid / 2.0) < 1.0 - alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 3, "slope_fit: need >= 3 points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += sqr(x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "slope_fit: degenerate abscissae");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) rss += sqr(y[i] - intercept - slope * x[i]);
    const double se = std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx);
    return SlopeFit{slope, se, se == 0.0 ? 0.0 : slope / se};
}

}  // namespace cpm
