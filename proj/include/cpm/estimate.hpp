#pragma once

#include <cstddef>

#include "cpm/common.hpp"

namespace cpm {

/// Monte Carlo estimate: sample mean, its standard error, and sample count.
struct EstimateWithError {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Streaming mean/variance accumulator (Welford).  merge() is associative so
/// partial accumulators combine in a fixed order for reproducibility.
class MeanAccumulator {
public:
    void add(double x);
    void merge(const MeanAccumulator& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // unbiased sample variance
    double std_error() const;
    EstimateWithError estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

EstimateWithError estimate_of(const std::vector<double>& samples);

/// z-score of the difference of two independent estimates.
double z_score(const EstimateWithError& a, const EstimateWithError& b);
/// z-score of an estimate against a known constant.
double z_score(const EstimateWithError& a, double reference);

/// Two-sample Kolmogorov-Smirnov test.
struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Pearson chi-square statistic for observed counts against uniform bins.
double chi_square_uniform(const std::vector<std::size_t>& counts);

/// Upper critical value of the chi-square distribution (via the regularized
/// incomplete gamma), i.e. the x with P(X > x) = alpha at `dof` degrees.
double chi_square_critical(int dof, double alpha);

/// Least-squares slope of y against x with the z-score of slope = 0.
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};
SlopeFit slope_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cpm
