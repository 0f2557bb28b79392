#pragma once

#include <cstddef>
#include <span>

namespace nvlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    /// Standard error of the variance estimate, sqrt((m4 - s^4) / n).
    double variance_std_error = 0.0;
};

/// Two-pass moments, summed in index order.
SampleMoments moments(std::span<const double> values);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' finite-sample correction of the effective size). Ties across
/// samples are handled by advancing both empirical CDFs together.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace nvlab
