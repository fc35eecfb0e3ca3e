// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace besov {

// Adaptive Simpson integration of f on [a, b] to the requested relative
// tolerance (absolute fallback 1e-300 guards the zero-integral case).
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol);

// Kolmogorov-Smirnov statistic of a sample against a CDF.  The sample is
// copied and sorted internally.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// q-quantile (0 <= q <= 1) with linear interpolation; copies and sorts.
double quantile(std::vector<double> values, double q);

inline double median(std::vector<double> values) {
  return quantile(std::move(values), 0.5);
}

double mean(const std::vector<double>& values);
double variance(const std::vector<double>& values);  // unbiased

// Standard error of the mean of a correlated sequence, by batch means with
// the given number of batches (trailing remainder dropped).
double batch_means_se(const std::vector<double>& chain, std::size_t batches);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

// Ordinary least squares of y on x.  Throws std::invalid_argument on fewer
// than two points or degenerate x.
OlsFit ols(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace besov
