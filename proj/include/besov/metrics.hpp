// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <vector>

#include "besov/link.hpp"

namespace besov {

// Total variation distance: half the quadrature L1 distance. In [0,1].
double tv_distance(const DensityOnGrid& p, const DensityOnGrid& q);

// Hellinger distance sqrt(int (sqrt p - sqrt q)^2). In [0, sqrt 2].
double hellinger(const DensityOnGrid& p, const DensityOnGrid& q);

struct KlResult {
  double kl = 0.0;  // int p0 log(p0/p)
  double v = 0.0;   // int p0 log(p/p0)^2
  bool clipped = false;  // densities floored at 1e-300 somewhere
};

KlResult kl_divergence(const DensityOnGrid& p0, const DensityOnGrid& p);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual in log space
  std::size_t n_points = 0;
};

// Least squares of log(error) on log(n).  Needs >= 3 pairs with positive
// errors and non-degenerate n.
RateFit fit_rate(const std::vector<std::pair<std::int64_t, double>>& pairs);

}  // namespace besov
