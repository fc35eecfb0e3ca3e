// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "besov/stats.hpp"

namespace besov {

namespace {

void require_same_grid(const DensityOnGrid& p, const DensityOnGrid& q) {
  if (p.dim != q.dim || p.grid_level != q.grid_level ||
      p.values.size() != q.values.size()) {
    throw std::invalid_argument("metrics: density grid mismatch");
  }
}

}  // namespace

double tv_distance(const DensityOnGrid& p, const DensityOnGrid& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    s += std::abs(p.values[i] - q.values[i]);
  }
  return 0.5 * s * p.cell_weight();
}

double hellinger(const DensityOnGrid& p, const DensityOnGrid& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double d = std::sqrt(p.values[i]) - std::sqrt(q.values[i]);
    s += d * d;
  }
  return std::sqrt(s * p.cell_weight());
}

KlResult kl_divergence(const DensityOnGrid& p0, const DensityOnGrid& p) {
  require_same_grid(p0, p);
  constexpr double kFloor = 1e-300;
  KlResult out;
  double kl = 0.0, v = 0.0;
  for (std::size_t i = 0; i < p0.values.size(); ++i) {
    double a = p0.values[i];
    double b = p.values[i];
    if (a <= 0.0) continue;
    if (b < kFloor) {
      b = kFloor;
      out.clipped = true;
    }
    const double lr = std::log(b / a);
    kl -= a * lr;
    v += a * lr * lr;
  }
  out.kl = kl * p0.cell_weight();
  out.v = v * p0.cell_weight();
  return out;
}

RateFit fit_rate(const std::vector<std::pair<std::int64_t, double>>& pairs) {
  if (pairs.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 (n, error) pairs");
  }
  std::vector<double> x, y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& [n, err] : pairs) {
    if (n < 2 || !(err > 0.0)) {
      throw std::invalid_argument("fit_rate: errors must be positive, n >= 2");
    }
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(err));
  }
  OlsFit f;
  try {
    f = ols(x, y);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("fit_rate: degenerate sample sizes");
  }
  RateFit out;
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.residual = f.rms_residual;
  out.n_points = pairs.size();
  return out;
}

}  // namespace besov
