// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/link.hpp"

#include <cmath>
#include <stdexcept>

#include "besov/stats.hpp"

namespace besov {

namespace {

constexpr double kTableLo = -20.0;
constexpr double kTableHi = 20.0;
constexpr double kTableStep = 1e-3;
constexpr int kTableSize = 40001;

// Bump g(u) = (315/256)(1-u^2)^4 on [-1,1], integral 1, mean 0.
double bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  const double w2 = w * w;
  return (315.0 / 256.0) * w2 * w2;
}

// Antiderivative pieces of g and u*g(u) with the -1 endpoint folded in.
double bump_cdf(double z) {
  const double p = z - 4.0 * z * z * z / 3.0 + 6.0 * std::pow(z, 5) / 5.0 -
                   4.0 * std::pow(z, 7) / 7.0 + std::pow(z, 9) / 9.0;
  return (315.0 / 256.0) * p + 0.5;
}

double bump_first_moment(double z) {
  auto q = [](double u) {
    const double u2 = u * u;
    return (315.0 / 256.0) * (u2 / 2.0 - u2 * u2 + std::pow(u, 6) -
                              std::pow(u, 8) / 2.0 + std::pow(u, 10) / 10.0);
  };
  return q(z) - q(-1.0);
}

// eta(z) = e^z for z<0, 1+z for z>=0; returns (g * eta)(z).
double bump_eta_convolution(double z, double exp_tail_coef) {
  if (z <= -1.0) return exp_tail_coef * std::exp(z);
  if (z >= 1.0) return 1.0 + z;
  // split at u = z: eta(z-u) is affine for u <= z and exponential above
  const double affine = (1.0 + z) * bump_cdf(z) - bump_first_moment(z);
  const double tail =
      std::exp(z) *
      adaptive_simpson([](double u) { return bump(u) * std::exp(-u); }, z, 1.0,
                       1e-11);
  return affine + tail;
}

}  // namespace

LinkFunction LinkFunction::exponential() {
  LinkFunction f;
  f.kind_ = LinkKind::exponential;
  return f;
}

LinkFunction LinkFunction::regular_floor(double floor) {
  if (floor <= 0.0 || floor >= 1.0) {
    throw std::invalid_argument("link: floor must lie in (0,1)");
  }
  LinkFunction f;
  f.kind_ = LinkKind::regular_floor;
  f.floor_ = floor;
  f.exp_tail_coef_ = adaptive_simpson(
      [](double u) { return bump(u) * std::exp(-u); }, -1.0, 1.0, 1e-12);
  const double at_zero = bump_eta_convolution(0.0, f.exp_tail_coef_);
  f.scale_ = (1.0 - floor) / at_zero;
  auto table = std::make_shared<std::vector<double>>();
  table->resize(kTableSize);
  for (int i = 0; i < kTableSize; ++i) {
    const double z = kTableLo + kTableStep * i;
    (*table)[i] =
        floor + f.scale_ * bump_eta_convolution(z, f.exp_tail_coef_);
    if (i > 0 && (*table)[i] <= (*table)[i - 1]) {
      throw std::logic_error("link: tabulation not strictly increasing");
    }
  }
  f.table_ = std::move(table);
  return f;
}

double LinkFunction::lipschitz_constant() const {
  if (kind_ == LinkKind::exponential) {
    throw std::domain_error("link: exponential is not uniformly Lipschitz");
  }
  // sup phi' is attained on the exactly-linear branch z >= 1.
  return scale_;
}

double LinkFunction::log_lipschitz_constant() const {
  if (kind_ == LinkKind::exponential) return 1.0;
  return scale_ / floor_;
}

double LinkFunction::table_value(double z) const {
  const double pos = (z - kTableLo) / kTableStep;
  auto i = static_cast<int>(pos);
  if (i < 0) i = 0;
  if (i >= kTableSize - 1) i = kTableSize - 2;
  const double frac = pos - i;
  return (*table_)[i] * (1.0 - frac) + (*table_)[i + 1] * frac;
}

double LinkFunction::eval(double z) const {
  if (kind_ == LinkKind::exponential) return std::exp(z);
  if (z <= kTableLo) return floor_ + scale_ * exp_tail_coef_ * std::exp(z);
  if (z >= kTableHi) return floor_ + scale_ * (1.0 + z);
  return table_value(z);
}

double LinkFunction::log_eval(double z) const {
  if (kind_ == LinkKind::exponential) return z;
  return std::log(eval(z));
}

double LinkFunction::inverse(double y) const {
  if (kind_ == LinkKind::exponential) {
    if (y <= 0.0) throw std::domain_error("link: inverse requires y > 0");
    return std::log(y);
  }
  if (y <= floor_) {
    throw std::domain_error("link: inverse requires y > floor");
  }
  const auto& t = *table_;
  if (y <= t.front()) {
    return std::log((y - floor_) / (scale_ * exp_tail_coef_));
  }
  if (y >= t.back()) {
    return (y - floor_) / scale_ - 1.0;
  }
  // invert the piecewise-linear interpolant exactly
  std::size_t lo = 0, hi = t.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (t[mid] <= y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double frac = (y - t[lo]) / (t[hi] - t[lo]);
  return kTableLo + kTableStep * (static_cast<double>(lo) + frac);
}

double DensityOnGrid::cell_weight() const {
  return std::ldexp(1.0, -grid_level * dim);
}

DensityOnGrid push_forward(const GridFunction& w, const LinkFunction& link) {
  DensityOnGrid p;
  p.dim = w.dim;
  p.grid_level = w.grid_level;
  p.values.resize(w.values.size());
  double integral = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    if (!std::isfinite(w.values[i])) {
      throw std::invalid_argument("push_forward: non-finite input");
    }
    p.values[i] = link.eval(w.values[i]);
    if (!std::isfinite(p.values[i])) {
      throw std::invalid_argument("push_forward: link overflow");
    }
    integral += p.values[i];
  }
  integral *= w.cell_weight();
  if (!(integral > 0.0) || !std::isfinite(integral)) {
    throw std::invalid_argument("push_forward: degenerate normalizer");
  }
  p.normalizer = integral;
  for (double& v : p.values) v /= integral;
  return p;
}

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.dim != b.dim || a.grid_level != b.grid_level ||
      a.values.size() != b.values.size()) {
    throw std::invalid_argument("link bounds: grid mismatch");
  }
}

}  // namespace

double log_lipschitz_l1_bound(const GridFunction& w, const GridFunction& wp,
                              const LinkFunction& link) {
  require_same_grid(w, wp);
  const double lg = link.log_lipschitz_constant();
  double sup_diff = 0.0, l1_diff = 0.0, sup_wp = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double diff = std::abs(w.values[i] - wp.values[i]);
    sup_diff = std::max(sup_diff, diff);
    l1_diff += diff;
    sup_wp = std::max(sup_wp, std::abs(wp.values[i]));
  }
  l1_diff *= w.cell_weight();
  return 2.0 * lg * std::exp(lg * sup_diff) / link.eval(-sup_wp) * l1_diff;
}

FloorLinkBounds floor_link_bounds(const GridFunction& w,
                                  const GridFunction& wp,
                                  const LinkFunction& link) {
  require_same_grid(w, wp);
  if (link.kind() != LinkKind::regular_floor || link.floor() <= 0.0) {
    throw std::domain_error("floor_link_bounds: link floor must be positive");
  }
  const double lip = link.lipschitz_constant();
  const double b = link.floor();
  double l1 = 0.0, l2sq = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double diff = w.values[i] - wp.values[i];
    l1 += std::abs(diff);
    l2sq += diff * diff;
  }
  l1 *= w.cell_weight();
  l2sq *= w.cell_weight();

  const DensityOnGrid pw = push_forward(w, link);
  const DensityOnGrid pwp = push_forward(wp, link);
  double ratio_sup = 0.0;
  for (std::size_t i = 0; i < pw.values.size(); ++i) {
    ratio_sup = std::max(ratio_sup, pwp.values[i] / pw.values[i]);
  }

  FloorLinkBounds out;
  out.kl_bound =
      kFloorKlBoundConstant * (lip * lip) / (b * b) * ratio_sup * l2sq;
  out.tv_bound = 2.0 * lip / b * l1;
  return out;
}

}  // namespace besov
