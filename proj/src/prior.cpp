// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/prior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "besov/stats.hpp"

namespace besov {

std::string regime_name(PriorRegime regime) {
  switch (regime) {
    case PriorRegime::rescaled_undersmoothing: return "rescaled-undersmoothing";
    case PriorRegime::partially_rescaled: return "partially-rescaled";
    case PriorRegime::truncated: return "truncated";
    case PriorRegime::hierarchical: return "hierarchical";
  }
  throw std::logic_error("regime_name: unknown regime");
}

PriorRegime regime_from_name(const std::string& name) {
  if (name == "rescaled-undersmoothing") {
    return PriorRegime::rescaled_undersmoothing;
  }
  if (name == "partially-rescaled") return PriorRegime::partially_rescaled;
  if (name == "truncated") return PriorRegime::truncated;
  if (name == "hierarchical") return PriorRegime::hierarchical;
  throw std::invalid_argument("unknown prior regime '" + name + "'");
}

void PriorSpec::validate() const {
  if (d < 1 || d > 2) throw std::invalid_argument("prior: d must be 1 or 2");
  if (n < 2) throw std::invalid_argument("prior: n must be >= 2");
  if (l_max < 1) throw std::invalid_argument("prior: l_max must be >= 1");
  if (!(s > static_cast<double>(d))) {
    throw std::invalid_argument(
        "prior: regularity must satisfy s > d (hypothesis of every regime)");
  }
  if (regime == PriorRegime::hierarchical &&
      std::log(static_cast<double>(n)) <= static_cast<double>(d)) {
    throw std::invalid_argument("prior: hierarchical needs log n > d");
  }
}

int truncation_level(double s, int d, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("truncation_level: n >= 2");
  const double exponent =
      std::log2(static_cast<double>(n)) / (2.0 * s + static_cast<double>(d));
  // snap guards exact powers of two against ceil(x + eps) jumps
  const int level = static_cast<int>(std::ceil(exponent - 1e-9));
  return std::max(1, level);
}

int effective_truncation(const PriorSpec& spec) {
  if (spec.regime == PriorRegime::truncated ||
      spec.regime == PriorRegime::hierarchical) {
    return std::min(truncation_level(spec.s, spec.d, spec.n), spec.l_max);
  }
  return spec.l_max;
}

double scaling_factor(const PriorSpec& spec, int level) {
  if (level < 1) throw std::invalid_argument("scaling_factor: level >= 1");
  const double d = static_cast<double>(spec.d);
  const double nn = static_cast<double>(spec.n);
  switch (spec.regime) {
    case PriorRegime::rescaled_undersmoothing:
      return std::exp2(-level * (spec.s - d / 2.0)) *
             std::pow(nn, -d / (2.0 * spec.s + d));
    case PriorRegime::partially_rescaled: {
      const double base = std::exp2(-level * (spec.s - d / 2.0));
      if (level <= truncation_level(spec.s, spec.d, spec.n)) return base;
      return base * std::pow(nn, -d / (2.0 * spec.s + d)) / std::log(nn);
    }
    case PriorRegime::truncated:
    case PriorRegime::hierarchical: {
      if (level > truncation_level(spec.s, spec.d, spec.n)) return 0.0;
      return std::exp2(-level * (spec.s + d / 2.0));
    }
  }
  throw std::logic_error("scaling_factor: unknown regime");
}

double tail_sup_bound(const PriorSpec& spec) {
  // sum_{l > l_max} sigma_l 2^{ld} sup|psi| <= sum sigma_l 2^{ld/2} 2^{ld/2};
  // for the truncated regimes the tail is exactly zero once l_max >= L_n.
  double bound = 0.0;
  for (int l = spec.l_max + 1; l <= spec.l_max + 200; ++l) {
    const double sigma = scaling_factor(spec, l);
    if (sigma == 0.0) break;
    const double term = sigma * std::exp2(static_cast<double>(l * spec.d));
    bound += term;
    if (term < 1e-18 * bound) break;
  }
  return bound;
}

double hyperprior_normalizer(double n, int d) {
  const double hi = std::log(n);
  const double lo = static_cast<double>(d);
  if (!(hi > lo)) {
    throw std::invalid_argument("hyperprior: empty support, needs log n > d");
  }
  return adaptive_simpson(
      [n, d](double s) {
        return std::exp(-std::pow(n, static_cast<double>(d) / (2.0 * s + d)));
      },
      lo, hi, 1e-9);
}

HyperPrior::HyperPrior(double n, int d) : n_(n), d_(d) {
  zeta_ = hyperprior_normalizer(n, d);
  constexpr int kPoints = 10000;
  grid_.resize(kPoints);
  cdf_.resize(kPoints);
  const double lo = support_lo();
  const double hi = support_hi();
  const double h = (hi - lo) / (kPoints - 1);
  double acc = 0.0;
  double prev = density(lo);
  grid_[0] = lo;
  cdf_[0] = 0.0;
  for (int i = 1; i < kPoints; ++i) {
    grid_[i] = lo + h * i;
    const double cur = density(grid_[i]);
    acc += 0.5 * (prev + cur) * h;
    cdf_[i] = acc;
    prev = cur;
  }
  // normalize the tabulated CDF so the inverse map covers (0,1] exactly
  const double total = cdf_.back();
  for (double& c : cdf_) c /= total;
}

double HyperPrior::density(double s) const {
  if (s <= support_lo() || s > support_hi()) return 0.0;
  return std::exp(-std::pow(n_, static_cast<double>(d_) / (2.0 * s + d_))) /
         zeta_;
}

double HyperPrior::log_density(double s) const {
  if (s <= support_lo() || s > support_hi()) {
    return -std::numeric_limits<double>::infinity();
  }
  return -std::pow(n_, static_cast<double>(d_) / (2.0 * s + d_)) -
         std::log(zeta_);
}

double HyperPrior::cdf(double s) const {
  if (s <= support_lo()) return 0.0;
  if (s >= support_hi()) return 1.0;
  const double h = (support_hi() - support_lo()) / (grid_.size() - 1);
  const double pos = (s - support_lo()) / h;
  auto i = static_cast<std::size_t>(pos);
  if (i >= grid_.size() - 1) i = grid_.size() - 2;
  const double frac = pos - static_cast<double>(i);
  return cdf_[i] * (1.0 - frac) + cdf_[i + 1] * frac;
}

double HyperPrior::sample(RngStream& rng) const {
  const double u = rng.uniform01();
  // first index with cdf >= u, then linear inverse on the segment
  std::size_t lo = 0, hi = cdf_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf_[mid] < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double span = cdf_[hi] - cdf_[lo];
  const double frac = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
  return grid_[lo] + frac * (grid_[hi] - grid_[lo]);
}

PriorDraw sample_prior(const PriorSpec& spec, RngStream& rng) {
  spec.validate();
  PriorDraw draw;
  draw.spec = spec;
  if (spec.regime == PriorRegime::hierarchical) {
    const HyperPrior hyper(static_cast<double>(spec.n), spec.d);
    const double s_drawn = hyper.sample(rng);
    draw.s_drawn = s_drawn;
    draw.spec.s = s_drawn;
  }
  const int levels = effective_truncation(draw.spec);
  for (int l = 1; l <= levels; ++l) {
    const double sigma = scaling_factor(draw.spec, l);
    const std::int64_t count = std::int64_t{1} << (l * spec.d);
    for (std::int64_t r = 1; r <= count; ++r) {
      draw.coeffs.set(l, r, sigma * rng.laplace());
    }
  }
  draw.coeffs.set_max_level(levels);
  return draw;
}

double log_prior_density(const CoefficientTree& coeffs,
                         const PriorSpec& spec) {
  spec.validate();
  const int levels = effective_truncation(spec);
  double logp = 0.0;
  // constant terms over the full truncated index set
  for (int l = 1; l <= levels; ++l) {
    const double sigma = scaling_factor(spec, l);
    const auto count = static_cast<double>(std::int64_t{1} << (l * spec.d));
    logp -= count * std::log(2.0 * sigma);
  }
  for (const auto& [key, value] : coeffs.entries()) {
    const auto [l, r] = key;
    const double sigma = l <= levels ? scaling_factor(spec, l) : 0.0;
    if (sigma <= 0.0) {
      if (value != 0.0) return -std::numeric_limits<double>::infinity();
      continue;
    }
    logp -= std::abs(value) / sigma;
  }
  return logp;
}

double decentering_norm(const CoefficientTree& coeffs, const PriorSpec& spec) {
  double norm = 0.0;
  for (const auto& [key, value] : coeffs.entries()) {
    const double sigma = scaling_factor(spec, key.first);
    if (sigma <= 0.0) {
      if (value != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    norm += std::abs(value) / sigma;
  }
  return norm;
}

}  // namespace besov
