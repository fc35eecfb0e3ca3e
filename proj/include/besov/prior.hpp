// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "besov/rng.hpp"
#include "besov/wavelet.hpp"

namespace besov {

// The four Laplace prior regimes on wavelet coefficients c_{lr} =
// sigma_{n,l} W_{lr}, W_{lr} iid standard Laplace:
//
//   rescaled_undersmoothing: sigma_l = 2^{-l(s-d/2)} n^{-d/(2s+d)}
//   partially_rescaled:      sigma_l = 2^{-l(s-d/2)}            l <= L_n
//                            sigma_l = 2^{-l(s-d/2)} n^{-d/(2s+d)} / log n
//                                                                l >  L_n
//   truncated:               sigma_l = 2^{-l(s+d/2)}            l <= L_n
//                            sigma_l = 0                        l >  L_n
//   hierarchical:            the truncated form with s = S drawn from the
//                            hyper-prior on (d, log n]
//
// with 2^{L_n} ~= n^{1/(2s+d)} (ceiling of the dyadic exponent).
enum class PriorRegime {
  rescaled_undersmoothing,
  partially_rescaled,
  truncated,
  hierarchical
};

std::string regime_name(PriorRegime regime);
PriorRegime regime_from_name(const std::string& name);

struct PriorSpec {
  PriorRegime regime = PriorRegime::truncated;
  double s = 2.0;       // regularity; for hierarchical, the current draw S
  int d = 1;
  std::int64_t n = 1000;
  int l_max = 12;       // hard computational series truncation

  void validate() const;  // throws std::invalid_argument with the reason
};

// L_n = ceil(log2 n^{1/(2s+d)}), at least 1.
int truncation_level(double s, int d, std::int64_t n);

// Hard truncation actually used for computation: min(L_n, l_max) for the
// truncated/hierarchical regimes, l_max otherwise.
int effective_truncation(const PriorSpec& spec);

double scaling_factor(const PriorSpec& spec, int level);

// Sup-norm bound on the discarded tail sum_{l > l_max} sigma_l 2^{ld/2} E|W|
// * (basis sup factor); reported by the samplers so series truncation error
// is visible.
double tail_sup_bound(const PriorSpec& spec);

struct PriorDraw {
  CoefficientTree coeffs;
  std::optional<double> s_drawn;  // present iff hierarchical
  PriorSpec spec;                 // spec.s holds s_drawn for hierarchical
};

// Hyper-prior on the smoothness parameter: density
// sigma_n(s) = exp(-n^{d/(2s+d)}) / zeta_n on (d, log n].  The CDF is
// tabulated on 10^4 uniformly spaced abscissae; sampling inverts the
// tabulation with monotone linear interpolation (pointwise CDF error is
// bounded by the trapezoid step error, < 1e-7 for the default resolution).
class HyperPrior {
 public:
  HyperPrior(double n, int d);

  double n() const { return n_; }
  int d() const { return d_; }
  double support_lo() const { return static_cast<double>(d_); }
  double support_hi() const { return std::log(n_); }
  double normalizer() const { return zeta_; }

  double density(double s) const;
  double log_density(double s) const;
  double cdf(double s) const;
  double sample(RngStream& rng) const;

 private:
  double n_ = 0.0;
  int d_ = 1;
  double zeta_ = 0.0;
  std::vector<double> grid_, cdf_;
};

// zeta_n = integral over (d, log n] of exp(-n^{d/(2s+d)}) ds, adaptive
// quadrature with relative error <= 1e-8.  log n <= d is an error.
double hyperprior_normalizer(double n, int d);

PriorDraw sample_prior(const PriorSpec& spec, RngStream& rng);

// Log prior density over the truncated index set, including the constant
// -log(2 sigma) terms of absent (zero) coefficients.  A nonzero coefficient
// at a zero-scaled level yields -infinity.
double log_prior_density(const CoefficientTree& coeffs, const PriorSpec& spec);

// Weighted-l1 norm sum |c_{lr}| / sigma_{n,l} over the tree (the decentering
// norm associated with the regime's scalings).
double decentering_norm(const CoefficientTree& coeffs, const PriorSpec& spec);

}  // namespace besov
