// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "besov/metrics.hpp"
#include "besov/posterior.hpp"

namespace besov {

enum class TruthKind { homogeneous_smooth, inhomogeneous_spiky, custom };

std::string truth_kind_name(TruthKind kind);
TruthKind truth_kind_from_name(const std::string& name);

// Ground-truth density constructions.
//
//   homogeneous_smooth: every coefficient at levels 1..levels carries the
//     full uniform-decay magnitude amplitude * 2^{-l(s+d/2)} with a fixed
//     pseudo-random sign pattern, so the core sits exactly at the
//     uniform-decay regularity s.
//   inhomogeneous_spiky: one dyadic path r(l) towards spike_location carries
//     amplitude * 2^{-l(s-d/2)} / l^2 with signs aligned at the spike, plus
//     a low-level smooth background; the l^{-2} factor keeps the l1-type
//     norm at s finite while the per-level maxima decay too slowly for the
//     uniform scale at the same s.
struct TruthSpec {
  TruthKind kind = TruthKind::homogeneous_smooth;
  double s_true = 2.0;
  int d = 1;
  LinkKind link = LinkKind::exponential;
  double floor = 0.1;          // regular_floor construction only
  double amplitude = 0.9;
  double background = 0.25;    // spiky background amplitude factor
  int levels = 6;
  double spike_location = 1.0 / 3.0;
  CoefficientTree custom_coeffs;

  LinkFunction make_link() const;
};

struct TruthResult {
  DensityOnGrid p0;
  CoefficientTree w0;
};

TruthResult make_truth(const TruthSpec& spec, const WaveletBasis& basis,
                       int grid_level);

// i.i.d. draws by the grid-cell inverse CDF with uniform jitter within the
// cell; exact for piecewise-constant densities.
Dataset simulate_data(const DensityOnGrid& p0, std::int64_t n,
                      RngStream& rng);

enum class ErrorKind { median_tv, mean_density_tv };

struct StudyConfig {
  TruthSpec truth;
  PriorSpec prior;  // template; n is overwritten per grid point
  std::vector<std::int64_t> n_grid;
  int replicates = 5;
  MCMCConfig mcmc;
  ErrorKind error_kind = ErrorKind::median_tv;
  std::uint64_t seed = 1;
  double exclusion_cap = 0.2;
  int threads = 1;
  // Pipeline identity mode: errors are injected as the exact power law
  // amplitude * n^exponent and no chains run.
  bool synthetic_bypass = false;
  double synthetic_amplitude = 1.0;
  double synthetic_exponent = -0.4;

  void validate() const;
};

struct StudyRecord {
  std::int64_t n = 0;
  int replicate = 0;
  double error = 0.0;
  double mean_acceptance = 0.0;
  bool excluded = false;
  double wall_ms = 0.0;
};

struct StudyResult {
  std::vector<StudyRecord> records;
  std::vector<std::pair<std::int64_t, double>> per_n_median;
  RateFit rate;
  int excluded_count = 0;
  bool quality_failure = false;  // exclusions above the cap
  bool low_regularity_flag = false;  // basis regularity <= truth smoothness
  // soft invariant: adjacent per-n medians that increased (reported, never
  // fatal; sampling noise can produce one)
  int monotone_violations = 0;
  std::uint64_t seed = 0;
};

StudyResult contraction_study(const StudyConfig& config,
                              const WaveletBasis& basis);

// Monte-Carlo diagnostics of the prior sup-norm geometry.
struct DecenteringRow {
  double z_norm = 0.0;     // weighted-l1 norm of the shift
  double shifted_p = 0.0;  // P(||W - w||_inf <= xi)
  double centred_p = 0.0;  // P(||W||_inf <= xi)
  double lower_bound = 0.0;  // e^{-z_norm} * centred_p
  double pooled_se = 0.0;
  bool holds = false;  // shifted_p >= lower_bound - 3 se
};

struct PriorDiagnostics {
  std::vector<std::pair<double, double>> sup_tail;   // (R, P(||W|| > R))
  std::vector<std::pair<double, double>> small_ball;  // (xi, P(||W|| <= xi))
  double small_ball_slope = 0.0;  // log(-log P) on log xi over P in [.001,.5]
  double tail_fit_slope = 0.0;    // log P(||W|| > R) on R
  std::vector<DecenteringRow> decentering;
  double xi_used = 0.0;
};

struct PriorDiagnosticsOptions {
  std::int64_t draws = 100000;
  int decentering_shifts = 20;
  double decentering_quantile = 0.35;  // xi = this quantile of ||W||_inf
  double z_norm_min = 0.25;
  double z_norm_max = 2.5;
  // When set, draws use the unit-scale t-regular scalings
  // sigma_l = 2^{-l(t+d/2)} truncated at spec.l_max instead of the regime
  // scalings; this is the element whose small-ball exponent is -d/t and it
  // is not constrained to t > d.
  std::optional<double> unit_regular_t;
};

PriorDiagnostics prior_diagnostics(const PriorSpec& spec,
                                   const WaveletBasis& basis,
                                   RngStream& rng,
                                   const PriorDiagnosticsOptions& options);

}  // namespace besov
