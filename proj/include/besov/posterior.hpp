// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "besov/link.hpp"
#include "besov/prior.hpp"
#include "besov/rng.hpp"
#include "besov/wavelet.hpp"

namespace besov {

struct Dataset {
  int dim = 1;
  std::vector<double> points;  // row-major n x dim

  std::int64_t size() const {
    return static_cast<std::int64_t>(points.size()) / dim;
  }
  double coord(std::int64_t i, int k) const {
    return points[static_cast<std::size_t>(i) * dim + k];
  }
  void validate() const;  // all coordinates in [0,1], size >= 1
};

struct MCMCConfig {
  std::int64_t iterations = 20000;  // coefficient steps; sweeps if hierarchical
  std::int64_t burn_in = -1;        // -1: 20% of iterations
  int thinning = 10;
  bool adapt = true;
  double target_acceptance = 0.234;
  double adaptation_rate = 1.0;     // Robbins-Monro gain multiplier
  std::uint64_t seed = 1;
  std::vector<double> proposal_scales;  // per level; empty: sigma_{n,l}
  double s_proposal_scale = 0.0;        // 0: (support width)/8
  int coefficient_steps_per_sweep = 0;  // K1; 0: number of active coefficients
  int s_steps_per_sweep = 4;            // K2
  bool likelihood_enabled = true;
  bool track_density = true;  // maintain grid caches / mean density
  std::vector<std::pair<int, std::int64_t>> probes;  // coefficients to record
  std::optional<double> s_init;  // hierarchical start, default mid-support

  void validate() const;
  std::int64_t effective_burn_in() const {
    return burn_in >= 0 ? burn_in : iterations / 5;
  }
};

// Current MCMC state.  Coefficients are stored densely per level; the
// cached_* members mirror the quantities whose coherence the sampler
// maintains incrementally.
struct ChainState {
  std::vector<std::vector<double>> levels;  // levels[l-1], 2^{ld} entries
  std::vector<double> level_abs_sum;        // sum_r |c_{lr}| per level
  std::optional<double> s_current;          // hierarchical only
  int active_levels = 0;  // levels entering the likelihood
  double log_prior = 0.0;
  double sum_log_phi_data = 0.0;
  double norm_sum = 0.0;  // sum of phi(w) over grid cells
  double cell_weight = 1.0;
  std::vector<double> w_at_data;
  std::vector<double> w_grid;
  std::vector<double> phi_grid;
  double cached_log_post = 0.0;

  double cached_normalizer() const { return norm_sum * cell_weight; }
  CoefficientTree coeffs() const;  // active part, as a tree
};

struct MhStepResult {
  bool accepted = false;
  double alpha = 0.0;  // min(1, exp(delta log posterior))
  int level = 0;
  std::int64_t index = 0;
};

struct KeptSample {
  std::int64_t iteration = 0;
  double logpost = 0.0;
  double s = std::numeric_limits<double>::quiet_NaN();
  double tv_to_ref = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> probes;
};

struct ChainSummary {
  std::vector<KeptSample> samples;
  std::vector<double> acceptance_per_level;
  double s_acceptance = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> final_proposal_scales;
  DensityOnGrid posterior_mean_density;  // values empty when not tracked
  bool diverged = false;
  double series_tail_bound = 0.0;
};

// Discretized posterior over wavelet coefficients:
//   log pi(w | X) = sum_i log phi(w(X_i)) - n log int phi(w) + log prior(w)
// with the integral by midpoint quadrature at the basis grid level.  For the
// hierarchical regime the state is augmented: levels up to the largest
// truncation the hyper-prior support allows always carry coefficients with
// conditional scalings sigma_l(S) = 2^{-l(S+d/2)}; the likelihood only sees
// levels l <= L_{S,n}.  This keeps smoothness moves fixed-dimensional while
// the marginal law of the active coefficients matches the truncated prior.
class PosteriorModel {
 public:
  PosteriorModel(const PriorSpec& spec, const Dataset& data,
                 const LinkFunction& link, const WaveletBasis& basis,
                 bool likelihood_enabled = true, bool track_density = true);

  const PriorSpec& spec() const { return spec_; }
  const WaveletBasis& basis() const { return *basis_; }
  const LinkFunction& link() const { return link_; }
  bool hierarchical() const { return spec_.regime == PriorRegime::hierarchical; }
  bool likelihood_enabled() const { return likelihood_enabled_; }
  bool track_density() const { return track_density_; }
  const HyperPrior* hyper_prior() const { return hyper_ ? &*hyper_ : nullptr; }
  int storage_levels() const { return storage_levels_; }
  int active_levels_for(double s) const;
  double sigma(int level, double s) const;  // conditional scaling
  std::int64_t data_size() const { return n_data_; }
  int grid_level() const { return grid_level_; }

  ChainState initial_state(std::optional<double> s_init = std::nullopt) const;
  // Load coefficients (and S) into a coherent state; entries outside the
  // storage range are an error.
  ChainState state_from(const CoefficientTree& coeffs,
                        std::optional<double> s = std::nullopt) const;

  // Recompute every cache from the dense coefficients; returns the log
  // posterior and refreshes state.cached_log_post.
  double recompute(ChainState& state) const;

  // Largest absolute cache discrepancy (w at data, normalizer, log post)
  // between the incremental state and a fresh recompute.
  double coherence_error(const ChainState& state) const;

  // sorted data view (ascending first coordinate for d=1)
  const std::vector<double>& sorted_points() const { return sorted_points_; }

 private:
  friend class PosteriorSampler;
  PriorSpec spec_;
  const LinkFunction link_;
  const WaveletBasis* basis_;
  bool likelihood_enabled_ = true;
  bool track_density_ = true;
  std::optional<HyperPrior> hyper_;
  int storage_levels_ = 0;
  int grid_level_ = 0;
  std::int64_t n_data_ = 0;
  std::vector<double> sorted_points_;  // d=1 sorted; d=2 original order
  std::vector<std::int64_t> level_support_cells_;  // psi_{l,1} support length
  double cell_weight_ = 1.0;

  double prior_log_density(const ChainState& state) const;
  void rebuild_likelihood(ChainState& state) const;
  double eval_w_at(const ChainState& state, const double* x) const;
};

class PosteriorSampler {
 public:
  PosteriorSampler(const PosteriorModel& model, const MCMCConfig& config);

  ChainState& state() { return state_; }
  const ChainState& state() const { return state_; }

  MhStepResult coefficient_step(RngStream& rng);
  MhStepResult smoothness_step(RngStream& rng);  // hierarchical only
  void gibbs_sweep(RngStream& rng);

  // Full run per the config (seed, burn-in, thinning, adaptation); pass an
  // optional reference density to record per-sample TV distances.
  ChainSummary run(const DensityOnGrid* reference = nullptr);

  const std::vector<double>& proposal_scales() const { return scales_; }

 private:
  const PosteriorModel& model_;
  MCMCConfig config_;
  ChainState state_;
  std::vector<double> scales_;
  double s_scale_ = 0.0;
  std::vector<std::int64_t> attempts_, accepts_;
  std::int64_t s_attempts_ = 0, s_accepts_ = 0;
  bool adapting_ = false;
  // scratch buffers
  std::vector<double> scratch_phi_;
  std::vector<std::int64_t> scratch_cells_;

  void adapt_scale(int level, double alpha);
  void adapt_s_scale(double alpha);
};

// Log likelihood sum_i log phi(w(X_i)) - n log int phi(w), from scratch,
// with w(X_i) by direct basis evaluation and the integral by grid
// quadrature at the basis grid level.
double log_likelihood(const CoefficientTree& coeffs, const Dataset& data,
                      const LinkFunction& link, const WaveletBasis& basis);

// Log posterior (likelihood + prior, plus the hyper-prior term when s is
// engaged), sharing the model definition used by the sampler.
double log_posterior_value(const CoefficientTree& coeffs,
                           std::optional<double> s, const PriorSpec& spec,
                           const Dataset& data, const LinkFunction& link,
                           const WaveletBasis& basis);

ChainSummary run_chain(const MCMCConfig& config, const PriorSpec& spec,
                       const Dataset& data, const LinkFunction& link,
                       const WaveletBasis& basis,
                       const DensityOnGrid* reference = nullptr);

}  // namespace besov
