// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/posterior.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace besov {

namespace {

std::int64_t pow2(int k) { return std::int64_t{1} << k; }

double log_or_inf(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

void Dataset::validate() const {
  if (dim < 1 || dim > 2) throw std::invalid_argument("dataset: dim 1 or 2");
  if (points.empty() || points.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("dataset: needs n >= 1 complete points");
  }
  for (double v : points) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("dataset: coordinates must lie in [0,1]");
    }
  }
}

void MCMCConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("mcmc: iterations >= 1");
  if (effective_burn_in() >= iterations) {
    throw std::invalid_argument("mcmc: burn_in must be < iterations");
  }
  if (thinning < 1) throw std::invalid_argument("mcmc: thinning >= 1");
  for (double s : proposal_scales) {
    if (!(s > 0.0)) throw std::invalid_argument("mcmc: scales must be > 0");
  }
  if (s_proposal_scale < 0.0) {
    throw std::invalid_argument("mcmc: s proposal scale must be >= 0");
  }
}

CoefficientTree ChainState::coeffs() const {
  CoefficientTree tree;
  for (int l = 1; l <= active_levels; ++l) {
    const auto& lv = levels[static_cast<std::size_t>(l - 1)];
    for (std::size_t k = 0; k < lv.size(); ++k) {
      if (lv[k] != 0.0) tree.set(l, static_cast<std::int64_t>(k) + 1, lv[k]);
    }
  }
  tree.set_max_level(active_levels);
  return tree;
}

PosteriorModel::PosteriorModel(const PriorSpec& spec, const Dataset& data,
                               const LinkFunction& link,
                               const WaveletBasis& basis,
                               bool likelihood_enabled, bool track_density)
    : spec_(spec),
      link_(link),
      basis_(&basis),
      likelihood_enabled_(likelihood_enabled) {
  spec_.validate();
  data.validate();
  if (data.dim != spec_.d || basis.dim() != spec_.d) {
    throw std::invalid_argument("posterior: dimension mismatch");
  }
  track_density_ = likelihood_enabled || track_density;
  grid_level_ = basis.max_grid_level();
  cell_weight_ = std::ldexp(1.0, -grid_level_ * spec_.d);
  if (hierarchical()) {
    hyper_.emplace(static_cast<double>(spec_.n), spec_.d);
    storage_levels_ = std::min(
        truncation_level(static_cast<double>(spec_.d), spec_.d, spec_.n),
        spec_.l_max);
  } else {
    storage_levels_ = effective_truncation(spec_);
  }
  if (storage_levels_ > grid_level_ - 1) {
    throw std::invalid_argument(
        "posterior: model levels exceed grid resolution J-1; raise the grid "
        "level or lower l_max");
  }
  n_data_ = data.size();
  sorted_points_ = data.points;
  if (spec_.d == 1) std::sort(sorted_points_.begin(), sorted_points_.end());
  level_support_cells_.assign(static_cast<std::size_t>(storage_levels_) + 1,
                              0);
  for (int l = 1; l <= storage_levels_; ++l) {
    const auto& tab = basis.level_tabulation(l);
    std::int64_t len = static_cast<std::int64_t>(tab.size());
    while (len > 0 && tab[static_cast<std::size_t>(len - 1)] == 0.0) --len;
    level_support_cells_[static_cast<std::size_t>(l)] = len;
  }
}

int PosteriorModel::active_levels_for(double s) const {
  if (!hierarchical()) return storage_levels_;
  return std::min(truncation_level(s, spec_.d, spec_.n), storage_levels_);
}

double PosteriorModel::sigma(int level, double s) const {
  if (hierarchical()) {
    return std::exp2(-level * (s + static_cast<double>(spec_.d) / 2.0));
  }
  return scaling_factor(spec_, level);
}

double PosteriorModel::prior_log_density(const ChainState& state) const {
  const double s = state.s_current.value_or(spec_.s);
  double logp = 0.0;
  for (int l = 1; l <= storage_levels_; ++l) {
    const double sg = sigma(l, s);
    const auto m = static_cast<double>(pow2(l * spec_.d));
    logp -= m * std::log(2.0 * sg);
    logp -= state.level_abs_sum[static_cast<std::size_t>(l - 1)] / sg;
  }
  if (hierarchical()) logp += hyper_->log_density(s);
  return logp;
}

double PosteriorModel::eval_w_at(const ChainState& state,
                                 const double* x) const {
  const auto filter_len =
      static_cast<std::int64_t>(basis_->decomposition_low().size());
  double w = 0.0;
  for (int l = 1; l <= state.active_levels; ++l) {
    const auto& lv = state.levels[static_cast<std::size_t>(l - 1)];
    const std::int64_t per = pow2(l);
    const std::int64_t span = std::min(per, filter_len);
    const auto base0 =
        static_cast<std::int64_t>(std::floor(std::ldexp(x[0], l)));
    if (spec_.d == 1) {
      for (std::int64_t t = 0; t < span; ++t) {
        const std::int64_t k = ((base0 - t) % per + per) % per;
        const double c = lv[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        w += c * basis_->eval(l, k + 1, std::span<const double>(x, 1));
      }
    } else {
      const auto base1 =
          static_cast<std::int64_t>(std::floor(std::ldexp(x[1], l)));
      for (std::int64_t t0 = 0; t0 < span; ++t0) {
        const std::int64_t k0 = ((base0 - t0) % per + per) % per;
        for (std::int64_t t1 = 0; t1 < span; ++t1) {
          const std::int64_t k1 = ((base1 - t1) % per + per) % per;
          const std::int64_t r = k0 * per + k1;
          const double c = lv[static_cast<std::size_t>(r)];
          if (c == 0.0) continue;
          w += c * basis_->eval(l, r + 1, std::span<const double>(x, 2));
        }
      }
    }
  }
  return w;
}

void PosteriorModel::rebuild_likelihood(ChainState& state) const {
  if (likelihood_enabled_) {
    state.w_at_data.assign(static_cast<std::size_t>(n_data_), 0.0);
    state.sum_log_phi_data = 0.0;
    for (std::int64_t i = 0; i < n_data_; ++i) {
      const double* x = &sorted_points_[static_cast<std::size_t>(i) * spec_.d];
      const double w = eval_w_at(state, x);
      state.w_at_data[static_cast<std::size_t>(i)] = w;
      state.sum_log_phi_data += link_.log_eval(w);
    }
  }
  if (track_density_) {
    std::vector<std::vector<double>> active(
        state.levels.begin(),
        state.levels.begin() + state.active_levels);
    GridFunction w = synthesize_dense(active, *basis_, grid_level_);
    state.w_grid = std::move(w.values);
    state.phi_grid.resize(state.w_grid.size());
    double norm = 0.0;
    for (std::size_t c = 0; c < state.w_grid.size(); ++c) {
      state.phi_grid[c] = link_.eval(state.w_grid[c]);
      norm += state.phi_grid[c];
    }
    state.norm_sum = norm;
  }
}

double PosteriorModel::recompute(ChainState& state) const {
  state.level_abs_sum.assign(static_cast<std::size_t>(storage_levels_), 0.0);
  for (int l = 1; l <= storage_levels_; ++l) {
    double s = 0.0;
    for (double c : state.levels[static_cast<std::size_t>(l - 1)]) {
      s += std::abs(c);
    }
    state.level_abs_sum[static_cast<std::size_t>(l - 1)] = s;
  }
  state.active_levels =
      active_levels_for(state.s_current.value_or(spec_.s));
  state.cell_weight = cell_weight_;
  state.log_prior = prior_log_density(state);
  rebuild_likelihood(state);
  double logpost = state.log_prior;
  if (likelihood_enabled_) {
    logpost += state.sum_log_phi_data -
               static_cast<double>(n_data_) *
                   log_or_inf(state.norm_sum * cell_weight_);
  }
  state.cached_log_post = logpost;
  return logpost;
}

double PosteriorModel::coherence_error(const ChainState& state) const {
  ChainState fresh = state;
  recompute(fresh);
  double err = std::abs(fresh.cached_log_post - state.cached_log_post);
  if (likelihood_enabled_) {
    for (std::size_t i = 0; i < fresh.w_at_data.size(); ++i) {
      err = std::max(err, std::abs(fresh.w_at_data[i] - state.w_at_data[i]));
    }
  }
  if (track_density_) {
    err = std::max(err, std::abs(fresh.norm_sum - state.norm_sum) *
                            cell_weight_);
  }
  return err;
}

ChainState PosteriorModel::initial_state(std::optional<double> s_init) const {
  ChainState state;
  state.levels.resize(static_cast<std::size_t>(storage_levels_));
  for (int l = 1; l <= storage_levels_; ++l) {
    state.levels[static_cast<std::size_t>(l - 1)].assign(
        static_cast<std::size_t>(pow2(l * spec_.d)), 0.0);
  }
  if (hierarchical()) {
    double s0 = s_init.value_or(
        0.5 * (hyper_->support_lo() + hyper_->support_hi()));
    if (s0 <= hyper_->support_lo() || s0 > hyper_->support_hi()) {
      throw std::invalid_argument("posterior: s_init outside support");
    }
    state.s_current = s0;
  }
  recompute(state);
  return state;
}

ChainState PosteriorModel::state_from(const CoefficientTree& coeffs,
                                      std::optional<double> s) const {
  ChainState state = initial_state(s);
  for (const auto& [key, value] : coeffs.entries()) {
    const auto [l, r] = key;
    if (l > storage_levels_ || r > pow2(l * spec_.d)) {
      throw std::invalid_argument(
          "posterior: coefficient outside the model support");
    }
    state.levels[static_cast<std::size_t>(l - 1)]
                [static_cast<std::size_t>(r - 1)] = value;
  }
  recompute(state);
  return state;
}

PosteriorSampler::PosteriorSampler(const PosteriorModel& model,
                                   const MCMCConfig& config)
    : model_(model), config_(config) {
  config_.validate();
  state_ = model_.initial_state(config_.s_init);
  const int levels = model_.storage_levels();
  const double s = state_.s_current.value_or(model_.spec().s);
  scales_.resize(static_cast<std::size_t>(levels));
  for (int l = 1; l <= levels; ++l) {
    if (!config_.proposal_scales.empty()) {
      scales_[static_cast<std::size_t>(l - 1)] =
          config_.proposal_scales[std::min<std::size_t>(
              static_cast<std::size_t>(l - 1),
              config_.proposal_scales.size() - 1)];
    } else {
      scales_[static_cast<std::size_t>(l - 1)] = model_.sigma(l, s);
    }
  }
  if (model_.hierarchical()) {
    const auto* hp = model_.hyper_prior();
    s_scale_ = config_.s_proposal_scale > 0.0
                   ? config_.s_proposal_scale
                   : (hp->support_hi() - hp->support_lo()) / 8.0;
  }
  attempts_.assign(static_cast<std::size_t>(levels), 0);
  accepts_.assign(static_cast<std::size_t>(levels), 0);
  adapting_ = config_.adapt;
}

void PosteriorSampler::adapt_scale(int level, double alpha) {
  if (!adapting_) return;
  auto& n = attempts_[static_cast<std::size_t>(level - 1)];
  const double gamma =
      config_.adaptation_rate / std::pow(10.0 + static_cast<double>(n), 0.6);
  double ls = std::log(scales_[static_cast<std::size_t>(level - 1)]);
  ls += gamma * (alpha - config_.target_acceptance);
  ls = std::clamp(ls, -18.0, 9.0);
  scales_[static_cast<std::size_t>(level - 1)] = std::exp(ls);
}

void PosteriorSampler::adapt_s_scale(double alpha) {
  if (!adapting_) return;
  const double gamma =
      config_.adaptation_rate /
      std::pow(10.0 + static_cast<double>(s_attempts_), 0.6);
  double ls = std::log(s_scale_);
  ls += gamma * (alpha - config_.target_acceptance);
  const auto* hp = model_.hyper_prior();
  const double width = hp->support_hi() - hp->support_lo();
  ls = std::clamp(ls, std::log(1e-4 * width), std::log(width));
  s_scale_ = std::exp(ls);
}

MhStepResult PosteriorSampler::coefficient_step(RngStream& rng) {
  const int storage = model_.storage_levels();
  const int level = 1 + static_cast<int>(rng.uniform_below(
                            static_cast<std::uint64_t>(storage)));
  const std::int64_t per = pow2(level * model_.spec().d);
  const auto index = static_cast<std::int64_t>(
      rng.uniform_below(static_cast<std::uint64_t>(per)));
  const double delta =
      scales_[static_cast<std::size_t>(level - 1)] * rng.normal();

  auto& lv = state_.levels[static_cast<std::size_t>(level - 1)];
  const double c_old = lv[static_cast<std::size_t>(index)];
  const double c_new = c_old + delta;
  const double s_cur = state_.s_current.value_or(model_.spec().s);
  const double sg = model_.sigma(level, s_cur);
  const double d_prior = (std::abs(c_old) - std::abs(c_new)) / sg;

  const bool in_likelihood = level <= state_.active_levels;
  const bool touch_grid = model_.track_density() && in_likelihood;
  const bool touch_data = model_.likelihood_enabled() && in_likelihood;

  // grid cells in the support of psi_{level,index+1}
  double d_lik = 0.0;
  double d_sum_log_phi = 0.0;
  scratch_cells_.clear();
  scratch_phi_.clear();
  double new_norm_delta = 0.0;
  const int J = model_.grid_level();
  const int d = model_.spec().d;
  if (touch_grid) {
    const auto& tab = model_.basis().level_tabulation(level);
    const std::int64_t cells =
        model_.level_support_cells_[static_cast<std::size_t>(level)];
    const std::int64_t n1 = pow2(J);
    if (d == 1) {
      const std::int64_t start = index * pow2(J - level);
      for (std::int64_t c = 0; c < cells; ++c) {
        const std::int64_t cell = (start + c) & (n1 - 1);
        const double nw =
            state_.w_grid[static_cast<std::size_t>(cell)] +
            delta * tab[static_cast<std::size_t>(c)];
        const double np = model_.link().eval(nw);
        scratch_cells_.push_back(cell);
        scratch_phi_.push_back(np);
        new_norm_delta +=
            np - state_.phi_grid[static_cast<std::size_t>(cell)];
      }
    } else {
      const std::int64_t per1 = pow2(level);
      const std::int64_t k0 = index / per1;
      const std::int64_t k1 = index % per1;
      const std::int64_t s0 = k0 * pow2(J - level);
      const std::int64_t s1 = k1 * pow2(J - level);
      for (std::int64_t a = 0; a < cells; ++a) {
        const std::int64_t ca = (s0 + a) & (n1 - 1);
        const double ta = tab[static_cast<std::size_t>(a)];
        if (ta == 0.0) continue;
        for (std::int64_t b = 0; b < cells; ++b) {
          const std::int64_t cb = (s1 + b) & (n1 - 1);
          const std::int64_t cell = ca * n1 + cb;
          const double nw = state_.w_grid[static_cast<std::size_t>(cell)] +
                            delta * ta * tab[static_cast<std::size_t>(b)];
          const double np = model_.link().eval(nw);
          scratch_cells_.push_back(cell);
          scratch_phi_.push_back(np);
          new_norm_delta +=
              np - state_.phi_grid[static_cast<std::size_t>(cell)];
        }
      }
    }
  }

  // data points in the support
  static thread_local std::vector<std::pair<std::int64_t, double>>
      touched_data;
  touched_data.clear();
  if (touch_data) {
    const auto& pts = model_.sorted_points();
    const auto n = model_.data_size();
    auto visit = [&](std::int64_t i) {
      const double* x = &pts[static_cast<std::size_t>(i) * d];
      const double psi = model_.basis().eval(
          level, index + 1, std::span<const double>(x, static_cast<size_t>(d)));
      if (psi == 0.0) return;
      const double w_new =
          state_.w_at_data[static_cast<std::size_t>(i)] + delta * psi;
      touched_data.emplace_back(i, w_new);
      d_sum_log_phi +=
          model_.link().log_eval(w_new) -
          model_.link().log_eval(
              state_.w_at_data[static_cast<std::size_t>(i)]);
    };
    if (d == 1) {
      const auto filter_len = static_cast<std::int64_t>(
          model_.basis().decomposition_low().size());
      const double lo = std::ldexp(static_cast<double>(index), -level);
      const double len =
          std::ldexp(static_cast<double>(filter_len - 1), -level);
      auto scan = [&](double a, double b) {
        auto it0 = std::lower_bound(pts.begin(), pts.end(), a);
        auto it1 = std::upper_bound(pts.begin(), pts.end(), b);
        for (auto it = it0; it != it1; ++it) {
          visit(static_cast<std::int64_t>(it - pts.begin()));
        }
      };
      if (len >= 1.0) {
        for (std::int64_t i = 0; i < n; ++i) visit(i);
      } else {
        const double hi = lo + len;
        if (hi <= 1.0) {
          scan(lo, hi);
        } else {
          scan(lo, 1.0);
          scan(0.0, hi - 1.0);
        }
      }
    } else {
      for (std::int64_t i = 0; i < n; ++i) visit(i);
    }
    const double n_d = static_cast<double>(n);
    const double new_norm = state_.norm_sum + new_norm_delta;
    d_lik = d_sum_log_phi -
            n_d * (log_or_inf(new_norm * state_.cell_weight) -
                   log_or_inf(state_.norm_sum * state_.cell_weight));
  }

  const double d_logpost = d_prior + d_lik;
  const double alpha = std::min(1.0, std::exp(d_logpost));
  const double u = rng.uniform01();
  MhStepResult result{u < alpha, alpha, level, index + 1};

  if (result.accepted) {
    lv[static_cast<std::size_t>(index)] = c_new;
    state_.level_abs_sum[static_cast<std::size_t>(level - 1)] +=
        std::abs(c_new) - std::abs(c_old);
    state_.log_prior += d_prior;
    if (touch_grid) {
      const auto& tab = model_.basis().level_tabulation(level);
      const std::int64_t cells =
          model_.level_support_cells_[static_cast<std::size_t>(level)];
      const std::int64_t n1 = pow2(J);
      if (d == 1) {
        const std::int64_t start = index * pow2(J - level);
        for (std::int64_t c = 0; c < cells; ++c) {
          const std::int64_t cell = (start + c) & (n1 - 1);
          state_.w_grid[static_cast<std::size_t>(cell)] +=
              delta * tab[static_cast<std::size_t>(c)];
          state_.phi_grid[static_cast<std::size_t>(cell)] =
              scratch_phi_[static_cast<std::size_t>(c)];
        }
      } else {
        std::size_t sc = 0;
        const std::int64_t per1 = pow2(level);
        const std::int64_t k0 = index / per1;
        const std::int64_t k1 = index % per1;
        const std::int64_t s0 = k0 * pow2(J - level);
        const std::int64_t s1 = k1 * pow2(J - level);
        for (std::int64_t a = 0; a < cells; ++a) {
          const double ta = tab[static_cast<std::size_t>(a)];
          if (ta == 0.0) continue;
          const std::int64_t ca = (s0 + a) & (n1 - 1);
          for (std::int64_t b = 0; b < cells; ++b) {
            const std::int64_t cell = ca * n1 + ((s1 + b) & (n1 - 1));
            state_.w_grid[static_cast<std::size_t>(cell)] +=
                delta * ta * tab[static_cast<std::size_t>(b)];
            state_.phi_grid[static_cast<std::size_t>(cell)] =
                scratch_phi_[sc++];
          }
        }
      }
      // full quadrature refresh of the normalizing sum
      double norm = 0.0;
      for (double p : state_.phi_grid) norm += p;
      state_.norm_sum = norm;
    }
    if (touch_data) {
      for (const auto& [i, w_new] : touched_data) {
        state_.w_at_data[static_cast<std::size_t>(i)] = w_new;
      }
      state_.sum_log_phi_data += d_sum_log_phi;
      state_.cached_log_post =
          state_.log_prior + state_.sum_log_phi_data -
          static_cast<double>(model_.data_size()) *
              log_or_inf(state_.norm_sum * state_.cell_weight);
    } else {
      state_.cached_log_post += d_prior;
    }
  }

  ++attempts_[static_cast<std::size_t>(level - 1)];
  if (result.accepted) ++accepts_[static_cast<std::size_t>(level - 1)];
  adapt_scale(level, alpha);
  return result;
}

MhStepResult PosteriorSampler::smoothness_step(RngStream& rng) {
  if (!model_.hierarchical()) {
    throw std::logic_error("smoothness_step: not a hierarchical model");
  }
  const auto* hp = model_.hyper_prior();
  const double lo = hp->support_lo();
  const double hi = hp->support_hi();
  const double s_old = *state_.s_current;
  double s_new = s_old + s_scale_ * rng.normal();
  for (int guard = 0; guard < 64 && (s_new <= lo || s_new > hi); ++guard) {
    if (s_new <= lo) s_new = 2.0 * lo - s_new;
    if (s_new > hi) s_new = 2.0 * hi - s_new;
  }
  if (s_new <= lo || s_new > hi) s_new = 0.5 * (lo + hi);

  double delta = hp->log_density(s_new) - hp->log_density(s_old);
  for (int l = 1; l <= model_.storage_levels(); ++l) {
    const double sg_old = model_.sigma(l, s_old);
    const double sg_new = model_.sigma(l, s_new);
    const auto m = static_cast<double>(pow2(l * model_.spec().d));
    delta += m * std::log(sg_old / sg_new);
    delta += state_.level_abs_sum[static_cast<std::size_t>(l - 1)] *
             (1.0 / sg_old - 1.0 / sg_new);
  }

  const int active_old = state_.active_levels;
  const int active_new = model_.active_levels_for(s_new);
  ChainState proposed_caches;  // only used when the active set changes
  bool rebuilt = false;
  if (active_new != active_old &&
      (model_.likelihood_enabled() || model_.track_density())) {
    proposed_caches = state_;
    proposed_caches.s_current = s_new;
    proposed_caches.active_levels = active_new;
    model_.rebuild_likelihood(proposed_caches);
    rebuilt = true;
    if (model_.likelihood_enabled()) {
      const double n_d = static_cast<double>(model_.data_size());
      const double lik_new =
          proposed_caches.sum_log_phi_data -
          n_d * log_or_inf(proposed_caches.norm_sum * state_.cell_weight);
      const double lik_old =
          state_.sum_log_phi_data -
          n_d * log_or_inf(state_.norm_sum * state_.cell_weight);
      delta += lik_new - lik_old;
    }
  }

  const double alpha = std::min(1.0, std::exp(delta));
  const double u = rng.uniform01();
  MhStepResult result{u < alpha, alpha, 0, 0};
  if (result.accepted) {
    state_.s_current = s_new;
    state_.active_levels = active_new;
    if (rebuilt) {
      state_.w_at_data = std::move(proposed_caches.w_at_data);
      state_.sum_log_phi_data = proposed_caches.sum_log_phi_data;
      state_.w_grid = std::move(proposed_caches.w_grid);
      state_.phi_grid = std::move(proposed_caches.phi_grid);
      state_.norm_sum = proposed_caches.norm_sum;
    }
    state_.log_prior = model_.prior_log_density(state_);
    state_.cached_log_post = state_.log_prior;
    if (model_.likelihood_enabled()) {
      state_.cached_log_post +=
          state_.sum_log_phi_data -
          static_cast<double>(model_.data_size()) *
              log_or_inf(state_.norm_sum * state_.cell_weight);
    }
  }
  ++s_attempts_;
  if (result.accepted) ++s_accepts_;
  adapt_s_scale(alpha);
  return result;
}

void PosteriorSampler::gibbs_sweep(RngStream& rng) {
  std::int64_t k1 = config_.coefficient_steps_per_sweep;
  if (k1 <= 0) {
    k1 = 0;
    for (int l = 1; l <= model_.storage_levels(); ++l) {
      k1 += pow2(l * model_.spec().d);
    }
  }
  for (std::int64_t i = 0; i < k1; ++i) coefficient_step(rng);
  for (int i = 0; i < config_.s_steps_per_sweep; ++i) smoothness_step(rng);
}

ChainSummary PosteriorSampler::run(const DensityOnGrid* reference) {
  RngStream rng(config_.seed);
  ChainSummary summary;
  summary.series_tail_bound = tail_sup_bound(model_.spec());
  const std::int64_t burn = config_.effective_burn_in();
  const bool want_density = model_.track_density();
  if (reference != nullptr) {
    if (!want_density) {
      throw std::invalid_argument("run: reference needs density tracking");
    }
    if (reference->dim != model_.spec().d ||
        reference->grid_level != model_.grid_level()) {
      throw std::invalid_argument("run: reference grid mismatch");
    }
  }
  std::vector<double> mean_density;
  if (want_density) mean_density.assign(state_.phi_grid.size(), 0.0);
  std::int64_t kept = 0;

  for (std::int64_t it = 0; it < config_.iterations; ++it) {
    if (it == burn) adapting_ = false;
    if (model_.hierarchical()) {
      gibbs_sweep(rng);
    } else {
      coefficient_step(rng);
    }
    if (!std::isfinite(state_.cached_log_post)) {
      summary.diverged = true;
      break;
    }
#ifndef NDEBUG
    // cache coherence contract, checked in debug builds
    if ((it & 4095) == 4095) {
      assert(model_.coherence_error(state_) < 1e-6);
    }
#endif
    if (it >= burn && (it - burn) % config_.thinning == 0) {
      KeptSample sample;
      sample.iteration = it;
      sample.logpost = state_.cached_log_post;
      if (state_.s_current) sample.s = *state_.s_current;
      if (want_density) {
        const double inv = 1.0 / (state_.norm_sum * state_.cell_weight);
        if (reference != nullptr) {
          double acc = 0.0;
          for (std::size_t c = 0; c < state_.phi_grid.size(); ++c) {
            acc += std::abs(state_.phi_grid[c] * inv - reference->values[c]);
          }
          sample.tv_to_ref = 0.5 * acc * state_.cell_weight;
        }
        for (std::size_t c = 0; c < state_.phi_grid.size(); ++c) {
          mean_density[c] += state_.phi_grid[c] * inv;
        }
      }
      sample.probes.reserve(config_.probes.size());
      for (const auto& [l, r] : config_.probes) {
        sample.probes.push_back(
            l <= model_.storage_levels()
                ? state_.levels[static_cast<std::size_t>(l - 1)]
                               [static_cast<std::size_t>(r - 1)]
                : 0.0);
      }
      summary.samples.push_back(std::move(sample));
      ++kept;
    }
  }

  summary.acceptance_per_level.resize(attempts_.size());
  for (std::size_t l = 0; l < attempts_.size(); ++l) {
    summary.acceptance_per_level[l] =
        attempts_[l] > 0 ? static_cast<double>(accepts_[l]) /
                               static_cast<double>(attempts_[l])
                         : 0.0;
  }
  if (model_.hierarchical() && s_attempts_ > 0) {
    summary.s_acceptance = static_cast<double>(s_accepts_) /
                           static_cast<double>(s_attempts_);
  }
  summary.final_proposal_scales = scales_;
  if (want_density && kept > 0) {
    summary.posterior_mean_density.dim = model_.spec().d;
    summary.posterior_mean_density.grid_level = model_.grid_level();
    summary.posterior_mean_density.values = std::move(mean_density);
    double integral = 0.0;
    for (double& v : summary.posterior_mean_density.values) {
      v /= static_cast<double>(kept);
      integral += v;
    }
    summary.posterior_mean_density.normalizer =
        integral * summary.posterior_mean_density.cell_weight();
  }
  return summary;
}

double log_likelihood(const CoefficientTree& coeffs, const Dataset& data,
                      const LinkFunction& link, const WaveletBasis& basis) {
  data.validate();
  if (data.dim != basis.dim()) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  const GridFunction w = synthesize(coeffs, basis, basis.max_grid_level());
  double norm = 0.0;
  for (double v : w.values) norm += link.eval(v);
  norm *= w.cell_weight();
  const auto filter_len =
      static_cast<std::int64_t>(basis.decomposition_low().size());
  double sum_log = 0.0;
  for (std::int64_t i = 0; i < data.size(); ++i) {
    double wx = 0.0;
    const double* x = &data.points[static_cast<std::size_t>(i) * data.dim];
    for (int l = 1; l <= coeffs.max_level(); ++l) {
      const std::int64_t per = std::int64_t{1} << l;
      const std::int64_t span = std::min(per, filter_len);
      const auto base0 =
          static_cast<std::int64_t>(std::floor(std::ldexp(x[0], l)));
      if (data.dim == 1) {
        for (std::int64_t t = 0; t < span; ++t) {
          const std::int64_t k = ((base0 - t) % per + per) % per;
          const double c = coeffs.get(l, k + 1);
          if (c == 0.0) continue;
          wx += c * basis.eval(l, k + 1, std::span<const double>(x, 1));
        }
      } else {
        const auto base1 =
            static_cast<std::int64_t>(std::floor(std::ldexp(x[1], l)));
        for (std::int64_t t0 = 0; t0 < span; ++t0) {
          const std::int64_t k0 = ((base0 - t0) % per + per) % per;
          for (std::int64_t t1 = 0; t1 < span; ++t1) {
            const std::int64_t k1 = ((base1 - t1) % per + per) % per;
            const std::int64_t r = k0 * per + k1 + 1;
            const double c = coeffs.get(l, r);
            if (c == 0.0) continue;
            wx += c * basis.eval(l, r, std::span<const double>(x, 2));
          }
        }
      }
    }
    sum_log += link.log_eval(wx);
  }
  const double result =
      sum_log - static_cast<double>(data.size()) * std::log(norm);
  if (!std::isfinite(result)) {
    throw std::runtime_error("log_likelihood: non-finite evaluation");
  }
  return result;
}

double log_posterior_value(const CoefficientTree& coeffs,
                           std::optional<double> s, const PriorSpec& spec,
                           const Dataset& data, const LinkFunction& link,
                           const WaveletBasis& basis) {
  PosteriorModel model(spec, data, link, basis);
  ChainState state = model.state_from(coeffs, s);
  return state.cached_log_post;
}

ChainSummary run_chain(const MCMCConfig& config, const PriorSpec& spec,
                       const Dataset& data, const LinkFunction& link,
                       const WaveletBasis& basis,
                       const DensityOnGrid* reference) {
  PosteriorModel model(spec, data, link, basis, config.likelihood_enabled,
                       config.track_density);
  PosteriorSampler sampler(model, config);
  return sampler.run(reference);
}

}  // namespace besov
