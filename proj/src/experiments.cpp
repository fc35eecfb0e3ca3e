// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "besov/stats.hpp"

namespace besov {

namespace {

std::int64_t pow2(int k) { return std::int64_t{1} << k; }

// deterministic +-1 pattern for truth constructions
double hash_sign(int level, std::int64_t index) {
  std::uint64_t x = (static_cast<std::uint64_t>(level) << 32) ^
                    static_cast<std::uint64_t>(index) ^ 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return (x & 1) ? 1.0 : -1.0;
}

void run_tasks(int threads, std::int64_t count,
               const std::function<void(std::int64_t)>& task) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  if (threads == 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads, count));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::string truth_kind_name(TruthKind kind) {
  switch (kind) {
    case TruthKind::homogeneous_smooth: return "smooth";
    case TruthKind::inhomogeneous_spiky: return "spiky";
    case TruthKind::custom: return "custom";
  }
  throw std::logic_error("truth_kind_name: unknown kind");
}

TruthKind truth_kind_from_name(const std::string& name) {
  if (name == "smooth") return TruthKind::homogeneous_smooth;
  if (name == "spiky") return TruthKind::inhomogeneous_spiky;
  if (name == "custom") return TruthKind::custom;
  throw std::invalid_argument("unknown truth kind '" + name + "'");
}

LinkFunction TruthSpec::make_link() const {
  return link == LinkKind::exponential ? LinkFunction::exponential()
                                       : LinkFunction::regular_floor(floor);
}

TruthResult make_truth(const TruthSpec& spec, const WaveletBasis& basis,
                       int grid_level) {
  if (spec.d != basis.dim()) {
    throw std::invalid_argument("make_truth: dimension mismatch");
  }
  if (spec.kind != TruthKind::custom && spec.levels > grid_level - 1) {
    throw std::invalid_argument("make_truth: levels exceed grid resolution");
  }
  CoefficientTree w0;
  const double d = static_cast<double>(spec.d);
  switch (spec.kind) {
    case TruthKind::homogeneous_smooth: {
      for (int l = 1; l <= spec.levels; ++l) {
        const double mag = spec.amplitude * std::exp2(-l * (spec.s_true + d / 2.0));
        const std::int64_t count = pow2(l * spec.d);
        for (std::int64_t r = 1; r <= count; ++r) {
          w0.set(l, r, mag * hash_sign(l, r));
        }
      }
      w0.set_max_level(std::max(1, spec.levels));
      break;
    }
    case TruthKind::inhomogeneous_spiky: {
      // smooth low-level background
      for (int l = 1; l <= std::min(2, spec.levels); ++l) {
        const double mag = spec.background * spec.amplitude *
                           std::exp2(-l * (spec.s_true + d / 2.0));
        const std::int64_t count = pow2(l * spec.d);
        for (std::int64_t r = 1; r <= count; ++r) {
          w0.set(l, r, mag * hash_sign(l, r));
        }
      }
      // one dyadic path with the l1-critical decay, signs aligned at the
      // spike so the contributions stack up
      std::vector<double> x(static_cast<std::size_t>(spec.d),
                            spec.spike_location);
      for (int l = 1; l <= spec.levels; ++l) {
        const std::int64_t per = pow2(l);
        std::int64_t k0 = std::min<std::int64_t>(
            per - 1,
            static_cast<std::int64_t>(std::floor(
                std::ldexp(spec.spike_location, l))));
        std::int64_t r = k0 + 1;
        if (spec.d == 2) r = k0 * per + k0 + 1;
        const double psi = basis.eval(l, r, std::span<const double>(x));
        const double sign = psi >= 0.0 ? 1.0 : -1.0;
        const double mag = spec.amplitude *
                           std::exp2(-l * (spec.s_true - d / 2.0)) /
                           (static_cast<double>(l) * static_cast<double>(l));
        w0.set(l, r, w0.get(l, r) + sign * mag);
      }
      w0.set_max_level(std::max(1, spec.levels));
      break;
    }
    case TruthKind::custom:
      w0 = spec.custom_coeffs;
      break;
  }
  const GridFunction core = synthesize(w0, basis, grid_level);
  const LinkFunction link = spec.make_link();
  TruthResult out;
  out.p0 = push_forward(core, link);
  out.w0 = std::move(w0);
  for (double v : out.p0.values) {
    if (!(v > 0.0)) {
      throw std::runtime_error("make_truth: density not strictly positive");
    }
  }
  return out;
}

Dataset simulate_data(const DensityOnGrid& p0, std::int64_t n,
                      RngStream& rng) {
  if (n < 1) throw std::invalid_argument("simulate_data: n >= 1");
  const std::size_t cells = p0.values.size();
  std::vector<double> cdf(cells);
  double acc = 0.0;
  const double w = p0.cell_weight();
  for (std::size_t c = 0; c < cells; ++c) {
    acc += p0.values[c] * w;
    cdf[c] = acc;
  }
  const double total = cdf.back();
  const auto side = static_cast<std::int64_t>(
      std::round(std::pow(static_cast<double>(cells),
                          1.0 / static_cast<double>(p0.dim))));
  const double inv_side = 1.0 / static_cast<double>(side);
  Dataset data;
  data.dim = p0.dim;
  data.points.reserve(static_cast<std::size_t>(n * p0.dim));
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = rng.uniform01() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto cell =
        static_cast<std::int64_t>(std::distance(cdf.begin(), it));
    if (p0.dim == 1) {
      const double lo = cell > 0 ? cdf[static_cast<std::size_t>(cell - 1)]
                                 : 0.0;
      const double mass = cdf[static_cast<std::size_t>(cell)] - lo;
      const double frac = mass > 0.0 ? (u - lo) / mass : rng.uniform01();
      data.points.push_back((static_cast<double>(cell) + frac) * inv_side);
    } else {
      const std::int64_t i1 = cell / side;
      const std::int64_t i2 = cell % side;
      data.points.push_back(
          (static_cast<double>(i1) + rng.uniform01()) * inv_side);
      data.points.push_back(
          (static_cast<double>(i2) + rng.uniform01()) * inv_side);
    }
  }
  return data;
}

void StudyConfig::validate() const {
  prior.validate();
  if (n_grid.size() < 3) {
    throw std::invalid_argument("study: n_grid needs length >= 3");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("study: n_grid must be strictly increasing");
    }
  }
  if (replicates < 1) throw std::invalid_argument("study: replicates >= 1");
  if (!synthetic_bypass) mcmc.validate();
  if (!(exclusion_cap >= 0.0 && exclusion_cap <= 1.0)) {
    throw std::invalid_argument("study: exclusion cap in [0,1]");
  }
}

StudyResult contraction_study(const StudyConfig& config,
                              const WaveletBasis& basis) {
  config.validate();
  StudyResult result;
  result.seed = config.seed;
  result.low_regularity_flag =
      static_cast<double>(basis.regularity()) <= config.truth.s_true;

  const auto n_count = static_cast<std::int64_t>(config.n_grid.size());
  const std::int64_t total = n_count * config.replicates;
  result.records.assign(static_cast<std::size_t>(total), StudyRecord{});

  if (config.synthetic_bypass) {
    for (std::int64_t t = 0; t < total; ++t) {
      const auto ni = static_cast<std::size_t>(t / config.replicates);
      StudyRecord& rec = result.records[static_cast<std::size_t>(t)];
      rec.n = config.n_grid[ni];
      rec.replicate = static_cast<int>(t % config.replicates);
      rec.error = config.synthetic_amplitude *
                  std::pow(static_cast<double>(rec.n),
                           config.synthetic_exponent);
    }
  } else {
    const TruthResult truth =
        make_truth(config.truth, basis, basis.max_grid_level());
    const LinkFunction link = config.truth.make_link();
    const RngStream root(config.seed);
    run_tasks(config.threads, total, [&](std::int64_t t) {
      const auto ni = static_cast<std::size_t>(t / config.replicates);
      const int rep = static_cast<int>(t % config.replicates);
      const std::int64_t n = config.n_grid[ni];
      StudyRecord& rec = result.records[static_cast<std::size_t>(t)];
      rec.n = n;
      rec.replicate = rep;
      const auto t0 = std::chrono::steady_clock::now();
      RngStream task_rng = root.derive(static_cast<std::uint64_t>(n))
                               .derive(static_cast<std::uint64_t>(rep));
      RngStream data_rng = task_rng.derive(1);
      PriorSpec prior = config.prior;
      prior.n = n;
      MCMCConfig mcmc = config.mcmc;
      mcmc.seed = task_rng.derive(2).lineage();
      try {
        const Dataset data = simulate_data(truth.p0, n, data_rng);
        const ChainSummary summary =
            run_chain(mcmc, prior, data, link, basis, &truth.p0);
        if (summary.diverged || summary.samples.empty()) {
          rec.excluded = true;
        } else {
          if (config.error_kind == ErrorKind::median_tv) {
            std::vector<double> tv;
            tv.reserve(summary.samples.size());
            for (const auto& s : summary.samples) tv.push_back(s.tv_to_ref);
            rec.error = median(std::move(tv));
          } else {
            rec.error = tv_distance(summary.posterior_mean_density, truth.p0);
          }
          double acc = 0.0;
          for (double a : summary.acceptance_per_level) acc += a;
          rec.mean_acceptance =
              acc / static_cast<double>(summary.acceptance_per_level.size());
          if (!std::isfinite(rec.error)) rec.excluded = true;
        }
      } catch (const std::exception&) {
        rec.excluded = true;
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    });
  }

  for (const auto& rec : result.records) {
    if (rec.excluded) ++result.excluded_count;
  }
  result.quality_failure =
      static_cast<double>(result.excluded_count) >
      config.exclusion_cap * static_cast<double>(total);

  std::vector<std::pair<std::int64_t, double>> med;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    std::vector<double> errs;
    for (const auto& rec : result.records) {
      if (rec.n == config.n_grid[ni] && !rec.excluded) {
        errs.push_back(rec.error);
      }
    }
    if (errs.empty()) {
      result.quality_failure = true;
      continue;
    }
    med.emplace_back(config.n_grid[ni], median(std::move(errs)));
  }
  result.per_n_median = med;
  for (std::size_t i = 1; i < med.size(); ++i) {
    if (med[i].second > med[i - 1].second) ++result.monotone_violations;
  }
  if (med.size() >= 3) result.rate = fit_rate(med);
  return result;
}

PriorDiagnostics prior_diagnostics(const PriorSpec& spec,
                                   const WaveletBasis& basis,
                                   RngStream& rng,
                                   const PriorDiagnosticsOptions& options) {
  if (!options.unit_regular_t) spec.validate();
  if (options.draws < 1000) {
    throw std::invalid_argument("prior_diagnostics: needs >= 1000 draws");
  }
  const int J = basis.max_grid_level();
  const int levels =
      options.unit_regular_t ? spec.l_max : effective_truncation(spec);
  if (levels > J - 1) {
    throw std::invalid_argument("prior_diagnostics: grid too coarse");
  }
  auto sigma = [&](int l) {
    if (options.unit_regular_t) {
      return std::exp2(-l * (*options.unit_regular_t +
                             static_cast<double>(spec.d) / 2.0));
    }
    return scaling_factor(spec, l);
  };

  // dense per-level buffers, refilled for every draw
  std::vector<std::vector<double>> draw(static_cast<std::size_t>(levels));
  for (int l = 1; l <= levels; ++l) {
    draw[static_cast<std::size_t>(l - 1)].assign(
        static_cast<std::size_t>(pow2(l * spec.d)), 0.0);
  }
  auto redraw = [&](RngStream& stream) {
    for (int l = 1; l <= levels; ++l) {
      const double sg = sigma(l);
      for (double& c : draw[static_cast<std::size_t>(l - 1)]) {
        c = sg * stream.laplace();
      }
    }
  };

  // centred sup norms
  std::vector<double> sups(static_cast<std::size_t>(options.draws));
  RngStream draw_rng = rng.derive(1);
  for (std::int64_t i = 0; i < options.draws; ++i) {
    redraw(draw_rng);
    const GridFunction w = synthesize_dense(draw, basis, J);
    sups[static_cast<std::size_t>(i)] = grid_norm(w, GridNormKind::sup);
  }
  std::vector<double> sorted = sups;
  std::sort(sorted.begin(), sorted.end());
  const double n_draws = static_cast<double>(options.draws);

  PriorDiagnostics out;
  // tail table P(||W|| > R) at upper quantiles
  const std::vector<double> tail_probs = {0.5,  0.35, 0.2,  0.12, 0.07,
                                          0.04, 0.02, 0.01, 0.005, 0.002};
  std::vector<double> tr_x, tr_y;
  for (double p : tail_probs) {
    const double r = quantile(sorted, 1.0 - p);
    out.sup_tail.emplace_back(r, p);
    tr_x.push_back(r);
    tr_y.push_back(std::log(p));
  }
  out.tail_fit_slope = ols(tr_x, tr_y).slope;

  // small-ball table P(||W|| <= xi) at lower quantiles
  const std::vector<double> ball_probs = {0.001, 0.002, 0.005, 0.01, 0.02,
                                          0.05,  0.1,   0.2,  0.35, 0.5};
  std::vector<double> sb_x, sb_y;
  for (double p : ball_probs) {
    if (p * n_draws < 20.0) continue;  // too few draws below this quantile
    const double xi = quantile(sorted, p);
    out.small_ball.emplace_back(xi, p);
    if (xi > 0.0) {
      sb_x.push_back(std::log(xi));
      sb_y.push_back(std::log(-std::log(p)));
    }
  }
  if (sb_x.size() >= 3) out.small_ball_slope = ols(sb_x, sb_y).slope;

  // decentering rows at xi = the requested quantile of the centred draws
  const double xi = quantile(sorted, options.decentering_quantile);
  out.xi_used = xi;
  double centred_hits = 0.0;
  for (double s : sups) {
    if (s <= xi) centred_hits += 1.0;
  }
  const double centred_p = centred_hits / n_draws;
  const double centred_se =
      std::sqrt(centred_p * (1.0 - centred_p) / n_draws);

  const int shifts = options.decentering_shifts;
  RngStream shift_rng = rng.derive(2);
  std::vector<double> z_norms(static_cast<std::size_t>(shifts), 0.0);
  std::vector<GridFunction> shift_grids;
  shift_grids.reserve(static_cast<std::size_t>(shifts));
  for (int j = 0; j < shifts; ++j) {
    const double target =
        options.z_norm_min +
        (options.z_norm_max - options.z_norm_min) * shift_rng.uniform01();
    // sparse shift with the weighted-l1 norm exactly at the target
    CoefficientTree shift;
    const int parts = 1 + static_cast<int>(shift_rng.uniform_below(3));
    std::vector<double> weights;
    double wsum = 0.0;
    for (int q = 0; q < parts; ++q) {
      weights.push_back(0.2 + shift_rng.uniform01());
      wsum += weights.back();
    }
    double z_norm = 0.0;
    for (int q = 0; q < parts; ++q) {
      const int l =
          1 + static_cast<int>(shift_rng.uniform_below(
                  static_cast<std::uint64_t>(std::min(levels, 3))));
      const auto r = static_cast<std::int64_t>(
          1 + shift_rng.uniform_below(static_cast<std::uint64_t>(
                  std::int64_t{1} << (l * spec.d))));
      const double sign = shift_rng.uniform01() < 0.5 ? -1.0 : 1.0;
      const double zpart = target * weights[static_cast<std::size_t>(q)] / wsum;
      shift.set(l, r, shift.get(l, r) + sign * zpart * sigma(l));
    }
    for (const auto& [key, value] : shift.entries()) {
      z_norm += std::abs(value) / sigma(key.first);
    }
    z_norms[static_cast<std::size_t>(j)] = z_norm;
    shift_grids.push_back(synthesize(shift, basis, J));
  }

  // one pass of fresh draws serves every shift
  std::vector<double> shifted_hits(static_cast<std::size_t>(shifts), 0.0);
  RngStream mc_rng = rng.derive(3);
  for (std::int64_t i = 0; i < options.draws; ++i) {
    redraw(mc_rng);
    const GridFunction w = synthesize_dense(draw, basis, J);
    for (int j = 0; j < shifts; ++j) {
      const auto& sg = shift_grids[static_cast<std::size_t>(j)].values;
      double sup = 0.0;
      for (std::size_t c = 0; c < w.values.size(); ++c) {
        sup = std::max(sup, std::abs(w.values[c] - sg[c]));
        if (sup > xi) break;
      }
      if (sup <= xi) shifted_hits[static_cast<std::size_t>(j)] += 1.0;
    }
  }
  for (int j = 0; j < shifts; ++j) {
    DecenteringRow row;
    row.z_norm = z_norms[static_cast<std::size_t>(j)];
    row.shifted_p = shifted_hits[static_cast<std::size_t>(j)] / n_draws;
    row.centred_p = centred_p;
    row.lower_bound = std::exp(-row.z_norm) * centred_p;
    const double shifted_se =
        std::sqrt(row.shifted_p * (1.0 - row.shifted_p) / n_draws);
    row.pooled_se = std::sqrt(shifted_se * shifted_se +
                              std::exp(-2.0 * row.z_norm) * centred_se *
                                  centred_se);
    row.holds = row.shifted_p >= row.lower_bound - 3.0 * row.pooled_se;
    out.decentering.push_back(row);
  }
  return out;
}

}  // namespace besov
