// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

// End-to-end acceptance suite.  Each criterion prints one PASS/FAIL line;
// the process exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "besov/cli.hpp"
#include "besov/experiments.hpp"
#include "besov/io.hpp"
#include "besov/metrics.hpp"
#include "besov/posterior.hpp"
#include "besov/stats.hpp"

using namespace besov;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

CoefficientTree random_tree(RngStream& rng, int dim, int max_level,
                            int entries) {
  CoefficientTree tree;
  for (int i = 0; i < entries; ++i) {
    const int l = 1 + static_cast<int>(rng.uniform_below(
                          static_cast<std::uint64_t>(max_level)));
    const auto count = std::int64_t{1} << (l * dim);
    const auto r = static_cast<std::int64_t>(
        1 + rng.uniform_below(static_cast<std::uint64_t>(count)));
    tree.set(l, r, 2.0 * rng.normal());
  }
  tree.set_max_level(max_level);
  return tree;
}

GridFunction random_core(RngStream& rng, const WaveletBasis& basis,
                         double scale) {
  PriorSpec spec;
  spec.regime = PriorRegime::truncated;
  spec.s = 1.5;
  spec.d = 1;
  spec.n = std::int64_t{1} << 40;
  spec.l_max = 5;
  const PriorDraw draw = sample_prior(spec, rng);
  GridFunction g = synthesize(draw.coeffs, basis, basis.max_grid_level());
  for (double& v : g.values) v *= scale;
  return g;
}

double max_coeff_diff(const CoefficientTree& a, const CoefficientTree& b) {
  double m = 0.0;
  for (const auto& [key, value] : a.entries()) {
    m = std::max(m, std::abs(value - b.get(key.first, key.second)));
  }
  for (const auto& [key, value] : b.entries()) {
    m = std::max(m, std::abs(value - a.get(key.first, key.second)));
  }
  return m;
}

// ---------------------------------------------------------------- criteria

Outcome criterion1_roundtrip_parseval() {
  RngStream rng(1001);
  double worst_rt = 0.0, worst_par = 0.0;
  struct Case {
    WaveletFamily family;
    int vm, dim, J, L, count;
  };
  for (const Case& c :
       {Case{WaveletFamily::haar, 1, 1, 12, 6, 400},
        Case{WaveletFamily::haar, 1, 2, 7, 4, 300},
        Case{WaveletFamily::daubechies, 4, 1, 12, 6, 300}}) {
    const WaveletBasis basis = WaveletBasis::make(c.family, c.vm, c.dim, c.J);
    for (int i = 0; i < c.count; ++i) {
      const CoefficientTree tree = random_tree(rng, c.dim, c.L, 30);
      const GridFunction g = synthesize(tree, basis, c.J);
      const CoefficientTree back = analyze(g, basis, c.L);
      worst_rt = std::max(worst_rt, max_coeff_diff(tree, back));
      double sq = 0.0;
      for (const auto& [key, value] : tree.entries()) sq += value * value;
      const double l2 = grid_norm(g, GridNormKind::l2);
      if (sq > 0.0) {
        worst_par = std::max(worst_par, std::abs(l2 * l2 - sq) / sq);
      }
    }
  }
  Outcome out;
  out.pass = worst_rt < 1e-10 && worst_par < 1e-8;
  std::ostringstream d;
  d << "max roundtrip err " << worst_rt << ", max Parseval rel err "
    << worst_par;
  out.detail = d.str();
  return out;
}

Outcome criterion2_besov_oracle() {
  RngStream rng(1002);
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<std::tuple<double, double, double>> triples = {
      {2, 1, 1}, {0.5, 2, 2}, {1.5, 1, 2}, {2, inf, inf}, {1, 2, inf},
      {3, inf, 1}};
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const CoefficientTree tree = random_tree(rng, 1, 9, 60);
    for (const auto& [s, p, q] : triples) {
      // brute force triple sum, written independently of the library path
      std::map<int, std::vector<double>> by_level;
      for (const auto& [key, value] : tree.entries()) {
        by_level[key.first].push_back(value);
      }
      const bool pi = std::isinf(p), qi = std::isinf(q);
      double acc = 0.0;
      for (const auto& [l, cs] : by_level) {
        double inner = 0.0;
        for (double c : cs) {
          inner = pi ? std::max(inner, std::abs(c))
                     : inner + std::pow(std::abs(c), p);
        }
        if (!pi) inner = std::pow(inner, 1.0 / p);
        const double term =
            std::pow(2.0, l * (s - (pi ? 0.0 : 1.0 / p) + 0.5)) * inner;
        acc = qi ? std::max(acc, term) : acc + std::pow(term, q);
      }
      const double oracle = qi ? acc : std::pow(acc, 1.0 / q);
      const double lib = besov_norm(tree, s, p, q, 1);
      if (oracle > 0.0) {
        worst = std::max(worst, std::abs(lib - oracle) / oracle);
      }
    }
  }
  Outcome out;
  out.pass = worst < 1e-12;
  out.detail = "max relative error " + std::to_string(worst);
  return out;
}

Outcome criterion3_density_normalization() {
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 10);
  const LinkFunction exp_link = LinkFunction::exponential();
  const LinkFunction floor_link = LinkFunction::regular_floor(0.1);
  PriorSpec spec;
  spec.regime = PriorRegime::rescaled_undersmoothing;
  spec.s = 2.0;
  spec.d = 1;
  spec.n = 1000;
  spec.l_max = 6;
  RngStream rng(1003);
  double worst_norm = 0.0, worst_shift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PriorDraw draw = sample_prior(spec, rng);
    GridFunction w = synthesize(draw.coeffs, basis, 10);
    for (double& v : w.values) v *= 8.0;  // rescaled draws are tiny
    for (const LinkFunction& link : {exp_link, floor_link}) {
      const DensityOnGrid p = push_forward(w, link);
      double integral = 0.0;
      for (double v : p.values) integral += v;
      integral *= p.cell_weight();
      worst_norm = std::max(worst_norm, std::abs(integral - 1.0));
    }
    // quotient structure: exponential link ignores additive constants
    GridFunction shifted = w;
    const double c = 6.0 * (rng.uniform01() - 0.5);
    for (double& v : shifted.values) v += c;
    const DensityOnGrid p0 = push_forward(w, exp_link);
    const DensityOnGrid p1 = push_forward(shifted, exp_link);
    for (std::size_t k = 0; k < p0.values.size(); ++k) {
      worst_shift = std::max(worst_shift,
                             std::abs(p0.values[k] - p1.values[k]));
    }
    // constant cores give the uniform density through either link
    GridFunction constant = w;
    constant.values.assign(constant.values.size(), c);
    for (const LinkFunction& link : {exp_link, floor_link}) {
      const DensityOnGrid pu = push_forward(constant, link);
      for (double v : pu.values) {
        worst_shift = std::max(worst_shift, std::abs(v - 1.0));
      }
    }
  }
  Outcome out;
  out.pass = worst_norm < 1e-8 && worst_shift < 1e-10;
  std::ostringstream d;
  d << "max |integral-1| " << worst_norm << ", max shift deviation "
    << worst_shift;
  out.detail = d.str();
  return out;
}

Outcome criterion4_lemma_bounds() {
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 10);
  const LinkFunction exp_link = LinkFunction::exponential();
  const LinkFunction floor_link = LinkFunction::regular_floor(0.1);
  RngStream rng(1004);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const GridFunction a = random_core(rng, basis, 1.0);
    const GridFunction b = random_core(rng, basis, 1.0);
    // log-Lipschitz L1 bound
    const DensityOnGrid pa = push_forward(a, exp_link);
    const DensityOnGrid pb = push_forward(b, exp_link);
    double l1 = 0.0;
    for (std::size_t k = 0; k < pa.values.size(); ++k) {
      l1 += std::abs(pa.values[k] - pb.values[k]);
    }
    l1 *= pa.cell_weight();
    if (l1 > log_lipschitz_l1_bound(a, b, exp_link) * (1.0 + 1e-12)) {
      ++violations;
    }
    // floor-link bounds: TV and Kullback-Leibler/variation
    const FloorLinkBounds bounds = floor_link_bounds(a, b, floor_link);
    const DensityOnGrid fa = push_forward(a, floor_link);
    const DensityOnGrid fb = push_forward(b, floor_link);
    if (2.0 * tv_distance(fa, fb) > bounds.tv_bound * (1.0 + 1e-12)) {
      ++violations;
    }
    const KlResult kl = kl_divergence(fb, fa);
    if (std::max(kl.kl, kl.v) > bounds.kl_bound * (1.0 + 1e-12)) {
      ++violations;
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(violations) + " violations over 1000 pairs";
  return out;
}

Outcome criterion5_metric_inequalities() {
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 10);
  RngStream rng(1005);
  int violations = 0;
  const LinkFunction link = LinkFunction::exponential();
  for (int i = 0; i < 1000; ++i) {
    const DensityOnGrid p = push_forward(random_core(rng, basis, 1.0), link);
    const DensityOnGrid q = push_forward(random_core(rng, basis, 1.0), link);
    const DensityOnGrid r = push_forward(random_core(rng, basis, 1.0), link);
    const double tv = tv_distance(p, q);
    const double h = hellinger(p, q);
    if (tv > 1.0 + 1e-12 || h > std::sqrt(2.0) + 1e-12) ++violations;
    if (h * h > 2.0 * tv + 1e-12) ++violations;
    if (2.0 * tv > 2.0 * h + 1e-12) ++violations;
    if (tv_distance(p, r) > tv_distance(p, q) + tv_distance(q, r) + 1e-12) {
      ++violations;
    }
    if (hellinger(p, r) > hellinger(p, q) + hellinger(q, r) + 1e-12) {
      ++violations;
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(violations) + " violations over 1000 triples";
  return out;
}

Outcome criterion6_mcmc_oracle() {
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 10);
  const LinkFunction link = LinkFunction::exponential();
  PriorSpec spec;
  spec.regime = PriorRegime::truncated;
  spec.s = 2.0;
  spec.d = 1;
  spec.n = 50;
  spec.l_max = 1;  // exactly two active coefficients

  CoefficientTree truth;
  truth.set(1, 1, 0.25);
  truth.set(1, 2, -0.4);
  const DensityOnGrid p0 = push_forward(synthesize(truth, basis, 10), link);
  RngStream data_rng(1006);
  const Dataset data = simulate_data(p0, 50, data_rng);

  // deterministic quadrature oracle on 401x401 midpoint nodes
  const double sigma = scaling_factor(spec, 1);
  const double half = 6.0 * sigma;
  const int nodes = 401;
  std::vector<double> logw(static_cast<std::size_t>(nodes) * nodes);
  double max_lw = -1e300;
  for (int i = 0; i < nodes; ++i) {
    const double c1 = -half + 2.0 * half * (i + 0.5) / nodes;
    for (int j = 0; j < nodes; ++j) {
      const double c2 = -half + 2.0 * half * (j + 0.5) / nodes;
      CoefficientTree tree;
      tree.set(1, 1, c1);
      tree.set(1, 2, c2);
      const double lp = log_likelihood(tree, data, link, basis) +
                        log_prior_density(tree, spec);
      logw[static_cast<std::size_t>(i) * nodes + j] = lp;
      max_lw = std::max(max_lw, lp);
    }
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double c1 = -half + 2.0 * half * (i + 0.5) / nodes;
    for (int j = 0; j < nodes; ++j) {
      const double c2 = -half + 2.0 * half * (j + 0.5) / nodes;
      const double w =
          std::exp(logw[static_cast<std::size_t>(i) * nodes + j] - max_lw);
      z += w;
      m1 += w * c1;
      m2 += w * c2;
      s1 += w * c1 * c1;
      s2 += w * c2 * c2;
    }
  }
  const double mean1 = m1 / z, mean2 = m2 / z;
  const double var1 = s1 / z - mean1 * mean1;
  const double var2 = s2 / z - mean2 * mean2;

  MCMCConfig config;
  config.iterations = 200000;
  config.burn_in = 20000;
  config.thinning = 5;
  config.seed = 606;
  config.probes = {{1, 1}, {1, 2}};
  const ChainSummary summary = run_chain(config, spec, data, link, basis);
  std::vector<double> c1s, c2s;
  for (const auto& s : summary.samples) {
    c1s.push_back(s.probes[0]);
    c2s.push_back(s.probes[1]);
  }
  const double guard = 2e-4;  // quadrature discretization allowance
  bool pass = true;
  std::ostringstream d;
  const std::vector<std::pair<std::vector<double>*, double>> means = {
      {&c1s, mean1}, {&c2s, mean2}};
  for (const auto& [chain, want] : means) {
    const double got = mean(*chain);
    const double se = batch_means_se(*chain, 40);
    if (std::abs(got - want) > 3.0 * se + guard) pass = false;
    d << " mean " << got << " vs " << want << " (se " << se << ");";
  }
  const std::vector<std::tuple<std::vector<double>*, double, double>> vars = {
      {&c1s, var1, mean1}, {&c2s, var2, mean2}};
  for (const auto& [chain, want, center] : vars) {
    std::vector<double> sq(chain->size());
    for (std::size_t k = 0; k < chain->size(); ++k) {
      const double dev = (*chain)[k] - center;
      sq[k] = dev * dev;
    }
    const double got = mean(sq);
    const double se = batch_means_se(sq, 40);
    if (std::abs(got - want) > 3.0 * se + guard) pass = false;
    d << " var " << got << " vs " << want << " (se " << se << ");";
  }
  Outcome out;
  out.pass = pass;
  out.detail = d.str();
  return out;
}

Outcome criterion7_prior_marginals() {
  Outcome out;
  std::ostringstream d;
  bool pass = true;
  // fixed-regularity prior, likelihood disabled, 1e5 kept samples
  {
    PriorSpec spec;
    spec.regime = PriorRegime::truncated;
    spec.s = 2.0;
    spec.d = 1;
    spec.n = 1000;
    spec.l_max = 12;  // effective truncation is L_n = 2
    const WaveletBasis basis =
        WaveletBasis::make(WaveletFamily::haar, 1, 1, 8);
    const LinkFunction link = LinkFunction::exponential();
    Dataset dummy;
    dummy.dim = 1;
    dummy.points = {0.5};
    MCMCConfig config;
    config.iterations = 2100000;
    config.burn_in = 100000;
    config.thinning = 20;
    config.likelihood_enabled = false;
    config.track_density = false;
    config.seed = 707;
    config.probes = {{1, 1}, {2, 1}, {2, 3}};
    const ChainSummary summary = run_chain(config, spec, dummy, link, basis);
    for (std::size_t p = 0; p < config.probes.size(); ++p) {
      const double sigma = scaling_factor(spec, config.probes[p].first);
      std::vector<double> values;
      values.reserve(summary.samples.size());
      for (const auto& s : summary.samples) values.push_back(s.probes[p]);
      const double ks = ks_statistic(values, [sigma](double z) {
        const double u = z / sigma;
        return u < 0.0 ? 0.5 * std::exp(u) : 1.0 - 0.5 * std::exp(-u);
      });
      d << " probe(" << config.probes[p].first << ","
        << config.probes[p].second << ") KS " << ks << ";";
      if (ks >= 0.02) pass = false;
    }
    d << " kept " << summary.samples.size() << ";";
  }
  // hierarchical prior-only Gibbs: S-marginal against the tabulated
  // density.  Small n keeps the coefficient block weakly coupled to S so
  // the fixed-coefficient smoothness move mixes within the sweep budget.
  {
    PriorSpec spec;
    spec.regime = PriorRegime::hierarchical;
    spec.s = 2.0;
    spec.d = 1;
    spec.n = 20;
    spec.l_max = 12;
    const WaveletBasis basis =
        WaveletBasis::make(WaveletFamily::haar, 1, 1, 8);
    const LinkFunction link = LinkFunction::exponential();
    Dataset dummy;
    dummy.dim = 1;
    dummy.points = {0.5};
    MCMCConfig config;
    config.iterations = 100000;  // sweeps
    config.burn_in = 5000;
    config.thinning = 1;
    config.likelihood_enabled = false;
    config.track_density = false;
    config.s_steps_per_sweep = 8;
    config.seed = 708;
    const ChainSummary summary = run_chain(config, spec, dummy, link, basis);
    const HyperPrior hyper(20.0, 1);
    std::vector<double> draws;
    draws.reserve(summary.samples.size());
    for (const auto& s : summary.samples) draws.push_back(s.s);
    const double ks =
        ks_statistic(draws, [&](double s) { return hyper.cdf(s); });
    d << " S-chain KS " << ks << " over " << draws.size() << " sweeps";
    if (ks >= 0.02) pass = false;
  }
  out.pass = pass;
  out.detail = d.str();
  return out;
}

Outcome criterion8_small_ball() {
  // unit-scale t-regular element, t = 1, d = 1, truncated at level 10
  PriorSpec spec;
  spec.regime = PriorRegime::truncated;
  spec.s = 2.0;
  spec.d = 1;
  spec.n = 1000;
  spec.l_max = 10;
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 11);
  PriorDiagnosticsOptions options;
  options.draws = 100000;
  options.decentering_shifts = 2;  // not under test here
  options.unit_regular_t = 1.0;
  RngStream rng(1008);
  const PriorDiagnostics diag = prior_diagnostics(spec, basis, rng, options);
  // informative extras: local slope at the smallest probabilities and the
  // one-sided bound constant sup xi * (-log P)
  double local_slope = 0.0;
  double bound_const = 0.0;
  if (diag.small_ball.size() >= 2) {
    const auto& [xi0, p0] = diag.small_ball[0];
    const auto& [xi1, p1] = diag.small_ball[1];
    local_slope = (std::log(-std::log(p1)) - std::log(-std::log(p0))) /
                  (std::log(xi1) - std::log(xi0));
  }
  for (const auto& [xi, p] : diag.small_ball) {
    bound_const = std::max(bound_const, xi * -std::log(p));
  }
  Outcome out;
  out.pass = diag.small_ball_slope > -1.3 && diag.small_ball_slope < -0.7;
  std::ostringstream d;
  d << "fitted slope " << diag.small_ball_slope
    << " (band [-1.3,-0.7]); tail-edge local slope " << local_slope
    << "; one-sided bound constant sup xi*(-log P) = " << bound_const;
  out.detail = d.str();
  return out;
}

Outcome criterion9_decentering() {
  PriorSpec spec;
  spec.regime = PriorRegime::rescaled_undersmoothing;
  spec.s = 2.0;
  spec.d = 1;
  spec.n = 100;
  spec.l_max = 8;
  const WaveletBasis basis = WaveletBasis::make(WaveletFamily::haar, 1, 1, 9);
  PriorDiagnosticsOptions options;
  options.draws = 100000;
  options.decentering_shifts = 20;
  RngStream rng(1009);
  const PriorDiagnostics diag = prior_diagnostics(spec, basis, rng, options);
  int holds = 0;
  for (const auto& row : diag.decentering) holds += row.holds ? 1 : 0;
  Outcome out;
  out.pass = holds == 20;
  std::ostringstream d;
  d << holds << "/20 shifts satisfy the lower bound minus 3 pooled SE (xi "
    << diag.xi_used << ")";
  out.detail = d.str();
  return out;
}

// rate studies --------------------------------------------------------------

StudyConfig smooth_truncated_study() {
  StudyConfig c;
  c.truth.kind = TruthKind::homogeneous_smooth;
  c.truth.s_true = 2.0;
  c.truth.levels = 6;
  c.truth.amplitude = 0.9;
  c.prior.regime = PriorRegime::truncated;
  c.prior.s = 2.0;
  c.prior.d = 1;
  c.prior.l_max = 12;
  c.n_grid = {500, 1000, 2000, 4000, 8000};
  c.replicates = 5;
  c.mcmc.iterations = 30000;
  c.mcmc.thinning = 10;
  return c;
}

std::map<std::uint64_t, StudyResult>& criterion10_cache() {
  static std::map<std::uint64_t, StudyResult> cache;
  return cache;
}

const StudyResult& criterion10_run(const WaveletBasis& basis,
                                   std::uint64_t seed) {
  auto& cache = criterion10_cache();
  auto it = cache.find(seed);
  if (it == cache.end()) {
    StudyConfig c = smooth_truncated_study();
    c.seed = seed;
    it = cache.emplace(seed, contraction_study(c, basis)).first;
  }
  return it->second;
}

// shared 2-of-3 seeded rerun rule
Outcome stochastic_rule(
    const std::function<bool(std::uint64_t, std::string&)>& attempt) {
  const std::vector<std::uint64_t> seeds = {101, 202, 303};
  int passes = 0, fails = 0;
  std::ostringstream d;
  for (std::uint64_t seed : seeds) {
    std::string note;
    const bool ok = attempt(seed, note);
    d << " [seed " << seed << ": " << (ok ? "ok" : "miss") << ", " << note
      << "]";
    (ok ? passes : fails) += 1;
    if (passes == 2 || fails == 2) break;
  }
  Outcome out;
  out.pass = passes >= 2;
  out.detail = d.str();
  return out;
}

Outcome criterion10_rate_truncated(const WaveletBasis& basis) {
  return stochastic_rule([&](std::uint64_t seed, std::string& note) {
    const StudyResult& r = criterion10_run(basis, seed);
    std::ostringstream n;
    n << "slope " << r.rate.slope;
    note = n.str();
    return !r.quality_failure && r.rate.slope > -0.55 && r.rate.slope < -0.25;
  });
}

Outcome criterion11_rate_spiky(const WaveletBasis& basis) {
  return stochastic_rule([&](std::uint64_t seed, std::string& note) {
    StudyConfig c = smooth_truncated_study();
    c.truth.kind = TruthKind::inhomogeneous_spiky;
    c.truth.amplitude = 4.0;
    c.truth.levels = 8;
    c.prior.regime = PriorRegime::rescaled_undersmoothing;
    c.prior.l_max = 9;
    c.seed = seed;
    const StudyResult r = contraction_study(c, basis);
    std::ostringstream n;
    n << "slope " << r.rate.slope;
    note = n.str();
    return !r.quality_failure && r.rate.slope > -0.55 && r.rate.slope < -0.20;
  });
}

Outcome criterion12_adaptivity(const WaveletBasis& basis) {
  return stochastic_rule([&](std::uint64_t seed, std::string& note) {
    StudyConfig c = smooth_truncated_study();
    c.prior.regime = PriorRegime::hierarchical;
    c.prior.l_max = 8;
    c.mcmc.iterations = 2500;  // sweeps
    c.mcmc.thinning = 2;
    c.seed = seed;
    const StudyResult hier = contraction_study(c, basis);
    const StudyResult& fixed = criterion10_run(basis, seed);
    double worst_ratio = 0.0;
    bool ok = !hier.quality_failure &&
              hier.per_n_median.size() == fixed.per_n_median.size();
    if (ok) {
      for (std::size_t i = 0; i < hier.per_n_median.size(); ++i) {
        const double ratio =
            hier.per_n_median[i].second / fixed.per_n_median[i].second;
        worst_ratio = std::max(worst_ratio, ratio);
      }
      ok = worst_ratio <= 3.0;
    }
    std::ostringstream n;
    n << "worst per-n ratio " << worst_ratio;
    note = n.str();
    return ok;
  });
}

Outcome criterion13_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "besovdens-acceptance13";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "study.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[prior]\nregime = truncated\ns = 2.0\nl_max = 6\n"
        << "[basis]\ngrid_level = 9\n"
        << "[study]\nn_grid = [100, 200, 400]\nreplicates = 2\nseed = 13\n"
        << "[truth]\nkind = smooth\nlevels = 4\n"
        << "[mcmc]\niterations = 1500\n";
  }
  RunConfig run;
  run.command = Command::rate_study;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "a").string();
  const int rc1 = run_command(run);
  run.output_dir = (dir / "b").string();
  const int rc2 = run_command(run);
  bool pass = rc1 == 0 && rc2 == 0;
  std::string mismatch;
  for (const char* name : {"records.txt", "medians.csv", "ratefit.csv",
                           "metadata.txt", "config.echo"}) {
    std::ifstream fa(dir / "a" / name, std::ios::binary);
    std::ifstream fb(dir / "b" / name, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str().empty() || sa.str() != sb.str()) {
      pass = false;
      mismatch += std::string(name) + " ";
    }
  }
  Outcome out;
  out.pass = pass;
  out.detail = pass ? "all study artifacts byte-identical across reruns"
                    : "mismatch in: " + mismatch;
  return out;
}

}  // namespace

int main() {
  const WaveletBasis study_basis =
      WaveletBasis::make(WaveletFamily::haar, 1, 1, 12);
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "wavelet roundtrip & Parseval", criterion1_roundtrip_parseval},
      {2, "Besov-norm brute-force oracle", criterion2_besov_oracle},
      {3, "density normalization & shift invariance",
       criterion3_density_normalization},
      {4, "link L1/KL bound inequalities", criterion4_lemma_bounds},
      {5, "metric inequalities", criterion5_metric_inequalities},
      {6, "MCMC vs deterministic quadrature", criterion6_mcmc_oracle},
      {7, "prior-marginal correctness", criterion7_prior_marginals},
      {8, "small-ball shape", criterion8_small_ball},
      {9, "decentering inequality", criterion9_decentering},
      {10, "rate study: homogeneous truth, truncated prior",
       [&] { return criterion10_rate_truncated(study_basis); }},
      {11, "rate study: spiky truth, rescaled prior",
       [&] { return criterion11_rate_spiky(study_basis); }},
      {12, "adaptivity sanity: hierarchical prior",
       [&] { return criterion12_adaptivity(study_basis); }},
      {13, "seeded rerun determinism", criterion13_determinism},
  };
  int failures = 0;
  for (const auto& entry : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome out = entry.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!out.pass) ++failures;
    std::printf("%s  criterion %2d: %s (%s) [%.1fs]\n",
                out.pass ? "PASS" : "FAIL", entry.id, entry.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/13 criteria passed\n", 13 - failures);
  return failures;
}
