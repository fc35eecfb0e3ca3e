// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "besov/prior.hpp"
#include "besov/stats.hpp"
#include "besov/wavelet.hpp"

using namespace besov;

namespace {

PriorSpec make_spec(PriorRegime regime, double s, int d, std::int64_t n,
                    int l_max) {
  PriorSpec spec;
  spec.regime = regime;
  spec.s = s;
  spec.d = d;
  spec.n = n;
  spec.l_max = l_max;
  return spec;
}

// unit-scale regime with sigma_l = 2^{-l(t + d/2)} for every stored level:
// truncated scalings with n large enough that L_n clears l_max
PriorSpec unit_regular(double t, int d, int l_max) {
  const auto n = std::int64_t{1} << 62;
  return make_spec(PriorRegime::truncated, t, d, n, l_max);
}

}  // namespace

TEST_CASE("scaling factors per regime") {
  // frozen: 2^{-1.5} * 1000^{-0.2}
  const PriorSpec rescaled =
      make_spec(PriorRegime::rescaled_undersmoothing, 2.0, 1, 1000, 12);
  CHECK(scaling_factor(rescaled, 1) ==
        doctest::Approx(0.08880859646454512).epsilon(1e-12));

  const PriorSpec trunc = make_spec(PriorRegime::truncated, 2.0, 1, 1024, 12);
  const int ln = truncation_level(2.0, 1, 1024);
  CHECK(scaling_factor(trunc, ln) > 0.0);
  CHECK(scaling_factor(trunc, ln + 1) == 0.0);

  const PriorSpec partial =
      make_spec(PriorRegime::partially_rescaled, 2.0, 1, 1024, 12);
  const double expected_ratio =
      std::exp2(-(2.0 - 0.5)) * std::pow(1024.0, -0.2) / std::log(1024.0);
  CHECK(scaling_factor(partial, ln + 1) / scaling_factor(partial, ln) ==
        doctest::Approx(expected_ratio).epsilon(1e-12));
}

TEST_CASE("truncation levels") {
  CHECK(truncation_level(2.0, 1, 1024) == 2);
  CHECK(truncation_level(2.0, 1, 2) == 1);
  CHECK(truncation_level(2.0, 1, 100000) == 4);
}

TEST_CASE("scaling decay obeys the regularity envelope") {
  struct Case {
    PriorSpec spec;
    double t;
  };
  const std::vector<Case> cases = {
      {make_spec(PriorRegime::rescaled_undersmoothing, 2.5, 1, 500, 12), 1.5},
      {make_spec(PriorRegime::partially_rescaled, 2.5, 1, 500, 12), 1.5},
      {make_spec(PriorRegime::truncated, 2.5, 1, 1 << 30, 12), 2.5},
  };
  for (const auto& c : cases) {
    double max_ratio = 0.0;
    for (int l = 1; l <= 30; ++l) {
      const double sigma = scaling_factor(c.spec, l);
      const double envelope = std::exp2(-l * (c.t + 0.5));
      max_ratio = std::max(max_ratio, sigma / envelope);
    }
    CHECK(max_ratio < 1.0 + 1e-12);  // constant C = 1 for these regimes
  }
}

TEST_CASE("prior draws are deterministic and have Laplace moments") {
  const PriorSpec spec =
      make_spec(PriorRegime::rescaled_undersmoothing, 2.0, 1, 1000, 3);
  RngStream a(77), b(77);
  const PriorDraw da = sample_prior(spec, a);
  const PriorDraw db = sample_prior(spec, b);
  CHECK(da.coeffs == db.coeffs);

  const double sigma1 = scaling_factor(spec, 1);
  const int draws = 100000;
  RngStream rng(2);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const PriorDraw d = sample_prior(spec, rng);
    const double c11 = d.coeffs.get(1, 1);
    sum += c11;
    sq += c11 * c11;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  const double se_mean = std::sqrt(2.0 * sigma1 * sigma1 / draws);
  CHECK(std::abs(mean) < 4.0 * se_mean);
  CHECK(var == doctest::Approx(2.0 * sigma1 * sigma1).epsilon(0.05));

  const PriorSpec trunc = make_spec(PriorRegime::truncated, 2.0, 1, 1024, 12);
  RngStream r2(3);
  const PriorDraw dt = sample_prior(trunc, r2);
  CHECK(dt.coeffs.max_level() == truncation_level(2.0, 1, 1024));
}

TEST_CASE("log prior density matches a per-coefficient oracle") {
  const PriorSpec spec = make_spec(PriorRegime::truncated, 1.5, 1,
                                   std::int64_t{1} << 40, 4);
  // zero tree: only the constant terms remain
  CoefficientTree zero;
  double constants = 0.0;
  for (int l = 1; l <= effective_truncation(spec); ++l) {
    constants -= static_cast<double>(std::int64_t{1} << l) *
                 std::log(2.0 * scaling_factor(spec, l));
  }
  CHECK(log_prior_density(zero, spec) == doctest::Approx(constants));

  CoefficientTree single;
  single.set(2, 3, 0.25);
  const double sigma2 = scaling_factor(spec, 2);
  CHECK(log_prior_density(single, spec) ==
        doctest::Approx(constants - 0.25 / sigma2));

  RngStream rng(12);
  const PriorDraw draw = sample_prior(spec, rng);
  double oracle = constants;
  for (const auto& [key, value] : draw.coeffs.entries()) {
    oracle -= std::abs(value) / scaling_factor(spec, key.first);
  }
  CHECK(log_prior_density(draw.coeffs, spec) ==
        doctest::Approx(oracle).epsilon(1e-12));

  CoefficientTree outside;
  outside.set(effective_truncation(spec) + 1, 1, 0.5);
  CHECK(log_prior_density(outside, spec) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("hyperprior normalizer against a Riemann oracle") {
  // n = e^2, d = 1: support (1, 2]
  const double n = std::exp(2.0);
  const double zeta = hyperprior_normalizer(n, 1);
  CHECK(zeta <= std::exp(-1.0));
  double riemann = 0.0;
  const int points = 1000000;
  const double h = 1.0 / points;
  for (int i = 0; i < points; ++i) {
    const double s = 1.0 + (static_cast<double>(i) + 0.5) * h;
    riemann += std::exp(-std::pow(n, 1.0 / (2.0 * s + 1.0)));
  }
  riemann *= h;
  CHECK(zeta == doctest::Approx(riemann).epsilon(1e-6));
  CHECK_THROWS_AS(hyperprior_normalizer(2.0, 1), std::invalid_argument);
}

TEST_CASE("hyperprior normalizer regression over the n range") {
  // frozen quadrature values, d = 1
  const std::vector<std::pair<double, double>> table = {
      {1e3, 0.6208190099}, {1e4, 0.7941247415}, {1e5, 0.9676892152},
      {1e6, 1.1413869084}, {1e7, 1.3151616986}};
  for (const auto& [n, zeta] : table) {
    const double z = hyperprior_normalizer(n, 1);
    CHECK(z == doctest::Approx(zeta).epsilon(1e-6));
    const double ratio = z / std::log(n);
    CHECK(ratio > 0.075);
    CHECK(ratio < 0.095);
  }
}

TEST_CASE("hyperprior sampling matches its tabulated CDF") {
  const HyperPrior hyper(1e5, 1);
  // the normalized density integrates to 1 (independent Riemann sum)
  {
    const int points = 200000;
    const double h = (hyper.support_hi() - hyper.support_lo()) / points;
    double integral = 0.0;
    for (int i = 0; i < points; ++i) {
      integral += hyper.density(hyper.support_lo() +
                                (static_cast<double>(i) + 0.5) * h);
    }
    integral *= h;
    CHECK(std::abs(integral - 1.0) < 1e-6);
  }
  // density strictly increasing on the support
  double prev = hyper.density(1.01);
  for (double s = 1.2; s < hyper.support_hi(); s += 0.2) {
    const double cur = hyper.density(s);
    CHECK(cur > prev);
    prev = cur;
  }
  RngStream rng(8);
  std::vector<double> draws(100000);
  for (double& d : draws) {
    d = hyper.sample(rng);
    CHECK(d > hyper.support_lo());
    CHECK(d <= hyper.support_hi());
  }
  const double ks =
      ks_statistic(draws, [&](double s) { return hyper.cdf(s); });
  CHECK(ks < 0.01);
  CHECK(median(draws) >
        0.5 * (hyper.support_lo() + hyper.support_hi()));
}

TEST_CASE("draw regularity: the l1 norm is critical exactly at t") {
  const double t = 1.5;
  const int draws = 200;
  std::vector<double> med_below, med_at;
  for (int l_max : {8, 10, 12}) {
    const PriorSpec spec = unit_regular(t, 1, l_max);
    RngStream rng(31);
    std::vector<double> below, at;
    for (int i = 0; i < draws; ++i) {
      const PriorDraw d = sample_prior(spec, rng);
      below.push_back(besov_norm(d.coeffs, t - 0.25, 1, 1, 1));
      at.push_back(besov_norm(d.coeffs, t, 1, 1, 1));
    }
    med_below.push_back(median(below));
    med_at.push_back(median(at));
  }
  // below the critical index the medians stabilize
  CHECK(med_below[2] / med_below[0] < 1.25);
  // at the critical index they keep growing with the truncation
  CHECK(med_at[1] > med_at[0] * 1.1);
  CHECK(med_at[2] > med_at[1] * 1.1);
}

TEST_CASE("spec validation names the violated hypothesis") {
  PriorSpec bad = make_spec(PriorRegime::truncated, 0.5, 1, 1000, 8);
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("s > d"), std::invalid_argument);
}

TEST_CASE("decentering norm is the scaled l1 sum") {
  const PriorSpec spec = unit_regular(1.0, 1, 6);
  CoefficientTree tree;
  tree.set(1, 1, 0.5);
  tree.set(3, 2, -0.25);
  const double want = 0.5 / scaling_factor(spec, 1) +
                      0.25 / scaling_factor(spec, 3);
  CHECK(decentering_norm(tree, spec) == doctest::Approx(want).epsilon(1e-12));
}
