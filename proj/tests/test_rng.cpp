// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include <doctest.h>

#include <cmath>
#include <vector>

#include "besov/rng.hpp"
#include "besov/stats.hpp"

using besov::RngStream;

TEST_CASE("streams with the same seed agree bit for bit") {
  RngStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive depends on the key path, not on consumption") {
  RngStream a(7);
  RngStream child_before = a.derive(3);
  for (int i = 0; i < 100; ++i) a.uniform01();
  RngStream child_after = a.derive(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(child_before.next_u64() == child_after.next_u64());
  }
  CHECK(RngStream(7).derive(3).next_u64() != RngStream(7).derive(4).next_u64());
}

TEST_CASE("laplace variates have the right moments") {
  RngStream rng(123);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, absum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.laplace();
    sum += z;
    sq += z * z;
    absum += std::abs(z);
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(2.0 / n));  // sd of the mean
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));
  CHECK(absum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform, normal and exponential are sane") {
  RngStream rng(9);
  double su = 0.0, sn = 0.0, sn2 = 0.0, se = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential();
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.03));
  CHECK(se / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("uniform_below covers the range") {
  RngStream rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    ++counts[static_cast<std::size_t>(rng.uniform_below(7))];
  }
  for (int c : counts) CHECK(c > 9000);
}
