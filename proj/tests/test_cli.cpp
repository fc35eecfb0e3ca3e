// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "besov/cli.hpp"
#include "besov/io.hpp"
#include "besov/rng.hpp"

using namespace besov;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("besovdens-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* kMinimalStudy = R"(
[prior]
regime = truncated
s = 2.0

[study]
n_grid = [200, 400, 800]
seed = 9

[mcmc]
iterations = 2000
)";

}  // namespace

TEST_CASE("minimal study config parses with defaults") {
  const AppConfig cfg = parse_app_config(kMinimalStudy, Command::rate_study);
  CHECK(cfg.prior.regime == PriorRegime::truncated);
  CHECK(cfg.prior.d == 1);
  CHECK(cfg.prior.l_max == 12);
  CHECK(cfg.basis.grid_level == 12);
  CHECK(cfg.study.replicates == 5);
  CHECK(cfg.study.error_kind == ErrorKind::median_tv);
  CHECK(cfg.mcmc.thinning == 10);
  CHECK(cfg.seed == 9);
}

TEST_CASE("constraint violations name the hypothesis") {
  const char* bad = R"(
[prior]
regime = truncated
s = 0.5
d = 1

[study]
n_grid = [200, 400, 800]

[mcmc]
iterations = 2000
)";
  CHECK_THROWS_WITH_AS(parse_app_config(bad, Command::rate_study),
                       doctest::Contains("s > d"), ConfigError);
}

TEST_CASE("unknown keys are rejected with their line number") {
  const char* bad = R"(
[prior]
regime = truncated
s = 2.0
mystery = 1
)";
  CHECK_THROWS_WITH_AS(parse_app_config(bad, Command::sample_prior),
                       doctest::Contains("line 5"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_app_config(bad, Command::sample_prior),
                       doctest::Contains("mystery"), ConfigError);
}

TEST_CASE("canonical emission round-trips") {
  const AppConfig cfg = parse_app_config(kMinimalStudy, Command::rate_study);
  const std::string emitted = emit_app_config(cfg);
  const AppConfig back = parse_app_config(emitted, Command::rate_study);
  CHECK(emit_app_config(back) == emitted);
}

TEST_CASE("sample-prior writes deterministic draw files") {
  const char* config_text = R"(
[prior]
regime = rescaled-undersmoothing
s = 2.0
n = 500
l_max = 5

[sample]
count = 3
seed = 77
)";
  const auto dir = temp_dir("sample");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << config_text;

  RunConfig run;
  run.command = Command::sample_prior;
  run.config_path = cfg_path.string();

  run.output_dir = (dir / "out1").string();
  CHECK(run_command(run) == 0);
  run.output_dir = (dir / "out2").string();
  CHECK(run_command(run) == 0);

  for (const char* name : {"draw_0000.tree", "draw_0001.tree",
                           "draw_0002.tree"}) {
    const std::string a = slurp((dir / "out1" / name).string());
    const std::string b = slurp((dir / "out2" / name).string());
    CHECK(a == b);
    CHECK(a.rfind("# besovdens tree v1", 0) == 0);
    CHECK(a.find("config_hash=") != std::string::npos);
    CHECK(a.find("seed=77") != std::string::npos);
  }
  const TreeFileContents tree =
      read_tree_file((dir / "out1" / "draw_0000.tree").string());
  CHECK(tree.dim == 1);
  CHECK(tree.max_level == 5);
  CHECK(tree.tree.size() > 0);
}

TEST_CASE("hierarchical draws carry the drawn smoothness in the header") {
  const char* config_text = R"(
[prior]
regime = hierarchical
s = 2.0
n = 200
l_max = 6

[sample]
count = 1
seed = 11
)";
  const auto dir = temp_dir("hier-sample");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << config_text;
  RunConfig run;
  run.command = Command::sample_prior;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "out").string();
  REQUIRE(run_command(run) == 0);
  const TreeFileContents tree =
      read_tree_file((dir / "out" / "draw_0000.tree").string());
  REQUIRE(tree.s_drawn.has_value());
  CHECK(*tree.s_drawn > 1.0);
  CHECK(*tree.s_drawn <= std::log(200.0));
  CHECK(tree.max_level >= 1);
}

TEST_CASE("type mismatches are reported with the offending key") {
  const char* bad = R"(
[prior]
regime = truncated
s = smooth
)";
  CHECK_THROWS_WITH_AS(parse_app_config(bad, Command::sample_prior),
                       doctest::Contains("'s'"), ConfigError);
}

TEST_CASE("seed override rewrites provenance") {
  const char* config_text = R"(
[prior]
regime = truncated
s = 2.0
l_max = 3

[sample]
count = 1
seed = 5
)";
  const auto dir = temp_dir("seedover");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << config_text;
  RunConfig run;
  run.command = Command::sample_prior;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "out").string();
  run.seed_override = 99;
  REQUIRE(run_command(run) == 0);
  const std::string echo = slurp((dir / "out" / "config.echo").string());
  CHECK(echo.find("seed = 99") != std::string::npos);
  const std::string draw = slurp((dir / "out" / "draw_0000.tree").string());
  CHECK(draw.find("seed=99") != std::string::npos);
}

TEST_CASE("prior-diagnostics writes the three tables") {
  const char* config_text = R"(
[prior]
regime = truncated
s = 1.5
n = 1048576
l_max = 5

[basis]
grid_level = 7

[diagnostics]
draws = 2000
shifts = 4
seed = 3
)";
  const auto dir = temp_dir("diag");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << config_text;
  RunConfig run;
  run.command = Command::prior_diagnostics;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "out").string();
  REQUIRE(run_command(run) == 0);
  for (const char* name :
       {"sup_tail.csv", "small_ball.csv", "decentering.csv",
        "diagnostics.txt"}) {
    const std::string text = slurp((dir / "out" / name).string());
    CHECK(text.find("config_hash=") != std::string::npos);
  }
}

TEST_CASE("grid functions serialize with coordinates") {
  GridFunction g = make_grid_function(1, 3);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    g.values[i] = static_cast<double>(i);
  }
  const auto dir = temp_dir("gridcsv");
  const auto path = (dir / "grid.csv").string();
  write_grid_csv(path, g, Provenance{"abc", 7});
  const std::string text = slurp(path);
  CHECK(text.rfind("# besovdens grid v1", 0) == 0);
  CHECK(text.find("x,value") != std::string::npos);
  CHECK(text.find("0.0625,0") != std::string::npos);  // first midpoint
}

TEST_CASE("malformed config exits with the config code") {
  const auto dir = temp_dir("badcfg");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << "[prior\nregime = truncated\n";
  RunConfig run;
  run.command = Command::sample_prior;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "out").string();
  CHECK(run_command(run) == 1);
}

TEST_CASE("fit drops out-of-range points and recovers a flat density") {
  const auto dir = temp_dir("fit");
  const auto data_path = dir / "data.txt";
  {
    std::ofstream out(data_path);
    RngStream rng(2029);
    for (int i = 0; i < 1000; ++i) out << rng.uniform01() << "\n";
    out << "1.5\n-0.2\n";  // rejected
  }
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << R"(
[prior]
regime = truncated
s = 2.0
l_max = 4

[basis]
grid_level = 10

[mcmc]
iterations = 20000

[fit]
seed = 5
)";
  RunConfig run;
  run.command = Command::fit;
  run.config_path = cfg_path.string();
  run.data_path = data_path.string();
  run.output_dir = (dir / "out").string();
  REQUIRE(run_command(run) == 0);

  // posterior mean density should be close to uniform
  const std::string density = slurp((dir / "out" / "posterior_mean.csv").string());
  std::istringstream in(density);
  std::string line;
  double max_dev = 0.0;
  double tv = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double v = std::stod(line.substr(comma + 1));
    max_dev = std::max(max_dev, std::abs(v - 1.0));
    tv += 0.5 * std::abs(v - 1.0);
    ++rows;
  }
  REQUIRE(rows == 1024);
  tv /= rows;
  CHECK(tv < 0.1);
}

TEST_CASE("rate-study byte-identical reruns") {
  const auto dir = temp_dir("study");
  const auto cfg_path = dir / "config.txt";
  std::ofstream(cfg_path) << R"(
[prior]
regime = truncated
s = 2.0
l_max = 6

[basis]
grid_level = 9

[study]
n_grid = [100, 200, 400]
replicates = 2
seed = 3

[truth]
kind = smooth
levels = 4

[mcmc]
iterations = 1500
)";
  RunConfig run;
  run.command = Command::rate_study;
  run.config_path = cfg_path.string();
  run.output_dir = (dir / "a").string();
  REQUIRE(run_command(run) == 0);
  run.output_dir = (dir / "b").string();
  REQUIRE(run_command(run) == 0);
  for (const char* name : {"records.txt", "medians.csv", "ratefit.csv",
                           "metadata.txt", "config.echo"}) {
    CHECK(slurp((dir / "a" / name).string()) ==
          slurp((dir / "b" / name).string()));
  }
}
