// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include <CLI11.hpp>

#include "besov/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric density estimation with Besov-Laplace "
               "priors"};
  app.require_subcommand(1);

  besov::RunConfig run;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "configuration file")
        ->required();
    sub->add_option("--out", run.output_dir, "output directory")->required();
    sub->add_flag_function(
        "-v,--verbose", [&](std::int64_t n) { run.verbosity = static_cast<int>(n); },
        "verbose progress");
  };

  CLI::App* sample = app.add_subcommand("sample-prior", "draw from a prior");
  add_common(sample);
  sample->add_option("--seed", seed, "seed override");

  CLI::App* fit = app.add_subcommand("fit", "posterior on supplied data");
  add_common(fit);
  fit->add_option("--data", run.data_path, "observations, one per line")
      ->required();

  CLI::App* study = app.add_subcommand("rate-study", "contraction rate study");
  add_common(study);
  study->add_option("--seed", seed, "seed override");

  CLI::App* diag =
      app.add_subcommand("prior-diagnostics", "prior Monte-Carlo diagnostics");
  add_common(diag);
  diag->add_option("--seed", seed, "seed override");

  CLI11_PARSE(app, argc, argv);

  if (sample->parsed()) run.command = besov::Command::sample_prior;
  if (fit->parsed()) run.command = besov::Command::fit;
  if (study->parsed()) run.command = besov::Command::rate_study;
  if (diag->parsed()) run.command = besov::Command::prior_diagnostics;
  for (const CLI::App* sub : {sample, study, diag}) {
    if (sub->parsed() && sub->count("--seed") > 0) run.seed_override = seed;
  }

  return besov::run_command(run);
}
