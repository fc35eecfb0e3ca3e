// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "besov/config.hpp"
#include "besov/experiments.hpp"

namespace besov {

enum class Command { sample_prior, fit, rate_study, prior_diagnostics };

std::string command_name(Command command);

struct BasisConfig {
  WaveletFamily family = WaveletFamily::haar;
  int vanishing_moments = 1;
  int dim = 1;
  int grid_level = 12;

  WaveletBasis make() const;
};

// Fully resolved configuration for one command, parsed from the structured
// text format.  Unknown keys are hard errors; defaults are filled in and
// echoed back by emit_app_config.
struct AppConfig {
  Command command = Command::rate_study;
  BasisConfig basis;
  PriorSpec prior;
  StudyConfig study;    // rate-study
  MCMCConfig mcmc;      // fit / rate-study
  std::int64_t sample_count = 1;   // sample-prior
  PriorDiagnosticsOptions diag;    // prior-diagnostics
  std::uint64_t seed = 1;
};

AppConfig parse_app_config(const std::string& text, Command command);

// Canonical emission: every key for the command, in a fixed order, with
// defaults made explicit.  parse(emit(c)) reproduces c.
std::string emit_app_config(const AppConfig& config);

struct RunConfig {
  Command command = Command::rate_study;
  std::string config_path;
  std::string data_path;  // fit only
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;
  int verbosity = 0;
};

// Executes the command and writes artifacts under output_dir.
// Exit codes: 0 success, 1 configuration error, 2 numeric failure,
// 3 study quality failure (exclusion cap exceeded).
int run_command(const RunConfig& run);

}  // namespace besov
