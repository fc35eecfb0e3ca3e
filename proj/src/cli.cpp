// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "besov/io.hpp"

namespace besov {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

WaveletFamily family_from_name(const std::string& name) {
  if (name == "haar") return WaveletFamily::haar;
  if (name.rfind("db", 0) == 0) return WaveletFamily::daubechies;
  if (name == "daubechies") return WaveletFamily::daubechies;
  throw ConfigError("unknown wavelet family '" + name +
                    "' (expected haar or db2..db5)");
}

LinkKind link_from_name(const std::string& name) {
  if (name == "exponential") return LinkKind::exponential;
  if (name == "regular-floor") return LinkKind::regular_floor;
  throw ConfigError("unknown link '" + name +
                    "' (expected exponential or regular-floor)");
}

std::string link_name(LinkKind kind) {
  return kind == LinkKind::exponential ? "exponential" : "regular-floor";
}

void parse_basis(const ConfigDoc& doc, BasisConfig& basis, int dim) {
  const std::string fam = doc.get_string_or("basis", "family", "haar");
  basis.family = family_from_name(fam);
  int default_vm = 1;
  if (basis.family == WaveletFamily::daubechies) {
    default_vm = fam.size() > 2 && fam.rfind("db", 0) == 0
                     ? std::stoi(fam.substr(2))
                     : 2;
  }
  basis.vanishing_moments = static_cast<int>(
      doc.get_int_or("basis", "vanishing_moments", default_vm));
  basis.dim = dim;
  basis.grid_level = static_cast<int>(
      doc.get_int_or("basis", "grid_level", dim == 1 ? 12 : 7));
}

void parse_prior(const ConfigDoc& doc, PriorSpec& prior) {
  try {
    prior.regime = regime_from_name(doc.get_string("prior", "regime"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  prior.s = doc.get_double("prior", "s");
  prior.d = static_cast<int>(doc.get_int_or("prior", "d", 1));
  prior.n = doc.get_int_or("prior", "n", 1000);
  prior.l_max = static_cast<int>(doc.get_int_or("prior", "l_max", 12));
  try {
    prior.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void parse_mcmc(const ConfigDoc& doc, MCMCConfig& mcmc) {
  mcmc.iterations = doc.get_int_or("mcmc", "iterations", 20000);
  mcmc.burn_in = doc.get_int_or("mcmc", "burn_in", -1);
  mcmc.thinning = static_cast<int>(doc.get_int_or("mcmc", "thinning", 10));
  mcmc.adapt = doc.get_bool_or("mcmc", "adapt", true);
  mcmc.target_acceptance =
      doc.get_double_or("mcmc", "target_acceptance", 0.234);
  mcmc.adaptation_rate = doc.get_double_or("mcmc", "adaptation_rate", 1.0);
  mcmc.s_proposal_scale = doc.get_double_or("mcmc", "s_proposal_scale", 0.0);
  mcmc.coefficient_steps_per_sweep =
      static_cast<int>(doc.get_int_or("mcmc", "k1", 0));
  mcmc.s_steps_per_sweep = static_cast<int>(doc.get_int_or("mcmc", "k2", 4));
  mcmc.likelihood_enabled =
      doc.get_bool_or("mcmc", "likelihood_enabled", true);
  try {
    mcmc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void parse_truth(const ConfigDoc& doc, TruthSpec& truth, int dim) {
  try {
    truth.kind =
        truth_kind_from_name(doc.get_string_or("truth", "kind", "smooth"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  truth.s_true = doc.get_double_or("truth", "s", 2.0);
  truth.d = dim;
  truth.link = link_from_name(
      doc.get_string_or("truth", "link", "exponential"));
  truth.floor = doc.get_double_or("truth", "floor", 0.1);
  truth.amplitude = doc.get_double_or("truth", "amplitude", 0.9);
  truth.background = doc.get_double_or("truth", "background", 0.25);
  truth.levels = static_cast<int>(doc.get_int_or("truth", "levels", 6));
  truth.spike_location =
      doc.get_double_or("truth", "spike_location", 1.0 / 3.0);
}

}  // namespace

std::string command_name(Command command) {
  switch (command) {
    case Command::sample_prior: return "sample-prior";
    case Command::fit: return "fit";
    case Command::rate_study: return "rate-study";
    case Command::prior_diagnostics: return "prior-diagnostics";
  }
  return "?";
}

WaveletBasis BasisConfig::make() const {
  return WaveletBasis::make(family, vanishing_moments, dim, grid_level);
}

AppConfig parse_app_config(const std::string& text, Command command) {
  const ConfigDoc doc = ConfigDoc::parse(text);
  AppConfig cfg;
  cfg.command = command;
  parse_prior(doc, cfg.prior);
  parse_basis(doc, cfg.basis, cfg.prior.d);

  switch (command) {
    case Command::sample_prior:
      cfg.sample_count = doc.get_int_or("sample", "count", 1);
      cfg.seed = static_cast<std::uint64_t>(doc.get_int_or("sample", "seed", 1));
      if (cfg.sample_count < 1) throw ConfigError("sample: count must be >= 1");
      break;
    case Command::prior_diagnostics:
      cfg.diag.draws = doc.get_int_or("diagnostics", "draws", 100000);
      cfg.diag.decentering_shifts =
          static_cast<int>(doc.get_int_or("diagnostics", "shifts", 20));
      cfg.diag.decentering_quantile =
          doc.get_double_or("diagnostics", "quantile", 0.35);
      cfg.diag.z_norm_min = doc.get_double_or("diagnostics", "z_norm_min", 0.25);
      cfg.diag.z_norm_max = doc.get_double_or("diagnostics", "z_norm_max", 2.5);
      if (doc.has("diagnostics", "unit_t")) {
        cfg.diag.unit_regular_t = doc.get_double("diagnostics", "unit_t");
      }
      cfg.seed =
          static_cast<std::uint64_t>(doc.get_int_or("diagnostics", "seed", 1));
      if (cfg.diag.draws < 1000) {
        throw ConfigError("diagnostics: draws must be >= 1000");
      }
      break;
    case Command::fit:
      parse_mcmc(doc, cfg.mcmc);
      cfg.seed = static_cast<std::uint64_t>(doc.get_int_or("fit", "seed", 1));
      break;
    case Command::rate_study: {
      parse_mcmc(doc, cfg.mcmc);
      parse_truth(doc, cfg.study.truth, cfg.prior.d);
      cfg.seed = static_cast<std::uint64_t>(doc.get_int_or("study", "seed", 1));
      cfg.study.seed = cfg.seed;
      cfg.study.n_grid = doc.get_int_list("study", "n_grid");
      cfg.study.replicates =
          static_cast<int>(doc.get_int_or("study", "replicates", 5));
      const std::string err =
          doc.get_string_or("study", "error", "median_tv");
      if (err == "median_tv") {
        cfg.study.error_kind = ErrorKind::median_tv;
      } else if (err == "mean_density_tv") {
        cfg.study.error_kind = ErrorKind::mean_density_tv;
      } else {
        throw ConfigError("study: error must be median_tv or mean_density_tv");
      }
      cfg.study.exclusion_cap =
          doc.get_double_or("study", "exclusion_cap", 0.2);
      cfg.study.threads =
          static_cast<int>(doc.get_int_or("study", "threads", 1));
      cfg.study.synthetic_bypass =
          doc.get_bool_or("study", "synthetic_bypass", false);
      cfg.study.synthetic_amplitude =
          doc.get_double_or("study", "synthetic_amplitude", 1.0);
      cfg.study.synthetic_exponent =
          doc.get_double_or("study", "synthetic_exponent", -0.4);
      cfg.study.prior = cfg.prior;
      cfg.study.mcmc = cfg.mcmc;
      try {
        cfg.study.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      break;
    }
  }
  doc.require_all_consumed();
  return cfg;
}

std::string emit_app_config(const AppConfig& cfg) {
  std::ostringstream out;
  out << "[prior]\n";
  out << "regime = " << regime_name(cfg.prior.regime) << "\n";
  out << "s = " << format_double(cfg.prior.s) << "\n";
  out << "d = " << cfg.prior.d << "\n";
  out << "n = " << cfg.prior.n << "\n";
  out << "l_max = " << cfg.prior.l_max << "\n";
  out << "\n[basis]\n";
  out << "family = "
      << (cfg.basis.family == WaveletFamily::haar
              ? std::string("haar")
              : "db" + std::to_string(cfg.basis.vanishing_moments))
      << "\n";
  out << "vanishing_moments = " << cfg.basis.vanishing_moments << "\n";
  out << "grid_level = " << cfg.basis.grid_level << "\n";

  auto emit_mcmc = [&out](const MCMCConfig& m) {
    out << "\n[mcmc]\n";
    out << "iterations = " << m.iterations << "\n";
    out << "burn_in = " << m.burn_in << "\n";
    out << "thinning = " << m.thinning << "\n";
    out << "adapt = " << (m.adapt ? "true" : "false") << "\n";
    out << "target_acceptance = " << format_double(m.target_acceptance)
        << "\n";
    out << "adaptation_rate = " << format_double(m.adaptation_rate) << "\n";
    out << "s_proposal_scale = " << format_double(m.s_proposal_scale) << "\n";
    out << "k1 = " << m.coefficient_steps_per_sweep << "\n";
    out << "k2 = " << m.s_steps_per_sweep << "\n";
    out << "likelihood_enabled = "
        << (m.likelihood_enabled ? "true" : "false") << "\n";
  };

  switch (cfg.command) {
    case Command::sample_prior:
      out << "\n[sample]\n";
      out << "count = " << cfg.sample_count << "\n";
      out << "seed = " << cfg.seed << "\n";
      break;
    case Command::prior_diagnostics:
      out << "\n[diagnostics]\n";
      out << "draws = " << cfg.diag.draws << "\n";
      out << "shifts = " << cfg.diag.decentering_shifts << "\n";
      out << "quantile = " << format_double(cfg.diag.decentering_quantile)
          << "\n";
      out << "z_norm_min = " << format_double(cfg.diag.z_norm_min) << "\n";
      out << "z_norm_max = " << format_double(cfg.diag.z_norm_max) << "\n";
      if (cfg.diag.unit_regular_t) {
        out << "unit_t = " << format_double(*cfg.diag.unit_regular_t) << "\n";
      }
      out << "seed = " << cfg.seed << "\n";
      break;
    case Command::fit:
      emit_mcmc(cfg.mcmc);
      out << "\n[fit]\n";
      out << "seed = " << cfg.seed << "\n";
      break;
    case Command::rate_study: {
      emit_mcmc(cfg.mcmc);
      const TruthSpec& t = cfg.study.truth;
      out << "\n[truth]\n";
      out << "kind = " << truth_kind_name(t.kind) << "\n";
      out << "s = " << format_double(t.s_true) << "\n";
      out << "link = " << link_name(t.link) << "\n";
      out << "floor = " << format_double(t.floor) << "\n";
      out << "amplitude = " << format_double(t.amplitude) << "\n";
      out << "background = " << format_double(t.background) << "\n";
      out << "levels = " << t.levels << "\n";
      out << "spike_location = " << format_double(t.spike_location) << "\n";
      out << "\n[study]\n";
      out << "seed = " << cfg.seed << "\n";
      out << "n_grid = [";
      for (std::size_t i = 0; i < cfg.study.n_grid.size(); ++i) {
        if (i) out << ", ";
        out << cfg.study.n_grid[i];
      }
      out << "]\n";
      out << "replicates = " << cfg.study.replicates << "\n";
      out << "error = "
          << (cfg.study.error_kind == ErrorKind::median_tv
                  ? "median_tv"
                  : "mean_density_tv")
          << "\n";
      out << "exclusion_cap = " << format_double(cfg.study.exclusion_cap)
          << "\n";
      out << "threads = " << cfg.study.threads << "\n";
      out << "synthetic_bypass = "
          << (cfg.study.synthetic_bypass ? "true" : "false") << "\n";
      out << "synthetic_amplitude = "
          << format_double(cfg.study.synthetic_amplitude) << "\n";
      out << "synthetic_exponent = "
          << format_double(cfg.study.synthetic_exponent) << "\n";
      break;
    }
  }
  return out.str();
}

namespace {

int run_sample_prior(const AppConfig& cfg, const RunConfig& run,
                     const Provenance& prov) {
  const WaveletBasis basis = cfg.basis.make();
  RngStream root(cfg.seed);
  for (std::int64_t i = 0; i < cfg.sample_count; ++i) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(i));
    const PriorDraw draw = sample_prior(cfg.prior, rng);
    char name[32];
    std::snprintf(name, sizeof name, "draw_%04lld.tree",
                  static_cast<long long>(i));
    write_tree_file(run.output_dir + "/" + name, draw.coeffs,
                    basis.family_name(), cfg.prior.d, draw.s_drawn, prov);
  }
  if (run.verbosity > 0) {
    std::cerr << "wrote " << cfg.sample_count << " prior draws (tail bound "
              << tail_sup_bound(cfg.prior) << ")\n";
  }
  return 0;
}

int run_prior_diagnostics(const AppConfig& cfg, const RunConfig& run,
                          const Provenance& prov) {
  const WaveletBasis basis = cfg.basis.make();
  RngStream rng(cfg.seed);
  const PriorDiagnostics diag =
      prior_diagnostics(cfg.prior, basis, rng, cfg.diag);
  {
    std::ofstream out(run.output_dir + "/sup_tail.csv", std::ios::binary);
    out << "# besovdens sup-tail v1\n# config_hash=" << prov.config_hash
        << " seed=" << prov.seed << "\nR,p_exceed\n";
    for (const auto& [r, p] : diag.sup_tail) {
      out << format_double(r) << ',' << format_double(p) << '\n';
    }
  }
  {
    std::ofstream out(run.output_dir + "/small_ball.csv", std::ios::binary);
    out << "# besovdens small-ball v1\n# config_hash=" << prov.config_hash
        << " seed=" << prov.seed << "\nxi,p_within\n";
    for (const auto& [xi, p] : diag.small_ball) {
      out << format_double(xi) << ',' << format_double(p) << '\n';
    }
  }
  {
    std::ofstream out(run.output_dir + "/decentering.csv", std::ios::binary);
    out << "# besovdens decentering v1\n# config_hash=" << prov.config_hash
        << " seed=" << prov.seed
        << "\nz_norm,shifted_p,centred_p,lower_bound,pooled_se,holds\n";
    for (const auto& row : diag.decentering) {
      out << format_double(row.z_norm) << ',' << format_double(row.shifted_p)
          << ',' << format_double(row.centred_p) << ','
          << format_double(row.lower_bound) << ','
          << format_double(row.pooled_se) << ',' << (row.holds ? 1 : 0)
          << '\n';
    }
  }
  {
    std::ofstream out(run.output_dir + "/diagnostics.txt", std::ios::binary);
    out << "# besovdens diagnostics v1\n# config_hash=" << prov.config_hash
        << " seed=" << prov.seed << "\n";
    out << "small_ball_slope = " << format_double(diag.small_ball_slope)
        << "\n";
    out << "tail_fit_slope = " << format_double(diag.tail_fit_slope) << "\n";
    out << "xi_used = " << format_double(diag.xi_used) << "\n";
  }
  return 0;
}

int run_fit(const AppConfig& cfg, const RunConfig& run,
            const Provenance& prov) {
  if (run.data_path.empty()) {
    throw ConfigError("fit: --data FILE is required");
  }
  std::int64_t rejected = 0;
  Dataset data = read_dataset_file(run.data_path, cfg.prior.d, &rejected);
  if (data.points.empty()) {
    throw ConfigError("fit: no usable observations in " + run.data_path);
  }
  if (rejected > 0) {
    std::cerr << "fit: dropped " << rejected
              << " out-of-range observations, kept " << data.size() << "\n";
  }
  PriorSpec prior = cfg.prior;
  prior.n = data.size();
  const WaveletBasis basis = cfg.basis.make();
  const LinkFunction link = LinkFunction::exponential();
  MCMCConfig mcmc = cfg.mcmc;
  mcmc.seed = cfg.seed;
  const ChainSummary summary = run_chain(mcmc, prior, data, link, basis);
  if (summary.diverged) {
    throw std::runtime_error("fit: chain diverged (non-finite log posterior)");
  }
  const bool with_s = prior.regime == PriorRegime::hierarchical;
  write_chain_samples_csv(run.output_dir + "/samples.csv", summary, with_s,
                          false, prov);
  write_acceptance_csv(run.output_dir + "/acceptance.csv", summary, prov);
  write_density_csv(run.output_dir + "/posterior_mean.csv",
                    summary.posterior_mean_density, prov);
  return 0;
}

int run_rate_study(const AppConfig& cfg, const RunConfig& run,
                   const Provenance& prov, const std::string& canonical) {
  const WaveletBasis basis = cfg.basis.make();
  const StudyResult result = contraction_study(cfg.study, basis);
  write_study_records(run.output_dir + "/records.txt", result, prov);
  write_study_medians_csv(run.output_dir + "/medians.csv", result, prov);
  if (result.per_n_median.size() >= 3) {
    write_rate_fit_csv(run.output_dir + "/ratefit.csv", result.rate, prov);
  }
  write_study_timing_csv(run.output_dir + "/timing.csv", result, prov);
  write_study_metadata(run.output_dir + "/metadata.txt", canonical, result,
                       prov);
  if (run.verbosity > 0) {
    std::cerr << "rate study: slope "
              << (result.per_n_median.size() >= 3
                      ? format_double(result.rate.slope)
                      : std::string("n/a"))
              << ", excluded " << result.excluded_count << "\n";
  }
  return result.quality_failure ? 3 : 0;
}

}  // namespace

int run_command(const RunConfig& run) {
  try {
    if (run.output_dir.empty()) throw ConfigError("--out DIR is required");
    AppConfig cfg = parse_app_config(read_file(run.config_path), run.command);
    if (run.seed_override) {
      cfg.seed = *run.seed_override;
      if (run.command == Command::rate_study) cfg.study.seed = cfg.seed;
    }
    const std::string canonical = emit_app_config(cfg);
    const Provenance prov{text_hash(canonical), cfg.seed};
    try {
      std::filesystem::create_directories(run.output_dir);
    } catch (const std::filesystem::filesystem_error& e) {
      throw ConfigError("output directory not writable: " +
                        std::string(e.what()));
    }
    {
      std::ofstream echo(run.output_dir + "/config.echo", std::ios::binary);
      echo << "# besovdens config-echo v1\n# config_hash=" << prov.config_hash
           << " seed=" << prov.seed << "\n"
           << canonical;
    }
    switch (run.command) {
      case Command::sample_prior: return run_sample_prior(cfg, run, prov);
      case Command::prior_diagnostics:
        return run_prior_diagnostics(cfg, run, prov);
      case Command::fit: return run_fit(cfg, run, prov);
      case Command::rate_study:
        return run_rate_study(cfg, run, prov, canonical);
    }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace besov
