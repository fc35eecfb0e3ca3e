// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "besov/experiments.hpp"
#include "besov/posterior.hpp"

namespace besov {

// Provenance header stamped at the top of every output file.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

void write_tree_file(const std::string& path, const CoefficientTree& tree,
                     const std::string& family, int dim,
                     std::optional<double> s_drawn, const Provenance& prov);

struct TreeFileContents {
  CoefficientTree tree;
  std::string family;
  int dim = 1;
  int max_level = 0;
  std::optional<double> s_drawn;
};

TreeFileContents read_tree_file(const std::string& path);

void write_grid_csv(const std::string& path, const GridFunction& f,
                    const Provenance& prov);

void write_density_csv(const std::string& path, const DensityOnGrid& p,
                       const Provenance& prov);

void write_chain_samples_csv(const std::string& path,
                             const ChainSummary& summary, bool with_s,
                             bool with_tv, const Provenance& prov);

void write_acceptance_csv(const std::string& path, const ChainSummary& summary,
                          const Provenance& prov);

void write_study_records(const std::string& path, const StudyResult& result,
                         const Provenance& prov);

void write_study_medians_csv(const std::string& path,
                             const StudyResult& result,
                             const Provenance& prov);

void write_rate_fit_csv(const std::string& path, const RateFit& fit,
                        const Provenance& prov);

// Wall-clock sidecar; the one study output excluded from the byte-identical
// reproducibility contract.
void write_study_timing_csv(const std::string& path,
                            const StudyResult& result, const Provenance& prov);

void write_study_metadata(const std::string& path,
                          const std::string& canonical_config,
                          const StudyResult& result, const Provenance& prov);

// One observation per line, dim whitespace-separated coordinates.
// Out-of-range points are dropped; their count is reported through
// rejected_count.
Dataset read_dataset_file(const std::string& path, int dim,
                          std::int64_t* rejected_count);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace besov
