// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace besov {

namespace {

void write_header(std::ostream& out, const char* what,
                  const Provenance& prov) {
  out << "# besovdens " << what << " v1\n";
  out << "# config_hash=" << prov.config_hash << " seed=" << prov.seed
      << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tree_file(const std::string& path, const CoefficientTree& tree,
                     const std::string& family, int dim,
                     std::optional<double> s_drawn, const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "tree", prov);
  out << "# family=" << family << " d=" << dim << " L=" << tree.max_level()
      << "\n";
  if (s_drawn) out << "# s_drawn=" << format_double(*s_drawn) << "\n";
  for (const auto& [key, value] : tree.entries()) {
    out << key.first << ' ' << key.second << ' ' << format_double(value)
        << '\n';
  }
}

TreeFileContents read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  TreeFileContents out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string token;
      while (hs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = token.substr(0, eq);
        const std::string v = token.substr(eq + 1);
        if (k == "family") out.family = v;
        if (k == "d") out.dim = std::stoi(v);
        if (k == "L") out.max_level = std::stoi(v);
        if (k == "s_drawn") out.s_drawn = std::stod(v);
      }
      continue;
    }
    std::istringstream ls(line);
    int l = 0;
    std::int64_t r = 0;
    double value = 0.0;
    if (!(ls >> l >> r >> value)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed tree record");
    }
    out.tree.set(l, r, value);
  }
  if (out.max_level > 0) {
    out.tree.set_max_level(std::max(out.tree.max_level(), out.max_level));
  }
  return out;
}

namespace {

void write_grid_values(std::ostream& out, int dim, int grid_level,
                       const std::vector<double>& values) {
  const std::int64_t side = std::int64_t{1} << grid_level;
  const double inv = 1.0 / static_cast<double>(side);
  if (dim == 1) {
    out << "x,value\n";
    for (std::int64_t i = 0; i < side; ++i) {
      out << format_double((static_cast<double>(i) + 0.5) * inv) << ','
          << format_double(values[static_cast<std::size_t>(i)]) << '\n';
    }
  } else {
    out << "x1,x2,value\n";
    for (std::int64_t i1 = 0; i1 < side; ++i1) {
      for (std::int64_t i2 = 0; i2 < side; ++i2) {
        out << format_double((static_cast<double>(i1) + 0.5) * inv) << ','
            << format_double((static_cast<double>(i2) + 0.5) * inv) << ','
            << format_double(
                   values[static_cast<std::size_t>(i1 * side + i2)])
            << '\n';
      }
    }
  }
}

}  // namespace

void write_grid_csv(const std::string& path, const GridFunction& f,
                    const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "grid", prov);
  out << "# d=" << f.dim << " J=" << f.grid_level << "\n";
  write_grid_values(out, f.dim, f.grid_level, f.values);
}

void write_density_csv(const std::string& path, const DensityOnGrid& p,
                       const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "density", prov);
  out << "# d=" << p.dim << " J=" << p.grid_level
      << " normalizer=" << format_double(p.normalizer) << "\n";
  write_grid_values(out, p.dim, p.grid_level, p.values);
}

void write_chain_samples_csv(const std::string& path,
                             const ChainSummary& summary, bool with_s,
                             bool with_tv, const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "chain", prov);
  out << "iter";
  if (with_s) out << ",s";
  out << ",logpost";
  if (with_tv) out << ",tv_to_ref";
  out << '\n';
  for (const auto& s : summary.samples) {
    out << s.iteration;
    if (with_s) out << ',' << format_double(s.s);
    out << ',' << format_double(s.logpost);
    if (with_tv) out << ',' << format_double(s.tv_to_ref);
    out << '\n';
  }
}

void write_acceptance_csv(const std::string& path, const ChainSummary& summary,
                          const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "acceptance", prov);
  out << "level,acceptance,final_scale\n";
  for (std::size_t l = 0; l < summary.acceptance_per_level.size(); ++l) {
    out << (l + 1) << ',' << format_double(summary.acceptance_per_level[l])
        << ',' << format_double(summary.final_proposal_scales[l]) << '\n';
  }
  if (std::isfinite(summary.s_acceptance)) {
    out << "s," << format_double(summary.s_acceptance) << ",\n";
  }
}

void write_study_records(const std::string& path, const StudyResult& result,
                         const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "study-records", prov);
  out << "n,replicate,error,mean_acceptance,excluded\n";
  for (const auto& rec : result.records) {
    out << rec.n << ',' << rec.replicate << ',' << format_double(rec.error)
        << ',' << format_double(rec.mean_acceptance) << ','
        << (rec.excluded ? 1 : 0) << '\n';
  }
}

void write_study_medians_csv(const std::string& path,
                             const StudyResult& result,
                             const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "study-medians", prov);
  out << "n,median_error\n";
  for (const auto& [n, err] : result.per_n_median) {
    out << n << ',' << format_double(err) << '\n';
  }
}

void write_rate_fit_csv(const std::string& path, const RateFit& fit,
                        const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "rate-fit", prov);
  out << "slope,intercept,residual,n_points\n";
  out << format_double(fit.slope) << ',' << format_double(fit.intercept)
      << ',' << format_double(fit.residual) << ',' << fit.n_points << '\n';
}

void write_study_timing_csv(const std::string& path,
                            const StudyResult& result,
                            const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "study-timing", prov);
  out << "n,replicate,wall_ms\n";
  for (const auto& rec : result.records) {
    out << rec.n << ',' << rec.replicate << ',' << format_double(rec.wall_ms)
        << '\n';
  }
}

void write_study_metadata(const std::string& path,
                          const std::string& canonical_config,
                          const StudyResult& result, const Provenance& prov) {
  auto out = open_out(path);
  write_header(out, "study-metadata", prov);
  out << "# excluded=" << result.excluded_count
      << " quality_failure=" << (result.quality_failure ? 1 : 0)
      << " low_regularity_flag=" << (result.low_regularity_flag ? 1 : 0)
      << " monotone_violations=" << result.monotone_violations << "\n";
  out << "# --- canonical config ---\n";
  std::istringstream in(canonical_config);
  std::string line;
  while (std::getline(in, line)) out << "# " << line << "\n";
}

Dataset read_dataset_file(const std::string& path, int dim,
                          std::int64_t* rejected_count) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  Dataset data;
  data.dim = dim;
  std::int64_t rejected = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = line;
    if (const auto pos = t.find('#'); pos != std::string::npos) {
      t = t.substr(0, pos);
    }
    std::istringstream ls(t);
    std::vector<double> coords;
    double v = 0.0;
    while (ls >> v) coords.push_back(v);
    if (coords.empty()) continue;
    if (static_cast<int>(coords.size()) != dim) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(dim) +
                               " coordinates");
    }
    bool ok = true;
    for (double c : coords) {
      if (!(c >= 0.0 && c <= 1.0)) ok = false;
    }
    if (!ok) {
      ++rejected;
      continue;
    }
    for (double c : coords) data.points.push_back(c);
  }
  if (rejected_count != nullptr) *rejected_count = rejected;
  return data;
}

}  // namespace besov
