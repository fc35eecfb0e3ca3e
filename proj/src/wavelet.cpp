// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/wavelet.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace besov {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440084436210485;

std::int64_t pow2(int k) { return std::int64_t{1} << k; }

// Orthonormal scaling filters, sum = sqrt(2).  db2 is generated from its
// closed form; db3..db5 are the standard tabulated values.  All filters are
// checked for orthonormality at construction.
std::vector<double> scaling_filter(WaveletFamily family, int vm) {
  if (family == WaveletFamily::haar) return {kSqrt1_2, kSqrt1_2};
  switch (vm) {
    case 2: {
      const double s3 = std::sqrt(3.0);
      const double c = 1.0 / (4.0 * std::sqrt(2.0));
      return {c * (1.0 + s3), c * (3.0 + s3), c * (3.0 - s3), c * (1.0 - s3)};
    }
    case 3:
      return {0.3326705529509569,  0.8068915093133388,  0.4598775021193313,
              -0.13501102001039084, -0.08544127388224149, 0.035226291882100656};
    case 4:
      return {0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
              -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
              0.032883011666982945, -0.010597401784997278};
    case 5:
      return {0.160102397974125,   0.6038292697974729,  0.7243085284385744,
              0.13842814590110342, -0.24229488706619015, -0.03224486958502952,
              0.07757149384006515, -0.006241490213011705, -0.012580751999015526,
              0.003335725285001549};
    default:
      throw std::invalid_argument(
          "wavelet: Daubechies vanishing moments must be in 2..5");
  }
}

void check_filter(const std::vector<double>& h) {
  double sum = 0.0;
  for (double v : h) sum += v;
  if (std::abs(sum - std::sqrt(2.0)) > 1e-10) {
    throw std::logic_error("wavelet: filter sum != sqrt(2)");
  }
  for (std::size_t shift = 0; shift < h.size(); shift += 2) {
    double dot = 0.0;
    for (std::size_t k = 0; k + shift < h.size(); ++k) dot += h[k] * h[k + shift];
    const double want = shift == 0 ? 1.0 : 0.0;
    if (std::abs(dot - want) > 1e-10) {
      throw std::logic_error("wavelet: filter not orthonormal");
    }
  }
}

int family_regularity(WaveletFamily family, int vm) {
  if (family == WaveletFamily::haar) return 1;
  // Holder exponents of the Daubechies mothers: db2 0.550, db3 1.088,
  // db4 1.618, db5 1.969.  Rounded to the nearest integer, floored at 1.
  switch (vm) {
    case 2: return 1;
    case 3: return 1;
    case 4: return 2;
    case 5: return 2;
    default: return 1;
  }
}

// One inverse transform step: scaling+detail at scale j -> scaling at j+1.
void up_step(const std::vector<double>& a, const double* d,
             const std::vector<double>& lo, const std::vector<double>& hi,
             std::vector<double>& out) {
  const std::size_t m = a.size();
  const std::size_t mask = 2 * m - 1;
  out.assign(2 * m, 0.0);
  const std::size_t len = lo.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double av = a[k];
    const double dv = d ? d[k] : 0.0;
    if (av == 0.0 && dv == 0.0) continue;
    for (std::size_t t = 0; t < len; ++t) {
      out[(2 * k + t) & mask] += lo[t] * av + hi[t] * dv;
    }
  }
}

// One forward step: scaling at scale j+1 -> (scaling, detail) at scale j.
void down_step(const std::vector<double>& v, const std::vector<double>& lo,
               const std::vector<double>& hi, std::vector<double>& a,
               std::vector<double>& d) {
  const std::size_t m = v.size() / 2;
  const std::size_t mask = v.size() - 1;
  a.assign(m, 0.0);
  d.assign(m, 0.0);
  const std::size_t len = lo.size();
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0, w = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const double x = v[(2 * k + t) & mask];
      s += lo[t] * x;
      w += hi[t] * x;
    }
    a[k] = s;
    d[k] = w;
  }
}

}  // namespace

void CoefficientTree::set(int level, std::int64_t index, double value) {
  if (level < 1 || index < 1) {
    throw std::out_of_range("CoefficientTree: level and index must be >= 1");
  }
  if (value == 0.0) {
    entries_.erase({level, index});
  } else {
    entries_[{level, index}] = value;
  }
  if (level > max_level_) max_level_ = level;
}

double CoefficientTree::get(int level, std::int64_t index) const {
  auto it = entries_.find({level, index});
  return it == entries_.end() ? 0.0 : it->second;
}

void CoefficientTree::set_max_level(int level) {
  if (!entries_.empty() && entries_.rbegin()->first.first > level) {
    throw std::invalid_argument("CoefficientTree: entries above max_level");
  }
  max_level_ = level;
}

double GridFunction::cell_weight() const {
  return std::ldexp(1.0, -grid_level * dim);
}

GridFunction make_grid_function(int dim, int grid_level) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (grid_level < 0 || grid_level * dim > 26) {
    throw std::invalid_argument("grid: level out of range");
  }
  GridFunction g;
  g.dim = dim;
  g.grid_level = grid_level;
  g.values.assign(static_cast<std::size_t>(pow2(grid_level * dim)), 0.0);
  return g;
}

WaveletBasis WaveletBasis::make(WaveletFamily family, int vanishing_moments,
                                int dim, int max_grid_level) {
  if (family == WaveletFamily::haar) vanishing_moments = 1;
  if (dim < 1 || dim > 2) throw std::invalid_argument("basis: dim must be 1 or 2");
  if (max_grid_level < 2 || max_grid_level * dim > 26) {
    throw std::invalid_argument("basis: grid level out of range");
  }
  WaveletBasis b;
  b.family_ = family;
  b.vanishing_moments_ = vanishing_moments;
  b.regularity_ = family_regularity(family, vanishing_moments);
  b.dim_ = dim;
  b.max_grid_level_ = max_grid_level;
  b.lo_ = scaling_filter(family, vanishing_moments);
  check_filter(b.lo_);
  const std::size_t len = b.lo_.size();
  b.hi_.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    b.hi_[k] = sign * b.lo_[len - 1 - k];
  }
  // Tabulate psi_{l,1} for every level the grid can hold, so the basis is
  // immutable (and freely shareable) after construction.
  b.level_tab_.resize(static_cast<std::size_t>(max_grid_level));
  for (int l = 1; l <= max_grid_level - 1; ++l) {
    std::vector<double> a(2, 0.0);
    std::vector<double> scratch;
    for (int j = 1; j <= max_grid_level - 1; ++j) {
      if (j == l) {
        std::vector<double> d(static_cast<std::size_t>(pow2(j)), 0.0);
        d[0] = 1.0;
        up_step(a, d.data(), b.lo_, b.hi_, scratch);
      } else {
        up_step(a, nullptr, b.lo_, b.hi_, scratch);
      }
      a.swap(scratch);
    }
    const double scale = std::exp2(0.5 * max_grid_level);
    for (double& v : a) v *= scale;
    b.level_tab_[static_cast<std::size_t>(l)] = std::move(a);
  }
  return b;
}

std::string WaveletBasis::family_name() const {
  if (family_ == WaveletFamily::haar) return "haar";
  return "db" + std::to_string(vanishing_moments_);
}

std::int64_t WaveletBasis::level_size(int level) const {
  return pow2(level * dim_);
}

const std::vector<double>& WaveletBasis::level_tabulation(int level) const {
  if (level < 1 || level > max_grid_level_ - 1) {
    throw std::out_of_range("basis: tabulation level out of range");
  }
  return level_tab_[static_cast<std::size_t>(level)];
}

double WaveletBasis::eval1d(int level, std::int64_t index, double x) const {
  if (family_ == WaveletFamily::haar) {
    const double y =
        std::ldexp(x, level) - static_cast<double>(index - 1);
    if (y < 0.0 || y >= 1.0) return 0.0;
    const double amp = std::exp2(0.5 * level);
    return y < 0.5 ? -amp : amp;
  }
  const int J = max_grid_level_;
  double xf = x - std::floor(x);
  if (x == 1.0) xf = 0.0;
  auto cell = static_cast<std::int64_t>(std::floor(std::ldexp(xf, J)));
  const std::int64_t n = pow2(J);
  if (cell >= n) cell = n - 1;
  const std::int64_t shift = (index - 1) * pow2(J - level);
  const std::int64_t pos = (cell - shift) & (n - 1);
  return level_tab_[static_cast<std::size_t>(level)]
                   [static_cast<std::size_t>(pos)];
}

double WaveletBasis::eval(int level, std::int64_t index,
                          std::span<const double> x) const {
  if (level < 1 || index < 1 || index > level_size(level)) {
    throw std::out_of_range("basis: wavelet index out of range");
  }
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("basis: point dimension mismatch");
  }
  if (dim_ == 1) return eval1d(level, index, x[0]);
  const std::int64_t per = pow2(level);
  const std::int64_t k1 = (index - 1) / per;
  const std::int64_t k2 = (index - 1) % per;
  return eval1d(level, k1 + 1, x[0]) * eval1d(level, k2 + 1, x[1]);
}

namespace {

// Gathers a tree into dense per-level arrays (1-based level l -> 2^{ld}
// coefficients).
std::vector<std::vector<double>> to_levels(const CoefficientTree& coeffs,
                                           int dim, int max_level) {
  std::vector<std::vector<double>> levels(
      static_cast<std::size_t>(std::max(max_level, 0)));
  for (const auto& [key, value] : coeffs.entries()) {
    const auto [l, r] = key;
    if (l > max_level) continue;
    auto& lv = levels[static_cast<std::size_t>(l - 1)];
    if (lv.empty()) lv.assign(static_cast<std::size_t>(pow2(l * dim)), 0.0);
    if (r < 1 || r > pow2(l * dim)) {
      throw std::out_of_range("tree: coefficient index out of range");
    }
    lv[static_cast<std::size_t>(r - 1)] = value;
  }
  return levels;
}

GridFunction synthesize1d(const std::vector<std::vector<double>>& levels,
                          const WaveletBasis& basis, int J) {
  std::vector<double> a(2, 0.0), scratch;
  for (int j = 1; j <= J - 1; ++j) {
    const double* d = nullptr;
    if (j <= static_cast<int>(levels.size()) &&
        !levels[static_cast<std::size_t>(j - 1)].empty()) {
      d = levels[static_cast<std::size_t>(j - 1)].data();
    }
    up_step(a, d, basis.decomposition_low(), basis.decomposition_high(),
            scratch);
    a.swap(scratch);
  }
  GridFunction g = make_grid_function(1, J);
  const double scale = std::exp2(0.5 * J);
  for (std::size_t i = 0; i < a.size(); ++i) g.values[i] = scale * a[i];
  return g;
}

CoefficientTree analyze1d(const GridFunction& f, const WaveletBasis& basis,
                          int max_level) {
  std::vector<double> a = f.values;
  const double scale = std::exp2(-0.5 * f.grid_level);
  for (double& v : a) v *= scale;
  CoefficientTree out;
  std::vector<double> next, d;
  for (int j = f.grid_level - 1; j >= 1; --j) {
    down_step(a, basis.decomposition_low(), basis.decomposition_high(), next,
              d);
    a.swap(next);
    if (j <= max_level) {
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] != 0.0) out.set(j, static_cast<std::int64_t>(k) + 1, d[k]);
      }
    }
  }
  out.set_max_level(std::max(out.max_level(), max_level));
  return out;
}

// Separable 2-d steps keeping only the diagonal (wavelet x wavelet) detail.
// Quadrants at scale j are held as m*m row-major blocks, m = 2^j.

struct Quads {
  std::vector<double> ll, lh, hl, hh;
};

void down_step2d(const std::vector<double>& v, std::size_t m2,
                 const WaveletBasis& basis, Quads& q) {
  const std::size_t m = m2 / 2;
  // rows: filter along x2
  std::vector<double> rowsA(m2 * m), rowsD(m2 * m);
  std::vector<double> row(m2), a, d;
  for (std::size_t i = 0; i < m2; ++i) {
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(i * m2),
              v.begin() + static_cast<std::ptrdiff_t>((i + 1) * m2),
              row.begin());
    down_step(row, basis.decomposition_low(), basis.decomposition_high(), a,
              d);
    for (std::size_t c = 0; c < m; ++c) {
      rowsA[i * m + c] = a[c];
      rowsD[i * m + c] = d[c];
    }
  }
  // columns: filter along x1
  q.ll.assign(m * m, 0.0);
  q.lh.assign(m * m, 0.0);
  q.hl.assign(m * m, 0.0);
  q.hh.assign(m * m, 0.0);
  std::vector<double> col(m2);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < m2; ++i) col[i] = rowsA[i * m + c];
    down_step(col, basis.decomposition_low(), basis.decomposition_high(), a,
              d);
    for (std::size_t k = 0; k < m; ++k) {
      q.ll[k * m + c] = a[k];
      q.hl[k * m + c] = d[k];
    }
    for (std::size_t i = 0; i < m2; ++i) col[i] = rowsD[i * m + c];
    down_step(col, basis.decomposition_low(), basis.decomposition_high(), a,
              d);
    for (std::size_t k = 0; k < m; ++k) {
      q.lh[k * m + c] = a[k];
      q.hh[k * m + c] = d[k];
    }
  }
}

void up_step2d(const Quads& q, std::size_t m, const WaveletBasis& basis,
               std::vector<double>& out) {
  const std::size_t m2 = 2 * m;
  std::vector<double> rowsA(m2 * m), rowsD(m2 * m);
  std::vector<double> a(m), d(m), up;
  // columns first (inverse of the forward order)
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t k = 0; k < m; ++k) {
      a[k] = q.ll[k * m + c];
      d[k] = q.hl[k * m + c];
    }
    up_step(a, d.data(), basis.decomposition_low(), basis.decomposition_high(),
            up);
    for (std::size_t i = 0; i < m2; ++i) rowsA[i * m + c] = up[i];
    for (std::size_t k = 0; k < m; ++k) {
      a[k] = q.lh[k * m + c];
      d[k] = q.hh[k * m + c];
    }
    up_step(a, d.data(), basis.decomposition_low(), basis.decomposition_high(),
            up);
    for (std::size_t i = 0; i < m2; ++i) rowsD[i * m + c] = up[i];
  }
  out.assign(m2 * m2, 0.0);
  std::vector<double> ra(m), rd(m);
  for (std::size_t i = 0; i < m2; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      ra[c] = rowsA[i * m + c];
      rd[c] = rowsD[i * m + c];
    }
    up_step(ra, rd.data(), basis.decomposition_low(),
            basis.decomposition_high(), up);
    std::copy(up.begin(), up.end(),
              out.begin() + static_cast<std::ptrdiff_t>(i * m2));
  }
}

GridFunction synthesize2d(const std::vector<std::vector<double>>& levels,
                          const WaveletBasis& basis, int J) {
  std::vector<double> s(4, 0.0);  // scale-1 scaling block
  Quads q;
  std::vector<double> out;
  for (int j = 1; j <= J - 1; ++j) {
    const auto m = static_cast<std::size_t>(pow2(j));
    q.ll.swap(s);
    q.lh.assign(m * m, 0.0);
    q.hl.assign(m * m, 0.0);
    if (j <= static_cast<int>(levels.size()) &&
        !levels[static_cast<std::size_t>(j - 1)].empty()) {
      q.hh = levels[static_cast<std::size_t>(j - 1)];
    } else {
      q.hh.assign(m * m, 0.0);
    }
    up_step2d(q, m, basis, out);
    s.swap(out);
  }
  GridFunction g = make_grid_function(2, J);
  const double scale = std::exp2(static_cast<double>(J));
  for (std::size_t i = 0; i < s.size(); ++i) g.values[i] = scale * s[i];
  return g;
}

CoefficientTree analyze2d(const GridFunction& f, const WaveletBasis& basis,
                          int max_level) {
  std::vector<double> s = f.values;
  const double scale = std::exp2(-static_cast<double>(f.grid_level));
  for (double& v : s) v *= scale;
  CoefficientTree out;
  Quads q;
  for (int j = f.grid_level - 1; j >= 1; --j) {
    const auto m2 = static_cast<std::size_t>(pow2(j + 1));
    down_step2d(s, m2, basis, q);
    s.swap(q.ll);
    if (j <= max_level) {
      const auto m = static_cast<std::size_t>(pow2(j));
      for (std::size_t k1 = 0; k1 < m; ++k1) {
        for (std::size_t k2 = 0; k2 < m; ++k2) {
          const double v = q.hh[k1 * m + k2];
          if (v != 0.0) {
            out.set(j, static_cast<std::int64_t>(k1 * m + k2) + 1, v);
          }
        }
      }
    }
  }
  out.set_max_level(std::max(out.max_level(), max_level));
  return out;
}

}  // namespace

GridFunction synthesize(const CoefficientTree& coeffs,
                        const WaveletBasis& basis, int grid_level) {
  if (coeffs.max_level() > grid_level - 1) {
    throw std::invalid_argument(
        "synthesize: tree max_level exceeds grid resolution J-1");
  }
  return synthesize_dense(to_levels(coeffs, basis.dim(), coeffs.max_level()),
                          basis, grid_level);
}

GridFunction synthesize_dense(const std::vector<std::vector<double>>& levels,
                              const WaveletBasis& basis, int grid_level) {
  if (static_cast<int>(levels.size()) > grid_level - 1) {
    throw std::invalid_argument(
        "synthesize: levels exceed grid resolution J-1");
  }
  if (grid_level > basis.max_grid_level()) {
    throw std::invalid_argument("synthesize: grid level above basis limit");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!levels[i].empty() &&
        levels[i].size() !=
            static_cast<std::size_t>(pow2(static_cast<int>(i + 1) *
                                          basis.dim()))) {
      throw std::invalid_argument("synthesize: level array size mismatch");
    }
  }
  return basis.dim() == 1 ? synthesize1d(levels, basis, grid_level)
                          : synthesize2d(levels, basis, grid_level);
}

CoefficientTree analyze(const GridFunction& f, const WaveletBasis& basis,
                        int max_level) {
  if (max_level > f.grid_level - 1) {
    throw std::invalid_argument("analyze: max_level exceeds J-1");
  }
  if (f.dim != basis.dim()) {
    throw std::invalid_argument("analyze: dimension mismatch");
  }
  if (f.values.size() !=
      static_cast<std::size_t>(pow2(f.grid_level * f.dim))) {
    throw std::invalid_argument("analyze: grid size mismatch");
  }
  return basis.dim() == 1 ? analyze1d(f, basis, max_level)
                          : analyze2d(f, basis, max_level);
}

CoefficientTree project(const CoefficientTree& coeffs, int max_level) {
  if (max_level < 1) throw std::invalid_argument("project: max_level >= 1");
  CoefficientTree out;
  for (const auto& [key, value] : coeffs.entries()) {
    if (key.first <= max_level) out.set(key.first, key.second, value);
  }
  out.set_max_level(std::min(coeffs.max_level(), max_level));
  return out;
}

double besov_norm(const CoefficientTree& coeffs, double s, double p, double q,
                  int dim) {
  const bool p_inf = std::isinf(p);
  const bool q_inf = std::isinf(q);
  const double d = static_cast<double>(dim);
  const double level_exp = s - (p_inf ? 0.0 : d / p) + d / 2.0;

  double q_acc = 0.0;  // running sum, or max when q = inf
  auto it = coeffs.entries().begin();
  while (it != coeffs.entries().end()) {
    const int l = it->first.first;
    double p_acc = 0.0;
    for (; it != coeffs.entries().end() && it->first.first == l; ++it) {
      const double a = std::abs(it->second);
      p_acc = p_inf ? std::max(p_acc, a) : p_acc + std::pow(a, p);
    }
    const double level_lp = p_inf ? p_acc : std::pow(p_acc, 1.0 / p);
    const double weighted = std::exp2(level_exp * l) * level_lp;
    q_acc = q_inf ? std::max(q_acc, weighted) : q_acc + std::pow(weighted, q);
  }
  return q_inf ? q_acc : std::pow(q_acc, 1.0 / q);
}

double grid_norm(const GridFunction& f, GridNormKind kind) {
  switch (kind) {
    case GridNormKind::l1: {
      double s = 0.0;
      for (double v : f.values) s += std::abs(v);
      return s * f.cell_weight();
    }
    case GridNormKind::l2: {
      double s = 0.0;
      for (double v : f.values) s += v * v;
      return std::sqrt(s * f.cell_weight());
    }
    case GridNormKind::sup: {
      double s = 0.0;
      for (double v : f.values) s = std::max(s, std::abs(v));
      return s;
    }
  }
  throw std::logic_error("grid_norm: unknown kind");
}

}  // namespace besov
