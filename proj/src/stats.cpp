#include "defminer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "defminer/error.hpp"

namespace defminer {

namespace {

constexpr double kEps = 1e-12;
constexpr int kMaxTerms = 10000;

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::vector<std::vector<double>> expected_counts(const std::vector<std::vector<double>>& obs) {
  const std::size_t r = obs.size();
  const std::size_t c = obs.front().size();
  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double n = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      rows[i] += obs[i][j];
      cols[j] += obs[i][j];
      n += obs[i][j];
    }
  }
  std::vector<std::vector<double>> e(r, std::vector<double>(c));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) e[i][j] = rows[i] * cols[j] / n;
  }
  return e;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DataError("regularized_gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) throw DataError("chi-square with zero degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

ChiSquareResult chi_square(const ContingencyTable& t, Smoothing smoothing) {
  const std::size_t r = t.observed.size();
  if (r < 2 || t.observed.front().size() < 2) {
    throw DataError("contingency table must be at least 2x2");
  }
  const std::size_t c = t.observed.front().size();
  for (const auto& row : t.observed) {
    if (row.size() != c) throw DataError("contingency table rows differ in length");
    for (double v : row) {
      if (!(v >= 0.0)) throw DataError("contingency table has negative counts");
    }
  }
  if (t.total() <= 0.0) throw DataError("contingency table is empty");

  ChiSquareResult res;
  res.observed = t.observed;
  if (smoothing == Smoothing::none) {
    const auto rs = t.row_sums();
    const auto cs = t.col_sums();
    for (std::size_t i = 0; i < r; ++i) {
      if (rs[i] == 0.0) {
        throw DataError("zero row '" + (i < t.rows.size() ? t.rows[i] : std::to_string(i)) +
                        "' gives zero expected counts; enable smoothing");
      }
    }
    for (std::size_t j = 0; j < c; ++j) {
      if (cs[j] == 0.0) {
        throw DataError("zero column '" + (j < t.cols.size() ? t.cols[j] : std::to_string(j)) +
                        "' gives zero expected counts; enable smoothing");
      }
    }
  } else {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        if (res.observed[i][j] == 0.0) {
          res.observed[i][j] = 0.5;
          res.adjusted_cells.push_back({i, j});
        }
      }
    }
  }

  res.expected = expected_counts(res.observed);
  res.statistic = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double diff = res.observed[i][j] - res.expected[i][j];
      res.statistic += diff * diff / res.expected[i][j];
    }
  }
  res.dof = (r - 1) * (c - 1);
  res.p_value = std::max(chi_square_sf(res.statistic, res.dof), std::numeric_limits<double>::min());
  return res;
}

ResidualMatrix residuals(const ContingencyTable& t, const ChiSquareResult& result,
                         ResidualKind kind) {
  const auto& obs = result.observed;
  const auto& exp = result.expected;
  const std::size_t r = obs.size();
  const std::size_t c = r ? obs.front().size() : 0;

  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double n = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      rows[i] += obs[i][j];
      cols[j] += obs[i][j];
      n += obs[i][j];
    }
  }

  ResidualMatrix m;
  m.rows = t.rows;
  m.cols = t.cols;
  m.values.assign(r, std::vector<double>(c, 0.0));
  m.significant.assign(r, std::vector<bool>(c, false));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (!(exp[i][j] > 0.0)) {
        throw DataError("zero expected count in cell (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
      double denom = exp[i][j];
      if (kind == ResidualKind::adjusted) denom *= (1.0 - rows[i] / n) * (1.0 - cols[j] / n);
      const double v = denom > 0.0 ? (obs[i][j] - exp[i][j]) / std::sqrt(denom) : 0.0;
      m.values[i][j] = v;
      m.significant[i][j] = std::abs(v) > kSignificanceThreshold;
    }
  }
  m.ranking.resize(c);
  for (std::size_t j = 0; j < c; ++j) {
    auto& rank = m.ranking[j];
    rank.resize(r);
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      return m.values[a][j] > m.values[b][j];
    });
  }
  return m;
}

CorrelationMatrix residual_correlation(const ResidualMatrix& r) {
  const std::size_t n = r.values.size();
  const std::size_t c = n ? r.values.front().size() : 0;
  if (c < 2) throw DataError("residual correlation needs at least two domains");

  std::vector<std::vector<double>> centered(n, std::vector<double>(c));
  std::vector<double> ss(n, 0.0);
  CorrelationMatrix out;
  out.labels = r.rows;
  out.zero_variance.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = std::accumulate(r.values[i].begin(), r.values[i].end(), 0.0) / c;
    for (std::size_t j = 0; j < c; ++j) {
      centered[i][j] = r.values[i][j] - mean;
      ss[i] += centered[i][j] * centered[i][j];
    }
    out.zero_variance[i] = ss[i] <= 1e-24;
  }
  out.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i][i] = 1.0;
    for (std::size_t k = i + 1; k < n; ++k) {
      double v = 0.0;
      if (!out.zero_variance[i] && !out.zero_variance[k]) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += centered[i][j] * centered[k][j];
        v = std::clamp(dot / std::sqrt(ss[i] * ss[k]), -1.0, 1.0);
      }
      out.values[i][k] = out.values[k][i] = v;
    }
  }
  return out;
}

ComponentPartition partition_components(const CorrelationMatrix& corr, std::size_t groups,
                                        const std::vector<std::string>& anchors) {
  const std::size_t n = corr.values.size();
  SquareMatrix dissim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i != k) dissim[i][k] = std::max(0.0, 1.0 - corr.values[i][k]);
    }
  }
  ComponentPartition out;
  out.tree = agglomerate(dissim, Linkage::average, corr.labels);
  const auto cut = cut_tree(out.tree, groups);

  std::vector<std::size_t> anchor_idx;
  for (const auto& a : anchors) {
    auto it = std::find(corr.labels.begin(), corr.labels.end(), a);
    if (it != corr.labels.end()) anchor_idx.push_back(static_cast<std::size_t>(it - corr.labels.begin()));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < cut.size(); ++g) {
    std::vector<std::string> names;
    for (std::size_t leaf : cut[g]) names.push_back(corr.labels[leaf]);
    out.groups.push_back(std::move(names));
    if (anchor_idx.empty()) continue;
    double s = 0.0;
    for (std::size_t leaf : cut[g]) {
      for (std::size_t a : anchor_idx) s += corr.values[leaf][a];
    }
    s /= static_cast<double>(cut[g].size() * anchor_idx.size());
    if (s > best) {
      best = s;
      out.hprt_group = g;
    }
  }

  for (std::size_t g = 0; g < out.groups.size(); ++g) {
    if (out.groups.size() == 2 && !anchor_idx.empty()) {
      out.names.push_back(g == out.hprt_group ? "HPRT" : "LTDS");
    } else {
      out.names.push_back("G" + std::to_string(g + 1));
    }
  }
  return out;
}

}  // namespace defminer
