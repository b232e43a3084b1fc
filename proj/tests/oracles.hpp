#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

// Direct recursion over the three edit operations on suffixes, memoised so
// that all short string pairs can be enumerated.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> memo(a.size() + 1, std::vector<std::size_t>(b.size() + 1, SIZE_MAX));
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto& m = memo[i][j];
    if (m != SIZE_MAX) return m;
    if (a[i] == b[j]) return m = self(self, i + 1, j + 1);
    return m = 1 + std::min({self(self, i + 1, j), self(self, i, j + 1), self(self, i + 1, j + 1)});
  };
  return rec(rec, 0, 0);
}

// Sum of (O - E)^2 / E with E recomputed from scratch.
inline double chi_square(const std::vector<std::vector<double>>& obs) {
  double n = 0;
  for (const auto& r : obs)
    for (double v : r) n += v;
  double stat = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double ri = 0;
    for (double v : obs[i]) ri += v;
    for (std::size_t j = 0; j < obs[i].size(); ++j) {
      double cj = 0;
      for (const auto& r : obs) cj += r[j];
      const double e = ri * cj / n;
      stat += (obs[i][j] - e) * (obs[i][j] - e) / e;
    }
  }
  return stat;
}

// Inertia of the best partition into exactly k non-empty clusters, by
// enumerating all k^n labelings.
inline double best_partition_inertia(const std::vector<std::vector<double>>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  const std::size_t d = pts.front().size();
  std::vector<std::size_t> lab(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> cnt(k, 0);
    for (auto l : lab) ++cnt[l];
    if (std::all_of(cnt.begin(), cnt.end(), [](std::size_t c) { return c > 0; })) {
      std::vector<std::vector<double>> mean(k, std::vector<double>(d, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) mean[lab[i]][t] += pts[i][t];
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t t = 0; t < d; ++t) mean[c][t] /= static_cast<double>(cnt[c]);
      double s = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) s += (pts[i][t] - mean[lab[i]][t]) * (pts[i][t] - mean[lab[i]][t]);
      best = std::min(best, s);
    }
    std::size_t pos = 0;
    while (pos < n && ++lab[pos] == k) lab[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

// Average linkage recomputed from the original matrix at every step. Returns
// merge heights in order.
inline std::vector<double> average_linkage_heights(const std::vector<std::vector<double>>& dist) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < dist.size(); ++i) clusters.push_back({i});
  std::vector<double> heights;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double s = 0;
        for (auto i : clusters[a])
          for (auto j : clusters[b]) s += dist[i][j];
        s /= static_cast<double>(clusters[a].size() * clusters[b].size());
        if (s < best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    heights.push_back(best);
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return heights;
}

}  // namespace oracle
