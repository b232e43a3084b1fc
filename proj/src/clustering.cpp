#include "defminer/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include "defminer/error.hpp"

namespace defminer {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) built from raw engine bits, identical on every
/// standard library (std distributions are implementation-defined).
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Run {
  std::vector<std::size_t> labels;  // sorted order
  std::vector<std::vector<double>> centroids;
  std::vector<double> history;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

using Points = std::vector<const std::vector<double>*>;

std::vector<std::vector<double>> seed_plus_plus(const Points& pts, std::size_t k,
                                                std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> centers;
  std::vector<bool> chosen(n, false);
  std::size_t first = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n));
  centers.push_back(*pts[first]);
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(*pts[i], centers.back());

  // Greedy variant: draw several candidates per step, keep the one that
  // lowers the potential most.
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<double> cand_d2(n), best_d2(n);
  while (centers.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      double best_pot = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < trials; ++t) {
        const double target = uniform01(rng) * total;
        double acc = 0.0;
        std::size_t c = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          acc += d2[i];
          c = i;
          if (acc > target) break;
        }
        double pot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cand_d2[i] = std::min(d2[i], squared_distance(*pts[i], *pts[c]));
          pot += cand_d2[i];
        }
        if (pot < best_pot) {
          best_pot = pot;
          pick = c;
          best_d2.swap(cand_d2);
        }
      }
      d2.swap(best_d2);
    } else {
      // Every remaining point coincides with a center.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centers.push_back(*pts[pick]);
  }
  return centers;
}

/// Assigns every point to its nearest centroid; returns the inertia.
double assign(const Points& pts, const std::vector<std::vector<double>>& centroids,
              std::vector<std::size_t>& labels, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = squared_distance(*pts[i], centroids[c]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    labels[i] = best_c;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

/// Moves each empty cluster onto the point currently farthest from its centroid.
double repair_empty(const Points& pts, std::vector<std::vector<double>>& centroids,
                    std::vector<std::size_t>& labels, std::vector<double>& dist) {
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (std::size_t l : labels) ++counts[l];
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (dist[i] > dist[far]) far = i;
    }
    if (dist[far] <= 0.0) break;
    --counts[labels[far]];
    labels[far] = c;
    dist[far] = 0.0;
    centroids[c] = *pts[far];
    ++counts[c];
  }
  return std::accumulate(dist.begin(), dist.end(), 0.0);
}

Run lloyd(const Points& pts, std::size_t k, const KMeansOptions& opts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Run run;
  run.centroids = seed_plus_plus(pts, k, rng);
  const std::size_t n = pts.size();
  const std::size_t dim = pts.front()->size();
  run.labels.assign(n, 0);
  std::vector<double> dist(n, 0.0);

  while (true) {
    assign(pts, run.centroids, run.labels, dist);
    run.history.push_back(repair_empty(pts, run.centroids, run.labels, dist));
    if (run.iterations >= opts.max_iter) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[run.labels[i]];
      const auto& p = *pts[i];
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
      ++counts[run.labels[i]];
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
      max_shift = std::max(max_shift, std::sqrt(squared_distance(sums[c], run.centroids[c])));
      run.centroids[c] = std::move(sums[c]);
    }
    ++run.iterations;
    if (max_shift < opts.tol) {
      assign(pts, run.centroids, run.labels, dist);
      run.history.push_back(repair_empty(pts, run.centroids, run.labels, dist));
      break;
    }
  }
  run.inertia = run.history.back();
  return run;
}

}  // namespace

std::map<std::string, std::size_t> ClusterAssignment::label_map() const {
  std::map<std::string, std::size_t> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], labels[i]);
  return m;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double compute_inertia(std::span<const DefinitionVector> vectors, const ClusterAssignment& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    s += squared_distance(vectors[i].values(), a.centroids.at(a.labels.at(i)));
  }
  return s;
}

ClusterAssignment kmeans(std::span<const DefinitionVector> vectors, const KMeansOptions& opts) {
  const std::size_t n = vectors.size();
  if (opts.k == 0) throw UsageError("k must be positive");
  if (opts.k > n) {
    throw UsageError("k=" + std::to_string(opts.k) + " exceeds the number of vectors (" +
                     std::to_string(n) + ")");
  }
  const std::size_t dim = vectors.front().dimension();
  for (const auto& v : vectors) {
    if (v.dimension() != dim) throw DataError("vectors differ in dimension");
    if (v.degenerate()) throw DataError("degenerate vector " + v.candidate_id());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return vectors[a].candidate_id() < vectors[b].candidate_id();
  });
  Points pts;
  pts.reserve(n);
  for (std::size_t i : order) pts.push_back(&vectors[i].values());

  Run best;
  bool have = false;
  const std::size_t restarts = std::max<std::size_t>(1, opts.n_init);
  for (std::size_t r = 0; r < restarts; ++r) {
    Run run = lloyd(pts, opts.k, opts, splitmix64(opts.seed + r));
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }

  ClusterAssignment out;
  out.k = opts.k;
  out.seed = opts.seed;
  out.ids.resize(n);
  out.labels.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    out.ids[order[s]] = vectors[order[s]].candidate_id();
    out.labels[order[s]] = best.labels[s];
  }
  out.centroids = std::move(best.centroids);
  out.inertia = best.inertia;
  out.iterations_run = best.iterations;
  out.inertia_history = std::move(best.history);
  return out;
}

std::vector<std::size_t> scale_ks(std::span<const std::size_t> ks, std::size_t n,
                                  std::size_t reference_n) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0) throw UsageError("cascade ks must be positive");
    if (i && ks[i] >= ks[i - 1]) throw UsageError("cascade ks must be strictly decreasing");
  }
  std::vector<std::size_t> out;
  for (std::size_t k : ks) {
    std::size_t scaled = k;
    if (n < reference_n) scaled = (k * n + reference_n - 1) / reference_n;
    scaled = std::clamp<std::size_t>(scaled, 1, std::max<std::size_t>(n, 1));
    if (!out.empty() && scaled >= out.back()) continue;
    out.push_back(scaled);
  }
  return out;
}

std::vector<CascadeStage> cascade_cluster(std::span<const DefinitionVector> vectors,
                                          std::span<const std::size_t> ks,
                                          const KMeansOptions& base, RestageMode mode) {
  if (ks.empty()) throw UsageError("cascade needs at least one k");
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] >= ks[i - 1]) throw UsageError("cascade ks must be strictly decreasing");
  }
  if (ks.front() > vectors.size()) {
    throw UsageError("largest k (" + std::to_string(ks.front()) + ") exceeds " +
                     std::to_string(vectors.size()) + " vectors");
  }

  std::vector<CascadeStage> stages;
  std::vector<DefinitionVector> level(vectors.begin(), vectors.end());
  std::map<std::string, std::size_t> current;  // original id -> index into `level`
  for (std::size_t i = 0; i < vectors.size(); ++i) current[vectors[i].candidate_id()] = i;

  for (std::size_t s = 0; s < ks.size(); ++s) {
    KMeansOptions opts = base;
    opts.k = ks[s];
    CascadeStage stage;
    if (mode == RestageMode::raw) {
      stage.assignment = kmeans(vectors, opts);
      stage.mapping = stage.assignment.label_map();
    } else {
      stage.assignment = kmeans(level, opts);
      for (auto& [id, idx] : current) {
        idx = stage.assignment.labels[idx];
        stage.mapping[id] = idx;
      }
      std::vector<DefinitionVector> next;
      next.reserve(stage.assignment.centroids.size());
      for (std::size_t c = 0; c < stage.assignment.centroids.size(); ++c) {
        char name[32];
        std::snprintf(name, sizeof name, "s%zuc%06zu", s, c);
        next.emplace_back(name, stage.assignment.centroids[c]);
      }
      level = std::move(next);
    }
    stages.push_back(std::move(stage));
  }
  return stages;
}

LinkageTree agglomerate(const SquareMatrix& m, Linkage linkage, std::vector<std::string> labels) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) throw DataError("dissimilarity matrix is not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i] != 0.0) throw DataError("dissimilarity matrix has a non-zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(m[i][j] >= 0.0)) throw DataError("dissimilarity matrix has negative entries");
      const double scale = std::max({1.0, std::abs(m[i][j]), std::abs(m[j][i])});
      if (std::abs(m[i][j] - m[j][i]) > 1e-12 * scale) {
        throw DataError("dissimilarity matrix is not symmetric");
      }
    }
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw DataError("label count does not match matrix size");

  LinkageTree tree;
  tree.leaves = std::move(labels);

  struct Cluster {
    std::size_t node;
    std::size_t size;
    std::size_t min_leaf;
    bool active;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, 1, i, true});
  SquareMatrix d = m;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t ba = n, bb = n;
    auto key = [&](std::size_t a, std::size_t b) {
      const std::size_t la = clusters[a].min_leaf, lb = clusters[b].min_leaf;
      return std::make_tuple(d[a][b], std::min(la, lb), std::max(la, lb));
    };
    for (std::size_t a = 0; a < n; ++a) {
      if (!clusters[a].active) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!clusters[b].active) continue;
        if (ba == n || key(a, b) < key(ba, bb)) {
          ba = a;
          bb = b;
        }
      }
    }
    auto& A = clusters[ba];
    auto& B = clusters[bb];
    Merge merge;
    if (A.min_leaf < B.min_leaf) {
      merge.left = A.node;
      merge.right = B.node;
    } else {
      merge.left = B.node;
      merge.right = A.node;
    }
    merge.distance = d[ba][bb];
    merge.size = A.size + B.size;
    tree.merges.push_back(merge);

    for (std::size_t c = 0; c < n; ++c) {
      if (!clusters[c].active || c == ba || c == bb) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::single: v = std::min(d[ba][c], d[bb][c]); break;
        case Linkage::complete: v = std::max(d[ba][c], d[bb][c]); break;
        case Linkage::average:
          v = (static_cast<double>(A.size) * d[ba][c] + static_cast<double>(B.size) * d[bb][c]) /
              static_cast<double>(A.size + B.size);
          break;
      }
      d[ba][c] = d[c][ba] = v;
    }
    A.node = n + step;
    A.size = merge.size;
    A.min_leaf = std::min(A.min_leaf, B.min_leaf);
    B.active = false;
  }
  return tree;
}

std::vector<std::vector<std::size_t>> cut_tree(const LinkageTree& tree, std::size_t groups) {
  const std::size_t n = tree.leaves.size();
  if (groups < 1 || groups > n) {
    throw UsageError("groups must be in [1, " + std::to_string(n) + "], got " +
                     std::to_string(groups));
  }
  // Union-find over node ids.
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n - groups; ++i) {
    const auto& mg = tree.merges[i];
    parent[find(mg.left)] = n + i;
    parent[find(mg.right)] = n + i;
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t leaf = 0; leaf < n; ++leaf) by_root[find(leaf)].push_back(leaf);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace defminer
