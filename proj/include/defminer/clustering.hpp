#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "defminer/vector_space.hpp"

namespace defminer {

struct KMeansOptions {
  std::size_t k = 8;
  std::uint64_t seed = 42;
  std::size_t max_iter = 300;
  double tol = 1e-6;
  /// Independent k-means++ restarts; the lowest-inertia run is kept.
  std::size_t n_init = 10;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;      // input order
  std::vector<std::size_t> labels;   // labels[i] is the cluster of ids[i]
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  /// Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_history;

  std::map<std::string, std::size_t> label_map() const;
};

/// Squared Euclidean distance.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Sum of squared distances of each point to its assigned centroid.
double compute_inertia(std::span<const DefinitionVector> vectors, const ClusterAssignment& a);

/// Lloyd's k-means with greedy k-means++ seeding (2 + ln k candidate draws per
/// center, lowest potential wins). Points are visited in candidate-id
/// order during seeding so results do not depend on input order. Empty
/// clusters are reseeded from the point farthest from its centroid; distance
/// ties go to the lowest cluster index.
ClusterAssignment kmeans(std::span<const DefinitionVector> vectors, const KMeansOptions& opts);

enum class RestageMode {
  /// Stage i+1 clusters the centroids of stage i.
  centroids,
  /// Every stage re-clusters the original vectors.
  raw,
};

struct CascadeStage {
  ClusterAssignment assignment;
  /// Original candidate id -> cluster at this stage.
  std::map<std::string, std::size_t> mapping;
};

/// Staged k-means at strictly decreasing k.
std::vector<CascadeStage> cascade_cluster(std::span<const DefinitionVector> vectors,
                                          std::span<const std::size_t> ks,
                                          const KMeansOptions& base,
                                          RestageMode mode = RestageMode::centroids);

/// Scales a k schedule sized for reference_n items down to n items as
/// ceil(k * n / reference_n), keeping the result strictly decreasing and >= 1.
std::vector<std::size_t> scale_ks(std::span<const std::size_t> ks, std::size_t n,
                                  std::size_t reference_n = 800);

enum class Linkage { average, complete, single };

struct Merge {
  std::size_t left = 0;   // node ids: leaves are 0..n-1, merge i creates n+i
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct LinkageTree {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;
};

using SquareMatrix = std::vector<std::vector<double>>;

/// Agglomerative clustering over a symmetric, zero-diagonal, non-negative
/// dissimilarity matrix. Equal distances are broken by the smallest leaf
/// index pair of the two clusters.
LinkageTree agglomerate(const SquareMatrix& dissimilarity, Linkage linkage = Linkage::average,
                        std::vector<std::string> labels = {});

/// Undoes the groups-1 last merges. Each group lists leaf indices ascending;
/// groups are ordered by their smallest leaf.
std::vector<std::vector<std::size_t>> cut_tree(const LinkageTree& tree, std::size_t groups);

}  // namespace defminer
