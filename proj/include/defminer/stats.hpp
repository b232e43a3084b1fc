#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "defminer/clustering.hpp"
#include "defminer/components.hpp"

namespace defminer {

/// Regularized upper incomplete gamma Q(a, x), series for x < a + 1 and a
/// Lentz continued fraction otherwise; both terminate at 1e-12 relative.
double regularized_gamma_q(double a, double x);

/// Upper-tail probability of the chi-square distribution.
double chi_square_sf(double statistic, std::size_t dof);

enum class Smoothing { none, add_half_zero_cells };

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const Cell&) const = default;
};

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  /// Table the statistic was computed on (after smoothing, if any).
  std::vector<std::vector<double>> observed;
  std::vector<std::vector<double>> expected;
  std::vector<Cell> adjusted_cells;
};

/// Pearson chi-square test of independence. With add_half_zero_cells, 0.5 is
/// added to every zero observed cell and expected counts are recomputed on
/// the smoothed table. Throws DataError for a table smaller than 2x2, an
/// empty table, or (without smoothing) a zero row or column.
ChiSquareResult chi_square(const ContingencyTable& t, Smoothing smoothing = Smoothing::add_half_zero_cells);

enum class ResidualKind {
  /// (O - E) / sqrt(E)
  pearson,
  /// (O - E) / sqrt(E (1 - row/N) (1 - col/N))
  adjusted,
};

struct ResidualMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> significant;  // |R| > 2
  /// Per column: row indices by residual, descending (ties by row index).
  std::vector<std::vector<std::size_t>> ranking;
};

inline constexpr double kSignificanceThreshold = 2.0;

ResidualMatrix residuals(const ContingencyTable& t, const ChiSquareResult& result,
                         ResidualKind kind = ResidualKind::pearson);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;
  /// Rows with zero variance; their correlation to every other row is 0.
  std::vector<bool> zero_variance;
};

/// Pearson correlation between residual rows. Throws DataError with fewer
/// than two columns.
CorrelationMatrix residual_correlation(const ResidualMatrix& r);

struct ComponentPartition {
  std::vector<std::vector<std::string>> groups;
  /// Group names: HPRT / LTDS for two groups, G1..Gn otherwise.
  std::vector<std::string> names;
  std::size_t hprt_group = 0;
  LinkageTree tree;
};

/// Components anchoring the HPRT group label.
inline const std::vector<std::string> kHprtAnchors = {"Real-time data", "HPC"};

/// Average-linkage clustering on 1 - correlation, cut into `groups`. The group
/// whose members correlate most, on average, with the anchor components is
/// labeled HPRT.
ComponentPartition partition_components(const CorrelationMatrix& corr, std::size_t groups = 2,
                                        const std::vector<std::string>& anchors = kHprtAnchors);

}  // namespace defminer
