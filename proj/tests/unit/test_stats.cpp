#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "defminer/error.hpp"
#include "defminer/stats.hpp"
#include "oracles.hpp"

using namespace defminer;

namespace {

ContingencyTable table(std::vector<std::vector<double>> obs) {
  ContingencyTable t;
  for (std::size_t i = 0; i < obs.size(); ++i) t.rows.push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < obs.front().size(); ++j) t.cols.push_back("c" + std::to_string(j));
  t.observed = std::move(obs);
  return t;
}

}  // namespace

TEST_CASE("upper incomplete gamma against boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 22.5, 60.0}) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 11.0, 25.0, 54.88, 120.0}) {
      const double want = boost::math::gamma_q(a, x);
      const double got = regularized_gamma_q(a, x);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
  CHECK(regularized_gamma_q(3.0, 0.0) == 1.0);
  CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), DataError);
}

TEST_CASE("chi-square tail for the 16x4 design") {
  const double p = chi_square_sf(109.76, 45);
  CHECK(p == doctest::Approx(2.4805721905851995e-07).epsilon(1e-8));
  CHECK(chi_square_sf(0.0, 3) == 1.0);
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), DataError);
}

TEST_CASE("two by two hand case") {
  const auto r = chi_square(table({{10, 20}, {30, 40}}));
  CHECK(r.statistic == doctest::Approx(0.7936507936507936));
  CHECK(r.dof == 1);
  CHECK(r.adjusted_cells.empty());
  const auto res = residuals(table({{10, 20}, {30, 40}}), r);
  CHECK(res.values[0][0] == doctest::Approx(-0.5773502691896258));
}

TEST_CASE("random tables match the brute-force statistic") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> rows(2, 16), cols(2, 4), count(0, 50);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> obs(static_cast<std::size_t>(rows(rng)));
    const auto c = static_cast<std::size_t>(cols(rng));
    for (auto& r : obs)
      for (std::size_t j = 0; j < c; ++j) r.push_back(count(rng));
    const auto t = table(obs);
    const auto res = chi_square(t);
    auto smoothed = obs;
    for (auto& r : smoothed)
      for (auto& v : r)
        if (v == 0) v = 0.5;
    const double want = oracle::chi_square(smoothed);
    CHECK(std::abs(res.statistic - want) <= 1e-9 * want);
    CHECK(res.dof == (obs.size() - 1) * (c - 1));
    CHECK(res.p_value >= 0.0);
    CHECK(res.p_value <= 1.0);

    const auto R = residuals(t, res);
    double n = 0;
    for (const auto& r : res.observed)
      for (double v : r) n += v;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < c; ++j) s += R.values[i][j] * std::sqrt(res.expected[i][j]);
      CHECK(std::abs(s) <= 1e-9 * n);
    }
  }
}

TEST_CASE("smoothing records adjusted cells; without it zero margins fail") {
  const auto t = table({{0, 5}, {0, 7}});
  const auto r = chi_square(t);
  CHECK(r.adjusted_cells == std::vector<Cell>{{0, 0}, {1, 0}});
  CHECK(r.observed[0][0] == 0.5);
  CHECK_THROWS_AS(chi_square(t, Smoothing::none), DataError);
  CHECK_THROWS_AS(chi_square(table({{1, 2}})), DataError);
  CHECK_THROWS_AS(chi_square(table({{0, 0}, {0, 0}}), Smoothing::none), DataError);
}

TEST_CASE("significance flags and per-column ranking") {
  const auto t = table({{40, 2}, {2, 40}, {10, 10}});
  const auto r = residuals(t, chi_square(t));
  CHECK(r.significant[0][0]);
  CHECK(r.values[0][0] > 2.0);
  CHECK(r.values[1][0] < -2.0);
  CHECK_FALSE(r.significant[2][0]);
  CHECK(r.ranking[0].front() == 0);
  CHECK(r.ranking[1].front() == 1);

  const auto adj = residuals(t, chi_square(t), ResidualKind::adjusted);
  CHECK(std::abs(adj.values[0][0]) > std::abs(r.values[0][0]));
}

TEST_CASE("residual correlation") {
  ResidualMatrix r;
  r.rows = {"a", "b", "c", "flat"};
  r.cols = {"x", "y", "z"};
  r.values = {{1, 2, 3}, {2, 4, 6.5}, {3, 2, 1}, {1, 1, 1}};
  const auto c = residual_correlation(r);
  CHECK(c.values[0][0] == doctest::Approx(1.0));
  CHECK(c.values[0][2] == doctest::Approx(-1.0));
  CHECK(c.values[0][1] > 0.99);
  CHECK(c.values[0][1] == c.values[1][0]);
  CHECK(c.zero_variance[3]);
  CHECK(c.values[3][0] == 0.0);

  r.cols = {"x"};
  r.values = {{1}, {2}, {3}, {4}};
  CHECK_THROWS_AS(residual_correlation(r), DataError);
}

TEST_CASE("two-group partition names the anchor group HPRT") {
  CorrelationMatrix c;
  c.labels = {"Real-time data", "HPC", "Policy", "Visualization"};
  c.values = {{1, 0.9, -0.5, -0.6}, {0.9, 1, -0.4, -0.5}, {-0.5, -0.4, 1, 0.8}, {-0.6, -0.5, 0.8, 1}};
  c.zero_variance.assign(4, false);
  const auto p = partition_components(c);
  REQUIRE(p.groups.size() == 2);
  CHECK(p.names[p.hprt_group] == "HPRT");
  CHECK(p.groups[p.hprt_group] == std::vector<std::string>{"Real-time data", "HPC"});
  CHECK(p.names[1 - p.hprt_group] == "LTDS");
  CHECK(partition_components(c, 3).names == std::vector<std::string>{"G1", "G2", "G3"});
}
