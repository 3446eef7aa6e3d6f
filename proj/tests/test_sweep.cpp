#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lmgfs/scaling.hpp"
#include "lmgfs/sweep.hpp"

using namespace lmgfs;

namespace {

bool same(const SweepPoint& a, const SweepPoint& b) {
  auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.n == b.n && a.m_sub == b.m_sub && a.h == b.h && a.method == b.method && a.status == b.status &&
         eq(a.chi_g, b.chi_g) && eq(a.chi_r, b.chi_r) && eq(a.eta, b.eta) && eq(a.entropy, b.entropy) &&
         a.delta == b.delta;
}

}  // namespace

TEST(ParseMethod, Names) {
  EXPECT_EQ(parse_method("fd"), Method::finite_difference);
  EXPECT_EQ(parse_method("finite-difference"), Method::finite_difference);
  EXPECT_EQ(parse_method("spectral"), Method::spectral);
  EXPECT_EQ(parse_method("analytic"), Method::analytic);
  EXPECT_FALSE(parse_method("exact"));
  EXPECT_EQ(to_string(Method::spectral), "spectral");
  EXPECT_EQ(to_string(PointStatus::step_drift), "step-drift");
}

TEST(MakeGrid, ResolvesSubsystemSize) {
  const std::vector<int> sizes{7, 64};
  const std::vector<double> fields{0.5, 1.5};
  const auto grid = make_grid(sizes, 0.5, fields);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[0].m_sub, 4);
  EXPECT_EQ(grid[2].m_sub, 32);
  EXPECT_EQ(grid[3].h, 1.5);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const std::vector<int> sizes{16, 40};
  const auto fields = linspace(0.2, 1.8, 9);
  const auto grid = make_grid(sizes, 0.5, fields);
  SweepSettings settings;
  settings.methods = {Method::analytic, Method::finite_difference, Method::spectral};
  settings.jobs = 1;
  const auto serial = sweep(grid, settings);
  settings.jobs = 4;
  const auto parallel = sweep(grid, settings);
  ASSERT_EQ(serial.size(), parallel.size());
  ASSERT_EQ(serial.size(), grid.size() * 3);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_TRUE(same(serial[i], parallel[i])) << "row " << i;
}

TEST(Sweep, RowsSortedByNThenH) {
  std::vector<GridPoint> grid{{20, 10, 1.4, 0.5}, {10, 5, 0.3, 0.5}, {20, 10, 0.2, 0.5}};
  SweepSettings settings;
  settings.methods = {Method::spectral, Method::finite_difference};
  const auto rows = sweep(grid, settings);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].n, 10);
  EXPECT_EQ(rows[2].h, 0.2);
  EXPECT_EQ(rows[2].method, Method::finite_difference);
  EXPECT_EQ(rows[3].method, Method::spectral);
  EXPECT_EQ(rows[5].h, 1.4);
}

TEST(Sweep, AnalyticFlagsCriticalPoint) {
  const std::vector<int> sizes{32};
  const std::vector<double> fields{1.0};
  const auto grid = make_grid(sizes, 0.5, fields);
  SweepSettings settings;
  settings.methods = {Method::analytic, Method::finite_difference};
  const auto rows = sweep(grid, settings);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, PointStatus::ok);
  EXPECT_EQ(rows[1].method, Method::analytic);
  EXPECT_EQ(rows[1].status, PointStatus::singular);
  EXPECT_TRUE(std::isnan(rows[1].chi_r));
}

TEST(Sweep, AnalyticUnsupportedOnIsotropicLine) {
  std::vector<GridPoint> grid{{16, 8, 1.5, 0.5}};
  SweepSettings settings;
  settings.gamma = 1.0;
  settings.methods = {Method::analytic};
  EXPECT_EQ(sweep(grid, settings).at(0).status, PointStatus::unsupported);
}

TEST(Sweep, InvariantsHoldOnMixedGrid) {
  const std::vector<int> sizes{24, 64};
  const auto fields = linspace(0.0, 2.0, 21);
  SweepSettings settings;
  settings.methods = {Method::finite_difference, Method::spectral};
  for (const auto& row : sweep(make_grid(sizes, 0.5, fields), settings)) {
    EXPECT_TRUE(row.computed()) << row.message;
    EXPECT_TRUE(row.satisfies_invariants()) << "h=" << row.h << " n=" << row.n << " " << row.message;
    EXPECT_LE(row.chi_r, row.chi_g * (1.0 + 1e-6));
  }
}

TEST(Sweep, ForwardStencilAtZeroField) {
  std::vector<GridPoint> grid{{30, 15, 0.0, 0.5}};
  SweepSettings settings;
  settings.methods = {Method::finite_difference, Method::spectral};
  const auto rows = sweep(grid, settings);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.computed());
    EXPECT_TRUE(std::isfinite(row.chi_r));
  }
}

TEST(Sweep, ExplicitDeltaSkipsProbe) {
  std::vector<GridPoint> grid{{64, 32, 1.0, 0.5}};
  SweepSettings settings;
  settings.delta = 1e-2;
  const auto rows = sweep(grid, settings);
  EXPECT_EQ(rows.at(0).delta, 1e-2);
  EXPECT_EQ(rows.at(0).status, PointStatus::ok);
}

TEST(Sweep, ErrorsCarryContextOrAreRecorded) {
  // gamma outside [0, 1] makes every model construction throw.
  std::vector<GridPoint> grid{{16, 8, 0.5, 0.5}, {16, 8, 0.7, 0.5}};
  SweepSettings settings;
  settings.gamma = 1.5;
  try {
    sweep(grid, settings);
    FAIL() << "expected an exception";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("N=16"), std::string::npos);
  }
  settings.skip_errors = true;
  const auto rows = sweep(grid, settings);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) EXPECT_EQ(row.status, PointStatus::failed);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
