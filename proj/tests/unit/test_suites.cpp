#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/field_io.hpp"
#include "bvdeg/suites.hpp"

using namespace bvdeg;

TEST(SuiteConfig, JsonRoundTrip) {
  SuiteConfig c;
  c.suite = "adjugate";
  GallerySpec g;
  g.name = "linear";
  g.matrix = {1, 0, 0, 0, 2, 0, 0, 0, 3};
  c.map = g;
  c.grid = {17, 17, 17};
  c.slices = 9;
  c.tol = 0.05;
  c.seed = 42;
  c.levels = {2, 3};
  const auto back = SuiteConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.map->matrix, g.matrix);
}

TEST(SuiteConfig, PartialJsonOverridesBase) {
  SuiteConfig base;
  base.suite = "coarea";
  base.cases = 7;
  base.tol = 1e-9;
  const auto c = SuiteConfig::from_json({{"cases", 3}}, base);
  EXPECT_EQ(c.suite, "coarea");
  EXPECT_EQ(c.cases, 3);
  EXPECT_EQ(c.tol, 1e-9);
}

TEST(SuiteConfig, DefaultsAreFilledAndKeptWhenGiven) {
  SuiteConfig c;
  c.suite = "adjugate";
  const auto r = resolve_defaults(c);
  ASSERT_TRUE(r.map.has_value());
  EXPECT_EQ(r.map->name, "cantor_shear3d");
  EXPECT_EQ(r.grid.size(), 3u);
  EXPECT_GE(r.slices, 8);
  EXPECT_GT(r.tol, 0.0);
  c.slices = 11;
  c.tol = 0.5;
  const auto kept = resolve_defaults(c);
  EXPECT_EQ(kept.slices, 11);
  EXPECT_EQ(kept.tol, 0.5);
  // Resolution is idempotent, so an emitted config replays exactly.
  EXPECT_EQ(resolve_defaults(r).to_json(), r.to_json());
}

TEST(SuiteConfig, UnknownSuiteThrows) {
  SuiteConfig c;
  c.suite = "nope";
  EXPECT_THROW(run_suite(c), RangeError);
  EXPECT_EQ(suite_names().size(), 10u);
}

TEST(SuiteResult, ExitCodes) {
  SuiteResult r;
  r.suite = "x";
  EXPECT_EQ(r.exit_code(), 1);  // no rows is not a pass
  r.rows.push_back({"a", 1.0, 1.0, 0.0, 0.1, true});
  EXPECT_EQ(r.exit_code(), 0);
  r.rows.push_back({"b", 1.0, 2.0, 0.5, 0.1, false});
  EXPECT_EQ(r.exit_code(), 1);
  r.rows.back().error = "boom";
  EXPECT_EQ(r.exit_code(), 3);
}

TEST(SuiteResult, ReportAndCsv) {
  SuiteResult r;
  r.suite = "coarea";
  r.rows.push_back({"field_0", 0.1, 0.1, 0.0, 1e-10, true, 1.5});
  const auto j = r.report();
  EXPECT_FALSE(j.contains("timestamp"));
  EXPECT_EQ(r.report("2026-01-01T00:00:00Z")["timestamp"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(j["cases"].size(), 1u);
  EXPECT_FALSE(j["cases"][0].contains("runtime_ms"));
  std::istringstream csv(r.csv());
  std::string header, line;
  std::getline(csv, header);
  std::getline(csv, line);
  EXPECT_EQ(header, "suite,case_id,lhs,rhs,gap,tol,pass,runtime_ms");
  EXPECT_EQ(line.rfind("coarea,field_0,0.10000000000000001,", 0), 0u) << line;
  EXPECT_NE(line.find(",true,1.500"), std::string::npos);
}

TEST(SuiteResult, MergeCountsFailures) {
  SuiteResult a, b;
  a.suite = "coarea";
  a.rows.push_back({"x", 0, 0, 0, 1, true});
  b.suite = "bvl";
  b.rows.push_back({"y", 0, 1, 1, 0.1, false});
  b.rows.push_back({"z", 0, 0, 0, 0.1, true});
  const auto m = merge_reports({a.report(), b.report()});
  EXPECT_EQ(m["cases"], 3);
  EXPECT_EQ(m["failed"], 1);
  EXPECT_FALSE(m["pass"].get<bool>());
  EXPECT_EQ(m["suites"][1]["failed"], 1);
  EXPECT_TRUE(merge_reports({a.report()})["pass"].get<bool>());
  EXPECT_FALSE(merge_reports({})["pass"].get<bool>());
}

TEST(RunSuite, SmallCoareaPasses) {
  SuiteConfig c;
  c.suite = "coarea";
  c.cases = 6;
  c.grid = {12};
  c.seed = 3;
  const auto r = run_suite(c);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(run_suite(c).report(), r.report());
}

TEST(RunSuite, NumericalErrorBecomesExitThree) {
  const auto dir = std::filesystem::temp_directory_path() / "bvdeg_suites_fold";
  std::filesystem::create_directories(dir);
  const std::size_t shape[3] = {9, 9, 9};
  const double lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};
  save_field(dir / "fold", SampledMap::sample(Grid::spanning(shape, lo, hi), 3, [](auto x, auto y) {
               y[0] = std::abs(x[0] - 0.5);
               y[1] = x[1];
               y[2] = x[2];
             }));
  SuiteConfig c;
  c.suite = "adjugate";
  c.map_path = (dir / "fold.json").string();
  c.slices = 9;
  const auto r = run_suite(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.rows[0].error.empty());
  EXPECT_EQ(r.exit_code(), 3);
  c.map_path = (dir / "missing.json").string();
  EXPECT_THROW(run_suite(c), ParseError);
}
