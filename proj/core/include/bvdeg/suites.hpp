#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bvdeg/gallery.hpp"

namespace bvdeg {

/// Suites: degree-identity, coarea, bvl, lemma61, adjugate, regularity,
/// stability, areas, axioms, boundary.
const std::vector<std::string>& suite_names();

/// Parameters of one suite run. Zero / empty values mean "suite default";
/// resolve_defaults fills them in so the emitted config replays exactly.
struct SuiteConfig {
  std::string suite;
  std::optional<GallerySpec> map;
  std::string map_path;  // field descriptor, used instead of `map` when set
  std::vector<std::size_t> grid;
  std::vector<std::size_t> image_grid;
  int slices = 0;
  int raster = 0;
  int depth = 0;
  double radius = 0.0;
  double tol = 0.0;
  int cases = 0;  // random fields / pairs / decompositions / circles
  std::uint64_t seed = 0;
  std::vector<int> levels;
  int search_resolution = 0;

  nlohmann::json to_json() const;
  /// Keys present in `j` override the fields of `base`.
  static SuiteConfig from_json(const nlohmann::json& j, SuiteConfig base);
  static SuiteConfig from_json(const nlohmann::json& j) { return from_json(j, SuiteConfig{}); }
};

SuiteConfig resolve_defaults(SuiteConfig config);

struct CaseRow {
  std::string case_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double tol = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  std::string error;  // set when the case raised a numerical error
  nlohmann::json details = nlohmann::json::object();
};

struct SuiteResult {
  std::string suite;
  SuiteConfig config;
  std::vector<CaseRow> rows;
  nlohmann::json details = nlohmann::json::object();

  bool pass() const;
  bool numerical_error() const;
  /// 0 pass, 1 failed assertion, 3 numerical error.
  int exit_code() const;
  /// Deterministic report; `timestamp` is added only when non-empty.
  nlohmann::json report(const std::string& timestamp = "") const;
  /// Columns: suite, case_id, lhs, rhs, gap, tol, pass, runtime_ms.
  std::string csv() const;
};

/// Runs a suite. Numerical errors inside a case become failed rows; unknown
/// suites and bad configurations throw RangeError.
SuiteResult run_suite(const SuiteConfig& config);

/// Summary over several suite reports.
nlohmann::json merge_reports(const std::vector<nlohmann::json>& reports);

}  // namespace bvdeg
