// bvdeg: gallery emission, verification suites and report merging.
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bvdeg/errors.hpp"
#include "bvdeg/field_io.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/logging.hpp"
#include "bvdeg/parallel.hpp"
#include "bvdeg/suites.hpp"

namespace {

using nlohmann::json;

constexpr int kUsage = 2;

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    if constexpr (std::is_integral_v<T>) {
      const long long v = std::stoll(item, &used);
      if (v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } else {
      out.push_back(static_cast<T>(std::stod(item, &used)));
    }
    if (used != item.size()) throw std::invalid_argument(item);
  }
  if (out.empty()) throw std::invalid_argument(text);
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bvdeg::RangeError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw bvdeg::ParseError(path + ": " + e.what(), e.byte);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bvdeg::RangeError("cannot write " + path);
  out << text;
  if (!out) throw bvdeg::RangeError("write failed for " + path);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct GalleryFlags {
  std::optional<int> level, k;
  std::optional<double> p, s;
  std::string matrix;

  void add(CLI::App& cmd) {
    cmd.add_option("--level", level, "Cantor approximation level (default 6)");
    cmd.add_option("--k", k, "zpow winding factor (default 2)");
    cmd.add_option("--p", p, "radial_stretch exponent (default 2)");
    cmd.add_option("--s", s, "shear2d slope (default 0.5)");
    cmd.add_option("--matrix", matrix, "linear map entries, row-major, comma separated");
  }
  bool any() const { return level || k || p || s || !matrix.empty(); }
  void apply(bvdeg::GallerySpec& spec) const {
    if (level) spec.level = *level;
    if (k) spec.k = *k;
    if (p) spec.p = *p;
    if (s) spec.s = *s;
    if (!matrix.empty()) spec.matrix = parse_list<double>(matrix);
  }
};

struct VerifyFlags {
  std::string suite, config_path, map, grid, image_grid, levels, json_path, csv_path;
  std::optional<int> slices, raster, depth, cases, search_resolution;
  std::optional<double> radius, tol;
  std::optional<std::uint64_t> seed;
  bool no_timestamp = false;
  GalleryFlags gallery;
};

bvdeg::SuiteConfig build_config(const VerifyFlags& f) {
  bvdeg::SuiteConfig c;
  c.suite = f.suite;
  if (!f.config_path.empty()) {
    c = bvdeg::SuiteConfig::from_json(read_json(f.config_path), c);
    c.suite = f.suite;
  }
  if (!f.map.empty()) {
    if (f.map.rfind("gallery:", 0) == 0) {
      bvdeg::GallerySpec spec;
      spec.name = f.map.substr(8);
      c.map = spec;
      c.map_path.clear();
    } else {
      c.map.reset();
      c.map_path = f.map;
    }
  }
  if (f.gallery.any()) {
    if (!c.map_path.empty()) throw bvdeg::RangeError("gallery parameters given for a field file");
    if (!c.map) {
      c.map = bvdeg::resolve_defaults(c).map;
      if (!c.map) {
        // Suites without a default map take the parameters for the planar Cantor pair.
        if (f.gallery.level) c.levels = {*f.gallery.level};
        else throw bvdeg::RangeError("gallery parameters need --map");
      }
    }
    if (c.map) f.gallery.apply(*c.map);
  }
  if (!f.grid.empty()) c.grid = parse_list<std::size_t>(f.grid);
  if (!f.image_grid.empty()) c.image_grid = parse_list<std::size_t>(f.image_grid);
  if (!f.levels.empty()) c.levels = parse_list<int>(f.levels);
  if (f.slices) c.slices = *f.slices;
  if (f.raster) c.raster = *f.raster;
  if (f.depth) c.depth = *f.depth;
  if (f.cases) c.cases = *f.cases;
  if (f.search_resolution) c.search_resolution = *f.search_resolution;
  if (f.radius) c.radius = *f.radius;
  if (f.tol) c.tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (c.tol < 0.0 || c.radius < 0.0 || c.slices < 0 || c.raster < 0 || c.depth < 0 || c.cases < 0) {
    throw bvdeg::RangeError("numeric parameters must be positive");
  }
  return c;
}

int run_verify(const VerifyFlags& f) {
  bvdeg::SuiteConfig config;
  try {
    config = bvdeg::resolve_defaults(build_config(f));
  } catch (const std::exception& e) {
    std::cerr << "bvdeg: " << e.what() << '\n';
    return kUsage;
  }
  bvdeg::SuiteResult result;
  try {
    result = bvdeg::run_suite(config);
  } catch (const bvdeg::RangeError& e) {
    std::cerr << "bvdeg: " << e.what() << '\n';
    return kUsage;
  } catch (const bvdeg::Error& e) {
    std::cerr << "bvdeg: numerical error: " << e.what() << '\n';
    return 3;
  }
  const std::string json_path = f.json_path.empty() ? config.suite + ".json" : f.json_path;
  const std::string csv_path = f.csv_path.empty() ? config.suite + ".csv" : f.csv_path;
  try {
    write_text(json_path, result.report(f.no_timestamp ? "" : utc_timestamp()).dump(2) + "\n");
    write_text(csv_path, result.csv());
  } catch (const bvdeg::Error& e) {
    std::cerr << "bvdeg: " << e.what() << '\n';
    return kUsage;
  }
  for (const auto& r : result.rows) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.case_id << "  lhs=" << r.lhs << " rhs=" << r.rhs
              << " gap=" << r.gap << " tol=" << r.tol;
    if (!r.error.empty()) std::cout << "  error: " << r.error;
    std::cout << '\n';
  }
  std::cout << config.suite << ": " << (result.pass() ? "pass" : "FAIL") << " (" << json_path << ", " << csv_path
            << ")\n";
  return result.exit_code();
}

int run_emit(const std::string& name, const GalleryFlags& g, const std::string& shape, const std::string& out) {
  try {
    bvdeg::GallerySpec spec;
    spec.name = name;
    g.apply(spec);
    const auto map = bvdeg::make_gallery(spec);
    std::vector<std::size_t> dims =
        shape.empty() ? std::vector<std::size_t>(static_cast<std::size_t>(map.dim_in), 65)
                      : parse_list<std::size_t>(shape);
    bvdeg::save_field(out, bvdeg::sample_gallery(map, dims));
    std::cout << "wrote " << out << ".json, " << out << ".f64\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bvdeg: bad list '" << e.what() << "'\n";
  } catch (const bvdeg::Error& e) {
    std::cerr << "bvdeg: " << e.what() << '\n';
  }
  return kUsage;
}

int run_merge(const std::vector<std::string>& files, const std::string& out) {
  std::vector<json> reports;
  try {
    for (const auto& path : files) reports.push_back(read_json(path));
    const json summary = bvdeg::merge_reports(reports);
    write_text(out, summary.dump(2) + "\n");
    std::cout << "merged " << files.size() << " reports: " << (summary["pass"].get<bool>() ? "pass" : "FAIL")
              << '\n';
    return summary["pass"].get<bool>() ? 0 : 1;
  } catch (const json::exception& e) {
    std::cerr << "bvdeg: malformed report: " << e.what() << '\n';
  } catch (const bvdeg::Error& e) {
    std::cerr << "bvdeg: " << e.what() << '\n';
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  bvdeg::log::configure_from_env();
  bvdeg::configure_workers_from_env();

  CLI::App app{"Numerical checks of degree, Jacobian and adjugate identities for BV maps"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "worker threads (default: BVDEG_THREADS, else hardware)");

  auto* gallery = app.add_subcommand("gallery", "analytic map gallery");
  gallery->require_subcommand(1);
  auto* emit = gallery->add_subcommand("emit", "sample a gallery map and write a field file");
  std::string emit_name, emit_shape, emit_out;
  GalleryFlags emit_flags;
  emit->add_option("--name", emit_name, "gallery map name")->required();
  emit->add_option("--shape", emit_shape, "grid shape, comma separated (default 65 per axis)");
  emit->add_option("--out", emit_out, "output stem; writes <out>.json and <out>.f64")->required();
  emit_flags.add(*emit);

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  VerifyFlags vf;
  verify->add_option("suite", vf.suite, "suite name")->required()->check(CLI::IsMember(bvdeg::suite_names()));
  verify->add_option("--config", vf.config_path, "JSON config (same schema as a report's config block)");
  verify->add_option("--map", vf.map, "gallery:<name> or a field descriptor path");
  vf.gallery.add(*verify);
  verify->add_option("--grid", vf.grid, "sample grid shape, comma separated (suite default)");
  verify->add_option("--image-grid", vf.image_grid, "inverse sampling grid (regularity, default 129,65,65)");
  verify->add_option("--slices", vf.slices, "slices per axis (adjugate 33, regularity/stability 17)");
  verify->add_option("--raster", vf.raster, "degree raster per side (degree-identity 512, boundary 128, else 32)");
  verify->add_option("--depth", vf.depth, "dyadic depth (default 3)");
  verify->add_option("--radius", vf.radius, "disk radius (degree-identity, default 0.8)");
  verify->add_option("--tol", vf.tol, "tolerance (suite default)");
  verify->add_option("--cases,--random-fields", vf.cases,
                     "random cases: fields (coarea 100, bvl 50), pairs (lemma61 200), decompositions (axioms 50), circles (boundary 10)");
  verify->add_option("--levels", vf.levels, "Cantor levels, comma separated (stability 2..8, boundary 4)");
  verify->add_option("--search-resolution", vf.search_resolution, "preimage search resolution (default 256)");
  verify->add_option("--seed", vf.seed, "random seed (default 0)");
  verify->add_option("--json", vf.json_path, "report path (default <suite>.json)");
  verify->add_option("--csv", vf.csv_path, "per-case CSV path (default <suite>.csv)");
  verify->add_flag("--no-timestamp", vf.no_timestamp, "omit the timestamp field");

  auto* report = app.add_subcommand("report", "report utilities");
  report->require_subcommand(1);
  auto* merge = report->add_subcommand("merge", "summarise several reports");
  std::vector<std::string> merge_files;
  std::string merge_out = "summary.json";
  merge->add_option("files", merge_files, "report files")->required();
  merge->add_option("--out", merge_out, "summary path (default summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (threads) {
    if (*threads == 0) {
      std::cerr << "bvdeg: --threads must be positive\n";
      return kUsage;
    }
    bvdeg::set_worker_count(*threads);
  }

  if (*emit) return run_emit(emit_name, emit_flags, emit_shape, emit_out);
  if (*verify) return run_verify(vf);
  if (*merge) return run_merge(merge_files, merge_out);
  return kUsage;
}
