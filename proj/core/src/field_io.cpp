#include "bvdeg/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bvdeg/errors.hpp"

namespace bvdeg {
namespace {

using nlohmann::json;

std::filesystem::path with_ext(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

std::filesystem::path descriptor_path(const std::filesystem::path& p) {
  return p.extension() == ".json" ? p : with_ext(p, ".json");
}

void write_doubles(const std::filesystem::path& path, std::span<const double> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (double v : data) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open data file " + path.string(), 0);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() % 8 != 0) {
    throw ParseError("data file size is not a multiple of 8 bytes", raw.size());
  }
  if (raw.size() / 8 != expected) {
    throw ParseError("data holds " + std::to_string(raw.size() / 8) + " values but descriptor implies " +
                         std::to_string(expected),
                     std::min(raw.size(), expected * 8));
  }
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(raw[8 * i + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(values[i])) {
      throw ParseError("non-finite value at index " + std::to_string(i), 8 * i);
    }
  }
  return values;
}

json geometry_json(const Grid& g) {
  json shape = json::array(), spacing = json::array(), origin = json::array();
  for (int d = 0; d < g.dim; ++d) {
    shape.push_back(g.shape[d]);
    spacing.push_back(g.spacing[d]);
    origin.push_back(g.origin[d]);
  }
  return {{"shape", shape}, {"spacing", spacing}, {"origin", origin}};
}

void write_descriptor(const std::filesystem::path& stem, json desc) {
  desc["data"] = with_ext(stem, ".f64").filename().string();
  std::ofstream out(with_ext(stem, ".json"), std::ios::trunc);
  if (!out) throw Error("cannot open descriptor for " + stem.string());
  out << desc.dump(2) << '\n';
}

// Byte offset of `key` in the descriptor text, for error reporting.
std::size_t key_offset(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : pos;
}

}  // namespace

void save_field(const std::filesystem::path& stem, const SampledMap& map) {
  json desc = geometry_json(map.grid());
  desc["kind"] = "map";
  desc["dim_in"] = map.dim_in();
  desc["dim_out"] = map.dim_out();
  write_doubles(with_ext(stem, ".f64"), map.values());
  write_descriptor(stem, std::move(desc));
}

void save_field(const std::filesystem::path& stem, const CellMeasure& measure) {
  json desc = geometry_json(measure.grid());
  desc["kind"] = "measure";
  desc["dim_in"] = measure.grid().dim;
  desc["m"] = measure.components();
  write_doubles(with_ext(stem, ".f64"), measure.weights());
  write_descriptor(stem, std::move(desc));
}

Field load_field(const std::filesystem::path& descriptor) {
  const auto path = descriptor_path(descriptor);
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open descriptor " + path.string(), 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json desc;
  try {
    desc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed descriptor: ") + e.what(), e.byte);
  }

  auto require = [&](const char* key) -> const json& {
    if (!desc.is_object() || !desc.contains(key)) {
      throw ParseError(std::string("descriptor is missing \"") + key + "\"", text.size());
    }
    return desc.at(key);
  };

  const std::string kind = require("kind").is_string() ? require("kind").get<std::string>() : "";
  if (kind != "map" && kind != "measure") {
    throw ParseError("descriptor kind must be \"map\" or \"measure\"", key_offset(text, "kind"));
  }

  std::vector<std::size_t> shape;
  std::vector<double> spacing, origin;
  int dim_in = 0, components = 0;
  try {
    shape = require("shape").get<std::vector<std::size_t>>();
    spacing = require("spacing").get<std::vector<double>>();
    origin = require("origin").get<std::vector<double>>();
    dim_in = require("dim_in").get<int>();
    components = require(kind == "map" ? "dim_out" : "m").get<int>();
  } catch (const json::type_error& e) {
    throw ParseError(std::string("descriptor field has the wrong type: ") + e.what(), 0);
  }
  if (static_cast<int>(shape.size()) != dim_in) {
    throw ParseError("shape rank does not match dim_in", key_offset(text, "shape"));
  }

  Grid grid;
  try {
    grid = Grid::make(shape, spacing, origin);
  } catch (const RangeError& e) {
    throw ParseError(std::string("invalid geometry: ") + e.what(), key_offset(text, "shape"));
  }

  const json& data = require("data");
  if (!data.is_string()) throw ParseError("descriptor \"data\" must be a file name", key_offset(text, "data"));
  const std::string data_name = data.get<std::string>();
  const auto data_path = path.parent_path() / data_name;
  auto values = read_doubles(data_path, grid.size() * static_cast<std::size_t>(components));
  try {
    if (kind == "map") return SampledMap(grid, components, std::move(values));
    return CellMeasure(grid, components, std::move(values));
  } catch (const RangeError& e) {
    throw ParseError(e.what(), 0);
  }
}

SampledMap load_map(const std::filesystem::path& descriptor) {
  auto field = load_field(descriptor);
  if (auto* m = std::get_if<SampledMap>(&field)) return *m;
  throw ParseError("descriptor describes a measure, expected a map", 0);
}

CellMeasure load_measure(const std::filesystem::path& descriptor) {
  auto field = load_field(descriptor);
  if (auto* m = std::get_if<CellMeasure>(&field)) return *m;
  throw ParseError("descriptor describes a map, expected a measure", 0);
}

}  // namespace bvdeg
