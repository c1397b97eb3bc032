#pragma once

#include <filesystem>
#include <variant>

#include "bvdeg/field.hpp"

namespace bvdeg {

using Field = std::variant<SampledMap, CellMeasure>;

/// Writes `<stem>.json` (descriptor) and `<stem>.f64` (raw little-endian
/// doubles, row-major, components interleaved). `stem` must not carry an
/// extension.
void save_field(const std::filesystem::path& stem, const SampledMap& map);
void save_field(const std::filesystem::path& stem, const CellMeasure& measure);

/// Loads a field from its descriptor path (`<stem>.json`; the extension may be
/// omitted). Throws ParseError with the byte offset of the first problem.
Field load_field(const std::filesystem::path& descriptor);

SampledMap load_map(const std::filesystem::path& descriptor);
CellMeasure load_measure(const std::filesystem::path& descriptor);

}  // namespace bvdeg
