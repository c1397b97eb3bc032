#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace bvdeg {

enum class GapKind { Absolute, Relative };

/// Outcome of one numerical check: two quantities that should agree (or
/// satisfy an inequality), their gap and the tolerance it was judged against.
struct VerificationReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  GapKind gap_kind = GapKind::Relative;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// gap = |lhs - rhs| (absolute) or |lhs - rhs| / |rhs| (relative, absolute
/// when rhs is 0);
/// pass = gap <= tolerance.
VerificationReport compare(std::string check, double lhs, double rhs, double tolerance,
                           GapKind kind = GapKind::Relative);

const char* to_string(GapKind kind);

}  // namespace bvdeg
