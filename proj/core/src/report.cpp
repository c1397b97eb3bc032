#include "bvdeg/report.hpp"

#include <cmath>

namespace bvdeg {

const char* to_string(GapKind kind) {
  return kind == GapKind::Absolute ? "absolute" : "relative";
}

VerificationReport compare(std::string check, double lhs, double rhs, double tolerance,
                           GapKind kind) {
  VerificationReport r;
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.gap_kind = kind;
  r.tolerance = tolerance;
  const double diff = std::abs(lhs - rhs);
  // A zero reference has no scale; fall back to the absolute difference.
  r.gap = (kind == GapKind::Absolute || rhs == 0.0) ? diff : diff / std::abs(rhs);
  r.pass = std::isfinite(r.gap) && r.gap <= tolerance;
  return r;
}

nlohmann::json VerificationReport::to_json() const {
  return {{"check", check},         {"lhs", lhs},   {"rhs", rhs},
          {"gap", gap},             {"gap_kind", to_string(gap_kind)},
          {"tolerance", tolerance}, {"pass", pass}, {"details", details}};
}

}  // namespace bvdeg
