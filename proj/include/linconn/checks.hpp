#pragma once

// The invariant suite behind `linconn check`: each check draws seeded random
// inputs, evaluates one identity and records the worst error.

#include <cstdint>
#include <string>
#include <vector>

#include "linconn/transport.hpp"

namespace linconn {

enum class CheckStatus { Pass, Fail, Skip };

const char* to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skip;
  double max_error = 0.0;
  int samples = 0;  // draws that were evaluated
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  bool passed() const;
};

struct CheckOptions {
  int samples = 256;
  std::uint64_t seed = 0;
  /// Tolerance of the cross-formula checks; the others use fixed tolerances.
  double tol = 1e-7;
};

/// Max over components of |a - b| / max(1, |a|, |b|).
double rel_error(const Vec& a, const Vec& b);
double abs_error(const Vec& a, const Vec& b);

Report run_checks(const NonlinearConnection& conn, const CheckOptions& opts);

}  // namespace linconn
