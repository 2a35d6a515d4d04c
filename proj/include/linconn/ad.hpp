#pragma once

// Directional derivatives of expressions via dual numbers.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "linconn/dual.hpp"
#include "linconn/expr.hpp"

namespace linconn {

/// Name-indexed point or direction, e.g. {{"x1", 2.0}, {"y1", 5.0}}.
using NamedValues = std::map<std::string, double>;

struct ValueAndDerivative {
  double value;
  double deriv;
};

/// Value of `e` at `point` and d/ds e(point + s * seeds) at s = 0.
/// Names present only in `seeds` start from 0.
ValueAndDerivative directional(const Expr& e, const NamedValues& point, const NamedValues& seeds);

/// d^2/ds dt e(point + s * u + t * v) at (0, 0).
double mixed_second(const Expr& e, const NamedValues& point, const NamedValues& u, const NamedValues& v);

/// Value and every directional derivative along `dirs` in one Dual1 pass.
struct ValueAndGradient {
  double value;
  std::vector<double> derivs;
};
ValueAndGradient directional_many(const Expr& e, const NamedValues& point, const std::vector<NamedValues>& dirs);

}  // namespace linconn
