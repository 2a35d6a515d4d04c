#pragma once

// Seeded random inputs for invariant checks: points, vectors, and low-degree
// polynomial fields and sections built as expressions.

#include <cstdint>
#include <random>
#include <vector>

#include "linconn/connection.hpp"

namespace linconn {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed, double box = 1.0) : rng_(seed), box_(box) {}

  double uniform() { return std::uniform_real_distribution<double>(-box_, box_)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Vec vec(std::size_t n);

  /// Uniform point of the box that satisfies the domain. Throws OutOfDomain
  /// after `max_attempts` rejections.
  FiberPoint point(const BundleSpace& space, int max_attempts = 1000);

  /// Random polynomial of total degree <= 2 in the first `nx` x-variables and,
  /// when `with_y`, the first `ny` y-variables.
  Expr polynomial(std::size_t nx, std::size_t ny, bool with_y);

  /// X and eta polynomial in x.
  HorBasicField hor_basic(const BundleSpace& space);
  /// Components polynomial in x and y.
  SectionAlongPi section(const BundleSpace& space);
  /// Components polynomial in x only.
  SectionAlongPi basic_section(const BundleSpace& space);
  /// Projectable field: comp_x in x only, comp_y in x and y.
  FieldOnE projectable_field(const BundleSpace& space);
  /// Arbitrary polynomial field on E.
  FieldOnE field(const BundleSpace& space);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  double box_;
};

}  // namespace linconn
