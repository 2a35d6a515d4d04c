#pragma once

// Coordinate representations of E, pi*E, TE, T(pi*E) and TTE in a single
// global chart (x^i base, y^A fiber), with the vertical lifts and projections,
// both additions on TE, and the canonical involution of TTE.

#include <cstddef>
#include <optional>
#include <vector>

#include "linconn/expr.hpp"

namespace linconn {

using Vec = std::vector<double>;

/// Point of E: base coordinates x and fiber coordinates y.
struct FiberPoint {
  Vec x;
  Vec y;
};

/// Point (a, b) of pi*E. Both legs share x.
struct PullbackPoint {
  Vec x;
  Vec y;  // leg a
  Vec z;  // leg b

  FiberPoint a() const { return {x, y}; }
  FiberPoint b() const { return {x, z}; }
};

/// Tangent vector to E at `at` with components (dx^i, dy^A).
struct TangentE {
  FiberPoint at;
  Vec dx;
  Vec dy;
};

/// Element of TM written as (point, velocity); the image T(pi)(w).
struct BaseTangent {
  Vec x;
  Vec dx;
};

/// Tangent vector (w, w2) to pi*E at `at`, with T(pi)(w) = T(pi)(w2).
struct TangentPullback {
  PullbackPoint at;
  TangentE w;
  TangentE w2;
};

/// Point of TTE: a base point (x, y, dx, dy) of TE and its variation
/// (delta_x, delta_y, delta_dx, delta_dy).
struct SecondTangent {
  Vec x, y, dx, dy;
  Vec delta_x, delta_y, delta_dx, delta_dy;
};

/// The chart: base dimension n, fiber rank k and an optional open domain
/// (a predicate in x, y) on which connections are defined.
class BundleSpace {
 public:
  BundleSpace(std::size_t n, std::size_t k, std::optional<Predicate> domain = std::nullopt);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  const std::optional<Predicate>& domain() const { return domain_; }

  bool contains(const Vec& x, const Vec& y) const;
  bool contains(const FiberPoint& a) const { return contains(a.x, a.y); }
  /// Throws OutOfDomain (or DimensionError) unless `a` is a valid in-domain point.
  void require(const FiberPoint& a) const;
  void check_dims(const FiberPoint& a) const;

 private:
  std::size_t n_;
  std::size_t k_;
  std::optional<Predicate> domain_;
};

inline constexpr double kBaseTolerance = 1e-12;

/// Max-norm closeness used for base points that come from separate computations.
bool same_point(const Vec& a, const Vec& b, double tol = kBaseTolerance);

BaseTangent tangent_projection(const TangentE& w);  // T(pi)
TangentE zero_tangent(const FiberPoint& a, std::size_t n);

TangentE vertical_lift(const FiberPoint& a, const Vec& b);
/// nu_pi. Throws NotVertical when any dx component is nonzero.
Vec vertical_project(const TangentE& w);

// Vector bundle tau_E : TE -> E (vectors at the same point).
TangentE add(const TangentE& v, const TangentE& w);
TangentE scale(double lambda, const TangentE& v);
TangentE subtract(const TangentE& v, const TangentE& w);

// Vector bundle T(pi) : TE -> TM (vectors with the same T(pi) image).
TangentE tau_add(const TangentE& v, const TangentE& w);
TangentE tau_scale(double lambda, const TangentE& v);
/// Zero of the T(pi)-fiber over (x, dx).
TangentE tau_zero(const BaseTangent& base, std::size_t k);

// Structure maps of TTE.
TangentE tau_TE(const SecondTangent& V);   // (x, y, dx, dy)
TangentE T_tau_E(const SecondTangent& V);  // (x, y, delta_x, delta_y)
bool is_tpi_vertical(const SecondTangent& V);
bool is_tangent_to_vertical(const SecondTangent& V);

// tau_TE : TTE -> TE (variations over the same point of TE).
SecondTangent add(const SecondTangent& V, const SecondTangent& W);
SecondTangent scale(double lambda, const SecondTangent& V);
// T(tau_E) : TTE -> TE, the tangent of the tau_E operations.
SecondTangent tau_add(const SecondTangent& V, const SecondTangent& W);
SecondTangent tau_scale(double lambda, const SecondTangent& V);

/// Swaps (dx, dy) with (delta_x, delta_y).
SecondTangent canonical_involution(const SecondTangent& V);

/// Vertical lift of T(pi): d/ds (v +_tau s ._tau w); requires T(pi)(v) = T(pi)(w).
SecondTangent vertical_lift_tpi(const TangentE& v, const TangentE& w);
/// Inverse of vertical_lift_tpi on Ver(T pi). Throws NotTpiVertical.
TangentE vertical_project_tpi(const SecondTangent& V);
/// Vertical lift of tau_E: d/ds (v + s w); requires tau_E(v) = tau_E(w).
SecondTangent vertical_lift_tauE(const TangentE& v, const TangentE& w);
/// Inverse of vertical_lift_tauE on Ver(tau_E). Throws NotVertical.
TangentE vertical_project_tauE(const SecondTangent& V);

/// Tangent map of the vertical lift pi*E -> TE.
SecondTangent tangent_vertical_lift(const TangentPullback& t);
/// Tangent map of nu_pi on T Ver(pi). Throws NotVertical off T Ver(pi).
TangentE tangent_vertical_project(const SecondTangent& V);

}  // namespace linconn
