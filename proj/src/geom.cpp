#include "linconn/geom.hpp"

#include <cmath>
#include <string>

namespace linconn {

namespace {

void check_len(const Vec& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + " components, got " +
                         std::to_string(v.size()));
}

Vec plus(const Vec& a, const Vec& b) {
  check_len(b, a.size(), "vector sum");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec times(double s, const Vec& a) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

bool all_zero(const Vec& v) {
  for (double e : v)
    if (e != 0.0) return false;
  return true;
}

void require_same(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size() || !same_point(a, b)) throw BaseMismatch(what);
}

}  // namespace

BundleSpace::BundleSpace(std::size_t n, std::size_t k, std::optional<Predicate> domain)
    : n_(n), k_(k), domain_(std::move(domain)) {
  if (n_ == 0 || k_ == 0) throw DimensionError("bundle dimensions must be positive");
  if (domain_ && domain_->references(VarKind::Z)) throw SpecError("z not allowed in domain");
  if (domain_ && domain_->references(VarKind::T)) throw SpecError("t not allowed in domain");
}

void BundleSpace::check_dims(const FiberPoint& a) const {
  check_len(a.x, n_, "base point");
  check_len(a.y, k_, "fiber point");
}

bool BundleSpace::contains(const Vec& x, const Vec& y) const {
  if (x.size() != n_ || y.size() != k_) return false;
  if (!domain_) return true;
  try {
    return holds(*domain_, make_env<double>(x, y));
  } catch (const DomainError&) {
    return false;
  }
}

void BundleSpace::require(const FiberPoint& a) const {
  check_dims(a);
  if (!contains(a)) throw OutOfDomain("point outside the connection domain");
}

bool same_point(const Vec& a, const Vec& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

BaseTangent tangent_projection(const TangentE& w) { return {w.at.x, w.dx}; }

TangentE zero_tangent(const FiberPoint& a, std::size_t n) { return {a, Vec(n, 0.0), Vec(a.y.size(), 0.0)}; }

TangentE vertical_lift(const FiberPoint& a, const Vec& b) {
  check_len(b, a.y.size(), "vertical lift");
  return {a, Vec(a.x.size(), 0.0), b};
}

Vec vertical_project(const TangentE& w) {
  if (!all_zero(w.dx)) throw NotVertical("tangent vector has a nonzero base component");
  return w.dy;
}

TangentE add(const TangentE& v, const TangentE& w) {
  require_same(v.at.x, w.at.x, "sum of tangent vectors at different points");
  require_same(v.at.y, w.at.y, "sum of tangent vectors at different points");
  return {v.at, plus(v.dx, w.dx), plus(v.dy, w.dy)};
}

TangentE scale(double lambda, const TangentE& v) { return {v.at, times(lambda, v.dx), times(lambda, v.dy)}; }

TangentE subtract(const TangentE& v, const TangentE& w) { return add(v, scale(-1.0, w)); }

TangentE tau_add(const TangentE& v, const TangentE& w) {
  require_same(v.at.x, w.at.x, "tau-sum over different base points");
  require_same(v.dx, w.dx, "tau-sum over different base velocities");
  return {{v.at.x, plus(v.at.y, w.at.y)}, v.dx, plus(v.dy, w.dy)};
}

TangentE tau_scale(double lambda, const TangentE& v) {
  return {{v.at.x, times(lambda, v.at.y)}, v.dx, times(lambda, v.dy)};
}

TangentE tau_zero(const BaseTangent& base, std::size_t k) {
  return {{base.x, Vec(k, 0.0)}, base.dx, Vec(k, 0.0)};
}

TangentE tau_TE(const SecondTangent& V) { return {{V.x, V.y}, V.dx, V.dy}; }
TangentE T_tau_E(const SecondTangent& V) { return {{V.x, V.y}, V.delta_x, V.delta_y}; }

bool is_tpi_vertical(const SecondTangent& V) { return all_zero(V.delta_x) && all_zero(V.delta_dx); }
bool is_tangent_to_vertical(const SecondTangent& V) { return all_zero(V.dx) && all_zero(V.delta_dx); }

SecondTangent add(const SecondTangent& V, const SecondTangent& W) {
  require_same(V.x, W.x, "sum over different points of TE");
  require_same(V.y, W.y, "sum over different points of TE");
  require_same(V.dx, W.dx, "sum over different points of TE");
  require_same(V.dy, W.dy, "sum over different points of TE");
  return {V.x,
          V.y,
          V.dx,
          V.dy,
          plus(V.delta_x, W.delta_x),
          plus(V.delta_y, W.delta_y),
          plus(V.delta_dx, W.delta_dx),
          plus(V.delta_dy, W.delta_dy)};
}

SecondTangent scale(double lambda, const SecondTangent& V) {
  return {V.x,
          V.y,
          V.dx,
          V.dy,
          times(lambda, V.delta_x),
          times(lambda, V.delta_y),
          times(lambda, V.delta_dx),
          times(lambda, V.delta_dy)};
}

SecondTangent tau_add(const SecondTangent& V, const SecondTangent& W) {
  require_same(V.x, W.x, "tau-sum over different points of TE");
  require_same(V.y, W.y, "tau-sum over different points of TE");
  require_same(V.delta_x, W.delta_x, "tau-sum over different points of TE");
  require_same(V.delta_y, W.delta_y, "tau-sum over different points of TE");
  return {V.x,       V.y,       plus(V.dx, W.dx), plus(V.dy, W.dy), V.delta_x, V.delta_y, plus(V.delta_dx, W.delta_dx),
          plus(V.delta_dy, W.delta_dy)};
}

SecondTangent tau_scale(double lambda, const SecondTangent& V) {
  return {V.x,       V.y,       times(lambda, V.dx),       times(lambda, V.dy),
          V.delta_x, V.delta_y, times(lambda, V.delta_dx), times(lambda, V.delta_dy)};
}

SecondTangent canonical_involution(const SecondTangent& V) {
  return {V.x, V.y, V.delta_x, V.delta_y, V.dx, V.dy, V.delta_dx, V.delta_dy};
}

SecondTangent vertical_lift_tpi(const TangentE& v, const TangentE& w) {
  require_same(v.at.x, w.at.x, "vertical lift over different base points");
  require_same(v.dx, w.dx, "vertical lift over different base velocities");
  return {v.at.x, v.at.y, v.dx, v.dy, Vec(v.dx.size(), 0.0), w.at.y, Vec(v.dx.size(), 0.0), w.dy};
}

TangentE vertical_project_tpi(const SecondTangent& V) {
  if (!is_tpi_vertical(V)) throw NotTpiVertical("second tangent vector is not T(pi)-vertical");
  return {{V.x, V.delta_y}, V.dx, V.delta_dy};
}

SecondTangent vertical_lift_tauE(const TangentE& v, const TangentE& w) {
  require_same(v.at.x, w.at.x, "vertical lift at different points");
  require_same(v.at.y, w.at.y, "vertical lift at different points");
  return {v.at.x, v.at.y, v.dx, v.dy, Vec(v.dx.size(), 0.0), Vec(v.dy.size(), 0.0), w.dx, w.dy};
}

TangentE vertical_project_tauE(const SecondTangent& V) {
  if (!all_zero(V.delta_x) || !all_zero(V.delta_y)) throw NotVertical("second tangent vector is not tau_E-vertical");
  return {{V.x, V.y}, V.delta_dx, V.delta_dy};
}

SecondTangent tangent_vertical_lift(const TangentPullback& t) {
  require_same(t.w.dx, t.w2.dx, "tangent to pi*E with mismatched base velocities");
  const auto& p = t.at;
  return {p.x, p.y, Vec(p.x.size(), 0.0), p.z, t.w.dx, t.w.dy, Vec(p.x.size(), 0.0), t.w2.dy};
}

TangentE tangent_vertical_project(const SecondTangent& V) {
  if (!is_tangent_to_vertical(V)) throw NotVertical("second tangent vector is not tangent to Ver(pi)");
  return {{V.x, V.dy}, V.delta_x, V.delta_dy};
}

}  // namespace linconn
