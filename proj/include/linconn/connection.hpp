#pragma once

// Nonlinear (Ehresmann) connection on E given by coefficients Gamma^A_i(x, y).
//
// Sign convention: the horizontal lift of v is (v, -Gamma(x, y) v), so the
// connector is kappa(w)^A = w^A + Gamma^A_i w^i and kappa kills horizontals.

#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "linconn/dual.hpp"
#include "linconn/expr.hpp"
#include "linconn/geom.hpp"

namespace linconn {

/// Dense row-major matrix of reals.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

class NonlinearConnection {
 public:
  /// `gamma[A][i]` is Gamma^A_i, k rows of n expressions in x and y.
  NonlinearConnection(BundleSpace space, std::vector<std::vector<Expr>> gamma);

  const BundleSpace& space() const { return space_; }
  std::size_t n() const { return space_.n(); }
  std::size_t k() const { return space_.k(); }
  const Expr& gamma(std::size_t A, std::size_t i) const { return gamma_[A * space_.n() + i]; }
  /// Row-major k x n.
  const std::vector<Expr>& gamma_flat() const { return gamma_; }

 private:
  BundleSpace space_;
  std::vector<Expr> gamma_;
};

/// Vector field W on E with components (W^i, W^A), expressions in x and y.
struct FieldOnE {
  std::vector<Expr> comp_x;
  std::vector<Expr> comp_y;
  /// Set by certify_projectable.
  std::optional<bool> projectable;
};

/// Section of E along pi: sigma^A(x, y).
struct SectionAlongPi {
  std::vector<Expr> comp;
};

/// Y = X^h + eta^v with X a base field and eta a basic section.
class HorBasicField {
 public:
  /// Throws Error if any component references a fiber variable.
  HorBasicField(std::vector<Expr> X, std::vector<Expr> eta);
  const std::vector<Expr>& X() const { return X_; }
  const std::vector<Expr>& eta() const { return eta_; }

 private:
  std::vector<Expr> X_;
  std::vector<Expr> eta_;
};

inline constexpr double kProjectabilityTolerance = 1e-9;
inline constexpr int kProjectabilitySamples = 32;

/// Decides projectability: exact if no comp_x mentions y, otherwise by
/// probing y-derivatives at seeded random in-domain points. Records the
/// verdict in `field.projectable`.
bool certify_projectable(FieldOnE& field, const BundleSpace& space, std::uint64_t seed = 0);

// Constructions by expression composition.
FieldOnE horizontal_lift_field(const NonlinearConnection& conn, const Vec& v);  // constant base field
FieldOnE horizontal_part(const NonlinearConnection& conn, const FieldOnE& W);   // P_h(W)
FieldOnE vertical_lift_field(const SectionAlongPi& sigma, std::size_t n);        // sigma^v
FieldOnE to_field(const NonlinearConnection& conn, const HorBasicField& Y);     // X^h + eta^v
SectionAlongPi connector_section(const NonlinearConnection& conn, const FieldOnE& W);  // kappa(W)
SectionAlongPi as_section(const std::vector<Expr>& basic);

Matrix gamma_at(const NonlinearConnection& conn, const FiberPoint& a);
TangentE horizontal_lift(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v);
Vec connector(const NonlinearConnection& conn, const TangentE& w);
TangentE project_h(const NonlinearConnection& conn, const TangentE& w);
TangentE project_v(const NonlinearConnection& conn, const TangentE& w);

TangentE eval_field(const FieldOnE& W, const FiberPoint& p);
Vec eval_section(const SectionAlongPi& sigma, const FiberPoint& p);
/// Coordinate Lie bracket [W1, W2] at p.
TangentE bracket(const FieldOnE& W1, const FieldOnE& W2, const FiberPoint& p);
/// R(v1, v2) = kappa([v1^h, v2^h]) for constant base fields.
Vec curvature_R(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v1, const Vec& v2);

namespace kernel {

// Scalar-generic building blocks. Vectors of S hold coordinates; no domain
// checks happen here.

template <class S>
struct FieldValue {
  std::vector<S> x;
  std::vector<S> y;
};

template <class S>
std::vector<S> eval_exprs(const std::vector<Expr>& es, const std::vector<S>& x, const std::vector<S>& y) {
  return eval_all<S>(es, make_env<S>(x, y));
}

/// Gamma(x, y) v, length k.
template <class S>
std::vector<S> gamma_contract(const NonlinearConnection& conn, const std::vector<S>& x, const std::vector<S>& y,
                              const std::vector<S>& v) {
  auto g = eval_exprs(conn.gamma_flat(), x, y);
  std::vector<S> out(conn.k(), S(0.0));
  for (std::size_t A = 0; A < conn.k(); ++A)
    for (std::size_t i = 0; i < conn.n(); ++i) out[A] += g[A * conn.n() + i] * v[i];
  return out;
}

/// Gamma^A_iB(x, y) z^B v^i, the fiber derivative of Gamma(x, .) v along z.
template <class S>
std::vector<S> gamma_fiber_contract(const NonlinearConnection& conn, const std::vector<S>& x,
                                    const std::vector<S>& y, const std::vector<S>& z, const std::vector<S>& v) {
  auto moved = gamma_contract<Dual<S>>(conn, lift(x), seed(y, z), lift(v));
  return tangents(moved);
}

template <class S>
std::vector<S> connector(const NonlinearConnection& conn, const std::vector<S>& x, const std::vector<S>& y,
                         const std::vector<S>& dx, const std::vector<S>& dy) {
  auto out = gamma_contract(conn, x, y, dx);
  for (std::size_t A = 0; A < out.size(); ++A) out[A] += dy[A];
  return out;
}

/// Fiber components of the horizontal lift of v: -Gamma(x, y) v.
template <class S>
std::vector<S> horizontal_dy(const NonlinearConnection& conn, const std::vector<S>& x, const std::vector<S>& y,
                             const std::vector<S>& v) {
  auto out = gamma_contract(conn, x, y, v);
  for (auto& e : out) e = -e;
  return out;
}

template <class S>
FieldValue<S> eval_field(const FieldOnE& W, const std::vector<S>& x, const std::vector<S>& y) {
  auto env = make_env<S>(x, y);
  return {eval_all<S>(W.comp_x, env), eval_all<S>(W.comp_y, env)};
}

template <class V>
using scalar_of = typename std::decay_t<V>::value_type;

/// Generic field callable for an expression field.
inline auto field_fn(const FieldOnE& F) {
  return [&F](const auto& x, const auto& y) { return eval_field<scalar_of<decltype(x)>>(F, x, y); };
}

/// [F1, F2] for field callables `f(x, y) -> FieldValue` on any scalar type.
template <class S, class F1, class F2>
FieldValue<S> bracket_of(const F1& f1, const F2& f2, const std::vector<S>& x, const std::vector<S>& y) {
  auto w1 = f1(x, y);
  auto w2 = f2(x, y);
  auto m2 = f2(seed(x, w1.x), seed(y, w1.y));
  auto m1 = f1(seed(x, w2.x), seed(y, w2.y));
  FieldValue<S> out{tangents(m2.x), tangents(m2.y)};
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] -= m1.x[i].eps;
  for (std::size_t A = 0; A < out.y.size(); ++A) out.y[A] -= m1.y[A].eps;
  return out;
}

template <class S>
FieldValue<S> bracket(const FieldOnE& W1, const FieldOnE& W2, const std::vector<S>& x, const std::vector<S>& y) {
  return bracket_of(field_fn(W1), field_fn(W2), x, y);
}

/// kappa([v1^h, v2^h]) for constant base vectors v1, v2, assembled from the
/// coordinate pairs i < j so that antisymmetry (and R = 0 for n = 1) is exact.
template <class S>
std::vector<S> curvature_R(const NonlinearConnection& conn, const std::vector<S>& x, const std::vector<S>& y,
                           const std::vector<S>& v1, const std::vector<S>& v2) {
  std::size_t n = conn.n();
  std::vector<S> out(conn.k(), S(0.0));
  // Derivative of -Gamma(.) e_j along the horizontal lift of e_i.
  auto along = [&](std::size_t i, std::size_t j) {
    std::vector<S> ei(n, S(0.0)), ej(n, S(0.0));
    ei[i] = S(1.0);
    ej[j] = S(1.0);
    auto h = horizontal_dy(conn, x, y, ei);
    return tangents(horizontal_dy<Dual<S>>(conn, seed(x, ei), seed(y, h), lift(ej)));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      S c = v1[i] * v2[j] - v1[j] * v2[i];
      auto a = along(i, j);
      auto b = along(j, i);
      for (std::size_t A = 0; A < out.size(); ++A) out[A] += c * (a[A] - b[A]);
    }
  return out;  // the bracket has no base component, so kappa is its fiber part
}

}  // namespace kernel

}  // namespace linconn
