#pragma once

// Linearization of a nonlinear connection: the linear connection on pi*E with
// coefficients Gamma^A_iB = d Gamma^A_i / d y^B, its lambda-family of
// prolongations, the induced covariant derivative and its curvature.

#include <cstdint>
#include <type_traits>
#include <vector>

#include "linconn/connection.hpp"

namespace linconn {

class LinearizedConnection {
 public:
  explicit LinearizedConnection(NonlinearConnection conn) : conn_(std::move(conn)) {}
  const NonlinearConnection& conn() const { return conn_; }
  const BundleSpace& space() const { return conn_.space(); }

 private:
  NonlinearConnection conn_;
};

struct LambdaFamilyMember {
  LinearizedConnection lin;
  double lambda = 0.0;
};

/// k x n x k array indexed (A, i, B).
struct Tensor3 {
  std::size_t k = 0;
  std::size_t n = 0;
  Vec data;

  Tensor3(std::size_t k_, std::size_t n_) : k(k_), n(n_), data(k_ * n_ * k_, 0.0) {}
  double& operator()(std::size_t A, std::size_t i, std::size_t B) { return data[(A * n + i) * k + B]; }
  double operator()(std::size_t A, std::size_t i, std::size_t B) const { return data[(A * n + i) * k + B]; }
};

Tensor3 gamma_fiber_jacobian(const LinearizedConnection& lin, const FiberPoint& a);

/// B(a, b)w from the coordinate formula: a tangent at b = (x, z).
TangentE B_apply(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w);
/// B(a, b)w as nu_Tpi of d/ds xi^H(a + s b, T(pi) w) at s = 0.
TangentE B_from_definition(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w);
/// (w, B(a, b)w).
TangentPullback hbar_lift(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w);
/// B(a, b)w + lambda * vertical_lift(b, kappa(w)).
TangentE B_lambda_apply(const LambdaFamilyMember& fam, const PullbackPoint& p, const TangentE& w);
/// nu_pi(w2 - B(a, b)w).
Vec kappa_bar(const LinearizedConnection& lin, const PullbackPoint& p, const TangentPullback& t);

/// D_w sigma from the coordinate formula.
Vec covariant_derivative(const LinearizedConnection& lin, const SectionAlongPi& sigma, const TangentE& w);
/// D_W sigma at a as kappa([P_h W, sigma^v](a)) + kappa(T sigma(P_v W(a))).
Vec covariant_derivative_bracket(const LinearizedConnection& lin, const SectionAlongPi& sigma, const FieldOnE& W,
                                 const FiberPoint& a);
/// nu_pi([Y, sigma^v](a)) for projectable Y. Throws NotProjectable.
Vec lie_derivation(const LinearizedConnection& lin, const FieldOnE& Y, const SectionAlongPi& sigma,
                   const FiberPoint& a);

/// Curv(Y1, Y2)sigma = -D_{sigma^v}(R(X1, X2) + D_{X1^h} eta2 - D_{X2^h} eta1) at a.
Vec curvature_linearized(const LinearizedConnection& lin, const HorBasicField& Y1, const HorBasicField& Y2,
                         const SectionAlongPi& sigma, const FiberPoint& a);
/// D_Y1 D_Y2 sigma - D_Y2 D_Y1 sigma - D_[Y1, Y2] sigma at a.
Vec curvature_commutator_oracle(const LinearizedConnection& lin, const HorBasicField& Y1, const HorBasicField& Y2,
                                const SectionAlongPi& sigma, const FiberPoint& a);
/// theta = D_{sigma^v} D_{X^h} eta, with X taken from Y (its eta is ignored).
Vec berwald_component(const LinearizedConnection& lin, const std::vector<Expr>& eta, const HorBasicField& Y,
                      const SectionAlongPi& sigma, const FiberPoint& a);
/// -D_{sigma^v} R(v1, v2).
Vec riemann_component(const LinearizedConnection& lin, const Vec& v1, const Vec& v2, const SectionAlongPi& sigma,
                      const FiberPoint& a);

/// nu_Tpi(d/ds Y(a + s b)) for the field Y = X^h + eta^v, a tangent at b.
TangentE fiber_derivative_field(const LinearizedConnection& lin, const HorBasicField& Y, const PullbackPoint& p);

inline constexpr double kFlatThreshold = 1e-8;

struct FlatnessReport {
  double max_curvature = 0.0;
  /// Largest y-derivative of kappa([Y1, Y2]) over the same samples.
  double max_kappa_bracket_slope = 0.0;
  double max_berwald = 0.0;
  bool flat = false;
  bool basic = false;
  /// Flatness agrees with kappa([Y1, Y2]) being basic on every sample.
  bool equivalence_holds = false;
  int samples = 0;
  int evaluated = 0;
  std::uint64_t seed = 0;
  double threshold = kFlatThreshold;
};

/// Samples random in-domain points, Hor-basic pairs and sections. Throws
/// OutOfDomain if no sample lands in the domain.
FlatnessReport flatness_report(const LinearizedConnection& lin, int sample_count, std::uint64_t seed);

namespace kernel {

/// Generic section callable for expression components.
inline auto section_fn(const std::vector<Expr>& comp) {
  return [&comp](const auto& x, const auto& y) { return eval_exprs<scalar_of<decltype(x)>>(comp, x, y); };
}

/// D_w sigma where `sec(x, y)` evaluates the section on any scalar type.
template <class S, class Sec>
std::vector<S> covariant_derivative_of(const NonlinearConnection& conn, const Sec& sec, const std::vector<S>& x,
                                       const std::vector<S>& y, const std::vector<S>& dx, const std::vector<S>& dy) {
  auto moved = sec(seed(x, dx), seed(y, dy));
  auto out = tangents(moved);
  auto corr = gamma_fiber_contract(conn, x, y, values(moved), dx);
  for (std::size_t A = 0; A < out.size(); ++A) out[A] += corr[A];
  return out;
}

/// Fiber part of [Y, sigma^v], where `fld(x, y)` returns a FieldValue and
/// `sec(x, y)` the section, both on any scalar type.
template <class S, class Fld, class Sec>
std::vector<S> lie_derivative_of(const Fld& fld, const Sec& sec, const std::vector<S>& x, const std::vector<S>& y) {
  auto Y = fld(x, y);
  auto moved = sec(seed(x, Y.x), seed(y, Y.y));
  auto out = tangents(moved);
  auto Ym = fld(lift(x), seed(y, values(moved)));
  for (std::size_t A = 0; A < out.size(); ++A) out[A] -= Ym.y[A].eps;
  return out;
}

/// R(X1, X2) + D_{X1^h} eta2 - D_{X2^h} eta1 as a section along pi.
template <class S>
std::vector<S> curvature_potential(const NonlinearConnection& conn, const HorBasicField& Y1,
                                   const HorBasicField& Y2, const std::vector<S>& x, const std::vector<S>& y) {
  auto X1 = eval_exprs(Y1.X(), x, y);
  auto X2 = eval_exprs(Y2.X(), x, y);
  auto out = curvature_R(conn, x, y, X1, X2);
  auto d12 = covariant_derivative_of(conn, section_fn(Y2.eta()), x, y, X1, horizontal_dy(conn, x, y, X1));
  auto d21 = covariant_derivative_of(conn, section_fn(Y1.eta()), x, y, X2, horizontal_dy(conn, x, y, X2));
  for (std::size_t A = 0; A < out.size(); ++A) out[A] += d12[A] - d21[A];
  return out;
}

}  // namespace kernel

}  // namespace linconn
