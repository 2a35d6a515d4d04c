#include "linconn/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linconn/sampling.hpp"

namespace linconn {

namespace {

void check_w(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w) {
  const auto& sp = lin.space();
  sp.require(p.a());
  if (p.z.size() != sp.k()) throw DimensionError("second leg must have " + std::to_string(sp.k()) + " components");
  if (w.dx.size() != sp.n() || w.dy.size() != sp.k()) throw DimensionError("tangent has wrong dimensions");
  if (!same_point(w.at.x, p.x) || !same_point(w.at.y, p.y)) throw BaseMismatch("tangent is not based at leg a");
}

void check_section(const LinearizedConnection& lin, const SectionAlongPi& sigma) {
  if (sigma.comp.size() != lin.space().k()) throw DimensionError("section has wrong number of components");
}

void check_hor_basic(const LinearizedConnection& lin, const HorBasicField& Y) {
  if (Y.X().size() != lin.space().n() || Y.eta().size() != lin.space().k())
    throw DimensionError("Hor-basic field has wrong dimensions");
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace

Tensor3 gamma_fiber_jacobian(const LinearizedConnection& lin, const FiberPoint& a) {
  const auto& conn = lin.conn();
  conn.space().require(a);
  std::size_t n = conn.n(), k = conn.k();
  std::vector<Dual1> x(a.x.begin(), a.x.end());
  std::vector<Dual1> y;
  for (std::size_t B = 0; B < k; ++B) {
    std::vector<double> e(k, 0.0);
    e[B] = 1.0;
    y.emplace_back(a.y[B], std::move(e));
  }
  auto g = kernel::eval_exprs<Dual1>(conn.gamma_flat(), x, y);
  Tensor3 t(k, n);
  for (std::size_t A = 0; A < k; ++A)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t B = 0; B < k; ++B) t(A, i, B) = g[A * n + i].d(B);
  return t;
}

TangentE B_apply(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w) {
  check_w(lin, p, w);
  auto g = gamma_fiber_jacobian(lin, p.a());
  Vec dy(g.k, 0.0);
  for (std::size_t A = 0; A < g.k; ++A) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t B = 0; B < g.k; ++B) acc += g(A, i, B) * p.z[B] * w.dx[i];
    dy[A] = -acc;
  }
  return {p.b(), w.dx, std::move(dy)};
}

TangentE B_from_definition(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w) {
  check_w(lin, p, w);
  const auto& conn = lin.conn();
  // alpha(s) = xi^H(a + s b, T(pi) w) as a dual curve in s.
  auto ys = seed(p.y, p.z);
  auto dys = kernel::horizontal_dy<Dual<double>>(conn, lift(p.x), ys, lift(w.dx));
  SecondTangent V{p.x, p.y, w.dx, values(dys), Vec(conn.n(), 0.0), p.z, Vec(conn.n(), 0.0), tangents(dys)};
  return vertical_project_tpi(V);
}

TangentPullback hbar_lift(const LinearizedConnection& lin, const PullbackPoint& p, const TangentE& w) {
  return {p, w, B_apply(lin, p, w)};
}

TangentE B_lambda_apply(const LambdaFamilyMember& fam, const PullbackPoint& p, const TangentE& w) {
  auto out = B_apply(fam.lin, p, w);
  if (fam.lambda == 0.0) return out;
  auto kw = connector(fam.lin.conn(), w);
  for (std::size_t A = 0; A < out.dy.size(); ++A) out.dy[A] += fam.lambda * kw[A];
  return out;
}

Vec kappa_bar(const LinearizedConnection& lin, const PullbackPoint& p, const TangentPullback& t) {
  if (!same_point(t.at.x, p.x) || !same_point(t.at.y, p.y) || !same_point(t.at.z, p.z))
    throw BaseMismatch("tangent pair is not based at the given point");
  auto Bw = B_apply(lin, p, t.w);
  if (!same_point(t.w2.at.x, p.x) || !same_point(t.w2.at.y, p.z))
    throw BaseMismatch("second component is not based at leg b");
  Vec out(Bw.dy.size());
  for (std::size_t A = 0; A < out.size(); ++A) out[A] = t.w2.dy[A] - Bw.dy[A];
  if (!same_point(t.w2.dx, Bw.dx)) throw BaseMismatch("pair components have different T(pi) images");
  return out;
}

Vec covariant_derivative(const LinearizedConnection& lin, const SectionAlongPi& sigma, const TangentE& w) {
  check_section(lin, sigma);
  lin.space().require(w.at);
  return kernel::covariant_derivative_of<double>(lin.conn(), kernel::section_fn(sigma.comp), w.at.x, w.at.y, w.dx,
                                                 w.dy);
}

Vec covariant_derivative_bracket(const LinearizedConnection& lin, const SectionAlongPi& sigma, const FieldOnE& W,
                                 const FiberPoint& a) {
  check_section(lin, sigma);
  const auto& conn = lin.conn();
  conn.space().require(a);
  auto h = horizontal_part(conn, W);
  auto out = connector(conn, bracket(h, vertical_lift_field(sigma, lin.space().n()), a));
  // T sigma of the vertical part P_v W(a) is vertical with fiber part d_y sigma . kappa(W(a)).
  auto kw = connector(conn, eval_field(W, a));
  auto moved = kernel::eval_exprs<Dual<double>>(sigma.comp, lift(a.x), seed(a.y, kw));
  for (std::size_t A = 0; A < out.size(); ++A) out[A] += moved[A].eps;
  return out;
}

Vec lie_derivation(const LinearizedConnection& lin, const FieldOnE& Y, const SectionAlongPi& sigma,
                   const FiberPoint& a) {
  check_section(lin, sigma);
  lin.space().require(a);
  bool projectable;
  if (Y.projectable) {
    projectable = *Y.projectable;
  } else {
    FieldOnE copy = Y;
    projectable = certify_projectable(copy, lin.space());
  }
  if (!projectable) throw NotProjectable("field is not projectable");
  return vertical_project(bracket(Y, vertical_lift_field(sigma, lin.space().n()), a));
}

Vec curvature_linearized(const LinearizedConnection& lin, const HorBasicField& Y1, const HorBasicField& Y2,
                         const SectionAlongPi& sigma, const FiberPoint& a) {
  check_section(lin, sigma);
  check_hor_basic(lin, Y1);
  check_hor_basic(lin, Y2);
  lin.space().require(a);
  auto s = eval_section(sigma, a);
  auto rho = kernel::curvature_potential<Dual<double>>(lin.conn(), Y1, Y2, lift(a.x), seed(a.y, s));
  Vec out = tangents(rho);
  for (auto& e : out) e = -e;
  return out;
}

Vec curvature_commutator_oracle(const LinearizedConnection& lin, const HorBasicField& Y1, const HorBasicField& Y2,
                                const SectionAlongPi& sigma, const FiberPoint& a) {
  check_section(lin, sigma);
  check_hor_basic(lin, Y1);
  check_hor_basic(lin, Y2);
  const auto& conn = lin.conn();
  conn.space().require(a);
  auto F1 = to_field(conn, Y1);
  auto F2 = to_field(conn, Y2);
  auto sec = kernel::section_fn(sigma.comp);
  // D_F sigma as a section, generic in the scalar type.
  auto along = [&](const FieldOnE& F) {
    return [&conn, &sec, &F](const auto& x, const auto& y) {
      using T = kernel::scalar_of<decltype(x)>;
      auto v = kernel::eval_field<T>(F, x, y);
      return kernel::covariant_derivative_of<T>(conn, sec, x, y, v.x, v.y);
    };
  };
  auto D1 = along(F1);
  auto D2 = along(F2);
  auto y1 = eval_field(F1, a);
  auto y2 = eval_field(F2, a);
  auto t12 = kernel::covariant_derivative_of<double>(conn, D2, a.x, a.y, y1.dx, y1.dy);
  auto t21 = kernel::covariant_derivative_of<double>(conn, D1, a.x, a.y, y2.dx, y2.dy);
  auto br = bracket(F1, F2, a);
  auto t3 = kernel::covariant_derivative_of<double>(conn, sec, a.x, a.y, br.dx, br.dy);
  Vec out(t12.size());
  for (std::size_t A = 0; A < out.size(); ++A) out[A] = t12[A] - t21[A] - t3[A];
  return out;
}

Vec berwald_component(const LinearizedConnection& lin, const std::vector<Expr>& eta, const HorBasicField& Y,
                      const SectionAlongPi& sigma, const FiberPoint& a) {
  check_section(lin, sigma);
  check_hor_basic(lin, Y);
  if (eta.size() != lin.space().k()) throw DimensionError("basic section has wrong number of components");
  const auto& conn = lin.conn();
  conn.space().require(a);
  auto s = eval_section(sigma, a);
  auto x = lift(a.x);
  auto y = seed(a.y, s);
  auto X = kernel::eval_exprs(Y.X(), x, y);
  auto d = kernel::covariant_derivative_of(conn, kernel::section_fn(eta), x, y, X, kernel::horizontal_dy(conn, x, y, X));
  return tangents(d);
}

Vec riemann_component(const LinearizedConnection& lin, const Vec& v1, const Vec& v2, const SectionAlongPi& sigma,
                      const FiberPoint& a) {
  check_section(lin, sigma);
  const auto& conn = lin.conn();
  conn.space().require(a);
  if (v1.size() != conn.n() || v2.size() != conn.n()) throw DimensionError("base vectors have wrong dimension");
  auto s = eval_section(sigma, a);
  auto R = kernel::curvature_R<Dual<double>>(conn, lift(a.x), seed(a.y, s), lift(v1), lift(v2));
  Vec out = tangents(R);
  for (auto& e : out) e = -e;
  return out;
}

TangentE fiber_derivative_field(const LinearizedConnection& lin, const HorBasicField& Y, const PullbackPoint& p) {
  check_hor_basic(lin, Y);
  const auto& conn = lin.conn();
  conn.space().require(p.a());
  // Y(a + s b) as a dual curve in s, then nu_Tpi of its derivative.
  auto x = lift(p.x);
  auto y = seed(p.y, p.z);
  auto v = kernel::eval_field<Dual<double>>(to_field(conn, Y), x, y);
  SecondTangent V{p.x, p.y, values(v.x), values(v.y), tangents(x), tangents(y), tangents(v.x), tangents(v.y)};
  return vertical_project_tpi(V);
}

FlatnessReport flatness_report(const LinearizedConnection& lin, int sample_count, std::uint64_t rng_seed) {
  const auto& sp = lin.space();
  const auto& conn = lin.conn();
  Sampler rng(rng_seed);
  FlatnessReport rep;
  rep.samples = sample_count;
  rep.seed = rng_seed;
  bool agree = true;
  for (int s = 0; s < sample_count; ++s) {
    FiberPoint a{rng.vec(sp.n()), rng.vec(sp.k())};
    auto Y1 = rng.hor_basic(sp);
    auto Y2 = rng.hor_basic(sp);
    auto sigma = rng.section(sp);
    auto eta = rng.basic_section(sp).comp;
    if (!sp.contains(a)) continue;
    try {
      double curv = max_abs(curvature_linearized(lin, Y1, Y2, sigma, a));
      double theta = max_abs(berwald_component(lin, eta, Y1, sigma, a));
      // y-derivatives of kappa([Y1, Y2]) along each fiber direction.
      auto F1 = to_field(conn, Y1);
      auto F2 = to_field(conn, Y2);
      double slope = 0.0;
      for (std::size_t B = 0; B < sp.k(); ++B) {
        Vec e(sp.k(), 0.0);
        e[B] = 1.0;
        auto x = lift(a.x);
        auto y = seed(a.y, e);
        auto br = kernel::bracket<Dual<double>>(F1, F2, x, y);
        slope = std::max(slope, max_abs(tangents(kernel::connector(conn, x, y, br.x, br.y))));
      }
      rep.max_curvature = std::max(rep.max_curvature, curv);
      rep.max_berwald = std::max(rep.max_berwald, theta);
      rep.max_kappa_bracket_slope = std::max(rep.max_kappa_bracket_slope, slope);
      // Only the zero/nonzero pattern is compared.
      if ((curv <= kFlatThreshold) != (slope <= kFlatThreshold)) agree = false;
      ++rep.evaluated;
    } catch (const DomainError&) {
    } catch (const OutOfDomain&) {
    }
  }
  if (rep.evaluated == 0) throw OutOfDomain("no flatness sample landed in the domain");
  rep.flat = rep.max_curvature <= kFlatThreshold;
  rep.basic = rep.max_berwald <= kFlatThreshold;
  rep.equivalence_holds = agree;
  return rep;
}

}  // namespace linconn
