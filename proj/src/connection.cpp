#include "linconn/connection.hpp"

#include <cmath>
#include <random>
#include <string>

namespace linconn {

namespace {

void check_count(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(want) + ", got " + std::to_string(got));
}

bool any_references(const std::vector<Expr>& es, VarKind kind) {
  for (const auto& e : es)
    if (e.references(kind)) return true;
  return false;
}

}  // namespace

NonlinearConnection::NonlinearConnection(BundleSpace space, std::vector<std::vector<Expr>> gamma)
    : space_(std::move(space)) {
  check_count(gamma.size(), space_.k(), "connection coefficient rows");
  for (auto& row : gamma) {
    check_count(row.size(), space_.n(), "connection coefficient columns");
    for (auto& e : row) {
      if (e.references(VarKind::Z) || e.references(VarKind::T))
        throw Error("connection coefficients may only reference x and y");
      gamma_.push_back(std::move(e));
    }
  }
}

HorBasicField::HorBasicField(std::vector<Expr> X, std::vector<Expr> eta) : X_(std::move(X)), eta_(std::move(eta)) {
  for (const auto* comps : {&X_, &eta_})
    for (const auto& e : *comps)
      if (e.references(VarKind::Y) || e.references(VarKind::Z) || e.references(VarKind::T))
        throw Error("Hor-basic field components must depend on x only");
}

bool certify_projectable(FieldOnE& field, const BundleSpace& space, std::uint64_t rng_seed) {
  if (!any_references(field.comp_x, VarKind::Y)) {
    field.projectable = true;
    return true;
  }
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int probed = 0;
  for (int attempt = 0; attempt < 64 * kProjectabilitySamples && probed < kProjectabilitySamples; ++attempt) {
    Vec x(space.n()), y(space.k());
    for (auto& e : x) e = unit(rng);
    for (auto& e : y) e = unit(rng);
    if (!space.contains(x, y)) continue;
    try {
      for (std::size_t B = 0; B < space.k(); ++B) {
        Vec dir(space.k(), 0.0);
        dir[B] = 1.0;
        auto d = kernel::eval_exprs<Dual<double>>(field.comp_x, lift(x), seed(y, dir));
        for (const auto& c : d)
          if (std::abs(c.eps) > kProjectabilityTolerance) {
            field.projectable = false;
            return false;
          }
      }
      ++probed;
    } catch (const DomainError&) {
    }
  }
  field.projectable = probed > 0;
  return *field.projectable;
}

FieldOnE horizontal_lift_field(const NonlinearConnection& conn, const Vec& v) {
  check_count(v.size(), conn.n(), "base vector");
  FieldOnE f;
  for (double c : v) f.comp_x.push_back(Expr::literal(c));
  for (std::size_t A = 0; A < conn.k(); ++A) {
    Expr acc = Expr::literal(0.0);
    for (std::size_t i = 0; i < conn.n(); ++i)
      if (v[i] != 0.0) acc = acc + conn.gamma(A, i) * Expr::literal(v[i]);
    f.comp_y.push_back(-acc);
  }
  f.projectable = true;
  return f;
}

FieldOnE horizontal_part(const NonlinearConnection& conn, const FieldOnE& W) {
  check_count(W.comp_x.size(), conn.n(), "field base components");
  FieldOnE f;
  f.comp_x = W.comp_x;
  for (std::size_t A = 0; A < conn.k(); ++A) {
    Expr acc = Expr::literal(0.0);
    for (std::size_t i = 0; i < conn.n(); ++i) acc = acc + conn.gamma(A, i) * W.comp_x[i];
    f.comp_y.push_back(-acc);
  }
  f.projectable = W.projectable;
  return f;
}

FieldOnE vertical_lift_field(const SectionAlongPi& sigma, std::size_t n) {
  FieldOnE f;
  f.comp_x.assign(n, Expr::literal(0.0));
  f.comp_y = sigma.comp;
  f.projectable = true;
  return f;
}

FieldOnE to_field(const NonlinearConnection& conn, const HorBasicField& Y) {
  check_count(Y.X().size(), conn.n(), "Hor-basic base components");
  check_count(Y.eta().size(), conn.k(), "Hor-basic fiber components");
  FieldOnE f;
  f.comp_x = Y.X();
  for (std::size_t A = 0; A < conn.k(); ++A) {
    Expr acc = Expr::literal(0.0);
    for (std::size_t i = 0; i < conn.n(); ++i) acc = acc + conn.gamma(A, i) * Y.X()[i];
    f.comp_y.push_back(Y.eta()[A] - acc);
  }
  f.projectable = true;
  return f;
}

SectionAlongPi connector_section(const NonlinearConnection& conn, const FieldOnE& W) {
  check_count(W.comp_x.size(), conn.n(), "field base components");
  check_count(W.comp_y.size(), conn.k(), "field fiber components");
  SectionAlongPi s;
  for (std::size_t A = 0; A < conn.k(); ++A) {
    Expr acc = W.comp_y[A];
    for (std::size_t i = 0; i < conn.n(); ++i) acc = acc + conn.gamma(A, i) * W.comp_x[i];
    s.comp.push_back(acc);
  }
  return s;
}

SectionAlongPi as_section(const std::vector<Expr>& basic) { return {basic}; }

Matrix gamma_at(const NonlinearConnection& conn, const FiberPoint& a) {
  conn.space().require(a);
  Matrix m(conn.k(), conn.n());
  m.data = kernel::eval_exprs<double>(conn.gamma_flat(), a.x, a.y);
  return m;
}

TangentE horizontal_lift(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v) {
  conn.space().require(a);
  check_count(v.size(), conn.n(), "base vector");
  return {a, v, kernel::horizontal_dy<double>(conn, a.x, a.y, v)};
}

Vec connector(const NonlinearConnection& conn, const TangentE& w) {
  conn.space().require(w.at);
  check_count(w.dx.size(), conn.n(), "tangent base components");
  check_count(w.dy.size(), conn.k(), "tangent fiber components");
  return kernel::connector<double>(conn, w.at.x, w.at.y, w.dx, w.dy);
}

TangentE project_h(const NonlinearConnection& conn, const TangentE& w) { return horizontal_lift(conn, w.at, w.dx); }

TangentE project_v(const NonlinearConnection& conn, const TangentE& w) { return subtract(w, project_h(conn, w)); }

TangentE eval_field(const FieldOnE& W, const FiberPoint& p) {
  auto v = kernel::eval_field<double>(W, p.x, p.y);
  return {p, std::move(v.x), std::move(v.y)};
}

Vec eval_section(const SectionAlongPi& sigma, const FiberPoint& p) {
  return kernel::eval_exprs<double>(sigma.comp, p.x, p.y);
}

TangentE bracket(const FieldOnE& W1, const FieldOnE& W2, const FiberPoint& p) {
  check_count(W1.comp_x.size(), p.x.size(), "field base components");
  check_count(W2.comp_x.size(), p.x.size(), "field base components");
  check_count(W1.comp_y.size(), p.y.size(), "field fiber components");
  check_count(W2.comp_y.size(), p.y.size(), "field fiber components");
  auto b = kernel::bracket<double>(W1, W2, p.x, p.y);
  return {p, std::move(b.x), std::move(b.y)};
}

Vec curvature_R(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v1, const Vec& v2) {
  conn.space().require(a);
  if (v1.size() != conn.n() || v2.size() != conn.n()) throw DimensionError("base vectors must have n components");
  return kernel::curvature_R<double>(conn, a.x, a.y, v1, v2);
}

}  // namespace linconn
