#include "linconn/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "linconn/sampling.hpp"

namespace linconn {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skip:
      return "skip";
  }
  return "skip";
}

bool Report::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

double rel_error(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]) / std::max({1.0, std::abs(a[i]), std::abs(b[i])}));
  return m;
}

double abs_error(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace {

double tangent_error(const TangentE& v, const TangentE& w) {
  return std::max({rel_error(v.at.x, w.at.x), rel_error(v.at.y, w.at.y), rel_error(v.dx, w.dx), rel_error(v.dy, w.dy)});
}

double second_error(const SecondTangent& V, const SecondTangent& W) {
  return std::max({rel_error(V.x, W.x), rel_error(V.y, W.y), rel_error(V.dx, W.dx), rel_error(V.dy, W.dy),
                   rel_error(V.delta_x, W.delta_x), rel_error(V.delta_y, W.delta_y),
                   rel_error(V.delta_dx, W.delta_dx), rel_error(V.delta_dy, W.delta_dy)});
}

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

Vec zeros(std::size_t n) { return Vec(n, 0.0); }

// One sample: returns the error, or nullopt to skip the draw.
using Body = std::function<std::optional<double>(Sampler&)>;

class Suite {
 public:
  Suite(const CheckOptions& opts) : opts_(opts) {}

  void run(const std::string& name, double tol, int count, const Body& body, const std::string& detail = {}) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    // Each check draws from its own stream so adding checks keeps others stable.
    r.seed = opts_.seed + 0x9E3779B97F4A7C15ULL * (report_.checks.size() + 1);
    Sampler rng(r.seed);
    for (int i = 0; i < count; ++i) {
      try {
        auto err = body(rng);
        if (!err) continue;
        r.max_error = std::max(r.max_error, std::isnan(*err) ? INFINITY : *err);
        ++r.samples;
      } catch (const DomainError&) {
      } catch (const OutOfDomain&) {
      }
    }
    if (r.samples == 0) r.status = CheckStatus::Skip;
    else r.status = r.max_error <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    r.detail = detail;
    report_.checks.push_back(std::move(r));
  }

  Report take() { return std::move(report_); }

 private:
  CheckOptions opts_;
  Report report_;
};

TangentE random_tangent(Sampler& rng, const FiberPoint& a) { return {a, rng.vec(a.x.size()), rng.vec(a.y.size())}; }

SecondTangent random_second(Sampler& rng, std::size_t n, std::size_t k) {
  return {rng.vec(n), rng.vec(k), rng.vec(n), rng.vec(k), rng.vec(n), rng.vec(k), rng.vec(n), rng.vec(k)};
}

// Random T(pi)-vertical element of TTE.
SecondTangent random_tpi_vertical(Sampler& rng, std::size_t n, std::size_t k) {
  auto V = random_second(rng, n, k);
  V.delta_x = zeros(n);
  V.delta_dx = zeros(n);
  return V;
}

void add_geometry_checks(Suite& suite, std::size_t n, std::size_t k, int count) {
  suite.run("vertical_lift_roundtrip", 0.0, count, [=](Sampler& rng) -> std::optional<double> {
    FiberPoint a{rng.vec(n), rng.vec(k)};
    auto b = rng.vec(k);
    return abs_error(vertical_project(vertical_lift(a, b)), b);
  });
  suite.run("interchange_law", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto x = rng.vec(n);
    FiberPoint a{x, rng.vec(k)}, a2{x, rng.vec(k)};
    auto dx1 = rng.vec(n), dx2 = rng.vec(n);
    TangentE w1{a, dx1, rng.vec(k)}, w2{a, dx2, rng.vec(k)};
    TangentE w3{a2, dx1, rng.vec(k)}, w4{a2, dx2, rng.vec(k)};
    auto lhs = tau_add(add(w1, w2), add(w3, w4));
    auto rhs = add(tau_add(w1, w3), tau_add(w2, w4));
    double err = tangent_error(lhs, rhs);
    auto z = tau_zero(tangent_projection(w1), k);
    err = std::max(err, tangent_error(tau_add(w1, z), w1));
    auto p = tangent_projection(tau_add(w1, w3));
    return std::max({err, rel_error(p.x, x), rel_error(p.dx, dx1)});
  });
  suite.run("tpi_projection_over_points", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto V = random_tpi_vertical(rng, n, k);
    auto w = vertical_project_tpi(V);
    return std::max(rel_error(w.at.y, vertical_project(T_tau_E(V))), rel_error(w.at.x, V.x));
  });
  suite.run("tpi_lift_over_points", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto x = rng.vec(n), dx = rng.vec(n);
    TangentE v{{x, rng.vec(k)}, dx, rng.vec(k)}, w{{x, rng.vec(k)}, dx, rng.vec(k)};
    return tangent_error(T_tau_E(vertical_lift_tpi(v, w)), vertical_lift(v.at, w.at.y));
  });
  suite.run("tangent_of_vertical_projection", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    FiberPoint a{rng.vec(n), rng.vec(k)};
    auto v = vertical_lift(a, rng.vec(k)), w = vertical_lift(a, rng.vec(k));
    auto lhs = tangent_vertical_project(vertical_lift_tauE(v, w));
    return tangent_error(lhs, vertical_lift({a.x, vertical_project(v)}, vertical_project(w)));
  });
  suite.run("tpi_lift_via_involution", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto x = rng.vec(n), dx = rng.vec(n);
    TangentE v{{x, rng.vec(k)}, dx, rng.vec(k)}, w{{x, rng.vec(k)}, dx, rng.vec(k)};
    TangentPullback t{{x, v.at.y, w.at.y}, v, w};
    return second_error(vertical_lift_tpi(v, w), canonical_involution(tangent_vertical_lift(t)));
  });
  suite.run("tpi_projection_via_involution", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto V = random_tpi_vertical(rng, n, k);
    return tangent_error(vertical_project_tpi(V), tangent_vertical_project(canonical_involution(V)));
  });
  suite.run("involution", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto V = random_second(rng, n, k);
    auto C = canonical_involution(V);
    double err = second_error(canonical_involution(C), V);
    err = std::max(err, tangent_error(tau_TE(C), T_tau_E(V)));
    // Ver(T pi) goes onto T Ver(pi) and back.
    auto W = random_tpi_vertical(rng, n, k);
    bool ok = is_tangent_to_vertical(canonical_involution(W));
    auto U = canonical_involution(W);
    ok = ok && is_tpi_vertical(canonical_involution(U));
    return ok ? err : INFINITY;
  });
  suite.run("tpi_projection_scaling", 1e-12, count, [=](Sampler& rng) -> std::optional<double> {
    auto V = random_tpi_vertical(rng, n, k);
    double l = rng.uniform(-2.0, 2.0);
    auto w = vertical_project_tpi(V);
    return std::max(tangent_error(vertical_project_tpi(tau_scale(l, V)), scale(l, w)),
                    tangent_error(vertical_project_tpi(scale(l, V)), tau_scale(l, w)));
  });
}

void add_connection_checks(Suite& suite, const NonlinearConnection& conn, int count) {
  const auto& sp = conn.space();
  std::size_t n = sp.n(), k = sp.k();
  suite.run("horizontal_splitting", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto v = rng.vec(n);
    auto h = horizontal_lift(conn, a, v);
    auto w = random_tangent(rng, a);
    double err = std::max(norm_inf(connector(conn, h)), abs_error(h.dx, v));
    err = std::max(err, tangent_error(add(project_h(conn, w), project_v(conn, w)), w));
    err = std::max(err, tangent_error(project_v(conn, w), vertical_lift(a, connector(conn, w))));
    return std::max(err, rel_error(connector(conn, vertical_lift(a, w.dy)), w.dy));
  });
  suite.run("curvature_antisymmetric_bilinear", 1e-9, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto v1 = rng.vec(n), v2 = rng.vec(n), v3 = rng.vec(n);
    double al = rng.uniform(), be = rng.uniform();
    if (norm_inf(curvature_R(conn, a, v1, v1)) != 0.0) return INFINITY;
    auto r12 = curvature_R(conn, a, v1, v2);
    auto r21 = curvature_R(conn, a, v2, v1);
    for (auto& e : r21) e = -e;
    Vec mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = al * v1[i] + be * v3[i];
    auto lhs = curvature_R(conn, a, mix, v2);
    auto r32 = curvature_R(conn, a, v3, v2);
    Vec rhs(k);
    for (std::size_t A = 0; A < k; ++A) rhs[A] = al * r12[A] + be * r32[A];
    return std::max(rel_error(r12, r21), rel_error(lhs, rhs));
  });
  suite.run("curvature_vs_holonomy", 1e-5, std::min(count, 8), [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto v1 = rng.vec(n), v2 = rng.vec(n);
    return abs_error(curvature_R(conn, a, v1, v2), holonomy_estimate(conn, a, v1, v2));
  });
  suite.run("bracket_jacobi", 1e-7, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto W1 = rng.field(sp), W2 = rng.field(sp), W3 = rng.field(sp);
    auto jac = [](const FieldOnE& P, const FieldOnE& Q, const FieldOnE& R) {
      return [&P, &Q, &R](const auto& x, const auto& y) {
        return kernel::bracket_of(kernel::field_fn(P),
                                  [&Q, &R](const auto& xx, const auto& yy) { return kernel::bracket<kernel::scalar_of<decltype(xx)>>(Q, R, xx, yy); },
                                  x, y);
      };
    };
    auto s1 = jac(W1, W2, W3)(a.x, a.y);
    auto s2 = jac(W2, W3, W1)(a.x, a.y);
    auto s3 = jac(W3, W1, W2)(a.x, a.y);
    double m = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      m = std::max(m, std::abs(s1.x[i] + s2.x[i] + s3.x[i]));
      scale = std::max({scale, std::abs(s1.x[i]), std::abs(s2.x[i]), std::abs(s3.x[i])});
    }
    for (std::size_t A = 0; A < k; ++A) {
      m = std::max(m, std::abs(s1.y[A] + s2.y[A] + s3.y[A]));
      scale = std::max({scale, std::abs(s1.y[A]), std::abs(s2.y[A]), std::abs(s3.y[A])});
    }
    return m / scale;
  });
}

void add_linearization_checks(Suite& suite, const LinearizedConnection& lin, int count, double tol) {
  const auto& conn = lin.conn();
  const auto& sp = lin.space();
  std::size_t n = sp.n(), k = sp.k();
  auto draw = [&](Sampler& rng) {
    auto a = rng.point(sp);
    PullbackPoint p{a.x, a.y, rng.vec(k)};
    return std::pair{p, random_tangent(rng, a)};
  };
  suite.run("B_definition_vs_formula", 1e-9, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    return tangent_error(B_from_definition(lin, p, w), B_apply(lin, p, w));
  });
  suite.run("B_fibers", 0.0, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    auto Bw = B_apply(lin, p, w);
    return std::max({abs_error(Bw.at.y, p.z), abs_error(Bw.at.x, p.x), abs_error(Bw.dx, w.dx)});
  });
  suite.run("B_linear_in_w", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    auto w2 = random_tangent(rng, p.a());
    double al = rng.uniform(), be = rng.uniform();
    auto lhs = B_apply(lin, p, add(scale(al, w), scale(be, w2)));
    auto rhs = add(scale(al, B_apply(lin, p, w)), scale(be, B_apply(lin, p, w2)));
    return tangent_error(lhs, rhs);
  });
  suite.run("B_linear_in_b", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    auto z2 = rng.vec(k);
    double l = rng.uniform(-2.0, 2.0);
    PullbackPoint p2{p.x, p.y, z2}, psum{p.x, p.y, p.z}, pl{p.x, p.y, p.z};
    for (std::size_t A = 0; A < k; ++A) {
      psum.z[A] += z2[A];
      pl.z[A] *= l;
    }
    double err = tangent_error(B_apply(lin, psum, w), tau_add(B_apply(lin, p, w), B_apply(lin, p2, w)));
    return std::max(err, tangent_error(B_apply(lin, pl, w), tau_scale(l, B_apply(lin, p, w))));
  });
  suite.run("B_semibasic", 0.0, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    return norm_inf(B_apply(lin, p, vertical_lift(p.a(), w.dy)).dy);
  });
  suite.run("hbar_pfaff", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    auto t = hbar_lift(lin, p, w);
    auto g = gamma_fiber_jacobian(lin, p.a());
    double m = 0.0;
    for (std::size_t A = 0; A < k; ++A) {
      double r = t.w2.dy[A];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t B = 0; B < k; ++B) r += g(A, i, B) * p.z[B] * t.w.dx[i];
      m = std::max(m, std::abs(r) / std::max(1.0, std::abs(t.w2.dy[A])));
    }
    return std::max(m, norm_inf(kappa_bar(lin, p, t)));
  });
  suite.run("lambda_family", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto [p, w] = draw(rng);
    double l = rng.uniform(-2.0, 2.0);
    LambdaFamilyMember fam{lin, l};
    auto z2 = rng.vec(k);
    PullbackPoint p2{p.x, p.y, z2}, psum = p;
    for (std::size_t A = 0; A < k; ++A) psum.z[A] += z2[A];
    double err = tangent_error(B_lambda_apply(fam, psum, w), tau_add(B_lambda_apply(fam, p, w), B_apply(lin, p2, w)));
    if (tangent_error(B_lambda_apply({lin, 0.0}, p, w), B_apply(lin, p, w)) != 0.0) return INFINITY;
    // A nonzero lambda does not kill a vertical w with nonzero kappa.
    auto v = vertical_lift(p.a(), rng.vec(k));
    if (l != 0.0 && norm_inf(v.dy) > 0.0 && norm_inf(B_lambda_apply(fam, p, v).dy) == 0.0) return INFINITY;
    return err;
  });
  suite.run("covariant_derivative_vs_bracket", tol, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto sigma = rng.section(sp);
    auto W = rng.field(sp);
    return rel_error(covariant_derivative(lin, sigma, eval_field(W, a)), covariant_derivative_bracket(lin, sigma, W, a));
  });
  suite.run("lie_derivation_identity", tol, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto sigma = rng.section(sp);
    auto Y = rng.projectable_field(sp);
    auto lhs = lie_derivation(lin, Y, sigma, a);
    auto d1 = covariant_derivative(lin, sigma, eval_field(Y, a));
    auto kY = connector_section(conn, Y);
    auto d2 = covariant_derivative(lin, kY, vertical_lift(a, eval_section(sigma, a)));
    for (std::size_t A = 0; A < k; ++A) d1[A] -= d2[A];
    return rel_error(lhs, d1);
  });
  suite.run("hor_basic_lie_equals_covariant", tol, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto sigma = rng.section(sp);
    auto Y = to_field(conn, rng.hor_basic(sp));
    return rel_error(lie_derivation(lin, Y, sigma, a), covariant_derivative(lin, sigma, eval_field(Y, a)));
  });
  suite.run("lie_derivation_commutator", 1e-6, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto sigma = rng.section(sp);
    auto Y1 = rng.projectable_field(sp), Y2 = rng.projectable_field(sp);
    auto sec = kernel::section_fn(sigma.comp);
    auto f1 = kernel::field_fn(Y1), f2 = kernel::field_fn(Y2);
    auto d2 = [&](const auto& x, const auto& y) { return kernel::lie_derivative_of(f2, sec, x, y); };
    auto d1 = [&](const auto& x, const auto& y) { return kernel::lie_derivative_of(f1, sec, x, y); };
    auto br = [&](const auto& x, const auto& y) { return kernel::bracket_of(f1, f2, x, y); };
    auto lhs = kernel::lie_derivative_of(f1, d2, a.x, a.y);
    auto t = kernel::lie_derivative_of(f2, d1, a.x, a.y);
    auto rhs = kernel::lie_derivative_of(br, sec, a.x, a.y);
    for (std::size_t A = 0; A < k; ++A) lhs[A] -= t[A];
    return rel_error(lhs, rhs);
  });
  suite.run("basic_iff_vertical_flat", 1e-12, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto v = vertical_lift(a, rng.vec(k));
    double err = norm_inf(covariant_derivative(lin, rng.basic_section(sp), v));
    // A section with fiber dependence is not vertically flat.
    auto sigma = rng.section(sp);
    double d = norm_inf(covariant_derivative(lin, sigma, v));
    return d > 1e-8 ? err : INFINITY;
  });
  suite.run("curvature_vs_commutator", 1e-5, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto Y1 = rng.hor_basic(sp), Y2 = rng.hor_basic(sp);
    auto sigma = rng.section(sp);
    return rel_error(curvature_linearized(lin, Y1, Y2, sigma, a), curvature_commutator_oracle(lin, Y1, Y2, sigma, a));
  });
  suite.run("curvature_vertical_vertical", 0.0, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    std::vector<Expr> zero_x(n, Expr::literal(0.0));
    HorBasicField Y1(zero_x, rng.basic_section(sp).comp), Y2(zero_x, rng.basic_section(sp).comp);
    return norm_inf(curvature_linearized(lin, Y1, Y2, rng.section(sp), a));
  });
  suite.run("curvature_riemann_component", 1e-6, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto v1 = rng.vec(n), v2 = rng.vec(n);
    std::vector<Expr> X1, X2, zero_y(k, Expr::literal(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      X1.push_back(Expr::literal(v1[i]));
      X2.push_back(Expr::literal(v2[i]));
    }
    auto sigma = rng.section(sp);
    return rel_error(riemann_component(lin, v1, v2, sigma, a),
                     curvature_linearized(lin, HorBasicField(X1, zero_y), HorBasicField(X2, zero_y), sigma, a));
  });
  suite.run("curvature_berwald_component", 1e-6, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto eta = rng.basic_section(sp).comp;
    auto Y = rng.hor_basic(sp);
    auto sigma = rng.section(sp);
    std::vector<Expr> zero_x(n, Expr::literal(0.0)), zero_y(k, Expr::literal(0.0));
    auto curv = curvature_linearized(lin, HorBasicField(zero_x, eta), HorBasicField(Y.X(), zero_y), sigma, a);
    return rel_error(berwald_component(lin, eta, Y, sigma, a), curv);
  });
  suite.run("fiber_derivative_of_hor_basic", 1e-9, count, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    PullbackPoint p{a.x, a.y, rng.vec(k)};
    auto Y = rng.hor_basic(sp);
    auto hb = hbar_lift(lin, p, eval_field(to_field(conn, Y), a));
    return tangent_error(fiber_derivative_field(lin, Y, p), hb.w2);
  });
}

void add_transport_checks(Suite& suite, const LinearizedConnection& lin, int count) {
  const auto& conn = lin.conn();
  const auto& sp = lin.space();
  std::size_t n = sp.n(), k = sp.k();
  int m = std::min(count, 16);
  // Quadratic curve through a random in-domain point.
  auto curve = [&](Sampler& rng, bool vertical) {
    auto a = rng.point(sp);
    auto dx = vertical ? zeros(n) : rng.vec(n);
    auto dy = rng.vec(k), cy = rng.vec(k);
    return CurveFn([a, dx, dy, cy](double t) {
      CurveSample c{a.x, a.y, dx, dy};
      for (std::size_t i = 0; i < a.x.size(); ++i) c.x[i] += 0.5 * t * dx[i];
      for (std::size_t A = 0; A < a.y.size(); ++A) {
        c.y[A] += 0.5 * (t * dy[A] + t * t * cy[A]);
        c.dy[A] = 0.5 * (dy[A] + 2 * t * cy[A]);
      }
      for (auto& e : c.dx) e *= 0.5;
      return c;
    });
  };
  LambdaFamilyMember plain{lin, 0.0};
  suite.run("transport_linearity", 1e-9, m, [&](Sampler& rng) -> std::optional<double> {
    auto c = curve(rng, false);
    auto z1 = rng.vec(k), z2 = rng.vec(k);
    double al = rng.uniform(), be = rng.uniform();
    Vec mix(k);
    for (std::size_t A = 0; A < k; ++A) mix[A] = al * z1[A] + be * z2[A];
    auto t1 = transport_ode(plain, c, 0.0, 1.0, z1, 100).z_final;
    auto t2 = transport_ode(plain, c, 0.0, 1.0, z2, 100).z_final;
    auto tm = transport_ode(plain, c, 0.0, 1.0, mix, 100).z_final;
    for (std::size_t A = 0; A < k; ++A) t1[A] = al * t1[A] + be * t2[A];
    return rel_error(tm, t1);
  });
  suite.run("transport_reversibility", 1e-7, m, [&](Sampler& rng) -> std::optional<double> {
    auto c = curve(rng, false);
    auto z0 = rng.vec(k);
    auto fwd = transport_ode(plain, c, 0.0, 1.0, z0, 1000).z_final;
    return rel_error(transport_ode(plain, c, 1.0, 0.0, fwd, 1000).z_final, z0);
  });
  suite.run("vertical_transport_identity", 0.0, m, [&](Sampler& rng) -> std::optional<double> {
    auto c = curve(rng, true);
    auto z0 = rng.vec(k);
    return abs_error(transport_ode(plain, c, 0.0, 1.0, z0, 50).z_final, z0);
  });
  suite.run("flow_composition", 1e-7, m, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto Y = rng.hor_basic(sp);
    auto whole = flow(conn, Y, a, 0.3, 300);
    auto half = flow(conn, Y, flow(conn, Y, a, 0.1, 100), 0.2, 200);
    return std::max(rel_error(whole.x, half.x), rel_error(whole.y, half.y));
  });
  suite.run("vertical_flow", 1e-12, m, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto eta = rng.basic_section(sp).comp;
    HorBasicField Y(std::vector<Expr>(n, Expr::literal(0.0)), eta);
    double s = rng.uniform(-0.5, 0.5);
    auto end = flow(conn, Y, a, s, 20);
    auto shift = eval_section({eta}, a);
    Vec expect = a.y;
    for (std::size_t A = 0; A < k; ++A) expect[A] += s * shift[A];
    auto fd = fiber_derivative_flow(conn, Y, {a.x, a.y, shift}, s, 20);
    return std::max({rel_error(end.y, expect), rel_error(end.x, a.x), rel_error(fd.z, shift)});
  });
  suite.run("flow_fiber_derivative_vs_transport", 1e-6, m, [&](Sampler& rng) -> std::optional<double> {
    auto a = rng.point(sp);
    auto Y = rng.hor_basic(sp);
    PullbackPoint p{a.x, a.y, rng.vec(k)};
    double s = 0.25;
    auto fd = fiber_derivative_flow(conn, Y, p, s, 200);
    auto line = flow_line(conn, Y, a, s, 400);
    auto tr = transport_ode(plain, line, 0.0, s, p.z, 200);
    return rel_error(fd.z, tr.z_final);
  });
}

}  // namespace

Report run_checks(const NonlinearConnection& conn, const CheckOptions& opts) {
  Suite suite(opts);
  LinearizedConnection lin(conn);
  int count = std::max(1, opts.samples);
  add_geometry_checks(suite, conn.n(), conn.k(), count);
  add_connection_checks(suite, conn, count);
  add_linearization_checks(suite, lin, count, opts.tol);
  add_transport_checks(suite, lin, count);

  auto rep = flatness_report(lin, std::min(count, 64), opts.seed);
  std::string detail = std::string(rep.flat ? "flat" : "non-flat") + ", " + (rep.basic ? "basic" : "non-basic") +
                       ", max |Curv| " + std::to_string(rep.max_curvature);
  auto out = suite.take();
  out.checks.push_back({"flatness_equivalence", rep.equivalence_holds ? CheckStatus::Pass : CheckStatus::Fail,
                        rep.max_curvature, rep.evaluated, rep.seed, rep.threshold, detail});
  return out;
}

}  // namespace linconn
