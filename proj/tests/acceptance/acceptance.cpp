// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "linconn/checks.hpp"
#include "linconn/cli.hpp"
#include "linconn/sampling.hpp"
#include "linconn/transport.hpp"
#include "../unit/oracles.hpp"

using namespace linconn;

namespace {

struct Item {
  std::string what;
  double err;
  double tol;
  bool ok;
};

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  /// Records an error bound; passes when err <= tol.
  void bound(std::string what, double err, double tol) { items_.push_back({std::move(what), err, tol, err <= tol}); }
  void require(std::string what, bool ok, double value = 0.0) { items_.push_back({std::move(what), value, 0.0, ok}); }

  bool report() const {
    bool ok = true;
    for (const auto& it : items_) ok = ok && it.ok;
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id_, title_.c_str());
    for (const auto& it : items_) {
      if (it.tol > 0)
        std::printf("    %-4s %-58s max err %.3e (tol %.0e)\n", it.ok ? "ok" : "BAD", it.what.c_str(), it.err, it.tol);
      else
        std::printf("    %-4s %-58s value %.6g\n", it.ok ? "ok" : "BAD", it.what.c_str(), it.err);
    }
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::vector<Item> items_;
};

std::vector<Expr> exprs(std::vector<const char*> es) {
  std::vector<Expr> out;
  for (auto* e : es) out.push_back(parse(e));
  return out;
}

PullbackPoint random_pullback(Sampler& s, const BundleSpace& space) {
  auto a = s.point(space);
  return {a.x, a.y, s.point(space).y};
}

Vec vsum(const Vec& a, const Vec& b, double al = 1.0, double be = 1.0) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = al * a[i] + be * b[i];
  return out;
}

double tangent_err(const TangentE& a, const TangentE& b) {
  return std::max({rel_error(a.at.x, b.at.x), rel_error(a.at.y, b.at.y), rel_error(a.dx, b.dx), rel_error(a.dy, b.dy)});
}

double second_err(const SecondTangent& a, const SecondTangent& b) {
  return std::max({rel_error(a.x, b.x), rel_error(a.y, b.y), rel_error(a.dx, b.dx), rel_error(a.dy, b.dy),
                   rel_error(a.delta_x, b.delta_x), rel_error(a.delta_y, b.delta_y),
                   rel_error(a.delta_dx, b.delta_dx), rel_error(a.delta_dy, b.delta_dy)});
}

bool criterion1() {
  Criterion c(1, "B from its definition equals the coordinate formula");
  Sampler s(101);
  auto conns = oracle::all();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    LinearizedConnection lin(conns[i % conns.size()]);
    auto p = random_pullback(s, lin.space());
    TangentE w{p.a(), s.vec(lin.space().n()), s.vec(lin.space().k())};
    auto d = B_from_definition(lin, p, w), f = B_apply(lin, p, w);
    worst = std::max(worst, tangent_err(d, f));
  }
  c.bound("1000 draws over C0-C4 (relative)", worst, 1e-9);
  return c.report();
}

bool criterion2() {
  Criterion c(2, "linearity of B, semibasic vanishing, pullback for linear C3");
  Sampler s(102);
  double lin_w = 0, lin_b = 0, scale_b = 0, semibasic = 0, pullback = 0;
  for (const auto& conn : oracle::all()) {
    LinearizedConnection lin(conn);
    std::size_t n = conn.n(), k = conn.k();
    for (int i = 0; i < 200; ++i) {
      auto p = random_pullback(s, conn.space());
      TangentE w1{p.a(), s.vec(n), s.vec(k)}, w2{p.a(), s.vec(n), s.vec(k)};
      double l = s.uniform(-2, 2);
      lin_w = std::max(lin_w, tangent_err(B_apply(lin, p, add(scale(l, w1), w2)),
                                          add(scale(l, B_apply(lin, p, w1)), B_apply(lin, p, w2))));
      auto z2 = s.vec(k);
      PullbackPoint p2{p.x, p.y, z2}, ps{p.x, p.y, vsum(p.z, z2)}, pl{p.x, p.y, vsum(p.z, p.z, l, 0.0)};
      lin_b = std::max(lin_b, tangent_err(B_apply(lin, ps, w1), tau_add(B_apply(lin, p, w1), B_apply(lin, p2, w1))));
      scale_b = std::max(scale_b, tangent_err(B_apply(lin, pl, w1), tau_scale(l, B_apply(lin, p, w1))));
      for (double e : B_apply(lin, p, vertical_lift(p.a(), s.vec(k))).dy) semibasic = std::max(semibasic, std::abs(e));
    }
  }
  // Slit domain: legs whose sum is the removed zero section.
  LinearizedConnection c4(oracle::C4());
  double slit = 0.0;
  for (int i = 0; i < 200; ++i) {
    auto a = s.point(c4.space());
    auto b = s.vec(2);
    Vec nb{-b[0], -b[1]};
    TangentE w{a, s.vec(1), s.vec(2)};
    auto sum = tau_add(B_apply(c4, {a.x, a.y, b}, w), B_apply(c4, {a.x, a.y, nb}, w));
    slit = std::max(slit, tangent_err(sum, B_apply(c4, {a.x, a.y, {0, 0}}, w)));
  }
  LinearizedConnection c3(oracle::C3());
  for (int i = 0; i < 500; ++i) {
    auto p = random_pullback(s, c3.space());
    TangentE w{p.a(), s.vec(1), s.vec(2)};
    auto B = B_apply(c3, p, w);
    pullback = std::max(pullback, tangent_err(B, horizontal_lift(c3.conn(), p.b(), w.dx)));
  }
  c.bound("linear in w, C0-C4 (relative)", lin_w, 1e-12);
  c.bound("additive in b via +_tau, C0-C4 (relative)", lin_b, 1e-12);
  c.bound("homogeneous in b via ._tau, C0-C4 (relative)", scale_b, 1e-12);
  c.bound("additivity on slit C4 with b + b' = 0", slit, 1e-12);
  c.require("vertical w gives exactly zero (max |dy|)", semibasic == 0.0, semibasic);
  c.bound("C3: B equals the pullback horizontal lift", pullback, 1e-12);
  return c.report();
}

bool criterion3() {
  Criterion c(3, "lambda-family");
  Sampler s(103);
  bool exact = true;
  double affine = 0.0;
  for (const auto& conn : oracle::all()) {
    LinearizedConnection lin(conn);
    std::size_t n = conn.n(), k = conn.k();
    for (int i = 0; i < 200; ++i) {
      auto p = random_pullback(s, conn.space());
      TangentE w{p.a(), s.vec(n), s.vec(k)};
      auto B0 = B_lambda_apply({lin, 0.0}, p, w);
      auto B = B_apply(lin, p, w);
      exact = exact && B0.dy == B.dy && B0.dx == B.dx && B0.at.y == B.at.y;
      LambdaFamilyMember fam{lin, s.uniform(-3, 3)};
      auto z2 = s.vec(k);
      auto lhs = B_lambda_apply(fam, {p.x, p.y, vsum(p.z, z2)}, w);
      auto rhs = tau_add(B_lambda_apply(fam, p, w), B_apply(lin, {p.x, p.y, z2}, w));
      affine = std::max(affine, tangent_err(lhs, rhs));
    }
  }
  LinearizedConnection c1(oracle::C1());
  PullbackPoint p{{0}, {1}, {3}};
  double vert = std::abs(B_lambda_apply({c1, 0.5}, p, vertical_lift(p.a(), {2})).dy[0]);
  c.require("B_0 = B exactly", exact, exact ? 1.0 : 0.0);
  c.bound("B_l(a,b+b')w = B_l(a,b)w +_tau B(a,b')w (relative)", affine, 1e-12);
  c.require("C1, lambda=0.5, vertical w: |dy| > 0", vert > 0.0, vert);
  return c.report();
}

bool criterion4() {
  Criterion c(4, "covariant derivative cross-checks");
  Sampler s(104);
  std::vector<NonlinearConnection> c03{oracle::C0(), oracle::C1(), oracle::C2(), oracle::C3()};
  double bracket_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    LinearizedConnection lin(c03[i % 4]);
    auto a = s.point(lin.space());
    auto sigma = s.section(lin.space());
    auto W = s.field(lin.space());
    bracket_err = std::max(bracket_err, abs_error(covariant_derivative(lin, sigma, eval_field(W, a)),
                                                  covariant_derivative_bracket(lin, sigma, W, a)));
  }
  auto all = oracle::all();
  double prop62 = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto& conn = all[i % all.size()];
    LinearizedConnection lin(conn);
    auto a = s.point(conn.space());
    auto Y = s.projectable_field(conn.space());
    auto sigma = s.section(conn.space());
    auto rhs = vsum(covariant_derivative(lin, sigma, eval_field(Y, a)),
                    covariant_derivative(lin, connector_section(conn, Y), vertical_lift(a, eval_section(sigma, a))),
                    1.0, -1.0);
    prop62 = std::max(prop62, abs_error(lie_derivation(lin, Y, sigma, a), rhs));
  }
  double basic_max = 0.0, nonbasic_min = INFINITY;
  for (const auto& conn : all) {
    LinearizedConnection lin(conn);
    auto basic = s.basic_section(conn.space());
    SectionAlongPi nonbasic = basic;
    nonbasic.comp[0] = nonbasic.comp[0] + parse("y1");
    double nb = 0.0;
    for (int i = 0; i < 50; ++i) {
      auto a = s.point(conn.space());
      auto v = vertical_lift(a, s.vec(conn.k()));
      for (double e : covariant_derivative(lin, basic, v)) basic_max = std::max(basic_max, std::abs(e));
      for (double e : covariant_derivative(lin, nonbasic, v)) nb = std::max(nb, std::abs(e));
    }
    nonbasic_min = std::min(nonbasic_min, nb);
  }
  c.bound("direct formula vs bracket formula, 500 draws C0-C3", bracket_err, 1e-7);
  c.bound("Lie derivation = D_Y - D_{sigma^v} kappa(Y), 500 draws", prop62, 1e-7);
  c.require("basic sections: D along verticals is exactly 0", basic_max == 0.0, basic_max);
  c.require("non-basic sections: D along verticals is nonzero", nonbasic_min > 1e-6, nonbasic_min);
  return c.report();
}

bool criterion5() {
  Criterion c(5, "linearized curvature");
  Sampler s(105);
  std::vector<NonlinearConnection> conns{oracle::C1(), oracle::C2(), oracle::C4()};
  double closed = 0.0;
  for (int i = 0; i < 200; ++i) {
    LinearizedConnection lin(conns[i % 3]);
    auto a = s.point(lin.space());
    auto Y1 = s.hor_basic(lin.space()), Y2 = s.hor_basic(lin.space());
    auto sigma = s.section(lin.space());
    closed = std::max(closed, abs_error(curvature_linearized(lin, Y1, Y2, sigma, a),
                                        curvature_commutator_oracle(lin, Y1, Y2, sigma, a)));
  }
  double vv = 0.0, riemann = 0.0;
  for (const auto& conn : oracle::all()) {
    LinearizedConnection lin(conn);
    std::vector<Expr> zeros(conn.n(), Expr::literal(0.0));
    for (int i = 0; i < 40; ++i) {
      auto a = s.point(conn.space());
      HorBasicField Y1(zeros, s.basic_section(conn.space()).comp), Y2(zeros, s.basic_section(conn.space()).comp);
      auto sigma = s.section(conn.space());
      for (double e : curvature_linearized(lin, Y1, Y2, sigma, a)) vv = std::max(vv, std::abs(e));
      // Riemann-type: eta = 0, constant X; compare with -d/ds R_(y + s sigma) by finite differences.
      auto v1 = s.vec(conn.n()), v2 = s.vec(conn.n());
      auto r = riemann_component(lin, v1, v2, sigma, a);
      oracle::VecFn Ry = [&](const Vec& y) { return curvature_R(conn, {a.x, y}, v1, v2); };
      auto fdv = oracle::fd(Ry, a.y, eval_section(sigma, a));
      for (auto& e : fdv) e = -e;
      riemann = std::max(riemann, abs_error(r, fdv));
    }
  }
  LinearizedConnection c1(oracle::C1());
  auto th = berwald_component(c1, exprs({"1"}), HorBasicField(exprs({"1"}), exprs({"0"})), {exprs({"y1"})}, {{0}, {1}});
  auto f0 = flatness_report(LinearizedConnection(oracle::C0()), 256, 7);
  auto f3 = flatness_report(LinearizedConnection(oracle::C3()), 256, 7);
  c.bound("closed form vs commutator, 200 draws C1/C2/C4", closed, 1e-5);
  c.require("vertical-vertical curvature is exactly 0", vv == 0.0, vv);
  c.bound("Riemann-type component vs finite differences of R", riemann, 1e-6);
  c.bound("Berwald component on C1 hand example |theta - 2|", std::abs(th[0] - 2.0), 1e-9);
  c.bound("C0 max |Curv| (flat)", f0.max_curvature, 1e-9);
  c.bound("C3 max |Curv| (flat)", f3.max_curvature, 1e-9);
  c.require("C0 and C3 reported flat", f0.flat && f3.flat, f0.flat && f3.flat ? 1.0 : 0.0);
  return c.report();
}

bool criterion6() {
  Criterion c(6, "transport");
  LinearizedConnection c1(oracle::C1());
  CurveInE line{exprs({"t"}), exprs({"1"}), 0.0, 1.0};
  double e2 = std::exp(-2.0);
  double err = std::abs(transport_ode(c1, line, {1}, 1000).z_final[0] - e2);
  double e10 = std::abs(transport_ode(c1, line, {1}, 10).z_final[0] - e2);
  double e20 = std::abs(transport_ode(c1, line, {1}, 20).z_final[0] - e2);
  double ratio = e10 / e20;
  HorBasicField Y(exprs({"1"}), exprs({"0"}));
  auto fd = fiber_derivative_flow(c1.conn(), Y, {{0}, {1}, {1}}, 1.0, 2000);
  auto tr = transport_ode(LambdaFamilyMember{c1, 0.0}, flow_line(c1.conn(), Y, {{0}, {1}}, 1.0, 2000), 0.0, 1.0, {1},
                          2000);
  bool identity = true;
  Sampler s(106);
  for (const auto& conn : oracle::all()) {
    LinearizedConnection lin(conn);
    for (int i = 0; i < 10; ++i) {
      auto a = s.point(conn.space());
      CurveInE vert;
      for (double x : a.x) vert.comp_x.push_back(Expr::literal(x));
      for (double y : a.y) vert.comp_y.push_back(parse(std::to_string(y) + " + 0.1*t^2"));
      auto z0 = s.vec(conn.k());
      try {
        identity = identity && transport_ode(lin, vert, z0, 100).z_final == z0;
      } catch (const OutOfDomain&) {
      }
    }
  }
  c.bound("C1 line, 1000 steps: |z(1) - e^-2|", err, 1e-9);
  c.require("error ratio 10 vs 20 steps in [12, 20]", ratio >= 12.0 && ratio <= 20.0, ratio);
  c.bound("fiber derivative of flow vs transport, 2000 steps", std::abs(fd.z[0] - tr.z_final[0]), 1e-6);
  c.require("vertical curves transport exactly by the identity", identity, identity ? 1.0 : 0.0);
  return c.report();
}

bool criterion7() {
  Criterion c(7, "double vector bundle structure");
  Sampler s(107);
  const std::size_t n = 2, k = 3;
  double interchange = 0, p211 = 0, p212 = 0, p213 = 0, p221 = 0, p222 = 0, p223 = 0, invol = 0;
  bool p223_ok = true;
  auto rand_tangent = [&](const Vec& x, const Vec& dx) { return TangentE{{x, s.vec(k)}, dx, s.vec(k)}; };
  auto rand_vtpi = [&] {
    return SecondTangent{s.vec(n), s.vec(k), s.vec(n), s.vec(k), Vec(n, 0.0), s.vec(k), Vec(n, 0.0), s.vec(k)};
  };
  for (int i = 0; i < 1000; ++i) {
    auto x = s.vec(n), d1 = s.vec(n), d2 = s.vec(n);
    FiberPoint a{x, s.vec(k)}, b{x, s.vec(k)};
    TangentE w1{a, d1, s.vec(k)}, w2{a, d2, s.vec(k)}, w3{b, d1, s.vec(k)}, w4{b, d2, s.vec(k)};
    interchange = std::max(interchange, tangent_err(tau_add(add(w1, w2), add(w3, w4)),
                                                    add(tau_add(w1, w3), tau_add(w2, w4))));
    // 2.1 (1): tau_E o nu_Tpi = nu_pi o T tau_E on T(pi)-verticals.
    auto V = rand_vtpi();
    p211 = std::max(p211, rel_error(vertical_project_tpi(V).at.y, vertical_project(T_tau_E(V))));
    // 2.1 (2): T tau_E of the T(pi)-vertical lift is the vertical lift of tau_E(w) at tau_E(v).
    auto v = rand_tangent(x, d1), w = rand_tangent(x, d1);
    p212 = std::max(p212, tangent_err(T_tau_E(vertical_lift_tpi(v, w)), vertical_lift(v.at, w.at.y)));
    // 2.1 (3): T nu_pi of the tau_E-vertical lift of pi-verticals.
    auto pv = vertical_lift(a, s.vec(k)), pw = vertical_lift(a, s.vec(k));
    p213 = std::max(p213, tangent_err(tangent_vertical_project(vertical_lift_tauE(pv, pw)),
                                      vertical_lift({x, vertical_project(pv)}, vertical_project(pw))));
    // 2.2 (1): the T(pi)-vertical lift is chi o T(vertical lift).
    p221 = std::max(p221, second_err(vertical_lift_tpi(v, w),
                                     canonical_involution(tangent_vertical_lift({{x, v.at.y, w.at.y}, v, w}))));
    // 2.2 (2): nu_Tpi = T nu_pi o chi on T(pi)-verticals.
    p222 = std::max(p222, tangent_err(vertical_project_tpi(V), tangent_vertical_project(canonical_involution(V))));
    // 2.2 (3): chi exchanges the two vertical subbundles.
    auto C = canonical_involution(V);
    p223_ok = p223_ok && is_tangent_to_vertical(C) && is_tpi_vertical(canonical_involution(C));
    auto U = SecondTangent{s.vec(n), s.vec(k), s.vec(n), s.vec(k), s.vec(n), s.vec(k), s.vec(n), s.vec(k)};
    invol = std::max({invol, second_err(canonical_involution(canonical_involution(U)), U),
                      tangent_err(tau_TE(canonical_involution(U)), T_tau_E(U))});
    // nu_Tpi scalings.
    double l = s.uniform(-3, 3);
    auto nv = vertical_project_tpi(V);
    p223 = std::max({p223, tangent_err(vertical_project_tpi(tau_scale(l, V)), scale(l, nv)),
                     tangent_err(vertical_project_tpi(scale(l, V)), tau_scale(l, nv))});
  }
  c.bound("interchange law", interchange, 1e-12);
  c.bound("tau_E o nu_Tpi = nu_pi o T tau_E", p211, 1e-12);
  c.bound("T tau_E o T(pi)-vertical lift = tau_E-vertical lift", p212, 1e-12);
  c.bound("T nu_pi o tau_E-vertical lift = pi-vertical lift", p213, 1e-12);
  c.bound("T(pi)-vertical lift = chi o T(pi-vertical lift)", p221, 1e-12);
  c.bound("nu_Tpi = T nu_pi o chi", p222, 1e-12);
  c.require("chi maps Ver(T pi) onto T Ver(pi) and back", p223_ok, p223_ok ? 1.0 : 0.0);
  c.bound("chi o chi = id and tau_TE o chi = T tau_E", invol, 1e-12);
  c.bound("nu_Tpi intertwines the two scalar multiplications", p223, 1e-12);
  return c.report();
}

bool criterion8() {
  Criterion c(8, "command line: check on shipped specs");
  bool exits = true, stable = true;
  for (const char* name : {"c0", "c1", "c2", "c3", "c4"}) {
    std::string path = std::string("specs/") + name + ".ini";
    std::ostringstream o1, o2, e1, e2;
    int r1 = run_cli({"--json", "--seed", "42", "check", path}, o1, e1);
    int r2 = run_cli({"--json", "--seed", "42", "check", path}, o2, e2);
    bool ok = r1 == 0 && r2 == 0;
    exits = exits && ok;
    stable = stable && o1.str() == o2.str() && !o1.str().empty();
    c.require(path + " exits 0", ok, r1);
  }
  c.require("JSON output byte-identical across runs", stable, stable ? 1.0 : 0.0);
  return c.report();
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                          criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (auto* run : criteria) {
    try {
      if (!run()) ++failed;
    } catch (const std::exception& e) {
      std::printf("FAIL (exception: %s)\n", e.what());
      ++failed;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 8 criteria passed in %.1f s\n", 8 - failed, secs);
  return failed == 0 ? 0 : 1;
}
