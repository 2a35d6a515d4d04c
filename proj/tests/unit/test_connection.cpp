#include <gtest/gtest.h>

#include "linconn/checks.hpp"
#include "linconn/sampling.hpp"
#include "linconn/transport.hpp"
#include "oracles.hpp"

using namespace linconn;

namespace {

FieldOnE field(std::vector<const char*> cx, std::vector<const char*> cy) {
  FieldOnE W;
  for (auto* e : cx) W.comp_x.push_back(parse(e));
  for (auto* e : cy) W.comp_y.push_back(parse(e));
  return W;
}

/// [W1, W2] by central differences of the component functions.
Vec fd_bracket(const FieldOnE& W1, const FieldOnE& W2, const FiberPoint& p) {
  auto comps = [](const FieldOnE& W, std::size_t n) {
    return oracle::VecFn([&W, n](const Vec& xy) {
      Vec x(xy.begin(), xy.begin() + n), y(xy.begin() + n, xy.end());
      auto v = eval_field(W, {x, y});
      return oracle::concat(v.dx, v.dy);
    });
  };
  std::size_t n = p.x.size();
  auto xy = oracle::concat(p.x, p.y);
  auto f1 = comps(W1, n), f2 = comps(W2, n);
  auto d2 = oracle::fd(f2, xy, f1(xy)), d1 = oracle::fd(f1, xy, f2(xy));
  for (std::size_t i = 0; i < d2.size(); ++i) d2[i] -= d1[i];
  return d2;
}

}  // namespace

TEST(NonlinearConnection, RejectsBadCoefficients) {
  BundleSpace s(1, 1);
  EXPECT_THROW(NonlinearConnection(s, {{parse("z1")}}), Error);
  EXPECT_THROW(NonlinearConnection(s, {{parse("t")}}), Error);
  EXPECT_THROW(NonlinearConnection(s, {{parse("1"), parse("2")}}), DimensionError);
  EXPECT_THROW(NonlinearConnection(s, {}), DimensionError);
}

TEST(GammaAt, Examples) {
  EXPECT_EQ(gamma_at(oracle::C1(), {{0}, {3}})(0, 0), 9.0);
  auto z = gamma_at(oracle::C0(), {{0.3, 0.1}, {0.2, -0.4}});
  for (double e : z.data) EXPECT_EQ(e, 0.0);
  auto g = gamma_at(oracle::C4(), {{0}, {3, 4}});
  EXPECT_EQ(g.rows, 2u);
  EXPECT_EQ(g.cols, 1u);
  EXPECT_DOUBLE_EQ(g(0, 0), 5.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_THROW(gamma_at(oracle::C4(), {{0}, {0, 0}}), OutOfDomain);
}

TEST(HorizontalLift, Examples) {
  auto c1 = oracle::C1();
  auto h = horizontal_lift(c1, {{0}, {1}}, {1});
  EXPECT_EQ(h.dx, Vec{1});
  EXPECT_EQ(h.dy, Vec{-1});
  auto z = horizontal_lift(c1, {{0}, {1}}, {0});
  EXPECT_EQ(z.dx, Vec{0});
  EXPECT_EQ(z.dy[0], 0.0);
}

TEST(Connector, Examples) {
  auto c1 = oracle::C1();
  TangentE w{{{0}, {1}}, {1}, {5}};
  EXPECT_EQ(connector(c1, w), Vec{6});
  auto ph = project_h(c1, w), pv = project_v(c1, w);
  EXPECT_EQ(ph.dx, Vec{1});
  EXPECT_EQ(ph.dy, Vec{-1});
  EXPECT_EQ(pv.dx, Vec{0});
  EXPECT_EQ(pv.dy, Vec{6});
  auto v = project_h(c1, vertical_lift({{0}, {1}}, {4}));
  EXPECT_EQ(v.dx, Vec{0});
  EXPECT_EQ(v.dy, Vec{0});
}

TEST(Connector, SplittingProperties) {
  Sampler s(21);
  for (const auto& conn : oracle::all()) {
    for (int i = 0; i < 200; ++i) {
      auto a = s.point(conn.space());
      auto v = s.vec(conn.n());
      EXPECT_LE(abs_error(connector(conn, horizontal_lift(conn, a, v)), Vec(conn.k(), 0.0)), 1e-14);
      auto b = s.vec(conn.k());
      EXPECT_LE(rel_error(connector(conn, vertical_lift(a, b)), b), 1e-15);
      TangentE w{a, s.vec(conn.n()), s.vec(conn.k())};
      auto sum = add(project_h(conn, w), project_v(conn, w));
      EXPECT_LE(rel_error(sum.dx, w.dx), 1e-14);
      EXPECT_LE(rel_error(sum.dy, w.dy), 1e-14);
      EXPECT_LE(abs_error(project_h(conn, project_v(conn, w)).dy, Vec(conn.k(), 0.0)), 1e-14);
    }
  }
}

TEST(Bracket, Examples) {
  FiberPoint p{{0.3}, {-0.7}};
  auto W = field({"x1*y1"}, {"sin(y1) + x1^2"});
  auto ww = bracket(W, W, p);
  EXPECT_EQ(ww.dx, Vec{0});
  EXPECT_EQ(ww.dy, Vec{0});
  auto d = bracket(field({"1"}, {"0"}), field({"0"}, {"x1"}), p);
  EXPECT_EQ(d.dx, Vec{0});
  EXPECT_EQ(d.dy, Vec{1});
}

TEST(Bracket, MatchesFiniteDifferences) {
  Sampler s(22);
  BundleSpace space(2, 2);
  for (int i = 0; i < 100; ++i) {
    auto W1 = s.field(space), W2 = s.field(space);
    auto p = s.point(space);
    auto b = bracket(W1, W2, p);
    EXPECT_LE(oracle::max_abs_diff(oracle::concat(b.dx, b.dy), fd_bracket(W1, W2, p)), 1e-7);
  }
}

TEST(Bracket, JacobiIdentity) {
  Sampler s(23);
  BundleSpace space(2, 1);
  for (int i = 0; i < 100; ++i) {
    auto W1 = s.field(space), W2 = s.field(space), W3 = s.field(space);
    auto p = s.point(space);
    auto f1 = kernel::field_fn(W1), f2 = kernel::field_fn(W2), f3 = kernel::field_fn(W3);
    auto br = [](const auto& f, const auto& g) {
      return [f, g](const auto& x, const auto& y) { return kernel::bracket_of(f, g, x, y); };
    };
    auto a = br(f1, br(f2, f3))(p.x, p.y);
    auto b = br(f2, br(f3, f1))(p.x, p.y);
    auto c = br(f3, br(f1, f2))(p.x, p.y);
    for (std::size_t j = 0; j < a.x.size(); ++j) EXPECT_NEAR(a.x[j] + b.x[j] + c.x[j], 0.0, 1e-12);
    for (std::size_t j = 0; j < a.y.size(); ++j) EXPECT_NEAR(a.y[j] + b.y[j] + c.y[j], 0.0, 1e-12);
  }
}

TEST(CurvatureR, VanishingCases) {
  Sampler s(24);
  auto c1 = oracle::C1();
  auto c3 = oracle::C3();
  auto cst = oracle::make(2, 2, {{"1", "-2"}, {"3.5", "0.25"}});
  for (int i = 0; i < 50; ++i) {
    auto a1 = s.point(c1.space());
    EXPECT_EQ(curvature_R(c1, a1, s.vec(1), s.vec(1)), Vec{0});
    auto a3 = s.point(c3.space());
    EXPECT_LE(abs_error(curvature_R(c3, a3, s.vec(1), s.vec(1)), Vec(2, 0.0)), 1e-15);
    auto ac = s.point(cst.space());
    EXPECT_EQ(curvature_R(cst, ac, s.vec(2), s.vec(2)), Vec(2, 0.0));
  }
}

TEST(CurvatureR, C2AgainstHolonomyAndFiniteDifferences) {
  auto c2 = oracle::C2();
  FiberPoint a{{0, 0}, {1}};
  Vec e1{1, 0}, e2{0, 1};
  auto R = curvature_R(c2, a, e1, e2);
  EXPECT_NEAR(R[0], -1.0, 1e-14);
  EXPECT_LE(abs_error(holonomy_estimate(c2, a, e1, e2), R), 1e-5);
  // [e1^h, e2^h] by finite differences of the lifted fields.
  auto h1 = horizontal_lift_field(c2, e1), h2 = horizontal_lift_field(c2, e2);
  auto fb = fd_bracket(h1, h2, a);
  EXPECT_NEAR(fb[0], 0.0, 1e-8);
  EXPECT_NEAR(fb[1], 0.0, 1e-8);
  EXPECT_NEAR(fb[2], R[0], 1e-7);
}

TEST(CurvatureR, AntisymmetricAndBilinear) {
  Sampler s(25);
  auto c2 = oracle::C2();
  for (int i = 0; i < 100; ++i) {
    auto a = s.point(c2.space());
    auto u = s.vec(2), v = s.vec(2), w = s.vec(2);
    double al = s.uniform();
    auto ruv = curvature_R(c2, a, u, v), rvu = curvature_R(c2, a, v, u);
    EXPECT_NEAR(ruv[0], -rvu[0], 1e-14);
    Vec au_w{al * u[0] + w[0], al * u[1] + w[1]};
    EXPECT_NEAR(curvature_R(c2, a, au_w, v)[0], al * ruv[0] + curvature_R(c2, a, w, v)[0], 1e-12);
  }
}

TEST(Projectability, Certification) {
  BundleSpace space(1, 1);
  auto P = field({"x1^2"}, {"y1*x1"});
  EXPECT_TRUE(certify_projectable(P, space));
  EXPECT_EQ(P.projectable, std::optional<bool>(true));
  auto Q = field({"x1 + y1"}, {"0"});
  EXPECT_FALSE(certify_projectable(Q, space));
  EXPECT_EQ(Q.projectable, std::optional<bool>(false));
  // y appears but cancels.
  auto R = field({"x1 + y1 - y1"}, {"0"});
  EXPECT_TRUE(certify_projectable(R, space));
}

TEST(HorBasicField, RejectsFiberDependence) {
  EXPECT_THROW(HorBasicField({parse("y1")}, {parse("0")}), Error);
  EXPECT_THROW(HorBasicField({parse("1")}, {parse("z1")}), Error);
  EXPECT_NO_THROW(HorBasicField({parse("x1")}, {parse("sin(x1)")}));
}

TEST(FieldConstructions, AgreeWithPointwiseMaps) {
  Sampler s(26);
  for (const auto& conn : oracle::all()) {
    for (int i = 0; i < 50; ++i) {
      auto a = s.point(conn.space());
      auto v = s.vec(conn.n());
      auto h = eval_field(horizontal_lift_field(conn, v), a);
      auto ref = horizontal_lift(conn, a, v);
      EXPECT_LE(rel_error(h.dy, ref.dy), 1e-14);
      auto W = s.field(conn.space());
      auto Wa = eval_field(W, a);
      EXPECT_LE(rel_error(eval_field(horizontal_part(conn, W), a).dy, project_h(conn, Wa).dy), 1e-14);
      EXPECT_LE(rel_error(eval_section(connector_section(conn, W), a), connector(conn, Wa)), 1e-14);
      auto Y = s.hor_basic(conn.space());
      auto Ya = eval_field(to_field(conn, Y), a);
      auto X = kernel::eval_exprs<double>(Y.X(), a.x, a.y);
      auto eta = kernel::eval_exprs<double>(Y.eta(), a.x, a.y);
      auto expect = add(horizontal_lift(conn, a, X), vertical_lift(a, eta));
      EXPECT_LE(rel_error(Ya.dy, expect.dy), 1e-14);
    }
  }
}

TEST(LinearConnection, ConnectorGivesClassicalCovariantDerivative) {
  // C3 is linear with gamma = diag(1, 2); for basic sigma, kappa(T sigma(v)) = d sigma(v) + gamma sigma v.
  auto c3 = oracle::C3();
  Sampler s(27);
  for (int i = 0; i < 100; ++i) {
    double x = s.uniform(), v = s.uniform();
    // sigma(x) = (x^2, sin x)
    Vec sig{x * x, std::sin(x)}, dsig{2 * x * v, std::cos(x) * v};
    auto k = connector(c3, {{{x}, sig}, {v}, dsig});
    EXPECT_NEAR(k[0], 2 * x * v + 1 * sig[0] * v, 1e-14);
    EXPECT_NEAR(k[1], std::cos(x) * v + 2 * sig[1] * v, 1e-14);
  }
}

TEST(Domain, OutOfDomainRaised) {
  auto c4 = oracle::C4();
  EXPECT_THROW(horizontal_lift(c4, {{0}, {0, 0}}, {1}), OutOfDomain);
  EXPECT_THROW(connector(c4, {{{0}, {0, 0}}, {1}, {0, 0}}), OutOfDomain);
  EXPECT_THROW(curvature_R(c4, {{0}, {0, 0}}, {1}, {1}), OutOfDomain);
}
