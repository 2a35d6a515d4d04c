#include "linconn/transport.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <string>

namespace linconn {

namespace {

// y <- y + c * d
void axpy(Vec& y, double c, const Vec& d) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * d[i];
}

Vec combo(const Vec& y, double c, const Vec& d) {
  Vec out = y;
  axpy(out, c, d);
  return out;
}

std::string time_label(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

void require_at(const BundleSpace& sp, const Vec& x, const Vec& y, double t) {
  if (!sp.contains(x, y)) throw OutOfDomain("curve leaves the domain at t = " + time_label(t));
}

template <class Rhs>
Vec rk4_step(const Rhs& rhs, double t, const Vec& u, double h) {
  auto k1 = rhs(t, u);
  auto k2 = rhs(t + h / 2, combo(u, h / 2, k1));
  auto k3 = rhs(t + h / 2, combo(u, h / 2, k2));
  auto k4 = rhs(t + h, combo(u, h, k3));
  Vec out = u;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

void check_steps(int steps) {
  if (steps < 1) throw Error("steps must be at least 1");
}

}  // namespace

CurveSample sample_curve(const CurveInE& curve, double t) {
  Env<Dual<double>> env;
  env.bind(VarKind::T, 0, Dual<double>(t, 1.0));
  auto xs = eval_all<Dual<double>>(curve.comp_x, env);
  auto ys = eval_all<Dual<double>>(curve.comp_y, env);
  return {values(xs), values(ys), tangents(xs), tangents(ys)};
}

CurveFn as_curve_fn(const CurveInE& curve) {
  return [curve](double t) { return sample_curve(curve, t); };
}

TransportResult transport_ode(const LambdaFamilyMember& fam, const CurveFn& curve, double t0, double t1,
                              const Vec& z0, int steps, bool record) {
  check_steps(steps);
  const auto& conn = fam.lin.conn();
  const auto& sp = conn.space();
  if (z0.size() != sp.k()) throw DimensionError("initial fiber vector has wrong dimension");
  double lambda = fam.lambda;
  auto rhs = [&](double t, const Vec& z) {
    auto c = curve(t);
    if (c.x.size() != sp.n() || c.y.size() != sp.k()) throw DimensionError("curve has wrong dimensions");
    require_at(sp, c.x, c.y, t);
    auto out = kernel::gamma_fiber_contract<double>(conn, c.x, c.y, z, c.dx);
    for (auto& e : out) e = -e;
    if (lambda != 0.0) axpy(out, lambda, kernel::connector<double>(conn, c.x, c.y, c.dx, c.dy));
    return out;
  };
  TransportResult res;
  res.steps = steps;
  double h = (t1 - t0) / steps;
  Vec z = z0;
  auto knot = [&](double t) {
    auto c = curve(t);
    res.trajectory.push_back({t, c.x, c.y, z});
  };
  if (record) knot(t0);
  for (int i = 0; i < steps; ++i) {
    double t = t0 + i * h;
    z = rk4_step(rhs, t, z, h);
    if (record) knot(i + 1 == steps ? t1 : t + h);
  }
  res.z_final = z;
  return res;
}

TransportResult transport_ode(const LambdaFamilyMember& fam, const CurveInE& curve, const Vec& z0, int steps,
                              bool record) {
  const auto& sp = fam.lin.space();
  if (curve.comp_x.size() != sp.n() || curve.comp_y.size() != sp.k())
    throw DimensionError("curve has wrong dimensions");
  return transport_ode(fam, as_curve_fn(curve), curve.t0, curve.t1, z0, steps, record);
}

TransportResult transport_ode(const LinearizedConnection& lin, const CurveInE& curve, const Vec& z0, int steps,
                              bool record) {
  return transport_ode(LambdaFamilyMember{lin, 0.0}, curve, z0, steps, record);
}

namespace {

struct FlowSystem {
  const NonlinearConnection& conn;
  FieldOnE F;
  std::size_t n, k;

  FlowSystem(const NonlinearConnection& c, const HorBasicField& Y) : conn(c), F(to_field(c, Y)), n(c.n()), k(c.k()) {}

  // State layout: x (n), y (k), then optionally delta y (k).
  Vec rhs(double t, const Vec& u, bool variational) const {
    Vec x(u.begin(), u.begin() + n);
    Vec y(u.begin() + n, u.begin() + n + k);
    if (!conn.space().contains(x, y)) throw OutOfDomain("flow leaves the domain at s = " + time_label(t));
    auto v = kernel::eval_field<double>(F, x, y);
    Vec out = v.x;
    out.insert(out.end(), v.y.begin(), v.y.end());
    if (variational) {
      Vec dl(u.begin() + n + k, u.end());
      auto g = kernel::gamma_fiber_contract<double>(conn, x, y, dl, v.x);
      for (auto& e : g) out.push_back(-e);
    }
    return out;
  }
};

void check_flow_args(const NonlinearConnection& conn, const HorBasicField& Y, const FiberPoint& a, int steps) {
  check_steps(steps);
  if (Y.X().size() != conn.n() || Y.eta().size() != conn.k())
    throw DimensionError("Hor-basic field has wrong dimensions");
  conn.space().require(a);
}

}  // namespace

FiberPoint flow(const NonlinearConnection& conn, const HorBasicField& Y, const FiberPoint& a, double s, int steps) {
  check_flow_args(conn, Y, a, steps);
  FlowSystem sys(conn, Y);
  Vec u = a.x;
  u.insert(u.end(), a.y.begin(), a.y.end());
  double h = s / steps;
  auto rhs = [&](double t, const Vec& v) { return sys.rhs(t, v, false); };
  for (int i = 0; i < steps; ++i) u = rk4_step(rhs, i * h, u, h);
  return {Vec(u.begin(), u.begin() + conn.n()), Vec(u.begin() + conn.n(), u.end())};
}

FlowTransport fiber_derivative_flow(const NonlinearConnection& conn, const HorBasicField& Y, const PullbackPoint& p,
                                    double s, int steps) {
  auto a = p.a();
  check_flow_args(conn, Y, a, steps);
  if (p.z.size() != conn.k()) throw DimensionError("second leg has wrong dimension");
  FlowSystem sys(conn, Y);
  Vec u = p.x;
  u.insert(u.end(), p.y.begin(), p.y.end());
  u.insert(u.end(), p.z.begin(), p.z.end());
  double h = s / steps;
  auto rhs = [&](double t, const Vec& v) { return sys.rhs(t, v, true); };
  for (int i = 0; i < steps; ++i) u = rk4_step(rhs, i * h, u, h);
  std::size_t n = conn.n(), k = conn.k();
  return {{Vec(u.begin(), u.begin() + n), Vec(u.begin() + n, u.begin() + n + k)}, Vec(u.begin() + n + k, u.end())};
}

CurveFn flow_line(const NonlinearConnection& conn, const HorBasicField& Y, const FiberPoint& a, double s, int steps) {
  check_flow_args(conn, Y, a, steps);
  auto sys = std::make_shared<FlowSystem>(conn, Y);
  auto rhs = [sys](double t, const Vec& v) { return sys->rhs(t, v, false); };
  auto knots = std::make_shared<std::vector<Vec>>();
  auto slopes = std::make_shared<std::vector<Vec>>();
  Vec u = a.x;
  u.insert(u.end(), a.y.begin(), a.y.end());
  double h = s / steps;
  for (int i = 0; i <= steps; ++i) {
    knots->push_back(u);
    slopes->push_back(rhs(i * h, u));
    if (i < steps) u = rk4_step(rhs, i * h, u, h);
  }
  std::size_t n = conn.n();
  return [knots, slopes, h, steps, n](double t) {
    double r = h == 0.0 ? 0.0 : t / h;
    int i = static_cast<int>(std::floor(r));
    if (i < 0) i = 0;
    if (i >= steps) i = steps - 1;
    double q = h == 0.0 ? 0.0 : r - i;
    const Vec& p0 = (*knots)[i];
    const Vec& p1 = (*knots)[i + 1];
    const Vec& m0 = (*slopes)[i];
    const Vec& m1 = (*slopes)[i + 1];
    double q2 = q * q, q3 = q2 * q;
    double h00 = 2 * q3 - 3 * q2 + 1, h10 = q3 - 2 * q2 + q, h01 = -2 * q3 + 3 * q2, h11 = q3 - q2;
    double d00 = 6 * q2 - 6 * q, d10 = 3 * q2 - 4 * q + 1, d01 = -6 * q2 + 6 * q, d11 = 3 * q2 - 2 * q;
    Vec pos(p0.size()), vel(p0.size());
    for (std::size_t j = 0; j < p0.size(); ++j) {
      pos[j] = h00 * p0[j] + h10 * h * m0[j] + h01 * p1[j] + h11 * h * m1[j];
      vel[j] = h == 0.0 ? m0[j] : (d00 * p0[j] + d01 * p1[j]) / h + d10 * m0[j] + d11 * m1[j];
    }
    return CurveSample{Vec(pos.begin(), pos.begin() + n), Vec(pos.begin() + n, pos.end()),
                       Vec(vel.begin(), vel.begin() + n), Vec(vel.begin() + n, vel.end())};
  };
}

namespace {

// Horizontal lift of the parallelogram v1, v2, -v1, -v2 with side h; returns
// (y_end - y_start) / h^2.
Vec loop_drift(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v1, const Vec& v2, double h,
               int substeps) {
  Vec x = a.x, y = a.y;
  auto leg = [&](const Vec& v, double sign) {
    Vec dir = v;
    for (auto& e : dir) e *= sign;
    std::vector<Expr> X;
    for (double e : dir) X.push_back(Expr::literal(e));
    std::vector<Expr> eta(conn.k(), Expr::literal(0.0));
    auto end = flow(conn, HorBasicField(X, eta), {x, y}, h, substeps);
    x = end.x;
    y = end.y;
  };
  leg(v1, 1.0);
  leg(v2, 1.0);
  leg(v1, -1.0);
  leg(v2, -1.0);
  Vec d(y.size());
  for (std::size_t A = 0; A < y.size(); ++A) d[A] = (y[A] - a.y[A]) / (h * h);
  return d;
}

}  // namespace

Vec holonomy_estimate(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v1, const Vec& v2, double h,
                      int substeps) {
  conn.space().require(a);
  if (v1.size() != conn.n() || v2.size() != conn.n()) throw DimensionError("base vectors have wrong dimension");
  auto sym = [&](double hh) {
    auto p = loop_drift(conn, a, v1, v2, hh, substeps);
    auto m = loop_drift(conn, a, v1, v2, -hh, substeps);
    for (std::size_t A = 0; A < p.size(); ++A) p[A] = 0.5 * (p[A] + m[A]);
    return p;
  };
  auto e1 = sym(h);
  auto e2 = sym(2 * h);
  for (std::size_t A = 0; A < e1.size(); ++A) e1[A] = (4 * e1[A] - e2[A]) / 3;
  return e1;
}

}  // namespace linconn
