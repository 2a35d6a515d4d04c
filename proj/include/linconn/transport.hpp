#pragma once

// Parallel transport for the linearized connection (and the lambda-family)
// by fixed-step classical RK4, flows of Hor-basic fields, and transport as
// the fiber derivative of a flow.

#include <functional>
#include <string>
#include <vector>

#include "linconn/linearize.hpp"

namespace linconn {

/// Curve in E with components given as expressions in t.
struct CurveInE {
  std::vector<Expr> comp_x;
  std::vector<Expr> comp_y;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Position and velocity of a curve at one time.
struct CurveSample {
  Vec x, y, dx, dy;
};

using CurveFn = std::function<CurveSample(double)>;

/// Evaluates the curve and its t-derivative.
CurveSample sample_curve(const CurveInE& curve, double t);
CurveFn as_curve_fn(const CurveInE& curve);

struct TransportKnot {
  double t;
  Vec x, y, z;
};

struct TransportResult {
  Vec z_final;
  std::vector<TransportKnot> trajectory;  // filled when requested, steps + 1 knots
  int steps = 0;
  std::string method = "RK4";
};

/// Integrates z' = -Gamma_iB z^B x'^i + lambda (y' + Gamma x') over [t0, t1]
/// (t1 < t0 integrates backwards). Throws OutOfDomain naming the first stage
/// time that leaves the domain.
TransportResult transport_ode(const LambdaFamilyMember& fam, const CurveFn& curve, double t0, double t1,
                              const Vec& z0, int steps, bool record = false);
TransportResult transport_ode(const LambdaFamilyMember& fam, const CurveInE& curve, const Vec& z0, int steps,
                              bool record = false);
TransportResult transport_ode(const LinearizedConnection& lin, const CurveInE& curve, const Vec& z0, int steps,
                              bool record = false);

/// phi_s(a) for Y = X^h + eta^v.
FiberPoint flow(const NonlinearConnection& conn, const HorBasicField& Y, const FiberPoint& a, double s, int steps);

struct FlowTransport {
  FiberPoint end;
  Vec z;
};

/// (phi_s(a), delta y(s)) from the flow plus its variational equation with
/// delta y(0) = b.
FlowTransport fiber_derivative_flow(const NonlinearConnection& conn, const HorBasicField& Y, const PullbackPoint& p,
                                    double s, int steps);

/// The flow line t -> phi_t(a), t in [0, s], recorded with RK4 at `steps`
/// knots and cubic Hermite interpolated in between.
CurveFn flow_line(const NonlinearConnection& conn, const HorBasicField& Y, const FiberPoint& a, double s, int steps);

/// Estimate of R(v1, v2) at a from the endpoint drift of horizontal lifts of
/// small coordinate parallelograms of side h, symmetrized in +-h and
/// Richardson-extrapolated with 2h.
Vec holonomy_estimate(const NonlinearConnection& conn, const FiberPoint& a, const Vec& v1, const Vec& v2,
                      double h = 1e-2, int substeps = 64);

}  // namespace linconn
