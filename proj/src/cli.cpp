#include "linconn/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "linconn/checks.hpp"
#include "linconn/spec_file.hpp"

namespace linconn {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  if (s.empty()) out.emplace_back();
  return out;
}

// Reals at 17 significant digits; non-finite values become null.
void dump(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(k).dump();
        out += ':';
        dump(v, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

Json tangent_json(const TangentE& w) {
  return Json{{"x", w.at.x}, {"y", w.at.y}, {"dx", w.dx}, {"dy", w.dy}};
}

Json check_json(const CheckResult& c) {
  Json j{{"name", c.name},           {"status", to_string(c.status)}, {"max_error", c.max_error},
         {"samples", c.samples},     {"seed", c.seed},                {"tolerance", c.tolerance}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

Vec one_block(const std::string& text, std::size_t len, const char* what) {
  auto blocks = parse_blocks(text);
  if (blocks.size() != 1 || blocks[0].size() != len)
    throw DimensionError(std::string(what) + " needs " + std::to_string(len) + " comma-separated values");
  return blocks[0];
}

std::pair<Vec, Vec> two_blocks(const std::string& text, std::size_t n, std::size_t k, const char* what) {
  auto blocks = parse_blocks(text);
  if (blocks.size() != 2 || blocks[0].size() != n || blocks[1].size() != k)
    throw DimensionError(std::string(what) + " needs " + std::to_string(n) + " and " + std::to_string(k) +
                         " values separated by ';'");
  return {blocks[0], blocks[1]};
}

std::vector<Expr> parse_exprs(const std::string& text, std::size_t len, const char* what) {
  std::vector<Expr> out;
  for (const auto& part : split(text, ',')) out.push_back(parse(part));
  if (out.size() != len) throw DimensionError(std::string(what) + " needs " + std::to_string(len) + " expressions");
  return out;
}

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  int samples = 256;
  double tol = 1e-7;
};

struct Output {
  Json doc;
  std::vector<std::string> lines;
  std::vector<CheckResult> checks;
};

void emit(const Globals& g, Output& o, std::ostream& out) {
  if (g.json) {
    Json checks = Json::array();
    for (const auto& c : o.checks) checks.push_back(check_json(c));
    o.doc["checks"] = checks;
    std::string s;
    dump(o.doc, s);
    out << s << '\n';
    return;
  }
  for (const auto& l : o.lines) out << l << '\n';
  for (const auto& c : o.checks) {
    out << to_string(c.status) << "  " << c.name << "  max_error=" << fmt(c.max_error) << " tol=" << fmt(c.tolerance)
        << " samples=" << c.samples;
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << '\n';
  }
}

Output start(const char* command, const std::string& spec_path, Json inputs) {
  Output o;
  o.doc = Json{{"command", command}, {"spec", spec_path}, {"inputs", std::move(inputs)}, {"outputs", Json::object()}};
  return o;
}

int exit_for(const Output& o) {
  for (const auto& c : o.checks)
    if (c.status == CheckStatus::Fail) return kExitCheckFailed;
  return kExitPass;
}

CheckResult single_check(std::string name, double err, double tol) {
  CheckResult c;
  c.name = std::move(name);
  c.max_error = err;
  c.tolerance = tol;
  c.samples = 1;
  c.status = err <= tol ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

}  // namespace

std::vector<std::vector<double>> parse_blocks(const std::string& text) {
  std::vector<std::vector<double>> out;
  for (const auto& block : split(text, ';')) {
    std::vector<double> vals;
    if (!block.empty())
      for (const auto& item : split(block, ',')) {
        double v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || p != item.data() + item.size())
          throw SyntaxError("malformed number '" + item + "'", 0);
        vals.push_back(v);
      }
    out.push_back(std::move(vals));
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linearization of nonlinear connections", "linconn"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--samples", g.samples, "Random draws per check")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Tolerance of the cross-formula checks")->check(CLI::PositiveNumber);

  std::string spec_path;
  auto* check = app.add_subcommand("check", "Run the invariant suite on a spec");
  check->add_option("spec", spec_path, "Spec file")->required();

  std::string point, z, w, v1, v2, sigma, eta, curve_arg, field_arg;
  double lambda = 0.0, s = 1.0;
  int steps = 1000;
  std::optional<double> t0, t1;
  bool oracle = false, trajectory = false;

  auto* lin = app.add_subcommand("linearize", "Print Gamma, its fiber Jacobian, B(a,b)w and B_lambda(a,b)w");
  lin->add_option("spec", spec_path, "Spec file")->required();
  lin->add_option("--point", point, "Point a as 'x;y'")->required();
  lin->add_option("--z", z, "Second leg b")->required();
  lin->add_option("--w", w, "Tangent at a as 'dx;dy'")->required();
  lin->add_option("--lambda", lambda, "Family parameter");

  auto* curv = app.add_subcommand("curvature", "Print R, the Riemann-type and Berwald components, and flatness");
  curv->add_option("spec", spec_path, "Spec file")->required();
  curv->add_option("--point", point, "Point a as 'x;y'")->required();
  curv->add_option("--v1", v1, "First base vector")->required();
  curv->add_option("--v2", v2, "Second base vector")->required();
  curv->add_option("--sigma", sigma, "Section name or comma-separated expressions");
  curv->add_option("--z", z, "Constant section values, used when --sigma is absent");
  curv->add_option("--eta", eta, "Basic section for the Berwald sample (default all ones)");
  curv->add_flag("--oracle", oracle, "Also estimate R from small holonomy loops");

  auto* tr = app.add_subcommand("transport", "Parallel transport along a curve");
  tr->add_option("spec", spec_path, "Spec file")->required();
  tr->add_option("--curve", curve_arg, "Curve name or 'x exprs;y exprs' in t")->required();
  tr->add_option("--z0", z, "Initial fiber vector")->required();
  tr->add_option("--steps", steps, "RK4 steps")->check(CLI::PositiveNumber);
  tr->add_option("--lambda", lambda, "Family parameter");
  tr->add_option("--t0", t0, "Start time for expression curves (default 0)");
  tr->add_option("--t1", t1, "End time for expression curves (default 1)");
  tr->add_flag("--trajectory", trajectory, "Include the sampled trajectory");

  auto* ft = app.add_subcommand("flow-transport", "Transport as the fiber derivative of a flow");
  ft->add_option("spec", spec_path, "Spec file")->required();
  ft->add_option("--field", field_arg, "Field name or 'X exprs;eta exprs' in x")->required();
  ft->add_option("--point", point, "Point a as 'x;y'")->required();
  ft->add_option("--z", z, "Second leg b")->required();
  ft->add_option("--s", s, "Flow time");
  ft->add_option("--steps", steps, "RK4 steps")->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    auto spec = load_spec(spec_path);
    const auto& conn = spec.conn;
    std::size_t n = conn.n(), k = conn.k();
    LinearizedConnection L(conn);
    Output o;

    if (check->parsed()) {
      o = start("check", spec_path, Json{{"samples", g.samples}, {"seed", g.seed}, {"tol", g.tol}});
      auto rep = run_checks(conn, {g.samples, g.seed, g.tol});
      o.checks = rep.checks;
      o.doc["outputs"] = Json{{"status", rep.passed() ? "pass" : "fail"}, {"check_count", rep.checks.size()}};
      o.lines.push_back("spec " + spec_path + ": n=" + std::to_string(n) + " k=" + std::to_string(k));
      emit(g, o, out);
      o.lines.clear();
      if (!g.json) out << "overall: " << (rep.passed() ? "pass" : "fail") << '\n';
      return exit_for(o);
    }

    if (lin->parsed()) {
      auto [x, y] = two_blocks(point, n, k, "--point");
      auto zv = one_block(z, k, "--z");
      auto [dx, dy] = two_blocks(w, n, k, "--w");
      FiberPoint a{x, y};
      PullbackPoint p{x, y, zv};
      TangentE wt{a, dx, dy};
      auto gam = gamma_at(conn, a);
      auto jac = gamma_fiber_jacobian(L, a);
      auto B = B_apply(L, p, wt);
      auto Bl = B_lambda_apply({L, lambda}, p, wt);
      auto Bd = B_from_definition(L, p, wt);
      Json gj = Json::array(), jj = Json::array();
      for (std::size_t A = 0; A < k; ++A) {
        Json row = Json::array(), jrow = Json::array();
        for (std::size_t i = 0; i < n; ++i) {
          row.push_back(gam(A, i));
          Json inner = Json::array();
          for (std::size_t Bi = 0; Bi < k; ++Bi) inner.push_back(jac(A, i, Bi));
          jrow.push_back(inner);
        }
        gj.push_back(row);
        jj.push_back(jrow);
      }
      o = start("linearize", spec_path,
                Json{{"x", x}, {"y", y}, {"z", zv}, {"dx", dx}, {"dy", dy}, {"lambda", lambda}});
      o.doc["outputs"] = Json{{"gamma", gj}, {"gamma_fiber_jacobian", jj}, {"B", tangent_json(B)}, {"B_lambda", tangent_json(Bl)}};
      o.checks.push_back(single_check("B_definition_vs_formula", std::max(rel_error(B.dy, Bd.dy), rel_error(B.dx, Bd.dx)), 1e-9));
      std::string gs, js;
      dump(gj, gs);
      dump(jj, js);
      o.lines.push_back("gamma = " + gs);
      o.lines.push_back("gamma_fiber_jacobian = " + js);
      o.lines.push_back("B(a,b)w at b=" + fmt(zv) + ": dx=" + fmt(B.dx) + " dy=" + fmt(B.dy));
      o.lines.push_back("B_lambda(a,b)w (lambda=" + fmt(lambda) + "): dx=" + fmt(Bl.dx) + " dy=" + fmt(Bl.dy));
      emit(g, o, out);
      return exit_for(o);
    }

    if (curv->parsed()) {
      auto [x, y] = two_blocks(point, n, k, "--point");
      auto a1 = one_block(v1, n, "--v1");
      auto a2 = one_block(v2, n, "--v2");
      FiberPoint a{x, y};
      SectionAlongPi sec;
      std::string sigma_label;
      if (!sigma.empty()) {
        if (auto it = spec.sections.find(sigma); it != spec.sections.end()) sec = it->second;
        else sec.comp = parse_exprs(sigma, k, "--sigma");
        sigma_label = sigma;
      } else if (!z.empty()) {
        for (double c : one_block(z, k, "--z")) sec.comp.push_back(Expr::literal(c));
        sigma_label = z;
      } else {
        throw Error("curvature needs --sigma or --z");
      }
      std::vector<Expr> eta_exprs = eta.empty() ? std::vector<Expr>(k, Expr::literal(1.0)) : parse_exprs(eta, k, "--eta");
      for (const auto& e : eta_exprs)
        if (e.references(VarKind::Y) || e.references(VarKind::Z) || e.references(VarKind::T))
          throw Error("--eta must depend on x only");
      std::vector<Expr> X;
      for (double c : a1) X.push_back(Expr::literal(c));
      auto R = curvature_R(conn, a, a1, a2);
      auto rc = riemann_component(L, a1, a2, sec, a);
      auto th = berwald_component(L, eta_exprs, HorBasicField(X, std::vector<Expr>(k, Expr::literal(0.0))), sec, a);
      auto rep = flatness_report(L, std::min(g.samples, 64), g.seed);
      o = start("curvature", spec_path,
                Json{{"x", x}, {"y", y}, {"v1", a1}, {"v2", a2}, {"sigma", sigma_label}, {"eta", eta.empty() ? "1" : eta}});
      Json outj{{"R", R},
                {"riemann_component", rc},
                {"berwald_sample", th},
                {"flatness",
                 Json{{"verdict", rep.flat ? "flat" : "non-flat"},
                      {"basic", rep.basic},
                      {"max_curvature", rep.max_curvature},
                      {"max_berwald", rep.max_berwald},
                      {"samples", rep.evaluated},
                      {"seed", rep.seed},
                      {"threshold", rep.threshold}}}};
      o.lines.push_back("R(v1, v2) = " + fmt(R));
      if (oracle) {
        auto hol = holonomy_estimate(conn, a, a1, a2);
        outj["R_holonomy"] = hol;
        o.lines.push_back("R from holonomy loops = " + fmt(hol));
        o.checks.push_back(single_check("curvature_vs_holonomy", abs_error(R, hol), 1e-5));
      }
      o.doc["outputs"] = outj;
      o.lines.push_back("riemann component = " + fmt(rc));
      o.lines.push_back("berwald sample = " + fmt(th));
      o.lines.push_back(std::string("flatness: ") + (rep.flat ? "flat" : "non-flat") + " (max |Curv| " +
                        fmt(rep.max_curvature) + " over " + std::to_string(rep.evaluated) + " samples, seed " +
                        std::to_string(rep.seed) + "), " + (rep.basic ? "basic" : "non-basic"));
      emit(g, o, out);
      return exit_for(o);
    }

    if (tr->parsed()) {
      CurveInE c;
      if (auto it = spec.curves.find(curve_arg); it != spec.curves.end()) {
        c = it->second;
        if (t0) c.t0 = *t0;
        if (t1) c.t1 = *t1;
      } else {
        auto parts = split(curve_arg, ';');
        if (parts.size() != 2) throw Error("unknown curve '" + curve_arg + "'");
        c.comp_x = parse_exprs(parts[0], n, "curve x part");
        c.comp_y = parse_exprs(parts[1], k, "curve y part");
        for (const auto* comps : {&c.comp_x, &c.comp_y})
          for (const auto& e : *comps)
            if (e.references(VarKind::X) || e.references(VarKind::Y) || e.references(VarKind::Z))
              throw Error("curve expressions may only use t");
        c.t0 = t0.value_or(0.0);
        c.t1 = t1.value_or(1.0);
      }
      auto z0 = one_block(z, k, "--z0");
      auto res = transport_ode(LambdaFamilyMember{L, lambda}, c, z0, steps, trajectory);
      o = start("transport", spec_path,
                Json{{"curve", curve_arg}, {"t0", c.t0}, {"t1", c.t1}, {"z0", z0}, {"steps", steps}, {"lambda", lambda}});
      Json outj{{"z_final", res.z_final}, {"steps", res.steps}, {"method", res.method}};
      if (trajectory) {
        Json tj = Json::array();
        for (const auto& kn : res.trajectory) tj.push_back(Json{{"t", kn.t}, {"x", kn.x}, {"y", kn.y}, {"z", kn.z}});
        outj["trajectory"] = tj;
      }
      o.doc["outputs"] = outj;
      o.lines.push_back("z(" + fmt(c.t1) + ") = " + fmt(res.z_final) + "  [" + res.method + ", " +
                        std::to_string(res.steps) + " steps]");
      emit(g, o, out);
      return exit_for(o);
    }

    // flow-transport
    std::optional<HorBasicField> Y;
    if (auto it = spec.fields.find(field_arg); it != spec.fields.end()) {
      Y = it->second;
    } else {
      auto parts = split(field_arg, ';');
      if (parts.size() != 2) throw Error("unknown field '" + field_arg + "'");
      Y.emplace(parse_exprs(parts[0], n, "field X part"), parse_exprs(parts[1], k, "field eta part"));
    }
    auto [x, y] = two_blocks(point, n, k, "--point");
    auto zv = one_block(z, k, "--z");
    PullbackPoint p{x, y, zv};
    auto fd = fiber_derivative_flow(conn, *Y, p, s, steps);
    auto line = flow_line(conn, *Y, p.a(), s, 2 * steps);
    auto res = transport_ode(LambdaFamilyMember{L, 0.0}, line, 0.0, s, zv, steps);
    o = start("flow-transport", spec_path,
              Json{{"field", field_arg}, {"x", x}, {"y", y}, {"z", zv}, {"s", s}, {"steps", steps}});
    o.doc["outputs"] = Json{{"end", Json{{"x", fd.end.x}, {"y", fd.end.y}}},
                            {"z_fiber_derivative", fd.z},
                            {"z_transport", res.z_final}};
    o.checks.push_back(single_check("flow_transport_agreement", rel_error(fd.z, res.z_final), 1e-6));
    o.lines.push_back("phi_s(a) = x " + fmt(fd.end.x) + ", y " + fmt(fd.end.y));
    o.lines.push_back("fiber derivative of flow: z = " + fmt(fd.z));
    o.lines.push_back("transport along flow line: z = " + fmt(res.z_final));
    emit(g, o, out);
    return exit_for(o);
  } catch (const OutOfDomain& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace linconn
