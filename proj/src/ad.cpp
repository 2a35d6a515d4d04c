#include "linconn/ad.hpp"

#include <set>

namespace linconn {

namespace {

std::set<std::string> names_of(const NamedValues& a, const std::vector<const NamedValues*>& rest) {
  std::set<std::string> out;
  for (const auto& [k, _] : a) out.insert(k);
  for (const auto* m : rest)
    for (const auto& [k, _] : *m) out.insert(k);
  return out;
}

double get(const NamedValues& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

}  // namespace

ValueAndDerivative directional(const Expr& e, const NamedValues& point, const NamedValues& seeds) {
  Env<Dual<double>> env;
  for (const auto& name : names_of(point, {&seeds})) env.bind(name, Dual<double>(get(point, name), get(seeds, name)));
  auto r = eval(e, env);
  return {r.re, r.eps};
}

namespace {

double nested_mixed(const Expr& e, const NamedValues& point, const NamedValues& u, const NamedValues& v) {
  Env<Dual2> env;
  for (const auto& name : names_of(point, {&u, &v}))
    env.bind(name, Dual2(Dual<double>(get(point, name), get(u, name)), Dual<double>(get(v, name), 0.0)));
  return fuv(eval(e, env));
}

}  // namespace

// Both seed orders are averaged so that swapping u and v is bitwise symmetric.
double mixed_second(const Expr& e, const NamedValues& point, const NamedValues& u, const NamedValues& v) {
  return 0.5 * (nested_mixed(e, point, u, v) + nested_mixed(e, point, v, u));
}

ValueAndGradient directional_many(const Expr& e, const NamedValues& point, const std::vector<NamedValues>& dirs) {
  std::vector<const NamedValues*> rest;
  for (const auto& d : dirs) rest.push_back(&d);
  Env<Dual1> env;
  for (const auto& name : names_of(point, rest)) {
    std::vector<double> eps;
    eps.reserve(dirs.size());
    for (const auto& d : dirs) eps.push_back(get(d, name));
    env.bind(name, Dual1(get(point, name), std::move(eps)));
  }
  auto r = eval(e, env);
  std::vector<double> g(dirs.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = r.d(i);
  return {r.re, std::move(g)};
}

}  // namespace linconn
