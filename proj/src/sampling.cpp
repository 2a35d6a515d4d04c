#include "linconn/sampling.hpp"

namespace linconn {

Vec Sampler::vec(std::size_t n) {
  Vec v(n);
  for (auto& e : v) e = uniform();
  return v;
}

FiberPoint Sampler::point(const BundleSpace& space, int max_attempts) {
  for (int i = 0; i < max_attempts; ++i) {
    FiberPoint a{vec(space.n()), vec(space.k())};
    if (space.contains(a)) return a;
  }
  throw OutOfDomain("no in-domain sample found");
}

Expr Sampler::polynomial(std::size_t nx, std::size_t ny, bool with_y) {
  std::vector<Expr> vars;
  for (std::size_t i = 0; i < nx; ++i) vars.push_back(Expr::variable(VarKind::X, i));
  if (with_y)
    for (std::size_t A = 0; A < ny; ++A) vars.push_back(Expr::variable(VarKind::Y, A));
  Expr p = Expr::literal(uniform());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    p = p + Expr::literal(uniform()) * vars[i];
    for (std::size_t j = i; j < vars.size(); ++j) p = p + Expr::literal(uniform()) * vars[i] * vars[j];
  }
  return p;
}

HorBasicField Sampler::hor_basic(const BundleSpace& space) {
  std::vector<Expr> X, eta;
  for (std::size_t i = 0; i < space.n(); ++i) X.push_back(polynomial(space.n(), 0, false));
  for (std::size_t A = 0; A < space.k(); ++A) eta.push_back(polynomial(space.n(), 0, false));
  return {std::move(X), std::move(eta)};
}

SectionAlongPi Sampler::section(const BundleSpace& space) {
  SectionAlongPi s;
  for (std::size_t A = 0; A < space.k(); ++A) s.comp.push_back(polynomial(space.n(), space.k(), true));
  return s;
}

SectionAlongPi Sampler::basic_section(const BundleSpace& space) {
  SectionAlongPi s;
  for (std::size_t A = 0; A < space.k(); ++A) s.comp.push_back(polynomial(space.n(), 0, false));
  return s;
}

FieldOnE Sampler::projectable_field(const BundleSpace& space) {
  FieldOnE f;
  for (std::size_t i = 0; i < space.n(); ++i) f.comp_x.push_back(polynomial(space.n(), 0, false));
  for (std::size_t A = 0; A < space.k(); ++A) f.comp_y.push_back(polynomial(space.n(), space.k(), true));
  f.projectable = true;
  return f;
}

FieldOnE Sampler::field(const BundleSpace& space) {
  FieldOnE f;
  for (std::size_t i = 0; i < space.n(); ++i) f.comp_x.push_back(polynomial(space.n(), space.k(), true));
  for (std::size_t A = 0; A < space.k(); ++A) f.comp_y.push_back(polynomial(space.n(), space.k(), true));
  return f;
}

}  // namespace linconn
