#include "aqnn/problem.hpp"

#include "aqnn/error.hpp"

namespace aqnn {

Formulation formulation_from_name(const std::string& name) {
  if (name == "strong") return Formulation::Strong;
  if (name == "weak") return Formulation::Weak;
  throw InvalidParameter("unknown formulation '" + name + "' (expected strong or weak)");
}

const char* formulation_name(Formulation f) { return f == Formulation::Strong ? "strong" : "weak"; }

double default_beta(Formulation f, int dim) {
  if (f == Formulation::Weak && dim == 2) return 500.0;
  return 100.0;
}

namespace {

void check_dims(const ConvexDomain& domain, const Expression& e) {
  if (e.dim() != domain.dim()) {
    throw InvalidParameter("expression '" + e.text() + "' has the wrong dimension for the domain");
  }
}

}  // namespace

PoissonProblem problem_from_solution(std::string name, ConvexDomain domain,
                                     const Expression& exact, Formulation f,
                                     std::optional<double> beta) {
  check_dims(domain, exact);
  PoissonProblem p;
  p.name = std::move(name);
  p.formulation = f;
  p.beta = beta.value_or(default_beta(f, domain.dim()));
  if (!(p.beta > 0.0)) throw InvalidParameter("beta must be positive");
  p.domain = std::move(domain);
  p.exact = [exact](Vec2 x) { return exact.jet(x); };
  p.forcing = [exact](Vec2 x) { return -exact.jet(x).laplacian; };
  p.boundary_data = [exact](Vec2 x) { return exact(x); };
  return p;
}

PoissonProblem problem_from_data(std::string name, ConvexDomain domain, const Expression& forcing,
                                 const Expression& boundary_data,
                                 const std::optional<Expression>& exact, Formulation f,
                                 std::optional<double> beta) {
  check_dims(domain, forcing);
  check_dims(domain, boundary_data);
  PoissonProblem p;
  p.name = std::move(name);
  p.formulation = f;
  p.beta = beta.value_or(default_beta(f, domain.dim()));
  if (!(p.beta > 0.0)) throw InvalidParameter("beta must be positive");
  p.domain = std::move(domain);
  p.forcing = [forcing](Vec2 x) { return forcing(x); };
  p.boundary_data = [boundary_data](Vec2 x) { return boundary_data(x); };
  if (exact) {
    check_dims(p.domain, *exact);
    p.exact = [e = *exact](Vec2 x) { return e.jet(x); };
  }
  return p;
}

ConvexDomain rhombi_domain() {
  return ConvexDomain::from_polygons({
      ConvexPolygon({{0.0, 0.0}, {1.0, 0.5}, {1.5, 1.5}, {0.5, 1.0}}),
      ConvexPolygon({{0.0, 0.0}, {0.5, 1.0}, {-0.5, 1.5}, {-1.0, 0.5}}),
  });
}

std::vector<std::string> manufactured_ids() {
  return {"abse-sinc-1d", "abse-sinc-2d", "tanh-ring-1d", "tanh-ring-2d", "rhombi"};
}

std::string catalogue_activation(const std::string& id) {
  if (id.rfind("tanh", 0) == 0) return "tanh";
  if (id.rfind("abse", 0) == 0 || id == "rhombi") return "abse";
  throw InvalidParameter("unknown problem '" + id + "'");
}

PoissonProblem manufactured(const std::string& id, Formulation f, std::optional<double> beta) {
  if (id == "abse-sinc-1d") {
    return problem_from_solution(id, ConvexDomain::interval(-1.0, 1.0),
                                 Expression::parse("sinc(3*pi*x)", 1), f, beta);
  }
  if (id == "abse-sinc-2d") {
    return problem_from_solution(id, ConvexDomain::square(-1.0, 1.0),
                                 Expression::parse("sinc(2*pi*x)*sinc(2*pi*y)", 2), f, beta);
  }
  if (id == "tanh-ring-1d") {
    return problem_from_solution(id, ConvexDomain::interval(-1.0, 1.0),
                                 Expression::parse("tanh(10*(x^2 - 0.5^2))", 1), f, beta);
  }
  if (id == "tanh-ring-2d") {
    return problem_from_solution(id, ConvexDomain::square(-1.0, 1.0),
                                 Expression::parse("tanh(10*(x^2 + y^2 - 0.5^2))", 2), f, beta);
  }
  if (id == "rhombi") {
    return problem_from_data(id, rhombi_domain(), Expression::parse("x + y", 2),
                             Expression::parse("0", 2), std::nullopt, f, beta);
  }
  throw InvalidParameter("unknown problem '" + id + "'");
}

}  // namespace aqnn
