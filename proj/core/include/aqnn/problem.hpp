#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aqnn/expression.hpp"
#include "aqnn/mesh.hpp"

namespace aqnn {

enum class Formulation { Strong, Weak };

Formulation formulation_from_name(const std::string& name);
const char* formulation_name(Formulation f);

// Penalty used when none is configured: 500 for the 2D weak form, 100 for
// the 1D weak form and for the strong form.
double default_beta(Formulation f, int dim);

// -lap(u) = f in the domain, u = g on its boundary.
struct PoissonProblem {
  std::string name;
  Formulation formulation = Formulation::Weak;
  ConvexDomain domain;
  std::function<double(Vec2)> forcing;
  std::function<double(Vec2)> boundary_data;
  std::function<Jet(Vec2)> exact;  // empty when no closed form is known
  double beta = 100.0;

  bool has_exact() const { return static_cast<bool>(exact); }
  int dim() const { return domain.dim(); }
};

// f = -lap(u_exact) and g = u_exact on the boundary.
PoissonProblem problem_from_solution(std::string name, ConvexDomain domain,
                                     const Expression& exact, Formulation f,
                                     std::optional<double> beta = std::nullopt);

// Forcing and boundary data given directly; `exact` may be absent.
PoissonProblem problem_from_data(std::string name, ConvexDomain domain, const Expression& forcing,
                                 const Expression& boundary_data,
                                 const std::optional<Expression>& exact, Formulation f,
                                 std::optional<double> beta = std::nullopt);

// Two rhombi sharing the edge from the origin to (0.5, 1).
ConvexDomain rhombi_domain();

// Catalogue: abse-sinc-1d, abse-sinc-2d, tanh-ring-1d, tanh-ring-2d, rhombi.
// The 1D problems live on [-1, 1] and the 2D sinc and ring problems on
// [-1, 1]^2. Throws InvalidParameter for unknown ids.
PoissonProblem manufactured(const std::string& id, Formulation f,
                            std::optional<double> beta = std::nullopt);
std::vector<std::string> manufactured_ids();

// Activation paired with a catalogue problem ("abse" or "tanh").
std::string catalogue_activation(const std::string& id);

}  // namespace aqnn
