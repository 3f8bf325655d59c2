#pragma once

#include <cstddef>
#include <vector>

#include "gsi/input_space.hpp"

namespace gsi {

// Nodes and probability weights (weights sum to one) for one marginal.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1], weights normalized to the uniform law.
QuadratureRule gauss_legendre(std::size_t n);
// Gauss-Hermite for the standard normal law (probabilists' weight).
QuadratureRule gauss_hermite(std::size_t n);

// Legendre mapped to U(a,b), Hermite mapped to N(mean, sd), discrete laws
// use their support exactly (nodes_per_dim ignored).
QuadratureRule rule_for(const Marginal& m, std::size_t nodes_per_dim);

}  // namespace gsi
