#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsi/input_space.hpp"
#include "gsi/model.hpp"

namespace gsi::corpus {

// A named model together with the input law it is studied under.
struct Entry {
  VectorModel model;
  InputSpace space;
};

using Parameters = std::map<std::string, std::vector<double>>;

// Known names:
//   identity_2       f(x1,x2) = (x1,x2) on N(0,1)^2, so Sigma = Id_2
//   linear           f(x) = A x; params "a" (row-major), "rows"; N(0,1)^p
//   sum_prod         f(x1,x2) = (x1+x2, x1*x2) on U(0,1)^2
//   u_only           f(x) = (s, s^2, 0...) with s = sum_{i in u} x_i;
//                    params "p" (2), "u" (1-based, default {1}), "pad" (0)
//   interaction_2    f(x1,x2) = (x1*x2, 0) on uniform {-1,+1}^2
//   constant         f(x) = (c,...,c); params "p" (2), "k" (2), "value" (1)
//   ishigami         scalar Ishigami function on U(-pi,pi)^3; params "a" (7), "b" (0.1)
// Unknown names or malformed parameters raise configuration errors naming
// `field` (or `field.<param>`).
Entry make(const std::string& name, const Parameters& params = {}, const std::string& field = "model");

std::vector<std::string> names();

// Closed Sobol index of the Ishigami function for u subset of {0,1,2}
// (0-based), from the textbook partial variances.
double ishigami_closed_index(const std::vector<std::size_t>& u, double a = 7.0, double b = 0.1);

}  // namespace gsi::corpus
