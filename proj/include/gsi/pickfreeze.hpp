#pragma once

#include <cstddef>
#include <string>

#include "gsi/input_space.hpp"
#include "gsi/kernels.hpp"
#include "gsi/linalg.hpp"
#include "gsi/model.hpp"
#include "gsi/rng.hpp"
#include "gsi/subset.hpp"

namespace gsi {

// X (N x p) and the independent copy X'_~u (N x (p - r)). X and X' draw from
// disjoint streams of the same seed; column j of X' is complement coordinate j.
struct PickFreezeDesign {
  RowMatrix x;
  RowMatrix x_prime;
  SubsetIndex u;
  Seed seed = 0;

  // Rows of (X_u, X'_~u) reassembled in original coordinate order.
  RowMatrix frozen_inputs() const;
};

// Paired outputs Y_i = f(X_i), Y^u_i = f(X_{i,u}, X'_{i,~u}).
struct PickFreezeSample {
  RowMatrix y;
  RowMatrix y_u;
  SubsetIndex u;

  std::size_t size() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t out_dims() const { return static_cast<std::size_t>(y.cols()); }
};

// Plug-in matrices with the same un-normalized totals as the scalar
// estimator: diag sums reproduce its numerator and denominator exactly.
struct EmpiricalCovariances {
  Matrix sigma_hat;
  Matrix c_u_hat;
  std::size_t n = 0;
};

PickFreezeDesign generate_design(const InputSpace& space, const SubsetIndex& u, std::size_t n, Seed seed);
PickFreezeSample evaluate_pairs(const VectorModel& model, const PickFreezeDesign& design);

// Convenience: generate_design + evaluate_pairs.
PickFreezeSample pick_freeze(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                             std::size_t n, Seed seed);

// S_{u,N}: sum_l [sum_i Y_il Yu_il - (1/N)(sum_i (Y_il + Yu_il)/2)^2] over
// sum_l [sum_i (Y_il^2 + Yu_il^2)/2 - (1/N)(sum_i (Y_il + Yu_il)/2)^2].
double estimate_index(const PickFreezeSample& sample);

EmpiricalCovariances empirical_covariances(const PickFreezeSample& sample);

// Tr(M c_u_hat) / Tr(M sigma_hat); equals estimate_index bit for bit when M = Id.
double estimate_index_general(const PickFreezeSample& sample, const Matrix& m);
double estimate_index_general(const EmpiricalCovariances& cov, const Matrix& m);

// O applied to every Y_i and Y^u_i.
PickFreezeSample transform_sample(const PickFreezeSample& sample, const Matrix& o);

}  // namespace gsi
