#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gsi/input_space.hpp"
#include "gsi/linalg.hpp"
#include "gsi/model.hpp"
#include "gsi/quadrature.hpp"
#include "gsi/rng.hpp"
#include "gsi/subset.hpp"

namespace gsi {

enum class OracleMethod { closed_form, quadrature, enumeration, monte_carlo };
std::string to_string(OracleMethod m);

// Sigma = C_u + C_~u + C_u~u for one subset u.
struct CovarianceTriple {
  Matrix sigma;
  Matrix c_u;
  Matrix c_not_u;
  Matrix c_interaction;
  OracleMethod method = OracleMethod::closed_form;
  // max |Sigma - (C_u + C_~u + C_u~u)|; for quadrature the interaction term
  // in this check is integrated directly rather than taken by subtraction.
  double residual = 0.0;
  bool accuracy_warning = false;  // quadrature residual above 1e-6
  std::size_t nodes_per_dim = 0;  // quadrature only
  std::size_t mc_samples = 0;     // monte_carlo only
  Seed mc_seed = 0;
};

// Exact Hoeffding components tabulated on a finite tensor grid.
struct HoeffdingComponents {
  SubsetIndex u;
  std::vector<QuadratureRule> grid;  // per coordinate
  Vector c;                          // E(Y)
  RowMatrix f;                       // f at every node (node-major, last coordinate fastest)
  RowMatrix f_u;                     // E(Y|X_u) - c, indexed by the u-subgrid
  RowMatrix f_not_u;                 // E(Y|X_~u) - c, indexed by the ~u-subgrid
  RowMatrix f_interaction;           // f - c - f_u - f_~u at every node

  std::size_t nodes() const { return static_cast<std::size_t>(f.rows()); }
  std::vector<std::size_t> digits(std::size_t node) const;
  std::vector<double> point(std::size_t node) const;
  double weight(std::size_t node) const;
  std::size_t u_index(std::size_t node) const;
  std::size_t not_u_index(std::size_t node) const;
};

// Quality figures of a decomposition (all should be ~0).
struct ComponentDiagnostics {
  double reconstruction = 0.0;  // max |c + f_u + f_~u + f_u~u - f|
  double max_mean = 0.0;        // max |E(component)|
  double max_cross = 0.0;       // max entry of the pairwise covariance matrices
};

// Rejects Sigma unless its smallest eigenvalue exceeds 1e-10 * Tr(Sigma) / k.
void require_positive_definite(const Matrix& sigma);

CovarianceTriple covariances_linear(const Matrix& a, const Vector& variances, const SubsetIndex& u);

// Exact weighted enumeration; every marginal must be discrete, grid <= 1e7 nodes.
HoeffdingComponents decompose_discrete(const VectorModel& model, const InputSpace& space, const SubsetIndex& u);
ComponentDiagnostics diagnose(const HoeffdingComponents& h);
// Covariances of the tabulated components; C_u~u computed directly.
CovarianceTriple covariances_enumeration(const HoeffdingComponents& h);

// Tensorized Gauss rules (Legendre/Hermite; discrete marginals use their
// support). p <= 4. C_u~u by subtraction.
CovarianceTriple covariances_quadrature(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                        std::size_t nodes_per_dim);

// Large-sample plug-in oracle on streams disjoint from every estimator stream.
CovarianceTriple covariances_monte_carlo(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                         std::size_t n, Seed seed);

// O X O^t applied to every matrix of the triple (covariances of O f).
CovarianceTriple transform(const CovarianceTriple& cov, const Matrix& o);

struct ExactIndex {
  double s_u = 0.0;
  double s_not_u = 0.0;
  double s_interaction = 0.0;
  Matrix m_used;
  double sum() const { return s_u + s_not_u + s_interaction; }
};

// S^u(M; f) = Tr(M C_u) / Tr(M Sigma), and the ~u and interaction analogues.
ExactIndex exact_index(const CovarianceTriple& cov, const Matrix& m);

}  // namespace gsi
