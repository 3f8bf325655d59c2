#include "gsi/pickfreeze.hpp"

#include <cmath>

#include "gsi/error.hpp"

namespace gsi {

namespace {

void require_pairs(const PickFreezeSample& s) {
  if (s.y.rows() < 2) fail(ErrorKind::contract, "pick-freeze estimation needs N >= 2");
  if (s.y.rows() != s.y_u.rows() || s.y.cols() != s.y_u.cols())
    fail(ErrorKind::contract, "Y and Y^u must have identical shapes");
}

// Constant outputs leave only rounding noise in the denominator.
void guard_denominator(const kernels::Ratio& r) {
  if (!(std::abs(r.denominator) > 1e-14 * r.magnitude))
    fail(ErrorKind::degenerate_sample,
         "estimator denominator vanishes (constant outputs); the output covariance must be positive definite");
}

EmpiricalCovariances from_sums(const kernels::PairSums& sums) {
  const Eigen::Index k = sums.half.size();
  const double n = static_cast<double>(sums.n);
  EmpiricalCovariances out{Matrix(k, k), Matrix(k, k), sums.n};
  for (Eigen::Index l = 0; l < k; ++l)
    for (Eigen::Index m = 0; m < k; ++m) {
      const double centering = sums.half(l) * sums.half(m) / n;
      out.sigma_hat(l, m) = sums.square(l, m) - centering;
      out.c_u_hat(l, m) = (sums.cross(l, m) + sums.cross(m, l)) / 2.0 - centering;
    }
  return out;
}

}  // namespace

RowMatrix PickFreezeDesign::frozen_inputs() const {
  RowMatrix out = x;
  const auto& nu = u.complement();
  for (std::size_t c = 0; c < nu.size(); ++c)
    out.col(static_cast<Eigen::Index>(nu[c])) = x_prime.col(static_cast<Eigen::Index>(c));
  return out;
}

PickFreezeDesign generate_design(const InputSpace& space, const SubsetIndex& u, std::size_t n, Seed seed) {
  if (n < 2) fail(ErrorKind::contract, "design needs n >= 2");
  if (u.dims() != space.dims()) fail(ErrorKind::contract, "subset " + u.to_string() + " is not a subset of the input space");
  PickFreezeDesign d{sample_inputs(space, n, seed, Stream::design_x), {}, u, seed};
  const auto& nu = u.complement();
  d.x_prime.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nu.size()));
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < nu.size(); ++c)
      d.x_prime(i, static_cast<Eigen::Index>(c)) = space.draw(nu[c], seed, Stream::design_copy, static_cast<std::uint64_t>(i));
  return d;
}

PickFreezeSample evaluate_pairs(const VectorModel& model, const PickFreezeDesign& design) {
  if (static_cast<std::size_t>(design.x.cols()) != model.in_dims())
    fail(ErrorKind::contract, "design has " + std::to_string(design.x.cols()) + " inputs, model expects " +
                                  std::to_string(model.in_dims()));
  PickFreezeSample s{eval_model(model, design.x), {}, design.u};
  s.y_u = design.u.is_full() ? s.y : eval_model(model, design.frozen_inputs());
  return s;
}

PickFreezeSample pick_freeze(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                             std::size_t n, Seed seed) {
  return evaluate_pairs(model, generate_design(space, u, n, seed));
}

double estimate_index(const PickFreezeSample& sample) {
  require_pairs(sample);
  const auto ratio = kernels::estimator_ratio(kernels::parallel::pair_sums(sample.y, sample.y_u, kernels::Moments::diagonal));
  guard_denominator(ratio);
  return ratio.numerator / ratio.denominator;
}

EmpiricalCovariances empirical_covariances(const PickFreezeSample& sample) {
  require_pairs(sample);
  return from_sums(kernels::parallel::pair_sums(sample.y, sample.y_u, kernels::Moments::full));
}

double estimate_index_general(const EmpiricalCovariances& cov, const Matrix& m) {
  if (m.rows() != cov.sigma_hat.rows() || m.cols() != cov.sigma_hat.cols())
    fail(ErrorKind::contract, "projection matrix must be k x k");
  const double denominator = trace_product(m, cov.sigma_hat);
  const double scale = m.norm() * cov.sigma_hat.norm();
  if (!(std::abs(denominator) > 1e-12 * scale))
    fail(ErrorKind::ill_posed_index, "Tr(M sigma_hat) is too close to zero");
  return trace_product(m, cov.c_u_hat) / denominator;
}

double estimate_index_general(const PickFreezeSample& sample, const Matrix& m) {
  require_pairs(sample);
  const auto sums = kernels::parallel::pair_sums(sample.y, sample.y_u, kernels::Moments::full);
  guard_denominator(kernels::estimator_ratio(sums));
  return estimate_index_general(from_sums(sums), m);
}

PickFreezeSample transform_sample(const PickFreezeSample& sample, const Matrix& o) {
  if (o.cols() != sample.y.cols()) fail(ErrorKind::contract, "transform dimension mismatch");
  return {sample.y * o.transpose(), sample.y_u * o.transpose(), sample.u};
}

}  // namespace gsi
