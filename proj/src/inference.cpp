#include "gsi/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gsi/error.hpp"
#include "gsi/kernels.hpp"

namespace gsi {

std::string to_string(CiMethod m) { return m == CiMethod::delta ? "delta" : "bootstrap"; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::contract, "quantile probability must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::contract, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double ks_distance_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

double delta_variance(const PickFreezeSample& sample) {
  if (sample.size() < 10) fail(ErrorKind::contract, "delta variance needs N >= 10");
  const auto sums = kernels::parallel::pair_sums(sample.y, sample.y_u, kernels::Moments::diagonal);
  const auto ratio = kernels::estimator_ratio(sums);
  if (!(std::abs(ratio.denominator) > 1e-14 * ratio.magnitude))
    fail(ErrorKind::degenerate_sample, "estimator denominator vanishes (constant outputs)");

  const double n = static_cast<double>(sample.size());
  const Eigen::Index k = sums.half.size();
  const Vector b = sums.half / n;
  double a = 0.0, c = 0.0, b2 = 0.0;
  for (Eigen::Index l = 0; l < k; ++l) {
    a += sums.cross(l, l) / n;
    c += sums.square(l, l) / n;
    b2 += b(l) * b(l);
  }
  const double num = a - b2, den = c - b2;
  const double grad_a = 1.0 / den;
  const double grad_c = -num / (den * den);
  const Vector grad_b = b * (2.0 * (num - den) / (den * den));

  const auto& y = sample.y;
  const auto& yu = sample.y_u;
  const double sum_sq = kernels::parallel_sum_rows(sample.size(), [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    double stat_a = 0.0, stat_c = 0.0, z = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      stat_a += y(i, l) * yu(i, l);
      stat_c += (y(i, l) * y(i, l) + yu(i, l) * yu(i, l)) / 2.0;
      z += grad_b(l) * ((y(i, l) + yu(i, l)) / 2.0 - b(l));
    }
    z += grad_a * (stat_a - a) + grad_c * (stat_c - c);
    return z * z;
  });
  return std::max(0.0, sum_sq / n);
}

IndexEstimate delta_ci(const PickFreezeSample& sample, double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::contract, "confidence level must lie in (0, 1)");
  IndexEstimate e;
  e.value = estimate_index(sample);
  e.sigma2_hat = delta_variance(sample);
  e.n = sample.size();
  e.ci_level = level;
  e.method = CiMethod::delta;
  const double half = normal_quantile(0.5 + level / 2.0) * std::sqrt(e.sigma2_hat / static_cast<double>(e.n));
  e.ci_low = e.value - half;
  e.ci_high = e.value + half;
  return e;
}

IndexEstimate bootstrap_ci(const PickFreezeSample& sample, std::size_t b_reps, double level, Seed seed) {
  if (b_reps < 200) fail(ErrorKind::contract, "bootstrap needs at least 200 replicates");
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::contract, "confidence level must lie in (0, 1)");
  IndexEstimate e;
  e.value = estimate_index(sample);
  e.sigma2_hat = sample.size() >= 10 ? delta_variance(sample) : 0.0;
  e.n = sample.size();
  e.ci_level = level;
  e.method = CiMethod::bootstrap;
  e.bootstrap_reps = b_reps;
  e.bootstrap_seed = seed;
  auto reps = kernels::parallel::bootstrap_estimates(sample.y, sample.y_u, b_reps, seed);
  std::sort(reps.begin(), reps.end());
  e.ci_low = sorted_quantile(reps, (1.0 - level) / 2.0);
  e.ci_high = sorted_quantile(reps, (1.0 + level) / 2.0);
  return e;
}

ReplicationReport clt_diagnostic(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                 std::size_t n_per_rep, std::size_t reps, double target, Seed seed,
                                 const CiOptions& ci) {
  if (reps < 200) fail(ErrorKind::contract, "replication study needs reps >= 200");
  if (!std::isfinite(target)) fail(ErrorKind::contract, "replication target must be finite");
  ReplicationReport r;
  r.n_per_rep = n_per_rep;
  r.reps = reps;
  r.target = target;
  r.ci_method = ci.method;
  r.ci_level = ci.level;
  r.seed = seed;
  r.estimates.resize(reps);
  std::vector<double> sigma2(reps);
  std::vector<char> covered(reps);
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t rep = 0; rep < count; ++rep) {
    try {
      const auto idx = static_cast<std::size_t>(rep);
      const Seed rep_seed = derive_seed(seed, idx);
      const auto sample = pick_freeze(model, space, u, n_per_rep, rep_seed);
      const IndexEstimate e = ci.method == CiMethod::delta
                                  ? delta_ci(sample, ci.level)
                                  : bootstrap_ci(sample, ci.bootstrap_reps, ci.level, derive_seed(rep_seed, 0xB007));
      r.estimates[idx] = e.value;
      sigma2[idx] = e.sigma2_hat;
      covered[idx] = e.ci_low <= target && target <= e.ci_high;
    } catch (...) {
#pragma omp critical(gsi_replication_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<double> sorted = r.estimates;
  std::sort(sorted.begin(), sorted.end());
  std::sort(sigma2.begin(), sigma2.end());
  kernels::CompensatedSum total, total_sigma2;
  for (double v : sorted) total.add(v);
  for (double v : sigma2) total_sigma2.add(v);
  const double n = static_cast<double>(reps);
  r.mean = total.value() / n;
  kernels::CompensatedSum squares;
  for (double v : sorted) squares.add((v - r.mean) * (v - r.mean));
  r.std_empirical = std::sqrt(squares.value() / (n - 1.0));
  r.mean_sigma2_hat = total_sigma2.value() / n;
  r.coverage = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / n;

  if (r.std_empirical > 0.0) {
    std::vector<double> z(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) z[i] = (sorted[i] - r.mean) / r.std_empirical;
    r.normality_stat = ks_distance_normal(std::move(z));
  }
  return r;
}

std::pair<ReplicationReport, ReplicationReport> paired_scale_diagnostic(const VectorModel& model,
                                                                        const InputSpace& space,
                                                                        const SubsetIndex& u, std::size_t n,
                                                                        std::size_t reps, double target, Seed seed) {
  auto small = clt_diagnostic(model, space, u, n, reps, target, seed);
  auto large = clt_diagnostic(model, space, u, 4 * n, reps, target, derive_seed(seed, 4));
  if (large.std_empirical > 0.0) small.std_ratio = small.std_empirical / large.std_empirical;
  return {std::move(small), std::move(large)};
}

}  // namespace gsi
