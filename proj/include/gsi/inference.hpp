#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gsi/input_space.hpp"
#include "gsi/model.hpp"
#include "gsi/pickfreeze.hpp"
#include "gsi/rng.hpp"
#include "gsi/subset.hpp"

namespace gsi {

enum class CiMethod { delta, bootstrap };
std::string to_string(CiMethod m);

struct IndexEstimate {
  double value = 0.0;
  double sigma2_hat = 0.0;  // asymptotic variance of sqrt(N) (S_{u,N} - S_u)
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.95;
  CiMethod method = CiMethod::delta;
  std::size_t bootstrap_reps = 0;
  Seed bootstrap_seed = 0;
  std::size_t n = 0;
};

// Delta-method variance of the estimator, seen as a smooth function of the
// means of (sum_l Y_l Yu_l, (Y_l + Yu_l)/2 for each l, sum_l (Y_l^2 + Yu_l^2)/2).
double delta_variance(const PickFreezeSample& sample);

IndexEstimate delta_ci(const PickFreezeSample& sample, double level);

// Percentile interval over b_reps pair resamples (Y_i and Y^u_i stay together).
IndexEstimate bootstrap_ci(const PickFreezeSample& sample, std::size_t b_reps, double level, Seed seed);

struct CiOptions {
  CiMethod method = CiMethod::delta;
  double level = 0.95;
  std::size_t bootstrap_reps = 1000;
};

struct ReplicationReport {
  std::size_t n_per_rep = 0;
  std::size_t reps = 0;
  std::vector<double> estimates;  // replicate order
  double target = 0.0;
  double mean = 0.0;
  double std_empirical = 0.0;
  double normality_stat = 0.0;  // KS distance of standardized estimates to N(0,1)
  double coverage = 0.0;        // fraction of CIs containing target
  CiMethod ci_method = CiMethod::delta;
  double ci_level = 0.95;
  double mean_sigma2_hat = 0.0;
  Seed seed = 0;
  std::optional<double> std_ratio;  // std(N) / std(4N), paired-scale runs only

  friend bool operator==(const ReplicationReport&, const ReplicationReport&) = default;
};

// `reps` independent pick-freeze estimations of S_u at N = n_per_rep.
ReplicationReport clt_diagnostic(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                 std::size_t n_per_rep, std::size_t reps, double target, Seed seed,
                                 const CiOptions& ci = {});

// Runs clt_diagnostic at N and 4N and records std(N)/std(4N) (about 2 under
// sqrt(N) scaling) in the first report.
std::pair<ReplicationReport, ReplicationReport> paired_scale_diagnostic(const VectorModel& model,
                                                                        const InputSpace& space,
                                                                        const SubsetIndex& u, std::size_t n,
                                                                        std::size_t reps, double target, Seed seed);

// sup |F_n - Phi| for already standardized values.
double ks_distance_normal(std::vector<double> standardized);
double normal_quantile(double p);
// Type-7 (linear interpolation) quantile of sorted values.
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace gsi
