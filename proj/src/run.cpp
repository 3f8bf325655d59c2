#include "gsi/run.hpp"

#include <chrono>
#include <cmath>

#include "gsi/pickfreeze.hpp"

namespace gsi {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return exit_config;
    case ErrorKind::degenerate_model:
    case ErrorKind::degenerate_sample:
    case ErrorKind::ill_posed_index: return exit_degenerate;
    case ErrorKind::io: return exit_io;
    default: return exit_failure;
  }
}

std::size_t quadrature_nodes_for(std::size_t p) {
  switch (p) {
    case 1: return 128;
    case 2: return 64;
    case 3: return 32;
    default: return 16;
  }
}

std::optional<CovarianceTriple> auto_oracle(const VectorModel& model, const InputSpace& space, const SubsetIndex& u) {
  if (const auto* lin = std::get_if<LinearKind>(&model.kind())) return covariances_linear(lin->a, space.variances(), u);
  if (std::holds_alternative<ExternalKind>(model.kind())) return std::nullopt;
  try {
    if (space.all_discrete()) return covariances_enumeration(decompose_discrete(model, space, u));
    if (space.dims() <= 4) return covariances_quadrature(model, space, u, quadrature_nodes_for(space.dims()));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::resource) throw;
  }
  return std::nullopt;
}

Seed subset_seed(const RunConfig& config, std::size_t subset_position) {
  return derive_seed(config.seed, subset_position);
}

namespace {

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  return out;
}

}  // namespace

RunReport run(const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  const VectorModel model = configured_model(config);

  RunReport report;
  report.model = config.model.external() ? "external:" + config.model.external_path : config.model.name;
  if (config.transform) report.model = "transformed:" + report.model;
  report.in_dims = model.in_dims();
  report.out_dims = model.out_dims();
  report.matrix = rows_of(config.matrix);
  report.seed = config.seed;

  for (std::size_t s = 0; s < config.subsets.size(); ++s) {
    const auto subset_started = clock::now();
    const SubsetIndex& u = config.subsets[s];
    SubsetRecord rec;
    rec.subset = u.one_based();
    rec.n = config.n;
    rec.seed = subset_seed(config, s);

    const PickFreezeSample sample = pick_freeze(model, config.space, u, config.n, rec.seed);
    rec.estimate = estimate_index(sample);
    if (config.matrix_given) rec.estimate_general = estimate_index_general(sample, config.matrix);
    if (config.n >= 10) rec.sigma2_hat = delta_variance(sample);

    if (config.ci.kind == CiConfig::Kind::delta) {
      const auto e = delta_ci(sample, config.ci.level);
      rec.ci = CiRecord{"delta", e.ci_level, e.ci_low, e.ci_high, 0, 0};
    } else if (config.ci.kind == CiConfig::Kind::bootstrap) {
      const Seed boot_seed = derive_seed(rec.seed, 0xB007);
      const auto e = bootstrap_ci(sample, config.ci.bootstrap_reps, config.ci.level, boot_seed);
      rec.ci = CiRecord{"bootstrap", e.ci_level, e.ci_low, e.ci_high, e.bootstrap_reps, boot_seed};
    }

    if (config.oracle_auto) {
      if (const auto triple = auto_oracle(model, config.space, u)) {
        const auto k = triple->sigma.rows();
        const ExactIndex ex = exact_index(*triple, Matrix::Identity(k, k));
        OracleRecord o{to_string(triple->method), ex.s_u, ex.s_not_u, ex.s_interaction, std::nullopt,
                       std::abs(ex.sum() - 1.0), triple->residual, triple->accuracy_warning};
        if (config.matrix_given) {
          const ExactIndex g = exact_index(*triple, config.matrix);
          o.general = IndexTriple{g.s_u, g.s_not_u, g.s_interaction};
          o.sum_residual = std::max(o.sum_residual, std::abs(g.sum() - 1.0));
        }
        rec.oracle = o;
      }
    }

    if (config.replications) {
      if (!rec.oracle) config_error("replications", "replication studies need an oracle target (oracle: auto)");
      CiOptions ci;
      if (config.ci.kind == CiConfig::Kind::bootstrap) ci.method = CiMethod::bootstrap;
      ci.level = config.ci.level;
      ci.bootstrap_reps = config.ci.bootstrap_reps;
      rec.replication = clt_diagnostic(model, config.space, u, config.n, *config.replications, rec.oracle->s_u,
                                       derive_seed(rec.seed, 0x5EED), ci);
    }
    rec.seconds = std::chrono::duration<double>(clock::now() - subset_started).count();
    report.records.push_back(std::move(rec));
  }
  report.total_seconds = std::chrono::duration<double>(clock::now() - started).count();
  return report;
}

}  // namespace gsi
