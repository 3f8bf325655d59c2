// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsi/corpus.hpp"
#include "gsi/error.hpp"
#include "gsi/hoeffding.hpp"
#include "gsi/inference.hpp"
#include "gsi/pickfreeze.hpp"
#include "gsi/run.hpp"
#include "oracles.hpp"

using namespace gsi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates the worst observed deviation of a family of checks.
struct Worst {
  double value = 0.0;
  std::size_t checks = 0;
  void add(double d) {
    value = std::isnan(d) ? INFINITY : std::max(value, d);
    ++checks;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index k) {
  std::normal_distribution<double> nd;
  Matrix g(k, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  return q;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index k) {
  std::normal_distribution<double> nd;
  Matrix g(k, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  return g;
}

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index k) {
  const Matrix g = random_matrix(rng, k);
  return 0.5 * (g + g.transpose());
}

// Denominator well away from zero relative to the sizes involved.
bool well_posed(const Matrix& m, const Matrix& sigma) {
  return std::abs(trace_product(m, sigma)) > 1e-2 * m.norm() * sigma.norm();
}

std::vector<SubsetIndex> all_subsets(std::size_t p) {
  std::vector<SubsetIndex> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << p); ++mask) {
    std::vector<std::size_t> u;
    for (std::size_t j = 0; j < p; ++j)
      if (mask >> j & 1) u.push_back(j);
    out.emplace_back(u, p);
  }
  return out;
}

struct Named {
  std::string name;
  corpus::Entry entry;
};

// Corpus entries with a positive definite output covariance. `constant` and
// `interaction_2` are degenerate by construction and excluded.
std::vector<Named> well_posed_corpus() {
  return {
      {"identity_2", corpus::make("identity_2")},
      {"linear", corpus::make("linear", {{"a", {1, 2, 0, -1, 0.5, 1, 3, 0, 0, 1, 1, 2}}, {"rows", {3}}})},
      {"sum_prod", corpus::make("sum_prod")},
      {"u_only", corpus::make("u_only", {{"p", {3}}, {"u", {1, 3}}})},
      {"ishigami", corpus::make("ishigami")},
  };
}

Matrix identity(const VectorModel& m) {
  const auto k = static_cast<Eigen::Index>(m.out_dims());
  return Matrix::Identity(k, k);
}

CovarianceTriple oracle_for(const VectorModel& model, const InputSpace& space, const SubsetIndex& u) {
  auto t = auto_oracle(model, space, u);
  if (!t) fail(ErrorKind::unsupported_oracle, "no exact oracle for " + model.name());
  return *t;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const auto e = corpus::make("identity_2");
  const SubsetIndex u({0}, 2);
  const auto cov = oracle_for(e.model, e.space, u);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto swapped_model = apply_transform(e.model, Isometry{swap});
  const auto swapped = oracle_for(swapped_model, e.space, u);
  Worst w;
  for (auto [l1, l2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {3.0, 5.0}}) {
    const Matrix m = Eigen::Vector2d(l1, l2).asDiagonal();
    w.add(std::abs(exact_index(cov, m).s_u - l1 / (l1 + l2)));
    w.add(std::abs(exact_index(swapped, m).s_u - l2 / (l1 + l2)));
  }
  return {w.value <= 1e-12, "max |deviation| " + fmt(w.value) + " over " + std::to_string(w.checks) + " values"};
}

Outcome criterion_2() {
  std::mt19937_64 rng(2002);
  Worst w;
  std::size_t subsets = 0;
  for (const auto& [name, e] : well_posed_corpus()) {
    const auto k = static_cast<Eigen::Index>(e.model.out_dims());
    for (const auto& u : all_subsets(e.space.dims())) {
      const auto cov = oracle_for(e.model, e.space, u);
      ++subsets;
      int used = 0;
      while (used < 20) {
        const Matrix m = random_symmetric(rng, k);
        if (!well_posed(m, cov.sigma)) continue;
        w.add(std::abs(exact_index(cov, m).sum() - 1.0));
        ++used;
      }
    }
  }
  return {w.value <= 1e-10, "max |sum - 1| " + fmt(w.value) + " over " + std::to_string(w.checks) + " (model, u, M) on " +
                                std::to_string(subsets) + " subsets"};
}

Outcome criterion_3() {
  std::mt19937_64 rng(3003);
  const auto corpus = well_posed_corpus();
  Worst oracle_level, sample_level;
  int triples = 0;
  while (triples < 100) {
    const auto& [name, e] = corpus[static_cast<std::size_t>(triples) % corpus.size()];
    const auto k = static_cast<Eigen::Index>(e.model.out_dims());
    const auto subsets = all_subsets(e.space.dims());
    const auto& u = subsets[rng() % (subsets.size() > 1 ? subsets.size() - 1 : 1)];
    const Matrix o = random_matrix(rng, k);
    const Matrix m = random_symmetric(rng, k);
    const Matrix pulled = o.transpose() * m * o;

    const auto base = oracle_for(e.model, e.space, u);
    const auto composed_model = apply_transform(e.model, GeneralLinear{o});
    CovarianceTriple composed;
    try {
      composed = oracle_for(composed_model, e.space, u);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::degenerate_model) throw;
      continue;  // singular O collapses the output covariance
    }
    if (!well_posed(m, composed.sigma) || !well_posed(pulled, base.sigma)) continue;
    oracle_level.add(std::abs(exact_index(composed, m).s_u - exact_index(base, pulled).s_u));

    const Seed seed = derive_seed(33, static_cast<std::uint64_t>(triples));
    const auto s = pick_freeze(e.model, e.space, u, 2000, seed);
    const auto s_composed = pick_freeze(composed_model, e.space, u, 2000, seed);
    const auto cov_hat = empirical_covariances(s);
    if (std::abs(trace_product(pulled, cov_hat.sigma_hat)) <= 1e-2 * pulled.norm() * cov_hat.sigma_hat.norm())
      continue;
    sample_level.add(std::abs(estimate_index_general(s_composed, m) - estimate_index_general(s, pulled)));
    sample_level.add(std::abs(estimate_index_general(transform_sample(s, o), m) - estimate_index_general(s, pulled)));
    ++triples;
  }
  const bool pass = oracle_level.value <= 1e-10 && sample_level.value <= 1e-10;
  return {pass, "oracle max " + fmt(oracle_level.value) + ", sample max " + fmt(sample_level.value) + " over " +
                    std::to_string(triples) + " triples"};
}

Outcome criterion_4() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  Worst w;
  for (const auto& [name, e] : well_posed_corpus()) {
    const auto k = static_cast<Eigen::Index>(e.model.out_dims());
    const auto s = pick_freeze(e.model, e.space, SubsetIndex({0}, e.space.dims()), 5000, 44);
    const double base = estimate_index(s);
    for (int i = 0; i < 50; ++i) w.add(std::abs(estimate_index(transform_sample(s, random_orthogonal(rng, k))) - base));
    for (int i = 0; i < 20; ++i) {
      const double lambda = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, log_scale(rng));
      w.add(std::abs(estimate_index(transform_sample(s, lambda * Matrix::Identity(k, k))) - base));
    }
  }
  return {w.value <= 1e-10, "max |change| " + fmt(w.value) + " over " + std::to_string(w.checks) + " transforms"};
}

Outcome criterion_5() {
  const std::size_t n = 1000000;
  const auto id = corpus::make("identity_2");
  const auto sp = corpus::make("sum_prod");
  const SubsetIndex u({0}, 2);

  const double id_oracle = exact_index(oracle_for(id.model, id.space, u), Matrix::Identity(2, 2)).s_u;
  const auto rational = oracle::sum_prod_uniform_moments();
  const double sp_exact = (rational.trace_c_u / rational.trace_sigma).value();
  const double sp_quad =
      exact_index(covariances_quadrature(sp.model, sp.space, u, 64), Matrix::Identity(2, 2)).s_u;
  const double sp_mc =
      exact_index(covariances_monte_carlo(sp.model, sp.space, u, 10000000, 5005), Matrix::Identity(2, 2)).s_u;

  const double id_est = estimate_index(pick_freeze(id.model, id.space, u, n, 51));
  const double sp_est = estimate_index(pick_freeze(sp.model, sp.space, u, n, 52));

  const bool oracles_agree = id_oracle == 0.5 && std::abs(sp_exact - 15.0 / 31.0) <= 1e-15 &&
                             std::abs(sp_quad - sp_exact) <= 1e-12 && std::abs(sp_mc - sp_exact) <= 2e-3;
  const bool pass = oracles_agree && std::abs(id_est - 0.5) <= 0.005 && std::abs(sp_est - sp_exact) <= 0.005;
  return {pass, "identity_2 " + fmt(id_est - 0.5) + " from 0.5; sum_prod " + fmt(sp_est - sp_exact) +
                    " from 15/31 (quadrature " +
                    fmt(sp_quad - sp_exact) + ", monte carlo 1e7 " + fmt(sp_mc - sp_exact) + " from exact)"};
}

Outcome criterion_6() {
  const auto e = corpus::make("identity_2");
  const auto [small, large] = paired_scale_diagnostic(e.model, e.space, SubsetIndex({0}, 2), 1000, 500, 0.5, 6006);
  const double ratio = small.std_ratio.value_or(NAN);
  const bool pass = small.normality_stat < 0.08 && ratio >= 1.7 && ratio <= 2.3;
  return {pass, "KS " + fmt(small.normality_stat) + ", std(1000)/std(4000) " + fmt(ratio)};
}

Outcome criterion_7() {
  Outcome out;
  std::string sep;
  for (const auto& name : {"identity_2", "sum_prod"}) {
    const auto e = corpus::make(name);
    const SubsetIndex u({0}, 2);
    const double target = exact_index(oracle_for(e.model, e.space, u), Matrix::Identity(2, 2)).s_u;
    for (auto method : {CiMethod::delta, CiMethod::bootstrap}) {
      const CiOptions ci{method, 0.95, 1000};
      const auto rep = clt_diagnostic(e.model, e.space, u, 2000, 500, target, 7007, ci);
      out.pass = out.pass && rep.coverage >= 0.91 && rep.coverage <= 0.98;
      out.detail += sep + name + " " + to_string(method) + " " + fmt(rep.coverage);
      sep = ", ";
    }
  }
  return out;
}

Outcome criterion_8() {
  Worst cross, residual;
  const InputSpace bits(std::vector<Marginal>(2, Discrete{{0.0, 1.0}, {0.5, 0.5}}));
  const InputSpace signs(std::vector<Marginal>(2, Discrete{{-1.0, 1.0}, {0.5, 0.5}}));
  const auto interaction = corpus::make("interaction_2");
  struct Case {
    VectorModel model;
    InputSpace space;
    bool full_rank;
  };
  const std::vector<Case> cases{{corpus::make("sum_prod").model, bits, true},
                                {corpus::make("identity_2").model, signs, true},
                                {interaction.model, interaction.space, false}};
  for (const auto& c : cases)
    for (const auto& u : {SubsetIndex({0}, 2), SubsetIndex({1}, 2)}) {
      const auto h = decompose_discrete(c.model, c.space, u);
      const auto d = diagnose(h);
      cross.add(d.max_cross);
      residual.add(d.reconstruction);
      if (c.full_rank) residual.add(covariances_enumeration(h).residual);
    }
  return {cross.value <= 1e-12 && residual.value <= 1e-12,
          "max cross-covariance " + fmt(cross.value) + ", max decomposition residual " + fmt(residual.value)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_9() {
  const auto dir = std::filesystem::temp_directory_path() / "gsi_acceptance";
  std::filesystem::create_directories(dir);
  const auto config = dir / "config.json";
  std::ofstream(config) << R"({
  "schema": 1,
  "model": "sum_prod",
  "subsets": [[1], [2], [1, 2]],
  "n": 2000,
  "seed": 909,
  "matrix": [[1, 0.5], [0.5, 2]],
  "ci": {"method": "bootstrap", "reps": 200},
  "replications": 200
})";
  std::vector<std::string> outputs;
  for (const auto& [tag, threads] : {std::pair{"a", 1}, {"b", 4}}) {
    const auto out = dir / (std::string("report_") + tag + ".json");
    std::filesystem::remove(out);
    const std::string cmd = std::string(GSI_CLI_PATH) + " --threads " + std::to_string(threads) +
                            " run --reproducible --config " + config.string() + " --output " + out.string();
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "CLI run failed: " + cmd};
    outputs.push_back(read_file(out));
  }
  const bool pass = !outputs[0].empty() && outputs[0] == outputs[1];
  return {pass, std::to_string(outputs[0].size()) + " bytes, " + (pass ? "identical" : "different") +
                    " across two runs (1 and 4 threads)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 exact counterexample values", criterion_1},
      {"2 sum to one", criterion_2},
      {"3 transformation rule", criterion_3},
      {"4 finite-sample invariances", criterion_4},
      {"5 estimator consistency", criterion_5},
      {"6 central limit behaviour", criterion_6},
      {"7 interval coverage", criterion_7},
      {"8 hoeffding orthogonality", criterion_8},
      {"9 end-to-end determinism", criterion_9},
  };
  int failures = 0;
  for (const auto& [label, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << label << ": " << o.detail << " [" << fmt(secs)
              << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
