#include "gsi/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gsi/error.hpp"
#include "gsi/kernels.hpp"

namespace gsi {

std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::quadrature: return "quadrature";
    case OracleMethod::enumeration: return "enumeration";
    case OracleMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

void require_positive_definite(const Matrix& sigma) {
  const double trace = sigma.trace();
  const auto k = static_cast<double>(sigma.rows());
  if (!sigma.allFinite() || !(trace > 0.0))
    fail(ErrorKind::degenerate_model,
         "output covariance matrix must be positive definite; got trace " + std::to_string(trace));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  if (!(smallest > 1e-10 * trace / k)) {
    std::ostringstream msg;
    msg << "output covariance matrix must be positive definite; smallest eigenvalue " << smallest
        << " vs trace " << trace;
    fail(ErrorKind::degenerate_model, msg.str());
  }
}

namespace {

using kernels::CompensatedSum;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double triple_residual(const Matrix& sigma, const Matrix& a, const Matrix& b, const Matrix& c) {
  return max_abs(sigma - (a + b + c));
}

// Symmetric k x k accumulator, upper triangle only, mirrored on read.
class OuterSum {
 public:
  explicit OuterSum(std::size_t k) : k_(k), cells_(k * k) {}
  void add(double w, const double* d) {
    for (std::size_t l = 0; l < k_; ++l)
      for (std::size_t m = l; m < k_; ++m) cells_[l * k_ + m].add(w * d[l] * d[m]);
  }
  Matrix value() const {
    const auto k = static_cast<Eigen::Index>(k_);
    Matrix out(k, k);
    for (std::size_t l = 0; l < k_; ++l)
      for (std::size_t m = l; m < k_; ++m)
        out(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) =
            out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = cells_[l * k_ + m].value();
    return out;
  }

 private:
  std::size_t k_;
  std::vector<CompensatedSum> cells_;
};

// Mixed-radix tensor grid split into u and ~u sub-grids.
struct TensorGrid {
  std::vector<QuadratureRule> rules;
  std::vector<std::size_t> u, not_u;
  std::size_t total = 1, u_total = 1, not_u_total = 1;
  std::vector<double> w_u, w_not_u;

  TensorGrid(std::vector<QuadratureRule> r, const SubsetIndex& subset, double limit)
      : rules(std::move(r)), u(subset.indices()), not_u(subset.complement()) {
    double count = 1.0;
    for (const auto& q : rules) count *= static_cast<double>(q.nodes.size());
    if (count > limit)
      fail(ErrorKind::resource, "grid of " + std::to_string(count) + " nodes exceeds limit " + std::to_string(limit));
    for (const auto& q : rules) total *= q.nodes.size();
    w_u = sub_weights(u, u_total);
    w_not_u = sub_weights(not_u, not_u_total);
  }

  std::vector<double> sub_weights(const std::vector<std::size_t>& dims, std::size_t& count) const {
    count = 1;
    for (std::size_t j : dims) count *= rules[j].nodes.size();
    std::vector<double> w(count, 1.0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (auto it = dims.rbegin(); it != dims.rend(); ++it) {
        const std::size_t n = rules[*it].nodes.size();
        w[idx] *= rules[*it].weights[rest % n];
        rest /= n;
      }
    }
    return w;
  }

  void decode(std::size_t node, std::vector<std::size_t>& digits) const {
    digits.resize(rules.size());
    for (std::size_t j = rules.size(); j-- > 0;) {
      const std::size_t n = rules[j].nodes.size();
      digits[j] = node % n;
      node /= n;
    }
  }

  std::size_t sub_index(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& digits) const {
    std::size_t idx = 0;
    for (std::size_t j : dims) idx = idx * rules[j].nodes.size() + digits[j];
    return idx;
  }
};

struct GridPass {
  Vector c;
  RowMatrix g_u, g_not_u;  // conditional expectations (not centered)
  Matrix sigma, c_u, c_not_u, c_interaction_direct;
  RowMatrix f, f_interaction;  // only when stored
};

constexpr std::size_t kGridBlock = 1u << 15;

// Evaluates f on nodes [begin, end) and hands each row to `visit`.
template <class Visit>
void for_each_node(const VectorModel& model, const TensorGrid& grid, Visit&& visit) {
  const std::size_t p = grid.rules.size();
  std::vector<std::size_t> digits;
  for (std::size_t begin = 0; begin < grid.total; begin += kGridBlock) {
    const std::size_t end = std::min(grid.total, begin + kGridBlock);
    RowMatrix x(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(p));
    for (std::size_t node = begin; node < end; ++node) {
      grid.decode(node, digits);
      for (std::size_t j = 0; j < p; ++j)
        x(static_cast<Eigen::Index>(node - begin), static_cast<Eigen::Index>(j)) = grid.rules[j].nodes[digits[j]];
    }
    const RowMatrix y = kernels::parallel::eval_rows(model, x);
    for (std::size_t node = begin; node < end; ++node) {
      grid.decode(node, digits);
      visit(node, grid.sub_index(grid.u, digits), grid.sub_index(grid.not_u, digits),
            y.row(static_cast<Eigen::Index>(node - begin)).data());
    }
  }
}

GridPass integrate(const VectorModel& model, const TensorGrid& grid, bool store) {
  const std::size_t k = model.out_dims();
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<CompensatedSum> mean(k), cond_u(grid.u_total * k), cond_not_u(grid.not_u_total * k);
  GridPass out;
  if (store) out.f.resize(static_cast<Eigen::Index>(grid.total), kk);

  for_each_node(model, grid, [&](std::size_t node, std::size_t iu, std::size_t inu, const double* y) {
    const double wu = grid.w_u[iu], wnu = grid.w_not_u[inu];
    for (std::size_t l = 0; l < k; ++l) {
      mean[l].add(wu * wnu * y[l]);
      cond_u[iu * k + l].add(wnu * y[l]);
      cond_not_u[inu * k + l].add(wu * y[l]);
    }
    if (store) std::copy(y, y + k, out.f.row(static_cast<Eigen::Index>(node)).data());
  });

  out.c.resize(kk);
  for (std::size_t l = 0; l < k; ++l) out.c(static_cast<Eigen::Index>(l)) = mean[l].value();
  const auto table = [&](const std::vector<CompensatedSum>& sums, std::size_t rows) {
    RowMatrix t(static_cast<Eigen::Index>(rows), kk);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t l = 0; l < k; ++l) t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) = sums[r * k + l].value();
    return t;
  };
  out.g_u = table(cond_u, grid.u_total);
  out.g_not_u = table(cond_not_u, grid.not_u_total);

  std::vector<double> d(k);
  const auto conditional_cov = [&](const RowMatrix& g, const std::vector<double>& w) {
    OuterSum acc(k);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (std::size_t l = 0; l < k; ++l) d[l] = g(r, static_cast<Eigen::Index>(l)) - out.c(static_cast<Eigen::Index>(l));
      acc.add(w[static_cast<std::size_t>(r)], d.data());
    }
    return acc.value();
  };
  out.c_u = conditional_cov(out.g_u, grid.w_u);
  out.c_not_u = conditional_cov(out.g_not_u, grid.w_not_u);

  OuterSum total(k), interaction(k);
  std::vector<double> h(k);
  if (store) out.f_interaction.resize(static_cast<Eigen::Index>(grid.total), kk);
  const auto second_pass = [&](std::size_t node, std::size_t iu, std::size_t inu, const double* y) {
    const double w = grid.w_u[iu] * grid.w_not_u[inu];
    for (std::size_t l = 0; l < k; ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      d[l] = y[l] - out.c(li);
      h[l] = y[l] - out.g_u(static_cast<Eigen::Index>(iu), li) - out.g_not_u(static_cast<Eigen::Index>(inu), li) + out.c(li);
    }
    total.add(w, d.data());
    interaction.add(w, h.data());
    if (store) std::copy(h.begin(), h.end(), out.f_interaction.row(static_cast<Eigen::Index>(node)).data());
  };
  if (store) {
    std::vector<std::size_t> digits;
    for (std::size_t node = 0; node < grid.total; ++node) {
      grid.decode(node, digits);
      second_pass(node, grid.sub_index(grid.u, digits), grid.sub_index(grid.not_u, digits),
                  out.f.row(static_cast<Eigen::Index>(node)).data());
    }
  } else {
    for_each_node(model, grid, second_pass);
  }
  out.sigma = total.value();
  out.c_interaction_direct = interaction.value();
  return out;
}

void check_subset(const VectorModel& model, const InputSpace& space, const SubsetIndex& u) {
  if (model.in_dims() != space.dims())
    fail(ErrorKind::contract, "model expects " + std::to_string(model.in_dims()) + " inputs, space has " +
                                  std::to_string(space.dims()));
  if (u.dims() != space.dims()) fail(ErrorKind::contract, "subset dimension does not match the input space");
}

}  // namespace

CovarianceTriple covariances_linear(const Matrix& a, const Vector& variances, const SubsetIndex& u) {
  if (static_cast<std::size_t>(a.cols()) != u.dims() || a.cols() != variances.size())
    fail(ErrorKind::contract, "linear oracle: A, variances and subset disagree on p");
  if (!(variances.array() > 0.0).all()) fail(ErrorKind::contract, "linear oracle: variances must be positive");
  const Eigen::Index k = a.rows();
  const auto block = [&](const std::vector<std::size_t>& cols) {
    Matrix out = Matrix::Zero(k, k);
    for (std::size_t j : cols) {
      const auto jj = static_cast<Eigen::Index>(j);
      out += variances(jj) * a.col(jj) * a.col(jj).transpose();
    }
    return symmetrized(out);
  };
  CovarianceTriple t;
  t.sigma = symmetrized(a * variances.asDiagonal() * a.transpose());
  t.c_u = block(u.indices());
  t.c_not_u = block(u.complement());
  t.c_interaction = Matrix::Zero(k, k);
  t.method = OracleMethod::closed_form;
  t.residual = triple_residual(t.sigma, t.c_u, t.c_not_u, t.c_interaction);
  require_positive_definite(t.sigma);
  return t;
}

std::vector<std::size_t> HoeffdingComponents::digits(std::size_t node) const {
  std::vector<std::size_t> out(grid.size());
  for (std::size_t j = grid.size(); j-- > 0;) {
    out[j] = node % grid[j].nodes.size();
    node /= grid[j].nodes.size();
  }
  return out;
}

std::vector<double> HoeffdingComponents::point(std::size_t node) const {
  const auto dg = digits(node);
  std::vector<double> x(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) x[j] = grid[j].nodes[dg[j]];
  return x;
}

double HoeffdingComponents::weight(std::size_t node) const {
  const auto dg = digits(node);
  double w = 1.0;
  for (std::size_t j = 0; j < grid.size(); ++j) w *= grid[j].weights[dg[j]];
  return w;
}

std::size_t HoeffdingComponents::u_index(std::size_t node) const {
  const auto dg = digits(node);
  std::size_t idx = 0;
  for (std::size_t j : u.indices()) idx = idx * grid[j].nodes.size() + dg[j];
  return idx;
}

std::size_t HoeffdingComponents::not_u_index(std::size_t node) const {
  const auto dg = digits(node);
  std::size_t idx = 0;
  for (std::size_t j : u.complement()) idx = idx * grid[j].nodes.size() + dg[j];
  return idx;
}

HoeffdingComponents decompose_discrete(const VectorModel& model, const InputSpace& space, const SubsetIndex& u) {
  check_subset(model, space, u);
  if (!space.all_discrete()) fail(ErrorKind::unsupported_oracle, "enumeration requires every marginal to be discrete");
  std::vector<QuadratureRule> rules;
  for (const auto& m : space.marginals()) rules.push_back(rule_for(m, 0));
  const TensorGrid grid(rules, u, 1e7);
  GridPass pass = integrate(model, grid, true);

  HoeffdingComponents h{u, std::move(rules), pass.c, std::move(pass.f), {}, {}, std::move(pass.f_interaction)};
  h.f_u = pass.g_u.rowwise() - pass.c.transpose();
  h.f_not_u = pass.g_not_u.rowwise() - pass.c.transpose();
  return h;
}

ComponentDiagnostics diagnose(const HoeffdingComponents& h) {
  const auto k = static_cast<Eigen::Index>(h.c.size());
  ComponentDiagnostics out;
  Vector mean_u = Vector::Zero(k), mean_nu = Vector::Zero(k), mean_i = Vector::Zero(k);
  Matrix cross_u_nu = Matrix::Zero(k, k), cross_u_i = Matrix::Zero(k, k), cross_nu_i = Matrix::Zero(k, k);
  for (std::size_t node = 0; node < h.nodes(); ++node) {
    const double w = h.weight(node);
    const auto n = static_cast<Eigen::Index>(node);
    const Vector fu = h.f_u.row(static_cast<Eigen::Index>(h.u_index(node))).transpose();
    const Vector fnu = h.f_not_u.row(static_cast<Eigen::Index>(h.not_u_index(node))).transpose();
    const Vector fi = h.f_interaction.row(n).transpose();
    const Vector f = h.f.row(n).transpose();
    out.reconstruction = std::max(out.reconstruction, (h.c + fu + fnu + fi - f).cwiseAbs().maxCoeff());
    mean_u += w * fu;
    mean_nu += w * fnu;
    mean_i += w * fi;
    cross_u_nu += w * fu * fnu.transpose();
    cross_u_i += w * fu * fi.transpose();
    cross_nu_i += w * fnu * fi.transpose();
  }
  out.max_mean = std::max({mean_u.cwiseAbs().maxCoeff(), mean_nu.cwiseAbs().maxCoeff(), mean_i.cwiseAbs().maxCoeff()});
  out.max_cross = std::max({max_abs(cross_u_nu), max_abs(cross_u_i), max_abs(cross_nu_i)});
  return out;
}

CovarianceTriple covariances_enumeration(const HoeffdingComponents& h) {
  const std::size_t k = static_cast<std::size_t>(h.c.size());
  OuterSum sigma(k), cu(k), cnu(k), ci(k);
  std::vector<double> d(k);
  for (std::size_t node = 0; node < h.nodes(); ++node) {
    const double w = h.weight(node);
    const auto n = static_cast<Eigen::Index>(node);
    for (std::size_t l = 0; l < k; ++l) d[l] = h.f(n, static_cast<Eigen::Index>(l)) - h.c(static_cast<Eigen::Index>(l));
    sigma.add(w, d.data());
    ci.add(w, h.f_interaction.row(n).data());
  }
  std::vector<double> wu(h.f_u.rows(), 0.0), wnu(h.f_not_u.rows(), 0.0);
  for (std::size_t node = 0; node < h.nodes(); ++node) {
    const double w = h.weight(node);
    wu[h.u_index(node)] += w;
    wnu[h.not_u_index(node)] += w;
  }
  for (Eigen::Index r = 0; r < h.f_u.rows(); ++r) cu.add(wu[static_cast<std::size_t>(r)], h.f_u.row(r).data());
  for (Eigen::Index r = 0; r < h.f_not_u.rows(); ++r) cnu.add(wnu[static_cast<std::size_t>(r)], h.f_not_u.row(r).data());

  CovarianceTriple t;
  t.sigma = sigma.value();
  t.c_u = cu.value();
  t.c_not_u = cnu.value();
  t.c_interaction = ci.value();
  t.method = OracleMethod::enumeration;
  t.residual = triple_residual(t.sigma, t.c_u, t.c_not_u, t.c_interaction);
  require_positive_definite(t.sigma);
  return t;
}

CovarianceTriple covariances_quadrature(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                        std::size_t nodes_per_dim) {
  check_subset(model, space, u);
  if (space.dims() > 4) fail(ErrorKind::resource, "quadrature oracle supports p <= 4; use monte_carlo");
  if (nodes_per_dim == 0) fail(ErrorKind::contract, "nodes_per_dim must be positive");
  std::vector<QuadratureRule> rules;
  for (const auto& m : space.marginals()) rules.push_back(rule_for(m, nodes_per_dim));
  const TensorGrid grid(std::move(rules), u, static_cast<double>(1u << 26));
  const GridPass pass = integrate(model, grid, false);

  CovarianceTriple t;
  t.sigma = pass.sigma;
  t.c_u = pass.c_u;
  t.c_not_u = pass.c_not_u;
  t.c_interaction = t.sigma - t.c_u - t.c_not_u;
  t.method = OracleMethod::quadrature;
  t.nodes_per_dim = nodes_per_dim;
  t.residual = triple_residual(t.sigma, t.c_u, t.c_not_u, pass.c_interaction_direct);
  t.accuracy_warning = t.residual > 1e-6;
  require_positive_definite(t.sigma);
  return t;
}

namespace {

// Plain two-pass cross-covariance (1/n), independent of the estimator sums.
Matrix cross_covariance(const RowMatrix& a, const RowMatrix& b) {
  const Vector ma = a.colwise().mean().transpose();
  const Vector mb = b.colwise().mean().transpose();
  const RowMatrix ca = a.rowwise() - ma.transpose();
  const RowMatrix cb = b.rowwise() - mb.transpose();
  return (ca.transpose() * cb) / static_cast<double>(a.rows());
}

}  // namespace

CovarianceTriple covariances_monte_carlo(const VectorModel& model, const InputSpace& space, const SubsetIndex& u,
                                         std::size_t n, Seed seed) {
  check_subset(model, space, u);
  if (n < 2) fail(ErrorKind::contract, "monte_carlo oracle needs n >= 2");
  const Seed oracle_seed = derive_seed(seed, 0x0AC1E);
  const RowMatrix x = sample_inputs(space, n, oracle_seed, Stream::oracle_x);
  const RowMatrix copy_u = sample_inputs(space, n, oracle_seed, Stream::oracle_copy_u);
  const RowMatrix copy_nu = sample_inputs(space, n, oracle_seed, Stream::oracle_copy_not_u);

  // Y^u keeps X_u and redraws X_~u; Y^~u keeps X_~u and redraws X_u.
  RowMatrix xu = x, xnu = x;
  for (std::size_t j : u.complement()) xu.col(static_cast<Eigen::Index>(j)) = copy_u.col(static_cast<Eigen::Index>(j));
  for (std::size_t j : u.indices()) xnu.col(static_cast<Eigen::Index>(j)) = copy_nu.col(static_cast<Eigen::Index>(j));
  const RowMatrix y = eval_model(model, x);
  const RowMatrix yu = eval_model(model, xu);
  const RowMatrix ynu = eval_model(model, xnu);

  const auto k = static_cast<Eigen::Index>(model.out_dims());
  CovarianceTriple t;
  t.sigma = symmetrized(cross_covariance(y, y));
  t.c_u = symmetrized(cross_covariance(y, yu));
  t.c_not_u = u.is_full() ? Matrix::Zero(k, k) : symmetrized(cross_covariance(y, ynu));
  t.c_interaction = t.sigma - t.c_u - t.c_not_u;
  t.method = OracleMethod::monte_carlo;
  t.mc_samples = n;
  t.mc_seed = seed;
  t.residual = triple_residual(t.sigma, t.c_u, t.c_not_u, t.c_interaction);
  require_positive_definite(t.sigma);
  return t;
}

CovarianceTriple transform(const CovarianceTriple& cov, const Matrix& o) {
  if (o.cols() != cov.sigma.rows()) fail(ErrorKind::contract, "transform dimension mismatch");
  CovarianceTriple t = cov;
  t.sigma = symmetrized(o * cov.sigma * o.transpose());
  t.c_u = symmetrized(o * cov.c_u * o.transpose());
  t.c_not_u = symmetrized(o * cov.c_not_u * o.transpose());
  t.c_interaction = symmetrized(o * cov.c_interaction * o.transpose());
  t.residual = triple_residual(t.sigma, t.c_u, t.c_not_u, t.c_interaction);
  return t;
}

ExactIndex exact_index(const CovarianceTriple& cov, const Matrix& m) {
  if (m.rows() != cov.sigma.rows() || m.cols() != cov.sigma.cols())
    fail(ErrorKind::contract, "projection matrix must be k x k");
  const double denominator = trace_product(m, cov.sigma);
  if (!(std::abs(denominator) > 1e-12))
    fail(ErrorKind::ill_posed_index, "Tr(M Sigma) = " + std::to_string(denominator) + " is too close to zero");
  ExactIndex e;
  e.s_u = trace_product(m, cov.c_u) / denominator;
  e.s_not_u = trace_product(m, cov.c_not_u) / denominator;
  e.s_interaction = trace_product(m, cov.c_interaction) / denominator;
  e.m_used = m;
  const double scale = (m.cwiseAbs() * cov.sigma.cwiseAbs()).trace() / std::abs(denominator);
  if (std::abs(e.sum() - 1.0) > 1e-8 * std::max(1.0, scale) + cov.residual * scale)
    fail(ErrorKind::contract, "covariance triple does not add up to Sigma");
  return e;
}

}  // namespace gsi
