#include "gsi/model.hpp"

#include <cmath>
#include <cstring>

#include "gsi/error.hpp"
#include "gsi/kernels.hpp"

namespace gsi {

VectorModel::VectorModel(std::size_t in_dims, std::size_t out_dims, EvalFn eval, ModelKind kind)
    : in_dims_(in_dims), out_dims_(out_dims), eval_(std::move(eval)), kind_(std::move(kind)) {
  if (in_dims_ == 0 || out_dims_ == 0) fail(ErrorKind::contract, "model dimensions must be positive");
}

VectorModel VectorModel::linear(Matrix a) {
  const auto k = static_cast<std::size_t>(a.rows());
  const auto p = static_cast<std::size_t>(a.cols());
  auto shared = std::make_shared<const Matrix>(a);
  EvalFn fn = [shared](std::span<const double> x, std::span<double> y) {
    const Matrix& m = *shared;
    for (Eigen::Index l = 0; l < m.rows(); ++l) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) acc += m(l, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(l)] = acc;
    }
  };
  return VectorModel(p, k, std::move(fn), LinearKind{std::move(a)});
}

namespace {
std::string key_of(std::span<const double> x) {
  std::string key(x.size() * sizeof(double), '\0');
  std::memcpy(key.data(), x.data(), key.size());
  return key;
}
}  // namespace

VectorModel VectorModel::tabulated(std::string source, const RowMatrix& x, const RowMatrix& y) {
  if (x.rows() != y.rows()) fail(ErrorKind::contract, "tabulated model: row counts differ");
  const auto p = static_cast<std::size_t>(x.cols());
  const auto k = static_cast<std::size_t>(y.cols());
  auto table = std::make_shared<std::unordered_map<std::string, std::vector<double>>>();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> out(y.row(i).data(), y.row(i).data() + y.cols());
    (*table)[key_of({x.row(i).data(), p})] = std::move(out);
  }
  EvalFn fn = [table, source](std::span<const double> xin, std::span<double> yout) {
    auto it = table->find(key_of(xin));
    if (it == table->end())
      fail(ErrorKind::contract, "input point not tabulated in external model " + source);
    std::copy(it->second.begin(), it->second.end(), yout.begin());
  };
  return VectorModel(p, k, std::move(fn), ExternalKind{std::move(source), static_cast<std::size_t>(x.rows())});
}

std::string VectorModel::name() const {
  struct Visitor {
    std::string operator()(const LinearKind&) const { return "linear"; }
    std::string operator()(const BuiltinKind& b) const { return b.name; }
    std::string operator()(const ExternalKind& e) const { return "external:" + e.source; }
    std::string operator()(const ComposedKind& c) const { return "transformed:" + c.base; }
  };
  return std::visit(Visitor{}, kind_);
}

Vector VectorModel::operator()(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != in_dims_) fail(ErrorKind::contract, "input dimension mismatch");
  Vector y(static_cast<Eigen::Index>(out_dims_));
  eval({x.data(), in_dims_}, {y.data(), out_dims_});
  return y;
}

void validate(const OutputTransform& t, std::size_t k, const std::string& field) {
  const auto check_shape = [&](const Matrix& o) {
    if (static_cast<std::size_t>(o.rows()) != k || static_cast<std::size_t>(o.cols()) != k)
      config_error(field, "transform must be " + std::to_string(k) + "x" + std::to_string(k));
    if (!o.allFinite()) config_error(field, "transform has non-finite entries");
  };
  if (const auto* iso = std::get_if<Isometry>(&t)) {
    check_shape(iso->o);
    const Matrix gram = iso->o.transpose() * iso->o;
    if (max_abs(gram - Matrix::Identity(gram.rows(), gram.cols())) > 1e-10)
      config_error(field, "declared isometry is not orthogonal (O^t O != Id)");
  } else if (const auto* h = std::get_if<Homothety>(&t)) {
    if (!(std::isfinite(h->lambda) && h->lambda != 0.0)) config_error(field, "homothety scalar must be nonzero");
  } else {
    check_shape(std::get<GeneralLinear>(t).o);
  }
}

Matrix transform_matrix(const OutputTransform& t, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  if (const auto* iso = std::get_if<Isometry>(&t)) return iso->o;
  if (const auto* h = std::get_if<Homothety>(&t)) return h->lambda * Matrix::Identity(n, n);
  return std::get<GeneralLinear>(t).o;
}

VectorModel apply_transform(const VectorModel& model, const OutputTransform& t) {
  const std::size_t k = model.out_dims();
  try {
    validate(t, k, "transform");
  } catch (const Error& e) {
    fail(ErrorKind::contract, e.what());
  }
  const Matrix o = transform_matrix(t, k);
  if (const auto* lin = std::get_if<LinearKind>(&model.kind())) return VectorModel::linear(o * lin->a);

  std::string base = model.name();
  Matrix composed = o;
  if (const auto* c = std::get_if<ComposedKind>(&model.kind())) {
    base = c->base;
    composed = o * c->o;
  }
  if (const auto* h = std::get_if<Homothety>(&t)) {
    const double lambda = h->lambda;
    EvalFn fn = [model, lambda](std::span<const double> x, std::span<double> y) {
      model.eval(x, y);
      for (double& v : y) v *= lambda;
    };
    return VectorModel(model.in_dims(), k, std::move(fn), ComposedKind{std::move(base), std::move(composed)});
  }
  auto shared = std::make_shared<const Matrix>(o);
  EvalFn fn = [model, shared](std::span<const double> x, std::span<double> y) {
    const std::size_t kk = y.size();
    double inner[16];
    std::vector<double> heap;
    double* buf = inner;
    if (kk > 16) {
      heap.resize(kk);
      buf = heap.data();
    }
    model.eval(x, {buf, kk});
    const Matrix& m = *shared;
    for (std::size_t l = 0; l < kk; ++l) {
      double acc = 0.0;
      for (std::size_t j = 0; j < kk; ++j)
        acc += m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) * buf[j];
      y[l] = acc;
    }
  };
  return VectorModel(model.in_dims(), k, std::move(fn), ComposedKind{std::move(base), std::move(composed)});
}

RowMatrix eval_model(const VectorModel& model, const RowMatrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != model.in_dims())
    fail(ErrorKind::contract, "input has " + std::to_string(inputs.cols()) + " columns, model expects " +
                                  std::to_string(model.in_dims()));
  return kernels::parallel::eval_rows(model, inputs);
}

}  // namespace gsi
