#include "gsi/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsi/error.hpp"

namespace gsi::corpus {

namespace {

double scalar(const Parameters& params, const std::string& key, double fallback, const std::string& field) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) config_error(field + "." + key, "expected a single number");
  return it->second.front();
}

std::size_t count(const Parameters& params, const std::string& key, std::size_t fallback,
                  const std::string& field) {
  const double v = scalar(params, key, static_cast<double>(fallback), field);
  if (!(v >= 0.0 && v == std::floor(v) && v < 1e6)) config_error(field + "." + key, "expected a count");
  return static_cast<std::size_t>(v);
}

void reject_unknown(const Parameters& params, std::initializer_list<const char*> known, const std::string& field) {
  for (const auto& [key, _] : params)
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      config_error(field + "." + key, "unknown parameter");
}

VectorModel builtin(std::size_t p, std::size_t k, EvalFn fn, std::string name, const Parameters& params) {
  std::map<std::string, double> flat;
  for (const auto& [key, values] : params)
    if (values.size() == 1) flat[key] = values.front();
  return VectorModel(p, k, std::move(fn), BuiltinKind{std::move(name), std::move(flat)});
}

}  // namespace

Entry make(const std::string& name, const Parameters& params, const std::string& field) {
  const std::string pfield = field + ".params";
  if (name == "identity_2") {
    reject_unknown(params, {}, pfield);
    return {VectorModel::linear(Matrix::Identity(2, 2)), InputSpace::standard_normal(2)};
  }
  if (name == "linear") {
    reject_unknown(params, {"a", "rows"}, pfield);
    auto it = params.find("a");
    if (it == params.end() || it->second.empty()) config_error(pfield + ".a", "linear model requires matrix entries");
    const std::size_t rows = count(params, "rows", 1, pfield);
    const auto& a = it->second;
    if (rows == 0 || a.size() % rows != 0) config_error(pfield + ".a", "entry count not divisible by rows");
    const std::size_t cols = a.size() / rows;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r * cols + c];
    if (!m.allFinite()) config_error(pfield + ".a", "non-finite entry");
    return {VectorModel::linear(std::move(m)), InputSpace::standard_normal(cols)};
  }
  if (name == "sum_prod") {
    reject_unknown(params, {}, pfield);
    EvalFn fn = [](std::span<const double> x, std::span<double> y) {
      y[0] = x[0] + x[1];
      y[1] = x[0] * x[1];
    };
    return {builtin(2, 2, std::move(fn), name, params), InputSpace::uniform01(2)};
  }
  if (name == "u_only") {
    reject_unknown(params, {"p", "u", "pad"}, pfield);
    const std::size_t p = count(params, "p", 2, pfield);
    const std::size_t pad = count(params, "pad", 0, pfield);
    if (p == 0) config_error(pfield + ".p", "p must be positive");
    std::vector<std::size_t> u{0};
    if (auto it = params.find("u"); it != params.end()) {
      u.clear();
      for (double v : it->second) {
        if (!(v >= 1 && v <= static_cast<double>(p) && v == std::floor(v)))
          config_error(pfield + ".u", "index outside {1..p}");
        u.push_back(static_cast<std::size_t>(v) - 1);
      }
      if (u.empty()) config_error(pfield + ".u", "u must be non-empty");
    }
    EvalFn fn = [u, pad](std::span<const double> x, std::span<double> y) {
      double s = 0.0;
      for (std::size_t j : u) s += x[j];
      y[0] = s;
      y[1] = s * s;
      for (std::size_t l = 0; l < pad; ++l) y[2 + l] = 0.0;
    };
    return {builtin(p, 2 + pad, std::move(fn), name, params), InputSpace::uniform01(p)};
  }
  if (name == "interaction_2") {
    reject_unknown(params, {}, pfield);
    EvalFn fn = [](std::span<const double> x, std::span<double> y) {
      y[0] = x[0] * x[1];
      y[1] = 0.0;
    };
    const Discrete pm{{-1.0, 1.0}, {0.5, 0.5}};
    return {builtin(2, 2, std::move(fn), name, params), InputSpace({pm, pm})};
  }
  if (name == "constant") {
    reject_unknown(params, {"p", "k", "value"}, pfield);
    const std::size_t p = count(params, "p", 2, pfield);
    const std::size_t k = count(params, "k", 2, pfield);
    if (p == 0 || k == 0) config_error(pfield, "p and k must be positive");
    const double value = scalar(params, "value", 1.0, pfield);
    EvalFn fn = [value](std::span<const double>, std::span<double> y) { std::fill(y.begin(), y.end(), value); };
    return {builtin(p, k, std::move(fn), name, params), InputSpace::uniform01(p)};
  }
  if (name == "ishigami") {
    reject_unknown(params, {"a", "b"}, pfield);
    const double a = scalar(params, "a", 7.0, pfield);
    const double b = scalar(params, "b", 0.1, pfield);
    EvalFn fn = [a, b](std::span<const double> x, std::span<double> y) {
      const double s2 = std::sin(x[1]);
      const double x3 = x[2] * x[2];
      y[0] = std::sin(x[0]) * (1.0 + b * x3 * x3) + a * s2 * s2;
    };
    const Uniform box{-std::numbers::pi, std::numbers::pi};
    return {builtin(3, 1, std::move(fn), name, params), InputSpace({box, box, box})};
  }
  config_error(field, "unknown model '" + name + "'");
}

std::vector<std::string> names() {
  return {"identity_2", "linear", "sum_prod", "u_only", "interaction_2", "constant", "ishigami"};
}

double ishigami_closed_index(const std::vector<std::size_t>& u, double a, double b) {
  const double pi4 = std::pow(std::numbers::pi, 4);
  const double pi8 = pi4 * pi4;
  const double v1 = b * pi4 / 5.0 + b * b * pi8 / 50.0 + 0.5;
  const double v2 = a * a / 8.0;
  const double v13 = 8.0 * b * b * pi8 / 225.0;
  const double total = v1 + v2 + v13;
  const auto has = [&](std::size_t j) { return std::find(u.begin(), u.end(), j) != u.end(); };
  double closed = 0.0;
  if (has(0)) closed += v1;
  if (has(1)) closed += v2;
  if (has(0) && has(2)) closed += v13;
  return closed / total;
}

}  // namespace gsi::corpus
