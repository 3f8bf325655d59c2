#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gsi/linalg.hpp"

namespace gsi {

using EvalFn = std::function<void(std::span<const double> x, std::span<double> y)>;

struct LinearKind {
  Matrix a;  // k x p
};

struct BuiltinKind {
  std::string name;
  std::map<std::string, double> parameters;
};

// Pre-tabulated evaluations; points are looked up by their exact bit pattern.
struct ExternalKind {
  std::string source;
  std::size_t rows = 0;
};

// A builtin or external model left-composed with a k x k output map.
struct ComposedKind {
  std::string base;
  Matrix o;
};

using ModelKind = std::variant<LinearKind, BuiltinKind, ExternalKind, ComposedKind>;

// Deterministic f: R^p -> R^k. Immutable; cheap to copy.
class VectorModel {
 public:
  VectorModel(std::size_t in_dims, std::size_t out_dims, EvalFn eval, ModelKind kind);

  static VectorModel linear(Matrix a);
  static VectorModel tabulated(std::string source, const RowMatrix& x, const RowMatrix& y);

  std::size_t in_dims() const { return in_dims_; }
  std::size_t out_dims() const { return out_dims_; }
  const ModelKind& kind() const { return kind_; }
  std::string name() const;

  void eval(std::span<const double> x, std::span<double> y) const { eval_(x, y); }
  Vector operator()(const Vector& x) const;

 private:
  std::size_t in_dims_;
  std::size_t out_dims_;
  EvalFn eval_;
  ModelKind kind_;
};

struct Isometry {
  Matrix o;
};
struct Homothety {
  double lambda = 1.0;
};
struct GeneralLinear {
  Matrix o;
};
using OutputTransform = std::variant<Isometry, Homothety, GeneralLinear>;

// Validates the transform invariants (O^t O = Id within 1e-10 for isometries,
// lambda != 0 for homotheties). Errors name `field`.
void validate(const OutputTransform& t, std::size_t k, const std::string& field);

// Matrix of the transform on R^k.
Matrix transform_matrix(const OutputTransform& t, std::size_t k);

// x -> O f(x). Linear models stay linear (A becomes O A).
VectorModel apply_transform(const VectorModel& model, const OutputTransform& t);

// Row i of the result is f(row i of inputs). Rows may be split across threads.
RowMatrix eval_model(const VectorModel& model, const RowMatrix& inputs);

}  // namespace gsi
