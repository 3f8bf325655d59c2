#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "gsi/linalg.hpp"
#include "gsi/rng.hpp"

namespace gsi {

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

// Finite support with probabilities summing to one (within 1e-12).
struct Discrete {
  std::vector<double> support;
  std::vector<double> probabilities;
};

using Marginal = std::variant<Uniform, Normal, Discrete>;

double mean(const Marginal& m);
double variance(const Marginal& m);
bool is_discrete(const Marginal& m);

// Validates parameters; throws a configuration error naming `field`.
void validate(const Marginal& m, const std::string& field);

// Independent inputs X_1..X_p. Each coordinate draws from its own column of
// the counter space, so coordinates are independent by construction.
class InputSpace {
 public:
  InputSpace() = default;
  explicit InputSpace(std::vector<Marginal> marginals);

  static InputSpace uniform01(std::size_t p);
  static InputSpace standard_normal(std::size_t p);

  std::size_t dims() const { return marginals_.size(); }
  const Marginal& marginal(std::size_t j) const { return marginals_.at(j); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  bool all_discrete() const;
  Vector variances() const;

  // One draw of coordinate `j` at counter (stream, row).
  double draw(std::size_t j, Seed seed, Stream stream, std::uint64_t row) const;

 private:
  std::vector<Marginal> marginals_;
};

// n x p matrix of i.i.d. rows; a pure function of (space, n, seed, stream).
RowMatrix sample_inputs(const InputSpace& space, std::size_t n, Seed seed,
                        Stream stream = Stream::inputs);

}  // namespace gsi
