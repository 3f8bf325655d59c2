#pragma once

// Data-parallel inner loops. Each kernel exists twice:
//   serial::   straightforward single-pass reference, kept for testing;
//   parallel:: OpenMP version used by the library.
// Parallel reductions accumulate fixed-size row chunks independently and
// merge chunk totals in chunk order, so their bits do not depend on the
// number of threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsi/linalg.hpp"
#include "gsi/model.hpp"
#include "gsi/rng.hpp"

namespace gsi::kernels {

inline constexpr std::size_t kChunkRows = 4096;

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

enum class Moments { diagonal, full };

// Raw (un-normalized) pick-freeze sums over the N pairs:
//   cross(l,m)  = sum_i Y_il * Yu_im
//   square(l,m) = sum_i (Y_il*Y_im + Yu_il*Yu_im) / 2
//   half(l)     = sum_i (Y_il + Yu_il) / 2
// In diagonal mode only the diagonals of cross/square are filled; the
// diagonal entries are bit-identical between the two modes.
struct PairSums {
  std::size_t n = 0;
  Moments mode = Moments::diagonal;
  Matrix cross;
  Matrix square;
  Vector half;
};

class PairAccumulator {
 public:
  PairAccumulator(std::size_t k, Moments mode);
  void add_row(const double* y, const double* yu);
  void merge(const PairAccumulator& chunk);
  PairSums finish(std::size_t n) const;

 private:
  std::size_t k_;
  Moments mode_;
  std::vector<CompensatedSum> cross_;
  std::vector<CompensatedSum> square_;
  std::vector<CompensatedSum> half_;
};

// Numerator and denominator of the pick-freeze estimator from diagonal sums,
// summed over output coordinates in index order.
struct Ratio {
  double numerator = 0.0;
  double denominator = 0.0;
  double magnitude = 0.0;  // sum_l square(l,l), used by degeneracy guards
};
Ratio estimator_ratio(const PairSums& sums);

namespace serial {
RowMatrix eval_rows(const VectorModel& model, const RowMatrix& inputs);
PairSums pair_sums(const RowMatrix& y, const RowMatrix& yu, Moments mode);
// Pair-resampled estimates; replicate b draws indices from (seed, bootstrap, b, i).
std::vector<double> bootstrap_estimates(const RowMatrix& y, const RowMatrix& yu, std::size_t reps, Seed seed);
}  // namespace serial

namespace parallel {
RowMatrix eval_rows(const VectorModel& model, const RowMatrix& inputs);
PairSums pair_sums(const RowMatrix& y, const RowMatrix& yu, Moments mode);
std::vector<double> bootstrap_estimates(const RowMatrix& y, const RowMatrix& yu, std::size_t reps, Seed seed);
}  // namespace parallel

// Compensated sum of fn(i) over rows [0, n).
template <class RowFn>
double serial_sum_rows(std::size_t n, RowFn fn) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(fn(i));
  return acc.value();
}

// Chunked version of serial_sum_rows; chunk totals merge in chunk order.
template <class RowFn>
double parallel_sum_rows(std::size_t n, RowFn fn) {
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<CompensatedSum> partial(chunks);
  const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
    const std::size_t end = std::min(n, begin + kChunkRows);
    auto& acc = partial[static_cast<std::size_t>(c)];
    for (std::size_t i = begin; i < end; ++i) acc.add(fn(i));
  }
  CompensatedSum total;
  for (const auto& acc : partial) total.add(acc.value());
  return total.value();
}

// Current OpenMP thread budget (1 when OpenMP is unavailable).
int max_threads();
void set_threads(int n);

}  // namespace gsi::kernels
