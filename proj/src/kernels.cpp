#include "gsi/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

#include "gsi/error.hpp"

namespace gsi::kernels {

PairAccumulator::PairAccumulator(std::size_t k, Moments mode)
    : k_(k),
      mode_(mode),
      cross_(mode == Moments::full ? k * k : k),
      square_(mode == Moments::full ? k * k : k),
      half_(k) {}

void PairAccumulator::add_row(const double* y, const double* yu) {
  if (mode_ == Moments::diagonal) {
    for (std::size_t l = 0; l < k_; ++l) {
      cross_[l].add(y[l] * yu[l]);
      square_[l].add((y[l] * y[l] + yu[l] * yu[l]) / 2.0);
      half_[l].add((y[l] + yu[l]) / 2.0);
    }
    return;
  }
  for (std::size_t l = 0; l < k_; ++l) {
    for (std::size_t m = 0; m < k_; ++m) {
      cross_[l * k_ + m].add(y[l] * yu[m]);
      if (m >= l) square_[l * k_ + m].add((y[l] * y[m] + yu[l] * yu[m]) / 2.0);
    }
    half_[l].add((y[l] + yu[l]) / 2.0);
  }
}

void PairAccumulator::merge(const PairAccumulator& chunk) {
  for (std::size_t i = 0; i < cross_.size(); ++i) cross_[i].add(chunk.cross_[i].value());
  for (std::size_t i = 0; i < square_.size(); ++i) square_[i].add(chunk.square_[i].value());
  for (std::size_t i = 0; i < half_.size(); ++i) half_[i].add(chunk.half_[i].value());
}

PairSums PairAccumulator::finish(std::size_t n) const {
  const auto k = static_cast<Eigen::Index>(k_);
  PairSums s{n, mode_, Matrix::Zero(k, k), Matrix::Zero(k, k), Vector::Zero(k)};
  for (std::size_t l = 0; l < k_; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    s.half(li) = half_[l].value();
    if (mode_ == Moments::diagonal) {
      s.cross(li, li) = cross_[l].value();
      s.square(li, li) = square_[l].value();
      continue;
    }
    for (std::size_t m = 0; m < k_; ++m) {
      const auto mi = static_cast<Eigen::Index>(m);
      s.cross(li, mi) = cross_[l * k_ + m].value();
      if (m >= l) s.square(li, mi) = s.square(mi, li) = square_[l * k_ + m].value();
    }
  }
  return s;
}

Ratio estimator_ratio(const PairSums& sums) {
  Ratio r;
  const double n = static_cast<double>(sums.n);
  for (Eigen::Index l = 0; l < sums.half.size(); ++l) {
    const double centering = sums.half(l) * sums.half(l) / n;
    r.numerator += sums.cross(l, l) - centering;
    r.denominator += sums.square(l, l) - centering;
    r.magnitude += sums.square(l, l);
  }
  return r;
}

namespace {

void check_pair_shapes(const RowMatrix& y, const RowMatrix& yu) {
  if (y.rows() != yu.rows() || y.cols() != yu.cols())
    fail(ErrorKind::contract, "Y and Y^u must have identical shapes");
}

void check_resample_size(const RowMatrix& y) {
  if (y.rows() < 1 || static_cast<std::uint64_t>(y.rows()) >= (std::uint64_t{1} << 32))
    fail(ErrorKind::contract, "bootstrap supports 1 <= N < 2^32 pairs");
}

void eval_range(const VectorModel& model, const RowMatrix& inputs, RowMatrix& out, Eigen::Index begin,
                Eigen::Index end) {
  const std::size_t p = model.in_dims(), k = model.out_dims();
  for (Eigen::Index i = begin; i < end; ++i) model.eval({inputs.row(i).data(), p}, {out.row(i).data(), k});
}

// Each Philox block yields four 32-bit lanes; lane -> index by the
// multiply-shift map floor(lane * n / 2^32).
double resampled_estimate(const RowMatrix& y, const RowMatrix& yu, std::size_t rep, Seed seed) {
  const auto n = static_cast<std::uint64_t>(y.rows());
  PairAccumulator acc(static_cast<std::size_t>(y.cols()), Moments::diagonal);
  for (std::uint64_t block = 0; block * 4 < n; ++block) {
    const auto lanes = raw_block({seed, Stream::bootstrap, block, static_cast<std::uint32_t>(rep)});
    for (std::uint64_t lane = 0; lane < 4 && block * 4 + lane < n; ++lane) {
      const auto pick = static_cast<Eigen::Index>((static_cast<std::uint64_t>(lanes[lane]) * n) >> 32);
      acc.add_row(y.row(pick).data(), yu.row(pick).data());
    }
  }
  const Ratio r = estimator_ratio(acc.finish(static_cast<std::size_t>(n)));
  if (!(std::abs(r.denominator) > 1e-14 * r.magnitude)) return std::numeric_limits<double>::quiet_NaN();
  return r.numerator / r.denominator;
}

void require_finite(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::degenerate_sample, "bootstrap replicate with vanishing denominator");
}

}  // namespace

namespace serial {

RowMatrix eval_rows(const VectorModel& model, const RowMatrix& inputs) {
  RowMatrix out(inputs.rows(), static_cast<Eigen::Index>(model.out_dims()));
  eval_range(model, inputs, out, 0, inputs.rows());
  return out;
}

PairSums pair_sums(const RowMatrix& y, const RowMatrix& yu, Moments mode) {
  check_pair_shapes(y, yu);
  PairAccumulator acc(static_cast<std::size_t>(y.cols()), mode);
  for (Eigen::Index i = 0; i < y.rows(); ++i) acc.add_row(y.row(i).data(), yu.row(i).data());
  return acc.finish(static_cast<std::size_t>(y.rows()));
}

std::vector<double> bootstrap_estimates(const RowMatrix& y, const RowMatrix& yu, std::size_t reps, Seed seed) {
  check_pair_shapes(y, yu);
  check_resample_size(y);
  std::vector<double> out(reps);
  for (std::size_t b = 0; b < reps; ++b) out[b] = resampled_estimate(y, yu, b, seed);
  require_finite(out);
  return out;
}

}  // namespace serial

namespace parallel {

RowMatrix eval_rows(const VectorModel& model, const RowMatrix& inputs) {
  RowMatrix out(inputs.rows(), static_cast<Eigen::Index>(model.out_dims()));
  const auto chunk = static_cast<Eigen::Index>(kChunkRows);
  const Eigen::Index chunks = (inputs.rows() + chunk - 1) / chunk;
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    try {
      eval_range(model, inputs, out, c * chunk, std::min(inputs.rows(), (c + 1) * chunk));
    } catch (...) {
#pragma omp critical(gsi_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

PairSums pair_sums(const RowMatrix& y, const RowMatrix& yu, Moments mode) {
  check_pair_shapes(y, yu);
  const auto k = static_cast<std::size_t>(y.cols());
  const auto chunk = static_cast<Eigen::Index>(kChunkRows);
  const Eigen::Index chunks = (y.rows() + chunk - 1) / chunk;
  std::vector<PairAccumulator> partial(static_cast<std::size_t>(chunks), PairAccumulator(k, mode));
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    auto& acc = partial[static_cast<std::size_t>(c)];
    const Eigen::Index end = std::min(y.rows(), (c + 1) * chunk);
    for (Eigen::Index i = c * chunk; i < end; ++i) acc.add_row(y.row(i).data(), yu.row(i).data());
  }
  PairAccumulator total(k, mode);
  for (const auto& acc : partial) total.merge(acc);
  return total.finish(static_cast<std::size_t>(y.rows()));
}

std::vector<double> bootstrap_estimates(const RowMatrix& y, const RowMatrix& yu, std::size_t reps, Seed seed) {
  check_pair_shapes(y, yu);
  check_resample_size(y);
  std::vector<double> out(reps);
  const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t b = 0; b < count; ++b)
    out[static_cast<std::size_t>(b)] = resampled_estimate(y, yu, static_cast<std::size_t>(b), seed);
  require_finite(out);
  return out;
}

}  // namespace parallel

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(n > 0 ? n : 1); }

}  // namespace gsi::kernels
