#include "gsi/input_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gsi/error.hpp"

namespace gsi {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

double mean(const Marginal& m) {
  return std::visit(
      overloaded{[](const Uniform& u) { return 0.5 * (u.a + u.b); },
                 [](const Normal& n) { return n.mean; },
                 [](const Discrete& d) {
                   return std::inner_product(d.support.begin(), d.support.end(),
                                             d.probabilities.begin(), 0.0);
                 }},
      m);
}

double variance(const Marginal& m) {
  return std::visit(overloaded{[](const Uniform& u) { return (u.b - u.a) * (u.b - u.a) / 12.0; },
                               [](const Normal& n) { return n.sd * n.sd; },
                               [&](const Discrete& d) {
                                 const double mu = mean(m);
                                 double v = 0.0;
                                 for (std::size_t i = 0; i < d.support.size(); ++i)
                                   v += d.probabilities[i] * (d.support[i] - mu) * (d.support[i] - mu);
                                 return v;
                               }},
                    m);
}

bool is_discrete(const Marginal& m) { return std::holds_alternative<Discrete>(m); }

void validate(const Marginal& m, const std::string& field) {
  std::visit(overloaded{[&](const Uniform& u) {
                          if (!(std::isfinite(u.a) && std::isfinite(u.b) && u.a < u.b))
                            config_error(field, "uniform requires finite a < b");
                        },
                        [&](const Normal& n) {
                          if (!(std::isfinite(n.mean) && std::isfinite(n.sd) && n.sd > 0.0))
                            config_error(field, "normal requires finite mean and sd > 0");
                        },
                        [&](const Discrete& d) {
                          if (d.support.empty())
                            config_error(field, "discrete support must be non-empty");
                          if (d.support.size() != d.probabilities.size())
                            config_error(field, "support and probabilities differ in length");
                          double total = 0.0;
                          for (std::size_t i = 0; i < d.support.size(); ++i) {
                            if (!std::isfinite(d.support[i]))
                              config_error(field, "non-finite support point");
                            if (!(d.probabilities[i] >= 0.0))
                              config_error(field, "negative probability");
                            total += d.probabilities[i];
                          }
                          if (std::abs(total - 1.0) > 1e-12)
                            config_error(field, "probabilities must sum to 1");
                        }},
             m);
}

InputSpace::InputSpace(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) config_error("space.marginals", "at least one input is required");
  for (std::size_t j = 0; j < marginals_.size(); ++j)
    validate(marginals_[j], "space.marginals[" + std::to_string(j) + "]");
}

InputSpace InputSpace::uniform01(std::size_t p) {
  return InputSpace(std::vector<Marginal>(p, Uniform{0.0, 1.0}));
}

InputSpace InputSpace::standard_normal(std::size_t p) {
  return InputSpace(std::vector<Marginal>(p, Normal{0.0, 1.0}));
}

bool InputSpace::all_discrete() const {
  return std::all_of(marginals_.begin(), marginals_.end(), is_discrete);
}

Vector InputSpace::variances() const {
  Vector v(static_cast<Eigen::Index>(dims()));
  for (std::size_t j = 0; j < dims(); ++j) v(static_cast<Eigen::Index>(j)) = variance(marginals_[j]);
  return v;
}

double InputSpace::draw(std::size_t j, Seed seed, Stream stream, std::uint64_t row) const {
  const Draw d{seed, stream, row, static_cast<std::uint32_t>(j)};
  return std::visit(overloaded{[&](const Uniform& u) { return u.a + (u.b - u.a) * gsi::uniform01(d); },
                               [&](const Normal& n) { return n.mean + n.sd * gsi::standard_normal(d); },
                               [&](const Discrete& dist) {
                                 const double x = gsi::uniform01(d);
                                 double cumulative = 0.0;
                                 for (std::size_t i = 0; i + 1 < dist.support.size(); ++i) {
                                   cumulative += dist.probabilities[i];
                                   if (x < cumulative) return dist.support[i];
                                 }
                                 return dist.support.back();
                               }},
                    marginals_[j]);
}

RowMatrix sample_inputs(const InputSpace& space, std::size_t n, Seed seed, Stream stream) {
  if (n == 0) fail(ErrorKind::contract, "sample_inputs requires n >= 1");
  const std::size_t p = space.dims();
  RowMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < p; ++j)
      out(i, static_cast<Eigen::Index>(j)) = space.draw(j, seed, stream, static_cast<std::uint64_t>(i));
  return out;
}

}  // namespace gsi
