#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gsi/quadrature.hpp"
#include "oracles.hpp"

using namespace gsi;

namespace {

double integrate(const QuadratureRule& r, auto fn) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * fn(r.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("legendre rule is exact up to degree 2n-1") {
  for (std::size_t n : {1, 2, 5, 16, 64}) {
    const auto r = gauss_legendre(n);
    REQUIRE(r.nodes.size() == n);
    CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t d = 0; d < 2 * n; ++d) {
      // E[X^d] for X ~ U(-1,1).
      const double expected = d % 2 ? 0.0 : 1.0 / static_cast<double>(d + 1);
      CHECK(integrate(r, [&](double x) { return std::pow(x, static_cast<double>(d)); }) ==
            doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("hermite rule matches normal moments") {
  for (std::size_t n : {1, 3, 8, 20}) {
    const auto r = gauss_hermite(n);
    for (int d = 0; d < static_cast<int>(2 * n) && d <= 16; ++d) {
      const double expected = oracle::normal_moment(d);
      CHECK(integrate(r, [&](double x) { return std::pow(x, d); }) ==
            doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("nodes are symmetric and sorted") {
  const auto r = gauss_legendre(9);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] == -r.nodes[r.nodes.size() - 1 - i]);
    CHECK(r.weights[i] == r.weights[r.nodes.size() - 1 - i]);
    if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }
}

TEST_CASE("rules for marginals") {
  const auto u = rule_for(Uniform{2.0, 5.0}, 6);
  CHECK(integrate(u, [](double x) { return x; }) == doctest::Approx(3.5));
  CHECK(integrate(u, [](double x) { return (x - 3.5) * (x - 3.5); }) == doctest::Approx(0.75));
  const auto g = rule_for(Normal{1.0, 3.0}, 6);
  CHECK(integrate(g, [](double x) { return x; }) == doctest::Approx(1.0));
  CHECK(integrate(g, [](double x) { return (x - 1) * (x - 1); }) == doctest::Approx(9.0));
  const auto d = rule_for(Discrete{{0.0, 4.0}, {0.25, 0.75}}, 100);
  CHECK(d.nodes == std::vector<double>{0.0, 4.0});
  CHECK(d.weights == std::vector<double>{0.25, 0.75});
}
