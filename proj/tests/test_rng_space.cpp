#include <doctest.h>

#include <cmath>
#include <set>

#include "gsi/error.hpp"
#include "gsi/input_space.hpp"
#include "gsi/rng.hpp"
#include "gsi/subset.hpp"

using namespace gsi;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draws are addressed by counter") {
  const Draw d{42, Stream::inputs, 7, 1};
  CHECK(uniform01(d) == uniform01(d));
  CHECK(uniform01(d) != uniform01({42, Stream::inputs, 7, 0}));
  CHECK(uniform01(d) != uniform01({42, Stream::design_x, 7, 1}));
  CHECK(uniform01(d) != uniform01({43, Stream::inputs, 7, 1}));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("uniform sample is deterministic and in range") {
  const auto space = InputSpace::uniform01(2);
  const auto a = sample_inputs(space, 4, 42);
  const auto b = sample_inputs(space, 4, 42);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 2);
  CHECK(a == b);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 1.0);
  CHECK(sample_inputs(space, 4, 43) != a);
}

TEST_CASE("normal sample moments") {
  const auto x = sample_inputs(InputSpace::standard_normal(1), 100000, 1);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / static_cast<double>(x.rows() - 1);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("shifted marginals") {
  const InputSpace space({Uniform{-2.0, 3.0}, Normal{5.0, 2.0}});
  const auto x = sample_inputs(space, 200000, 9);
  CHECK(x.col(0).minCoeff() >= -2.0);
  CHECK(x.col(0).maxCoeff() < 3.0);
  CHECK(std::abs(x.col(0).mean() - 0.5) < 0.02);
  CHECK(std::abs(x.col(1).mean() - 5.0) < 0.02);
  CHECK(space.variances()(0) == doctest::Approx(25.0 / 12.0));
  CHECK(space.variances()(1) == doctest::Approx(4.0));
}

TEST_CASE("discrete support containment") {
  const InputSpace space({Discrete{{0.0, 1.0}, {0.5, 0.5}}});
  const auto x = sample_inputs(space, 10, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK((x(i, 0) == 0.0 || x(i, 0) == 1.0));
  const auto big = sample_inputs(InputSpace({Discrete{{-1.0, 2.0, 7.0}, {0.2, 0.3, 0.5}}}), 100000, 4);
  std::set<double> seen(big.data(), big.data() + big.size());
  CHECK(seen == std::set<double>{-1.0, 2.0, 7.0});
  CHECK(big.mean() == doctest::Approx(0.2 * -1 + 0.3 * 2 + 0.5 * 7).epsilon(0.01));
}

TEST_CASE("columns are uncorrelated") {
  const InputSpace space({Uniform{0, 1}, Normal{0, 1}, Discrete{{0, 1}, {0.5, 0.5}}});
  const auto x = sample_inputs(space, 200000, 11);
  for (Eigen::Index a = 0; a < 3; ++a)
    for (Eigen::Index b = a + 1; b < 3; ++b) {
      const auto ca = x.col(a).array() - x.col(a).mean();
      const auto cb = x.col(b).array() - x.col(b).mean();
      const double corr = (ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum());
      CHECK(std::abs(corr) < 0.01);
    }
}

TEST_CASE("invalid marginals are configuration errors") {
  auto kind_of = [](const Marginal& m) {
    try {
      validate(m, "space[0]");
    } catch (const Error& e) {
      CHECK(e.field() == "space[0]");
      return e.kind();
    }
    return ErrorKind::contract;
  };
  CHECK(kind_of(Uniform{1.0, 1.0}) == ErrorKind::configuration);
  CHECK(kind_of(Normal{0.0, -1.0}) == ErrorKind::configuration);
  CHECK(kind_of(Discrete{{0.0, 1.0}, {0.5, 0.6}}) == ErrorKind::configuration);
  CHECK(kind_of(Discrete{{0.0}, {0.5, 0.5}}) == ErrorKind::configuration);
}

TEST_CASE("subset index") {
  const SubsetIndex u({0, 2}, 4);
  CHECK(u.complement() == std::vector<std::size_t>{1, 3});
  CHECK(u.to_string() == "{1,3}");
  CHECK(u.one_based() == std::vector<std::size_t>{1, 3});
  CHECK(!u.is_full());
  CHECK(u.complement_subset().indices() == std::vector<std::size_t>{1, 3});
  CHECK(SubsetIndex({0, 1}, 2).is_full());
  CHECK(SubsetIndex::from_one_based({2, 1}, 2, "subsets[0]").indices() == std::vector<std::size_t>{0, 1});
  try {
    SubsetIndex::from_one_based({3}, 2, "subsets[0]");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
    CHECK(e.field() == "subsets[0]");
  }
  CHECK_THROWS_AS(SubsetIndex::from_one_based({}, 2, "subsets[1]"), Error);
  CHECK_THROWS_AS(SubsetIndex::from_one_based({0}, 2, "subsets[1]"), Error);
  CHECK_THROWS_AS(SubsetIndex::from_one_based({1, 1}, 2, "subsets[1]"), Error);
}
