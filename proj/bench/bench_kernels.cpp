// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "gsi/corpus.hpp"
#include "gsi/input_space.hpp"
#include "gsi/kernels.hpp"

using namespace gsi;

namespace {

struct Pairs {
  RowMatrix y, yu;
};

const corpus::Entry& ishigami() {
  static const auto e = corpus::make("ishigami");
  return e;
}

Pairs pairs(std::size_t n) {
  const auto e = corpus::make("sum_prod");
  const auto x = sample_inputs(e.space, n, 1);
  auto xu = sample_inputs(e.space, n, 2);
  xu.col(0) = x.col(0);
  return {kernels::serial::eval_rows(e.model, x), kernels::serial::eval_rows(e.model, xu)};
}

template <RowMatrix (*Eval)(const VectorModel&, const RowMatrix&)>
void eval_rows(benchmark::State& state) {
  const auto x = sample_inputs(ishigami().space, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(Eval(ishigami().model, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::PairSums (*Sums)(const RowMatrix&, const RowMatrix&, kernels::Moments)>
void pair_sums(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)));
  const auto mode = state.range(1) ? kernels::Moments::full : kernels::Moments::diagonal;
  for (auto _ : state) benchmark::DoNotOptimize(Sums(p.y, p.yu, mode));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <std::vector<double> (*Boot)(const RowMatrix&, const RowMatrix&, std::size_t, Seed)>
void bootstrap(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Boot(p.y, p.yu, 100, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}

}  // namespace

BENCHMARK(eval_rows<kernels::serial::eval_rows>)->Name("eval_rows/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(eval_rows<kernels::parallel::eval_rows>)->Name("eval_rows/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(pair_sums<kernels::serial::pair_sums>)
    ->Name("pair_sums/serial")
    ->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(pair_sums<kernels::parallel::pair_sums>)
    ->Name("pair_sums/parallel")
    ->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(bootstrap<kernels::serial::bootstrap_estimates>)->Name("bootstrap/serial")->Arg(2000)->Arg(1 << 16);
BENCHMARK(bootstrap<kernels::parallel::bootstrap_estimates>)->Name("bootstrap/parallel")->Arg(2000)->Arg(1 << 16);

BENCHMARK_MAIN();
