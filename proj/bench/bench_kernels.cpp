#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rpys/clustering.hpp"
#include "rpys/segments.hpp"

namespace {

std::vector<rpys::ParsedCitedRef> make_refs(std::size_t n) {
  std::mt19937_64 rng(42);
  std::vector<rpys::ParsedCitedRef> refs;
  refs.reserve(n);
  const std::string letters = "ABCDEFGHIJKLMNOPRSTW";
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t work = rng() % (n / 4 + 1);
    rpys::ParsedCitedRef r;
    r.raw_id = {"p" + std::to_string(i % 997), i};
    r.first_author = std::string(1, letters[work % letters.size()]) + "UTHOR" + std::to_string(work % 13) + " J";
    if (rng() % 5 == 0) r.first_author.pop_back();
    r.rpy = 1950 + static_cast<int>(work % 60);
    r.source = "JOURNAL " + std::to_string(work % 31);
    r.volume = "V" + std::to_string(work % 90);
    r.page = "P" + std::to_string(work);
    r.raw = r.first_author + ", " + std::to_string(*r.rpy) + ", " + r.source;
    refs.push_back(std::move(r));
  }
  return refs;
}

std::vector<rpys::SeriesPoint> make_series(int n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<rpys::SeriesPoint> s;
  for (int i = 0; i < n; ++i) {
    const double y = 0.5 + 0.03 * i + (i > n / 2 ? 1.0 : 0.0) + noise(rng);
    s.push_back({1900 + i, std::expm1(y)});
  }
  return s;
}

rpys::Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? rpys::Exec::Serial : rpys::Exec::Parallel;
}

void BM_ClusterRefs(benchmark::State& state) {
  const auto refs = make_refs(static_cast<std::size_t>(state.range(0)));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(rpys::cluster_refs(refs, 0.75, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FitFixedK(benchmark::State& state) {
  const auto series = make_series(static_cast<int>(state.range(0)));
  rpys::SegmentOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(rpys::fit_fixed_k(series, 6, opt));
}

void BM_SelectK(benchmark::State& state) {
  const auto series = make_series(static_cast<int>(state.range(0)));
  rpys::SegmentOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(rpys::select_k(series, 8, opt));
}

}  // namespace

BENCHMARK(BM_ClusterRefs)->ArgsProduct({{2000, 20000}, {0, 1}})->ArgNames({"refs", "parallel"});
BENCHMARK(BM_FitFixedK)->ArgsProduct({{120, 400}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_SelectK)->ArgsProduct({{120, 400}, {0, 1}})->ArgNames({"n", "parallel"});

BENCHMARK_MAIN();
