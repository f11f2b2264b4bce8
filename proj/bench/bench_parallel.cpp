#include <random>

#include <benchmark/benchmark.h>

#include "rrc/experiments.hpp"
#include "rrc/identification.hpp"

namespace {

std::vector<rrc::Job> sweep_jobs() {
  const std::vector<rrc::ControllerSetup> ctrls{{rrc::table3_controller(), rrc::table1_plant()},
                                                {rrc::table4_controller(), rrc::table1_plant()}};
  return rrc::mismatch_jobs(rrc::table1_plant(), ctrls, {0.5, 0.75, 1.0, 1.25, 1.5, 2.0});
}

void BM_JobsSerial(benchmark::State& state) {
  const auto jobs = sweep_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(rrc::run_jobs_serial(jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}
BENCHMARK(BM_JobsSerial)->Unit(benchmark::kMillisecond);

void BM_JobsParallel(benchmark::State& state) {
  const auto jobs = sweep_jobs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrc::run_jobs(jobs, static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}
BENCHMARK(BM_JobsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

std::pair<std::vector<double>, std::vector<double>> record() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> u(1 << 18), y(u.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = d(rng);
    y[i] = s = 0.95 * s + u[i];
  }
  return {u, y};
}

void BM_WelchSerial(benchmark::State& state) {
  const auto [u, y] = record();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrc::estimate_frequency_response_serial(u, y, 1e-3));
  }
}
BENCHMARK(BM_WelchSerial)->Unit(benchmark::kMillisecond);

void BM_WelchParallel(benchmark::State& state) {
  const auto [u, y] = record();
  for (auto _ : state) benchmark::DoNotOptimize(rrc::estimate_frequency_response(u, y, 1e-3));
}
BENCHMARK(BM_WelchParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
