#include <benchmark/benchmark.h>

#include <random>

#include "fdmac/assign.hpp"
#include "fdmac/log.hpp"
#include "fdmac/lp.hpp"
#include "fdmac/mac.hpp"

using namespace fdmac;

namespace {

LinkState bench_link(int clients) {
  const Topology t = generate_topology(clients, 100.0, 1);
  Rng rng = make_rng(1, Stream::Channel, 0);
  return draw_link_state(t, {}, {}, rng);
}

void BM_PairsSerial(benchmark::State& st) {
  const int c = static_cast<int>(st.range(0));
  const LinkState l = bench_link(c);
  const FrameLengths f = FrameLengths::uniform(c, 12000.0);
  for (auto _ : st) benchmark::DoNotOptimize(build_candidate_pairs_serial(l, {}, {}, {}, f));
}

void BM_PairsParallel(benchmark::State& st) {
  const int c = static_cast<int>(st.range(0));
  const LinkState l = bench_link(c);
  const FrameLengths f = FrameLengths::uniform(c, 12000.0);
  for (auto _ : st) benchmark::DoNotOptimize(build_candidate_pairs(l, {}, {}, {}, f));
}

/// Random dense packing LP: maximize c.x s.t. A x <= b.
lp::Problem random_lp(int rows, int cols) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  lp::Problem p;
  p.num_vars = cols;
  for (int k = 0; k < cols; ++k) p.objective.push_back(u(rng));
  for (int r = 0; r < rows; ++r) {
    lp::Constraint c;
    for (int k = 0; k < cols; ++k) c.terms.push_back({k, u(rng)});
    c.rhs = u(rng) * cols;
    p.constraints.push_back(c);
  }
  return p;
}

void BM_LpSerial(benchmark::State& st) {
  const lp::Problem p = random_lp(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)) / 2);
  for (auto _ : st) benchmark::DoNotOptimize(lp::solve(p, {1e-9, 500000, false}));
}

void BM_LpParallel(benchmark::State& st) {
  const lp::Problem p = random_lp(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)) / 2);
  for (auto _ : st) benchmark::DoNotOptimize(lp::solve(p, {1e-9, 500000, true}));
}

void BM_AssignEpoch(benchmark::State& st) {
  const int c = static_cast<int>(st.range(0));
  const LinkState l = bench_link(c);
  const DemandSnapshot d = DemandSnapshot::uniform(c, 2000.0, 12000.0, 0.1);
  AssignConfig cfg;
  cfg.pairing.model = RateModel::Reported;
  for (auto _ : st) benchmark::DoNotOptimize(assign_epoch(d, l, cfg));
}

std::vector<SimConfig> batch() {
  std::vector<SimConfig> v;
  for (Scheme s : kAllSchemes) {
    SimConfig c;
    c.scheme = s;
    c.n_clients = 20;
    c.epochs = 20;
    v.push_back(c);
  }
  return v;
}

void BM_BatchSerial(benchmark::State& st) {
  const auto v = batch();
  for (auto _ : st) benchmark::DoNotOptimize(run_simulations_serial(v));
}

void BM_BatchParallel(benchmark::State& st) {
  const auto v = batch();
  for (auto _ : st) benchmark::DoNotOptimize(run_simulations(v));
}

}  // namespace

BENCHMARK(BM_PairsSerial)->Arg(30)->Arg(100);
BENCHMARK(BM_PairsParallel)->Arg(30)->Arg(100);
BENCHMARK(BM_LpSerial)->Arg(200)->Arg(600);
BENCHMARK(BM_LpParallel)->Arg(200)->Arg(600);
BENCHMARK(BM_AssignEpoch)->Arg(10)->Arg(30)->Arg(50);
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  set_log_level(LogLevel::Quiet);
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
