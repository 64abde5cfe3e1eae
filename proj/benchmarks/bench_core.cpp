#include "vdwlab/combinatorics.hpp"
#include "vdwlab/dispersion.hpp"
#include "vdwlab/feshbach.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/partition.hpp"
#include "vdwlab/symmetry.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace vdw;

namespace {

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

SystemConfig drude_pair(double lambda) {
  SystemConfig cfg =
      SystemConfig::neutral({AtomSpec::well1d(-50.0), AtomSpec::well1d(50.0)}, InteractionKind::dipole);
  cfg.dipole_coupling = lambda;
  return cfg;
}

SystemConfig soft_pair(double separation) {
  return SystemConfig::neutral(
      {AtomSpec::softcoulomb1d(1, -0.5 * separation), AtomSpec::softcoulomb1d(1, 0.5 * separation)},
      InteractionKind::softcoulomb);
}

} // namespace

static void BM_HamiltonianApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LinearOperator h = build_full_hamiltonian(soft_pair(4.0), line(n, 8.0));
  const WaveFunction v = random_state(h.domain(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(h(v));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(h.size()));
}
BENCHMARK(BM_HamiltonianApply)->Arg(64)->Arg(128)->Arg(256);

static void BM_LanczosGround(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LinearOperator h = build_full_hamiltonian(drude_pair(0.2), line(n, 5.0));
  SolverSettings s;
  s.method = EigenMethod::iterative;
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h, s).ground_energy());
}
BENCHMARK(BM_LanczosGround)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

static void BM_DenseOracle(benchmark::State& state) {
  const LinearOperator h = build_full_hamiltonian(drude_pair(0.2), line(static_cast<std::size_t>(state.range(0)), 5.0));
  SolverSettings s;
  s.method = EigenMethod::dense_oracle;
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h, s).ground_energy());
}
BENCHMARK(BM_DenseOracle)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_AntisymmetricGround(benchmark::State& state) {
  const SystemConfig cfg = soft_pair(4.0);
  const LinearOperator h = build_full_hamiltonian(cfg, line(static_cast<std::size_t>(state.range(0)), 8.0));
  SolverSettings s;
  const TensorGrid g = h.domain();
  s.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h, s).ground_energy());
}
BENCHMARK(BM_AntisymmetricGround)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

static void BM_SigmaDrude(benchmark::State& state) {
  SolverSettings s;
  s.tolerance = 1e-10;
  const GridSpec g = line(static_cast<std::size_t>(state.range(0)), 8.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sigma_coefficient(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), {0, 0, 1}, g, s).sigma);
}
BENCHMARK(BM_SigmaDrude)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_FeshbachFixedPoint(benchmark::State& state) {
  SolverSettings s;
  s.tolerance = 1e-10;
  const GridSpec g = line(static_cast<std::size_t>(state.range(0)), 4.5);
  for (auto _ : state) benchmark::DoNotOptimize(feshbach_energy(drude_pair(0.2), g, s).energy);
}
BENCHMARK(BM_FeshbachFixedPoint)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);

static void BM_PartitionEvaluate(benchmark::State& state) {
  SystemConfig cfg = soft_pair(16.0);
  const ImsPartition p(cfg);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  std::vector<double> x(2);
  for (auto _ : state) {
    x[0] = u(rng);
    x[1] = u(rng);
    benchmark::DoNotOptimize(p.evaluate(x));
  }
}
BENCHMARK(BM_PartitionEvaluate);

static void BM_ZeroSubsetWitness(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-1000, 1000);
  std::vector<long> k(static_cast<std::size_t>(state.range(0)));
  for (long& v : k) v = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(zero_subset_witness(k));
}
BENCHMARK(BM_ZeroSubsetWitness)->Arg(8)->Arg(1024);

static void BM_ChargeGroupScan(benchmark::State& state) {
  const int Z = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_charge_groups(Z, Z * Z + 2).multisets);
}
BENCHMARK(BM_ChargeGroupScan)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
