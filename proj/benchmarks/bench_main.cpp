#include <benchmark/benchmark.h>

#include <random>

#include "bifree/bnc.hpp"
#include "bifree/conjvar.hpp"
#include "bifree/fock.hpp"
#include "bifree/matrix_lift.hpp"
#include "bifree/moments.hpp"
#include "bifree/verify.hpp"

using namespace bifree;

namespace {

ChiWord alternating(int n) {
  std::string s;
  for (int k = 0; k < n; ++k) s += k % 2 ? 'r' : 'l';
  return ChiWord::parse(s);
}

void BM_EnumerateBnc(benchmark::State& state) {
  const auto chi = alternating(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_bnc(chi));
}
BENCHMARK(BM_EnumerateBnc)->DenseRange(6, 10, 2);

void BM_MobiusZeroOne(benchmark::State& state) {
  const auto chi = alternating(static_cast<int>(state.range(0)));
  const auto all = enumerate_bnc(chi);
  const auto one = BncPartition::one(chi);
  for (auto _ : state)
    for (const auto& p : all) benchmark::DoNotOptimize(mobius_bnc(p, one));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_MobiusZeroOne)->DenseRange(4, 8, 2);

void BM_FockExpectation(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto f = make_bisemicircular({random_cp_map(rng, 2)}, {random_cp_map(rng, 2)});
  Monomial w;
  for (int k = 0; k < state.range(0); ++k) w.push_back(Factor::sym(k % 3 ? "S1" : "D1"));
  for (auto _ : state) benchmark::DoNotOptimize(f->eval(w));
}
BENCHMARK(BM_FockExpectation)->DenseRange(4, 8, 2);

void BM_CumulantFull(benchmark::State& state) {
  std::mt19937_64 rng(2);
  auto f = make_bisemicircular({random_cp_map(rng, 2)}, {random_cp_map(rng, 2)});
  CachedFunctional cached(*f);
  const int n = static_cast<int>(state.range(0));
  const auto chi = alternating(n);
  std::vector<Monomial> ops;
  for (int k = 1; k <= n; ++k) ops.push_back({Factor::sym(chi.at(k) == Side::Left ? "S1" : "D1")});
  for (auto _ : state) benchmark::DoNotOptimize(cumulant_pi(cached, BncPartition::one(chi), ops));
}
BENCHMARK(BM_CumulantFull)->DenseRange(4, 8, 2);

void BM_BifreeTest(benchmark::State& state) {
  auto f = make_bisemicircular({CPMap::identity(1)}, {CPMap::identity(1)});
  for (auto _ : state) benchmark::DoNotOptimize(bifree_test(*f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BifreeTest)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ConjResidualFlip(benchmark::State& state) {
  auto lift = make_xy_lift(make_circular_pair(), "c_l", "c_l*", "c_r", "c_r*");
  auto X = Polynomial::sym("X");
  PresenceContext ctx{{}, {Polynomial::sym("Y")}, true};
  ConjCheckOptions opts{static_cast<int>(state.range(0)), 2};
  for (auto _ : state)
    benchmark::DoNotOptimize(conj_residual({X, X, Side::Left, "X"}, eta_flip(), ctx, *lift, opts));
}
BENCHMARK(BM_ConjResidualFlip)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MatrixLiftMoment(benchmark::State& state) {
  auto base = make_circular_pair();
  Monomial w;
  for (int k = 0; k < state.range(0); ++k) w.push_back(Factor::sym(k % 2 ? "Y" : "X"));
  for (auto _ : state) {
    // fresh lift each time so the memo table does not hide the work
    auto lift = make_xy_lift(base, "c_l", "c_l*", "c_r", "c_r*");
    benchmark::DoNotOptimize(lift->eval(w));
  }
}
BENCHMARK(BM_MatrixLiftMoment)->DenseRange(2, 6, 2);

}  // namespace
BENCHMARK_MAIN();
