#include "selmod/estimator.hpp"
#include "selmod/likelihood.hpp"
#include "selmod/normalizer.hpp"
#include "selmod/simulator.hpp"

#include <benchmark/benchmark.h>

namespace {

struct Instance {
  selmod::Dataset data;
  selmod::Model model;
  selmod::ParamVector params;
};

Instance make(const std::string& family, const std::string& mech, int n) {
  selmod::SimConfig c;
  c.n = n;
  c.family = family == "normal"   ? selmod::ResponseFamily::normal()
             : family == "negbin" ? selmod::ResponseFamily::negative_binomial(2.5)
                                  : selmod::ResponseFamily::poisson();
  c.mechanism = selmod::SelectionMechanism::from_key(mech);
  c.alpha_true = 0.4;
  c.beta_true = Eigen::Vector3d(0.5, 0.4, -0.2);
  c.gamma_true = Eigen::Vector3d(0.3, 0.8, 0.1);
  c.seed = 7;
  Instance in{selmod::simulate(c), {c.family, c.mechanism, std::nullopt}, {}};
  in.params = selmod::fit_baseline(in.data, in.model).params;
  in.params.alpha = 0.4;
  return in;
}

const char* kFamilies[] = {"poisson", "negbin", "normal"};

void BM_Loglik(benchmark::State& state) {
  const auto in = make(kFamilies[state.range(0)], "probit-linear", static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(selmod::loglik(in.data, in.model, in.params));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(kFamilies[state.range(0)]);
}
BENCHMARK(BM_Loglik)->ArgsProduct({{0, 1, 2}, {1000, 10000}})->Unit(benchmark::kMicrosecond);

void BM_Hessian(benchmark::State& state) {
  const auto in = make(kFamilies[state.range(0)], "probit-linear", static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(selmod::hessian(in.data, in.model, in.params));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(kFamilies[state.range(0)]);
}
BENCHMARK(BM_Hessian)->ArgsProduct({{0, 1, 2}, {1000, 10000}})->Unit(benchmark::kMicrosecond);

void BM_PiCount(benchmark::State& state) {
  const auto mech = selmod::SelectionMechanism::from_key("gumbel-std").with_alpha(0.5);
  const auto fam = selmod::ResponseFamily::poisson();
  const double mu = static_cast<double>(state.range(0));
  const int K = selmod::default_truncation(fam, mu, 0);
  for (auto _ : state) benchmark::DoNotOptimize(selmod::pi_count(mech, fam, mu, 0.2, K));
}
BENCHMARK(BM_PiCount)->Arg(1)->Arg(10)->Arg(100);

void BM_PiNormal(benchmark::State& state) {
  const auto mech = selmod::SelectionMechanism::from_key("probit-linear").with_alpha(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(selmod::pi_normal(mech, 0.3, 1.4, 0.2));
}
BENCHMARK(BM_PiNormal);

void BM_ProfileFit(benchmark::State& state) {
  const auto in = make("poisson", "probit-linear", static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(selmod::profile_maximize(in.data, in.model));
}
BENCHMARK(BM_ProfileFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
