#include <benchmark/benchmark.h>

#include "dacat/ops.hpp"
#include "dacat/rng.hpp"

using namespace dacat;

namespace {

void BM_LstmStep(benchmark::State& state) {
  const std::size_t D = 768, H = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  Tensor Wih = Tensor::mat(4 * H, D), Whh = Tensor::mat(4 * H, H), b = Tensor::vec(4 * H);
  for (auto& v : Wih.v) v = rng.normal() / 32.0;
  for (auto& v : Whh.v) v = rng.normal() / 16.0;
  std::vector<double> x(D);
  for (auto& v : x) v = rng.normal();
  nn::LSTMState st(H);
  for (auto _ : state) {
    nn::lstm_step<double>(Wih, Whh, b, x, st);
    benchmark::DoNotOptimize(st.h.data());
  }
}

void BM_AttendOverKV(benchmark::State& state) {
  const std::size_t L = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 768;
  Rng rng(6);
  std::vector<double> keys(L * d), values(L * d), q(d), out(d);
  for (auto& v : keys) v = rng.normal() / 28.0;
  for (auto& v : values) v = rng.normal();
  for (auto& v : q) v = rng.normal();
  Tensor Wo = Tensor::mat(d, d);
  for (auto& v : Wo.v) v = rng.normal() / 28.0;
  for (auto _ : state) {
    nn::attend<double>(keys.data(), values.data(), L, d, d, q, Wo, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_LstmStep)->Arg(128)->Arg(256);
BENCHMARK(BM_AttendOverKV)->Arg(1000)->Arg(10000);
