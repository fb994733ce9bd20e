// Copyright 2026 The lefcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference against the OpenMP path for the main kernels. Arg(0) runs
// the serial variant, Arg(1) the parallel one.

#include <benchmark/benchmark.h>

#include "lefcert/certify.h"
#include "lefcert/collective.h"
#include "lefcert/harness.h"
#include "lefcert/oracle.h"

namespace lefcert {
namespace {

harness::EmbeddingPool make_pool() {
  harness::SyntheticPoolSpec s;
  s.num_classes = 20;
  s.per_class = 40;
  s.dim = 512;
  s.intra_spread = 0.04;
  s.inter_gap = 0.8;
  s.seed = 1;
  return harness::generate_synthetic_pool(s);
}

const harness::EmbeddingPool& pool() {
  static const harness::EmbeddingPool p = make_pool();
  return p;
}

void BM_CertifyEpisode(benchmark::State& state) {
  const Episode e = harness::sample_episode(pool(), 5, 10, 20, 2);
  CertConfig cfg = harness::presets::image(10);
  cfg.budget = 9;
  for (auto _ : state) {
    auto r = state.range(0) ? certify::certify_episode(e, cfg)
                            : certify::certify_episode_serial(e, cfg);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(e.queries.size()));
}
BENCHMARK(BM_CertifyEpisode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Collective(benchmark::State& state) {
  const Episode e = harness::sample_episode(pool(), 5, 10, 20, 3);
  CertConfig cfg = harness::presets::image(10);
  cfg.budget = 9;
  for (auto _ : state) {
    auto r = state.range(0) ? collective::collective_certify(e, cfg)
                            : collective::collective_certify_serial(e, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Collective)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DefaultProtocol(benchmark::State& state) {
  harness::ProtocolOptions o;
  o.max_budget = 9;
  o.seed = 4;
  const CertConfig cfg = harness::presets::image(o.shots);
  for (auto _ : state) {
    auto r = state.range(0) ? harness::run_default_protocol(pool(), cfg, o)
                            : harness::run_default_protocol_serial(pool(), cfg, o);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_DefaultProtocol)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OracleCheck(benchmark::State& state) {
  oracle::CheckOptions o;
  o.trials = 100;
  o.seed = 5;
  for (auto _ : state) {
    auto r = state.range(0) ? oracle::oracle_check(o) : oracle::oracle_check_serial(o);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_OracleCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lefcert

BENCHMARK_MAIN();
