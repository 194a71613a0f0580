// Copyright 2026 The quadvo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "quadvo/dataset/synth.h"
#include "quadvo/flow/lucas_kanade.h"
#include "quadvo/model/network.h"
#include "quadvo/numcore/ops.h"

namespace {

using namespace quadvo;

numcore::Tensor random_tensor(numcore::Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  numcore::Tensor t(std::move(shape));
  for (double& v : t.data()) v = u(rng);
  return t;
}

void BM_Conv1Forward(benchmark::State& state) {
  const auto h = static_cast<std::size_t>(state.range(0));
  const auto w = static_cast<std::size_t>(state.range(1));
  const numcore::Tensor x = random_tensor({2, h, w}, 1);
  const numcore::Tensor k = random_tensor({64, 2, 9, 9}, 2);
  const numcore::Tensor b = random_tensor({64}, 3);
  for (auto _ : state) {
    numcore::Tape tape;
    const numcore::Var y = numcore::conv2d(tape.constant(x), tape.constant(k),
                                           tape.constant(b), 2, 4);
    benchmark::DoNotOptimize(y.value().data().data());
  }
}
BENCHMARK(BM_Conv1Forward)->Args({13, 33})->Args({47, 154});

void BM_LkFlow(benchmark::State& state) {
  dataset::SceneSpec spec;
  spec.width = static_cast<int>(state.range(0));
  spec.height = static_cast<int>(state.range(1));
  spec.supersample = 1;
  const flow::GrayImage a = dataset::render_view(spec, {});
  const flow::GrayImage b =
      dataset::render_view(spec, dataset::advance({}, geometry::PoseIncrement{0.8, 0.02}));
  for (auto _ : state) {
    const flow::FlowField f = flow::lk_flow(a, b);
    benchmark::DoNotOptimize(f.u_data().data());
  }
}
BENCHMARK(BM_LkFlow)->Args({256, 96})->Args({1226, 370})->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.input_width = static_cast<int>(state.range(0));
  cfg.input_height = static_cast<int>(state.range(1));
  cfg.dropout = 0.0;
  model::Network net = model::init_params(cfg, 1);
  flow::FlowField field(cfg.input_width, cfg.input_height);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double& v : field.u_data()) v = u(rng);
  for (double& v : field.v_data()) v = u(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::predict(net, field));
  }
}
BENCHMARK(BM_Forward)->Args({256, 96})->Args({1226, 370})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.input_width = 256;
  cfg.input_height = 96;
  cfg.dropout = 0.0;
  model::Network net = model::init_params(cfg, 1);
  flow::FlowField field(256, 96);
  for (double& v : field.u_data()) v = 0.5;
  const model::QuadrantSet quads = model::split_quadrants(field);
  for (auto _ : state) {
    numcore::Tape tape;
    const numcore::Var out = model::forward(tape, quads, net);
    tape.backward(numcore::sum(numcore::mul(out, out)));
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
