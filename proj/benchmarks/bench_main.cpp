// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the per-step hot path: edge-matrix construction, graph
// assembly plus the distillation objective, its gradient, episode sampling,
// and one full optimizer step.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "graphkd/config.hpp"
#include "graphkd/gradients.hpp"
#include "graphkd/graph.hpp"
#include "graphkd/losses.hpp"
#include "graphkd/rng.hpp"
#include "graphkd/synth.hpp"
#include "graphkd/trainer.hpp"

namespace {

using graphkd::Vec;

std::vector<Vec> random_nodes(int count, int dim, std::uint64_t seed) {
  graphkd::Rng rng(seed);
  std::vector<Vec> nodes(static_cast<std::size_t>(count));
  for (auto& v : nodes) v = rng.normal_vec(static_cast<std::size_t>(dim));
  return nodes;
}

/// Default-shaped episode with the frozen teacher and an untrained student,
/// shared by the graph and gradient benchmarks.
struct Fixture {
  graphkd::EpisodeConfig ecfg;
  graphkd::TeacherModel teacher;
  graphkd::StudentModel student;
  graphkd::EpisodeBatch batch;
  graphkd::StudentForward fwd;
  std::vector<Vec> teacher_logits;
  std::vector<int> record_ids;

  Fixture()
      : ecfg(graphkd::default_config().episode),
        teacher(graphkd::make_teacher(ecfg, graphkd::derive_seed(0, graphkd::kStreamTeacher))),
        student(graphkd::StudentModel::random_init(
            ecfg.input_dim, 10, ecfg.embed_dim, ecfg.num_classes,
            graphkd::derive_seed(0, graphkd::kStreamStudent))),
        batch(graphkd::gen_episode(ecfg, teacher, 42)) {
    fwd = student.forward(batch.inputs());
    for (const auto& r : batch.records) {
      teacher_logits.push_back(r.teacher_logits);
      record_ids.push_back(r.id);
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_BuildEdgeMatrix(benchmark::State& state) {
  const auto nodes = random_nodes(static_cast<int>(state.range(0)), 16, 99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(graphkd::build_edge_matrix(nodes));
  }
}
BENCHMARK(BM_BuildEdgeMatrix)->Arg(16)->Arg(64);

void BM_GenEpisode(benchmark::State& state) {
  const auto& f = fixture();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graphkd::gen_episode(f.ecfg, f.teacher, seed++));
  }
}
BENCHMARK(BM_GenEpisode);

void BM_GraphsAndLoss(benchmark::State& state) {
  const auto& f = fixture();
  const graphkd::LossWeights w;
  for (auto _ : state) {
    const graphkd::Graph g_t = graphkd::build_graph(f.batch.records, 0.357, true);
    const graphkd::Graph g_s =
        graphkd::build_graph(f.batch.records, f.fwd.embeddings, 0.357, true);
    benchmark::DoNotOptimize(graphkd::total_distill_loss(g_t, g_s, f.teacher_logits,
                                                         f.fwd.cls_logits, f.batch.teacher_reg,
                                                         f.fwd.reg_outputs, w));
  }
}
BENCHMARK(BM_GraphsAndLoss);

void BM_GradTotal(benchmark::State& state) {
  const auto& f = fixture();
  const graphkd::LossWeights w;
  const graphkd::Graph g_t = graphkd::build_graph(f.batch.records, 0.357, true);
  const graphkd::Graph g_s = graphkd::build_graph(f.batch.records, f.fwd.embeddings, 0.357, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(graphkd::grad_total(g_t, g_s, f.teacher_logits, f.fwd.cls_logits,
                                                 f.batch.teacher_reg, f.fwd.reg_outputs, w));
  }
}
BENCHMARK(BM_GradTotal);

void BM_TrainerStep(benchmark::State& state) {
  const graphkd::RunConfig cfg = graphkd::default_config();
  graphkd::Trainer trainer(cfg.episode, cfg.train);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainer.step());
  }
}
BENCHMARK(BM_TrainerStep);

}  // namespace

BENCHMARK_MAIN();
