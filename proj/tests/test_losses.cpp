// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/losses.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using graphkd::build_edge_matrix;
using graphkd::build_graph;
using graphkd::cross_entropy;
using graphkd::DistillFlags;
using graphkd::edge_loss;
using graphkd::EdgeMatrix;
using graphkd::Graph;
using graphkd::graph_loss;
using graphkd::InstanceRecord;
using graphkd::kld_cls_loss;
using graphkd::lambda2;
using graphkd::LossBreakdown;
using graphkd::LossWeights;
using graphkd::node_loss;
using graphkd::reg_match_loss;
using graphkd::Rng;
using graphkd::softmax;
using graphkd::total_distill_loss;
using graphkd::Vec;

namespace {

std::vector<Vec> student_features(Rng& rng, const std::vector<InstanceRecord>& records, int dim) {
  return testutil::random_embeddings(rng, records.size(), dim, 0.05);
}

}  // namespace

TEST_CASE("node loss averages squared distances over all nodes") {
  CHECK(node_loss({}, {}) == 0.0);
  CHECK(node_loss({{1.0, 2.0}}, {{1.0, 2.0}}) == 0.0);
  // ||(1,0)-(0,0)||^2 = 1 and ||(0,3)-(0,1)||^2 = 4, over 2 nodes.
  CHECK(node_loss({{1.0, 0.0}, {0.0, 3.0}}, {{0.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(2.5));
}

TEST_CASE("edge loss of an all-ones versus identity 2x2 matrix is one half") {
  const EdgeMatrix ones = build_edge_matrix({{1.0, 0.0}, {2.0, 0.0}});
  const EdgeMatrix ident = build_edge_matrix({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(edge_loss(ones, ident) == doctest::Approx(0.5));
  CHECK(edge_loss(ones, ones) == 0.0);
}

TEST_CASE("edge loss requires matching participant ids") {
  const EdgeMatrix a = build_edge_matrix({{1.0, 0.0}}, std::vector<int>{3});
  const EdgeMatrix b = build_edge_matrix({{1.0, 0.0}}, std::vector<int>{4});
  CHECK_THROWS_AS(edge_loss(a, b), std::invalid_argument);
}

TEST_CASE("adaptive background weight follows the fg/bg ratio") {
  CHECK(lambda2(1.0, 6, 3) == doctest::Approx(2.0));
  CHECK(lambda2(0.5, 6, 3) == doctest::Approx(1.0));
  CHECK(lambda2(1.0, 4, 0) == 0.0);
  // Doubling the background pool halves the weight.
  Rng rng(11);
  for (int it = 0; it < 20; ++it) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 40));
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 40));
    const double alpha = rng.uniform(0.1, 3.0);
    CHECK(lambda2(alpha, n, 2 * m) == doctest::Approx(0.5 * lambda2(alpha, n, m)).epsilon(1e-15));
  }
}

TEST_CASE("softmax and cross-entropy behave on uniform and confident logits") {
  const Vec uniform(5, 0.7);
  for (double p : softmax(uniform)) CHECK(p == doctest::Approx(0.2));
  CHECK(cross_entropy(uniform, 2) == doctest::Approx(std::log(5.0)));
  const Vec confident = {30.0, 0.0, 0.0};
  CHECK(cross_entropy(confident, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(cross_entropy(uniform, 5), std::invalid_argument);
  CHECK_THROWS_AS(cross_entropy(uniform, -1), std::invalid_argument);
}

TEST_CASE("classification KLD is zero at equality and positive otherwise") {
  Rng rng(12);
  for (int it = 0; it < 30; ++it) {
    std::vector<Vec> t, s;
    const int n = rng.uniform_int(1, 8);
    const int c = rng.uniform_int(2, 6);
    for (int i = 0; i < n; ++i) {
      t.push_back(testutil::random_vec(rng, c, -4.0, 4.0));
      s.push_back(testutil::random_vec(rng, c, -4.0, 4.0));
    }
    const double tau = rng.uniform(0.5, 4.0);
    CHECK(kld_cls_loss(t, t, tau) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(kld_cls_loss(t, s, tau) >= 0.0);
    CHECK(kld_cls_loss(t, s, tau) == doctest::Approx(oracle::kld(t, s, tau)).epsilon(1e-12));
  }
}

TEST_CASE("classification KLD ignores a constant shift of the logits") {
  Rng rng(13);
  std::vector<Vec> t, s;
  for (int i = 0; i < 6; ++i) {
    t.push_back(testutil::random_vec(rng, 5, -3.0, 3.0));
    s.push_back(testutil::random_vec(rng, 5, -3.0, 3.0));
  }
  const double base = kld_cls_loss(t, s, 2.0);
  for (auto& z : t) {
    for (double& x : z) x += 7.5;
  }
  for (auto& z : s) {
    for (double& x : z) x -= 3.25;
  }
  CHECK(kld_cls_loss(t, s, 2.0) == doctest::Approx(base).epsilon(1e-11));
}

TEST_CASE("regression matching averages summed squared differences") {
  CHECK(reg_match_loss({{1.0, 1.0, 1.0, 1.0}}, {{0.0, 0.0, 0.0, 0.0}}) == doctest::Approx(4.0));
  CHECK(reg_match_loss({}, {}) == 0.0);
}

TEST_CASE("graph loss of a graph against itself is zero, lambda2 still reported") {
  Rng rng(14);
  const auto records = testutil::random_records(rng, 5, 10, 6, 3);
  const Graph g = build_graph(records, 0.8, true);
  const LossBreakdown b = graph_loss(g, g, LossWeights{});
  CHECK(b.node_fg == 0.0);
  CHECK(b.node_bg == 0.0);
  CHECK(b.edge == 0.0);
  CHECK(b.total_distill == 0.0);
  CHECK(b.lambda2_used == doctest::Approx(0.5));
}

TEST_CASE("graph loss rejects graphs built over different records") {
  Rng rng(15);
  const auto a = testutil::random_records(rng, 3, 3, 4, 2);
  auto b = a;
  b[0].id = 99;
  const Graph ga = build_graph(a, 0.5, true);
  const Graph gb = build_graph(b, 0.5, true);
  CHECK_THROWS_AS(graph_loss(ga, gb, LossWeights{}), std::invalid_argument);
}

TEST_CASE("node losses cover all nodes while mining restricts only the edges") {
  Rng rng(16);
  auto records = testutil::random_records(rng, 2, 3, 4, 2, 0.0);
  for (auto& r : records) r.teacher_cls_loss = 0.0;  // nothing mined
  const Graph g_t = build_graph(records, 0.5, true);
  auto student = student_features(rng, records, 4);
  const Graph g_s = build_graph(records, student, 0.5, true);
  CHECK(g_t.edges.size() == 2);  // fg only
  const LossBreakdown b = graph_loss(g_t, g_s, LossWeights{});
  // Background nodes still enter the node term even though none carry edges.
  CHECK(b.node_bg > 0.0);
  CHECK(b.lambda2_used == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("masked terms report zero and drop out of the total") {
  Rng rng(17);
  const auto records = testutil::random_records(rng, 4, 8, 5, 3);
  const Graph g_t = build_graph(records, 0.7, true);
  const auto student = student_features(rng, records, 5);
  const Graph g_s = build_graph(records, student, 0.7, true);

  DistillFlags off;
  off.edge = false;
  off.bg_node = false;
  const LossWeights w;
  const LossBreakdown b = graph_loss(g_t, g_s, w, off);
  CHECK(b.edge == 0.0);
  CHECK(b.node_bg == 0.0);
  CHECK(b.node_fg > 0.0);
  CHECK(b.total_distill == doctest::Approx(w.lambda1 * b.node_fg).epsilon(1e-15));
}

TEST_CASE("strict fg-linked reading drops bg-bg pairs but keeps the denominator") {
  // One fg node and two bg nodes, all mined. Teacher and student agree except
  // in the bg-bg angle, so the strict reading sees zero edge loss while the
  // default reading sees exactly the two symmetric bg-bg entries over 3^2.
  std::vector<InstanceRecord> records(3);
  records[0] = {.id = 0, .label = 1, .teacher_embedding = {1.0, 0.0, 0.0}};
  records[1] = {.id = 1, .label = graphkd::kBackgroundLabel,
                .teacher_embedding = {0.0, 1.0, 0.0}, .teacher_cls_loss = 1.0};
  records[2] = {.id = 2, .label = graphkd::kBackgroundLabel,
                .teacher_embedding = {0.0, 0.0, 1.0}, .teacher_cls_loss = 1.0};
  std::vector<Vec> student = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 1.0, 1.0}};

  const Graph g_t = build_graph(records, 0.5, true);
  const Graph g_s = build_graph(records, student, 0.5, true);

  LossWeights strict;
  strict.fg_linked_only = true;
  const double loose_edge = graph_loss(g_t, g_s, LossWeights{}).edge;
  const double strict_edge = graph_loss(g_t, g_s, strict).edge;

  const double bg_bg_delta = 0.0 - 1.0 / std::sqrt(2.0);
  CHECK(loose_edge == doctest::Approx(2.0 * bg_bg_delta * bg_bg_delta / 9.0).epsilon(1e-12));
  CHECK(strict_edge == doctest::Approx(0.0));
}

TEST_CASE("total objective composes its terms with the documented weights") {
  Rng rng(18);
  for (int it = 0; it < 25; ++it) {
    const int c = rng.uniform_int(2, 5);
    const auto records = testutil::random_records(rng, rng.uniform_int(1, 6),
                                                  rng.uniform_int(0, 10), 6, c);
    const Graph g_t = build_graph(records, 0.6, true);
    const auto student = student_features(rng, records, 6);
    const Graph g_s = build_graph(records, student, 0.6, true);

    std::vector<Vec> t_logits, s_logits, t_reg, s_reg;
    for (const auto& r : records) {
      t_logits.push_back(r.teacher_logits);
      s_logits.push_back(testutil::random_vec(rng, c + 1, -3.0, 3.0));
      t_reg.push_back(testutil::random_vec(rng, 4));
      s_reg.push_back(testutil::random_vec(rng, 4));
    }
    LossWeights w;
    w.lambda1 = rng.uniform(0.1, 1.0);
    w.lambda3 = rng.uniform(0.1, 1.0);
    w.alpha = rng.uniform(0.5, 2.0);
    w.temperature = rng.uniform(0.5, 3.0);
    w.reg_match_weight = rng.uniform(0.0, 2.0);

    const LossBreakdown b =
        total_distill_loss(g_t, g_s, t_logits, s_logits, t_reg, s_reg, w);
    const double expect = w.lambda1 * b.node_fg + b.lambda2_used * b.node_bg +
                          w.lambda3 * b.edge + b.kld_cls + w.reg_match_weight * b.reg_match;
    CHECK(b.total_distill == doctest::Approx(expect).epsilon(1e-14));
    CHECK(b.node_fg == doctest::Approx(oracle::node_loss(g_t.nodes.fg_nodes, g_s.nodes.fg_nodes))
                           .epsilon(1e-13));
    CHECK(b.kld_cls ==
          doctest::Approx(oracle::kld(t_logits, s_logits, w.temperature)).epsilon(1e-12));
    CHECK(b.reg_match == doctest::Approx(oracle::reg_match(t_reg, s_reg)).epsilon(1e-13));
  }
}

TEST_CASE("losses are invariant to a shared permutation of the records") {
  Rng rng(19);
  for (int it = 0; it < 20; ++it) {
    const auto records = testutil::random_records(rng, 4, 6, 5, 3);
    const auto student = student_features(rng, records, 5);

    std::vector<std::size_t> perm(records.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_int(0, int(i) - 1))]);
    }
    std::vector<InstanceRecord> shuffled;
    std::vector<Vec> shuffled_student;
    for (std::size_t i : perm) {
      shuffled.push_back(records[i]);
      shuffled_student.push_back(student[i]);
    }

    const LossBreakdown a = graph_loss(build_graph(records, 0.6, true),
                                       build_graph(records, student, 0.6, true), LossWeights{});
    const LossBreakdown b =
        graph_loss(build_graph(shuffled, 0.6, true),
                   build_graph(shuffled, shuffled_student, 0.6, true), LossWeights{});
    CHECK(a.node_fg == doctest::Approx(b.node_fg).epsilon(1e-12));
    CHECK(a.node_bg == doctest::Approx(b.node_bg).epsilon(1e-12));
    CHECK(a.edge == doctest::Approx(b.edge).epsilon(1e-12));
    CHECK(a.total_distill == doctest::Approx(b.total_distill).epsilon(1e-12));
  }
}
