// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "graphkd/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using graphkd::build_edge_matrix;
using graphkd::build_graph;
using graphkd::cosine_similarity;
using graphkd::EdgeMatrix;
using graphkd::Graph;
using graphkd::InstanceRecord;
using graphkd::kBackgroundLabel;
using graphkd::mine_background;
using graphkd::NodeSet;
using graphkd::Rng;
using graphkd::split_nodes;
using graphkd::squared_norm;
using graphkd::Vec;

TEST_CASE("cosine similarity of aligned, orthogonal, and opposite vectors") {
  CHECK(cosine_similarity({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1.0, 0.0}, {0.0, 5.0}) == doctest::Approx(0.0));
  CHECK(cosine_similarity({1.0, 1.0}, {-3.0, -3.0}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine similarity treats near-zero norms as zero") {
  CHECK(cosine_similarity({0.0, 0.0}, {1.0, 2.0}) == 0.0);
  CHECK(cosine_similarity({1e-13, 0.0}, {1.0, 0.0}) == 0.0);
  CHECK(cosine_similarity({0.0, 0.0}, {0.0, 0.0}) == 0.0);
}

TEST_CASE("cosine similarity rejects mismatched dimensions") {
  CHECK_THROWS_AS(cosine_similarity({1.0, 2.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("cosine similarity matches the scalar oracle on random vectors") {
  Rng rng(41);
  for (int it = 0; it < 200; ++it) {
    const int dim = rng.uniform_int(1, 24);
    const Vec a = testutil::random_vec(rng, dim);
    const Vec b = testutil::random_vec(rng, dim);
    CHECK(cosine_similarity(a, b) == doctest::Approx(oracle::cosine(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("split_nodes preserves record order within each group") {
  std::vector<InstanceRecord> records(5);
  const int labels[5] = {2, kBackgroundLabel, 0, kBackgroundLabel, 1};
  for (int i = 0; i < 5; ++i) {
    records[static_cast<std::size_t>(i)].id = 10 + i;
    records[static_cast<std::size_t>(i)].label = labels[i];
    records[static_cast<std::size_t>(i)].teacher_embedding = {double(i), 1.0};
  }
  const NodeSet ns = split_nodes(records);
  CHECK(ns.fg_ids == std::vector<int>{10, 12, 14});
  CHECK(ns.bg_ids == std::vector<int>{11, 13});
  CHECK(ns.fg_nodes[1] == Vec{2.0, 1.0});
  CHECK(ns.bg_nodes[0] == Vec{1.0, 1.0});
}

TEST_CASE("split_nodes with external embeddings keeps ids but swaps features") {
  Rng rng(7);
  const auto records = testutil::random_records(rng, 3, 2, 4, 3);
  std::vector<Vec> features;
  for (int i = 0; i < 5; ++i) features.push_back(testutil::random_vec(rng, 4));
  const NodeSet ns = split_nodes(records, features);
  CHECK(ns.fg_ids == std::vector<int>{0, 1, 2});
  CHECK(ns.bg_ids == std::vector<int>{3, 4});
  CHECK(ns.fg_nodes[0] == features[0]);
  CHECK(ns.bg_nodes[1] == features[4]);
}

TEST_CASE("mine_background keeps strictly-above-threshold background, ascending") {
  std::vector<InstanceRecord> records(4);
  records[0] = {.id = 9, .label = kBackgroundLabel, .teacher_cls_loss = 0.5};
  records[1] = {.id = 2, .label = 1, .teacher_cls_loss = 9.0};  // foreground, never mined
  records[2] = {.id = 5, .label = kBackgroundLabel, .teacher_cls_loss = 0.3};
  records[3] = {.id = 1, .label = kBackgroundLabel, .teacher_cls_loss = 0.8};

  CHECK(mine_background(records, 0.4) == std::vector<int>{1, 9});
  // Exactly-at-threshold instances stay out.
  CHECK(mine_background(records, 0.5) == std::vector<int>{1});
  CHECK(mine_background(records, 10.0).empty());
  CHECK(mine_background(records, -1.0) == std::vector<int>{1, 5, 9});
}

TEST_CASE("mining shrinks monotonically as the threshold grows") {
  Rng rng(43);
  for (int it = 0; it < 50; ++it) {
    const auto records = testutil::random_records(rng, 4, 12, 6, 3);
    const double t1 = rng.uniform(0.0, 2.0);
    const double t2 = t1 + rng.uniform(0.0, 1.0);
    const auto lo = mine_background(records, t1);
    const auto hi = mine_background(records, t2);
    CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
    CHECK(mine_background(records, t1) == oracle::mined_ids(records, t1));
  }
}

TEST_CASE("edge matrix is symmetric with unit diagonal and entries in [-1, 1]") {
  Rng rng(44);
  for (int it = 0; it < 50; ++it) {
    const int k = rng.uniform_int(0, 12);
    const auto nodes = testutil::random_embeddings(rng, static_cast<std::size_t>(k), 5, 0.2);
    const EdgeMatrix e = build_edge_matrix(nodes);
    REQUIRE(e.size() == static_cast<std::size_t>(k));
    for (int p = 0; p < k; ++p) {
      const bool zero_norm = squared_norm(nodes[static_cast<std::size_t>(p)]) == 0.0;
      CHECK(e.values(p, p) == (zero_norm ? 0.0 : 1.0));
      for (int q = 0; q < k; ++q) {
        CHECK(e.values(p, q) == e.values(q, p));
        CHECK(e.values(p, q) >= -1.0 - 1e-12);
        CHECK(e.values(p, q) <= 1.0 + 1e-12);
        if (zero_norm) CHECK(e.values(p, q) == 0.0);
      }
    }
  }
}

TEST_CASE("edge matrix matches the oracle") {
  Rng rng(45);
  for (int it = 0; it < 50; ++it) {
    const int k = rng.uniform_int(1, 16);
    const auto nodes = testutil::random_embeddings(rng, static_cast<std::size_t>(k), 7, 0.1);
    const EdgeMatrix e = build_edge_matrix(nodes);
    const auto ref = oracle::edge_matrix(nodes);
    for (int p = 0; p < k; ++p) {
      for (int q = 0; q < k; ++q) {
        CHECK(e.values(p, q) == doctest::Approx(ref[p][q]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("edge matrix is invariant to positive rescaling of any node") {
  Rng rng(46);
  for (int it = 0; it < 30; ++it) {
    const int k = rng.uniform_int(2, 10);
    auto nodes = testutil::random_embeddings(rng, static_cast<std::size_t>(k), 6, 0.0);
    const EdgeMatrix before = build_edge_matrix(nodes);
    const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(0, k - 1));
    const double scale = rng.uniform(0.1, 50.0);
    for (double& x : nodes[pick]) x *= scale;
    const EdgeMatrix after = build_edge_matrix(nodes);
    for (int p = 0; p < k; ++p) {
      for (int q = 0; q < k; ++q) {
        CHECK(after.values(p, q) == doctest::Approx(before.values(p, q)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("edge matrix is permutation equivariant") {
  Rng rng(47);
  for (int it = 0; it < 30; ++it) {
    const int k = rng.uniform_int(2, 10);
    const auto nodes = testutil::random_embeddings(rng, static_cast<std::size_t>(k), 6, 0.1);
    std::vector<std::size_t> perm(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_int(0, int(i) - 1))]);
    }
    std::vector<Vec> shuffled;
    for (std::size_t i : perm) shuffled.push_back(nodes[i]);
    const EdgeMatrix base = build_edge_matrix(nodes);
    const EdgeMatrix mixed = build_edge_matrix(shuffled);
    for (std::size_t p = 0; p < perm.size(); ++p) {
      for (std::size_t q = 0; q < perm.size(); ++q) {
        CHECK(mixed.values(p, q) == base.values(perm[p], perm[q]));
      }
    }
  }
}

TEST_CASE("build_graph orders participants as foreground then mined background") {
  Rng rng(48);
  auto records = testutil::random_records(rng, 3, 4, 5, 2, 0.0);
  records[3].teacher_cls_loss = 2.0;  // bg id 3
  records[4].teacher_cls_loss = 0.1;  // bg id 4
  records[5].teacher_cls_loss = 1.5;  // bg id 5
  records[6].teacher_cls_loss = 0.2;  // bg id 6
  const Graph g = build_graph(records, 1.0, true);
  CHECK(g.edges.node_ids == std::vector<int>{0, 1, 2, 3, 5});
  CHECK(g.nodes.fg_count() == 3);
  CHECK(g.nodes.bg_count() == 4);
}

TEST_CASE("empty mining degenerates the edge set to the foreground prototype") {
  Rng rng(49);
  for (int it = 0; it < 20; ++it) {
    const auto records = testutil::random_records(rng, 5, 8, 6, 3);
    const Graph mined = build_graph(records, 100.0, true);  // nothing passes
    std::vector<InstanceRecord> fg_only;
    for (const auto& r : records) {
      if (!r.is_background()) fg_only.push_back(r);
    }
    const Graph proto = build_graph(fg_only, 100.0, true);
    REQUIRE(mined.edges.size() == proto.edges.size());
    CHECK(mined.edges.node_ids == proto.edges.node_ids);
    for (std::size_t p = 0; p < mined.edges.size(); ++p) {
      for (std::size_t q = 0; q < mined.edges.size(); ++q) {
        CHECK(mined.edges.values(p, q) == proto.edges.values(p, q));
      }
    }
  }
}

TEST_CASE("mining disabled includes every background node") {
  Rng rng(50);
  const auto records = testutil::random_records(rng, 4, 6, 5, 3);
  const Graph g = build_graph(records, 100.0, false);
  CHECK(g.edges.size() == 10);
  std::set<int> ids(g.edges.node_ids.begin(), g.edges.node_ids.end());
  CHECK(ids.size() == 10);
}

TEST_CASE("graphs built over empty record lists are empty, not errors") {
  const std::vector<InstanceRecord> none;
  const Graph g = build_graph(none, 0.5, true);
  CHECK(g.nodes.fg_count() == 0);
  CHECK(g.nodes.bg_count() == 0);
  CHECK(g.edges.size() == 0);
}
