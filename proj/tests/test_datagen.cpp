#include <algorithm>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sstruss/datagen.hpp"

using namespace sstruss;

namespace {

GenConfig tiny_cfg(u64 seed, GenDistribution dist = GenDistribution::uniform) {
  GenConfig cfg;
  cfg.n_road = 60;
  cfg.n_users = 50;
  cfg.distribution = dist;
  cfg.topic_count = 2;
  cfg.keyword_universe = 8;
  cfg.degree_min = 1;
  cfg.degree_max = 6;
  cfg.rng_seed = seed;
  return cfg;
}

bool nets_equal(const SpatialSocialNetwork& a, const SpatialSocialNetwork& b) {
  if (a.road.xs != b.road.xs || a.road.ys != b.road.ys || a.road.ext_id != b.road.ext_id)
    return false;
  if (a.road.edges.size() != b.road.edges.size()) return false;
  for (size_t i = 0; i < a.road.edges.size(); ++i) {
    const auto& ea = a.road.edges[i];
    const auto& eb = b.road.edges[i];
    if (ea.src != eb.src || ea.dst != eb.dst || ea.length != eb.length) return false;
  }
  if (a.social.users.size() != b.social.users.size()) return false;
  for (size_t i = 0; i < a.social.users.size(); ++i) {
    const User& ua = a.social.users[i];
    const User& ub = b.social.users[i];
    if (ua.ext_id != ub.ext_id || ua.keywords != ub.keywords) return false;
    if (ua.checkins.size() != ub.checkins.size()) return false;
    for (size_t c = 0; c < ua.checkins.size(); ++c)
      if (ua.checkins[c].road_vertex != ub.checkins[c].road_vertex ||
          ua.checkins[c].timestamp != ub.checkins[c].timestamp)
        return false;
  }
  if (a.social.edges.size() != b.social.edges.size()) return false;
  for (size_t i = 0; i < a.social.edges.size(); ++i) {
    const TopicEdge& ea = a.social.edges[i];
    const TopicEdge& eb = b.social.edges[i];
    if (ea.src != eb.src || ea.dst != eb.dst || ea.weights != eb.weights) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generation is deterministic per seed and seed-sensitive") {
  SpatialSocialNetwork a = generate_network(tiny_cfg(5));
  SpatialSocialNetwork b = generate_network(tiny_cfg(5));
  SpatialSocialNetwork c = generate_network(tiny_cfg(6));
  CHECK(nets_equal(a, b));
  CHECK_FALSE(nets_equal(a, c));
}

TEST_CASE("distribution choice changes the draw") {
  SpatialSocialNetwork uni = generate_network(tiny_cfg(5, GenDistribution::uniform));
  SpatialSocialNetwork gau = generate_network(tiny_cfg(5, GenDistribution::gaussian));
  CHECK_FALSE(nets_equal(uni, gau));
}

TEST_CASE("generated networks satisfy every structural invariant") {
  for (u64 seed = 1; seed <= 6; ++seed) {
    GenConfig cfg = tiny_cfg(seed, seed % 2 ? GenDistribution::uniform
                                            : GenDistribution::gaussian);
    SpatialSocialNetwork net = generate_network(cfg);
    ValidationReport report = validate_network(net);
    for (const ValidationIssue& issue : report.issues)
      MESSAGE(issue.where, ": ", issue.message);
    REQUIRE(report.ok());
    CHECK(net.road.vertex_count() == cfg.n_road);
    CHECK(net.social.user_count() == cfg.n_users);
    CHECK(static_cast<int>(net.road.edges.size()) >= cfg.n_road - 1);
    CHECK(static_cast<int>(net.road.edges.size()) <= 3 * cfg.n_road);
    for (int v = 0; v < net.road.vertex_count(); ++v) {
      CHECK(net.road.xs[v] >= 0.0);
      CHECK(net.road.xs[v] <= 1.0);
      CHECK(net.road.ys[v] >= 0.0);
      CHECK(net.road.ys[v] <= 1.0);
    }
  }
}

TEST_CASE("per-user draws respect the configured ranges") {
  GenConfig cfg = tiny_cfg(9);
  cfg.checkins_min = 2;
  cfg.checkins_max = 4;
  cfg.keywords_min = 2;
  cfg.keywords_max = 3;
  SpatialSocialNetwork net = generate_network(cfg);
  for (const User& u : net.social.users) {
    CHECK(static_cast<int>(u.keywords.size()) >= cfg.keywords_min);
    CHECK(static_cast<int>(u.keywords.size()) <= cfg.keywords_max);
    CHECK(std::is_sorted(u.keywords.begin(), u.keywords.end()));
    CHECK(std::adjacent_find(u.keywords.begin(), u.keywords.end()) == u.keywords.end());
    for (int k : u.keywords) {
      CHECK(k >= 1);
      CHECK(k <= cfg.keyword_universe);
    }
    CHECK(static_cast<int>(u.checkins.size()) >= cfg.checkins_min);
    CHECK(static_cast<int>(u.checkins.size()) <= cfg.checkins_max);
    std::vector<int> spots;
    for (const CheckIn& ci : u.checkins) {
      CHECK(ci.road_vertex >= 0);
      CHECK(ci.road_vertex < net.road.vertex_count());
      CHECK(ci.timestamp >= 0);
      spots.push_back(ci.road_vertex);
    }
    std::sort(spots.begin(), spots.end());
    CHECK(std::adjacent_find(spots.begin(), spots.end()) == spots.end());
  }
}

TEST_CASE("every generated user has at least one friend") {
  for (u64 seed = 1; seed <= 4; ++seed) {
    SpatialSocialNetwork net = generate_network(tiny_cfg(seed * 13));
    for (int u = 0; u < net.social.user_count(); ++u)
      CHECK_FALSE(net.social.und_adj[u].empty());
    // Directed edges come in mirrored pairs sharing a friendship.
    CHECK(net.social.edges.size() % 2 == 0);
    for (int u = 0; u < net.social.user_count(); ++u)
      for (int v : net.social.und_adj[u]) {
        CHECK(net.social.edge_between(u, v).has_value());
        CHECK(net.social.edge_between(v, u).has_value());
      }
  }
}

TEST_CASE("degenerate sizes still produce valid networks") {
  GenConfig cfg = tiny_cfg(3);
  cfg.n_road = 2;
  cfg.n_users = 1;
  SpatialSocialNetwork net = generate_network(cfg);
  CHECK(validate_network(net).ok());
  CHECK(net.road.vertex_count() == 2);
  CHECK(net.social.user_count() == 1);
  CHECK(net.social.edges.empty());
}

TEST_CASE("invalid configurations are rejected") {
  auto expect_reject = [](GenConfig cfg) {
    CHECK_THROWS_AS(generate_network(cfg), std::invalid_argument);
  };
  GenConfig base = tiny_cfg(1);

  GenConfig cfg = base;
  cfg.n_road = 1;
  expect_reject(cfg);

  cfg = base;
  cfg.n_users = 0;
  expect_reject(cfg);

  cfg = base;
  cfg.topic_count = 0;
  expect_reject(cfg);

  cfg = base;
  cfg.keyword_universe = 0;
  expect_reject(cfg);

  cfg = base;
  cfg.degree_min = 0;
  expect_reject(cfg);

  cfg = base;
  cfg.degree_min = 5;
  cfg.degree_max = 4;
  expect_reject(cfg);

  cfg = base;
  cfg.checkins_min = 3;
  cfg.checkins_max = 2;
  expect_reject(cfg);

  cfg = base;
  cfg.keywords_min = 0;
  expect_reject(cfg);
}
