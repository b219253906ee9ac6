#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "sstruss/baselines.hpp"
#include "sstruss/engine.hpp"
#include "sstruss/io.hpp"

using namespace sstruss;

namespace {

std::vector<i64> ext_members(const SpatialSocialNetwork& net, const std::vector<int>& members) {
  std::vector<i64> out;
  for (int u : members) out.push_back(net.social.users[u].ext_id);
  std::sort(out.begin(), out.end());
  return out;
}

struct Instance {
  SpatialSocialNetwork net;
  SocialSpatialIndex idx;
};

Instance make_instance(u64 seed, refimpl::SmallNetConfig cfg = {}) {
  Rng rng(seed);
  Instance inst{refimpl::small_net(rng, cfg), {}};
  IndexConfig icfg;
  icfg.l = 3;
  icfg.h = 3;
  icfg.fanout = 3;
  icfg.pivot.sample_pairs = 60;
  inst.idx = build_index(inst.net, icfg);
  return inst;
}

bool has_clause(const CommunityCertificate& cert, const std::string& name) {
  return std::find(cert.failing.begin(), cert.failing.end(), name) != cert.failing.end();
}

}  // namespace

TEST_CASE("demo fixture query finds the expected community") {
  SpatialSocialNetwork net = load_network(SSTRUSS_FIXTURES "/demo");
  REQUIRE(validate_network(net).ok());
  IndexConfig cfg;
  cfg.l = 2;
  cfg.h = 2;
  cfg.pivot.sample_pairs = 30;
  SocialSpatialIndex idx = build_index(net, cfg);

  QuerySpec q;
  q.q = *net.social.index_of(2);
  q.k = 3;
  q.d = 3;
  q.sigma = 2.0;
  q.theta = 0.5;
  q.topics = {0.5, 0.5};
  q.keywords = {1, 2, 3};
  validate_query(net, q);

  QueryResult res = answer_query(net, idx, q);
  CHECK(res.community.cert.valid);
  CHECK(ext_members(net, res.community.members) == std::vector<i64>{1, 2, 4});
  CHECK(res.community.cert.spatial_max == doctest::Approx(1.5));
  CHECK(res.community.cert.hop_max == 1);
  CHECK(res.community.cert.influence_min == doctest::Approx(0.75));
  CHECK(res.community.cert.support_min == 1);
}

TEST_CASE("check_community reports each failing clause by name") {
  SpatialSocialNetwork net = load_network(SSTRUSS_FIXTURES "/demo");
  QuerySpec q;
  q.q = *net.social.index_of(2);
  q.k = 3;
  q.d = 3;
  q.sigma = 2.0;
  q.theta = 0.5;
  q.topics = {0.5, 0.5};
  q.keywords = {1, 2, 3};
  validate_query(net, q);

  int u1 = *net.social.index_of(1), u2 = *net.social.index_of(2);
  int u3 = *net.social.index_of(3), u4 = *net.social.index_of(4);
  int u5 = *net.social.index_of(5), u6 = *net.social.index_of(6);

  SUBCASE("the expected community is certified") {
    CommunityCertificate cert = check_community(net, q, {u1, u2, u4});
    CHECK(cert.valid);
    CHECK(cert.failing.empty());
    CHECK(cert.keywords_ok);
    CHECK(cert.connected);
  }
  SUBCASE("missing q") {
    CommunityCertificate cert = check_community(net, q, {u1, u4});
    CHECK_FALSE(cert.valid);
    CHECK(has_clause(cert, "membership"));
  }
  SUBCASE("keyword violation") {
    CommunityCertificate cert = check_community(net, q, {u1, u2, u3, u4});
    CHECK_FALSE(cert.valid);
    CHECK(has_clause(cert, "keywords"));
  }
  SUBCASE("spatial violation") {
    CommunityCertificate cert = check_community(net, q, {u1, u2, u4, u6});
    CHECK_FALSE(cert.valid);
    CHECK(has_clause(cert, "spatial"));
  }
  SUBCASE("influence violation") {
    CommunityCertificate cert = check_community(net, q, {u1, u2, u4, u5});
    CHECK_FALSE(cert.valid);
    CHECK(has_clause(cert, "influence"));
  }
  SUBCASE("support violation") {
    QuerySpec strict = q;
    strict.k = 4;  // the triangle only supports k=3
    CommunityCertificate cert = check_community(net, strict, {u1, u2, u4});
    CHECK_FALSE(cert.valid);
    CHECK(has_clause(cert, "support"));
  }
  SUBCASE("duplicate members collapse") {
    CommunityCertificate cert = check_community(net, q, {u1, u2, u2, u4});
    CHECK(cert.valid);
  }
}

TEST_CASE("singleton semantics depend on k") {
  SpatialSocialNetwork net = load_network(SSTRUSS_FIXTURES "/demo");
  QuerySpec q;
  q.q = *net.social.index_of(2);
  q.d = 3;
  q.sigma = 2.0;
  q.theta = 0.5;
  q.topics = {0.5, 0.5};
  q.keywords = {1};

  q.k = 2;
  validate_query(net, q);
  CommunityCertificate lone = check_community(net, q, {q.q});
  CHECK(lone.valid);
  CHECK(lone.vacuous);

  q.k = 3;
  CommunityCertificate strict = check_community(net, q, {q.q});
  CHECK_FALSE(strict.valid);
  CHECK(has_clause(strict, "support"));

  // And a keyword-less singleton fails regardless.
  QuerySpec nokw = q;
  nokw.k = 2;
  nokw.keywords = {9};
  CommunityCertificate miss = check_community(net, nokw, {nokw.q});
  CHECK_FALSE(miss.valid);
  CHECK(has_clause(miss, "keywords"));
}

TEST_CASE("hops are measured on the full graph, not the induced subgraph") {
  // q - a - b chain: {q, b} has full-graph hop distance 2 even though the
  // induced subgraph disconnects them.
  SpatialSocialNetwork net;
  net.road.add_vertex(0, 0.0, 0.0);
  net.road.add_vertex(1, 1.0, 0.0);
  net.road.add_edge(0, 1, 1.0);
  net.road.finalize();
  net.social.topic_count = 1;
  int qu = net.social.add_user(1, {1}, {{0, 0}});
  int a = net.social.add_user(2, {1}, {{0, 0}});
  int b = net.social.add_user(3, {1}, {{1, 0}});
  net.social.add_edge(qu, a, {1.0});
  net.social.add_edge(a, qu, {1.0});
  net.social.add_edge(a, b, {1.0});
  net.social.add_edge(b, a, {1.0});
  net.social.finalize();

  QuerySpec q;
  q.q = qu;
  q.k = 2;
  q.d = 3;
  q.sigma = 5.0;
  q.theta = 0.9;
  q.topics = {1.0};
  q.keywords = {1};
  validate_query(net, q);

  CommunityCertificate cert = check_community(net, q, {q.q, b});
  CHECK(cert.hop_max == 2);
  // Yet the set is invalid: no connecting edge inside the set and the
  // influence path through the outsider does not exist within the set.
  CHECK_FALSE(cert.valid);
  CHECK(has_clause(cert, "connected"));

  QuerySpec loose = q;
  loose.d = 2;
  CommunityCertificate far = check_community(net, loose, {loose.q, b});
  CHECK(has_clause(far, "hops"));
}

TEST_CASE("engine matches the oracle on random small instances") {
  int feasible_seen = 0;
  for (u64 seed = 1; seed <= 60; ++seed) {
    refimpl::SmallNetConfig cfg;
    cfg.n_users = 9;
    cfg.n_road = 12;
    Instance inst = make_instance(2000 + seed, cfg);
    Rng rng(seed * 7);
    QuerySpec q = refimpl::random_query(rng, inst.net);
    QueryResult res = answer_query(inst.net, inst.idx, q);

    OracleResult oracle = oracle_query(inst.net, q);
    CHECK(res.community.cert.valid == oracle.feasible);
    if (oracle.feasible) {
      ++feasible_seen;
      CHECK(oracle_validate(inst.net, q, res.community.members));
      CHECK(oracle_no_valid_superset(inst.net, q, res.community.members));
    }
  }
  CHECK(feasible_seen >= 5);
}

TEST_CASE("literal pruning can refuse answers that sound mode finds") {
  int sound_valid = 0, literal_valid = 0;
  for (u64 seed = 1; seed <= 40; ++seed) {
    refimpl::SmallNetConfig cfg;
    cfg.n_users = 10;
    Instance inst = make_instance(2100 + seed, cfg);
    Rng rng(seed * 13);
    QuerySpec q = refimpl::random_query(rng, inst.net);
    q.k = 2;
    QueryResult s = answer_query(inst.net, inst.idx, q, PruneMode::sound);
    QueryResult l = answer_query(inst.net, inst.idx, q, PruneMode::literal);
    sound_valid += s.community.cert.valid;
    literal_valid += l.community.cert.valid;
    if (l.community.cert.valid) {
      // Whatever literal mode returns must still be a real community.
      CHECK(check_community(inst.net, q, l.community.members).valid);
    }
  }
  CHECK(sound_valid >= literal_valid);
  CHECK(sound_valid >= 3);
}

TEST_CASE("batch answering equals one-at-a-time answering") {
  for (u64 seed = 1; seed <= 10; ++seed) {
    refimpl::SmallNetConfig cfg;
    cfg.n_users = 16;
    cfg.n_road = 20;
    Instance inst = make_instance(2200 + seed, cfg);
    Rng rng(seed * 17);
    std::vector<QuerySpec> queries;
    for (int i = 0; i < 5; ++i) queries.push_back(refimpl::random_query(rng, inst.net));
    for (PruneMode mode : {PruneMode::sound, PruneMode::literal}) {
      std::vector<QueryResult> batch = answer_batch(inst.net, inst.idx, queries, mode);
      REQUIRE(batch.size() == queries.size());
      for (size_t i = 0; i < queries.size(); ++i) {
        QueryResult solo = answer_query(inst.net, inst.idx, queries[i], mode);
        CHECK(batch[i].community.members == solo.community.members);
        CHECK(batch[i].stats.candidates_after_pruning ==
              solo.stats.candidates_after_pruning);
        CHECK(batch[i].stats.result_size == solo.stats.result_size);
      }
    }
  }
}

TEST_CASE("an empty batch is fine") {
  Instance inst = make_instance(2301);
  CHECK(answer_batch(inst.net, inst.idx, {}, PruneMode::sound).empty());
}

TEST_CASE("candidate collection is deterministic and includes q") {
  Instance inst = make_instance(2401);
  Rng rng(3);
  QuerySpec q = refimpl::random_query(rng, inst.net);
  BoundsContext ctx = make_bounds_context(inst.net, inst.idx, q, PruneMode::sound);
  QueryStats s1, s2;
  std::vector<int> c1 = collect_candidates(inst.net, inst.idx, ctx, s1);
  std::vector<int> c2 = collect_candidates(inst.net, inst.idx, ctx, s2);
  CHECK(c1 == c2);
  CHECK(s1.nodes_visited == s2.nodes_visited);
  CHECK(std::binary_search(c1.begin(), c1.end(), q.q));
  CHECK(std::is_sorted(c1.begin(), c1.end()));
  CHECK(std::adjacent_find(c1.begin(), c1.end()) == c1.end());
  CHECK(s1.candidates_after_pruning == static_cast<i64>(c1.size()));
}

TEST_CASE("certificate validity always matches the failing clause list") {
  for (u64 seed = 1; seed <= 30; ++seed) {
    refimpl::SmallNetConfig cfg;
    cfg.n_users = 8;
    Instance inst = make_instance(2500 + seed, cfg);
    Rng rng(seed);
    QuerySpec q = refimpl::random_query(rng, inst.net);
    QueryResult res = answer_query(inst.net, inst.idx, q);
    CHECK(res.community.cert.valid == res.community.cert.failing.empty());
    CHECK(res.stats.result_size == static_cast<i64>(res.community.members.size()));
  }
}
