#include "doctest.h"
#include "oracles.hpp"
#include "sstruss/network.hpp"

using namespace sstruss;

namespace {

SpatialSocialNetwork tiny() {
  SpatialSocialNetwork net;
  net.road.add_vertex(10, 0.0, 0.0);
  net.road.add_vertex(20, 1.0, 0.0);
  net.road.add_vertex(30, 1.0, 1.0);
  net.road.add_edge(0, 1, 1.0);
  net.road.add_edge(1, 2, 1.0);
  net.road.finalize();
  net.social.topic_count = 2;
  net.social.add_user(5, {3, 1}, {{0, 0}});
  net.social.add_user(9, {2}, {{1, 0}, {2, 5}});
  net.social.add_edge(0, 1, {0.5, 0.5});
  net.social.add_edge(1, 0, {0.25, 0.75});
  net.social.finalize();
  return net;
}

}  // namespace

TEST_CASE("external ids resolve to internal indices") {
  SpatialSocialNetwork net = tiny();
  CHECK(net.road.index_of(10) == 0);
  CHECK(net.road.index_of(30) == 2);
  CHECK_FALSE(net.road.index_of(11).has_value());
  CHECK(net.social.index_of(5) == 0);
  CHECK(net.social.index_of(9) == 1);
  CHECK_FALSE(net.social.index_of(6).has_value());
}

TEST_CASE("add_user normalizes keywords and builds bits") {
  SpatialSocialNetwork net = tiny();
  const User& u = net.social.users[0];
  CHECK(u.keywords == std::vector<int>{1, 3});
  CHECK(u.bits.may_contain(1));
  CHECK(u.bits.may_contain(3));
}

TEST_CASE("finalize builds symmetric road adjacency") {
  SpatialSocialNetwork net = tiny();
  CHECK(net.road.adj[0].size() == 1);
  CHECK(net.road.adj[1].size() == 2);
  CHECK(net.road.adj[0][0].first == 1);
  CHECK(net.road.adj[0][0].second == doctest::Approx(1.0));
}

TEST_CASE("finalize builds directed and undirected social adjacency") {
  SpatialSocialNetwork net = tiny();
  REQUIRE(net.social.out_adj[0].size() == 1);
  CHECK(net.social.out_adj[0][0].first == 1);
  REQUIRE(net.social.in_adj[0].size() == 1);
  CHECK(net.social.in_adj[0][0].first == 1);
  CHECK(net.social.und_adj[0] == std::vector<int>{1});
  CHECK(net.social.und_adj[1] == std::vector<int>{0});
  CHECK(net.social.edge_between(0, 1).has_value());
  CHECK(net.social.edge_between(1, 0).has_value());
  int e01 = *net.social.edge_between(0, 1);
  CHECK(net.social.edges[e01].weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("normalize_keywords sorts and dedups") {
  CHECK(normalize_keywords({3, 1, 3, 2, 1}) == std::vector<int>{1, 2, 3});
  CHECK(normalize_keywords({}) == std::vector<int>{});
}

TEST_CASE("keyword_overlap is exact despite the bit filter") {
  Rng rng(123);
  // Saturate a narrow filter so hash collisions are plentiful, then confirm
  // overlap still reports exact set intersection.
  for (int trial = 0; trial < 200; ++trial) {
    SocialNetwork soc;
    soc.topic_count = 1;
    soc.bits_width = 64;
    std::set<int> mine;
    int want = 1 + static_cast<int>(rng.below(4));
    while (static_cast<int>(mine.size()) < want)
      mine.insert(static_cast<int>(rng.below(1000)));
    soc.add_user(1, std::vector<int>(mine.begin(), mine.end()), {{0, 0}});
    std::set<int> query;
    int qwant = 1 + static_cast<int>(rng.below(4));
    while (static_cast<int>(query.size()) < qwant)
      query.insert(static_cast<int>(rng.below(1000)));
    std::vector<int> qk(query.begin(), query.end());
    KeywordBits qbits = build_keyword_bits(qk, 64);
    bool expect = false;
    for (int k : query) expect = expect || mine.count(k) > 0;
    CHECK(keyword_overlap(soc.users[0], qk, qbits) == expect);
  }
}

TEST_CASE("validate_network accepts a sound instance") {
  SpatialSocialNetwork net = tiny();
  CHECK(validate_network(net).ok());
}

TEST_CASE("validate_network flags structural defects") {
  SUBCASE("disconnected road graph") {
    SpatialSocialNetwork net = tiny();
    net.road.add_vertex(40, 5.0, 5.0);
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("non-positive edge length") {
    SpatialSocialNetwork net = tiny();
    net.road.add_edge(0, 2, 0.0);
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("self loop") {
    SpatialSocialNetwork net = tiny();
    net.social.add_edge(0, 0, {0.1, 0.1});
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("duplicate directed social edge") {
    SpatialSocialNetwork net = tiny();
    net.social.add_edge(0, 1, {0.1, 0.1});
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("weight out of range") {
    SpatialSocialNetwork net = tiny();
    net.social.add_edge(1, 0, {});
    net.social.edges.back().src = 0;
    net.social.edges.back().weights = {1.5, 0.0};
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("check-in to unknown road vertex") {
    SpatialSocialNetwork net = tiny();
    net.social.users[0].checkins.push_back({99, 0});
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("missing check-ins") {
    SpatialSocialNetwork net = tiny();
    net.social.users[1].checkins.clear();
    CHECK_FALSE(validate_network(net).ok());
  }
  SUBCASE("weight vector length mismatch") {
    SpatialSocialNetwork net = tiny();
    net.social.add_edge(1, 0, {0.5});
    net.social.edges.back().src = 0;
    CHECK_FALSE(validate_network(net).ok());
  }
}

TEST_CASE("validate_query enforces parameter ranges") {
  SpatialSocialNetwork net = tiny();
  QuerySpec good{.q = 0, .topics = {0.5, 0.5}, .keywords = {1}, .k = 2, .d = 1,
                 .sigma = 1.0, .theta = 0.5};
  QuerySpec s = good;
  CHECK_FALSE(validate_query(net, s).has_value());

  s = good;
  s.q = 7;
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.k = 1;
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.d = 0;
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.sigma = -1.0;
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.theta = 1.5;
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.topics = {1.0};
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.topics = {0.0, 0.0};
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
  s = good;
  s.topics = {-0.5, 1.5};
  CHECK_THROWS_AS(validate_query(net, s), std::invalid_argument);
}

TEST_CASE("validate_query normalizes topics and keywords") {
  SpatialSocialNetwork net = tiny();
  QuerySpec s{.q = 0, .topics = {1.0, 3.0}, .keywords = {4, 2, 4}, .k = 2, .d = 1,
              .sigma = 1.0, .theta = 0.0};
  auto note = validate_query(net, s);
  CHECK(note.has_value());
  CHECK(s.topics[0] == doctest::Approx(0.25));
  CHECK(s.topics[1] == doctest::Approx(0.75));
  CHECK(s.keywords == std::vector<int>{2, 4});
}

TEST_CASE("random small networks validate") {
  Rng rng(99);
  for (int t = 0; t < 20; ++t) {
    SpatialSocialNetwork net = refimpl::small_net(rng);
    CHECK(validate_network(net).ok());
  }
}
