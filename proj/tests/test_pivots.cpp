#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sstruss/pivots.hpp"

using namespace sstruss;

TEST_CASE("user_avg_dist_column matches per-user averages") {
  Rng rng(301);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  int rv = static_cast<int>(rng.below(net.road.vertex_count()));
  std::vector<double> col = user_avg_dist_column(net, rv);
  std::vector<double> row = refimpl::bf_road_dist(net.road, rv);
  REQUIRE(static_cast<int>(col.size()) == net.social.user_count());
  for (int u = 0; u < net.social.user_count(); ++u) {
    double expect = 0.0;
    for (const CheckIn& c : net.social.users[u].checkins) expect += row[c.road_vertex];
    expect /= static_cast<double>(net.social.users[u].checkins.size());
    CHECK(col[u] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("user_user_avg_column matches avg_dist_rn") {
  Rng rng(302);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  int pivot = static_cast<int>(rng.below(net.social.user_count()));
  std::vector<double> col = user_user_avg_column(net, pivot);
  for (int u = 0; u < net.social.user_count(); ++u)
    CHECK(col[u] == doctest::Approx(avg_dist_rn(net, u, pivot)).epsilon(1e-12));
}

TEST_CASE("sample_user_pairs is deterministic, ordered, distinct") {
  Rng a(7), b(7);
  auto p1 = sample_user_pairs(20, 50, a);
  auto p2 = sample_user_pairs(20, 50, b);
  CHECK(p1 == p2);
  CHECK(p1.size() == 50);
  std::set<std::pair<int, int>> seen(p1.begin(), p1.end());
  CHECK(seen.size() == p1.size());
  for (auto [u, v] : p1) {
    CHECK(u != v);
    CHECK(u >= 0);
    CHECK(v >= 0);
    CHECK(u < 20);
    CHECK(v < 20);
  }
  Rng c(9);
  auto all = sample_user_pairs(4, 1000, c);
  CHECK(all.size() == 12);  // every ordered pair of 4 users
}

TEST_CASE("select_pivots is deterministic and in range") {
  Rng rng(303);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  PivotSearchConfig cfg;
  cfg.sample_pairs = 100;
  PivotSelection s1 = select_pivots(net, PivotKind::road, 3, cfg);
  PivotSelection s2 = select_pivots(net, PivotKind::road, 3, cfg);
  CHECK(s1.set.ids == s2.set.ids);
  CHECK(s1.cost == doctest::Approx(s2.cost));
  CHECK(s1.set.ids.size() == 3);
  std::set<int> distinct(s1.set.ids.begin(), s1.set.ids.end());
  CHECK(distinct.size() == 3);
  for (int id : s1.set.ids) {
    CHECK(id >= 0);
    CHECK(id < net.road.vertex_count());
  }

  PivotSelection soc = select_pivots(net, PivotKind::social, 3, cfg);
  CHECK(soc.set.ids.size() == 3);
  for (int id : soc.set.ids) {
    CHECK(id >= 0);
    CHECK(id < net.social.user_count());
  }
}

TEST_CASE("pivot count larger than the domain is rejected") {
  Rng rng(304);
  refimpl::SmallNetConfig small;
  small.n_users = 4;
  SpatialSocialNetwork net = refimpl::small_net(rng, small);
  PivotSearchConfig cfg;
  CHECK_THROWS_AS(select_pivots(net, PivotKind::social, 5, cfg), std::invalid_argument);
}

TEST_CASE("literal road objective flips the optimization direction") {
  Rng rng(305);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  PivotSearchConfig cfg;
  cfg.sample_pairs = 100;
  PivotSelection spread = select_pivots(net, PivotKind::road, 3, cfg);
  cfg.literal_road_cost = true;
  PivotSelection shrunk = select_pivots(net, PivotKind::road, 3, cfg);
  CHECK(spread.cost >= shrunk.cost - 1e-9);
}

TEST_CASE("gen_subgraphs assigns every user to a valid group") {
  Rng rng(306);
  for (int t = 0; t < 10; ++t) {
    SpatialSocialNetwork net = refimpl::small_net(rng);
    std::vector<int> pivots{0, 3, 5};
    std::vector<int> groups = gen_subgraphs(net, pivots);
    REQUIRE(static_cast<int>(groups.size()) == net.social.user_count());
    for (int g : groups) {
      CHECK(g >= 0);
      CHECK(g < 3);
    }
  }
}

TEST_CASE("subgraph quality measures are non-negative and respond to merging") {
  Rng rng(307);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  int m = net.social.user_count();
  std::vector<int> split(m);
  for (int i = 0; i < m; ++i) split[i] = i % 2;
  std::vector<int> merged(m, 0);
  QualityMeasures qs = subgraph_quality_measures(net, split, 2);
  QualityMeasures qm = subgraph_quality_measures(net, merged, 1);
  CHECK(qs.sc >= 0.0);
  CHECK(qs.st >= 0.0);
  CHECK(qs.inf >= 0.0);
  // One big group sees every pair, so each mass can only grow.
  CHECK(qm.sc >= qs.sc - 1e-12);
  CHECK(qm.st >= qs.st - 1e-12);
  CHECK(qm.inf >= qs.inf - 1e-12);
}

TEST_CASE("index pivot cost combines normalized terms") {
  QualityMeasures lo{0.0, 0.0, 0.0}, hi{10.0, 10.0, 10.0};
  PivotSearchConfig cfg;
  QualityMeasures mid{5.0, 5.0, 5.0};
  double c = cost_index_pivots(mid, lo, hi, cfg);
  // w1*0.5 + w2*(1-0.5) + w3*(1-0.5) with equal thirds.
  CHECK(c == doctest::Approx(0.5).epsilon(1e-9));
  QualityMeasures tight{0.0, 10.0, 10.0};
  CHECK(cost_index_pivots(tight, lo, hi, cfg) == doctest::Approx(0.0).epsilon(1e-9));
  QualityMeasures loose{10.0, 0.0, 0.0};
  CHECK(cost_index_pivots(loose, lo, hi, cfg) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("distance tables hold exact pivot rows") {
  Rng rng(308);
  SpatialSocialNetwork net = refimpl::small_net(rng);
  std::vector<int> road_pivots{0, 2};
  std::vector<int> social_pivots{1, 4, 5};
  PivotDistanceTables t = build_distance_tables(net, road_pivots, social_pivots);
  CHECK(t.l == 2);
  CHECK(t.h == 3);
  for (int u = 0; u < net.social.user_count(); ++u) {
    for (int k = 0; k < t.l; ++k) {
      std::vector<double> col = user_avg_dist_column(net, road_pivots[k]);
      CHECK(t.road_at(u, k) == doctest::Approx(col[u]).epsilon(1e-12));
    }
    for (int k = 0; k < t.h; ++k) {
      std::vector<int> row = social_hops(net.social, social_pivots[k]);
      CHECK(t.social_at(u, k) == row[u]);
    }
  }
}
