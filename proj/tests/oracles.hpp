#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "sstruss/metrics.hpp"
#include "sstruss/network.hpp"

// Reference implementations kept deliberately naive and structurally unlike
// the library code, so agreement is evidence rather than tautology.
namespace refimpl {

using sstruss::QuerySpec;
using sstruss::Rng;
using sstruss::SocialNetwork;
using sstruss::SpatialSocialNetwork;

// Bellman-Ford single-source road distances.
std::vector<double> bf_road_dist(const sstruss::RoadNetwork& road, int src);

// Floyd-Warshall hop matrix over undirected friendships.
std::vector<std::vector<int>> fw_hops(const SocialNetwork& soc);

// Triangle support per canonical undirected edge, by scanning all triples.
std::map<std::pair<int, int>, int> cubic_supports(const SocialNetwork& soc,
                                                  const std::vector<int>& within);

// Truss fixpoint that deletes one violating edge at a time in an order chosen
// by the caller's rng (or first-found when null). Order independence of the
// result is itself part of what the tests assert.
std::set<std::pair<int, int>> naive_truss(const SocialNetwork& soc,
                                          const std::vector<int>& within, int k,
                                          Rng* shuffle_rng = nullptr);

// Max product of edge influences over all simple directed paths, by
// exhaustive DFS. Only usable on small graphs.
double dfs_influence(const SocialNetwork& soc, int src, int dst,
                     const std::vector<double>& topics,
                     const std::vector<char>* mask = nullptr);

struct SmallNetConfig {
  int n_road = 12;
  int n_users = 8;
  int topic_count = 2;
  int keyword_universe = 6;
  double friend_prob = 0.35;
  int extra_road_edges = 6;
};

// Random connected road graph plus a random social layer. External user ids
// are deliberately non-contiguous to catch internal/external id mixups.
SpatialSocialNetwork small_net(Rng& rng, const SmallNetConfig& cfg = {});

QuerySpec random_query(Rng& rng, const SpatialSocialNetwork& net);

}  // namespace refimpl
