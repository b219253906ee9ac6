#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sstruss/network.hpp"

namespace sstruss {

// Single-source shortest path lengths over the road graph.
std::vector<double> road_shortest_paths(const RoadNetwork& road, int src);

// Mean road distance over all check-in pairs of two users (symmetric).
double avg_dist_rn(const SpatialSocialNetwork& net, int u, int v);

// Memoizes one Dijkstra row per distinct check-in vertex. Scratch state for a
// single query evaluation; not thread-safe.
class RoadRowCache {
 public:
  explicit RoadRowCache(const RoadNetwork& road) : road_(&road) {}
  const std::vector<double>& row(int road_vertex);
  double avg_dist(const User& a, const User& b);

 private:
  const RoadNetwork* road_;
  std::map<int, std::vector<double>> rows_;
};

// Hop distances over the undirected friendship graph; kInfHops if unreachable.
std::vector<int> social_hops(const SocialNetwork& soc, int src);

// Undirected social edges with per-edge triangle support and per-user phi
// (max support over incident edges, 0 for degree <= 1).
struct EdgeSupportMap {
  std::vector<std::pair<int, int>> edges;  // canonical (min,max), sorted
  std::vector<int> support;
  std::vector<int> phi;

  int edge_id(int u, int v) const;  // -1 if absent
};

EdgeSupportMap compute_supports(const SocialNetwork& soc);

// Maximal edge subset of the friendship graph induced on `restricted_to`
// (empty = all users) in which every surviving edge closes >= k-2 triangles
// with surviving edges. Returns edges as canonical sorted pairs.
std::vector<std::pair<int, int>> truss_peel(const SocialNetwork& soc,
                                            const std::vector<int>& restricted_to, int k);

// Per-edge topic propagation folded with a normalized topic vector.
double edge_influence(const std::vector<double>& weights, const std::vector<double>& topics);

// Max product of edge influences over simple directed paths from u to v,
// restricted to vertices with mask[x] != 0 when mask is given. 0 if
// unreachable. Computed as a shortest path under -log weights; the returned
// value re-multiplies the weights along the winning path.
double influence_score(const SocialNetwork& soc, int u, int v, const std::vector<double>& topics,
                       const std::vector<char>* mask = nullptr);

/// One-to-all variants of the above (forward: paths src->x, reverse: x->src).
std::vector<double> influence_from(const SocialNetwork& soc, int src,
                                   const std::vector<double>& topics,
                                   const std::vector<char>* mask = nullptr);
std::vector<double> influence_to(const SocialNetwork& soc, int dst,
                                 const std::vector<double>& topics,
                                 const std::vector<char>* mask = nullptr);

// min over u in group of influence_score(u, v).
double influence_set_to_user(const SocialNetwork& soc, const std::vector<int>& group, int v,
                             const std::vector<double>& topics,
                             const std::vector<char>* mask = nullptr);

}  // namespace sstruss
