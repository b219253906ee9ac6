#include "sstruss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace sstruss {

std::vector<double> road_shortest_paths(const RoadNetwork& road, int src) {
  int n = road.vertex_count();
  std::vector<double> dist(n, kInfDist);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : road.adj[v]) {
      double nd = d + len;
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

double avg_dist_rn(const SpatialSocialNetwork& net, int u, int v) {
  RoadRowCache cache(net.road);
  return cache.avg_dist(net.social.users[u], net.social.users[v]);
}

const std::vector<double>& RoadRowCache::row(int road_vertex) {
  auto it = rows_.find(road_vertex);
  if (it == rows_.end())
    it = rows_.emplace(road_vertex, road_shortest_paths(*road_, road_vertex)).first;
  return it->second;
}

double RoadRowCache::avg_dist(const User& a, const User& b) {
  double sum = 0.0;
  for (const CheckIn& ca : a.checkins) {
    const std::vector<double>& r = row(ca.road_vertex);
    for (const CheckIn& cb : b.checkins) sum += r[cb.road_vertex];
  }
  return sum / (static_cast<double>(a.checkins.size()) * static_cast<double>(b.checkins.size()));
}

std::vector<int> social_hops(const SocialNetwork& soc, int src) {
  int m = soc.user_count();
  std::vector<int> dist(m, kInfHops);
  std::queue<int> bfs;
  dist[src] = 0;
  bfs.push(src);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int w : soc.und_adj[v])
      if (dist[w] == kInfHops) {
        dist[w] = dist[v] + 1;
        bfs.push(w);
      }
  }
  return dist;
}

int EdgeSupportMap::edge_id(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
  if (it != edges.end() && *it == std::make_pair(u, v))
    return static_cast<int>(it - edges.begin());
  return -1;
}

EdgeSupportMap compute_supports(const SocialNetwork& soc) {
  EdgeSupportMap map;
  int m = soc.user_count();
  for (int u = 0; u < m; ++u)
    for (int v : soc.und_adj[u])
      if (u < v) map.edges.push_back({u, v});
  std::sort(map.edges.begin(), map.edges.end());
  map.support.assign(map.edges.size(), 0);

  // Orient edges from lower (degree, id) to higher; each triangle is then
  // found exactly once by intersecting oriented out-neighborhoods.
  auto rank = [&](int v) { return std::make_pair(soc.und_adj[v].size(), v); };
  std::vector<std::vector<int>> fwd(m);
  for (auto [u, v] : map.edges) {
    if (rank(u) < rank(v))
      fwd[u].push_back(v);
    else
      fwd[v].push_back(u);
  }
  for (auto& f : fwd) std::sort(f.begin(), f.end());
  for (int u = 0; u < m; ++u) {
    for (int v : fwd[u]) {
      const auto& a = fwd[u];
      const auto& b = fwd[v];
      size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
          int w = a[i];
          ++map.support[map.edge_id(u, v)];
          ++map.support[map.edge_id(u, w)];
          ++map.support[map.edge_id(v, w)];
          ++i;
          ++j;
        } else if (a[i] < b[j]) {
          ++i;
        } else {
          ++j;
        }
      }
    }
  }

  map.phi.assign(m, 0);
  for (size_t e = 0; e < map.edges.size(); ++e) {
    auto [u, v] = map.edges[e];
    map.phi[u] = std::max(map.phi[u], map.support[e]);
    map.phi[v] = std::max(map.phi[v], map.support[e]);
  }
  return map;
}

std::vector<std::pair<int, int>> truss_peel(const SocialNetwork& soc,
                                            const std::vector<int>& restricted_to, int k) {
  int m = soc.user_count();
  std::vector<char> in(m, restricted_to.empty() ? 1 : 0);
  for (int v : restricted_to) in[v] = 1;

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < m; ++u)
    if (in[u])
      for (int v : soc.und_adj[u])
        if (u < v && in[v]) edges.push_back({u, v});
  std::sort(edges.begin(), edges.end());

  auto eid = [&edges](int u, int v) {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
    if (it != edges.end() && *it == std::make_pair(u, v))
      return static_cast<int>(it - edges.begin());
    return -1;
  };

  int ne = static_cast<int>(edges.size());
  std::vector<std::vector<int>> adj(m);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<int> support(ne, 0);
  for (int e = 0; e < ne; ++e) {
    auto [u, v] = edges[e];
    const auto& a = adj[u];
    const auto& b = adj[v];
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) {
        ++support[e];
        ++i;
        ++j;
      } else if (a[i] < b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  int need = k - 2;
  std::vector<char> alive(ne, 1);
  std::queue<int> weak;
  for (int e = 0; e < ne; ++e)
    if (support[e] < need) weak.push(e);
  while (!weak.empty()) {
    int e = weak.front();
    weak.pop();
    if (!alive[e]) continue;
    alive[e] = 0;
    auto [u, v] = edges[e];
    const auto& a = adj[u];
    const auto& b = adj[v];
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) {
        int w = a[i];
        int eu = eid(u, w), ev = eid(v, w);
        if (eu >= 0 && ev >= 0 && alive[eu] && alive[ev]) {
          if (--support[eu] < need) weak.push(eu);
          if (--support[ev] < need) weak.push(ev);
        }
        ++i;
        ++j;
      } else if (a[i] < b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<std::pair<int, int>> out;
  for (int e = 0; e < ne; ++e)
    if (alive[e]) out.push_back(edges[e]);
  return out;
}

double edge_influence(const std::vector<double>& weights, const std::vector<double>& topics) {
  double f = 0.0;
  for (size_t j = 0; j < weights.size(); ++j) f += weights[j] * topics[j];
  return f;
}

namespace {

// Dijkstra under -log(f) arc costs. parent-tracked so the result can be
// recomputed as an exact product of edge influences.
std::vector<double> influence_sweep(const SocialNetwork& soc, int src,
                                    const std::vector<double>& topics,
                                    const std::vector<char>* mask, bool reverse) {
  int m = soc.user_count();
  std::vector<double> cost(m, kInfDist);
  std::vector<int> parent_edge(m, -1), parent(m, -1);
  if (mask && !(*mask)[src]) {
    // The empty path still connects src to itself.
    std::vector<double> score(m, 0.0);
    score[src] = 1.0;
    return score;
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  cost[src] = 0.0;
  heap.push({0.0, src});
  const auto& fwd = reverse ? soc.in_adj : soc.out_adj;
  while (!heap.empty()) {
    auto [c, v] = heap.top();
    heap.pop();
    if (c > cost[v]) continue;
    for (auto [w, e] : fwd[v]) {
      if (mask && !(*mask)[w]) continue;
      double f = edge_influence(soc.edges[e].weights, topics);
      if (f <= 0.0) continue;
      double nc = c - std::log(f);
      if (nc < cost[w]) {
        cost[w] = nc;
        parent[w] = v;
        parent_edge[w] = e;
        heap.push({nc, w});
      }
    }
  }
  std::vector<double> score(m, 0.0);
  score[src] = 1.0;  // empty path
  for (int v = 0; v < m; ++v) {
    if (v == src || cost[v] == kInfDist) continue;
    double prod = 1.0;
    for (int x = v; x != src; x = parent[x])
      prod *= edge_influence(soc.edges[parent_edge[x]].weights, topics);
    score[v] = prod;
  }
  return score;
}

}  // namespace

double influence_score(const SocialNetwork& soc, int u, int v, const std::vector<double>& topics,
                       const std::vector<char>* mask) {
  return influence_sweep(soc, u, topics, mask, false)[v];
}

std::vector<double> influence_from(const SocialNetwork& soc, int src,
                                   const std::vector<double>& topics,
                                   const std::vector<char>* mask) {
  return influence_sweep(soc, src, topics, mask, false);
}

std::vector<double> influence_to(const SocialNetwork& soc, int dst,
                                 const std::vector<double>& topics,
                                 const std::vector<char>* mask) {
  return influence_sweep(soc, dst, topics, mask, true);
}

double influence_set_to_user(const SocialNetwork& soc, const std::vector<int>& group, int v,
                             const std::vector<double>& topics, const std::vector<char>* mask) {
  std::vector<double> to_v = influence_to(soc, v, topics, mask);
  double best = kInfDist;
  for (int u : group)
    if (u != v) best = std::min(best, to_v[u]);
  return best == kInfDist ? 0.0 : best;
}

}  // namespace sstruss
