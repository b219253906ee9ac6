#include "sstruss/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <stdexcept>
#include <string>

namespace sstruss {

namespace {

i64 now_nanos() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

constexpr int kOracleUserLimit = 512;  // Floyd-Warshall over all users must stay cheap

struct OracleScratch {
  std::vector<std::vector<int>> hops;    // full-graph hop matrix
  std::vector<std::vector<double>> inf;  // full-graph max-product influence
  std::vector<std::vector<double>> avg;  // pairwise mean road distance
  std::vector<char> kw;
  std::vector<int> qkeys;
};

OracleScratch make_scratch(const SpatialSocialNetwork& net, const QuerySpec& query) {
  const SocialNetwork& soc = net.social;
  const int m = static_cast<int>(soc.users.size());
  if (m > kOracleUserLimit)
    throw std::runtime_error("oracle requires a small instance (" + std::to_string(m) +
                             " users, limit " + std::to_string(kOracleUserLimit) + ")");
  OracleScratch s;

  s.hops.assign(m, std::vector<int>(m, kInfHops));
  for (int i = 0; i < m; ++i) {
    s.hops[i][i] = 0;
    for (int v : soc.und_adj[i]) s.hops[i][v] = 1;
  }
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      if (s.hops[i][k] == kInfHops) continue;
      for (int j = 0; j < m; ++j) {
        if (s.hops[k][j] == kInfHops) continue;
        s.hops[i][j] = std::min(s.hops[i][j], s.hops[i][k] + s.hops[k][j]);
      }
    }

  s.inf.assign(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    s.inf[i][i] = 1.0;
    for (auto [v, e] : soc.out_adj[i])
      s.inf[i][v] = edge_influence(soc.edges[e].weights, query.topics);
  }
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s.inf[i][j] = std::max(s.inf[i][j], s.inf[i][k] * s.inf[k][j]);

  RoadRowCache road(net.road);
  s.avg.assign(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      s.avg[i][j] = s.avg[j][i] = road.avg_dist(soc.users[i], soc.users[j]);

  s.qkeys = query.keywords;
  std::sort(s.qkeys.begin(), s.qkeys.end());
  KeywordBits qbits(soc.bits_width);
  for (int k : s.qkeys) qbits.insert(k);
  s.kw.assign(m, 0);
  for (int i = 0; i < m; ++i) s.kw[i] = keyword_overlap(soc.users[i], s.qkeys, qbits) ? 1 : 0;
  return s;
}

std::vector<int> build_pool(const SpatialSocialNetwork& net, const QuerySpec& query,
                            const OracleScratch& s) {
  const int m = static_cast<int>(net.social.users.size());
  std::vector<int> pool;
  for (int u = 0; u < m; ++u) {
    if (u == query.q) {
      pool.push_back(u);
      continue;
    }
    if (!s.kw[u] || !s.kw[query.q]) continue;
    if (s.hops[query.q][u] >= query.d) continue;
    if (s.avg[query.q][u] >= query.sigma) continue;
    // Full-graph influence upper bounds within-set influence, so this filter
    // cannot exclude a member of any valid community.
    if (s.inf[query.q][u] < query.theta || s.inf[u][query.q] < query.theta) continue;
    pool.push_back(u);
  }
  return pool;  // ascending by construction
}

// Exhaustive max product over simple paths src -> dst in the induced graph.
double dfs_best_path(const std::vector<std::vector<double>>& f, int src, int dst) {
  const int n = static_cast<int>(f.size());
  double best = 0.0;
  std::vector<char> used(n, 0);
  auto walk = [&](auto&& self, int at, double product) -> void {
    if (at == dst) {
      best = std::max(best, product);
      return;
    }
    used[at] = 1;
    for (int w = 0; w < n; ++w) {
      if (used[w] || f[at][w] <= 0.0) continue;
      double next = product * f[at][w];
      if (next <= best) continue;  // factors never exceed 1, so no recovery
      self(self, w, next);
    }
    used[at] = 0;
  };
  walk(walk, src, 1.0);
  return best;
}

// Validity of a sorted subset given precomputed scratch; influence by
// max-product closure over the induced arcs.
bool subset_valid(const SpatialSocialNetwork& net, const QuerySpec& query,
                  const OracleScratch& s, const std::vector<int>& subset, bool confirm_paths) {
  const SocialNetwork& soc = net.social;
  const int n = static_cast<int>(subset.size());
  if (!std::binary_search(subset.begin(), subset.end(), query.q)) return false;
  for (int u : subset)
    if (!s.kw[u]) return false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (s.hops[subset[i]][subset[j]] >= query.d) return false;
      if (s.avg[subset[i]][subset[j]] >= query.sigma) return false;
    }

  std::vector<int> pos(soc.users.size(), -1);
  for (int i = 0; i < n; ++i) pos[subset[i]] = i;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  int edge_count = 0;
  for (int i = 0; i < n; ++i)
    for (int v : soc.und_adj[subset[i]])
      if (pos[v] > i) {
        adj[i][pos[v]] = adj[pos[v]][i] = 1;
        ++edge_count;
      }

  // Connectivity inside the subset.
  {
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    seen[pos[query.q]] = 1;
    bfs.push(pos[query.q]);
    int reached = 1;
    while (!bfs.empty()) {
      int a = bfs.front();
      bfs.pop();
      for (int b = 0; b < n; ++b)
        if (adj[a][b] && !seen[b]) {
          seen[b] = 1;
          ++reached;
          bfs.push(b);
        }
    }
    if (reached != n) return false;
  }

  if (edge_count == 0) {
    if (n > 1 || query.k > 2) return false;
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (!adj[a][b]) continue;
        int sup = 0;
        for (int c = 0; c < n; ++c)
          if (adj[a][c] && adj[b][c]) ++sup;
        if (sup < query.k - 2) return false;
      }
  }

  if (n > 1) {
    std::vector<std::vector<double>> f(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      f[i][i] = 1.0;
      for (auto [v, e] : soc.out_adj[subset[i]])
        if (pos[v] >= 0) f[i][pos[v]] = edge_influence(soc.edges[e].weights, query.topics);
    }
    std::vector<std::vector<double>> closure = f;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          closure[i][j] = std::max(closure[i][j], closure[i][k] * closure[k][j]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (closure[i][j] < query.theta) return false;
        if (confirm_paths) {
          double exact = dfs_best_path(f, i, j);
          if (std::abs(exact - closure[i][j]) > 1e-9 * std::max(1.0, closure[i][j]))
            throw std::logic_error("influence closure disagrees with path enumeration");
        }
      }
  }
  return true;
}

}  // namespace

OracleResult oracle_query(const SpatialSocialNetwork& net, const QuerySpec& query,
                          const OracleConfig& cfg) {
  OracleScratch s = make_scratch(net, query);
  std::vector<int> pool = build_pool(net, query, s);
  OracleResult out;
  out.pool_size = static_cast<i64>(pool.size());
  if (static_cast<int>(pool.size()) > cfg.max_users)
    throw std::runtime_error("oracle pool too large: " + std::to_string(pool.size()) +
                             " users, limit " + std::to_string(cfg.max_users));

  const int n = static_cast<int>(pool.size());
  i64 enumerated = 0;
  for (int size = n; size >= 1 && !out.feasible; --size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      if (++enumerated > cfg.max_subsets)
        throw std::runtime_error("oracle enumeration exceeded max_subsets");
      std::vector<int> subset(size);
      for (int i = 0; i < size; ++i) subset[i] = pool[pick[i]];
      if (std::binary_search(subset.begin(), subset.end(), query.q) &&
          subset_valid(net, query, s, subset, false)) {
        subset_valid(net, query, s, subset, true);  // path-enumeration self check
        out.feasible = true;
        out.best = subset;
        break;
      }
      int i = size - 1;
      while (i >= 0 && pick[i] == n - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

bool oracle_validate(const SpatialSocialNetwork& net, const QuerySpec& query,
                     const std::vector<int>& members) {
  if (members.empty()) return false;
  OracleScratch s = make_scratch(net, query);
  std::vector<int> subset = members;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  return subset_valid(net, query, s, subset, true);
}

bool oracle_no_valid_superset(const SpatialSocialNetwork& net, const QuerySpec& query,
                              const std::vector<int>& members, const OracleConfig& cfg) {
  OracleScratch s = make_scratch(net, query);
  std::vector<int> pool = build_pool(net, query, s);
  if (static_cast<int>(pool.size()) > cfg.max_users)
    throw std::runtime_error("oracle pool too large: " + std::to_string(pool.size()) +
                             " users, limit " + std::to_string(cfg.max_users));
  std::vector<int> base = members;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  std::vector<int> extras;
  for (int u : pool)
    if (!std::binary_search(base.begin(), base.end(), u)) extras.push_back(u);

  const int nx = static_cast<int>(extras.size());
  for (u64 bits = 1; bits < (u64{1} << nx); ++bits) {
    std::vector<int> subset = base;
    for (int i = 0; i < nx; ++i)
      if (bits & (u64{1} << i)) subset.push_back(extras[i]);
    std::sort(subset.begin(), subset.end());
    if (subset_valid(net, query, s, subset, false)) return false;
  }
  return true;
}

QueryResult greedy_baseline(const SpatialSocialNetwork& net, const QuerySpec& query) {
  const i64 t0 = now_nanos();
  const SocialNetwork& soc = net.social;
  QueryResult result;

  // Breadth-first within d-1 hops of q; every reached user is one visit.
  std::vector<int> dist(soc.users.size(), kInfHops);
  std::queue<int> bfs;
  dist[query.q] = 0;
  bfs.push(query.q);
  std::vector<int> reached;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    reached.push_back(u);
    for (int v : soc.und_adj[u]) {
      if (dist[v] != kInfHops || dist[u] + 1 >= query.d) continue;
      dist[v] = dist[u] + 1;
      bfs.push(v);
    }
  }
  result.stats.nodes_visited = static_cast<i64>(reached.size());

  std::vector<int> qk = query.keywords;
  std::sort(qk.begin(), qk.end());
  KeywordBits qbits(soc.bits_width);
  for (int k : qk) qbits.insert(k);
  RoadRowCache road(net.road);
  std::vector<int> candidates;
  for (int u : reached) {
    if (u == query.q) continue;
    if (!keyword_overlap(soc.users[u], qk, qbits)) continue;
    if (road.avg_dist(soc.users[query.q], soc.users[u]) >= query.sigma) continue;
    candidates.push_back(u);
  }
  candidates.push_back(query.q);
  std::sort(candidates.begin(), candidates.end());
  result.stats.candidates_after_pruning = static_cast<i64>(candidates.size());

  result.community = refine(net, query, candidates, result.stats);
  result.stats.cpu_nanos = now_nanos() - t0;
  return result;
}

QueryResult sindex_baseline(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                            const QuerySpec& query, PruneMode mode) {
  if (idx.cfg.flavor != IndexFlavor::social_only)
    throw std::invalid_argument("sindex_baseline needs a social_only index");
  return answer_query(net, idx, query, mode);
}

QueryResult rindex_baseline(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                            const QuerySpec& query, PruneMode mode) {
  if (idx.cfg.flavor != IndexFlavor::spatial_only)
    throw std::invalid_argument("rindex_baseline needs a spatial_only index");
  return answer_query(net, idx, query, mode);
}

}  // namespace sstruss
