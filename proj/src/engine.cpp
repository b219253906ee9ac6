#include "sstruss/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <set>

namespace sstruss {

namespace {

i64 now_nanos() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// BFS hop row over the full friendship graph.
std::vector<int> hop_row(const SocialNetwork& soc, int src) {
  std::vector<int> dist(soc.users.size(), kInfHops);
  std::queue<int> bfs;
  dist[src] = 0;
  bfs.push(src);
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int v : soc.und_adj[u]) {
      if (dist[v] == kInfHops) {
        dist[v] = dist[u] + 1;
        bfs.push(v);
      }
    }
  }
  return dist;
}

}  // namespace

CommunityCertificate check_community(const SpatialSocialNetwork& net, const QuerySpec& query,
                                     const std::vector<int>& members,
                                     RoadRowCache* shared_cache) {
  const SocialNetwork& soc = net.social;
  CommunityCertificate cert;
  auto fail = [&cert](const char* clause) {
    if (std::find(cert.failing.begin(), cert.failing.end(), clause) == cert.failing.end())
      cert.failing.emplace_back(clause);
  };

  std::vector<int> s = members;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  const int n = static_cast<int>(s.size());
  if (n == 0 || !std::binary_search(s.begin(), s.end(), query.q)) {
    fail("membership");
    return cert;
  }

  std::vector<int> qk = query.keywords;
  std::sort(qk.begin(), qk.end());
  KeywordBits qbits(soc.bits_width);
  for (int k : qk) qbits.insert(k);
  cert.keywords_ok = true;
  for (int u : s) {
    if (!keyword_overlap(soc.users[u], qk, qbits)) {
      cert.keywords_ok = false;
      fail("keywords");
      break;
    }
  }

  std::vector<int> pos(soc.users.size(), -1);
  for (int i = 0; i < n; ++i) pos[s[i]] = i;

  // Connectivity inside the induced friendship subgraph.
  {
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    seen[pos[query.q]] = 1;
    bfs.push(query.q);
    int reached = 1;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int v : soc.und_adj[u]) {
        if (pos[v] >= 0 && !seen[pos[v]]) {
          seen[pos[v]] = 1;
          ++reached;
          bfs.push(v);
        }
      }
    }
    cert.connected = reached == n;
    if (!cert.connected) fail("connected");
  }

  // Edge support: every induced edge sits in >= k-2 triangles inside the set.
  {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int v : soc.und_adj[s[i]])
        if (pos[v] > i) edges.emplace_back(i, pos[v]);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (auto [a, b] : edges) adj[a][b] = adj[b][a] = 1;
    cert.support_min = edges.empty() ? 0 : n;
    for (auto [a, b] : edges) {
      int sup = 0;
      for (int c = 0; c < n; ++c)
        if (adj[a][c] && adj[b][c]) ++sup;
      cert.support_min = std::min(cert.support_min, sup);
    }
    if (edges.empty()) {
      cert.vacuous = true;
      cert.support_min = 0;
      if (n > 1 || query.k > 2) fail("support");
    } else if (cert.support_min < query.k - 2) {
      fail("support");
    }
  }

  // Pairwise hops on the full graph.
  cert.hop_max = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> row = hop_row(soc, s[i]);
    for (int j = i + 1; j < n; ++j) cert.hop_max = std::max(cert.hop_max, row[s[j]]);
  }
  if (cert.hop_max >= query.d) fail("hops");

  // Pairwise mean road distance between check-in sets.
  cert.spatial_max = 0.0;
  {
    RoadRowCache local(net.road);
    RoadRowCache& cache = shared_cache ? *shared_cache : local;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        cert.spatial_max =
            std::max(cert.spatial_max, cache.avg_dist(soc.users[s[i]], soc.users[s[j]]));
  }
  if (cert.spatial_max >= query.sigma) fail("spatial");

  // Mutual influence: max-product closure of the direct-arc matrix restricted
  // to the set. Factors lie in [0,1], so the closure over walks equals the
  // best simple path and n rounds suffice.
  cert.influence_min = 1.0;
  {
    std::vector<std::vector<double>> f(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      f[i][i] = 1.0;
      for (auto [v, e] : soc.out_adj[s[i]])
        if (pos[v] >= 0) f[i][pos[v]] = edge_influence(soc.edges[e].weights, query.topics);
    }
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f[i][j] = std::max(f[i][j], f[i][m] * f[m][j]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) cert.influence_min = std::min(cert.influence_min, f[i][j]);
  }
  if (n > 1 && cert.influence_min < query.theta) fail("influence");

  cert.valid = cert.failing.empty();
  return cert;
}

std::vector<int> collect_candidates(const SpatialSocialNetwork& net,
                                    const SocialSpatialIndex& idx, const BoundsContext& ctx,
                                    QueryStats& stats) {
  const RuleMask mask = rule_mask_for(idx.cfg.flavor);
  std::vector<int> candidates;
  // Min-heap on (spatial lower bound, node id); the id tiebreak keeps pop
  // order deterministic.
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      heap;
  heap.emplace(0.0, idx.root);
  while (!heap.empty()) {
    auto [key, id] = heap.top();
    heap.pop();
    ++stats.nodes_visited;
    if (mask.spatial && key > ctx.query.sigma) break;
    const IndexNode& node = idx.nodes[id];
    if (node.is_leaf) {
      for (int u : node.users) {
        if (u == ctx.query.q) continue;
        if (!user_prune(ctx, u, mask).pruned()) candidates.push_back(u);
      }
    } else {
      for (int child : node.children) {
        if (node_prune(ctx, child, mask).pruned()) continue;
        double lb = mask.spatial ? node_spatial_lb(ctx, idx.nodes[child]) : 0.0;
        heap.emplace(lb, child);
      }
    }
  }
  candidates.push_back(ctx.query.q);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  stats.candidates_after_pruning = static_cast<i64>(candidates.size());
  return candidates;
}

namespace {

// Shared scratch for refine: memoized exact pairwise measures.
struct RefineCache {
  const SpatialSocialNetwork& net;
  const QuerySpec& query;
  RoadRowCache road;
  std::map<int, std::vector<int>> hops;  // full-graph BFS rows
  std::map<std::pair<int, int>, double> avg;

  explicit RefineCache(const SpatialSocialNetwork& n, const QuerySpec& q)
      : net(n), query(q), road(n.road) {}

  const std::vector<int>& hop(int u) {
    auto it = hops.find(u);
    if (it == hops.end()) it = hops.emplace(u, hop_row(net.social, u)).first;
    return it->second;
  }

  double avg_dist(int u, int v) {
    auto key = std::minmax(u, v);
    auto it = avg.find(key);
    if (it == avg.end())
      it = avg.emplace(key, road.avg_dist(net.social.users[u], net.social.users[v])).first;
    return it->second;
  }
};

}  // namespace

Community refine(const SpatialSocialNetwork& net, const QuerySpec& query,
                 const std::vector<int>& candidates, QueryStats& stats) {
  const SocialNetwork& soc = net.social;
  const int m = static_cast<int>(soc.users.size());
  RefineCache cache(net, query);

  std::vector<int> qk = query.keywords;
  std::sort(qk.begin(), qk.end());
  KeywordBits qbits(soc.bits_width);
  for (int k : qk) qbits.insert(k);
  auto kw_ok = [&](int u) { return keyword_overlap(soc.users[u], qk, qbits); };

  std::set<int> working(candidates.begin(), candidates.end());
  working.insert(query.q);
  auto drop_all = [&](const std::vector<int>& drops) {
    for (int u : drops) working.erase(u);
  };

  std::vector<char> mask(m, 0);
  auto refresh_mask = [&] {
    std::fill(mask.begin(), mask.end(), 0);
    for (int u : working) mask[u] = 1;
  };

  while (true) {
    // Phase A: simultaneous removals to fixpoint.
    while (true) {
      ++stats.peel_iterations;
      std::vector<int> drops;
      for (int u : working) {
        if (u == query.q) continue;
        if (!kw_ok(u)) {
          drops.push_back(u);
          continue;
        }
        if (cache.avg_dist(query.q, u) >= query.sigma || cache.hop(query.q)[u] >= query.d)
          drops.push_back(u);
      }
      if (drops.empty()) {
        refresh_mask();
        std::vector<double> from_q = influence_from(soc, query.q, query.topics, &mask);
        std::vector<double> to_q = influence_to(soc, query.q, query.topics, &mask);
        for (int u : working)
          if (u != query.q && (from_q[u] < query.theta || to_q[u] < query.theta))
            drops.push_back(u);
      }
      if (!drops.empty()) {
        drop_all(drops);
        continue;
      }
      // Truss peel at k, then keep only the q-side component of what remains.
      std::vector<int> sub(working.begin(), working.end());
      std::vector<std::pair<int, int>> peeled = truss_peel(soc, sub, query.k);
      std::vector<std::vector<int>> adj(m);
      for (const auto& [a, b] : peeled) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
      std::vector<char> reach(m, 0);
      std::queue<int> bfs;
      reach[query.q] = 1;
      bfs.push(query.q);
      while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int v : adj[u])
          if (!reach[v]) {
            reach[v] = 1;
            bfs.push(v);
          }
      }
      for (int u : working)
        if (u != query.q && !reach[u]) drops.push_back(u);
      if (drops.empty()) break;
      drop_all(drops);
    }

    // Phase B: one worst offender among non-q pairwise violations, then loop.
    refresh_mask();
    std::vector<int> members(working.begin(), working.end());
    std::map<int, std::vector<double>> inf_rows;
    for (int u : members)
      if (u != query.q) inf_rows.emplace(u, influence_from(soc, u, query.topics, &mask));
    std::map<int, int> viol;
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        int u = members[i], v = members[j];
        if (u == query.q || v == query.q) continue;
        bool bad = cache.avg_dist(u, v) >= query.sigma || cache.hop(u)[v] >= query.d ||
                   inf_rows.at(u)[v] < query.theta || inf_rows.at(v)[u] < query.theta;
        if (bad) {
          ++viol[u];
          ++viol[v];
        }
      }
    }
    // Induced support: every friendship edge inside the working set must close
    // >= k-2 triangles inside it. The phase-A peel bounds this from the
    // edge-subgraph side only; a pair each kept through other edges can still
    // carry an under-supported induced edge, which the certificate counts.
    for (int u : members) {
      for (int v : soc.und_adj[u]) {
        if (v <= u || !mask[v]) continue;
        int common = 0;
        for (int w : soc.und_adj[u])
          if (mask[w] && w != v &&
              std::find(soc.und_adj[v].begin(), soc.und_adj[v].end(), w) != soc.und_adj[v].end())
            ++common;
        if (common < query.k - 2) {
          if (u != query.q) ++viol[u];
          if (v != query.q) ++viol[v];
        }
      }
    }
    if (viol.empty()) break;
    int victim = -1, worst = -1;
    for (auto [u, c] : viol)
      if (c > worst || (c == worst && u > victim)) {
        victim = u;
        worst = c;
      }
    drop_all({victim});
    ++stats.peel_iterations;
  }

  // Completion: grow back to a maximal set. Any non-member is a re-admission
  // candidate if it passes every check that a member of a valid superset must
  // pass: keyword overlap, whole-graph mutual influence with q (an upper
  // bound on the within-set score), static compatibility with every survivor,
  // and survival of a truss peel over the pooled vertices (a superset of any
  // candidate community, so its maximal truss contains every community's
  // edges). Among those, the largest jointly valid subset (checked
  // exhaustively when small) is re-admitted, repeating until stable. The
  // filters are exact, index-free, and scan the whole user set, so every
  // answerer that reaches the same working set re-admits the same users. The
  // two cheap filters run first and leave few survivors for the static loop.
  RoadRowCache check_cache(net.road);
  const std::vector<double> full_from_q = influence_from(soc, query.q, query.topics);
  const std::vector<double> full_to_q = influence_to(soc, query.q, query.topics);
  while (true) {
    std::vector<int> members(working.begin(), working.end());
    std::vector<int> x_pre;
    for (int cand = 0; cand < m; ++cand) {
      if (working.count(cand)) continue;
      if (!kw_ok(cand)) continue;
      if (full_from_q[cand] < query.theta || full_to_q[cand] < query.theta) continue;
      bool ok = true;
      for (int s : members) {
        if (cache.hop(cand)[s] >= query.d || cache.avg_dist(cand, s) >= query.sigma) {
          ok = false;
          break;
        }
      }
      if (ok) x_pre.push_back(cand);
    }
    std::vector<int> x;
    if (!x_pre.empty()) {
      std::vector<int> pooled = members;
      pooled.insert(pooled.end(), x_pre.begin(), x_pre.end());
      std::sort(pooled.begin(), pooled.end());
      std::vector<std::pair<int, int>> pool_truss = truss_peel(soc, pooled, query.k);
      std::vector<char> kept(m, 0);
      for (const auto& [a, b] : pool_truss) {
        kept[a] = 1;
        kept[b] = 1;
      }
      for (int cand : x_pre)
        if (kept[cand]) x.push_back(cand);
    }
    std::vector<int> adopted;
    auto try_set = [&](const std::vector<int>& ext) {
      std::vector<int> probe = members;
      probe.insert(probe.end(), ext.begin(), ext.end());
      return check_community(net, query, probe, &check_cache).valid;
    };
    if (static_cast<int>(x.size()) <= 16) {
      const int nx = static_cast<int>(x.size());
      for (int size = nx; size >= 1 && adopted.empty(); --size) {
        std::vector<int> pick(size);
        for (int i = 0; i < size; ++i) pick[i] = i;
        while (true) {
          std::vector<int> ext(size);
          for (int i = 0; i < size; ++i) ext[i] = x[pick[i]];
          if (try_set(ext)) {
            adopted = ext;
            break;
          }
          int i = size - 1;
          while (i >= 0 && pick[i] == nx - size + i) --i;
          if (i < 0) break;
          ++pick[i];
          for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
        }
      }
    } else {
      for (int cand : x)
        if (try_set({cand})) {
          adopted = {cand};
          break;
        }
    }
    if (adopted.empty()) break;
    for (int u : adopted) working.insert(u);
  }

  Community out;
  out.members.assign(working.begin(), working.end());
  out.cert = check_community(net, query, out.members, &check_cache);
  stats.result_size = static_cast<i64>(out.members.size());
  return out;
}

QueryResult answer_query(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                         const QuerySpec& query, PruneMode mode) {
  const i64 t0 = now_nanos();
  QueryResult result;
  BoundsContext ctx = make_bounds_context(net, idx, query, mode);
  std::vector<int> candidates = collect_candidates(net, idx, ctx, result.stats);
  result.community = refine(net, query, candidates, result.stats);
  result.stats.cpu_nanos = now_nanos() - t0;
  return result;
}

std::vector<QueryResult> answer_batch(const SpatialSocialNetwork& net,
                                      const SocialSpatialIndex& idx,
                                      const std::vector<QuerySpec>& queries, PruneMode mode) {
  const int nq = static_cast<int>(queries.size());
  std::vector<QueryResult> results(nq);
  if (nq == 0) return results;

  const i64 t0 = now_nanos();
  const RuleMask mask = rule_mask_for(idx.cfg.flavor);
  std::vector<BoundsContext> ctxs;
  ctxs.reserve(nq);
  for (const QuerySpec& q : queries) ctxs.push_back(make_bounds_context(net, idx, q, mode));

  // One traversal: an entry carries the queries still interested in its node.
  struct Entry {
    double key;
    int node;
    std::vector<char> alive;
  };
  auto order = [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key > b.key : a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(order)> heap(order);
  heap.push({0.0, idx.root, std::vector<char>(nq, 1)});

  std::vector<std::vector<int>> cands(nq);
  i64 nodes_visited = 0;
  while (!heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    ++nodes_visited;
    const IndexNode& node = idx.nodes[top.node];
    if (node.is_leaf) {
      for (int qi = 0; qi < nq; ++qi) {
        if (!top.alive[qi]) continue;
        for (int u : node.users) {
          if (u == queries[qi].q) continue;
          if (!user_prune(ctxs[qi], u, mask).pruned()) cands[qi].push_back(u);
        }
      }
    } else {
      for (int child : node.children) {
        Entry next{kInfDist, child, std::vector<char>(nq, 0)};
        bool any = false;
        for (int qi = 0; qi < nq; ++qi) {
          if (!top.alive[qi]) continue;
          if (node_prune(ctxs[qi], child, mask).pruned()) continue;
          next.alive[qi] = 1;
          any = true;
          double lb = mask.spatial ? node_spatial_lb(ctxs[qi], idx.nodes[child]) : 0.0;
          next.key = std::min(next.key, lb);
        }
        if (any) heap.push(std::move(next));
      }
    }
  }
  const i64 traversal_nanos = now_nanos() - t0;

  for (int qi = 0; qi < nq; ++qi) {
    const i64 t1 = now_nanos();
    cands[qi].push_back(queries[qi].q);
    std::sort(cands[qi].begin(), cands[qi].end());
    cands[qi].erase(std::unique(cands[qi].begin(), cands[qi].end()), cands[qi].end());
    results[qi].stats.nodes_visited = nodes_visited;
    results[qi].stats.candidates_after_pruning = static_cast<i64>(cands[qi].size());
    results[qi].community = refine(net, queries[qi], cands[qi], results[qi].stats);
    results[qi].stats.cpu_nanos = traversal_nanos + (now_nanos() - t1);
  }
  return results;
}

}  // namespace sstruss
