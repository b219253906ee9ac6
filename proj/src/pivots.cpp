#include "sstruss/pivots.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sstruss {

std::vector<double> user_avg_dist_column(const SpatialSocialNetwork& net, int road_vertex) {
  std::vector<double> row = road_shortest_paths(net.road, road_vertex);
  int m = net.social.user_count();
  std::vector<double> col(m, 0.0);
  for (int u = 0; u < m; ++u) {
    const auto& cs = net.social.users[u].checkins;
    double sum = 0.0;
    for (const CheckIn& c : cs) sum += row[c.road_vertex];
    col[u] = sum / static_cast<double>(cs.size());
  }
  return col;
}

std::vector<double> user_user_avg_column(const SpatialSocialNetwork& net, int pivot_user) {
  const auto& pcs = net.social.users[pivot_user].checkins;
  int m = net.social.user_count();
  std::vector<double> acc(m, 0.0);
  for (const CheckIn& c : pcs) {
    std::vector<double> col = user_avg_dist_column(net, c.road_vertex);
    for (int u = 0; u < m; ++u) acc[u] += col[u];
  }
  for (double& x : acc) x /= static_cast<double>(pcs.size());
  return acc;
}

std::vector<std::pair<int, int>> sample_user_pairs(int user_count, int budget, Rng& rng) {
  std::vector<std::pair<int, int>> pairs;
  i64 all = static_cast<i64>(user_count) * (user_count - 1);
  if (all <= budget) {
    for (int u = 0; u < user_count; ++u)
      for (int v = 0; v < user_count; ++v)
        if (u != v) pairs.push_back({u, v});
    return pairs;
  }
  std::set<std::pair<int, int>> seen;
  while (static_cast<int>(pairs.size()) < budget) {
    int u = static_cast<int>(rng.below(user_count));
    int v = static_cast<int>(rng.below(user_count));
    if (u == v) continue;
    if (seen.insert({u, v}).second) pairs.push_back({u, v});
  }
  return pairs;
}

namespace {

double road_spread(const std::vector<std::vector<double>>& cols,
                   const std::vector<std::pair<int, int>>& pairs) {
  double total = 0.0;
  for (auto [u, v] : pairs) {
    double best = 0.0;
    for (const auto& col : cols) best = std::max(best, std::abs(col[u] - col[v]));
    total += best;
  }
  return total;
}

std::vector<int> capped_hops(std::vector<int> col) {
  int max_fin = 0;
  for (int x : col)
    if (x != kInfHops) max_fin = std::max(max_fin, x);
  for (int& x : col)
    if (x == kInfHops) x = max_fin + 1;
  return col;
}

double social_spread(const std::vector<std::vector<int>>& capped_cols,
                     const std::vector<std::pair<int, int>>& pairs) {
  double total = 0.0;
  for (auto [u, v] : pairs) {
    int best = 0;
    for (const auto& col : capped_cols) best = std::max(best, std::abs(col[u] - col[v]));
    total += best;
  }
  return total;
}

}  // namespace

double cost_road_pivots(const SpatialSocialNetwork& net, const std::vector<int>& pivots,
                        const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::vector<double>> cols;
  cols.reserve(pivots.size());
  for (int p : pivots) cols.push_back(user_avg_dist_column(net, p));
  return road_spread(cols, pairs);
}

double cost_social_pivots(const SocialNetwork& soc, const std::vector<int>& pivots,
                          const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::vector<int>> cols;
  cols.reserve(pivots.size());
  for (int p : pivots) cols.push_back(capped_hops(social_hops(soc, p)));
  return social_spread(cols, pairs);
}

QualityMeasures subgraph_quality_measures(const SpatialSocialNetwork& net,
                                          const std::vector<int>& assignment, int group_count) {
  int m = net.social.user_count();
  std::vector<std::vector<int>> groups(group_count);
  for (int u = 0; u < m; ++u) groups[assignment[u]].push_back(u);

  EdgeSupportMap supports = compute_supports(net.social);
  std::vector<double> topics(net.social.topic_count,
                             1.0 / static_cast<double>(net.social.topic_count));

  QualityMeasures q;
  RoadRowCache cache(net.road);
  for (const auto& g : groups) {
    for (int u : g) {
      std::vector<int> hops = social_hops(net.social, u);
      std::vector<double> inf = influence_from(net.social, u, topics);
      for (int v : g) {
        if (u == v) continue;
        q.sc += cache.avg_dist(net.social.users[u], net.social.users[v]);
        if (hops[v] != kInfHops && hops[v] > 0)
          q.st += static_cast<double>(supports.phi[u] + supports.phi[v]) / hops[v];
        q.inf += inf[v];
      }
    }
  }
  return q;
}

double cost_index_pivots(const QualityMeasures& raw, const QualityMeasures& lo,
                         const QualityMeasures& hi, const PivotSearchConfig& cfg) {
  auto norm = [](double x, double a, double b) {
    if (b <= a) return 0.0;
    return std::clamp((x - a) / (b - a), 0.0, 1.0);
  };
  double sc = norm(raw.sc, lo.sc, hi.sc);
  double st = norm(raw.st, lo.st, hi.st);
  double inf = norm(raw.inf, lo.inf, hi.inf);
  return cfg.w1 * sc + cfg.w2 * (1.0 - st) + cfg.w3 * (1.0 - inf);
}

namespace {

// Shared scratch for one search run: per-pivot columns and per-pair metrics
// are computed once and reused across swap evaluations.
struct SearchCache {
  const SpatialSocialNetwork* net;
  std::map<int, std::vector<double>> road_cols;      // road vertex -> A column
  std::map<int, std::vector<int>> hop_cols;          // user -> capped hop column
  std::map<int, std::vector<double>> user_avg_cols;  // user -> avg dist column
  std::map<int, std::vector<int>> raw_hop_cols;      // user -> raw hop column

  const std::vector<double>& road_col(int v) {
    auto it = road_cols.find(v);
    if (it == road_cols.end())
      it = road_cols.emplace(v, user_avg_dist_column(*net, v)).first;
    return it->second;
  }
  const std::vector<int>& hop_col(int u) {
    auto it = hop_cols.find(u);
    if (it == hop_cols.end())
      it = hop_cols.emplace(u, capped_hops(social_hops(net->social, u))).first;
    return it->second;
  }
  const std::vector<double>& user_avg_col(int u) {
    auto it = user_avg_cols.find(u);
    if (it == user_avg_cols.end())
      it = user_avg_cols.emplace(u, user_user_avg_column(*net, u)).first;
    return it->second;
  }
  const std::vector<int>& raw_hop_col(int u) {
    auto it = raw_hop_cols.find(u);
    if (it == raw_hop_cols.end())
      it = raw_hop_cols.emplace(u, social_hops(net->social, u)).first;
    return it->second;
  }
};

struct PairMetrics {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> avg_dist, inf;
  std::vector<int> hops, phi_sum;
};

PairMetrics compute_pair_metrics(const SpatialSocialNetwork& net,
                                 const std::vector<std::pair<int, int>>& pairs) {
  PairMetrics pm;
  pm.pairs = pairs;
  pm.avg_dist.resize(pairs.size());
  pm.inf.resize(pairs.size());
  pm.hops.resize(pairs.size());
  pm.phi_sum.resize(pairs.size());

  EdgeSupportMap supports = compute_supports(net.social);
  std::vector<double> topics(net.social.topic_count,
                             1.0 / static_cast<double>(net.social.topic_count));

  // group by source so per-source sweeps are shared
  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&pairs](size_t a, size_t b) { return pairs[a].first < pairs[b].first; });

  int cur = -1;
  std::vector<double> avg_col, inf_row;
  std::vector<int> hop_row;
  for (size_t i : order) {
    auto [u, v] = pairs[i];
    if (u != cur) {
      cur = u;
      avg_col = user_user_avg_column(net, u);
      hop_row = social_hops(net.social, u);
      inf_row = influence_from(net.social, u, topics);
    }
    pm.avg_dist[i] = avg_col[v];
    pm.hops[i] = hop_row[v];
    pm.inf[i] = inf_row[v];
    pm.phi_sum[i] = supports.phi[u] + supports.phi[v];
  }
  return pm;
}

// Sampled analogue of subgraph_quality_measures for one candidate partition.
QualityMeasures sampled_measures(const PairMetrics& pm, const std::vector<int>& assignment) {
  QualityMeasures q;
  for (size_t i = 0; i < pm.pairs.size(); ++i) {
    auto [u, v] = pm.pairs[i];
    if (assignment[u] != assignment[v]) continue;
    q.sc += pm.avg_dist[i];
    if (pm.hops[i] != kInfHops && pm.hops[i] > 0)
      q.st += static_cast<double>(pm.phi_sum[i]) / pm.hops[i];
    q.inf += pm.inf[i];
  }
  return q;
}

std::vector<int> assign_to_pivots(const SpatialSocialNetwork& net,
                                  const std::vector<int>& pivot_users, SearchCache& cache,
                                  QualityTerms terms) {
  int m = net.social.user_count();
  int iota = static_cast<int>(pivot_users.size());

  double max_avg = 0.0;
  int max_hop = 0;
  for (int p : pivot_users) {
    for (double x : cache.user_avg_col(p)) max_avg = std::max(max_avg, x);
    for (int x : cache.raw_hop_col(p))
      if (x != kInfHops) max_hop = std::max(max_hop, x);
  }
  if (max_avg <= 0.0) max_avg = 1.0;
  if (max_hop <= 0) max_hop = 1;

  std::vector<int> assignment(m, 0);
  for (int u = 0; u < m; ++u) {
    double best = kInfDist;
    int best_i = 0;
    for (int i = 0; i < iota; ++i) {
      int p = pivot_users[i];
      double quality = 0.0;
      if (terms != QualityTerms::social_term)
        quality += cache.user_avg_col(p)[u] / max_avg;
      if (terms != QualityTerms::road_term) {
        int hop = cache.raw_hop_col(p)[u];
        quality += hop == kInfHops ? kInfDist : static_cast<double>(hop) / max_hop;
      }
      if (quality < best) {
        best = quality;
        best_i = i;
      }
    }
    assignment[u] = best_i;
  }
  return assignment;
}

std::vector<int> random_distinct(int domain, int count, Rng& rng) {
  std::set<int> chosen;
  while (static_cast<int>(chosen.size()) < count)
    chosen.insert(static_cast<int>(rng.below(domain)));
  return std::vector<int>(chosen.begin(), chosen.end());
}

}  // namespace

std::vector<int> gen_subgraphs(const SpatialSocialNetwork& net,
                               const std::vector<int>& pivot_users, QualityTerms terms) {
  SearchCache cache{&net};
  return assign_to_pivots(net, pivot_users, cache, terms);
}

PivotSelection select_pivots(const SpatialSocialNetwork& net, PivotKind kind, int count,
                             const PivotSearchConfig& cfg) {
  int domain = kind == PivotKind::road ? net.road.vertex_count() : net.social.user_count();
  if (count > domain) throw std::invalid_argument("pivot count exceeds candidate domain");

  Rng rng(cfg.rng_seed ^ (static_cast<u64>(kind) + 1) * 0x517cc1b727220a95ULL);
  SearchCache cache{&net};
  std::vector<std::pair<int, int>> pairs =
      sample_user_pairs(net.social.user_count(), cfg.sample_pairs, rng);

  bool minimize = kind == PivotKind::index ||
                  (kind == PivotKind::road && cfg.literal_road_cost);

  PairMetrics pm;
  if (kind == PivotKind::index) pm = compute_pair_metrics(net, pairs);

  // Index cost needs min-max normalization bounds fixed before comparisons;
  // the restarts' initial partitions serve as the probe set.
  std::vector<std::vector<int>> initial(cfg.global_iter);
  for (int r = 0; r < cfg.global_iter; ++r) initial[r] = random_distinct(domain, count, rng);

  QualityMeasures lo, hi;
  if (kind == PivotKind::index) {
    bool first = true;
    for (const auto& set : initial) {
      std::vector<int> assignment = assign_to_pivots(net, set, cache, cfg.terms);
      QualityMeasures q = sampled_measures(pm, assignment);
      if (first) {
        lo = hi = q;
        first = false;
      } else {
        lo.sc = std::min(lo.sc, q.sc);
        lo.st = std::min(lo.st, q.st);
        lo.inf = std::min(lo.inf, q.inf);
        hi.sc = std::max(hi.sc, q.sc);
        hi.st = std::max(hi.st, q.st);
        hi.inf = std::max(hi.inf, q.inf);
      }
    }
  }

  auto evaluate = [&](const std::vector<int>& set) {
    switch (kind) {
      case PivotKind::road: {
        std::vector<std::vector<double>> cols;
        for (int p : set) cols.push_back(cache.road_col(p));
        return road_spread(cols, pairs);
      }
      case PivotKind::social: {
        std::vector<std::vector<int>> cols;
        for (int p : set) cols.push_back(cache.hop_col(p));
        return social_spread(cols, pairs);
      }
      case PivotKind::index: {
        std::vector<int> assignment = assign_to_pivots(net, set, cache, cfg.terms);
        return cost_index_pivots(sampled_measures(pm, assignment), lo, hi, cfg);
      }
    }
    return 0.0;
  };
  auto better = [minimize](double a, double b) { return minimize ? a < b : a > b; };

  PivotSelection best;
  bool have_best = false;
  for (int r = 0; r < cfg.global_iter; ++r) {
    std::vector<int> cur = initial[r];
    double cur_cost = evaluate(cur);
    for (int it = 0; it < cfg.swap_iter; ++it) {
      int pos = static_cast<int>(rng.below(count));
      int cand = static_cast<int>(rng.below(domain));
      if (std::find(cur.begin(), cur.end(), cand) != cur.end()) continue;
      std::vector<int> alt = cur;
      alt[pos] = cand;
      double alt_cost = evaluate(alt);
      if (better(alt_cost, cur_cost)) {
        cur = std::move(alt);
        cur_cost = alt_cost;
      }
    }
    if (!have_best || better(cur_cost, best.cost)) {
      best.set = {kind, cur};
      best.cost = cur_cost;
      have_best = true;
    }
  }
  std::sort(best.set.ids.begin(), best.set.ids.end());
  return best;
}

PivotDistanceTables build_distance_tables(const SpatialSocialNetwork& net,
                                          const std::vector<int>& road_pivots,
                                          const std::vector<int>& social_pivots) {
  PivotDistanceTables t;
  int m = net.social.user_count();
  t.l = static_cast<int>(road_pivots.size());
  t.h = static_cast<int>(social_pivots.size());
  t.road.assign(static_cast<size_t>(m) * t.l, 0.0);
  t.social.assign(static_cast<size_t>(m) * t.h, 0);
  for (int k = 0; k < t.l; ++k) {
    std::vector<double> col = user_avg_dist_column(net, road_pivots[k]);
    for (int u = 0; u < m; ++u) t.road[static_cast<size_t>(u) * t.l + k] = col[u];
  }
  for (int k = 0; k < t.h; ++k) {
    std::vector<int> col = social_hops(net.social, social_pivots[k]);
    for (int u = 0; u < m; ++u) t.social[static_cast<size_t>(u) * t.h + k] = col[u];
  }
  return t;
}

}  // namespace sstruss
