#include "sstruss/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sstruss {

namespace {

constexpr u64 kRoadSalt = 0x726f61640a0a0a0aULL;
constexpr u64 kSocialSalt = 0x736f63690a0a0a0aULL;

double draw_unit(Rng& rng, GenDistribution dist) {
  if (dist == GenDistribution::uniform) return rng.unit();
  // Gaussian variant: mean at the range midpoint, stddev range/6, clamped.
  return std::clamp(0.5 + rng.gauss() / 6.0, 0.0, 1.0);
}

int draw_count(Rng& rng, GenDistribution dist, int lo, int hi) {
  if (lo >= hi) return lo;
  if (dist == GenDistribution::uniform) return lo + static_cast<int>(rng.below(hi - lo + 1));
  double mid = 0.5 * (lo + hi);
  double sd = (hi - lo) / 6.0;
  int v = static_cast<int>(std::lround(mid + rng.gauss() * sd));
  return std::clamp(v, lo, hi);
}

void check_counts(const GenConfig& cfg) {
  if (cfg.n_road < 2) throw std::invalid_argument("n_road must be >= 2");
  if (cfg.n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (cfg.topic_count < 1) throw std::invalid_argument("topic_count must be >= 1");
  if (cfg.keyword_universe < 1) throw std::invalid_argument("keyword_universe must be >= 1");
  if (cfg.degree_min < 1 || cfg.degree_max < cfg.degree_min)
    throw std::invalid_argument("degree range must satisfy 1 <= min <= max");
  if (cfg.checkins_min < 1 || cfg.checkins_max < cfg.checkins_min)
    throw std::invalid_argument("check-in range must satisfy 1 <= min <= max");
  if (cfg.keywords_min < 1 || cfg.keywords_max < cfg.keywords_min)
    throw std::invalid_argument("keyword range must satisfy 1 <= min <= max");
}

// Uniform bucket grid over the unit square for nearest-point queries.
struct PointGrid {
  int g = 1;
  double cell = 1.0;
  const std::vector<double>& xs;
  const std::vector<double>& ys;
  std::vector<std::vector<int>> buckets;

  PointGrid(const std::vector<double>& x, const std::vector<double>& y) : xs(x), ys(y) {
    g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(x.size()))));
    cell = 1.0 / g;
    buckets.assign(static_cast<size_t>(g) * g, {});
    for (int i = 0; i < static_cast<int>(x.size()); ++i)
      buckets[bucket_of(xs[i], ys[i])].push_back(i);
  }

  int coord(double v) const {
    return std::clamp(static_cast<int>(v / cell), 0, g - 1);
  }
  size_t bucket_of(double x, double y) const {
    return static_cast<size_t>(coord(y)) * g + coord(x);
  }

  // Nearest point to i among those satisfying keep; ties broken by smaller
  // id. Scans cell rings outward; a ring at distance r holds no point closer
  // than (r-1)*cell, so the scan stops once the best found beats the ring.
  template <class Pred>
  int nearest(int i, Pred&& keep) const {
    const int bx = coord(xs[i]), by = coord(ys[i]);
    double best = kInfDist;
    int best_id = -1;
    auto scan = [&](int cx, int cy) {
      if (cx < 0 || cx >= g || cy < 0 || cy >= g) return;
      for (int j : buckets[static_cast<size_t>(cy) * g + cx]) {
        if (j == i || !keep(j)) continue;
        double d = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
        if (d < best || (d == best && j < best_id)) {
          best = d;
          best_id = j;
        }
      }
    };
    for (int r = 0; r < 2 * g; ++r) {
      if (best_id >= 0 && best <= static_cast<double>(r - 1) * cell) break;
      if (r == 0) {
        scan(bx, by);
        continue;
      }
      for (int dx = -r; dx <= r; ++dx) {
        scan(bx + dx, by - r);
        scan(bx + dx, by + r);
      }
      for (int dy = -r + 1; dy <= r - 1; ++dy) {
        scan(bx - r, by + dy);
        scan(bx + r, by + dy);
      }
    }
    return best_id;
  }
};

struct Dsu {
  std::vector<int> parent, size;
  explicit Dsu(int n) : parent(n), size(n, 1) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    return true;
  }
};

}  // namespace

RoadNetwork gen_road(const GenConfig& cfg) {
  check_counts(cfg);
  Rng rng(cfg.rng_seed ^ kRoadSalt);
  const int n = cfg.n_road;

  // Distinct points so every edge has positive length.
  std::vector<double> xs(n), ys(n);
  std::set<std::pair<double, double>> seen;
  for (int i = 0; i < n; ++i) {
    do {
      xs[i] = draw_unit(rng, cfg.distribution);
      ys[i] = draw_unit(rng, cfg.distribution);
    } while (!seen.insert({xs[i], ys[i]}).second);
  }
  PointGrid grid(xs, ys);

  std::set<std::pair<int, int>> edge_set;
  auto canon = [](int a, int b) -> std::pair<int, int> { return std::minmax(a, b); };
  std::vector<int> degree(n, 0);
  auto add = [&](int a, int b) {
    if (edge_set.insert(canon(a, b)).second) {
      ++degree[a];
      ++degree[b];
      return true;
    }
    return false;
  };

  // Two nearest-neighbor proposals per vertex.
  for (int i = 0; i < n; ++i) {
    int first = grid.nearest(i, [](int) { return true; });
    if (first >= 0) add(i, first);
    int second = grid.nearest(i, [&](int j) { return j != first; });
    if (second >= 0) add(i, second);
  }

  // Merge components through their closest cross pair, smallest component
  // first (by size, then by smallest member id).
  Dsu dsu(n);
  for (auto [a, b] : edge_set) dsu.unite(a, b);
  while (true) {
    std::vector<std::vector<int>> comps;
    {
      std::vector<int> root_slot(n, -1);
      for (int i = 0; i < n; ++i) {
        int r = dsu.find(i);
        if (root_slot[r] < 0) {
          root_slot[r] = static_cast<int>(comps.size());
          comps.emplace_back();
        }
        comps[root_slot[r]].push_back(i);
      }
    }
    if (comps.size() <= 1) break;
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a.front() < b.front();
    });
    const std::vector<int>& small = comps.front();
    int root = dsu.find(small.front());
    double best = kInfDist;
    int bu = -1, bv = -1;
    for (int u : small) {
      int v = grid.nearest(u, [&](int j) { return dsu.find(j) != root; });
      if (v < 0) continue;
      double d = std::hypot(xs[u] - xs[v], ys[u] - ys[v]);
      if (d < best || (d == best && std::pair(u, v) < std::pair(bu, bv))) {
        best = d;
        bu = u;
        bv = v;
      }
    }
    add(bu, bv);
    dsu.unite(bu, bv);
  }

  // Top up the lowest-degree vertices toward average degree 3 (the initial
  // wiring caps the average at 4).
  const i64 target_edges = (static_cast<i64>(n) * 3 + 1) / 2;
  std::set<std::pair<int, int>> by_degree;
  for (int i = 0; i < n; ++i) by_degree.insert({degree[i], i});
  while (static_cast<i64>(edge_set.size()) < target_edges) {
    int u = by_degree.begin()->second;
    int v = grid.nearest(u, [&](int j) { return !edge_set.count(canon(u, j)); });
    if (v < 0) break;  // clique; nothing left to add
    by_degree.erase({degree[u], u});
    by_degree.erase({degree[v], v});
    add(u, v);
    by_degree.insert({degree[u], u});
    by_degree.insert({degree[v], v});
  }

  RoadNetwork road;
  for (int i = 0; i < n; ++i) road.add_vertex(i, xs[i], ys[i]);
  for (auto [a, b] : edge_set)
    road.add_edge(a, b, std::hypot(xs[a] - xs[b], ys[a] - ys[b]));
  road.finalize();
  return road;
}

SocialNetwork gen_social(const GenConfig& cfg, const RoadNetwork& road) {
  check_counts(cfg);
  Rng rng(cfg.rng_seed ^ kSocialSalt);
  const int m = cfg.n_users;

  SocialNetwork soc;
  soc.topic_count = cfg.topic_count;
  soc.bits_width = cfg.bits_width;

  for (int i = 0; i < m; ++i) {
    int n_kw = std::min(draw_count(rng, GenDistribution::uniform, cfg.keywords_min,
                                   cfg.keywords_max),
                        cfg.keyword_universe);
    std::set<int> kws;
    while (static_cast<int>(kws.size()) < n_kw)
      kws.insert(1 + static_cast<int>(rng.below(cfg.keyword_universe)));

    int n_ci = std::min(draw_count(rng, GenDistribution::uniform, cfg.checkins_min,
                                   cfg.checkins_max),
                        road.vertex_count());
    std::set<int> spots;
    while (static_cast<int>(spots.size()) < n_ci)
      spots.insert(static_cast<int>(rng.below(road.vertex_count())));
    std::vector<CheckIn> cis;
    for (int v : spots) cis.push_back({v, static_cast<i64>(rng.below(1'000'000'000))});

    soc.add_user(i + 1, std::vector<int>(kws.begin(), kws.end()), std::move(cis));
  }

  // Degree-sequence stub pairing; self-pairs and duplicates are rejected.
  std::vector<int> want(m);
  i64 total = 0;
  for (int i = 0; i < m; ++i) {
    want[i] = draw_count(rng, cfg.distribution, cfg.degree_min, cfg.degree_max);
    total += want[i];
  }
  if (total % 2 == 1) ++want[m - 1];
  std::vector<int> stubs;
  for (int i = 0; i < m; ++i) stubs.insert(stubs.end(), want[i], i);
  rng.shuffle(stubs);

  std::set<std::pair<int, int>> friends;
  std::vector<int> degree(m, 0);
  auto befriend = [&](int a, int b) {
    if (a == b) return false;
    if (!friends.insert(std::minmax(a, b)).second) return false;
    ++degree[a];
    ++degree[b];
    return true;
  };
  for (size_t t = 0; t + 1 < stubs.size(); t += 2) befriend(stubs[t], stubs[t + 1]);

  // Every user needs at least one friend; prefer partners with headroom.
  if (m >= 2) {
    for (int u = 0; u < m; ++u) {
      if (degree[u] > 0) continue;
      int start = static_cast<int>(rng.below(m));
      int pick = -1;
      for (int probe = 0; probe < m && pick < 0; ++probe) {
        int w = (start + probe) % m;
        if (w != u && degree[w] < cfg.degree_max) pick = w;
      }
      for (int probe = 0; probe < m && pick < 0; ++probe) {
        int w = (start + probe) % m;
        if (w != u) pick = w;
      }
      befriend(u, pick);
    }
  }

  for (auto [a, b] : friends) {
    std::vector<double> wab(cfg.topic_count), wba(cfg.topic_count);
    for (int j = 0; j < cfg.topic_count; ++j) wab[j] = draw_unit(rng, cfg.distribution);
    for (int j = 0; j < cfg.topic_count; ++j) wba[j] = draw_unit(rng, cfg.distribution);
    soc.add_edge(a, b, std::move(wab));
    soc.add_edge(b, a, std::move(wba));
  }
  soc.finalize();
  return soc;
}

SpatialSocialNetwork generate_network(const GenConfig& cfg) {
  SpatialSocialNetwork net;
  net.road = gen_road(cfg);
  net.social = gen_social(cfg, net.road);
  return net;
}

}  // namespace sstruss
