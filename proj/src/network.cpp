#include "sstruss/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace sstruss {

namespace {

std::optional<int> lookup(const std::vector<std::pair<i64, int>>& index, i64 ext) {
  auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(ext, 0));
  if (it != index.end() && it->first == ext) return it->second;
  return std::nullopt;
}

void insert_sorted(std::vector<std::pair<i64, int>>& index, i64 ext, int idx) {
  auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(ext, 0));
  index.insert(it, {ext, idx});
}

}  // namespace

int RoadNetwork::add_vertex(i64 ext, double x, double y) {
  int idx = vertex_count();
  xs.push_back(x);
  ys.push_back(y);
  ext_id.push_back(ext);
  insert_sorted(ext_index_, ext, idx);
  return idx;
}

void RoadNetwork::add_edge(int src, int dst, double length) {
  edges.push_back({src, dst, length});
}

void RoadNetwork::finalize() {
  adj.assign(vertex_count(), {});
  for (const Edge& e : edges) {
    adj[e.src].push_back({e.dst, e.length});
    adj[e.dst].push_back({e.src, e.length});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
}

std::optional<int> RoadNetwork::index_of(i64 ext) const { return lookup(ext_index_, ext); }

int SocialNetwork::add_user(i64 ext, std::vector<int> keywords, std::vector<CheckIn> checkins) {
  int idx = user_count();
  User u;
  u.ext_id = ext;
  u.keywords = normalize_keywords(std::move(keywords));
  u.bits = build_keyword_bits(u.keywords, bits_width);
  u.checkins = std::move(checkins);
  users.push_back(std::move(u));
  insert_sorted(ext_index_, ext, idx);
  return idx;
}

void SocialNetwork::add_edge(int src, int dst, std::vector<double> weights) {
  edges.push_back({src, dst, std::move(weights)});
}

void SocialNetwork::finalize() {
  int m = user_count();
  out_adj.assign(m, {});
  in_adj.assign(m, {});
  und_adj.assign(m, {});
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const TopicEdge& e = edges[i];
    out_adj[e.src].push_back({e.dst, i});
    in_adj[e.dst].push_back({e.src, i});
    und_adj[e.src].push_back(e.dst);
    und_adj[e.dst].push_back(e.src);
  }
  for (auto& a : out_adj) std::sort(a.begin(), a.end());
  for (auto& a : in_adj) std::sort(a.begin(), a.end());
  for (auto& a : und_adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
}

std::optional<int> SocialNetwork::index_of(i64 ext) const { return lookup(ext_index_, ext); }

std::optional<int> SocialNetwork::edge_between(int src, int dst) const {
  const auto& a = out_adj[src];
  auto it = std::lower_bound(a.begin(), a.end(), std::make_pair(dst, 0));
  if (it != a.end() && it->first == dst) return it->second;
  return std::nullopt;
}

std::vector<int> normalize_keywords(std::vector<int> keywords) {
  std::sort(keywords.begin(), keywords.end());
  keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
  return keywords;
}

KeywordBits build_keyword_bits(const std::vector<int>& keywords, int width) {
  KeywordBits bits(width);
  for (int k : keywords) bits.insert(k);
  return bits;
}

bool keyword_overlap(const User& user, const std::vector<int>& sorted_query_keys,
                     const KeywordBits& query_bits) {
  if (!user.bits.intersects(query_bits)) return false;  // definite miss
  size_t i = 0, j = 0;
  while (i < user.keywords.size() && j < sorted_query_keys.size()) {
    if (user.keywords[i] == sorted_query_keys[j]) return true;
    if (user.keywords[i] < sorted_query_keys[j])
      ++i;
    else
      ++j;
  }
  return false;
}

ValidationReport validate_network(const SpatialSocialNetwork& net) {
  ValidationReport rep;
  auto issue = [&rep](std::string where, std::string msg) {
    rep.issues.push_back({std::move(where), std::move(msg)});
  };

  const RoadNetwork& road = net.road;
  int n = road.vertex_count();
  for (int i = 0; i < static_cast<int>(road.edges.size()); ++i) {
    const auto& e = road.edges[i];
    std::string where = "road edge " + std::to_string(i);
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      issue(where, "endpoint out of range");
    else if (e.src == e.dst)
      issue(where, "self loop");
    if (!(e.length > 0.0)) issue(where, "non-positive length");
  }
  if (n > 0) {
    // connectivity via BFS over the declared edges
    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : road.edges) {
      if (e.src >= 0 && e.src < n && e.dst >= 0 && e.dst < n && e.src != e.dst) {
        adj[e.src].push_back(e.dst);
        adj[e.dst].push_back(e.src);
      }
    }
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          bfs.push(w);
        }
    }
    if (reached != n) issue("road network", "not connected");
  } else {
    issue("road network", "empty");
  }

  const SocialNetwork& soc = net.social;
  int m = soc.user_count();
  if (soc.topic_count < 1) issue("social network", "topic_count must be >= 1");
  for (int u = 0; u < m; ++u) {
    const User& usr = soc.users[u];
    std::string where = "user " + std::to_string(usr.ext_id);
    if (usr.checkins.empty()) issue(where, "no check-ins");
    for (const CheckIn& c : usr.checkins)
      if (c.road_vertex < 0 || c.road_vertex >= n)
        issue(where, "check-in references unknown road vertex");
    for (int k : usr.keywords)
      if (k < 0) issue(where, "negative keyword id");
  }
  std::vector<std::pair<int, int>> seen_pairs;
  seen_pairs.reserve(soc.edges.size());
  for (int i = 0; i < static_cast<int>(soc.edges.size()); ++i) {
    const TopicEdge& e = soc.edges[i];
    std::string where = "social edge " + std::to_string(i);
    if (e.src < 0 || e.src >= m || e.dst < 0 || e.dst >= m) {
      issue(where, "endpoint out of range");
      continue;
    }
    if (e.src == e.dst) issue(where, "self loop");
    if (static_cast<int>(e.weights.size()) != soc.topic_count)
      issue(where, "weight vector length != topic_count");
    for (double w : e.weights)
      if (!(w >= 0.0 && w <= 1.0)) issue(where, "weight outside [0,1]");
    seen_pairs.push_back({e.src, e.dst});
  }
  std::sort(seen_pairs.begin(), seen_pairs.end());
  for (size_t i = 1; i < seen_pairs.size(); ++i)
    if (seen_pairs[i] == seen_pairs[i - 1])
      issue("social edges", "duplicate directed edge " + std::to_string(seen_pairs[i].first) +
                                "->" + std::to_string(seen_pairs[i].second));
  return rep;
}

std::optional<std::string> validate_query(const SpatialSocialNetwork& net, QuerySpec& spec) {
  if (spec.q < 0 || spec.q >= net.social.user_count())
    throw std::invalid_argument("query user does not exist");
  if (spec.k < 2) throw std::invalid_argument("k must be >= 2");
  if (spec.d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(spec.theta >= 0.0 && spec.theta <= 1.0))
    throw std::invalid_argument("theta must be in [0,1]");
  if (static_cast<int>(spec.topics.size()) != net.social.topic_count)
    throw std::invalid_argument("topic vector length != topic_count");
  double sum = 0.0;
  for (double t : spec.topics) {
    if (!(t >= 0.0)) throw std::invalid_argument("topic weights must be >= 0");
    sum += t;
  }
  if (sum <= 0.0) throw std::invalid_argument("topic vector must have positive mass");
  spec.keywords = normalize_keywords(std::move(spec.keywords));
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& t : spec.topics) t /= sum;
    return "topic vector re-normalized to sum 1";
  }
  return std::nullopt;
}

}  // namespace sstruss
