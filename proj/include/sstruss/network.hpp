#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sstruss/types.hpp"

namespace sstruss {

inline constexpr int kDefaultBitsWidth = 256;

// Undirected weighted road graph. Vertices are dense internal indices;
// ext_id keeps the id used in files (equal to the index for generated data).
struct RoadNetwork {
  struct Edge {
    int src = 0, dst = 0;
    double length = 0.0;
  };

  std::vector<double> xs, ys;
  std::vector<i64> ext_id;
  std::vector<Edge> edges;
  std::vector<std::vector<std::pair<int, double>>> adj;  // built by finalize()

  int vertex_count() const { return static_cast<int>(xs.size()); }
  int add_vertex(i64 ext, double x, double y);
  void add_edge(int src, int dst, double length);
  void finalize();  // builds adjacency; idempotent
  std::optional<int> index_of(i64 ext) const;

 private:
  std::vector<std::pair<i64, int>> ext_index_;  // sorted (ext, internal)
};

struct CheckIn {
  int road_vertex = 0;
  i64 timestamp = 0;  // carried through I/O, unused by any algorithm
};

struct User {
  i64 ext_id = 0;
  std::vector<int> keywords;  // sorted unique ids
  KeywordBits bits;
  std::vector<CheckIn> checkins;
};

// Directed social edge with one topic propagation weight per topic.
struct TopicEdge {
  int src = 0, dst = 0;
  std::vector<double> weights;
};

struct SocialNetwork {
  int topic_count = 0;
  int bits_width = kDefaultBitsWidth;
  std::vector<User> users;
  std::vector<TopicEdge> edges;

  // built by finalize(): (neighbor, edge index) per direction plus a
  // deduplicated undirected friend list used for hops / truss work
  std::vector<std::vector<std::pair<int, int>>> out_adj, in_adj;
  std::vector<std::vector<int>> und_adj;

  int user_count() const { return static_cast<int>(users.size()); }
  int add_user(i64 ext, std::vector<int> keywords, std::vector<CheckIn> checkins);
  void add_edge(int src, int dst, std::vector<double> weights);
  void finalize();
  std::optional<int> index_of(i64 ext) const;
  std::optional<int> edge_between(int src, int dst) const;  // directed

 private:
  std::vector<std::pair<i64, int>> ext_index_;
};

struct SpatialSocialNetwork {
  RoadNetwork road;
  SocialNetwork social;
};

// Normalized keyword list: sorted, deduplicated.
std::vector<int> normalize_keywords(std::vector<int> keywords);

KeywordBits build_keyword_bits(const std::vector<int>& keywords, int width);

// Exact set intersection test; the bit filter only short-circuits misses.
bool keyword_overlap(const User& user, const std::vector<int>& sorted_query_keys,
                     const KeywordBits& query_bits);

struct ValidationIssue {
  std::string where;    // file-ish location: "user 3", "road edge 7"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks every structural invariant: dense ids, valid references, no self
// loops, one edge per ordered pair, weight vector shape and range, nonempty
// check-in lists, positive edge lengths, road connectivity.
ValidationReport validate_network(const SpatialSocialNetwork& net);

struct QuerySpec {
  int q = 0;                   // internal user index
  std::vector<double> topics;  // normalized, length == topic_count
  std::vector<int> keywords;   // sorted unique
  int k = 2;
  int d = 1;
  double sigma = 0.0;
  double theta = 0.0;
};

// Validates ranges and normalizes the topic vector (returns a note when the
// input needed re-normalization). Throws std::invalid_argument on violations.
std::optional<std::string> validate_query(const SpatialSocialNetwork& net, QuerySpec& spec);

}  // namespace sstruss
