#pragma once

#include <string>
#include <string_view>

#include "sstruss/pivots.hpp"

namespace sstruss {

// Which pruning axes an index variant carries at query time. The structure
// and file format are shared; partition quality and traversal rules differ.
enum class IndexFlavor : std::uint8_t { full = 0, social_only = 1, spatial_only = 2 };

struct IndexConfig {
  int l = 8;                       // road pivots
  int h = 8;                       // social pivots
  int iota = 0;                    // leaves; 0 = max(4, ceil(M/64))
  int fanout = 8;
  int bits_width = kDefaultBitsWidth;
  IndexFlavor flavor = IndexFlavor::full;
  PivotSearchConfig pivot;
};

// Per-user sidecar: influence folds over ALL incident edges (node folds below
// use boundary edges only, which can be tighter).
struct LeafEntry {
  int user = 0;
  int phi = 0;
  KeywordBits bits;
  std::vector<double> inf_out, inf_in;  // per-topic maxima

  bool operator==(const LeafEntry&) const = default;
};

struct Mbr {
  double min_x = kInfDist, min_y = kInfDist;
  double max_x = -kInfDist, max_y = -kInfDist;

  void expand(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  void merge(const Mbr& o) {
    if (o.empty()) return;
    expand(o.min_x, o.min_y);
    expand(o.max_x, o.max_y);
  }
  bool empty() const { return min_x > max_x; }
  std::pair<double, double> centroid() const {
    if (empty()) return {0.0, 0.0};
    return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0};
  }

  bool operator==(const Mbr&) const = default;
};

struct IndexNode {
  bool is_leaf = false;
  int parent = -1;
  std::vector<int> children;  // node ids (internal nodes)
  std::vector<int> users;     // members (leaf nodes)
  Mbr mbr;                    // diagnostic only, never a pruning input
  KeywordBits bits;           // OR over member bit vectors
  int lb_phi = 0, ub_phi = 0; // min / max member phi
  std::vector<double> inf_out, inf_in;      // per-topic maxima, boundary edges
  std::vector<double> road_lb, road_ub;     // per road pivot, over members
  std::vector<int> social_lb, social_ub;    // per social pivot, over members
  int first_leaf = 0, last_leaf = -1;       // contiguous descendant-leaf range

  bool operator==(const IndexNode&) const = default;
};

struct SocialSpatialIndex {
  IndexConfig cfg;  // resolved: iota concrete
  int topic_count = 0;
  int user_count = 0;
  int road_vertex_count = 0;
  PivotSet road_pivots, social_pivots, index_pivots;
  PivotDistanceTables tables;
  std::vector<LeafEntry> leaf_entries;  // indexed by user
  std::vector<int> user_leaf;           // user -> leaf node id
  std::vector<IndexNode> nodes;         // leaves first (ids 0..iota-1)
  int root = 0;

  // Leaf ids are assigned DFS-contiguous positions, so subtree membership is
  // a range check.
  bool user_under(int node, int user) const {
    int pos = nodes[user_leaf[user]].first_leaf;
    return pos >= nodes[node].first_leaf && pos <= nodes[node].last_leaf;
  }
};

struct BuildReport {
  double road_pivot_cost = 0.0;
  double social_pivot_cost = 0.0;
  double index_pivot_cost = 0.0;
  i64 build_nanos = 0;
};

SocialSpatialIndex build_index(const SpatialSocialNetwork& net, IndexConfig cfg,
                               BuildReport* report = nullptr);

// Folds a per-topic maxima vector with a normalized topic vector; by
// linearity this upper-bounds every per-edge influence in the fold.
double fold_topics(const std::vector<double>& maxima, const std::vector<double>& topics);

struct IndexFormatError : std::runtime_error {
  enum class Kind { bad_magic, bad_version, truncated };
  Kind kind;
  IndexFormatError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind(kind) {}
};

// Little-endian, versioned, deterministic: equal indexes serialize to equal
// bytes on every platform.
std::string serialize_index(const SocialSpatialIndex& idx);
SocialSpatialIndex deserialize_index(std::string_view bytes);

bool index_equal(const SocialSpatialIndex& a, const SocialSpatialIndex& b);

}  // namespace sstruss
