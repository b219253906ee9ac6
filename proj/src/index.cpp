#include "sstruss/index.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>

namespace sstruss {

double fold_topics(const std::vector<double>& maxima, const std::vector<double>& topics) {
  double s = 0.0;
  for (size_t j = 0; j < maxima.size(); ++j) s += maxima[j] * topics[j];
  return s;
}

namespace {

QualityTerms terms_for(IndexFlavor flavor) {
  switch (flavor) {
    case IndexFlavor::social_only:
      return QualityTerms::social_term;
    case IndexFlavor::spatial_only:
      return QualityTerms::road_term;
    default:
      return QualityTerms::both;
  }
}

// Per-topic maxima over edges crossing the node boundary, both directions.
void boundary_folds(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx, int node_id,
                    std::vector<double>& out, std::vector<double>& in,
                    const std::vector<int>& members) {
  int t = net.social.topic_count;
  out.assign(t, 0.0);
  in.assign(t, 0.0);
  for (int u : members) {
    for (auto [v, e] : net.social.out_adj[u]) {
      if (idx.user_under(node_id, v)) continue;
      const auto& w = net.social.edges[e].weights;
      for (int j = 0; j < t; ++j) out[j] = std::max(out[j], w[j]);
    }
    for (auto [v, e] : net.social.in_adj[u]) {
      if (idx.user_under(node_id, v)) continue;
      const auto& w = net.social.edges[e].weights;
      for (int j = 0; j < t; ++j) in[j] = std::max(in[j], w[j]);
    }
  }
}

void collect_members(const SocialSpatialIndex& idx, int node_id, std::vector<int>& out) {
  const IndexNode& n = idx.nodes[node_id];
  if (n.is_leaf) {
    out.insert(out.end(), n.users.begin(), n.users.end());
    return;
  }
  for (int c : n.children) collect_members(idx, c, out);
}

void assign_leaf_ranges(SocialSpatialIndex& idx, int node_id, int& next_pos) {
  IndexNode& n = idx.nodes[node_id];
  if (n.is_leaf) {
    n.first_leaf = n.last_leaf = next_pos++;
    return;
  }
  n.first_leaf = next_pos;
  for (int c : n.children) assign_leaf_ranges(idx, c, next_pos);
  n.last_leaf = next_pos - 1;
}

}  // namespace

SocialSpatialIndex build_index(const SpatialSocialNetwork& net, IndexConfig cfg,
                               BuildReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  int m = net.social.user_count();
  if (m == 0) throw std::invalid_argument("cannot index an empty network");
  if (cfg.iota == 0) cfg.iota = std::max(4, (m + 63) / 64);
  cfg.iota = std::min(cfg.iota, m);
  if (cfg.fanout < 2) throw std::invalid_argument("fanout must be >= 2");
  cfg.l = std::min(cfg.l, net.road.vertex_count());
  cfg.h = std::min(cfg.h, m);
  cfg.pivot.terms = terms_for(cfg.flavor);

  SocialSpatialIndex idx;
  idx.cfg = cfg;
  idx.topic_count = net.social.topic_count;
  idx.user_count = m;
  idx.road_vertex_count = net.road.vertex_count();

  PivotSelection road_sel = select_pivots(net, PivotKind::road, cfg.l, cfg.pivot);
  PivotSelection social_sel = select_pivots(net, PivotKind::social, cfg.h, cfg.pivot);
  PivotSelection index_sel = select_pivots(net, PivotKind::index, cfg.iota, cfg.pivot);
  idx.road_pivots = road_sel.set;
  idx.social_pivots = social_sel.set;
  idx.index_pivots = index_sel.set;
  if (report) {
    report->road_pivot_cost = road_sel.cost;
    report->social_pivot_cost = social_sel.cost;
    report->index_pivot_cost = index_sel.cost;
  }
  idx.tables = build_distance_tables(net, idx.road_pivots.ids, idx.social_pivots.ids);

  EdgeSupportMap supports = compute_supports(net.social);
  int t = net.social.topic_count;
  idx.leaf_entries.resize(m);
  for (int u = 0; u < m; ++u) {
    LeafEntry& le = idx.leaf_entries[u];
    le.user = u;
    le.phi = supports.phi[u];
    le.bits = net.social.users[u].bits;
    le.inf_out.assign(t, 0.0);
    le.inf_in.assign(t, 0.0);
    for (auto [v, e] : net.social.out_adj[u]) {
      (void)v;
      const auto& w = net.social.edges[e].weights;
      for (int j = 0; j < t; ++j) le.inf_out[j] = std::max(le.inf_out[j], w[j]);
    }
    for (auto [v, e] : net.social.in_adj[u]) {
      (void)v;
      const auto& w = net.social.edges[e].weights;
      for (int j = 0; j < t; ++j) le.inf_in[j] = std::max(le.inf_in[j], w[j]);
    }
  }

  std::vector<int> assignment = gen_subgraphs(net, idx.index_pivots.ids, cfg.pivot.terms);

  // leaves first: node id == group id
  idx.nodes.assign(cfg.iota, IndexNode{});
  idx.user_leaf.assign(m, 0);
  for (int g = 0; g < cfg.iota; ++g) {
    idx.nodes[g].is_leaf = true;
    idx.nodes[g].bits = KeywordBits(cfg.bits_width);
  }
  for (int u = 0; u < m; ++u) {
    idx.nodes[assignment[u]].users.push_back(u);
    idx.user_leaf[u] = assignment[u];
  }

  // greedy centroid agglomeration per level until a single root remains
  std::vector<int> level(cfg.iota);
  for (int g = 0; g < cfg.iota; ++g) {
    for (int u : idx.nodes[g].users)
      for (const CheckIn& c : net.social.users[u].checkins)
        idx.nodes[g].mbr.expand(net.road.xs[c.road_vertex], net.road.ys[c.road_vertex]);
    level[g] = g;
  }
  while (level.size() > 1) {
    std::vector<int> next;
    std::vector<char> used(level.size(), 0);
    for (size_t i = 0; i < level.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      IndexNode parent;
      parent.is_leaf = false;
      parent.bits = KeywordBits(cfg.bits_width);
      parent.children.push_back(level[i]);
      parent.mbr = idx.nodes[level[i]].mbr;
      auto [cx, cy] = idx.nodes[level[i]].mbr.centroid();
      while (static_cast<int>(parent.children.size()) < cfg.fanout) {
        int best = -1;
        double best_d = kInfDist;
        for (size_t j = i + 1; j < level.size(); ++j) {
          if (used[j]) continue;
          auto [x, y] = idx.nodes[level[j]].mbr.centroid();
          double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
          }
        }
        if (best < 0) break;
        used[best] = 1;
        parent.children.push_back(level[best]);
        parent.mbr.merge(idx.nodes[level[best]].mbr);
      }
      if (parent.children.size() == 1) {
        // Unpaired leftover: promote it as-is instead of wrapping it in a
        // single-child parent.
        next.push_back(level[i]);
        continue;
      }
      int pid = static_cast<int>(idx.nodes.size());
      for (int c : parent.children) idx.nodes[c].parent = pid;
      idx.nodes.push_back(std::move(parent));
      next.push_back(pid);
    }
    level = std::move(next);
  }
  idx.root = level[0];

  int next_pos = 0;
  assign_leaf_ranges(idx, idx.root, next_pos);

  // aggregates: bits/phi/pivot bounds fold over members; influence folds use
  // boundary edges, so they are computed per node, not from children
  for (int n = 0; n < static_cast<int>(idx.nodes.size()); ++n) {
    IndexNode& node = idx.nodes[n];
    std::vector<int> members;
    collect_members(idx, n, members);
    std::sort(members.begin(), members.end());

    node.road_lb.assign(cfg.l, kInfDist);
    node.road_ub.assign(cfg.l, -kInfDist);
    node.social_lb.assign(cfg.h, kInfHops);
    node.social_ub.assign(cfg.h, -1);
    node.lb_phi = std::numeric_limits<int>::max();  // stays maximal for empty nodes
    node.ub_phi = -1;
    for (int u : members) {
      node.bits.or_with(idx.leaf_entries[u].bits);
      node.lb_phi = std::min(node.lb_phi, idx.leaf_entries[u].phi);
      node.ub_phi = std::max(node.ub_phi, idx.leaf_entries[u].phi);
      for (int k = 0; k < cfg.l; ++k) {
        double a = idx.tables.road_at(u, k);
        node.road_lb[k] = std::min(node.road_lb[k], a);
        node.road_ub[k] = std::max(node.road_ub[k], a);
      }
      for (int k = 0; k < cfg.h; ++k) {
        int s = idx.tables.social_at(u, k);
        node.social_lb[k] = std::min(node.social_lb[k], s);
        node.social_ub[k] = std::max(node.social_ub[k], s);
      }
    }
    boundary_folds(net, idx, n, node.inf_out, node.inf_in, members);
  }
  if (report)
    report->build_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
  return idx;
}

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64v(u64 v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64v(std::bit_cast<u64>(v)); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  u64 u64v() {
    const char* p = take(8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64v()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const char* take(size_t n) {
    if (pos_ + n > bytes_.size())
      throw IndexFormatError(IndexFormatError::Kind::truncated, "index data truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string_view bytes_;
  size_t pos_ = 0;
};

constexpr char kMagic[4] = {'S', 'S', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

void write_bits(ByteWriter& w, const KeywordBits& bits) {
  for (u64 word : bits.words()) w.u64v(word);
}

KeywordBits read_bits(ByteReader& r, int width) {
  KeywordBits bits(width);
  for (u64& word : bits.words()) word = r.u64v();
  return bits;
}

}  // namespace

std::string serialize_index(const SocialSpatialIndex& idx) {
  ByteWriter w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(idx.cfg.flavor));
  w.u32(static_cast<std::uint32_t>(idx.cfg.l));
  w.u32(static_cast<std::uint32_t>(idx.cfg.h));
  w.u32(static_cast<std::uint32_t>(idx.cfg.iota));
  w.u32(static_cast<std::uint32_t>(idx.cfg.fanout));
  w.u32(static_cast<std::uint32_t>(idx.cfg.bits_width));
  w.u64v(idx.cfg.pivot.rng_seed);
  w.u32(static_cast<std::uint32_t>(idx.topic_count));
  w.u32(static_cast<std::uint32_t>(idx.user_count));
  w.u32(static_cast<std::uint32_t>(idx.road_vertex_count));
  w.u32(static_cast<std::uint32_t>(idx.nodes.size()));
  w.u32(static_cast<std::uint32_t>(idx.root));

  for (int p : idx.road_pivots.ids) w.u32(static_cast<std::uint32_t>(p));
  for (int p : idx.social_pivots.ids) w.u32(static_cast<std::uint32_t>(p));
  for (int p : idx.index_pivots.ids) w.u32(static_cast<std::uint32_t>(p));
  for (double x : idx.tables.road) w.f64(x);
  for (int x : idx.tables.social) w.i32(x);

  for (const LeafEntry& le : idx.leaf_entries) {
    w.i32(le.phi);
    write_bits(w, le.bits);
    for (double x : le.inf_out) w.f64(x);
    for (double x : le.inf_in) w.f64(x);
  }
  for (int leaf : idx.user_leaf) w.u32(static_cast<std::uint32_t>(leaf));

  for (const IndexNode& n : idx.nodes) {
    w.u8(n.is_leaf ? 1 : 0);
    w.i32(n.parent);
    w.i32(n.first_leaf);
    w.i32(n.last_leaf);
    w.f64(n.mbr.min_x);
    w.f64(n.mbr.min_y);
    w.f64(n.mbr.max_x);
    w.f64(n.mbr.max_y);
    write_bits(w, n.bits);
    w.i32(n.lb_phi);
    w.i32(n.ub_phi);
    for (double x : n.inf_out) w.f64(x);
    for (double x : n.inf_in) w.f64(x);
    for (int k = 0; k < idx.cfg.l; ++k) {
      w.f64(n.road_lb[k]);
      w.f64(n.road_ub[k]);
    }
    for (int k = 0; k < idx.cfg.h; ++k) {
      w.i32(n.social_lb[k]);
      w.i32(n.social_ub[k]);
    }
    w.u32(static_cast<std::uint32_t>(n.children.size()));
    for (int c : n.children) w.u32(static_cast<std::uint32_t>(c));
    w.u32(static_cast<std::uint32_t>(n.users.size()));
    for (int u : n.users) w.u32(static_cast<std::uint32_t>(u));
  }
  return w.take();
}

SocialSpatialIndex deserialize_index(std::string_view bytes) {
  ByteReader r(bytes);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IndexFormatError(IndexFormatError::Kind::bad_magic, "not an index file");
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw IndexFormatError(IndexFormatError::Kind::bad_version,
                           "unsupported index version " + std::to_string(version));

  SocialSpatialIndex idx;
  idx.cfg.flavor = static_cast<IndexFlavor>(r.u8());
  idx.cfg.l = static_cast<int>(r.u32());
  idx.cfg.h = static_cast<int>(r.u32());
  idx.cfg.iota = static_cast<int>(r.u32());
  idx.cfg.fanout = static_cast<int>(r.u32());
  idx.cfg.bits_width = static_cast<int>(r.u32());
  idx.cfg.pivot.rng_seed = r.u64v();
  idx.topic_count = static_cast<int>(r.u32());
  idx.user_count = static_cast<int>(r.u32());
  idx.road_vertex_count = static_cast<int>(r.u32());
  std::uint32_t node_count = r.u32();
  idx.root = static_cast<int>(r.u32());

  auto read_ids = [&r](PivotKind kind, int count) {
    PivotSet set;
    set.kind = kind;
    for (int i = 0; i < count; ++i) set.ids.push_back(static_cast<int>(r.u32()));
    return set;
  };
  idx.road_pivots = read_ids(PivotKind::road, idx.cfg.l);
  idx.social_pivots = read_ids(PivotKind::social, idx.cfg.h);
  idx.index_pivots = read_ids(PivotKind::index, idx.cfg.iota);

  idx.tables.l = idx.cfg.l;
  idx.tables.h = idx.cfg.h;
  idx.tables.road.resize(static_cast<size_t>(idx.user_count) * idx.cfg.l);
  for (double& x : idx.tables.road) x = r.f64();
  idx.tables.social.resize(static_cast<size_t>(idx.user_count) * idx.cfg.h);
  for (int& x : idx.tables.social) x = r.i32();

  int t = idx.topic_count;
  idx.leaf_entries.resize(idx.user_count);
  for (int u = 0; u < idx.user_count; ++u) {
    LeafEntry& le = idx.leaf_entries[u];
    le.user = u;
    le.phi = r.i32();
    le.bits = read_bits(r, idx.cfg.bits_width);
    le.inf_out.resize(t);
    for (double& x : le.inf_out) x = r.f64();
    le.inf_in.resize(t);
    for (double& x : le.inf_in) x = r.f64();
  }
  idx.user_leaf.resize(idx.user_count);
  for (int& leaf : idx.user_leaf) leaf = static_cast<int>(r.u32());

  idx.nodes.resize(node_count);
  for (IndexNode& n : idx.nodes) {
    n.is_leaf = r.u8() != 0;
    n.parent = r.i32();
    n.first_leaf = r.i32();
    n.last_leaf = r.i32();
    n.mbr.min_x = r.f64();
    n.mbr.min_y = r.f64();
    n.mbr.max_x = r.f64();
    n.mbr.max_y = r.f64();
    n.bits = read_bits(r, idx.cfg.bits_width);
    n.lb_phi = r.i32();
    n.ub_phi = r.i32();
    n.inf_out.resize(t);
    for (double& x : n.inf_out) x = r.f64();
    n.inf_in.resize(t);
    for (double& x : n.inf_in) x = r.f64();
    n.road_lb.resize(idx.cfg.l);
    n.road_ub.resize(idx.cfg.l);
    for (int k = 0; k < idx.cfg.l; ++k) {
      n.road_lb[k] = r.f64();
      n.road_ub[k] = r.f64();
    }
    n.social_lb.resize(idx.cfg.h);
    n.social_ub.resize(idx.cfg.h);
    for (int k = 0; k < idx.cfg.h; ++k) {
      n.social_lb[k] = r.i32();
      n.social_ub[k] = r.i32();
    }
    std::uint32_t nc = r.u32();
    n.children.resize(nc);
    for (int& c : n.children) c = static_cast<int>(r.u32());
    std::uint32_t nu = r.u32();
    n.users.resize(nu);
    for (int& u : n.users) u = static_cast<int>(r.u32());
  }
  if (!r.done())
    throw IndexFormatError(IndexFormatError::Kind::truncated, "trailing bytes after index data");
  return idx;
}

bool index_equal(const SocialSpatialIndex& a, const SocialSpatialIndex& b) {
  return a.cfg.flavor == b.cfg.flavor && a.cfg.l == b.cfg.l && a.cfg.h == b.cfg.h &&
         a.cfg.iota == b.cfg.iota && a.cfg.fanout == b.cfg.fanout &&
         a.cfg.bits_width == b.cfg.bits_width && a.topic_count == b.topic_count &&
         a.user_count == b.user_count && a.road_vertex_count == b.road_vertex_count &&
         a.root == b.root && a.road_pivots.ids == b.road_pivots.ids &&
         a.social_pivots.ids == b.social_pivots.ids &&
         a.index_pivots.ids == b.index_pivots.ids && a.tables.road == b.tables.road &&
         a.tables.social == b.tables.social && a.leaf_entries == b.leaf_entries &&
         a.user_leaf == b.user_leaf && a.nodes == b.nodes;
}

}  // namespace sstruss
