#pragma once

#include "sstruss/index.hpp"

namespace sstruss {

// sound: provably lossless filters only. literal: the original published
// filter forms, which can discard valid answers (kept for comparison runs).
enum class PruneMode { sound, literal };

enum class PruneRule {
  none,
  keyword_user,
  support_user,
  spatial_user,
  social_user,
  influence_user,
  keyword_node,
  support_node,
  spatial_node,
  social_node,
  influence_node,
};

struct PruneDecision {
  enum class Verdict { keep, prune, accept_fast };
  Verdict verdict = Verdict::keep;
  PruneRule rule = PruneRule::none;

  bool pruned() const { return verdict == Verdict::prune; }
};

// Query-scoped bound state: the query user's pivot rows, topic-folded
// influence caps, and direct-neighbor influence values.
struct BoundsContext {
  const SpatialSocialNetwork* net = nullptr;
  const SocialSpatialIndex* idx = nullptr;
  QuerySpec query;
  PruneMode mode = PruneMode::sound;
  KeywordBits query_bits;
  std::vector<double> q_road_row;
  std::vector<int> q_social_row;
  double q_ub_out = 0.0, q_ub_in = 0.0;
  std::vector<std::pair<int, double>> q_out_f, q_in_f;  // (neighbor, f), sorted
  // Test hook: inflates the spatial lower bound so the verify harness can
  // prove it detects an unsafe bound. Must stay 1.0 in real use.
  double bound_fault_scale = 1.0;

  double user_fold_out(int u) const {
    return fold_topics(idx->leaf_entries[u].inf_out, query.topics);
  }
  double user_fold_in(int u) const {
    return fold_topics(idx->leaf_entries[u].inf_in, query.topics);
  }
};

BoundsContext make_bounds_context(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                                  const QuerySpec& query, PruneMode mode);

// Pivot sandwich bounds on the mean road distance between q and u.
double lb_avg_dist_rn(const BoundsContext& ctx, int u);
double ub_avg_dist_rn(const BoundsContext& ctx, int u);

// Hop bounds; kInfHops when a pivot proves disconnection (lower) or no pivot
// connects both endpoints (upper).
int lb_dist_sn(const BoundsContext& ctx, int u);
int ub_dist_sn(const BoundsContext& ctx, int u);

// Upper bound on the best-path influence u -> v: the larger of the direct
// edge value and the product of u's outgoing and v's incoming per-topic caps.
// Multi-edge paths are dominated by the cap product because factors never
// exceed one; the single-edge path is the direct value itself.
double ub_inf_score(const BoundsContext& ctx, int u, int v);

PruneDecision spatial_prune_user(const BoundsContext& ctx, int u);
PruneDecision social_prune_user(const BoundsContext& ctx, int u);
PruneDecision support_prune_user(const BoundsContext& ctx, int u);
PruneDecision keyword_prune_user(const BoundsContext& ctx, int u);
PruneDecision influence_prune_user(const BoundsContext& ctx, int u);

// Piecewise pivot lower bound from q to any member of the node.
double node_spatial_lb(const BoundsContext& ctx, const IndexNode& node);
i64 node_social_lb(const BoundsContext& ctx, const IndexNode& node);

// Which pruning axes to apply; single-axis index variants use a subset.
struct RuleMask {
  bool spatial = true, social = true, support = true, keyword = true, influence = true;
};

PruneDecision node_prune(const BoundsContext& ctx, int node_id, const RuleMask& mask);
PruneDecision user_prune(const BoundsContext& ctx, int u, const RuleMask& mask);

RuleMask rule_mask_for(IndexFlavor flavor);

}  // namespace sstruss
