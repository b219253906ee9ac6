#include "sstruss/prune.hpp"

#include <algorithm>
#include <cmath>

#include "sstruss/metrics.hpp"

namespace sstruss {

BoundsContext make_bounds_context(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                                  const QuerySpec& query, PruneMode mode) {
  if (idx.user_count != net.social.user_count() ||
      idx.road_vertex_count != net.road.vertex_count() ||
      idx.topic_count != net.social.topic_count)
    throw std::invalid_argument("index does not match network");

  BoundsContext ctx;
  ctx.net = &net;
  ctx.idx = &idx;
  ctx.query = query;
  ctx.mode = mode;
  ctx.query_bits = build_keyword_bits(query.keywords, idx.cfg.bits_width);
  ctx.q_road_row.resize(idx.cfg.l);
  for (int k = 0; k < idx.cfg.l; ++k) ctx.q_road_row[k] = idx.tables.road_at(query.q, k);
  ctx.q_social_row.resize(idx.cfg.h);
  for (int k = 0; k < idx.cfg.h; ++k) ctx.q_social_row[k] = idx.tables.social_at(query.q, k);
  ctx.q_ub_out = ctx.user_fold_out(query.q);
  ctx.q_ub_in = ctx.user_fold_in(query.q);
  for (auto [v, e] : net.social.out_adj[query.q])
    ctx.q_out_f.push_back({v, edge_influence(net.social.edges[e].weights, query.topics)});
  for (auto [v, e] : net.social.in_adj[query.q])
    ctx.q_in_f.push_back({v, edge_influence(net.social.edges[e].weights, query.topics)});
  return ctx;
}

double lb_avg_dist_rn(const BoundsContext& ctx, int u) {
  double best = 0.0;
  for (int k = 0; k < ctx.idx->cfg.l; ++k)
    best = std::max(best, std::abs(ctx.q_road_row[k] - ctx.idx->tables.road_at(u, k)));
  return best * ctx.bound_fault_scale;
}

double ub_avg_dist_rn(const BoundsContext& ctx, int u) {
  double best = kInfDist;
  for (int k = 0; k < ctx.idx->cfg.l; ++k)
    best = std::min(best, ctx.q_road_row[k] + ctx.idx->tables.road_at(u, k));
  return best;
}

int lb_dist_sn(const BoundsContext& ctx, int u) {
  int best = 0;
  for (int k = 0; k < ctx.idx->cfg.h; ++k) {
    int a = ctx.q_social_row[k];
    int b = ctx.idx->tables.social_at(u, k);
    if (a == kInfHops && b == kInfHops) continue;  // no information
    if (a == kInfHops || b == kInfHops) return kInfHops;  // provably disconnected
    best = std::max(best, std::abs(a - b));
  }
  return best;
}

int ub_dist_sn(const BoundsContext& ctx, int u) {
  i64 best = kInfHops;
  for (int k = 0; k < ctx.idx->cfg.h; ++k) {
    int a = ctx.q_social_row[k];
    int b = ctx.idx->tables.social_at(u, k);
    if (a == kInfHops || b == kInfHops) continue;
    best = std::min(best, static_cast<i64>(a) + b);
  }
  return static_cast<int>(std::min<i64>(best, kInfHops));
}

double ub_inf_score(const BoundsContext& ctx, int u, int v) {
  const SocialNetwork& soc = ctx.net->social;
  double direct = 0.0;
  if (auto e = soc.edge_between(u, v))
    direct = edge_influence(soc.edges[*e].weights, ctx.query.topics);
  return std::max(direct, ctx.user_fold_out(u) * ctx.user_fold_in(v));
}

PruneDecision spatial_prune_user(const BoundsContext& ctx, int u) {
  if (ctx.mode == PruneMode::literal) {
    if (ub_avg_dist_rn(ctx, u) > ctx.query.sigma)
      return {PruneDecision::Verdict::prune, PruneRule::spatial_user};
    return {PruneDecision::Verdict::keep, PruneRule::spatial_user};
  }
  if (lb_avg_dist_rn(ctx, u) >= ctx.query.sigma)
    return {PruneDecision::Verdict::prune, PruneRule::spatial_user};
  if (ub_avg_dist_rn(ctx, u) < ctx.query.sigma)
    return {PruneDecision::Verdict::accept_fast, PruneRule::spatial_user};
  return {PruneDecision::Verdict::keep, PruneRule::spatial_user};
}

PruneDecision social_prune_user(const BoundsContext& ctx, int u) {
  if (ctx.mode == PruneMode::literal) {
    if (ub_dist_sn(ctx, u) >= ctx.query.d)
      return {PruneDecision::Verdict::prune, PruneRule::social_user};
    return {PruneDecision::Verdict::keep, PruneRule::social_user};
  }
  if (lb_dist_sn(ctx, u) >= ctx.query.d)  // kInfHops means provably disconnected
    return {PruneDecision::Verdict::prune, PruneRule::social_user};
  if (ub_dist_sn(ctx, u) < ctx.query.d)
    return {PruneDecision::Verdict::accept_fast, PruneRule::social_user};
  return {PruneDecision::Verdict::keep, PruneRule::social_user};
}

PruneDecision support_prune_user(const BoundsContext& ctx, int u) {
  if (ctx.idx->leaf_entries[u].phi < ctx.query.k - 2)
    return {PruneDecision::Verdict::prune, PruneRule::support_user};
  return {PruneDecision::Verdict::keep, PruneRule::support_user};
}

PruneDecision keyword_prune_user(const BoundsContext& ctx, int u) {
  if (!keyword_overlap(ctx.net->social.users[u], ctx.query.keywords, ctx.query_bits))
    return {PruneDecision::Verdict::prune, PruneRule::keyword_user};
  return {PruneDecision::Verdict::keep, PruneRule::keyword_user};
}

PruneDecision influence_prune_user(const BoundsContext& ctx, int u) {
  // The mutual-influence requirement binds pairs of distinct members; q
  // coexists with itself vacuously, so the rule must never drop q.
  if (u == ctx.query.q) return {PruneDecision::Verdict::keep, PruneRule::influence_user};
  if (ub_inf_score(ctx, ctx.query.q, u) < ctx.query.theta ||
      ub_inf_score(ctx, u, ctx.query.q) < ctx.query.theta)
    return {PruneDecision::Verdict::prune, PruneRule::influence_user};
  return {PruneDecision::Verdict::keep, PruneRule::influence_user};
}

double node_spatial_lb(const BoundsContext& ctx, const IndexNode& node) {
  double best = 0.0;
  for (int k = 0; k < ctx.idx->cfg.l; ++k) {
    double a = ctx.q_road_row[k];
    double contribution = 0.0;
    if (a < node.road_lb[k])
      contribution = node.road_lb[k] - a;
    else if (a > node.road_ub[k])
      contribution = a - node.road_ub[k];
    best = std::max(best, contribution);
  }
  return best;
}

i64 node_social_lb(const BoundsContext& ctx, const IndexNode& node) {
  i64 best = 0;
  for (int k = 0; k < ctx.idx->cfg.h; ++k) {
    i64 a = ctx.q_social_row[k];
    i64 lb = node.social_lb[k];
    i64 ub = node.social_ub[k];
    if (a == kInfHops && lb == kInfHops) continue;  // both sides dark: no information
    i64 contribution = 0;
    if (a < lb)
      contribution = lb - a;
    else if (a > ub)
      contribution = a - ub;
    best = std::max(best, contribution);
  }
  return best;
}

namespace {

// Largest direct-edge influence from q into (or out of) the node's members.
// A single-edge path is not covered by the product of caps, so the node rule
// must account for it explicitly to stay lossless.
double direct_cap(const SocialSpatialIndex& idx, int node_id,
                  const std::vector<std::pair<int, double>>& edges) {
  double best = 0.0;
  for (auto [v, f] : edges)
    if (idx.user_under(node_id, v)) best = std::max(best, f);
  return best;
}

}  // namespace

PruneDecision node_prune(const BoundsContext& ctx, int node_id, const RuleMask& mask) {
  const IndexNode& node = ctx.idx->nodes[node_id];
  const QuerySpec& q = ctx.query;
  bool literal = ctx.mode == PruneMode::literal;

  if (mask.keyword && !node.bits.intersects(ctx.query_bits))
    return {PruneDecision::Verdict::prune, PruneRule::keyword_node};

  if (mask.support) {
    bool prune = literal ? node.lb_phi < q.k : node.ub_phi < q.k - 2;
    if (prune) return {PruneDecision::Verdict::prune, PruneRule::support_node};
  }

  if (mask.spatial) {
    double lb = node_spatial_lb(ctx, node);
    if (literal ? lb > q.sigma : lb >= q.sigma)
      return {PruneDecision::Verdict::prune, PruneRule::spatial_node};
  }

  if (mask.social) {
    i64 lb = node_social_lb(ctx, node);
    if (literal ? lb > q.d : lb >= q.d)
      return {PruneDecision::Verdict::prune, PruneRule::social_node};
  }

  if (mask.influence && !ctx.idx->user_under(node_id, q.q)) {
    double node_out = fold_topics(node.inf_out, q.topics);
    double node_in = fold_topics(node.inf_in, q.topics);
    double fwd = ctx.q_ub_out * node_in;
    double bwd = node_out * ctx.q_ub_in;
    if (!literal) {
      fwd = std::max(fwd, direct_cap(*ctx.idx, node_id, ctx.q_out_f));
      bwd = std::max(bwd, direct_cap(*ctx.idx, node_id, ctx.q_in_f));
    }
    if (fwd < q.theta || bwd < q.theta)
      return {PruneDecision::Verdict::prune, PruneRule::influence_node};
  }

  return {PruneDecision::Verdict::keep, PruneRule::none};
}

PruneDecision user_prune(const BoundsContext& ctx, int u, const RuleMask& mask) {
  if (mask.keyword) {
    PruneDecision d = keyword_prune_user(ctx, u);
    if (d.pruned()) return d;
  }
  if (mask.support) {
    PruneDecision d = support_prune_user(ctx, u);
    if (d.pruned()) return d;
  }
  if (mask.spatial) {
    PruneDecision d = spatial_prune_user(ctx, u);
    if (d.pruned()) return d;
  }
  if (mask.social) {
    PruneDecision d = social_prune_user(ctx, u);
    if (d.pruned()) return d;
  }
  if (mask.influence) {
    PruneDecision d = influence_prune_user(ctx, u);
    if (d.pruned()) return d;
  }
  return {PruneDecision::Verdict::keep, PruneRule::none};
}

RuleMask rule_mask_for(IndexFlavor flavor) {
  switch (flavor) {
    case IndexFlavor::social_only:
      return {.spatial = false, .social = true, .support = true, .keyword = false,
              .influence = false};
    case IndexFlavor::spatial_only:
      return {.spatial = true, .social = false, .support = false, .keyword = true,
              .influence = false};
    default:
      return {};
  }
}

}  // namespace sstruss
