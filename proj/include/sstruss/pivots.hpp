#pragma once

#include <utility>
#include <vector>

#include "sstruss/metrics.hpp"
#include "sstruss/network.hpp"

namespace sstruss {

enum class PivotKind { road, social, index };

// Terms of the per-user assignment quality; single-axis index variants
// partition on their own axis only.
enum class QualityTerms { both, social_term, road_term };

struct PivotSet {
  PivotKind kind = PivotKind::road;
  std::vector<int> ids;  // road vertices for road kind, users otherwise
};

struct PivotSearchConfig {
  int global_iter = 5;
  int swap_iter = 50;
  double w1 = 1.0 / 3.0, w2 = 1.0 / 3.0, w3 = 1.0 / 3.0;
  int sample_pairs = 2000;
  u64 rng_seed = 1;
  bool literal_road_cost = false;  // minimize the road objective instead
  QualityTerms terms = QualityTerms::both;
};

struct PivotSelection {
  PivotSet set;
  double cost = 0.0;
};

// Per-user distances to the chosen pivots; row-major M x l / M x h.
struct PivotDistanceTables {
  int l = 0, h = 0;
  std::vector<double> road;
  std::vector<int> social;

  double road_at(int user, int k) const { return road[static_cast<size_t>(user) * l + k]; }
  int social_at(int user, int k) const { return social[static_cast<size_t>(user) * h + k]; }
};

// Mean road distance from every user's check-ins to one road vertex.
std::vector<double> user_avg_dist_column(const SpatialSocialNetwork& net, int road_vertex);

// Mean road distance between every user and one pivot user.
std::vector<double> user_user_avg_column(const SpatialSocialNetwork& net, int pivot_user);

// Ordered user pairs, uniformly sampled without replacement; every ordered
// pair when the budget covers them all.
std::vector<std::pair<int, int>> sample_user_pairs(int user_count, int budget, Rng& rng);

// Spread objectives over sampled pairs: sum over pairs of the max per-pivot
// row difference. Larger spreads tighten the triangle-style bounds.
double cost_road_pivots(const SpatialSocialNetwork& net, const std::vector<int>& pivots,
                        const std::vector<std::pair<int, int>>& pairs);
// Hop variant; unreachable entries are capped at (max finite hop + 1) per
// pivot column before differencing.
double cost_social_pivots(const SocialNetwork& soc, const std::vector<int>& pivots,
                          const std::vector<std::pair<int, int>>& pairs);

struct QualityMeasures {
  double sc = 0.0;  // intra-group spatial distance mass
  double st = 0.0;  // intra-group support-over-hops mass
  double inf = 0.0; // intra-group influence mass (uniform topic vector)
};

// Exact raw sums over all ordered intra-group pairs. Quadratic; meant for
// small instances and tests. Pairs with hop distance 0 or unreachable
// contribute 0 to st.
QualityMeasures subgraph_quality_measures(const SpatialSocialNetwork& net,
                                          const std::vector<int>& assignment, int group_count);

// Combined partition objective (minimized): w1*sc + w2*(1-st) + w3*(1-inf),
// each measure min-max normalized against [lo, hi] and clamped to [0,1].
double cost_index_pivots(const QualityMeasures& raw, const QualityMeasures& lo,
                         const QualityMeasures& hi, const PivotSearchConfig& cfg);

// Swap-based local search: global_iter random restarts, swap_iter single-pivot
// swaps each, keeping improving swaps; the best restart wins (first wins on
// ties). Deterministic for a fixed seed.
PivotSelection select_pivots(const SpatialSocialNetwork& net, PivotKind kind, int count,
                             const PivotSearchConfig& cfg);

// Assigns every user to the pivot minimizing
//   avg_dist_rn(v, piv)/max_avg_dist + hops(v, piv)/max_hops,
// ties to the smallest pivot index. Returns per-user group indices.
std::vector<int> gen_subgraphs(const SpatialSocialNetwork& net,
                               const std::vector<int>& pivot_users,
                               QualityTerms terms = QualityTerms::both);

PivotDistanceTables build_distance_tables(const SpatialSocialNetwork& net,
                                          const std::vector<int>& road_pivots,
                                          const std::vector<int>& social_pivots);

}  // namespace sstruss
