#pragma once

#include "sstruss/engine.hpp"

namespace sstruss {

struct OracleConfig {
  int max_users = 12;            // candidate pool cap
  i64 max_subsets = 1'000'000;   // enumeration safety cap
};

struct OracleResult {
  bool feasible = false;
  std::vector<int> best;  // largest valid set containing q; lexicographic tiebreak
  i64 pool_size = 0;
};

// Exhaustive reference answerer. The pool keeps only users that every valid
// community containing q must admit statically (shared keyword, q-relative
// hop and road-distance bounds, full-graph mutual influence, which upper
// bounds any within-set influence). Enumeration is over all subsets of the
// pool, so instances must be small; breached caps throw.
OracleResult oracle_query(const SpatialSocialNetwork& net, const QuerySpec& query,
                          const OracleConfig& cfg = {});

// Full validity check by deliberately different routes than the engine:
// Floyd-Warshall hop matrix, subset triangle counting, max-product closure
// confirmed against exhaustive simple-path search.
bool oracle_validate(const SpatialSocialNetwork& net, const QuerySpec& query,
                     const std::vector<int>& members);

// True iff no strict superset of members (drawn from the oracle pool) is a
// valid community.
bool oracle_no_valid_superset(const SpatialSocialNetwork& net, const QuerySpec& query,
                              const std::vector<int>& members, const OracleConfig& cfg = {});

// Index-free answerer: breadth-first social expansion from q with exact
// per-user filters, then the shared refinement.
QueryResult greedy_baseline(const SpatialSocialNetwork& net, const QuerySpec& query);

// Single-axis index answerers: the shared traversal restricted to one rule
// family by the index flavor, then the shared refinement. The index must
// carry the matching flavor.
QueryResult sindex_baseline(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                            const QuerySpec& query, PruneMode mode = PruneMode::sound);
QueryResult rindex_baseline(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                            const QuerySpec& query, PruneMode mode = PruneMode::sound);

}  // namespace sstruss
