#pragma once

#include "sstruss/prune.hpp"

namespace sstruss {

struct CommunityCertificate {
  bool valid = false;
  bool keywords_ok = false;
  bool connected = false;
  double spatial_max = 0.0;   // max pairwise mean road distance
  int hop_max = 0;            // max pairwise hop distance (full graph)
  double influence_min = 1.0; // min mutual influence, paths inside the set
  int support_min = 0;        // min edge support inside the set
  bool vacuous = false;       // singleton: no pairs or edges to witness
  std::vector<std::string> failing;  // named clauses; nonempty iff !valid
};

struct Community {
  std::vector<int> members;  // sorted ascending
  CommunityCertificate cert;
};

struct QueryStats {
  i64 cpu_nanos = 0;
  i64 nodes_visited = 0;
  i64 candidates_after_pruning = 0;
  i64 peel_iterations = 0;
  i64 result_size = 0;
};

struct QueryResult {
  Community community;
  QueryStats stats;
};

// Verifies a member set against every community clause from scratch: exact
// set intersections, BFS connectivity and hops, cubic triangle counts, and
// max-product influence via Floyd-Warshall (deliberately a different route
// than the engine's shortest-path formulation).
CommunityCertificate check_community(const SpatialSocialNetwork& net, const QuerySpec& query,
                                     const std::vector<int>& members,
                                     RoadRowCache* shared_cache = nullptr);

// Best-first index traversal; returns surviving candidates (q included),
// sorted ascending.
std::vector<int> collect_candidates(const SpatialSocialNetwork& net,
                                    const SocialSpatialIndex& idx, const BoundsContext& ctx,
                                    QueryStats& stats);

// Deterministic peel-to-fixpoint over the candidate set: keyword and
// q-relative filters, truss peeling with q-connectivity, then single
// worst-offender removals for non-q pairwise violations; finally grows the
// survivor set back to a locally maximal community (no valid superset over
// the statically compatible users of the whole graph).
Community refine(const SpatialSocialNetwork& net, const QuerySpec& query,
                 const std::vector<int>& candidates, QueryStats& stats);

QueryResult answer_query(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                         const QuerySpec& query, PruneMode mode = PruneMode::sound);

// One shared traversal: a node is descended for the union of queries that
// keep it; per-query candidate sets and refinement match standalone answers.
std::vector<QueryResult> answer_batch(const SpatialSocialNetwork& net,
                                      const SocialSpatialIndex& idx,
                                      const std::vector<QuerySpec>& queries,
                                      PruneMode mode = PruneMode::sound);

}  // namespace sstruss
