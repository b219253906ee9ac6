#pragma once

#include "sstruss/network.hpp"

namespace sstruss {

enum class GenDistribution { uniform, gaussian };

struct GenConfig {
  int n_road = 30000;
  int n_users = 30000;
  GenDistribution distribution = GenDistribution::uniform;
  int topic_count = 3;
  int keyword_universe = 10;  // keyword ids 1..keyword_universe
  int degree_min = 1;         // friendship degree draw range
  int degree_max = 10;
  int checkins_min = 1;
  int checkins_max = 3;
  int keywords_min = 1;  // keywords per user (count rule is this artifact's choice)
  int keywords_max = 3;
  u64 rng_seed = 1;
  int bits_width = kDefaultBitsWidth;
};

// Unit-square road graph: nearest-neighbor wiring, then component merging by
// closest cross pairs, then degree top-up; connected with average degree in
// [3,4] once n_road is large enough. Deterministic per seed.
RoadNetwork gen_road(const GenConfig& cfg);

// Friendship graph by degree-sequence stub pairing (degrees drawn uniform or
// clamped-gaussian over the degree range), per-topic directed edge weights in
// [0,1], keywords from the keyword universe, check-ins on road vertices.
SocialNetwork gen_social(const GenConfig& cfg, const RoadNetwork& road);

SpatialSocialNetwork generate_network(const GenConfig& cfg);

}  // namespace sstruss
