#pragma once

#include <string>

#include "sstruss/engine.hpp"

namespace sstruss {

// Five-file TSV dataset: road_nodes.tsv, road_edges.tsv, users.tsv,
// social_edges.tsv, checkins.tsv. UTF-8, LF, '.' decimal separator; one
// header line per file. All ids in files are external ids.
void save_network(const SpatialSocialNetwork& net, const std::string& dir);

// Throws std::runtime_error carrying file:line context for malformed rows
// and dangling id references. Internal ids are dense, ordered by external id.
SpatialSocialNetwork load_network(const std::string& dir,
                                  int bits_width = kDefaultBitsWidth);

struct ParsedQueries {
  std::vector<QuerySpec> specs;
  std::vector<std::string> notes;  // diagnostics (topic renormalization etc.)
  bool batch = false;              // input was a JSON array
};

// Accepts one query object or an array of them; q is an external user id.
// Malformed JSON throws std::runtime_error; semantically invalid queries
// (unknown q, bad ranges) throw std::invalid_argument naming the query's
// position.
ParsedQueries parse_queries(const std::string& json_text, const SpatialSocialNetwork& net);

// Result JSON with external member ids; stable=true zeroes cpu_nanos so
// output can be compared across runs.
std::string result_to_json(const SpatialSocialNetwork& net, const QueryResult& result,
                           bool stable, int indent = -1);

// One object for a single query, an array when as_array is set (batch input).
std::string results_to_json(const SpatialSocialNetwork& net,
                            const std::vector<QueryResult>& results, bool stable,
                            bool as_array, int indent = -1);

}  // namespace sstruss
