#include "sstruss/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace sstruss {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("double formatting failed");
  return std::string(buf, end);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

[[noreturn]] void fail_at(const std::string& path, size_t line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

struct TsvFile {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::pair<size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

TsvFile read_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing file " + path);
  TsvFile file;
  file.path = path;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (file.header.empty())
      file.header = split_tab(line);
    else
      file.rows.push_back({line_no, split_tab(line)});
  }
  if (file.header.empty()) fail_at(path, 1, "missing header line");
  return file;
}

void expect_fields(const TsvFile& f, size_t line, const std::vector<std::string>& fields,
                   size_t want) {
  if (fields.size() != want)
    fail_at(f.path, line,
            "expected " + std::to_string(want) + " fields, got " +
                std::to_string(fields.size()));
}

i64 parse_i64(const TsvFile& f, size_t line, const std::string& s) {
  i64 v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail_at(f.path, line, "malformed integer '" + s + "'");
  return v;
}

double parse_f64(const TsvFile& f, size_t line, const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail_at(f.path, line, "malformed number '" + s + "'");
  return v;
}

}  // namespace

void save_network(const SpatialSocialNetwork& net, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const RoadNetwork& road = net.road;
  const SocialNetwork& soc = net.social;

  std::string s = "id\tx\ty\n";
  for (int i = 0; i < road.vertex_count(); ++i)
    s += std::to_string(road.ext_id[i]) + "\t" + fmt(road.xs[i]) + "\t" + fmt(road.ys[i]) +
         "\n";
  write_file(dir + "/road_nodes.tsv", s);

  s = "src\tdst\tlength\n";
  for (const auto& e : road.edges)
    s += std::to_string(road.ext_id[e.src]) + "\t" + std::to_string(road.ext_id[e.dst]) +
         "\t" + fmt(e.length) + "\n";
  write_file(dir + "/road_edges.tsv", s);

  s = "id\tkeywords\n";
  for (const User& u : soc.users) {
    s += std::to_string(u.ext_id) + "\t";
    for (size_t i = 0; i < u.keywords.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(u.keywords[i]);
    }
    s += "\n";
  }
  write_file(dir + "/users.tsv", s);

  s = "src\tdst";
  for (int j = 1; j <= soc.topic_count; ++j) s += "\tw" + std::to_string(j);
  s += "\n";
  for (const TopicEdge& e : soc.edges) {
    s += std::to_string(soc.users[e.src].ext_id) + "\t" +
         std::to_string(soc.users[e.dst].ext_id);
    for (double w : e.weights) s += "\t" + fmt(w);
    s += "\n";
  }
  write_file(dir + "/social_edges.tsv", s);

  s = "user_id\troad_vertex_id\ttimestamp\n";
  for (const User& u : soc.users)
    for (const CheckIn& c : u.checkins)
      s += std::to_string(u.ext_id) + "\t" + std::to_string(road.ext_id[c.road_vertex]) +
           "\t" + std::to_string(c.timestamp) + "\n";
  write_file(dir + "/checkins.tsv", s);
}

SpatialSocialNetwork load_network(const std::string& dir, int bits_width) {
  SpatialSocialNetwork net;
  RoadNetwork& road = net.road;
  SocialNetwork& soc = net.social;
  soc.bits_width = bits_width;

  {
    TsvFile f = read_tsv(dir + "/road_nodes.tsv");
    if (f.header != std::vector<std::string>{"id", "x", "y"})
      fail_at(f.path, 1, "bad header; expected id, x, y");
    struct Row {
      i64 ext;
      double x, y;
      size_t line;
    };
    std::vector<Row> rows;
    for (auto& [line, fields] : f.rows) {
      expect_fields(f, line, fields, 3);
      rows.push_back({parse_i64(f, line, fields[0]), parse_f64(f, line, fields[1]),
                      parse_f64(f, line, fields[2]), line});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.ext < b.ext; });
    for (size_t i = 1; i < rows.size(); ++i)
      if (rows[i].ext == rows[i - 1].ext)
        fail_at(f.path, rows[i].line, "duplicate vertex id " + std::to_string(rows[i].ext));
    for (const Row& r : rows) road.add_vertex(r.ext, r.x, r.y);
  }
  {
    TsvFile f = read_tsv(dir + "/road_edges.tsv");
    if (f.header != std::vector<std::string>{"src", "dst", "length"})
      fail_at(f.path, 1, "bad header; expected src, dst, length");
    for (auto& [line, fields] : f.rows) {
      expect_fields(f, line, fields, 3);
      i64 se = parse_i64(f, line, fields[0]);
      i64 de = parse_i64(f, line, fields[1]);
      auto si = road.index_of(se), di = road.index_of(de);
      if (!si) fail_at(f.path, line, "unknown vertex id " + std::to_string(se));
      if (!di) fail_at(f.path, line, "unknown vertex id " + std::to_string(de));
      road.add_edge(*si, *di, parse_f64(f, line, fields[2]));
    }
    road.finalize();
  }

  struct UserRow {
    i64 ext;
    std::vector<int> keywords;
    size_t line;
  };
  std::vector<UserRow> user_rows;
  {
    TsvFile f = read_tsv(dir + "/users.tsv");
    if (f.header != std::vector<std::string>{"id", "keywords"})
      fail_at(f.path, 1, "bad header; expected id, keywords");
    for (auto& [line, fields] : f.rows) {
      expect_fields(f, line, fields, 2);
      UserRow r;
      r.ext = parse_i64(f, line, fields[0]);
      r.line = line;
      const std::string& ks = fields[1];
      size_t start = 0;
      while (start < ks.size()) {
        size_t comma = ks.find(',', start);
        if (comma == std::string::npos) comma = ks.size();
        r.keywords.push_back(
            static_cast<int>(parse_i64(f, line, ks.substr(start, comma - start))));
        start = comma + 1;
      }
      user_rows.push_back(std::move(r));
    }
    std::stable_sort(user_rows.begin(), user_rows.end(),
                     [](const UserRow& a, const UserRow& b) { return a.ext < b.ext; });
    for (size_t i = 1; i < user_rows.size(); ++i)
      if (user_rows[i].ext == user_rows[i - 1].ext)
        fail_at(f.path, user_rows[i].line,
                "duplicate user id " + std::to_string(user_rows[i].ext));
  }

  // Check-ins are grouped per user in file order, then attached.
  std::map<i64, std::vector<CheckIn>> checkin_map;
  {
    TsvFile f = read_tsv(dir + "/checkins.tsv");
    if (f.header != std::vector<std::string>{"user_id", "road_vertex_id", "timestamp"})
      fail_at(f.path, 1, "bad header; expected user_id, road_vertex_id, timestamp");
    std::vector<i64> known;
    for (const UserRow& r : user_rows) known.push_back(r.ext);
    for (auto& [line, fields] : f.rows) {
      expect_fields(f, line, fields, 3);
      i64 ue = parse_i64(f, line, fields[0]);
      i64 re = parse_i64(f, line, fields[1]);
      if (!std::binary_search(known.begin(), known.end(), ue))
        fail_at(f.path, line, "unknown user id " + std::to_string(ue));
      auto ri = road.index_of(re);
      if (!ri)
        fail_at(f.path, line,
                "unknown road vertex id " + std::to_string(re) + " for user " +
                    std::to_string(ue));
      checkin_map[ue].push_back({*ri, parse_i64(f, line, fields[2])});
    }
  }
  for (UserRow& r : user_rows) {
    auto it = checkin_map.find(r.ext);
    soc.add_user(r.ext, std::move(r.keywords),
                 it == checkin_map.end() ? std::vector<CheckIn>{} : std::move(it->second));
  }

  {
    TsvFile f = read_tsv(dir + "/social_edges.tsv");
    if (f.header.size() < 2 || f.header[0] != "src" || f.header[1] != "dst")
      fail_at(f.path, 1, "bad header; expected src, dst, w1..wT");
    soc.topic_count = static_cast<int>(f.header.size()) - 2;
    for (auto& [line, fields] : f.rows) {
      expect_fields(f, line, fields, f.header.size());
      i64 se = parse_i64(f, line, fields[0]);
      i64 de = parse_i64(f, line, fields[1]);
      auto si = soc.index_of(se), di = soc.index_of(de);
      if (!si) fail_at(f.path, line, "unknown user id " + std::to_string(se));
      if (!di) fail_at(f.path, line, "unknown user id " + std::to_string(de));
      std::vector<double> w;
      for (size_t j = 2; j < fields.size(); ++j) w.push_back(parse_f64(f, line, fields[j]));
      soc.add_edge(*si, *di, std::move(w));
    }
    soc.finalize();
  }
  return net;
}

namespace {

const json* item_at(const json& items, size_t i) { return &items.at(i); }

std::string query_label(bool batch, size_t i) {
  return batch ? "query[" + std::to_string(i) + "]" : "query";
}

}  // namespace

ParsedQueries parse_queries(const std::string& json_text, const SpatialSocialNetwork& net) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("query JSON: ") + e.what());
  }
  ParsedQueries out;
  out.batch = parsed.is_array();
  json items = out.batch ? parsed : json::array({parsed});

  for (size_t i = 0; i < items.size(); ++i) {
    const json& it = *item_at(items, i);
    const std::string label = query_label(out.batch, i);
    auto bad = [&](const std::string& msg) {
      return std::invalid_argument(label + ": " + msg);
    };
    if (!it.is_object()) throw bad("must be a JSON object");
    for (const char* key : {"q", "k", "d", "sigma", "theta", "topics", "keywords"})
      if (!it.contains(key)) throw bad(std::string("missing field '") + key + "'");
    for (const char* key : {"q", "k", "d"})
      if (!it.at(key).is_number_integer()) throw bad(std::string("field '") + key +
                                                     "' must be an integer");
    for (const char* key : {"sigma", "theta"})
      if (!it.at(key).is_number()) throw bad(std::string("field '") + key +
                                             "' must be a number");
    if (!it.at("topics").is_array()) throw bad("field 'topics' must be an array");
    if (!it.at("keywords").is_array()) throw bad("field 'keywords' must be an array");

    QuerySpec spec;
    i64 q_ext = it.at("q").get<i64>();
    auto qi = net.social.index_of(q_ext);
    if (!qi) throw bad("unknown user id " + std::to_string(q_ext));
    spec.q = *qi;
    spec.k = it.at("k").get<int>();
    spec.d = it.at("d").get<int>();
    spec.sigma = it.at("sigma").get<double>();
    spec.theta = it.at("theta").get<double>();
    for (const json& t : it.at("topics")) {
      if (!t.is_number()) throw bad("topics entries must be numbers");
      spec.topics.push_back(t.get<double>());
    }
    for (const json& k : it.at("keywords")) {
      if (!k.is_number_integer()) throw bad("keywords entries must be integers");
      spec.keywords.push_back(k.get<int>());
    }
    try {
      if (auto note = validate_query(net, spec)) out.notes.push_back(label + ": " + *note);
    } catch (const std::invalid_argument& e) {
      throw bad(e.what());
    }
    out.specs.push_back(std::move(spec));
  }
  return out;
}

namespace {

json result_json_value(const SpatialSocialNetwork& net, const QueryResult& result,
                       bool stable) {
  json j;
  std::vector<i64> members;
  for (int u : result.community.members) members.push_back(net.social.users[u].ext_id);
  std::sort(members.begin(), members.end());
  j["members"] = members;
  j["valid"] = result.community.cert.valid;

  const CommunityCertificate& c = result.community.cert;
  json cert;
  cert["valid"] = c.valid;
  cert["keywords_ok"] = c.keywords_ok;
  cert["connected"] = c.connected;
  cert["spatial_max"] = c.spatial_max;
  cert["hop_max"] = c.hop_max;
  cert["influence_min"] = c.influence_min;
  cert["support_min"] = c.support_min;
  cert["vacuous"] = c.vacuous;
  cert["failing"] = c.failing;
  j["certificate"] = cert;

  json stats;
  stats["cpu_nanos"] = stable ? i64{0} : result.stats.cpu_nanos;
  stats["nodes_visited"] = result.stats.nodes_visited;
  stats["candidates"] = result.stats.candidates_after_pruning;
  stats["peel_iterations"] = result.stats.peel_iterations;
  stats["result_size"] = result.stats.result_size;
  j["stats"] = stats;
  return j;
}

}  // namespace

std::string result_to_json(const SpatialSocialNetwork& net, const QueryResult& result,
                           bool stable, int indent) {
  return result_json_value(net, result, stable).dump(indent);
}

std::string results_to_json(const SpatialSocialNetwork& net,
                            const std::vector<QueryResult>& results, bool stable,
                            bool as_array, int indent) {
  if (!as_array && results.size() == 1)
    return result_json_value(net, results[0], stable).dump(indent);
  json arr = json::array();
  for (const QueryResult& r : results) arr.push_back(result_json_value(net, r, stable));
  return arr.dump(indent);
}

}  // namespace sstruss
