#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sstruss/baselines.hpp"
#include "sstruss/datagen.hpp"
#include "sstruss/io.hpp"

namespace {

using nlohmann::json;
using namespace sstruss;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitQuery = 4;

int worker_count() {
  if (const char* env = std::getenv("SSTRUSS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1) on a worker pool; callers merge by index for determinism.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

struct GenFlags {
  std::string out;
  GenConfig cfg;
};

int cmd_gen(const GenFlags& f) {
  SpatialSocialNetwork net = generate_network(f.cfg);
  save_network(net, f.out);
  json summary;
  summary["out"] = f.out;
  summary["road_vertices"] = net.road.vertex_count();
  summary["road_edges"] = net.road.edges.size();
  summary["users"] = net.social.user_count();
  summary["social_edges"] = net.social.edges.size();
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

struct BuildFlags {
  std::string net_dir, out;
  IndexConfig cfg;
};

int cmd_build(const BuildFlags& f) {
  SpatialSocialNetwork net = load_network(f.net_dir);
  BuildReport report;
  SocialSpatialIndex idx = build_index(net, f.cfg, &report);
  write_file(f.out, serialize_index(idx));
  json summary;
  summary["out"] = f.out;
  summary["build_nanos"] = report.build_nanos;
  summary["road_pivot_cost"] = report.road_pivot_cost;
  summary["social_pivot_cost"] = report.social_pivot_cost;
  summary["index_pivot_cost"] = report.index_pivot_cost;
  summary["iota"] = idx.cfg.iota;
  summary["nodes"] = idx.nodes.size();
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

struct QueryFlags {
  std::string net_dir, index_path, query_path;
  PruneMode mode = PruneMode::sound;
  bool stable = false;
};

int cmd_query(const QueryFlags& f) {
  SpatialSocialNetwork net = load_network(f.net_dir);
  SocialSpatialIndex idx = deserialize_index(read_file(f.index_path));
  ParsedQueries parsed = parse_queries(read_file(f.query_path), net);
  for (const std::string& note : parsed.notes) std::cerr << note << "\n";
  std::vector<QueryResult> results;
  if (parsed.batch)
    results = answer_batch(net, idx, parsed.specs, f.mode);
  else
    results.push_back(answer_query(net, idx, parsed.specs.at(0), f.mode));
  std::cout << results_to_json(net, results, f.stable, parsed.batch) << "\n";
  return kExitOk;
}

struct BenchFlags {
  std::string net_dir, index_path, grid_path, out;
  std::string algos = "engine,greedy,sindex,rindex";
  PruneMode mode = PruneMode::sound;
};

struct GridPoint {
  std::string axis;
  std::string value;
  QuerySpec spec;
};

std::vector<GridPoint> parse_grid(const std::string& text, const SpatialSocialNetwork& net) {
  json g;
  try {
    g = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("grid JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const json& {
    if (!g.contains(key))
      throw std::invalid_argument(std::string("grid: missing field '") + key + "'");
    return g.at(key);
  };
  i64 q_ext = need("q").get<i64>();
  auto qi = net.social.index_of(q_ext);
  if (!qi) throw std::invalid_argument("grid: unknown user id " + std::to_string(q_ext));
  std::vector<int> pool = need("keyword_pool").get<std::vector<int>>();
  std::vector<int> kq_sizes = need("kq_sizes").get<std::vector<int>>();
  std::vector<int> topic_sizes = need("topic_sizes").get<std::vector<int>>();
  std::vector<double> sigmas = need("sigma").get<std::vector<double>>();
  std::vector<double> thetas = need("theta").get<std::vector<double>>();
  std::vector<int> ks = need("k").get<std::vector<int>>();
  std::vector<int> ds = need("d").get<std::vector<int>>();
  const json& dflt = need("defaults");

  const int t_count = net.social.topic_count;
  auto make_spec = [&](int kq, int ts, double sigma, double theta, int k, int d) {
    if (kq > static_cast<int>(pool.size()))
      throw std::invalid_argument("grid: kq size exceeds keyword_pool");
    if (ts > t_count) throw std::invalid_argument("grid: topic size exceeds topic count");
    QuerySpec s;
    s.q = *qi;
    s.k = k;
    s.d = d;
    s.sigma = sigma;
    s.theta = theta;
    s.keywords.assign(pool.begin(), pool.begin() + kq);
    s.topics.assign(t_count, 0.0);
    for (int j = 0; j < ts; ++j) s.topics[j] = 1.0 / ts;
    validate_query(net, s);
    return s;
  };
  int d_kq = dflt.at("kq_size").get<int>();
  int d_ts = dflt.at("topic_size").get<int>();
  double d_sigma = dflt.at("sigma").get<double>();
  double d_theta = dflt.at("theta").get<double>();
  int d_k = dflt.at("k").get<int>();
  int d_d = dflt.at("d").get<int>();

  std::vector<GridPoint> points;
  auto fmtd = [](double v) {
    json j = v;
    return j.dump();
  };
  for (int v : kq_sizes)
    points.push_back({"kq", std::to_string(v),
                      make_spec(v, d_ts, d_sigma, d_theta, d_k, d_d)});
  for (int v : topic_sizes)
    points.push_back({"topics", std::to_string(v),
                      make_spec(d_kq, v, d_sigma, d_theta, d_k, d_d)});
  for (double v : sigmas)
    points.push_back({"sigma", fmtd(v), make_spec(d_kq, d_ts, v, d_theta, d_k, d_d)});
  for (double v : thetas)
    points.push_back({"theta", fmtd(v), make_spec(d_kq, d_ts, d_sigma, v, d_k, d_d)});
  for (int v : ks)
    points.push_back({"k", std::to_string(v),
                      make_spec(d_kq, d_ts, d_sigma, d_theta, v, d_d)});
  for (int v : ds)
    points.push_back({"d", std::to_string(v),
                      make_spec(d_kq, d_ts, d_sigma, d_theta, d_k, v)});
  return points;
}

int cmd_bench(const BenchFlags& f) {
  SpatialSocialNetwork net = load_network(f.net_dir);
  SocialSpatialIndex idx = deserialize_index(read_file(f.index_path));
  std::vector<GridPoint> points = parse_grid(read_file(f.grid_path), net);

  std::vector<std::string> algos;
  {
    std::set<std::string> seen;
    std::string token;
    for (char c : f.algos + ",") {
      if (c != ',') {
        token += c;
        continue;
      }
      if (token.empty()) continue;
      if (token != "engine" && token != "greedy" && token != "sindex" && token != "rindex")
        throw std::invalid_argument("unknown algo '" + token + "'");
      if (seen.insert(token).second) algos.push_back(token);
      token.clear();
    }
  }

  std::optional<SocialSpatialIndex> social_idx, spatial_idx;
  auto flavored = [&](IndexFlavor flavor) {
    IndexConfig cfg = idx.cfg;
    cfg.flavor = flavor;
    return build_index(net, cfg);
  };
  for (const std::string& a : algos) {
    if (a == "sindex") social_idx = flavored(IndexFlavor::social_only);
    if (a == "rindex") spatial_idx = flavored(IndexFlavor::spatial_only);
  }

  std::vector<std::string> chunks(points.size());
  parallel_for(static_cast<int>(points.size()), [&](int i) {
    const GridPoint& p = points[i];
    std::string rows;
    for (const std::string& a : algos) {
      QueryResult r;
      if (a == "engine")
        r = answer_query(net, idx, p.spec, f.mode);
      else if (a == "greedy")
        r = greedy_baseline(net, p.spec);
      else if (a == "sindex")
        r = sindex_baseline(net, *social_idx, p.spec, f.mode);
      else
        r = rindex_baseline(net, *spatial_idx, p.spec, f.mode);
      rows += a + "," + p.axis + "," + p.value + "," + std::to_string(r.stats.cpu_nanos) +
              "," + std::to_string(r.stats.nodes_visited) + "," +
              std::to_string(r.stats.candidates_after_pruning) + "," +
              std::to_string(r.stats.result_size) + "\n";
    }
    chunks[i] = std::move(rows);
  });

  std::string csv = "algo,axis,value,cpu_nanos,nodes_visited,candidates,result_size\n";
  for (const std::string& c : chunks) csv += c;
  if (f.out.empty())
    std::cout << csv;
  else
    write_file(f.out, csv);
  return kExitOk;
}

struct VerifyFlags {
  std::string net_dir, index_path;
  int trials = 200;
  u64 seed = 1;
  bool inject_fault = false;
};

struct TrialOutcome {
  bool failed = false;
  std::string why;
  std::string reproducer;
  bool oracle_checked = false;
  bool oracle_skipped = false;
  bool mode_diff = false;
  i64 sandwich_pairs = 0;
  i64 safety_members = 0;
};

QuerySpec draw_query(Rng& rng, const SpatialSocialNetwork& net,
                     const std::vector<int>& keyword_universe) {
  QuerySpec s;
  const int m = net.social.user_count();
  s.q = static_cast<int>(rng.below(m));
  s.k = 2 + static_cast<int>(rng.below(4));
  s.d = 1 + static_cast<int>(rng.below(5));
  s.sigma = 0.3 + rng.unit() * 4.7;
  s.theta = rng.unit();
  int nk = 1 + static_cast<int>(rng.below(3));
  nk = std::min<int>(nk, static_cast<int>(keyword_universe.size()));
  std::set<int> kws;
  while (static_cast<int>(kws.size()) < nk)
    kws.insert(keyword_universe[rng.below(keyword_universe.size())]);
  s.keywords.assign(kws.begin(), kws.end());
  s.topics.resize(net.social.topic_count);
  for (double& t : s.topics) t = 0.1 + 0.9 * rng.unit();
  validate_query(net, s);
  return s;
}

std::string make_reproducer(const SpatialSocialNetwork& net, const QuerySpec& s, int trial,
                            u64 seed, const std::string& why) {
  json j;
  j["trial"] = trial;
  j["seed"] = seed;
  j["why"] = why;
  json q;
  q["q"] = net.social.users[s.q].ext_id;
  q["k"] = s.k;
  q["d"] = s.d;
  q["sigma"] = s.sigma;
  q["theta"] = s.theta;
  q["keywords"] = s.keywords;
  q["topics"] = s.topics;
  j["query"] = q;
  return j.dump();
}

TrialOutcome run_trial(const SpatialSocialNetwork& net, const SocialSpatialIndex& idx,
                       const VerifyFlags& f, const std::vector<int>& keyword_universe,
                       int trial) {
  TrialOutcome out;
  Rng rng(f.seed ^ (static_cast<u64>(trial) + 1) * 0x9e3779b97f4a7c15ULL);
  QuerySpec spec = draw_query(rng, net, keyword_universe);
  auto fail = [&](const std::string& why) {
    if (!out.failed) {
      out.failed = true;
      out.why = why;
      out.reproducer = make_reproducer(net, spec, trial, f.seed, why);
    }
  };

  QueryResult sound = answer_query(net, idx, spec, PruneMode::sound);
  QueryResult literal = answer_query(net, idx, spec, PruneMode::literal);
  out.mode_diff = sound.community.members != literal.community.members;

  QueryResult again = answer_query(net, idx, spec, PruneMode::sound);
  if (again.community.members != sound.community.members ||
      again.stats.candidates_after_pruning != sound.stats.candidates_after_pruning)
    fail("nondeterministic answer");

  const CommunityCertificate& cert = sound.community.cert;
  if (cert.valid != cert.failing.empty()) fail("certificate failing-clause mismatch");

  BoundsContext ctx = make_bounds_context(net, idx, spec, PruneMode::sound);
  if (f.inject_fault) ctx.bound_fault_scale = 3.0;

  const int m = net.social.user_count();
  RoadRowCache road(net.road);
  std::vector<int> hops_q = social_hops(net.social, spec.q);
  std::vector<double> inf_from = influence_from(net.social, spec.q, spec.topics);
  std::vector<double> inf_to = influence_to(net.social, spec.q, spec.topics);
  const int sample = std::min(m, 50);
  for (int i = 0; i < sample && !out.failed; ++i) {
    int u = static_cast<int>(rng.below(m));
    if (u == spec.q) continue;
    double exact = road.avg_dist(net.social.users[spec.q], net.social.users[u]);
    if (lb_avg_dist_rn(ctx, u) > exact + 1e-9) fail("spatial lower bound exceeds exact");
    if (ub_avg_dist_rn(ctx, u) < exact - 1e-9) fail("spatial upper bound below exact");
    int lbh = lb_dist_sn(ctx, u);
    if (lbh == kInfHops ? hops_q[u] != kInfHops : lbh > hops_q[u])
      fail("social lower bound exceeds exact");
    if (ub_dist_sn(ctx, u) < hops_q[u]) fail("social upper bound below exact");
    if (ub_inf_score(ctx, spec.q, u) < inf_from[u] - 1e-12)
      fail("influence upper bound below exact");
    if (ub_inf_score(ctx, u, spec.q) < inf_to[u] - 1e-12)
      fail("influence upper bound below exact");
    ++out.sandwich_pairs;
  }

  const RuleMask mask = rule_mask_for(idx.cfg.flavor);
  for (int u : sound.community.members) {
    if (u == spec.q || out.failed) continue;
    if (user_prune(ctx, u, mask).pruned()) fail("sound user rule prunes a member");
    for (int node = idx.user_leaf[u]; node >= 0; node = idx.nodes[node].parent)
      if (node_prune(ctx, node, mask).pruned()) {
        fail("sound node rule prunes a member's node");
        break;
      }
    ++out.safety_members;
  }

  if (m <= 512 && !out.failed) {
    try {
      OracleResult oracle = oracle_query(net, spec);
      out.oracle_checked = true;
      if (oracle.feasible != cert.valid)
        fail("oracle feasibility mismatch");
      else if (cert.valid) {
        if (!oracle_validate(net, spec, sound.community.members))
          fail("oracle rejects engine community");
        else if (!oracle_no_valid_superset(net, spec, sound.community.members))
          fail("valid superset of engine community exists");
      }
    } catch (const std::runtime_error&) {
      out.oracle_skipped = true;
      out.oracle_checked = false;
    }
  } else if (!out.failed) {
    out.oracle_skipped = true;
  }
  return out;
}

int cmd_verify(const VerifyFlags& f) {
  SpatialSocialNetwork net = load_network(f.net_dir);
  SocialSpatialIndex idx = deserialize_index(read_file(f.index_path));
  if (f.trials == 0) std::cerr << "warning: --trials 0, vacuous pass\n";

  std::vector<int> keyword_universe;
  {
    std::set<int> kws;
    for (const User& u : net.social.users) kws.insert(u.keywords.begin(), u.keywords.end());
    keyword_universe.assign(kws.begin(), kws.end());
    if (keyword_universe.empty()) keyword_universe.push_back(1);
  }

  std::vector<TrialOutcome> outcomes(f.trials);
  parallel_for(f.trials,
               [&](int t) { outcomes[t] = run_trial(net, idx, f, keyword_universe, t); });

  json report;
  i64 failures = 0, oracle_checked = 0, oracle_skipped = 0, mode_diffs = 0;
  i64 sandwich_pairs = 0, safety_members = 0;
  std::string first_repro;
  for (const TrialOutcome& o : outcomes) {
    failures += o.failed;
    oracle_checked += o.oracle_checked;
    oracle_skipped += o.oracle_skipped;
    mode_diffs += o.mode_diff;
    sandwich_pairs += o.sandwich_pairs;
    safety_members += o.safety_members;
    if (o.failed && first_repro.empty()) first_repro = o.reproducer;
  }
  report["trials"] = f.trials;
  report["failures"] = failures;
  report["oracle_checked"] = oracle_checked;
  report["oracle_skipped"] = oracle_skipped;
  report["mode_diffs"] = mode_diffs;
  report["sandwich_pairs"] = sandwich_pairs;
  report["safety_members"] = safety_members;
  report["status"] = failures == 0 ? "pass" : "fail";
  std::cout << report.dump() << "\n";
  if (failures > 0) {
    std::cerr << "reproducer: " << first_repro << "\n";
    return kExitVerifyFail;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-based community search over spatial-social networks"};
  app.require_subcommand(1);

  const std::map<std::string, GenDistribution> dist_names{
      {"uniform", GenDistribution::uniform}, {"gaussian", GenDistribution::gaussian}};
  const std::map<std::string, IndexFlavor> flavor_names{
      {"full", IndexFlavor::full},
      {"social", IndexFlavor::social_only},
      {"spatial", IndexFlavor::spatial_only}};
  const std::map<std::string, PruneMode> mode_names{{"sound", PruneMode::sound},
                                                    {"literal", PruneMode::literal}};

  GenFlags gen;
  auto* cg = app.add_subcommand("gen", "generate a synthetic network dataset");
  cg->add_option("--out", gen.out, "output directory")->required();
  cg->add_option("--n-road", gen.cfg.n_road, "road vertices");
  cg->add_option("--n-users", gen.cfg.n_users, "social users");
  cg->add_option("--dist", gen.cfg.distribution, "draw distribution")
      ->transform(CLI::CheckedTransformer(dist_names, CLI::ignore_case));
  cg->add_option("--seed", gen.cfg.rng_seed, "rng seed");
  cg->add_option("--topics", gen.cfg.topic_count, "topic count");
  cg->add_option("--keyword-universe", gen.cfg.keyword_universe, "keyword id range 1..N");
  cg->add_option("--degree-min", gen.cfg.degree_min, "min friendship degree");
  cg->add_option("--degree-max", gen.cfg.degree_max, "max friendship degree");
  cg->add_option("--checkins-min", gen.cfg.checkins_min, "min check-ins per user");
  cg->add_option("--checkins-max", gen.cfg.checkins_max, "max check-ins per user");
  cg->add_option("--keywords-min", gen.cfg.keywords_min, "min keywords per user");
  cg->add_option("--keywords-max", gen.cfg.keywords_max, "max keywords per user");

  BuildFlags build;
  auto* cb = app.add_subcommand("build", "build and serialize the index");
  // The social pivot count flag is --h, so the help flag keeps only its long
  // form here.
  cb->set_help_flag("--help", "print help and exit");
  cb->add_option("--net", build.net_dir, "network dataset directory")->required();
  cb->add_option("--out", build.out, "output index file")->required();
  cb->add_option("--l", build.cfg.l, "road pivot count");
  cb->add_option("--h", build.cfg.h, "social pivot count");
  cb->add_option("--iota", build.cfg.iota, "leaf partition count (0 = auto)");
  cb->add_option("--fanout", build.cfg.fanout, "tree fanout");
  cb->add_option("--seed", build.cfg.pivot.rng_seed, "pivot search seed");
  cb->add_option("--flavor", build.cfg.flavor, "index flavor")
      ->transform(CLI::CheckedTransformer(flavor_names, CLI::ignore_case));
  cb->add_flag("--literal-pivot-cost", build.cfg.pivot.literal_road_cost,
               "use the textbook (minimizing) road pivot objective");

  QueryFlags query;
  auto* cq = app.add_subcommand("query", "answer a query file (object or array)");
  cq->add_option("--net", query.net_dir, "network dataset directory")->required();
  cq->add_option("--index", query.index_path, "index file")->required();
  cq->add_option("--query", query.query_path, "query JSON file")->required();
  cq->add_option("--prune-mode", query.mode, "pruning mode")
      ->transform(CLI::CheckedTransformer(mode_names, CLI::ignore_case));
  cq->add_flag("--stable-output", query.stable, "zero cpu_nanos for golden comparisons");

  BenchFlags bench;
  auto* cn = app.add_subcommand("bench", "one-factor-at-a-time parameter sweep");
  cn->add_option("--net", bench.net_dir, "network dataset directory")->required();
  cn->add_option("--index", bench.index_path, "index file")->required();
  cn->add_option("--grid", bench.grid_path, "grid JSON file")->required();
  cn->add_option("--algos", bench.algos, "comma list of engine,greedy,sindex,rindex");
  cn->add_option("--out", bench.out, "CSV output file (default stdout)");
  cn->add_option("--prune-mode", bench.mode, "pruning mode")
      ->transform(CLI::CheckedTransformer(mode_names, CLI::ignore_case));

  VerifyFlags verify;
  auto* cv = app.add_subcommand("verify", "randomized property suite");
  cv->add_option("--net", verify.net_dir, "network dataset directory")->required();
  cv->add_option("--index", verify.index_path, "index file")->required();
  cv->add_option("--trials", verify.trials, "trial count")->check(CLI::NonNegativeNumber);
  cv->add_option("--seed", verify.seed, "rng seed");
  cv->add_flag("--inject-fault", verify.inject_fault, "corrupt a bound (harness smoke test)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto run = [&](auto&& fn, int invalid_code) {
    try {
      return fn();
    } catch (const IndexFormatError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return invalid_code;
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::runtime_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
  };

  if (app.got_subcommand(cg)) return run([&] { return cmd_gen(gen); }, kExitConfig);
  if (app.got_subcommand(cb)) return run([&] { return cmd_build(build); }, kExitConfig);
  if (app.got_subcommand(cq)) return run([&] { return cmd_query(query); }, kExitQuery);
  if (app.got_subcommand(cn)) return run([&] { return cmd_bench(bench); }, kExitQuery);
  if (app.got_subcommand(cv)) return run([&] { return cmd_verify(verify); }, kExitQuery);
  return kExitConfig;
}
