#include "lastmile/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "lastmile/data_model.hpp"
#include "lastmile/scoring.hpp"

namespace lastmile {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using ArgMap = std::map<std::string, std::string>;

void write_manifest(const std::string& out_base, const std::string& command,
                    const ArgMap& args, const std::vector<std::string>& inputs) {
  json j;
  j["command"] = command;
  j["args"] = args;
  j["inputs"] = inputs;
  std::vector<std::string> parts;
  for (const auto& [k, v] : args) parts.push_back(k + "=" + v);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(command + ";" + join(parts, ";"))));
  j["config_hash"] = hash;
  write_text_file(out_base + ".manifest.json", j.dump(1) + "\n");
}

std::vector<RouteInstance> load_or_die(const std::string& dir, bool warn_errors = true) {
  IngestResult res = ingest(dir);
  if (warn_errors) {
    for (const auto& e : res.errors) {
      std::cerr << "warning: route " << e.route << " failed validation: " << e.message << "\n";
    }
  }
  if (res.instances.empty()) {
    throw ValidationError("no valid route instances in " + dir);
  }
  return std::move(res.instances);
}

// Sequence files map route -> order map (any single key) or route -> id list.
std::map<RouteId, StopSequence> read_sequence_file(const std::string& path) {
  json j = json::parse(read_text_file(path));
  std::map<RouteId, StopSequence> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json* body = &it.value();
    if (body->is_object() && body->size() == 1 && body->begin().value().is_object()) {
      body = &body->begin().value();
    }
    StopSequence seq;
    if (body->is_array()) {
      for (const auto& sid : *body) seq.push_back(sid.get<std::string>());
    } else {
      std::vector<std::pair<long long, StopId>> order;
      for (auto s = body->begin(); s != body->end(); ++s) {
        order.emplace_back(s.value().get<long long>(), s.key());
      }
      std::sort(order.begin(), order.end());
      for (auto& [pos, sid] : order) seq.push_back(sid);
    }
    out[it.key()] = std::move(seq);
  }
  return out;
}

void write_sequence_file(const std::string& path,
                         const std::map<RouteId, StopSequence>& sequences) {
  json j = json::object();
  for (const auto& [rid, seq] : sequences) {
    json order = json::object();
    for (size_t i = 0; i < seq.size(); ++i) order[seq[i]] = static_cast<long long>(i);
    j[rid] = json{{"proposed", std::move(order)}};
  }
  write_text_file(path, j.dump(1) + "\n");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// station -> instances; single "all" group unless per_depot.
std::map<std::string, std::vector<RouteInstance>> group_by_station(
    const std::vector<RouteInstance>& instances, bool per_depot) {
  std::map<std::string, std::vector<RouteInstance>> groups;
  for (const auto& inst : instances) {
    groups[per_depot ? inst.station : std::string("all")].push_back(inst);
  }
  return groups;
}

const std::vector<double>* theta_for(const ThetaMap& thetas, const std::string& station) {
  auto it = thetas.find(station);
  if (it == thetas.end()) it = thetas.find("all");
  return it == thetas.end() ? nullptr : &it->second;
}

size_t theta_dim_for(const std::string& method) {
  if (method == "hrlp") return kZoneFeatureCount;
  if (method == "stop-bo") return kStopFeatureCount;
  throw ConfigError("method '" + method + "' does not take weights");
}

struct MethodRouter {
  std::string method;
  ThetaMap thetas;
  RouterOptions ropts;

  // Empty when the route cannot be handled (missing weights).
  std::optional<StopSequence> route(const RouteInstance& inst) const {
    if (method == "tsp") return standard_tsp(inst, ropts.solver);
    const std::vector<double>* theta = theta_for(thetas, inst.station);
    if (!theta) return std::nullopt;
    if (method == "hrlp") return route_instance(inst, *theta, ropts);
    if (method == "stop-bo") return stop_level_route(inst, *theta, ropts.solver);
    throw ConfigError("unknown routing method: " + method);
  }
};

}  // namespace

ThetaMap parse_theta_spec(const std::string& spec, size_t expected_dim) {
  if (spec.empty()) throw ConfigError("missing theta weights");
  if (spec.find(',') != std::string::npos) {
    std::vector<double> theta;
    for (const auto& tok : split_csv_line(spec)) {
      try {
        theta.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad inline theta value: " + tok);
      }
    }
    check_theta_bounds(theta, expected_dim);
    return {{"all", theta}};
  }
  return load_theta_file(spec, expected_dim);
}

ThetaMap load_theta_file(const std::string& path, size_t expected_dim) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("theta file " + path + ": " + e.what());
  }
  ThetaMap out;
  if (j.is_array()) {
    out["all"] = j.get<std::vector<double>>();
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      out[it.key()] = it.value().get<std::vector<double>>();
    }
  } else {
    throw ConfigError("theta file must hold an array or a station map");
  }
  for (const auto& [station, theta] : out) check_theta_bounds(theta, expected_dim);
  return out;
}

void write_theta_file(const std::string& path, const ThetaMap& thetas) {
  json j = json::object();
  for (const auto& [station, theta] : thetas) j[station] = theta;
  write_text_file(path, j.dump(1) + "\n");
}

int run_ingest(const IngestCmd& cmd) {
  IngestResult res = ingest(cmd.in);
  int high = 0, medium = 0, low = 0, unrated = 0;
  for (const auto& inst : res.instances) {
    if (!inst.rating) {
      ++unrated;
    } else if (*inst.rating == Rating::high) {
      ++high;
    } else if (*inst.rating == Rating::medium) {
      ++medium;
    } else {
      ++low;
    }
  }
  std::cout << "instances: " << res.instances.size() << " (high " << high << ", medium "
            << medium << ", low " << low << ", unrated " << unrated << ")\n";
  std::cout << "validation errors: " << res.errors.size() << "\n";
  for (const auto& e : res.errors) {
    std::cout << "  " << e.route << ": " << e.message << "\n";
  }
  if (!cmd.report.empty()) {
    std::string csv = "route_id,error\n";
    for (const auto& e : res.errors) csv += e.route + "," + e.message + "\n";
    write_text_file(cmd.report, csv);
  }
  return res.errors.empty() ? kExitOk : kExitValidation;
}

int run_synth(const SynthCmd& cmd) {
  if (cmd.routes < 1) throw ConfigError("synth: need at least one route");
  std::vector<RouteInstance> instances;
  for (int i = 0; i < cmd.routes; ++i) {
    SynthSpec spec;
    spec.n_zones = cmd.zones;
    spec.stops_min = cmd.stops_min;
    spec.stops_max = cmd.stops_max;
    spec.seed = cmd.seed + static_cast<uint64_t>(i);
    spec.noise_frac = cmd.noise;
    char rid[32];
    std::snprintf(rid, sizeof(rid), "SYNTH_%04d", i);
    spec.id = rid;
    spec.station = "SYNTH_ST_" + std::to_string(i % std::max(1, cmd.stations));
    instances.push_back(synth_instance(spec));
  }
  write_dataset(cmd.out, instances);
  write_manifest(cmd.out + "/dataset", "synth",
                 {{"routes", std::to_string(cmd.routes)},
                  {"zones", std::to_string(cmd.zones)},
                  {"stops_min", std::to_string(cmd.stops_min)},
                  {"stops_max", std::to_string(cmd.stops_max)},
                  {"stations", std::to_string(cmd.stations)},
                  {"noise", fmt_double(cmd.noise)},
                  {"seed", std::to_string(cmd.seed)}},
                 {});
  std::cout << "wrote " << instances.size() << " synthetic routes to " << cmd.out << "\n";
  return kExitOk;
}

int run_route(const RouteCmd& cmd) {
  const std::vector<RouteInstance> instances = load_or_die(cmd.in);

  MethodRouter router;
  router.method = cmd.method;
  router.ropts.h = cmd.h;
  router.ropts.link_aware = cmd.link_aware;
  router.ropts.solver.two_opt = cmd.two_opt;
  router.ropts.partition.single_zone_fallback = cmd.single_zone_fallback;
  if (cmd.method != "tsp") router.thetas = parse_theta_spec(cmd.theta, theta_dim_for(cmd.method));

  std::vector<std::optional<StopSequence>> results(instances.size());
  parallel_for(instances.size(), cmd.jobs, [&](size_t i) { results[i] = router.route(instances[i]); });

  std::map<RouteId, StopSequence> sequences;
  for (size_t i = 0; i < instances.size(); ++i) {
    if (results[i]) {
      sequences[instances[i].id] = *results[i];
    } else {
      std::cerr << "warning: no weights for station " << instances[i].station << "; route "
                << instances[i].id << " skipped\n";
    }
  }
  if (sequences.empty()) throw ValidationError("no route could be generated");
  write_sequence_file(cmd.out, sequences);

  if (!cmd.dump_features.empty()) {
    std::string csv = "route_id,zone_from,zone_to,phi1,phi2,phi3,phi4,phi5\n";
    for (const auto& inst : instances) {
      const ZonePartition part = build_partition(inst, router.ropts.partition);
      const ZoneFeatureTensor t = zone_features(inst, part);
      for (int i = 0; i < t.n; ++i) {
        for (int j = 0; j < t.n; ++j) {
          if (i == j) continue;
          csv += inst.id + "," + t.zone_ids[static_cast<size_t>(i)] + "," +
                 t.zone_ids[static_cast<size_t>(j)];
          for (int k = 0; k < kZoneFeatureCount; ++k) csv += "," + fmt_double(t.value(k, i, j));
          csv += "\n";
        }
      }
    }
    write_text_file(cmd.dump_features, csv);
  }

  write_manifest(cmd.out, "route",
                 {{"in", cmd.in},
                  {"method", cmd.method},
                  {"theta", cmd.theta},
                  {"h", std::to_string(cmd.h)},
                  {"two_opt", cmd.two_opt ? "true" : "false"},
                  {"link_aware", cmd.link_aware ? "true" : "false"}},
                 {cmd.in});
  std::cout << "routed " << sequences.size() << " instances -> " << cmd.out << "\n";
  return kExitOk;
}

int run_score(const ScoreCmd& cmd) {
  const std::vector<RouteInstance> instances = load_or_die(cmd.in);
  const std::string bench_path =
      cmd.benchmark.empty() ? (fs::path(cmd.in) / "actual_sequences.json").string() : cmd.benchmark;
  const auto benchmarks = read_sequence_file(bench_path);
  const auto candidates = read_sequence_file(cmd.candidate);

  std::string csv = "route_id,sd,erp_n,erp_e,route_score\n";
  std::vector<ScoreBreakdown> breakdowns;
  for (const auto& inst : instances) {
    auto b = benchmarks.find(inst.id);
    auto c = candidates.find(inst.id);
    if (b == benchmarks.end() || c == candidates.end()) continue;
    const NormalizedTimeMatrix ntimes = normalize_times(inst.times);
    const ScoreBreakdown s = route_score(b->second, c->second, ntimes, cmd.gap);
    breakdowns.push_back(s);
    csv += inst.id + "," + fmt_double(s.sd) + "," + fmt_double(s.erp_n) + "," +
           std::to_string(s.erp_e) + "," + fmt_double(s.score) + "\n";
  }
  if (breakdowns.empty()) {
    throw ValidationError("no route appears in both benchmark and candidate files");
  }
  write_text_file(cmd.out, csv);
  write_manifest(cmd.out, "score",
                 {{"in", cmd.in},
                  {"benchmark", bench_path},
                  {"candidate", cmd.candidate},
                  {"gap", fmt_double(cmd.gap)}},
                 {cmd.in, bench_path, cmd.candidate});
  std::cout << "scored " << breakdowns.size()
            << " routes, mean score = " << fmt_double(aggregate_score(breakdowns)) << "\n";
  return kExitOk;
}

namespace {

struct TrainedGroup {
  std::string station;
  BOResult result;
};

std::vector<TrainedGroup> train_groups(const std::vector<RouteInstance>& instances,
                                       const TrainCmd& cmd) {
  std::vector<RouteInstance> usable;
  for (const auto& inst : instances) {
    if (inst.actual) {
      usable.push_back(inst);
    } else {
      std::cerr << "warning: route " << inst.id << " has no benchmark; skipped\n";
    }
  }
  if (usable.empty()) throw ValidationError("no trainable route instances");

  RouterOptions ropts;
  ropts.h = cmd.h;
  ropts.link_aware = cmd.link_aware;
  ropts.solver.two_opt = cmd.two_opt;
  ropts.partition.single_zone_fallback = cmd.single_zone_fallback;

  BOConfig bo;
  bo.n0 = cmd.n0;
  bo.iters = cmd.iters;
  bo.seed = cmd.seed;
  bo.jobs = cmd.jobs;
  bo.gap_penalty = cmd.gap;

  std::vector<TrainedGroup> out;
  for (auto& [station, group] : group_by_station(usable, cmd.per_depot)) {
    auto [train, test] = split_train_test(group, cmd.train_frac, cmd.seed);
    (void)test;
    std::cerr << "training " << cmd.method << " on station '" << station << "': "
              << train.size() << " routes\n";
    TrainedGroup tg;
    tg.station = station;
    tg.result = (cmd.method == "stop-bo") ? stop_level_bo(train, bo, ropts.solver)
                                          : optimize(train, ropts, bo);
    out.push_back(std::move(tg));
  }
  return out;
}

std::string history_csv(const std::vector<TrainedGroup>& groups, bool per_depot, size_t dim) {
  std::string csv;
  if (per_depot) csv += "depot,";
  csv += "iter";
  for (size_t k = 1; k <= dim; ++k) csv += ",theta" + std::to_string(k);
  csv += ",loss,best_so_far\n";
  for (const auto& g : groups) {
    for (const auto& rec : g.result.history) {
      if (per_depot) csv += g.station + ",";
      csv += std::to_string(rec.iter);
      for (double v : rec.theta) csv += "," + fmt_double(v);
      csv += "," + fmt_double(rec.loss) + "," + fmt_double(rec.best_so_far) + "\n";
    }
  }
  return csv;
}

}  // namespace

int run_train(const TrainCmd& cmd) {
  if (cmd.method != "hrlp" && cmd.method != "stop-bo") {
    throw ConfigError("train method must be hrlp or stop-bo");
  }
  std::vector<RouteInstance> instances = load_or_die(cmd.in);
  std::vector<RouteInstance> high = filter_high_quality(instances);
  if (high.empty()) {
    std::cerr << "note: no high-quality ratings found; training on all routes\n";
    high = std::move(instances);
  }

  const std::vector<TrainedGroup> groups = train_groups(high, cmd);
  ThetaMap thetas;
  for (const auto& g : groups) thetas[g.station] = g.result.best_theta;
  write_theta_file(cmd.out, thetas);
  write_text_file(cmd.history, history_csv(groups, cmd.per_depot, theta_dim_for(cmd.method)));

  write_manifest(cmd.out, "train",
                 {{"in", cmd.in},
                  {"method", cmd.method},
                  {"h", std::to_string(cmd.h)},
                  {"n0", std::to_string(cmd.n0)},
                  {"iters", std::to_string(cmd.iters)},
                  {"seed", std::to_string(cmd.seed)},
                  {"train_frac", fmt_double(cmd.train_frac)},
                  {"per_depot", cmd.per_depot ? "true" : "false"},
                  {"gap", fmt_double(cmd.gap)}},
                 {cmd.in});
  for (const auto& g : groups) {
    std::cout << "station " << g.station << ": best loss " << fmt_double(g.result.best_loss)
              << " theta [";
    std::vector<std::string> parts;
    for (double v : g.result.best_theta) parts.push_back(fmt_double(v));
    std::cout << join(parts, ", ") << "]\n";
  }
  return kExitOk;
}

int run_eval(const EvalCmd& cmd) {
  std::vector<RouteInstance> instances = load_or_die(cmd.in);
  std::vector<RouteInstance> high = filter_high_quality(instances);
  if (high.empty()) high = std::move(instances);

  // Keep the held-out side of the same split the trainer used.
  std::vector<RouteInstance> eval_set;
  for (auto& [station, group] : group_by_station(high, cmd.per_depot)) {
    if (cmd.eval_all) {
      eval_set.insert(eval_set.end(), group.begin(), group.end());
    } else {
      auto [train, test] = split_train_test(group, cmd.train_frac, cmd.seed);
      eval_set.insert(eval_set.end(), test.begin(), test.end());
    }
  }
  std::erase_if(eval_set, [](const RouteInstance& inst) {
    if (!inst.actual) std::cerr << "warning: route " << inst.id << " has no benchmark; skipped\n";
    return !inst.actual;
  });
  if (eval_set.empty()) throw ValidationError("no evaluable routes after filtering");
  std::sort(eval_set.begin(), eval_set.end(),
            [](const RouteInstance& a, const RouteInstance& b) { return a.id < b.id; });

  struct Row {
    RouteId route;
    std::string station;
    std::string method;
    ScoreBreakdown s;
  };
  std::vector<Row> rows;

  for (const std::string& method : cmd.methods) {
    MethodRouter router;
    router.method = method;
    router.ropts.h = cmd.h;
    router.ropts.link_aware = cmd.link_aware;
    router.ropts.solver.two_opt = cmd.two_opt;
    router.ropts.partition.single_zone_fallback = cmd.single_zone_fallback;
    if (method == "hrlp") router.thetas = parse_theta_spec(cmd.theta, kZoneFeatureCount);
    if (method == "stop-bo") router.thetas = parse_theta_spec(cmd.stop_theta, kStopFeatureCount);

    std::vector<std::optional<ScoreBreakdown>> scored(eval_set.size());
    parallel_for(eval_set.size(), cmd.jobs, [&](size_t i) {
      const RouteInstance& inst = eval_set[i];
      const auto seq = router.route(inst);
      if (!seq) return;
      const NormalizedTimeMatrix ntimes = normalize_times(inst.times);
      scored[i] = route_score(*inst.actual, *seq, ntimes, cmd.gap);
    });
    for (size_t i = 0; i < eval_set.size(); ++i) {
      if (scored[i]) {
        rows.push_back({eval_set[i].id, eval_set[i].station, method, *scored[i]});
      } else {
        std::cerr << "warning: no " << method << " weights for station "
                  << eval_set[i].station << "; route " << eval_set[i].id << " skipped\n";
      }
    }
  }
  if (rows.empty()) throw ValidationError("evaluation produced no scored routes");

  std::string routes_csv = "route_id,station,method,sd,erp_n,erp_e,route_score\n";
  for (const auto& r : rows) {
    routes_csv += r.route + "," + r.station + "," + r.method + "," + fmt_double(r.s.sd) + "," +
                  fmt_double(r.s.erp_n) + "," + std::to_string(r.s.erp_e) + "," +
                  fmt_double(r.s.score) + "\n";
  }
  write_text_file(cmd.out + "_routes.csv", routes_csv);

  std::string summary_csv = "method,n_routes,mean_score\n";
  std::cout << "method mean scores (" << eval_set.size() << " routes):\n";
  for (const std::string& method : cmd.methods) {
    std::vector<ScoreBreakdown> b;
    for (const auto& r : rows) {
      if (r.method == method) b.push_back(r.s);
    }
    if (b.empty()) continue;
    const double mean = aggregate_score(b);
    summary_csv += method + "," + std::to_string(b.size()) + "," + fmt_double(mean) + "\n";
    std::cout << "  " << method << ": " << fmt_double(mean) << "\n";
  }
  write_text_file(cmd.out + "_summary.csv", summary_csv);

  std::string depots_csv = "station,method,n_routes,mean,min,q1,median,q3,max\n";
  std::map<std::pair<std::string, std::string>, std::vector<double>> by_depot;
  for (const auto& r : rows) by_depot[{r.station, r.method}].push_back(r.s.score);
  for (const auto& [key, scores] : by_depot) {
    depots_csv += key.first + "," + key.second + "," + std::to_string(scores.size()) + "," +
                  fmt_double(mean_of(scores)) + "," + fmt_double(quantile(scores, 0.0)) + "," +
                  fmt_double(quantile(scores, 0.25)) + "," + fmt_double(quantile(scores, 0.5)) +
                  "," + fmt_double(quantile(scores, 0.75)) + "," + fmt_double(quantile(scores, 1.0)) +
                  "\n";
  }
  write_text_file(cmd.out + "_depots.csv", depots_csv);

  // Score histograms, shared bin edges across methods.
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.s.score);
  if (hi <= 0.0) hi = 1.0;
  const int bins = std::max(1, cmd.hist_bins);
  std::string hist_csv = "method,bin_lo,bin_hi,count\n";
  for (const std::string& method : cmd.methods) {
    std::vector<int> counts(static_cast<size_t>(bins), 0);
    for (const auto& r : rows) {
      if (r.method != method) continue;
      int b = static_cast<int>(r.s.score / hi * bins);
      b = std::clamp(b, 0, bins - 1);
      ++counts[static_cast<size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
      hist_csv += method + "," + fmt_double(hi * b / bins) + "," + fmt_double(hi * (b + 1) / bins) +
                  "," + std::to_string(counts[static_cast<size_t>(b)]) + "\n";
    }
  }
  write_text_file(cmd.out + "_hist.csv", hist_csv);

  write_manifest(cmd.out, "eval",
                 {{"in", cmd.in},
                  {"methods", join(cmd.methods, "+")},
                  {"theta", cmd.theta},
                  {"stop_theta", cmd.stop_theta},
                  {"h", std::to_string(cmd.h)},
                  {"seed", std::to_string(cmd.seed)},
                  {"train_frac", fmt_double(cmd.train_frac)},
                  {"eval_all", cmd.eval_all ? "true" : "false"},
                  {"per_depot", cmd.per_depot ? "true" : "false"},
                  {"gap", fmt_double(cmd.gap)}},
                 {cmd.in});
  return kExitOk;
}

int run_analyze(const AnalyzeCmd& cmd) {
  // Scores CSV: either the `score` output or the eval per-route report.
  std::map<RouteId, double> scores;
  {
    std::istringstream in(read_text_file(cmd.scores));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty scores file");
    const std::vector<std::string> header = split_csv_line(line);
    int id_col = -1, score_col = -1, method_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "route_id") id_col = static_cast<int>(i);
      if (header[i] == "route_score") score_col = static_cast<int>(i);
      if (header[i] == "method") method_col = static_cast<int>(i);
    }
    if (id_col < 0 || score_col < 0) {
      throw ValidationError("scores CSV needs route_id and route_score columns");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> fields = split_csv_line(line);
      if (method_col >= 0 && fields[static_cast<size_t>(method_col)] != cmd.method) continue;
      scores[fields[static_cast<size_t>(id_col)]] =
          std::stod(fields[static_cast<size_t>(score_col)]);
    }
  }
  if (scores.empty()) throw ValidationError("no scores matched method " + cmd.method);

  std::vector<RouteInstance> instances = load_or_die(cmd.in);
  std::vector<RouteInstance> high = filter_high_quality(instances);
  if (high.empty()) high = std::move(instances);

  std::vector<std::string> skipped;
  const std::vector<FeatureRow> rows = extract_features(high, scores, &skipped);
  if (rows.empty()) throw ValidationError("no analyzable routes");

  int excluded = 0;
  const RegressionResult reg = route_score_regression(rows, &excluded);
  const SvmReport svm = svm_separation(rows, cmd.svm_c, cmd.seed);
  const std::vector<MeanDiffRow> diffs = mean_difference_report(rows);

  json report;
  report["n_routes"] = rows.size();
  report["n_skipped"] = skipped.size();
  report["regression"]["n"] = reg.n;
  report["regression"]["excluded_zero_score"] = excluded;
  for (size_t j = 0; j < reg.names.size(); ++j) {
    report["regression"]["coefficients"][reg.names[j]] = {{"coef", reg.coef[j]},
                                                          {"stderr", reg.stderrs[j]}};
  }
  report["svm"]["c"] = cmd.svm_c;
  report["svm"]["accuracy"] = svm.accuracy;
  report["svm"]["n_low"] = svm.n_low;
  report["svm"]["n_high"] = svm.n_high;
  auto metrics_json = [](const ClassMetrics& m) {
    return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  report["svm"]["low_score"] = metrics_json(svm.low);
  report["svm"]["high_score"] = metrics_json(svm.high);
  report["svm"]["macro_avg"] = metrics_json(svm.macro_avg);
  report["svm"]["weighted_avg"] = metrics_json(svm.weighted_avg);
  for (size_t k = 0; k < svm.model.w.size(); ++k) {
    report["svm"]["weights"][kRouteFeatureNames[k]] = svm.model.w[k];
  }
  report["svm"]["bias"] = svm.model.b;
  for (const auto& d : diffs) {
    report["mean_difference"][d.feature] = {{"mean_low", d.mean_low},
                                            {"mean_high", d.mean_high},
                                            {"difference", d.diff},
                                            {"t_stat", d.t_stat},
                                            {"p_value", d.p_value}};
  }
  write_text_file(cmd.out + ".json", report.dump(1) + "\n");

  std::string reg_csv = "feature,coef,stderr\n";
  for (size_t j = 0; j < reg.names.size(); ++j) {
    reg_csv += reg.names[j] + "," + fmt_double(reg.coef[j]) + "," + fmt_double(reg.stderrs[j]) + "\n";
  }
  write_text_file(cmd.out + "_regression.csv", reg_csv);

  std::string svm_csv = "class,precision,recall,f1\n";
  svm_csv += "lowest_scores," + fmt_double(svm.low.precision) + "," + fmt_double(svm.low.recall) +
             "," + fmt_double(svm.low.f1) + "\n";
  svm_csv += "highest_scores," + fmt_double(svm.high.precision) + "," +
             fmt_double(svm.high.recall) + "," + fmt_double(svm.high.f1) + "\n";
  svm_csv += "accuracy,,," + fmt_double(svm.accuracy) + "\n";
  svm_csv += "macro_avg," + fmt_double(svm.macro_avg.precision) + "," +
             fmt_double(svm.macro_avg.recall) + "," + fmt_double(svm.macro_avg.f1) + "\n";
  svm_csv += "weighted_avg," + fmt_double(svm.weighted_avg.precision) + "," +
             fmt_double(svm.weighted_avg.recall) + "," + fmt_double(svm.weighted_avg.f1) + "\n";
  write_text_file(cmd.out + "_svm.csv", svm_csv);

  std::string diff_csv = "feature,mean_low,mean_high,difference,t_stat,p_value\n";
  for (const auto& d : diffs) {
    diff_csv += d.feature + "," + fmt_double(d.mean_low) + "," + fmt_double(d.mean_high) + "," +
                fmt_double(d.diff) + "," + fmt_double(d.t_stat) + "," + fmt_double(d.p_value) + "\n";
  }
  write_text_file(cmd.out + "_meandiff.csv", diff_csv);

  write_manifest(cmd.out, "analyze",
                 {{"in", cmd.in},
                  {"scores", cmd.scores},
                  {"method", cmd.method},
                  {"svm_c", fmt_double(cmd.svm_c)},
                  {"seed", std::to_string(cmd.seed)}},
                 {cmd.in, cmd.scores});
  std::cout << "analysis over " << rows.size() << " routes -> " << cmd.out << ".json\n";
  return kExitOk;
}

int run_sweep(const SweepCmd& cmd) {
  if (cmd.h_values.empty()) throw ConfigError("sweep needs at least one h value");
  const fs::path tmp = fs::temp_directory_path() / ("lastmile_sweep_" + std::to_string(cmd.seed));
  fs::create_directories(tmp);

  std::string csv = "h,mean_score,train_seconds,eval_seconds\n";
  for (int h : cmd.h_values) {
    TrainCmd train;
    train.in = cmd.in;
    train.method = cmd.method;
    train.h = h;
    train.n0 = cmd.n0;
    train.iters = cmd.iters;
    train.seed = cmd.seed;
    train.train_frac = cmd.train_frac;
    train.per_depot = cmd.per_depot;
    train.gap = cmd.gap;
    train.jobs = cmd.jobs;
    train.out = (tmp / ("theta_h" + std::to_string(h) + ".json")).string();
    train.history = (tmp / ("history_h" + std::to_string(h) + ".csv")).string();

    const auto t0 = std::chrono::steady_clock::now();
    run_train(train);
    const auto t1 = std::chrono::steady_clock::now();

    EvalCmd eval;
    eval.in = cmd.in;
    eval.methods = {cmd.method == "stop-bo" ? "stop-bo" : "hrlp"};
    (cmd.method == "stop-bo" ? eval.stop_theta : eval.theta) = train.out;
    eval.h = h;
    eval.seed = cmd.seed;
    eval.train_frac = cmd.train_frac;
    eval.per_depot = cmd.per_depot;
    eval.gap = cmd.gap;
    eval.jobs = cmd.jobs;
    eval.out = (tmp / ("eval_h" + std::to_string(h))).string();
    run_eval(eval);
    const auto t2 = std::chrono::steady_clock::now();

    // Pull the mean back out of the summary CSV.
    std::istringstream in(read_text_file(eval.out + "_summary.csv"));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const std::vector<std::string> fields = split_csv_line(line);
    const double mean = std::stod(fields.at(2));

    csv += std::to_string(h) + "," + fmt_double(mean) + "," +
           fmt_double(std::chrono::duration<double>(t1 - t0).count()) + "," +
           fmt_double(std::chrono::duration<double>(t2 - t1).count()) + "\n";
  }
  write_text_file(cmd.out, csv);
  write_manifest(cmd.out, "sweep-h",
                 {{"in", cmd.in},
                  {"method", cmd.method},
                  {"n0", std::to_string(cmd.n0)},
                  {"iters", std::to_string(cmd.iters)},
                  {"seed", std::to_string(cmd.seed)},
                  {"train_frac", fmt_double(cmd.train_frac)}},
                 {cmd.in});
  std::cout << "sweep table -> " << cmd.out << "\n";
  return kExitOk;
}

}  // namespace lastmile
