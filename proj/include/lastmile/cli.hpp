#pragma once

#include <map>

#include "lastmile/analysis.hpp"
#include "lastmile/baselines.hpp"

namespace lastmile {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConfig = 2;

// Station (or "all") -> feature weights.
using ThetaMap = std::map<std::string, std::vector<double>>;

// Inline "5,2,1,1,1" or a JSON file holding an array / station map.
ThetaMap parse_theta_spec(const std::string& spec, size_t expected_dim);
ThetaMap load_theta_file(const std::string& path, size_t expected_dim);
void write_theta_file(const std::string& path, const ThetaMap& thetas);

struct IngestCmd {
  std::string in;
  std::string report;  // optional CSV of validation errors
};

struct SynthCmd {
  std::string out;
  int routes = 20;
  int zones = 4;
  int stops_min = 3;
  int stops_max = 5;
  int stations = 1;
  double noise = 0.1;
  uint64_t seed = 0;
};

struct RouteCmd {
  std::string in;
  std::string out;
  std::string method = "hrlp";  // tsp | hrlp | stop-bo
  std::string theta;            // file or inline; unused for tsp
  int h = 2;
  bool two_opt = false;
  bool link_aware = false;
  bool single_zone_fallback = false;
  int jobs = 1;
  std::string dump_features;  // optional CSV of the zone feature tensor
};

struct ScoreCmd {
  std::string in;
  std::string benchmark;  // defaults to <in>/actual_sequences.json
  std::string candidate;
  double gap = kDefaultGapPenalty;
  std::string out;
};

struct TrainCmd {
  std::string in;
  std::string method = "hrlp";  // hrlp | stop-bo
  int h = 2;
  int n0 = 20;
  int iters = 100;
  uint64_t seed = 0;
  double train_frac = 0.7;
  bool per_depot = false;
  bool two_opt = false;
  bool link_aware = false;
  bool single_zone_fallback = false;
  double gap = kDefaultGapPenalty;
  int jobs = 1;
  std::string out = "theta.json";
  std::string history = "history.csv";
};

struct EvalCmd {
  std::string in;
  std::vector<std::string> methods{"tsp", "hrlp"};
  std::string theta;       // hrlp weights (file or inline)
  std::string stop_theta;  // stop-bo weights
  int h = 2;
  uint64_t seed = 0;
  double train_frac = 0.7;
  bool eval_all = false;  // score everything instead of the held-out split
  bool per_depot = false;
  bool two_opt = false;
  bool link_aware = false;
  bool single_zone_fallback = false;
  double gap = kDefaultGapPenalty;
  int jobs = 1;
  int hist_bins = 20;
  std::string out = "eval";  // prefix for _routes/_summary/_depots/_hist CSVs
};

struct AnalyzeCmd {
  std::string in;
  std::string scores;           // CSV with route_id + route_score columns
  std::string method = "hrlp";  // row filter when the CSV carries a method column
  double svm_c = 1.0;
  uint64_t seed = 0;
  std::string out = "analysis";  // prefix for .json and CSV tables
};

struct SweepCmd {
  std::string in;
  std::vector<int> h_values{2, 3, 4, 5};
  std::string method = "hrlp";
  int n0 = 20;
  int iters = 100;
  uint64_t seed = 0;
  double train_frac = 0.7;
  bool per_depot = false;
  double gap = kDefaultGapPenalty;
  int jobs = 1;
  std::string out = "sweep.csv";
};

int run_ingest(const IngestCmd& cmd);
int run_synth(const SynthCmd& cmd);
int run_route(const RouteCmd& cmd);
int run_score(const ScoreCmd& cmd);
int run_train(const TrainCmd& cmd);
int run_eval(const EvalCmd& cmd);
int run_analyze(const AnalyzeCmd& cmd);
int run_sweep(const SweepCmd& cmd);

}  // namespace lastmile
