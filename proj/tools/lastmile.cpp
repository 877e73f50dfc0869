#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "lastmile/cli.hpp"

namespace {

using lastmile::ConfigError;
using lastmile::ValidationError;

// Config files use the same JSON dialect as the data files. Nested objects
// scope options to subcommands: {"train": {"h": 3}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (!opt->get_lnames().empty() && opt->get_configurable()) {
        const std::string name = opt->get_lnames()[0];
        if (opt->count() == 1) {
          j[name] = opt->results().at(0);
        } else if (opt->count() > 1) {
          j[name] = opt->results();
        } else if (default_also && !opt->get_default_str().empty()) {
          j[name] = opt->get_default_str();
        }
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::FileError(std::string("config parse: ") + e.what());
    }
    return collect(j, {});
  }

 private:
  static std::vector<CLI::ConfigItem> collect(const nlohmann::json& j,
                                              const std::vector<std::string>& parents) {
    std::vector<CLI::ConfigItem> results;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) {
        auto sub_parents = parents;
        sub_parents.push_back(it.key());
        auto sub = collect(it.value(), sub_parents);
        results.insert(results.end(), sub.begin(), sub.end());
        continue;
      }
      CLI::ConfigItem item;
      item.name = it.key();
      item.parents = parents;
      if (it.value().is_array()) {
        for (const auto& v : it.value()) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(it.value()));
      }
      results.push_back(std::move(item));
    }
    return results;
  }

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Last-mile routing engine: hierarchical zone router with learnable weights"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags override");

  lastmile::IngestCmd ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load and validate a dataset directory");
  c_ingest->add_option("--in", ingest.in, "dataset directory")->required();
  c_ingest->add_option("--report", ingest.report, "CSV of validation errors");

  lastmile::SynthCmd synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  c_synth->add_option("--out", synth.out, "output directory")->required();
  c_synth->add_option("--routes", synth.routes, "number of routes");
  c_synth->add_option("--zones", synth.zones, "zones per route");
  c_synth->add_option("--stops-min", synth.stops_min, "min stops per zone");
  c_synth->add_option("--stops-max", synth.stops_max, "max stops per zone");
  c_synth->add_option("--stations", synth.stations, "number of depots to spread routes over");
  c_synth->add_option("--noise", synth.noise, "asymmetric travel-time noise fraction");
  c_synth->add_option("--seed", synth.seed, "base seed");

  lastmile::RouteCmd route;
  auto* c_route = app.add_subcommand("route", "Generate stop sequences");
  c_route->add_option("--in", route.in, "dataset directory")->required();
  c_route->add_option("--out", route.out, "output sequences JSON")->required();
  c_route->add_option("--method", route.method, "tsp | hrlp | stop-bo")
      ->check(CLI::IsMember({"tsp", "hrlp", "stop-bo"}));
  c_route->add_option("--theta", route.theta, "weights: inline v1,v2,... or JSON file");
  c_route->add_option("--h", route.h, "candidate entry/exit stops per zone");
  c_route->add_flag("--two-opt", route.two_opt, "2-opt improvement pass");
  c_route->add_flag("--link-aware", route.link_aware,
                    "include the connecting leg when selecting zone paths");
  c_route->add_flag("--single-zone-fallback", route.single_zone_fallback,
                    "treat fully unzoned routes as one zone");
  c_route->add_option("--jobs", route.jobs, "parallel workers");
  c_route->add_option("--dump-features", route.dump_features, "CSV of zone feature tensors");

  lastmile::ScoreCmd score;
  auto* c_score = app.add_subcommand("score", "Score candidate sequences against benchmarks");
  c_score->add_option("--in", score.in, "dataset directory (travel times)")->required();
  c_score->add_option("--benchmark", score.benchmark, "benchmark sequences JSON");
  c_score->add_option("--candidate", score.candidate, "candidate sequences JSON")->required();
  c_score->add_option("--gap", score.gap, "edit gap penalty");
  c_score->add_option("--out", score.out, "output CSV")->required();

  lastmile::TrainCmd train;
  auto* c_train = app.add_subcommand("train", "Learn feature weights by Bayesian optimization");
  c_train->add_option("--in", train.in, "dataset directory")->required();
  c_train->add_option("--method", train.method, "hrlp | stop-bo")
      ->check(CLI::IsMember({"hrlp", "stop-bo"}));
  c_train->add_option("--h", train.h, "candidate entry/exit stops per zone");
  c_train->add_option("--n0", train.n0, "initial design points");
  c_train->add_option("--iters", train.iters, "total evaluations (including n0)");
  c_train->add_option("--seed", train.seed, "seed for split and optimizer");
  c_train->add_option("--train-frac", train.train_frac, "training fraction of each group");
  c_train->add_flag("--per-depot", train.per_depot, "learn one weight set per station");
  c_train->add_flag("--two-opt", train.two_opt, "2-opt inside the router");
  c_train->add_flag("--link-aware", train.link_aware, "link-aware zone path selection");
  c_train->add_flag("--single-zone-fallback", train.single_zone_fallback,
                    "treat fully unzoned routes as one zone");
  c_train->add_option("--gap", train.gap, "edit gap penalty");
  c_train->add_option("--jobs", train.jobs, "parallel loss workers");
  c_train->add_option("--out", train.out, "weights JSON output");
  c_train->add_option("--history", train.history, "optimization history CSV");

  lastmile::EvalCmd eval;
  auto* c_eval = app.add_subcommand("eval", "Route and score the held-out split");
  c_eval->add_option("--in", eval.in, "dataset directory")->required();
  c_eval->add_option("--methods", eval.methods, "methods to compare")->delimiter(',');
  c_eval->add_option("--theta", eval.theta, "hrlp weights (file or inline)");
  c_eval->add_option("--stop-theta", eval.stop_theta, "stop-bo weights (file or inline)");
  c_eval->add_option("--h", eval.h, "candidate entry/exit stops per zone");
  c_eval->add_option("--seed", eval.seed, "split seed (must match train)");
  c_eval->add_option("--train-frac", eval.train_frac, "training fraction used by train");
  c_eval->add_flag("--all", eval.eval_all, "evaluate every route instead of the held-out split");
  c_eval->add_flag("--per-depot", eval.per_depot, "split per station");
  c_eval->add_flag("--two-opt", eval.two_opt, "2-opt inside the routers");
  c_eval->add_flag("--link-aware", eval.link_aware, "link-aware zone path selection");
  c_eval->add_flag("--single-zone-fallback", eval.single_zone_fallback,
                   "treat fully unzoned routes as one zone");
  c_eval->add_option("--gap", eval.gap, "edit gap penalty");
  c_eval->add_option("--jobs", eval.jobs, "parallel workers");
  c_eval->add_option("--hist-bins", eval.hist_bins, "histogram bin count");
  c_eval->add_option("--out", eval.out, "output prefix");

  lastmile::AnalyzeCmd analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Route-feature difficulty analysis");
  c_analyze->add_option("--in", analyze.in, "dataset directory")->required();
  c_analyze->add_option("--scores", analyze.scores, "per-route scores CSV")->required();
  c_analyze->add_option("--method", analyze.method, "method filter for eval-style CSVs");
  c_analyze->add_option("--svm-c", analyze.svm_c, "SVM regularization C");
  c_analyze->add_option("--seed", analyze.seed, "SVM split seed");
  c_analyze->add_option("--out", analyze.out, "output prefix");

  lastmile::SweepCmd sweep;
  auto* c_sweep = app.add_subcommand("sweep-h", "Train and evaluate across candidate budgets");
  c_sweep->add_option("--in", sweep.in, "dataset directory")->required();
  c_sweep->add_option("--h-list", sweep.h_values, "h values")->delimiter(',');
  c_sweep->add_option("--method", sweep.method, "hrlp | stop-bo")
      ->check(CLI::IsMember({"hrlp", "stop-bo"}));
  c_sweep->add_option("--n0", sweep.n0, "initial design points");
  c_sweep->add_option("--iters", sweep.iters, "total evaluations per h");
  c_sweep->add_option("--seed", sweep.seed, "seed");
  c_sweep->add_option("--train-frac", sweep.train_frac, "training fraction");
  c_sweep->add_flag("--per-depot", sweep.per_depot, "per-station training");
  c_sweep->add_option("--gap", sweep.gap, "edit gap penalty");
  c_sweep->add_option("--jobs", sweep.jobs, "parallel workers");
  c_sweep->add_option("--out", sweep.out, "sweep table CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lastmile::kExitOk : lastmile::kExitConfig;
  }

  try {
    if (c_ingest->parsed()) return lastmile::run_ingest(ingest);
    if (c_synth->parsed()) return lastmile::run_synth(synth);
    if (c_route->parsed()) return lastmile::run_route(route);
    if (c_score->parsed()) return lastmile::run_score(score);
    if (c_train->parsed()) return lastmile::run_train(train);
    if (c_eval->parsed()) return lastmile::run_eval(eval);
    if (c_analyze->parsed()) return lastmile::run_analyze(analyze);
    if (c_sweep->parsed()) return lastmile::run_sweep(sweep);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return lastmile::kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return lastmile::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lastmile::kExitValidation;
  }
  return lastmile::kExitConfig;
}
