#include "lastmile/baselines.hpp"

#include <cmath>
#include <iostream>

namespace lastmile {

StopSequence standard_tsp(const RouteInstance& inst, const SolverOptions& opts) {
  CostMatrix costs = CostMatrix::make(inst.times.ids);
  costs.m = inst.times.m;
  const int depot = inst.times.at(inst.depot().id);
  const std::vector<int> tour = savings_tour(costs, depot, opts);
  StopSequence seq;
  seq.reserve(tour.size());
  for (int v : tour) seq.push_back(inst.times.ids[static_cast<size_t>(v)]);
  return seq;
}

StopSequence stop_level_route(const StopFeatureTensor& features, const std::string& depot_id,
                              const std::vector<double>& theta, const SolverOptions& opts) {
  const CostMatrix costs = stop_cost_matrix(features, theta);
  int depot = -1;
  for (size_t i = 0; i < features.stop_ids.size(); ++i) {
    if (features.stop_ids[i] == depot_id) depot = static_cast<int>(i);
  }
  if (depot < 0) throw ValidationError("depot stop missing from feature tensor");
  const std::vector<int> tour = savings_tour(costs, depot, opts);
  StopSequence seq;
  seq.reserve(tour.size());
  for (int v : tour) seq.push_back(features.stop_ids[static_cast<size_t>(v)]);
  return seq;
}

StopSequence stop_level_route(const RouteInstance& inst, const std::vector<double>& theta,
                              const SolverOptions& opts) {
  return stop_level_route(stop_features(inst), inst.depot().id, theta, opts);
}

double stop_level_loss(const std::vector<double>& theta,
                       const std::vector<PreparedRoute>& routes,
                       const std::vector<StopFeatureTensor>& tensors,
                       const SolverOptions& opts, double gap_penalty, int jobs) {
  if (routes.empty()) throw ValidationError("loss over an empty route set");
  std::vector<double> scores(routes.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(routes.size(), jobs, [&](size_t i) {
    try {
      const StopSequence seq =
          stop_level_route(tensors[i], routes[i].instance.depot().id, theta, opts);
      scores[i] = route_score(routes[i].benchmark, seq, routes[i].ntimes, gap_penalty).score;
    } catch (const std::exception& e) {
      std::cerr << "warning: route " << routes[i].instance.id
                << " skipped during loss: " << e.what() << "\n";
    }
  });
  double sum = 0.0;
  size_t n = 0;
  for (double s : scores) {
    if (!std::isnan(s)) {
      sum += s;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("every route failed during loss evaluation");
  return sum / static_cast<double>(n);
}

BOResult stop_level_bo(const std::vector<RouteInstance>& routes, const BOConfig& config,
                       const SolverOptions& opts) {
  const std::vector<PreparedRoute> prepared = prepare_routes(routes, {}, /*with_zones=*/false);
  std::vector<StopFeatureTensor> tensors;
  tensors.reserve(prepared.size());
  for (const auto& pr : prepared) tensors.push_back(stop_features(pr.instance));
  return bo_minimize(
      kStopFeatureCount,
      [&](const std::vector<double>& theta) {
        return stop_level_loss(theta, prepared, tensors, opts, config.gap_penalty, config.jobs);
      },
      config);
}

}  // namespace lastmile
