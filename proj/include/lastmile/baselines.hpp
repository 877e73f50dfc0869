#pragma once

#include "lastmile/learning.hpp"

namespace lastmile {

// Savings tour over the raw travel times, cut at the depot.
StopSequence standard_tsp(const RouteInstance& inst, const SolverOptions& opts = {});

// Flat router for the stop-level learner: savings tour over the
// theta-weighted 4-feature stop cost matrix.
StopSequence stop_level_route(const StopFeatureTensor& features, const std::string& depot_id,
                              const std::vector<double>& theta, const SolverOptions& opts = {});
StopSequence stop_level_route(const RouteInstance& inst, const std::vector<double>& theta,
                              const SolverOptions& opts = {});

// Same BO loop as the zone-level learner, 4-dimensional weights.
BOResult stop_level_bo(const std::vector<RouteInstance>& routes, const BOConfig& config,
                       const SolverOptions& opts = {});

double stop_level_loss(const std::vector<double>& theta,
                       const std::vector<PreparedRoute>& routes,
                       const std::vector<StopFeatureTensor>& tensors,
                       const SolverOptions& opts, double gap_penalty, int jobs);

}  // namespace lastmile
