#pragma once

#include <array>
#include <optional>

#include "lastmile/routing_core.hpp"
#include "lastmile/types.hpp"

namespace lastmile {

inline constexpr int kZoneFeatureCount = 5;
inline constexpr int kStopFeatureCount = 4;
inline constexpr double kThetaLow = 1.0;
inline constexpr double kThetaHigh = 10.0;

struct PartitionOptions {
  // When every stop lacks a zone label, lump the whole route into one zone
  // instead of failing.
  bool single_zone_fallback = false;
};

// Zone -> stops mapping. Index 0 is always the depot pseudo-zone; the
// remaining zones follow in sorted id order.
struct ZonePartition {
  std::vector<ZoneId> zone_ids;
  std::vector<std::vector<StopId>> members;        // parallel to zone_ids
  std::unordered_map<StopId, int> zone_of_stop;    // stop -> zone index

  int size() const { return static_cast<int>(zone_ids.size()); }
  int index_of(const ZoneId& z) const;
};

// Partitions a route's stops into zones, assigning any unzoned stop to the
// zone of its nearest zoned stop by travel time (ties to the smaller zone id).
ZonePartition build_partition(const RouteInstance& inst, const PartitionOptions& opts = {});

// phi_k(i, j) for every ordered zone pair, min-max normalized to [0, 1] per
// feature across the route. Diagonal entries are zero and excluded from
// normalization.
struct ZoneFeatureTensor {
  std::vector<ZoneId> zone_ids;  // depot pseudo-zone first
  int n = 0;
  std::array<Matrix, kZoneFeatureCount> phi;
  std::vector<std::string> warnings;

  double value(int k, int i, int j) const { return phi[static_cast<size_t>(k)](i, j); }
};

ZoneFeatureTensor zone_features(const RouteInstance& inst, const ZonePartition& partition);

// c_ij = sum_k theta_k * phi_k(i, j); depot pseudo-zone participates as an
// ordinary node so zone tours can start and end at it.
CostMatrix zone_cost_matrix(const ZoneFeatureTensor& features, const std::vector<double>& theta);

// Stop-pair features for the flat baseline router, same normalization story.
struct StopFeatureTensor {
  std::vector<StopId> stop_ids;
  int n = 0;
  std::array<Matrix, kStopFeatureCount> phi;
};

StopFeatureTensor stop_features(const RouteInstance& inst);

CostMatrix stop_cost_matrix(const StopFeatureTensor& features, const std::vector<double>& theta);

// [1, 10] box check shared by everything that consumes weights.
void check_theta_bounds(const std::vector<double>& theta, size_t expected_dim);

// X-N.MY -> (X, N); nullopt when the id does not follow the pattern.
std::optional<std::pair<std::string, std::string>> parse_main_zone(const ZoneId& zone);

}  // namespace lastmile
