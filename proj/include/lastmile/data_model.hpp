#pragma once

#include <cstdint>
#include <utility>

#include "lastmile/types.hpp"

namespace lastmile {

struct IngestError {
  RouteId route;
  std::string message;
};

struct IngestResult {
  std::vector<RouteInstance> instances;  // sorted by route id
  std::vector<IngestError> errors;       // routes that failed validation
};

// Loads the four-file dataset layout from `dir`:
//   route_data.json, actual_sequences.json, travel_times.json, package_data.json
// Missing files and malformed JSON are fatal; routes that fail cross-file
// validation are dropped and reported in `errors`.
IngestResult ingest(const std::string& dir);

// Writes instances back to the same four-file layout. ingest(write_dataset(x))
// reproduces x exactly.
void write_dataset(const std::string& dir, const std::vector<RouteInstance>& instances);

std::vector<RouteInstance> filter_high_quality(const std::vector<RouteInstance>& instances);

// Deterministic shuffled split; |train| = round(train_fraction * n).
std::pair<std::vector<RouteInstance>, std::vector<RouteInstance>> split_train_test(
    const std::vector<RouteInstance>& instances, double train_fraction, uint64_t seed);

struct SynthSpec {
  int n_zones = 4;
  int stops_min = 3;
  int stops_max = 5;
  uint64_t seed = 0;
  // Planar cluster geometry, in meters around a local origin at the depot.
  double zone_spacing = 1200.0;
  double cluster_radius = 120.0;
  double speed_mps = 8.0;       // travel seconds = distance / speed
  double noise_frac = 0.0;      // extra per-arc time in [0, noise_frac] * base
  std::string id;               // defaults to SYNTH_<seed>
  std::string station = "SYNTH_ST";
};

// One synthetic route: clustered stops (one cluster per zone), travel times
// from planar distance, and a zone-contiguous driver benchmark built by
// sweeping zones in a fixed spatial order and nearest-neighbor within a zone.
RouteInstance synth_instance(const SynthSpec& spec);

}  // namespace lastmile
