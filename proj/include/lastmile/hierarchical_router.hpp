#pragma once

#include "lastmile/zone_model.hpp"

namespace lastmile {

// Zone visit order; element 0 is the depot pseudo-zone.
using ZoneSequence = std::vector<ZoneId>;

struct RouterOptions {
  int h = 2;                // candidate entry/exit stops per zone
  bool link_aware = false;  // include the connecting leg when picking a zone path
  SolverOptions solver;
  PartitionOptions partition;
};

struct CandidateSet {
  std::vector<StopId> entries;      // up to h, best first
  std::vector<StopId> exits;        // up to h, best first; depot for the last zone
  std::vector<StopId> exit_backup;  // ranking beyond the cut, for promotion
};

struct ZoneRouteDetail {
  ZoneId zone;
  StopId entry;
  StopId exit;
  double cost = 0.0;  // intra-zone travel time of the chosen path
};

struct HrlpResult {
  StopSequence sequence;
  ZoneSequence zones;
  std::vector<ZoneRouteDetail> details;
};

// Step 1: zone-level tour over the theta-weighted zone costs, cut at the
// depot pseudo-zone.
ZoneSequence solve_zone_sequence(const ZoneFeatureTensor& features,
                                 const std::vector<double>& theta,
                                 const SolverOptions& opts = {});

// Steps 3-4: entry candidates of `zone` ranked by mean travel time from the
// previous zone's stops, exit candidates by mean travel time to the next
// zone's stops. The last zone ranks exits by the leg back to the depot and
// always carries the depot itself in the exit set.
CandidateSet candidate_sets(const RouteInstance& inst, const ZonePartition& partition,
                            const ZoneSequence& zseq, const ZoneId& zone, int h);

// Steps 1-7 with precomputed partition/features (the tensors do not depend
// on theta, so learners cache them across evaluations).
HrlpResult route_with_features(const RouteInstance& inst, const ZonePartition& partition,
                               const ZoneFeatureTensor& features,
                               const std::vector<double>& theta, const RouterOptions& opts);

// Convenience wrapper that builds the partition and features itself.
StopSequence route_instance(const RouteInstance& inst, const std::vector<double>& theta,
                            const RouterOptions& opts = {});

// True when the stops of every zone form one contiguous block of `seq`.
bool is_zone_contiguous(const StopSequence& seq, const ZonePartition& partition);

}  // namespace lastmile
