#pragma once

#include "lastmile/types.hpp"

namespace lastmile {

inline constexpr double kDefaultGapPenalty = 1000.0;

struct ErpResult {
  double erp_n = 0.0;    // summed edit costs along the optimal alignment
  long long erp_e = 0;   // number of nonzero-cost edit operations
};

struct ScoreBreakdown {
  double sd = 0.0;
  double erp_n = 0.0;
  long long erp_e = 0;
  double score = 0.0;  // sd * erp_n / erp_e, 0 when erp_e == 0
};

// Scales each entry by the mean off-diagonal travel time of the route, so
// the mean off-diagonal normalized time is 1. Degenerate matrices (a single
// stop, or all zeros) come back as all-zero.
NormalizedTimeMatrix normalize_times(const TravelTimeMatrix& times);

// Position-displacement dissimilarity between two depot-first permutations of
// the same stop set. 0 iff identical; stays within [0, 1].
double sequence_deviation(const StopSequence& benchmark, const StopSequence& candidate);

// Edit distance with real penalty. Substitutions cost the normalized travel
// time between the two aligned stops; gaps (insert/delete) cost gap_penalty.
// Ties among optimal alignments are broken by preferring substitute, then
// delete-from-candidate, then insert-into-candidate.
ErpResult erp(const StopSequence& benchmark, const StopSequence& candidate,
              const NormalizedTimeMatrix& ntimes, double gap_penalty = kDefaultGapPenalty);

ScoreBreakdown route_score(const StopSequence& benchmark, const StopSequence& candidate,
                           const NormalizedTimeMatrix& ntimes,
                           double gap_penalty = kDefaultGapPenalty);

double aggregate_score(const std::vector<ScoreBreakdown>& breakdowns);

}  // namespace lastmile
