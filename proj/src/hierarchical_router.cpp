#include "lastmile/hierarchical_router.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace lastmile {

namespace {

// Ascending by score, ties by stop id.
std::vector<StopId> ranked(std::vector<std::pair<double, StopId>> scored) {
  std::sort(scored.begin(), scored.end());
  std::vector<StopId> out;
  out.reserve(scored.size());
  for (auto& [score, sid] : scored) out.push_back(std::move(sid));
  return out;
}

double mean_time_from(const RouteInstance& inst, const std::vector<StopId>& from,
                      const StopId& to) {
  double s = 0.0;
  for (const auto& u : from) s += inst.times.get(u, to);
  return s / static_cast<double>(from.size());
}

double mean_time_to(const RouteInstance& inst, const StopId& from,
                    const std::vector<StopId>& to) {
  double s = 0.0;
  for (const auto& v : to) s += inst.times.get(from, v);
  return s / static_cast<double>(to.size());
}

}  // namespace

ZoneSequence solve_zone_sequence(const ZoneFeatureTensor& features,
                                 const std::vector<double>& theta,
                                 const SolverOptions& opts) {
  const CostMatrix costs = zone_cost_matrix(features, theta);
  if (costs.size() == 1) return {features.zone_ids.front()};
  const std::vector<int> tour = savings_tour(costs, 0, opts);
  ZoneSequence seq;
  seq.reserve(tour.size());
  for (int z : tour) seq.push_back(features.zone_ids[static_cast<size_t>(z)]);
  return seq;
}

CandidateSet candidate_sets(const RouteInstance& inst, const ZonePartition& partition,
                            const ZoneSequence& zseq, const ZoneId& zone, int h) {
  if (h < 1) throw ConfigError("candidate budget h must be >= 1");
  const auto it = std::find(zseq.begin(), zseq.end(), zone);
  if (it == zseq.end() || it == zseq.begin()) {
    throw ValidationError("zone " + zone + " is not a routed zone of the sequence");
  }
  const size_t pos = static_cast<size_t>(it - zseq.begin());
  const auto& stops = partition.members[static_cast<size_t>(partition.index_of(zone))];
  const auto& prev_stops = partition.members[static_cast<size_t>(partition.index_of(zseq[pos - 1]))];
  const bool last = pos + 1 == zseq.size();
  const StopId depot_id = inst.depot().id;

  CandidateSet cs;

  std::vector<std::pair<double, StopId>> entry_scored;
  for (const auto& sid : stops) {
    entry_scored.emplace_back(mean_time_from(inst, prev_stops, sid), sid);
  }
  cs.entries = ranked(std::move(entry_scored));
  if (static_cast<int>(cs.entries.size()) > h) cs.entries.resize(static_cast<size_t>(h));

  std::vector<std::pair<double, StopId>> exit_scored;
  for (const auto& sid : stops) {
    if (last) {
      exit_scored.emplace_back(inst.times.get(sid, depot_id), sid);
    } else {
      const auto& next_stops = partition.members[static_cast<size_t>(partition.index_of(zseq[pos + 1]))];
      exit_scored.emplace_back(mean_time_to(inst, sid, next_stops), sid);
    }
  }
  std::vector<StopId> exit_ranking = ranked(std::move(exit_scored));
  if (last) exit_ranking.insert(exit_ranking.begin(), depot_id);  // depot forced in
  for (const auto& sid : exit_ranking) {
    if (static_cast<int>(cs.exits.size()) < h) {
      cs.exits.push_back(sid);
    } else {
      cs.exit_backup.push_back(sid);
    }
  }
  return cs;
}

namespace {

struct ZonePath {
  std::vector<StopId> stops;  // may end at the depot for the last zone
  ZoneRouteDetail detail;
};

// Steps 5-6 for one zone: solve an SHP per (entry, exit) pair and keep the
// cheapest. Selection cost optionally includes the leg from the previous
// zone's realized exit.
ZonePath route_zone(const RouteInstance& inst, const std::vector<StopId>& zone_stops,
                    const ZoneId& zone, const CandidateSet& cs, const StopId& prev_exit,
                    const RouterOptions& opts) {
  ZonePath best;
  if (zone_stops.size() == 1) {
    best.stops = zone_stops;
    best.detail = {zone, zone_stops[0], zone_stops[0], 0.0};
    return best;
  }

  const StopId depot_id = inst.depot().id;
  double best_metric = std::numeric_limits<double>::infinity();

  auto try_pair = [&](const StopId& entry, const StopId& exit) {
    if (entry == exit) return;  // Hamiltonian paths need distinct endpoints
    std::vector<StopId> nodes = zone_stops;
    if (exit == depot_id) nodes.push_back(depot_id);
    CostMatrix costs = CostMatrix::make(nodes);
    for (size_t i = 0; i < nodes.size(); ++i) {
      for (size_t j = 0; j < nodes.size(); ++j) {
        if (i != j) costs.m(static_cast<int>(i), static_cast<int>(j)) = inst.times.get(nodes[i], nodes[j]);
      }
    }
    const auto find_idx = [&](const StopId& sid) {
      return static_cast<int>(std::find(nodes.begin(), nodes.end(), sid) - nodes.begin());
    };
    const std::vector<int> path = savings_path(costs, find_idx(entry), find_idx(exit), opts.solver);
    const double cost = path_cost(costs, path);
    const double metric = cost + (opts.link_aware ? inst.times.get(prev_exit, entry) : 0.0);
    if (metric < best_metric) {
      best_metric = metric;
      best.stops.clear();
      for (int v : path) best.stops.push_back(nodes[static_cast<size_t>(v)]);
      best.detail = {zone, entry, exit, cost};
    }
  };

  for (const auto& entry : cs.entries) {
    for (const auto& exit : cs.exits) try_pair(entry, exit);
  }
  // Both sets can collapse to the same singleton stop; promote the next
  // ranked exit so at least one valid pair exists.
  for (size_t backup = 0; best.stops.empty() && backup < cs.exit_backup.size(); ++backup) {
    for (const auto& entry : cs.entries) try_pair(entry, cs.exit_backup[backup]);
  }
  if (best.stops.empty()) {
    throw ValidationError("zone " + zone + ": no feasible entry/exit pair");
  }
  return best;
}

}  // namespace

HrlpResult route_with_features(const RouteInstance& inst, const ZonePartition& partition,
                               const ZoneFeatureTensor& features,
                               const std::vector<double>& theta, const RouterOptions& opts) {
  if (opts.h < 1) throw ConfigError("candidate budget h must be >= 1");
  HrlpResult result;
  result.zones = solve_zone_sequence(features, theta, opts.solver);

  const StopId depot_id = inst.depot().id;
  result.sequence.push_back(depot_id);
  StopId prev_exit = depot_id;
  for (size_t i = 1; i < result.zones.size(); ++i) {
    const ZoneId& zone = result.zones[i];
    const auto& zone_stops = partition.members[static_cast<size_t>(partition.index_of(zone))];
    const CandidateSet cs = candidate_sets(inst, partition, result.zones, zone, opts.h);
    ZonePath zp = route_zone(inst, zone_stops, zone, cs, prev_exit, opts);
    for (const auto& sid : zp.stops) {
      if (sid != depot_id) result.sequence.push_back(sid);
    }
    prev_exit = result.sequence.back();
    result.details.push_back(zp.detail);
  }

  if (result.sequence.size() != inst.stops.size()) {
    throw std::logic_error("hierarchical route lost or duplicated stops");
  }
  return result;
}

StopSequence route_instance(const RouteInstance& inst, const std::vector<double>& theta,
                            const RouterOptions& opts) {
  const ZonePartition partition = build_partition(inst, opts.partition);
  const ZoneFeatureTensor features = zone_features(inst, partition);
  return route_with_features(inst, partition, features, theta, opts).sequence;
}

bool is_zone_contiguous(const StopSequence& seq, const ZonePartition& partition) {
  std::set<int> closed;
  int current = -1;
  for (const auto& sid : seq) {
    auto it = partition.zone_of_stop.find(sid);
    if (it == partition.zone_of_stop.end()) return false;
    const int z = it->second;
    if (z == current) continue;
    if (closed.count(z)) return false;  // zone revisited after leaving it
    if (current >= 0) closed.insert(current);
    current = z;
  }
  return true;
}

}  // namespace lastmile
