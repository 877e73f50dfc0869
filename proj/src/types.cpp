#include "lastmile/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lastmile {

StopTimeMatrix StopTimeMatrix::make(std::vector<StopId> stop_ids) {
  std::sort(stop_ids.begin(), stop_ids.end());
  StopTimeMatrix t;
  t.ids = std::move(stop_ids);
  t.index.reserve(t.ids.size());
  for (size_t i = 0; i < t.ids.size(); ++i) t.index[t.ids[i]] = static_cast<int>(i);
  t.m = Matrix(static_cast<int>(t.ids.size()), 0.0);
  return t;
}

int StopTimeMatrix::at(const StopId& s) const {
  auto it = index.find(s);
  if (it == index.end()) throw ValidationError("unknown stop id: " + s);
  return it->second;
}

const Stop& RouteInstance::depot() const {
  for (const auto& s : stops) {
    if (s.kind == StopKind::depot) return s;
  }
  throw ValidationError("route " + id + " has no depot stop");
}

const Stop& RouteInstance::stop(const StopId& sid) const {
  for (const auto& s : stops) {
    if (s.id == sid) return s;
  }
  throw ValidationError("route " + id + " has no stop " + sid);
}

std::vector<StopId> RouteInstance::delivery_stop_ids() const {
  std::vector<StopId> out;
  for (const auto& s : stops) {
    if (s.kind == StopKind::delivery) out.push_back(s.id);
  }
  return out;
}

int RouteInstance::packages_at(const StopId& sid) const {
  int n = 0;
  for (const auto& p : packages) {
    if (p.stop == sid) ++n;
  }
  return n;
}

bool is_complete_sequence(const RouteInstance& inst, const StopSequence& seq) {
  if (seq.size() != inst.stops.size()) return false;
  if (seq.empty() || seq.front() != inst.depot().id) return false;
  std::set<StopId> seen(seq.begin(), seq.end());
  if (seen.size() != seq.size()) return false;
  for (const auto& s : inst.stops) {
    if (!seen.count(s.id)) return false;
  }
  return true;
}

std::vector<std::string> validate_instance(const RouteInstance& inst) {
  std::vector<std::string> problems;
  int depots = 0;
  std::set<StopId> ids;
  for (const auto& s : inst.stops) {
    if (s.id.empty()) problems.push_back("empty stop id");
    if (!ids.insert(s.id).second) problems.push_back("duplicate stop id " + s.id);
    if (s.kind == StopKind::depot) {
      ++depots;
      if (s.zone.has_value()) problems.push_back("depot stop " + s.id + " carries a zone label");
    }
  }
  if (depots != 1) {
    problems.push_back("expected exactly one depot stop, found " + std::to_string(depots));
  }
  if (ids.size() < 2) problems.push_back("route needs at least one delivery stop");

  // Travel times: complete, nonnegative, zero diagonal. Asymmetry is fine.
  if (inst.times.ids.size() != ids.size()) {
    problems.push_back("travel time matrix does not cover the stop set");
  } else {
    for (const auto& sid : ids) {
      if (!inst.times.index.count(sid)) {
        problems.push_back("travel time matrix missing stop " + sid);
      }
    }
    const int n = inst.times.m.n;
    for (int i = 0; i < n && problems.size() < 32; ++i) {
      for (int j = 0; j < n; ++j) {
        const double t = inst.times.m(i, j);
        if (!std::isfinite(t) || t < 0.0) {
          problems.push_back("invalid travel time " + inst.times.ids[i] + "->" + inst.times.ids[j]);
          break;
        }
        if (i == j && t != 0.0) {
          problems.push_back("nonzero diagonal at " + inst.times.ids[i]);
          break;
        }
      }
    }
  }

  for (const auto& p : inst.packages) {
    if (!ids.count(p.stop)) {
      problems.push_back("package " + p.id + " references unknown stop " + p.stop);
    }
    if (p.width_cm < 0 || p.length_cm < 0 || p.height_cm < 0) {
      problems.push_back("package " + p.id + " has negative dimensions");
    }
    if (p.time_window && p.time_window->start > p.time_window->end) {
      problems.push_back("package " + p.id + " window start after end");
    }
  }

  if (inst.actual && !is_complete_sequence(inst, *inst.actual)) {
    problems.push_back("actual sequence is not a depot-first permutation of the stop set");
  }
  return problems;
}

std::string to_string(Rating r) {
  switch (r) {
    case Rating::high: return "High";
    case Rating::medium: return "Medium";
    case Rating::low: return "Low";
  }
  throw std::logic_error("bad rating");
}

Rating rating_from_string(const std::string& s) {
  if (s == "High" || s == "high") return Rating::high;
  if (s == "Medium" || s == "medium") return Rating::medium;
  if (s == "Low" || s == "low") return Rating::low;
  throw ValidationError("unknown route rating: " + s);
}

std::string to_string(PackageStatus s) {
  switch (s) {
    case PackageStatus::rejected: return "REJECTED";
    case PackageStatus::delivered: return "DELIVERED";
    case PackageStatus::delivery_attempted: return "DELIVERY_ATTEMPTED";
  }
  throw std::logic_error("bad package status");
}

PackageStatus package_status_from_string(const std::string& s) {
  if (s == "REJECTED") return PackageStatus::rejected;
  if (s == "DELIVERED") return PackageStatus::delivered;
  if (s == "DELIVERY_ATTEMPTED") return PackageStatus::delivery_attempted;
  throw ValidationError("unknown package status: " + s);
}

}  // namespace lastmile
