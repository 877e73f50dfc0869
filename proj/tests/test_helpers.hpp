#pragma once

// Shared fixture builders for the unit tests.

#include <string>
#include <vector>

#include "lastmile/routing_core.hpp"
#include "lastmile/types.hpp"
#include "lastmile/util.hpp"

namespace helpers {

using namespace lastmile;

inline std::vector<std::string> index_labels(int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    labels.push_back(std::string(1, static_cast<char>('a' + i)));
  }
  return labels;
}

// Symmetric Euclidean cost matrix from random planar points.
inline CostMatrix random_euclidean(int n, Rng& rng) {
  std::vector<double> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<size_t>(i)] = rng.uniform(0.0, 100.0);
    ys[static_cast<size_t>(i)] = rng.uniform(0.0, 100.0);
  }
  CostMatrix c = CostMatrix::make(index_labels(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) {
        const double dx = xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(j)];
        const double dy = ys[static_cast<size_t>(i)] - ys[static_cast<size_t>(j)];
        c.m(i, j) = std::sqrt(dx * dx + dy * dy);
      }
    }
  }
  return c;
}

inline CostMatrix random_asymmetric(int n, Rng& rng) {
  CostMatrix c = CostMatrix::make(index_labels(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) c.m(i, j) = rng.uniform(1.0, 100.0);
    }
  }
  return c;
}

// Random time matrix over k stops with ids d, s1, s2, ...
inline StopTimeMatrix random_times(int k, Rng& rng) {
  std::vector<StopId> ids{"d"};
  for (int i = 1; i < k; ++i) ids.push_back("s" + std::to_string(i));
  StopTimeMatrix t = StopTimeMatrix::make(ids);
  for (int i = 0; i < t.m.n; ++i) {
    for (int j = 0; j < t.m.n; ++j) {
      if (i != j) t.m(i, j) = rng.uniform(10.0, 1000.0);
    }
  }
  return t;
}

inline StopSequence shuffled_sequence(const StopTimeMatrix& t, Rng& rng) {
  StopSequence seq;
  for (const auto& id : t.ids) {
    if (id != "d") seq.push_back(id);
  }
  rng.shuffle(seq);
  seq.insert(seq.begin(), "d");
  return seq;
}

// Minimal hand-built instance. `zones[i]` pairs with `ids[i]`; empty string
// means unzoned; the first id is the depot.
struct ManualInstanceSpec {
  std::vector<StopId> ids;
  std::vector<ZoneId> zones;
  std::vector<std::pair<double, double>> coords;  // lat, lng
  std::vector<std::vector<double>> times;         // aligned with `ids` order
  std::vector<int> packages_per_stop;             // aligned with ids, depot 0
};

inline RouteInstance manual_instance(const ManualInstanceSpec& spec) {
  RouteInstance inst;
  inst.id = "MANUAL";
  inst.station = "ST";
  inst.date = "2020-01-01";
  inst.departure_time = "08:00:00";
  inst.capacity_cm3 = 1e6;
  for (size_t i = 0; i < spec.ids.size(); ++i) {
    Stop s;
    s.id = spec.ids[i];
    s.kind = i == 0 ? StopKind::depot : StopKind::delivery;
    if (i > 0 && i < spec.zones.size() && !spec.zones[i].empty()) s.zone = spec.zones[i];
    if (i < spec.coords.size()) {
      s.lat = spec.coords[i].first;
      s.lng = spec.coords[i].second;
    }
    inst.stops.push_back(std::move(s));
  }
  std::sort(inst.stops.begin(), inst.stops.end(),
            [](const Stop& a, const Stop& b) { return a.id < b.id; });

  inst.times = StopTimeMatrix::make(spec.ids);
  for (size_t i = 0; i < spec.ids.size(); ++i) {
    for (size_t j = 0; j < spec.ids.size(); ++j) {
      inst.times.set(spec.ids[i], spec.ids[j], spec.times[i][j]);
    }
  }

  for (size_t i = 0; i < spec.packages_per_stop.size(); ++i) {
    for (int p = 0; p < spec.packages_per_stop[i]; ++p) {
      Package pkg;
      pkg.id = "P_" + spec.ids[i] + "_" + std::to_string(p);
      pkg.stop = spec.ids[i];
      pkg.width_cm = 10;
      pkg.length_cm = 10;
      pkg.height_cm = 10;
      inst.packages.push_back(std::move(pkg));
    }
  }
  inst.rating = Rating::high;
  return inst;
}

}  // namespace helpers
