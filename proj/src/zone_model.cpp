#include "lastmile/zone_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lastmile {

namespace {

constexpr double kEarthRadiusM = 6371000.0;

struct Point {
  double x = 0.0, y = 0.0;
};

// Local equirectangular projection in meters, referenced at the depot. Zone
// extents are small, so the flat-earth error is negligible here.
Point project(double lat, double lng, double ref_lat, double ref_lng) {
  const double coslat = std::cos(ref_lat * M_PI / 180.0);
  return {kEarthRadiusM * (lng - ref_lng) * M_PI / 180.0 * coslat,
          kEarthRadiusM * (lat - ref_lat) * M_PI / 180.0};
}

// Min-max normalization over off-diagonal entries; a constant feature maps
// to all zeros.
void normalize_offdiag(Matrix& m) {
  const int n = m.n;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
  }
  if (!(hi > lo)) {
    for (double& v : m.v) v = 0.0;
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = (i == j) ? 0.0 : (m(i, j) - lo) / (hi - lo);
    }
  }
}

// Replaces NaN placeholders (zero-denominator ratios) with the largest
// well-defined value of the feature, pre-normalization.
void patch_undefined(Matrix& m) {
  double hi = 0.0;
  bool any = false;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      if (i != j && !std::isnan(m(i, j))) {
        hi = any ? std::max(hi, m(i, j)) : m(i, j);
        any = true;
      }
    }
  }
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      if (i != j && std::isnan(m(i, j))) m(i, j) = any ? hi : 0.0;
    }
  }
}

}  // namespace

int ZonePartition::index_of(const ZoneId& z) const {
  for (size_t i = 0; i < zone_ids.size(); ++i) {
    if (zone_ids[i] == z) return static_cast<int>(i);
  }
  throw ValidationError("unknown zone id: " + z);
}

std::optional<std::pair<std::string, std::string>> parse_main_zone(const ZoneId& zone) {
  // Pattern: letters '-' digits '.' digits letter
  size_t i = 0;
  while (i < zone.size() && std::isalpha(static_cast<unsigned char>(zone[i]))) ++i;
  if (i == 0 || i >= zone.size() || zone[i] != '-') return std::nullopt;
  const std::string x = zone.substr(0, i);
  size_t j = ++i;
  while (j < zone.size() && std::isdigit(static_cast<unsigned char>(zone[j]))) ++j;
  if (j == i || j >= zone.size() || zone[j] != '.') return std::nullopt;
  const std::string n = zone.substr(i, j - i);
  size_t k = ++j;
  while (k < zone.size() && std::isdigit(static_cast<unsigned char>(zone[k]))) ++k;
  if (k == j || k + 1 != zone.size() || !std::isalpha(static_cast<unsigned char>(zone[k]))) {
    return std::nullopt;
  }
  return std::make_pair(x, n);
}

ZonePartition build_partition(const RouteInstance& inst, const PartitionOptions& opts) {
  const StopId depot_id = inst.depot().id;

  std::map<ZoneId, std::vector<StopId>> zones;
  std::vector<StopId> unzoned;
  for (const auto& s : inst.stops) {
    if (s.kind == StopKind::depot) continue;
    if (s.zone) {
      zones[*s.zone].push_back(s.id);
    } else {
      unzoned.push_back(s.id);
    }
  }

  if (zones.empty()) {
    if (!opts.single_zone_fallback) {
      throw ValidationError("route " + inst.id +
                            ": no stop carries a zone label; rerun with "
                            "--single-zone-fallback to treat it as one zone");
    }
    zones["Z-0.0Z"] = {};
  }

  // Repair: each unzoned stop joins the zone of its nearest zoned stop.
  for (const auto& sid : unzoned) {
    double best = std::numeric_limits<double>::infinity();
    ZoneId best_zone;
    bool found = false;
    for (const auto& [zid, members] : zones) {
      for (const auto& other : members) {
        const double d = inst.times.get(sid, other);
        if (d < best || (d == best && found && zid < best_zone)) {
          best = d;
          best_zone = zid;
          found = true;
        }
      }
    }
    zones[found ? best_zone : zones.begin()->first].push_back(sid);
  }

  ZonePartition part;
  part.zone_ids.push_back(kDepotZone);
  part.members.push_back({depot_id});
  part.zone_of_stop[depot_id] = 0;
  for (auto& [zid, members] : zones) {
    std::sort(members.begin(), members.end());
    const int idx = static_cast<int>(part.zone_ids.size());
    for (const auto& sid : members) part.zone_of_stop[sid] = idx;
    part.zone_ids.push_back(zid);
    part.members.push_back(std::move(members));
  }
  return part;
}

ZoneFeatureTensor zone_features(const RouteInstance& inst, const ZonePartition& partition) {
  ZoneFeatureTensor t;
  t.zone_ids = partition.zone_ids;
  t.n = partition.size();
  const int n = t.n;
  for (auto& m : t.phi) m = Matrix(n, 0.0);

  const StopId depot_id = inst.depot().id;
  const Stop& depot = inst.depot();

  // Per-zone aggregates.
  std::vector<double> depot_to(static_cast<size_t>(n), 0.0);
  std::vector<double> to_depot(static_cast<size_t>(n), 0.0);
  std::vector<Point> centroid(static_cast<size_t>(n));
  for (int z = 0; z < n; ++z) {
    const auto& members = partition.members[static_cast<size_t>(z)];
    double dt = 0.0, td = 0.0;
    Point c;
    for (const auto& sid : members) {
      dt += inst.times.get(depot_id, sid);
      td += inst.times.get(sid, depot_id);
      const Stop& s = inst.stop(sid);
      const Point p = project(s.lat, s.lng, depot.lat, depot.lng);
      c.x += p.x;
      c.y += p.y;
    }
    const double k = static_cast<double>(members.size());
    depot_to[static_cast<size_t>(z)] = dt / k;
    to_depot[static_cast<size_t>(z)] = td / k;
    centroid[static_cast<size_t>(z)] = {c.x / k, c.y / k};
  }

  // Main-zone keys for phi5; unparseable ids never match anything.
  std::vector<std::optional<std::pair<std::string, std::string>>> mains(static_cast<size_t>(n));
  for (int z = 0; z < n; ++z) {
    const ZoneId& zid = t.zone_ids[static_cast<size_t>(z)];
    mains[static_cast<size_t>(z)] = parse_main_zone(zid);
    if (!mains[static_cast<size_t>(z)] && zid != kDepotZone) {
      t.warnings.push_back("zone id '" + zid + "' does not parse as X-N.MY; treated as its own main zone");
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& mi = partition.members[static_cast<size_t>(i)];
      const auto& mj = partition.members[static_cast<size_t>(j)];
      double sum = 0.0;
      for (const auto& u : mi) {
        for (const auto& v : mj) sum += inst.times.get(u, v);
      }
      t.phi[0](i, j) = sum / (static_cast<double>(mi.size()) * static_cast<double>(mj.size()));
      t.phi[1](i, j) = std::hypot(centroid[static_cast<size_t>(i)].x - centroid[static_cast<size_t>(j)].x,
                                  centroid[static_cast<size_t>(i)].y - centroid[static_cast<size_t>(j)].y);
      if (i == 0 || j == 0) {
        // Ratios against the depot pseudo-zone are pinned to 1.
        t.phi[2](i, j) = 1.0;
        t.phi[3](i, j) = 1.0;
      } else {
        t.phi[2](i, j) = depot_to[static_cast<size_t>(i)] > 0.0
                             ? depot_to[static_cast<size_t>(j)] / depot_to[static_cast<size_t>(i)]
                             : nan;
        t.phi[3](i, j) = to_depot[static_cast<size_t>(i)] > 0.0
                             ? to_depot[static_cast<size_t>(j)] / to_depot[static_cast<size_t>(i)]
                             : nan;
      }
      t.phi[4](i, j) = (mains[static_cast<size_t>(i)] && mains[static_cast<size_t>(j)] &&
                        *mains[static_cast<size_t>(i)] == *mains[static_cast<size_t>(j)])
                           ? 1.0
                           : 0.0;
    }
  }

  patch_undefined(t.phi[2]);
  patch_undefined(t.phi[3]);
  for (auto& m : t.phi) normalize_offdiag(m);
  return t;
}

void check_theta_bounds(const std::vector<double>& theta, size_t expected_dim) {
  if (theta.size() != expected_dim) {
    throw ConfigError("theta has " + std::to_string(theta.size()) + " weights, expected " +
                      std::to_string(expected_dim));
  }
  for (double v : theta) {
    if (!(v >= kThetaLow && v <= kThetaHigh)) {
      throw ConfigError("theta weight " + fmt_double(v) + " outside [1, 10]");
    }
  }
}

namespace {

CostMatrix weighted_cost(const std::vector<std::string>& labels,
                         const Matrix* phi, size_t k_features,
                         const std::vector<double>& theta) {
  CostMatrix c = CostMatrix::make(labels);
  const int n = c.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double sum = 0.0;
      for (size_t k = 0; k < k_features; ++k) sum += theta[k] * phi[k](i, j);
      c.m(i, j) = sum;
    }
  }
  return c;
}

}  // namespace

CostMatrix zone_cost_matrix(const ZoneFeatureTensor& features, const std::vector<double>& theta) {
  check_theta_bounds(theta, kZoneFeatureCount);
  return weighted_cost(features.zone_ids, features.phi.data(), kZoneFeatureCount, theta);
}

StopFeatureTensor stop_features(const RouteInstance& inst) {
  StopFeatureTensor t;
  t.stop_ids = inst.times.ids;
  t.n = static_cast<int>(t.stop_ids.size());
  const int n = t.n;
  for (auto& m : t.phi) m = Matrix(n, 0.0);

  const int d = inst.times.at(inst.depot().id);
  std::vector<double> pkgs(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    pkgs[static_cast<size_t>(i)] = static_cast<double>(inst.packages_at(t.stop_ids[static_cast<size_t>(i)]));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      t.phi[0](i, j) = inst.times.m(i, j);
      const double di = inst.times.m(d, i), dj = inst.times.m(d, j);
      const double id = inst.times.m(i, d), jd = inst.times.m(j, d);
      t.phi[1](i, j) = di > 0.0 ? dj / di : nan;
      t.phi[2](i, j) = id > 0.0 ? jd / id : nan;
      t.phi[3](i, j) = pkgs[static_cast<size_t>(i)] > 0.0
                           ? pkgs[static_cast<size_t>(j)] / pkgs[static_cast<size_t>(i)]
                           : nan;
    }
  }
  patch_undefined(t.phi[1]);
  patch_undefined(t.phi[2]);
  patch_undefined(t.phi[3]);
  for (auto& m : t.phi) normalize_offdiag(m);
  return t;
}

CostMatrix stop_cost_matrix(const StopFeatureTensor& features, const std::vector<double>& theta) {
  check_theta_bounds(theta, kStopFeatureCount);
  return weighted_cost(features.stop_ids, features.phi.data(), kStopFeatureCount, theta);
}

}  // namespace lastmile
