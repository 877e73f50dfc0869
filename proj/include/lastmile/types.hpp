#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lastmile/util.hpp"

namespace lastmile {

using StopId = std::string;
using ZoneId = std::string;
using RouteId = std::string;

// Pseudo-zone id used for the depot when it participates in zone-level
// problems. Real zone ids follow the X-N.MY pattern and never collide.
inline constexpr const char* kDepotZone = "DEPOT";

enum class StopKind { depot, delivery };
enum class Rating { high, medium, low };
enum class PackageStatus { rejected, delivered, delivery_attempted };

struct Stop {
  StopId id;
  double lat = 0.0;
  double lng = 0.0;
  std::optional<ZoneId> zone;
  StopKind kind = StopKind::delivery;

  bool operator==(const Stop&) const = default;
};

struct TimeWindow {
  std::string start;
  std::string end;
  bool operator==(const TimeWindow&) const = default;
};

struct Package {
  std::string id;
  StopId stop;
  PackageStatus status = PackageStatus::delivered;
  double width_cm = 0.0;
  double length_cm = 0.0;
  double height_cm = 0.0;
  std::optional<TimeWindow> time_window;
  double service_time_s = 0.0;

  double volume_cm3() const { return width_cm * length_cm * height_cm; }
  bool operator==(const Package&) const = default;
};

// Dense square matrix addressed by position.
struct Matrix {
  int n = 0;
  std::vector<double> v;

  Matrix() = default;
  explicit Matrix(int n_, double fill = 0.0)
      : n(n_), v(static_cast<size_t>(n_) * static_cast<size_t>(n_), fill) {}

  double& operator()(int i, int j) { return v[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return v[static_cast<size_t>(i) * n + j]; }
  bool operator==(const Matrix&) const = default;
};

// Square stop-by-stop table. Index order is the sorted stop id order, so
// lookups and iteration are deterministic regardless of input file order.
struct StopTimeMatrix {
  std::vector<StopId> ids;
  std::unordered_map<StopId, int> index;
  Matrix m;

  static StopTimeMatrix make(std::vector<StopId> stop_ids);

  int at(const StopId& s) const;
  double get(const StopId& a, const StopId& b) const { return m(at(a), at(b)); }
  void set(const StopId& a, const StopId& b, double t) { m(at(a), at(b)) = t; }

  bool operator==(const StopTimeMatrix& o) const {
    return ids == o.ids && m == o.m;
  }
};

using TravelTimeMatrix = StopTimeMatrix;
using NormalizedTimeMatrix = StopTimeMatrix;

// Ordered visit list; the first element is always the depot.
using StopSequence = std::vector<StopId>;

struct RouteInstance {
  RouteId id;
  std::string station;
  std::string date;
  std::string departure_time;
  double capacity_cm3 = 0.0;
  std::vector<Stop> stops;  // sorted by id, exactly one depot
  std::vector<Package> packages;
  TravelTimeMatrix times;
  std::optional<StopSequence> actual;
  std::optional<Rating> rating;

  const Stop& depot() const;
  const Stop& stop(const StopId& id) const;
  std::vector<StopId> delivery_stop_ids() const;
  int packages_at(const StopId& id) const;

  bool operator==(const RouteInstance&) const = default;
};

// Checks that `seq` starts at the depot and visits every stop exactly once.
bool is_complete_sequence(const RouteInstance& inst, const StopSequence& seq);

// Structural checks on a built instance; returns human-readable problems.
std::vector<std::string> validate_instance(const RouteInstance& inst);

std::string to_string(Rating r);
std::string to_string(PackageStatus s);
Rating rating_from_string(const std::string& s);
PackageStatus package_status_from_string(const std::string& s);

}  // namespace lastmile
