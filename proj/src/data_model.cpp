#include "lastmile/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

namespace lastmile {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing dataset file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

RouteInstance build_instance(const RouteId& rid, const json& meta, const json* seq,
                             const json& times, const json* pkgs) {
  RouteInstance inst;
  inst.id = rid;
  inst.station = meta.value("station_code", std::string{});
  inst.date = meta.value("date_YYYY_MM_DD", std::string{});
  inst.departure_time = meta.value("departure_time_utc", std::string{});
  inst.capacity_cm3 = meta.value("executor_capacity_cm3", 0.0);
  if (auto r = opt_string(meta, "route_score")) inst.rating = rating_from_string(*r);

  const json& stops = meta.at("stops");
  for (auto it = stops.begin(); it != stops.end(); ++it) {
    Stop s;
    s.id = it.key();
    const json& sj = it.value();
    s.lat = sj.value("lat", 0.0);
    s.lng = sj.value("lng", 0.0);
    const std::string type = sj.value("type", "Dropoff");
    s.kind = (type == "Station") ? StopKind::depot : StopKind::delivery;
    if (auto z = opt_string(sj, "zone_id")) s.zone = *z;
    inst.stops.push_back(std::move(s));
  }
  std::sort(inst.stops.begin(), inst.stops.end(),
            [](const Stop& a, const Stop& b) { return a.id < b.id; });

  std::vector<StopId> ids;
  ids.reserve(inst.stops.size());
  for (const auto& s : inst.stops) ids.push_back(s.id);
  inst.times = StopTimeMatrix::make(ids);
  for (auto row = times.begin(); row != times.end(); ++row) {
    if (!inst.times.index.count(row.key())) {
      throw ValidationError("travel times reference unknown stop " + row.key());
    }
    for (auto col = row.value().begin(); col != row.value().end(); ++col) {
      if (!inst.times.index.count(col.key())) {
        throw ValidationError("travel times reference unknown stop " + col.key());
      }
      inst.times.set(row.key(), col.key(), col.value().get<double>());
    }
  }

  if (pkgs) {
    for (auto stop_it = pkgs->begin(); stop_it != pkgs->end(); ++stop_it) {
      for (auto pk = stop_it.value().begin(); pk != stop_it.value().end(); ++pk) {
        Package p;
        p.id = pk.key();
        p.stop = stop_it.key();
        const json& pj = pk.value();
        p.status = package_status_from_string(pj.value("scan_status", "DELIVERED"));
        if (pj.contains("dimensions")) {
          const json& d = pj.at("dimensions");
          p.width_cm = d.value("width_cm", 0.0);
          p.length_cm = d.value("depth_cm", 0.0);
          p.height_cm = d.value("height_cm", 0.0);
        }
        p.service_time_s = pj.value("planned_service_time_seconds", 0.0);
        if (pj.contains("time_window")) {
          const json& w = pj.at("time_window");
          auto ws = opt_string(w, "start_time_utc");
          auto we = opt_string(w, "end_time_utc");
          if (ws && we) p.time_window = TimeWindow{*ws, *we};
        }
        inst.packages.push_back(std::move(p));
      }
    }
    std::sort(inst.packages.begin(), inst.packages.end(),
              [](const Package& a, const Package& b) { return a.id < b.id; });
  }

  if (seq) {
    // visit-order integers -> ordered id list
    const json& order = seq->contains("actual") ? seq->at("actual") : *seq;
    std::vector<std::pair<long long, StopId>> entries;
    for (auto it = order.begin(); it != order.end(); ++it) {
      entries.emplace_back(it.value().get<long long>(), it.key());
    }
    std::sort(entries.begin(), entries.end());
    StopSequence sseq;
    sseq.reserve(entries.size());
    for (auto& [pos, sid] : entries) sseq.push_back(sid);
    inst.actual = std::move(sseq);
  }
  return inst;
}

}  // namespace

IngestResult ingest(const std::string& dir) {
  const fs::path base(dir);
  const json routes = load_json(base / "route_data.json");
  const json sequences = load_json(base / "actual_sequences.json");
  const json times = load_json(base / "travel_times.json");
  const json packages = load_json(base / "package_data.json");

  IngestResult result;
  for (auto it = routes.begin(); it != routes.end(); ++it) {
    const RouteId rid = it.key();
    try {
      if (!times.contains(rid)) throw ValidationError("no travel times for route");
      const json* seq = sequences.contains(rid) ? &sequences.at(rid) : nullptr;
      const json* pkg = packages.contains(rid) ? &packages.at(rid) : nullptr;
      RouteInstance inst = build_instance(rid, it.value(), seq, times.at(rid), pkg);
      auto problems = validate_instance(inst);
      if (!problems.empty()) throw ValidationError(join(problems, "; "));
      result.instances.push_back(std::move(inst));
    } catch (const std::exception& e) {
      result.errors.push_back({rid, e.what()});
    }
  }
  std::sort(result.instances.begin(), result.instances.end(),
            [](const RouteInstance& a, const RouteInstance& b) { return a.id < b.id; });
  return result;
}

void write_dataset(const std::string& dir, const std::vector<RouteInstance>& instances) {
  fs::create_directories(dir);
  json routes = json::object();
  json sequences = json::object();
  json times = json::object();
  json packages = json::object();

  for (const auto& inst : instances) {
    json meta;
    meta["station_code"] = inst.station;
    meta["date_YYYY_MM_DD"] = inst.date;
    meta["departure_time_utc"] = inst.departure_time;
    meta["executor_capacity_cm3"] = inst.capacity_cm3;
    if (inst.rating) meta["route_score"] = to_string(*inst.rating);
    json stops = json::object();
    for (const auto& s : inst.stops) {
      json sj;
      sj["lat"] = s.lat;
      sj["lng"] = s.lng;
      sj["type"] = (s.kind == StopKind::depot) ? "Station" : "Dropoff";
      sj["zone_id"] = s.zone ? json(*s.zone) : json(nullptr);
      stops[s.id] = std::move(sj);
    }
    meta["stops"] = std::move(stops);
    routes[inst.id] = std::move(meta);

    json trow = json::object();
    for (size_t i = 0; i < inst.times.ids.size(); ++i) {
      json cols = json::object();
      for (size_t j = 0; j < inst.times.ids.size(); ++j) {
        cols[inst.times.ids[j]] = inst.times.m(static_cast<int>(i), static_cast<int>(j));
      }
      trow[inst.times.ids[i]] = std::move(cols);
    }
    times[inst.id] = std::move(trow);

    if (inst.actual) {
      json order = json::object();
      for (size_t i = 0; i < inst.actual->size(); ++i) {
        order[(*inst.actual)[i]] = static_cast<long long>(i);
      }
      sequences[inst.id] = json{{"actual", std::move(order)}};
    }

    json proute = json::object();
    for (const auto& p : inst.packages) {
      json pj;
      pj["scan_status"] = to_string(p.status);
      pj["planned_service_time_seconds"] = p.service_time_s;
      pj["dimensions"] = {
          {"width_cm", p.width_cm}, {"depth_cm", p.length_cm}, {"height_cm", p.height_cm}};
      if (p.time_window) {
        pj["time_window"] = {{"start_time_utc", p.time_window->start},
                             {"end_time_utc", p.time_window->end}};
      } else {
        pj["time_window"] = {{"start_time_utc", nullptr}, {"end_time_utc", nullptr}};
      }
      if (!proute.contains(p.stop)) proute[p.stop] = json::object();
      proute[p.stop][p.id] = std::move(pj);
    }
    packages[inst.id] = std::move(proute);
  }

  write_text_file((fs::path(dir) / "route_data.json").string(), routes.dump(1));
  write_text_file((fs::path(dir) / "actual_sequences.json").string(), sequences.dump(1));
  write_text_file((fs::path(dir) / "travel_times.json").string(), times.dump());
  write_text_file((fs::path(dir) / "package_data.json").string(), packages.dump(1));
}

std::vector<RouteInstance> filter_high_quality(const std::vector<RouteInstance>& instances) {
  std::vector<RouteInstance> out;
  for (const auto& inst : instances) {
    if (inst.rating && *inst.rating == Rating::high) out.push_back(inst);
  }
  return out;
}

std::pair<std::vector<RouteInstance>, std::vector<RouteInstance>> split_train_test(
    const std::vector<RouteInstance>& instances, double train_fraction, uint64_t seed) {
  if (instances.empty()) throw ValidationError("cannot split an empty instance list");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<size_t> order(instances.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const size_t n_train = static_cast<size_t>(
      std::lround(train_fraction * static_cast<double>(instances.size())));
  std::pair<std::vector<RouteInstance>, std::vector<RouteInstance>> out;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).push_back(instances[order[i]]);
  }
  return out;
}

RouteInstance synth_instance(const SynthSpec& spec) {
  if (spec.n_zones < 1) throw ConfigError("synth: n_zones must be >= 1");
  if (spec.stops_min < 1 || spec.stops_max < spec.stops_min) {
    throw ConfigError("synth: bad stops-per-zone range");
  }
  Rng rng(spec.seed);

  struct P {
    double x, y;
  };
  const P depot{0.0, 0.0};

  // Zone centers scattered around the depot, kept apart by rejection.
  std::vector<P> centers;
  const double extent = spec.zone_spacing * std::max(1.5, std::sqrt(static_cast<double>(spec.n_zones)));
  for (int z = 0; z < spec.n_zones; ++z) {
    P c{};
    for (int attempt = 0; attempt < 256; ++attempt) {
      c = {rng.uniform(-extent, extent), rng.uniform(-extent, extent)};
      bool ok = std::hypot(c.x, c.y) > spec.zone_spacing * 0.5;
      for (const auto& other : centers) {
        ok = ok && std::hypot(c.x - other.x, c.y - other.y) > spec.zone_spacing * 0.5;
      }
      if (ok) break;
    }
    centers.push_back(c);
  }

  RouteInstance inst;
  inst.id = spec.id.empty() ? ("SYNTH_" + std::to_string(spec.seed)) : spec.id;
  inst.station = spec.station;
  inst.date = "2020-01-01";
  inst.departure_time = "08:00:00";
  inst.capacity_cm3 = 4000000.0;

  Stop depot_stop;
  depot_stop.id = "AA";
  depot_stop.kind = StopKind::depot;
  inst.stops.push_back(depot_stop);

  // Zone ids in the X-N.MY shape; consecutive zones pair up into main zones.
  auto zone_id_for = [](int z) {
    return "S-" + std::to_string(z / 2) + "." + std::to_string(z % 2 + 1) +
           static_cast<char>('A' + z % 26);
  };

  std::vector<P> coords{depot};
  std::vector<std::vector<StopId>> zone_stops(static_cast<size_t>(spec.n_zones));
  int stop_counter = 0;
  for (int z = 0; z < spec.n_zones; ++z) {
    const int k = rng.int_in(spec.stops_min, spec.stops_max);
    for (int s = 0; s < k; ++s) {
      Stop st;
      // Two-letter ids after the depot: AB, AC, ...
      ++stop_counter;
      st.id = std::string(1, static_cast<char>('A' + stop_counter / 26)) +
              static_cast<char>('A' + stop_counter % 26);
      st.kind = StopKind::delivery;
      st.zone = zone_id_for(z);
      const P p{centers[z].x + rng.normal() * spec.cluster_radius,
                centers[z].y + rng.normal() * spec.cluster_radius};
      coords.push_back(p);
      zone_stops[z].push_back(st.id);
      inst.stops.push_back(std::move(st));
    }
  }

  // Store coordinates as lat/lng via the inverse equirectangular map around
  // a fixed reference, so feature code can project them back.
  const double ref_lat = 30.0, ref_lng = -97.0, earth_r = 6371000.0;
  const double coslat = std::cos(ref_lat * M_PI / 180.0);
  for (size_t i = 0; i < inst.stops.size(); ++i) {
    inst.stops[i].lat = ref_lat + coords[i].y / earth_r * 180.0 / M_PI;
    inst.stops[i].lng = ref_lng + coords[i].x / (earth_r * coslat) * 180.0 / M_PI;
  }
  std::sort(inst.stops.begin(), inst.stops.end(),
            [](const Stop& a, const Stop& b) { return a.id < b.id; });

  double max_dist = 0.0;
  for (size_t i = 0; i < coords.size(); ++i) {
    for (size_t j = 0; j < coords.size(); ++j) {
      max_dist = std::max(max_dist, std::hypot(coords[i].x - coords[j].x, coords[i].y - coords[j].y));
    }
  }
  if (max_dist <= 0.0) throw ValidationError("synth: degenerate geometry, all stops coincide");

  std::vector<StopId> all_ids;
  for (const auto& s : inst.stops) all_ids.push_back(s.id);
  inst.times = StopTimeMatrix::make(all_ids);
  std::unordered_map<StopId, P> coord_of;
  {
    // coords were built in depot-then-generation order; rebuild the mapping by id
    std::vector<StopId> gen_order{"AA"};
    for (const auto& zs : zone_stops) {
      for (const auto& sid : zs) gen_order.push_back(sid);
    }
    for (size_t i = 0; i < gen_order.size(); ++i) coord_of[gen_order[i]] = coords[i];
  }
  for (const auto& a : all_ids) {
    for (const auto& b : all_ids) {
      if (a == b) continue;
      const P pa = coord_of[a], pb = coord_of[b];
      const double base = std::hypot(pa.x - pb.x, pa.y - pb.y) / spec.speed_mps;
      inst.times.set(a, b, base * (1.0 + spec.noise_frac * rng.u01()));
    }
  }

  // Packages: 1-3 per delivery stop.
  for (const auto& sid : all_ids) {
    if (sid == "AA") continue;
    const int k = rng.int_in(1, 3);
    for (int i = 0; i < k; ++i) {
      Package p;
      p.id = "PKG_" + sid + "_" + std::to_string(i);
      p.stop = sid;
      p.status = PackageStatus::delivered;
      p.width_cm = rng.uniform(5.0, 40.0);
      p.length_cm = rng.uniform(5.0, 40.0);
      p.height_cm = rng.uniform(5.0, 40.0);
      p.service_time_s = rng.uniform(60.0, 180.0);
      inst.packages.push_back(std::move(p));
    }
  }

  // Driver benchmark: zones swept by center (x, then y), nearest-neighbor
  // within each zone starting from wherever the previous zone ended.
  std::vector<int> zorder(static_cast<size_t>(spec.n_zones));
  for (int z = 0; z < spec.n_zones; ++z) zorder[static_cast<size_t>(z)] = z;
  std::sort(zorder.begin(), zorder.end(), [&](int a, int b) {
    if (centers[a].x != centers[b].x) return centers[a].x < centers[b].x;
    return centers[a].y < centers[b].y;
  });
  StopSequence bench{"AA"};
  P cur = depot;
  for (int z : zorder) {
    std::vector<StopId> remaining = zone_stops[static_cast<size_t>(z)];
    std::sort(remaining.begin(), remaining.end());
    while (!remaining.empty()) {
      size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < remaining.size(); ++i) {
        const P p = coord_of[remaining[i]];
        const double d = std::hypot(p.x - cur.x, p.y - cur.y);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      bench.push_back(remaining[best]);
      cur = coord_of[remaining[best]];
      remaining.erase(remaining.begin() + static_cast<long>(best));
    }
  }
  inst.actual = std::move(bench);
  inst.rating = Rating::high;

  auto problems = validate_instance(inst);
  if (!problems.empty()) throw ValidationError("synth produced invalid instance: " + join(problems, "; "));
  return inst;
}

}  // namespace lastmile
