#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lastmile/data_model.hpp"
#include "lastmile/hierarchical_router.hpp"
#include "test_helpers.hpp"

using namespace lastmile;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lastmile_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<RouteInstance> three_synthetic() {
  std::vector<RouteInstance> out;
  for (int i = 0; i < 3; ++i) {
    SynthSpec spec;
    spec.seed = 100 + static_cast<uint64_t>(i);
    spec.id = "R" + std::to_string(i);
    spec.noise_frac = 0.2;
    out.push_back(synth_instance(spec));
  }
  return out;
}

}  // namespace

TEST_CASE("ingest round-trips a written dataset") {
  const fs::path dir = temp_dir("roundtrip");
  const std::vector<RouteInstance> original = three_synthetic();
  write_dataset(dir.string(), original);

  const IngestResult res = ingest(dir.string());
  CHECK(res.errors.empty());
  REQUIRE(res.instances.size() == original.size());
  for (size_t i = 0; i < original.size(); ++i) {
    CHECK(res.instances[i] == original[i]);
  }
}

TEST_CASE("ingest reports a route whose actual sequence drops a stop") {
  const fs::path dir = temp_dir("defect");
  write_dataset(dir.string(), three_synthetic());

  nlohmann::json seqs = nlohmann::json::parse(std::ifstream(dir / "actual_sequences.json"));
  auto& actual = seqs["R1"]["actual"];
  actual.erase(actual.begin());  // no longer a permutation
  std::ofstream(dir / "actual_sequences.json") << seqs.dump();

  const IngestResult res = ingest(dir.string());
  CHECK(res.instances.size() == 2);
  REQUIRE(res.errors.size() == 1);
  CHECK(res.errors[0].route == "R1");
}

TEST_CASE("a stop without a zone label still loads") {
  const fs::path dir = temp_dir("nozone");
  write_dataset(dir.string(), three_synthetic());

  nlohmann::json routes = nlohmann::json::parse(std::ifstream(dir / "route_data.json"));
  auto& stops = routes["R0"]["stops"];
  bool cleared = false;
  for (auto it = stops.begin(); it != stops.end() && !cleared; ++it) {
    if (it.value()["type"] == "Dropoff") {
      it.value()["zone_id"] = nullptr;
      cleared = true;
    }
  }
  REQUIRE(cleared);
  std::ofstream(dir / "route_data.json") << routes.dump();

  const IngestResult res = ingest(dir.string());
  CHECK(res.errors.empty());
  const auto& r0 = res.instances.at(0);
  int unzoned = 0;
  for (const auto& s : r0.stops) {
    if (s.kind == StopKind::delivery && !s.zone) ++unzoned;
  }
  CHECK(unzoned == 1);
}

TEST_CASE("missing and malformed files are fatal") {
  const fs::path dir = temp_dir("fatal");
  CHECK_THROWS_AS(ingest(dir.string()), ValidationError);

  write_dataset(dir.string(), three_synthetic());
  std::ofstream(dir / "travel_times.json") << "{ not json";
  CHECK_THROWS_WITH_AS(ingest(dir.string()),
                       doctest::Contains("malformed JSON"), ValidationError);
}

TEST_CASE("filter_high_quality keeps exactly the high subset in order") {
  std::vector<RouteInstance> xs(6);
  const Rating ratings[] = {Rating::high, Rating::medium, Rating::low,
                            Rating::high, Rating::medium, Rating::low};
  for (size_t i = 0; i < xs.size(); ++i) {
    xs[i].id = "R" + std::to_string(i);
    xs[i].rating = ratings[i];
  }
  const auto high = filter_high_quality(xs);
  REQUIRE(high.size() == 2);
  CHECK(high[0].id == "R0");
  CHECK(high[1].id == "R3");

  for (auto& x : xs) x.rating = Rating::medium;
  CHECK(filter_high_quality(xs).empty());
}

TEST_CASE("split_train_test is deterministic and exact") {
  std::vector<RouteInstance> xs(10);
  for (size_t i = 0; i < xs.size(); ++i) xs[i].id = "R" + std::to_string(i);

  const auto [train, test] = split_train_test(xs, 0.7, 42);
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);

  std::set<RouteId> ids;
  for (const auto& r : train) ids.insert(r.id);
  for (const auto& r : test) ids.insert(r.id);
  CHECK(ids.size() == 10);

  const auto [train2, test2] = split_train_test(xs, 0.7, 42);
  for (size_t i = 0; i < train.size(); ++i) CHECK(train[i].id == train2[i].id);
  for (size_t i = 0; i < test.size(); ++i) CHECK(test[i].id == test2[i].id);
}

TEST_CASE("split_train_test rounds like the corpus split") {
  std::vector<RouteInstance> xs(2718);
  for (size_t i = 0; i < xs.size(); ++i) xs[i].id = "R" + std::to_string(i);
  const auto [train, test] = split_train_test(xs, 0.7, 0);
  CHECK(train.size() == 1903);
  CHECK(test.size() == 815);
}

TEST_CASE("split_train_test rejects bad inputs") {
  CHECK_THROWS_AS(split_train_test({}, 0.7, 0), ValidationError);
  std::vector<RouteInstance> xs(3);
  CHECK_THROWS_AS(split_train_test(xs, 0.0, 0), ConfigError);
  CHECK_THROWS_AS(split_train_test(xs, 1.0, 0), ConfigError);
}

TEST_CASE("synth_instance produces the advertised shape") {
  SynthSpec spec;
  spec.n_zones = 4;
  spec.stops_min = 3;
  spec.stops_max = 5;
  spec.seed = 7;
  const RouteInstance inst = synth_instance(spec);

  const size_t deliveries = inst.stops.size() - 1;
  CHECK(deliveries >= 12);
  CHECK(deliveries <= 20);
  CHECK(validate_instance(inst).empty());
  REQUIRE(inst.actual.has_value());

  const ZonePartition part = build_partition(inst);
  CHECK(is_zone_contiguous(*inst.actual, part));
}

TEST_CASE("synth_instance smallest case") {
  SynthSpec spec;
  spec.n_zones = 1;
  spec.stops_min = 1;
  spec.stops_max = 1;
  spec.seed = 3;
  const RouteInstance inst = synth_instance(spec);
  CHECK(inst.stops.size() == 2);
  REQUIRE(inst.actual.has_value());
  CHECK(inst.actual->front() == inst.depot().id);
  CHECK(inst.actual->size() == 2);
}

TEST_CASE("synth travel times satisfy the triangle inequality without noise") {
  SynthSpec spec;
  spec.n_zones = 3;
  spec.seed = 9;
  spec.noise_frac = 0.0;
  const RouteInstance inst = synth_instance(spec);
  const int n = inst.times.m.n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        CHECK(inst.times.m(i, j) <= inst.times.m(i, k) + inst.times.m(k, j) + 1e-9);
      }
    }
  }
}

TEST_CASE("synth rejects degenerate geometry") {
  SynthSpec spec;
  spec.n_zones = 1;
  spec.zone_spacing = 0.0;
  spec.cluster_radius = 0.0;
  CHECK_THROWS_AS(synth_instance(spec), ValidationError);
}

TEST_CASE("complete sequences validate as permutations under shuffling") {
  Rng rng(77);
  SynthSpec spec;
  spec.seed = 21;
  const RouteInstance inst = synth_instance(spec);
  for (int trial = 0; trial < 50; ++trial) {
    StopSequence seq = inst.delivery_stop_ids();
    rng.shuffle(seq);
    seq.insert(seq.begin(), inst.depot().id);
    CHECK(is_complete_sequence(inst, seq));
    StopSequence truncated(seq.begin(), seq.end() - 1);
    CHECK_FALSE(is_complete_sequence(inst, truncated));
    StopSequence doubled = seq;
    doubled[1] = doubled[2];
    CHECK_FALSE(is_complete_sequence(inst, doubled));
  }
}
