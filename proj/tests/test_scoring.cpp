#include <doctest.h>

#include "lastmile/scoring.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace lastmile;

namespace {

StopTimeMatrix matrix3(double ab, double ac, double ba, double bc, double ca, double cb) {
  StopTimeMatrix t = StopTimeMatrix::make({"a", "b", "c"});
  t.set("a", "b", ab);
  t.set("a", "c", ac);
  t.set("b", "a", ba);
  t.set("b", "c", bc);
  t.set("c", "a", ca);
  t.set("c", "b", cb);
  return t;
}

}  // namespace

TEST_CASE("normalize_times constant matrix maps to ones") {
  StopTimeMatrix t = matrix3(600, 600, 600, 600, 600, 600);
  const NormalizedTimeMatrix n = normalize_times(t);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(n.m(i, j) == (i == j ? 0.0 : 1.0));
    }
  }
}

TEST_CASE("normalize_times divides by the off-diagonal mean") {
  StopTimeMatrix t = matrix3(2, 4, 6, 8, 10, 12);
  const NormalizedTimeMatrix n = normalize_times(t);
  CHECK(n.get("a", "b") == 2.0 / 7.0);
  CHECK(n.get("c", "b") == 12.0 / 7.0);

  double mean = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) mean += n.m(i, j);
    }
  }
  CHECK(mean / 6.0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize_times degenerate inputs") {
  StopTimeMatrix zero = matrix3(0, 0, 0, 0, 0, 0);
  const NormalizedTimeMatrix nz = normalize_times(zero);
  for (double v : nz.m.v) CHECK(v == 0.0);

  StopTimeMatrix single = StopTimeMatrix::make({"only"});
  const NormalizedTimeMatrix ns = normalize_times(single);
  CHECK(ns.m.n == 1);
  CHECK(ns.m(0, 0) == 0.0);
}

TEST_CASE("normalize_times is invariant to uniform time scaling") {
  Rng rng(7);
  StopTimeMatrix t = helpers::random_times(6, rng);
  const NormalizedTimeMatrix base = normalize_times(t);
  for (double k : {3.0, 0.25, 17.5}) {
    StopTimeMatrix scaled = t;
    for (double& v : scaled.m.v) v *= k;
    const NormalizedTimeMatrix n = normalize_times(scaled);
    for (size_t i = 0; i < n.m.v.size(); ++i) {
      CHECK(n.m.v[i] == doctest::Approx(base.m.v[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sequence_deviation identity and hand case") {
  const StopSequence a{"d", "s1", "s2", "s3"};
  CHECK(sequence_deviation(a, a) == 0.0);

  const StopSequence b{"d", "s1", "s3", "s2"};
  CHECK(sequence_deviation(a, b) == 1.0 / 3.0);
}

TEST_CASE("sequence_deviation stays in [0, 1] and matches the reference") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    StopTimeMatrix t = helpers::random_times(k, rng);
    const StopSequence a = helpers::shuffled_sequence(t, rng);
    const StopSequence b = helpers::shuffled_sequence(t, rng);
    const double sd = sequence_deviation(a, b);
    CHECK(sd >= 0.0);
    CHECK(sd <= 1.0);
    CHECK(sd == oracles::sd_reference(a, b));
  }
}

TEST_CASE("sequence_deviation rejects mismatched stop sets") {
  CHECK_THROWS_AS(sequence_deviation({"d", "x"}, {"d", "y"}), ValidationError);
  CHECK_THROWS_AS(sequence_deviation({"d", "x"}, {"e", "x"}), ValidationError);
  CHECK(sequence_deviation({"d", "x"}, {"d", "x"}) == 0.0);  // n == 1
}

TEST_CASE("erp identity is free") {
  Rng rng(3);
  StopTimeMatrix t = helpers::random_times(6, rng);
  const NormalizedTimeMatrix n = normalize_times(t);
  const StopSequence a = helpers::shuffled_sequence(t, rng);
  const ErpResult r = erp(a, a, n);
  CHECK(r.erp_n == 0.0);
  CHECK(r.erp_e == 0);
}

TEST_CASE("erp two-stop swap matches the exhaustive alignment") {
  StopTimeMatrix nt = StopTimeMatrix::make({"d", "x", "y"});
  for (const auto& [u, v] : std::vector<std::pair<StopId, StopId>>{
           {"d", "x"}, {"x", "d"}, {"d", "y"}, {"y", "d"}, {"x", "y"}, {"y", "x"}}) {
    nt.set(u, v, 0.5);
  }
  const StopSequence a{"d", "x", "y"};
  const StopSequence b{"d", "y", "x"};
  const ErpResult r = erp(a, b, nt, 1000.0);
  const oracles::AlignmentResult ref = oracles::erp_exhaustive(a, b, nt, 1000.0);
  CHECK(r.erp_n == ref.cost);
  CHECK(r.erp_e == ref.nonzero_ops);
  CHECK(r.erp_n == 1.0);  // substitutions d<->d, x<->y, y<->x
  CHECK(r.erp_e == 2);
}

TEST_CASE("erp dynamic program equals the exhaustive minimum") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));  // up to 7 stops
    StopTimeMatrix t = helpers::random_times(k, rng);
    const NormalizedTimeMatrix n = normalize_times(t);
    const StopSequence a = helpers::shuffled_sequence(t, rng);
    const StopSequence b = helpers::shuffled_sequence(t, rng);
    const ErpResult r = erp(a, b, n);
    const oracles::AlignmentResult ref = oracles::erp_exhaustive(a, b, n, kDefaultGapPenalty);
    CHECK(r.erp_n == ref.cost);
    CHECK(r.erp_e == ref.nonzero_ops);
  }
}

TEST_CASE("erp rejects mismatched sets") {
  StopTimeMatrix t = StopTimeMatrix::make({"d", "x", "y"});
  const NormalizedTimeMatrix n = normalize_times(t);
  CHECK_THROWS_AS(erp({"d", "x"}, {"d", "y"}, n), ValidationError);
}

TEST_CASE("route_score composes the three pieces") {
  StopTimeMatrix nt = StopTimeMatrix::make({"d", "x", "y"});
  for (const auto& [u, v] : std::vector<std::pair<StopId, StopId>>{
           {"d", "x"}, {"x", "d"}, {"d", "y"}, {"y", "d"}, {"x", "y"}, {"y", "x"}}) {
    nt.set(u, v, 0.5);
  }
  const StopSequence a{"d", "x", "y"};
  const StopSequence b{"d", "y", "x"};
  const ScoreBreakdown s = route_score(a, b, nt);
  // sd = 1, erp = (1.0, 2) -> score = 0.5
  CHECK(s.sd == 1.0);
  CHECK(s.score == 0.5);

  const ScoreBreakdown same = route_score(a, a, nt);
  CHECK(same.score == 0.0);
  CHECK(same.erp_e == 0);
}

TEST_CASE("aggregate_score is the arithmetic mean") {
  std::vector<ScoreBreakdown> b(2);
  b[0].score = 0.0;
  b[1].score = 0.1;
  CHECK(aggregate_score(b) == doctest::Approx(0.05));
  b.resize(1);
  CHECK(aggregate_score(b) == 0.0);
  CHECK_THROWS_AS(aggregate_score({}), ValidationError);
}

TEST_CASE("full metric agrees with an independently coded evaluator") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    StopTimeMatrix t = helpers::random_times(k, rng);
    const NormalizedTimeMatrix n = normalize_times(t);
    const StopSequence a = helpers::shuffled_sequence(t, rng);
    const StopSequence b = helpers::shuffled_sequence(t, rng);
    const ScoreBreakdown s = route_score(a, b, n);
    const double ref = oracles::route_score_reference(a, b, n, kDefaultGapPenalty);
    CHECK(s.score == doctest::Approx(ref).epsilon(1e-9));
    CHECK(s.score >= 0.0);
  }
}

TEST_CASE("route_score is invariant under travel-time scaling") {
  Rng rng(29);
  StopTimeMatrix t = helpers::random_times(7, rng);
  const StopSequence a = helpers::shuffled_sequence(t, rng);
  const StopSequence b = helpers::shuffled_sequence(t, rng);
  const double base = route_score(a, b, normalize_times(t)).score;
  StopTimeMatrix scaled = t;
  for (double& v : scaled.m.v) v *= 42.0;
  CHECK(route_score(a, b, normalize_times(scaled)).score == doctest::Approx(base).epsilon(1e-12));
}
