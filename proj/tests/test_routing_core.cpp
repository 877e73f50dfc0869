#include <doctest.h>

#include <set>

#include "lastmile/routing_core.hpp"
#include "test_helpers.hpp"

using namespace lastmile;

namespace {

bool is_permutation_of_all(const std::vector<int>& seq, int n) {
  if (static_cast<int>(seq.size()) != n) return false;
  std::set<int> seen(seq.begin(), seq.end());
  return static_cast<int>(seen.size()) == n && *seen.begin() == 0 && *seen.rbegin() == n - 1;
}

CostMatrix line_instance(const std::vector<double>& xs) {
  CostMatrix c = CostMatrix::make(helpers::index_labels(static_cast<int>(xs.size())));
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = 0; j < xs.size(); ++j) {
      if (i != j) c.m(static_cast<int>(i), static_cast<int>(j)) = std::fabs(xs[i] - xs[j]);
    }
  }
  return c;
}

}  // namespace

TEST_CASE("savings_tour trivial case") {
  CostMatrix c = CostMatrix::make({"a", "b"});
  c.m(0, 1) = 5;
  c.m(1, 0) = 7;
  CHECK(savings_tour(c, 0) == std::vector<int>{0, 1});
}

TEST_CASE("savings_tour solves a line instance optimally") {
  const CostMatrix c = line_instance({0.0, 1.0, 2.0, 3.0});
  const std::vector<int> tour = savings_tour(c, 0);
  const std::vector<int> best = brute_force_tour(c, 0);
  CHECK(tour_cost(c, tour) == tour_cost(c, best));
  CHECK(is_permutation_of_all(tour, 4));
}

TEST_CASE("savings_tour stays within the optimality budget on Euclidean instances") {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const CostMatrix c = helpers::random_euclidean(8, rng);
    const double heur = tour_cost(c, savings_tour(c, 0));
    const double best = tour_cost(c, brute_force_tour(c, 0));
    CHECK(heur >= best - 1e-9);
    CHECK(heur <= 1.25 * best);
  }
}

TEST_CASE("savings_path endpoints and trivial cases") {
  CostMatrix two = CostMatrix::make({"o", "d"});
  two.m(0, 1) = 3;
  two.m(1, 0) = 9;
  CHECK(savings_path(two, 0, 1) == std::vector<int>{0, 1});

  CostMatrix one = CostMatrix::make({"x"});
  CHECK(savings_path(one, 0, 0) == std::vector<int>{0});

  CostMatrix three = CostMatrix::make({"a", "b", "c"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) three.m(i, j) = 1.0;
    }
  }
  CHECK_THROWS_AS(savings_path(three, 1, 1), ValidationError);
}

TEST_CASE("savings_path matches brute force on a collinear layout") {
  const CostMatrix c = line_instance({0.0, 4.0, 1.0, 3.0, 2.0});
  const std::vector<int> path = savings_path(c, 0, 1);  // leftmost to rightmost
  const std::vector<int> best = brute_force_path(c, 0, 1);
  CHECK(path == best);  // monotone sweep is the unique optimum
}

TEST_CASE("savings_path stays within the optimality budget") {
  Rng rng(131);
  for (int trial = 0; trial < 40; ++trial) {
    const CostMatrix c = helpers::random_euclidean(7, rng);
    const std::vector<int> path = savings_path(c, 0, 6);
    CHECK(path.front() == 0);
    CHECK(path.back() == 6);
    CHECK(is_permutation_of_all(path, 7));
    const double heur = path_cost(c, path);
    const double best = path_cost(c, brute_force_path(c, 0, 6));
    CHECK(heur >= best - 1e-9);
    CHECK(heur <= 1.25 * best);
  }
}

TEST_CASE("outputs are permutations on random asymmetric matrices") {
  Rng rng(151);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(8));
    const CostMatrix c = helpers::random_asymmetric(n, rng);
    CHECK(is_permutation_of_all(savings_tour(c, 0), n));
    if (n >= 2) {
      const std::vector<int> p = savings_path(c, 0, n - 1);
      CHECK(is_permutation_of_all(p, n));
      CHECK(p.front() == 0);
      CHECK(p.back() == n - 1);
    }
  }
}

TEST_CASE("brute force breaks ties lexicographically") {
  CostMatrix c = CostMatrix::make({"a", "b", "c"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) c.m(i, j) = 1.0;
    }
  }
  CHECK(brute_force_tour(c, 0) == std::vector<int>{0, 1, 2});
  CHECK(brute_force_path(c, 0, 2) == std::vector<int>{0, 1, 2});
}

TEST_CASE("brute force argmin is invariant to constant cost shifts") {
  Rng rng(171);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c = helpers::random_asymmetric(6, rng);
    CostMatrix shifted = c;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i != j) shifted.m(i, j) += 37.5;
      }
    }
    CHECK(brute_force_tour(c, 0) == brute_force_tour(shifted, 0));
  }
}

TEST_CASE("solvers are deterministic") {
  Rng rng(191);
  const CostMatrix c = helpers::random_asymmetric(7, rng);
  CHECK(savings_tour(c, 0) == savings_tour(c, 0));
  CHECK(savings_path(c, 0, 3) == savings_path(c, 0, 3));
}

TEST_CASE("validation rejects bad matrices") {
  CostMatrix c = CostMatrix::make({"a", "b"});
  c.m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(savings_tour(c, 0), ValidationError);

  Rng rng(1);
  const CostMatrix guard = helpers::random_euclidean(11, rng);
  CHECK_THROWS_AS(brute_force_tour(guard, 0), ValidationError);
}

TEST_CASE("two-opt only improves") {
  Rng rng(211);
  for (int trial = 0; trial < 10; ++trial) {
    const CostMatrix c = helpers::random_euclidean(9, rng);
    const double plain = tour_cost(c, savings_tour(c, 0));
    SolverOptions opts;
    opts.two_opt = true;
    const double improved = tour_cost(c, savings_tour(c, 0, opts));
    CHECK(improved <= plain + 1e-9);
  }
}
