#pragma once

#include <string>
#include <vector>

#include "lastmile/types.hpp"

namespace lastmile {

// Square cost table over an abstract node set (stops or zones). Labels drive
// every tie-break, so identical inputs give identical sequences everywhere.
struct CostMatrix {
  std::vector<std::string> labels;
  Matrix m;

  static CostMatrix make(std::vector<std::string> labels);
  int size() const { return m.n; }
};

struct SolverOptions {
  // Optional 2-opt pass on tours, off by default so weight learning sees the
  // bare savings construction. Fixed-endpoint paths always run the interior
  // polish; their objective is raw travel time, independent of any weights.
  bool two_opt = false;
};

// Throws if the matrix is not finite/nonnegative with a zero diagonal.
void validate_costs(const CostMatrix& costs);

double tour_cost(const CostMatrix& costs, const std::vector<int>& tour);
double path_cost(const CostMatrix& costs, const std::vector<int>& path);

// Clarke-Wright savings for a single uncapacitated vehicle. Returns the tour
// as a node order starting at `depot`; the return arc to the depot is
// implicit. Savings ties break on (label_i, label_j).
std::vector<int> savings_tour(const CostMatrix& costs, int depot,
                              const SolverOptions& opts = {});

// Open Hamiltonian path from `origin` to `destination` built by the savings
// construction against a virtual depot formed by contracting the two
// endpoints, then cutting the tour there; the origin never receives an
// internal arc and the destination never emits one.
std::vector<int> savings_path(const CostMatrix& costs, int origin, int destination,
                              const SolverOptions& opts = {});

// Exhaustive oracles for small instances (guarded at 10 nodes). Optimal, with
// lexicographic-by-label tie-breaking.
std::vector<int> brute_force_tour(const CostMatrix& costs, int depot);
std::vector<int> brute_force_path(const CostMatrix& costs, int origin, int destination);

}  // namespace lastmile
