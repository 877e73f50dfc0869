#include "lastmile/routing_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lastmile {

CostMatrix CostMatrix::make(std::vector<std::string> labels) {
  CostMatrix c;
  c.m = Matrix(static_cast<int>(labels.size()), 0.0);
  c.labels = std::move(labels);
  return c;
}

void validate_costs(const CostMatrix& costs) {
  const int n = costs.m.n;
  if (n < 1) throw ValidationError("empty cost matrix");
  if (static_cast<int>(costs.labels.size()) != n) {
    throw ValidationError("cost matrix labels do not match its size");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = costs.m(i, j);
      if (!std::isfinite(c)) {
        throw ValidationError("disconnected cost matrix: non-finite entry at " +
                              costs.labels[static_cast<size_t>(i)] + "->" +
                              costs.labels[static_cast<size_t>(j)]);
      }
      if (c < 0.0) throw ValidationError("negative cost entry");
      if (i == j && c != 0.0) throw ValidationError("nonzero cost diagonal");
    }
  }
}

double tour_cost(const CostMatrix& costs, const std::vector<int>& tour) {
  double total = path_cost(costs, tour);
  if (tour.size() > 1) total += costs.m(tour.back(), tour.front());
  return total;
}

double path_cost(const CostMatrix& costs, const std::vector<int>& path) {
  double total = 0.0;
  for (size_t i = 1; i < path.size(); ++i) total += costs.m(path[i - 1], path[i]);
  return total;
}

namespace {

struct SavingsArc {
  int from, to;
  double saving;
};

// Greedy fragment merging. Fragments are directed chains; arc (i, j) is
// mergeable when i is the tail of one fragment and j the head of another.
// Always takes the highest-saving feasible arc (rescan after each merge).
std::vector<int> merge_fragments(int n, const std::vector<SavingsArc>& arcs,
                                 const std::vector<int>& nodes) {
  std::vector<int> frag_of(static_cast<size_t>(n), -1);
  std::vector<std::vector<int>> frags;
  for (int v : nodes) {
    frag_of[static_cast<size_t>(v)] = static_cast<int>(frags.size());
    frags.push_back({v});
  }
  size_t alive = frags.size();
  while (alive > 1) {
    bool merged = false;
    for (const auto& arc : arcs) {
      const int fi = frag_of[static_cast<size_t>(arc.from)];
      const int fj = frag_of[static_cast<size_t>(arc.to)];
      if (fi == fj) continue;
      if (frags[static_cast<size_t>(fi)].back() != arc.from) continue;
      if (frags[static_cast<size_t>(fj)].front() != arc.to) continue;
      auto& dst = frags[static_cast<size_t>(fi)];
      auto& src = frags[static_cast<size_t>(fj)];
      for (int v : src) frag_of[static_cast<size_t>(v)] = fi;
      dst.insert(dst.end(), src.begin(), src.end());
      src.clear();
      --alive;
      merged = true;
      break;
    }
    if (!merged) throw ValidationError("savings merge stalled; infeasible arc set");
  }
  for (auto& f : frags) {
    if (!f.empty()) return f;
  }
  throw std::logic_error("no fragment survived the merge");
}

void sort_arcs(std::vector<SavingsArc>& arcs, const CostMatrix& costs) {
  std::sort(arcs.begin(), arcs.end(), [&](const SavingsArc& a, const SavingsArc& b) {
    if (a.saving != b.saving) return a.saving > b.saving;
    const auto& la = costs.labels[static_cast<size_t>(a.from)];
    const auto& lb = costs.labels[static_cast<size_t>(b.from)];
    if (la != lb) return la < lb;
    return costs.labels[static_cast<size_t>(a.to)] < costs.labels[static_cast<size_t>(b.to)];
  });
}

// 2-opt on the orientation-sensitive cost: re-evaluates candidate sequences in
// full, so asymmetric matrices are handled correctly.
void two_opt_pass(const CostMatrix& costs, std::vector<int>& seq, size_t first, size_t last,
                  bool closed) {
  auto eval = [&](const std::vector<int>& s) { return closed ? tour_cost(costs, s) : path_cost(costs, s); };
  double best = eval(seq);
  bool improved = true;
  int rounds = 0;
  while (improved && rounds++ < 200) {
    improved = false;
    for (size_t i = first; i + 1 <= last; ++i) {
      for (size_t j = i + 1; j <= last; ++j) {
        std::vector<int> cand = seq;
        std::reverse(cand.begin() + static_cast<long>(i), cand.begin() + static_cast<long>(j) + 1);
        const double c = eval(cand);
        if (c < best - 1e-12) {
          seq = std::move(cand);
          best = c;
          improved = true;
        }
      }
    }
  }
}

}  // namespace

std::vector<int> savings_tour(const CostMatrix& costs, int depot, const SolverOptions& opts) {
  validate_costs(costs);
  const int n = costs.size();
  if (depot < 0 || depot >= n) throw ValidationError("depot index out of range");
  if (n < 2) throw ValidationError("savings_tour needs at least one non-depot node");

  std::vector<int> others;
  for (int v = 0; v < n; ++v) {
    if (v != depot) others.push_back(v);
  }
  if (others.size() == 1) return {depot, others[0]};

  std::vector<SavingsArc> arcs;
  arcs.reserve(others.size() * (others.size() - 1));
  for (int i : others) {
    for (int j : others) {
      if (i == j) continue;
      arcs.push_back({i, j, costs.m(i, depot) + costs.m(depot, j) - costs.m(i, j)});
    }
  }
  sort_arcs(arcs, costs);

  std::vector<int> chain = merge_fragments(n, arcs, others);
  std::vector<int> tour;
  tour.reserve(chain.size() + 1);
  tour.push_back(depot);
  tour.insert(tour.end(), chain.begin(), chain.end());
  if (opts.two_opt) two_opt_pass(costs, tour, 1, tour.size() - 1, /*closed=*/true);
  return tour;
}

std::vector<int> savings_path(const CostMatrix& costs, int origin, int destination,
                              const SolverOptions& opts) {
  validate_costs(costs);
  const int n = costs.size();
  if (origin < 0 || origin >= n || destination < 0 || destination >= n) {
    throw ValidationError("path endpoint out of range");
  }
  if (n == 1) return {origin};
  if (origin == destination) {
    throw ValidationError("path origin and destination must differ for multi-node sets");
  }

  // Virtual depot = (origin, destination) contracted: leaving it costs the
  // leg from the origin, entering it costs the leg to the destination. The
  // savings list keeps its usual geometric structure and the endpoints stay
  // fixed by construction.
  std::vector<int> interior;
  for (int v = 0; v < n; ++v) {
    if (v != origin && v != destination) interior.push_back(v);
  }
  if (interior.empty()) return {origin, destination};

  std::vector<SavingsArc> arcs;
  arcs.reserve(interior.size() * (interior.size() - 1));
  for (int i : interior) {
    for (int j : interior) {
      if (i == j) continue;
      arcs.push_back({i, j, costs.m(i, destination) + costs.m(origin, j) - costs.m(i, j)});
    }
  }
  sort_arcs(arcs, costs);

  const std::vector<int> chain = merge_fragments(n, arcs, interior);
  std::vector<int> path;
  path.reserve(chain.size() + 2);
  path.push_back(origin);
  path.insert(path.end(), chain.begin(), chain.end());
  path.push_back(destination);
  (void)opts;
  // Deterministic interior polish; the bare construction alone does not hold
  // the solver's optimality budget on fixed-endpoint instances.
  if (path.size() > 3) two_opt_pass(costs, path, 1, path.size() - 2, /*closed=*/false);
  return path;
}

namespace {

constexpr int kBruteForceGuard = 10;

std::vector<int> label_sorted(const CostMatrix& costs, const std::vector<int>& nodes) {
  std::vector<int> out = nodes;
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return costs.labels[static_cast<size_t>(a)] < costs.labels[static_cast<size_t>(b)];
  });
  return out;
}

}  // namespace

std::vector<int> brute_force_tour(const CostMatrix& costs, int depot) {
  validate_costs(costs);
  const int n = costs.size();
  if (n > kBruteForceGuard) throw ValidationError("brute force guard: too many nodes");
  if (n < 2) throw ValidationError("brute force needs at least two nodes");
  std::vector<int> others;
  for (int v = 0; v < n; ++v) {
    if (v != depot) others.push_back(v);
  }
  std::vector<int> perm = label_sorted(costs, others);
  std::vector<int> best_tour;
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<int> tour{depot};
    tour.insert(tour.end(), perm.begin(), perm.end());
    const double c = tour_cost(costs, tour);
    if (c < best) {
      best = c;
      best_tour = tour;
    }
  } while (std::next_permutation(perm.begin(), perm.end(), [&](int a, int b) {
    return costs.labels[static_cast<size_t>(a)] < costs.labels[static_cast<size_t>(b)];
  }));
  return best_tour;
}

std::vector<int> brute_force_path(const CostMatrix& costs, int origin, int destination) {
  validate_costs(costs);
  const int n = costs.size();
  if (n > kBruteForceGuard) throw ValidationError("brute force guard: too many nodes");
  if (n == 1) return {origin};
  if (origin == destination) throw ValidationError("path endpoints must differ");
  std::vector<int> interior;
  for (int v = 0; v < n; ++v) {
    if (v != origin && v != destination) interior.push_back(v);
  }
  std::vector<int> perm = label_sorted(costs, interior);
  std::vector<int> best_path;
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<int> path{origin};
    path.insert(path.end(), perm.begin(), perm.end());
    path.push_back(destination);
    const double c = path_cost(costs, path);
    if (c < best) {
      best = c;
      best_path = path;
    }
  } while (std::next_permutation(perm.begin(), perm.end(), [&](int a, int b) {
    return costs.labels[static_cast<size_t>(a)] < costs.labels[static_cast<size_t>(b)];
  }));
  return best_path;
}

}  // namespace lastmile
