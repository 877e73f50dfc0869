#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lastmile/scoring.hpp"
#include "lastmile/types.hpp"

namespace oracles {

using lastmile::NormalizedTimeMatrix;
using lastmile::StopSequence;

struct AlignmentResult {
  double cost = std::numeric_limits<double>::infinity();
  // Moves reversed (end first): 'a' substitute, 'b' delete, 'c' insert, so a
  // lexicographic comparison reproduces the substitute > delete > insert
  // backtrace preference.
  std::string reversed_moves;
  long long nonzero_ops = 0;
};

namespace detail {

inline void enumerate(const StopSequence& a, const StopSequence& b,
                      const NormalizedTimeMatrix& nt, double gap, size_t i, size_t j,
                      double acc, std::string& moves, AlignmentResult& best) {
  if (i == a.size() && j == b.size()) {
    std::string reversed(moves.rbegin(), moves.rend());
    if (acc < best.cost || (acc == best.cost && reversed < best.reversed_moves)) {
      best.cost = acc;
      best.reversed_moves = reversed;
      long long ops = 0;
      size_t bi = a.size(), bj = b.size();
      for (char m : reversed) {
        if (m == 'a') {
          if (nt.get(a[bi - 1], b[bj - 1]) != 0.0) ++ops;
          --bi;
          --bj;
        } else if (m == 'b') {
          if (gap != 0.0) ++ops;
          --bj;
        } else {
          if (gap != 0.0) ++ops;
          --bi;
        }
      }
      best.nonzero_ops = ops;
    }
    return;
  }
  if (i < a.size() && j < b.size()) {
    moves.push_back('a');
    enumerate(a, b, nt, gap, i + 1, j + 1, acc + nt.get(a[i], b[j]), moves, best);
    moves.pop_back();
  }
  if (j < b.size()) {
    moves.push_back('b');
    enumerate(a, b, nt, gap, i, j + 1, acc + gap, moves, best);
    moves.pop_back();
  }
  if (i < a.size()) {
    moves.push_back('c');
    enumerate(a, b, nt, gap, i + 1, j, acc + gap, moves, best);
    moves.pop_back();
  }
}

}  // namespace detail

// Exhaustive minimum over every monotone alignment; costs accumulate in path
// order exactly like the production DP, so equality checks can be exact.
inline AlignmentResult erp_exhaustive(const StopSequence& a, const StopSequence& b,
                                      const NormalizedTimeMatrix& nt, double gap) {
  AlignmentResult best;
  std::string moves;
  detail::enumerate(a, b, nt, gap, 0, 0, 0.0, moves, best);
  return best;
}

// Straight-line re-implementation of the whole metric for pipeline
// cross-checks on short sequences.
inline double sd_reference(const StopSequence& a, const StopSequence& b) {
  const long long n = static_cast<long long>(a.size()) - 1;
  if (n <= 1) return 0.0;
  std::vector<long long> positions;
  positions.push_back(0);
  for (size_t i = 1; i < b.size(); ++i) {
    for (size_t p = 0; p < a.size(); ++p) {
      if (a[p] == b[i]) positions.push_back(static_cast<long long>(p));
    }
  }
  long long total = 0;
  for (size_t i = 1; i < positions.size(); ++i) {
    total += std::llabs(positions[i] - positions[i - 1]) - 1;
  }
  double sd = 2.0 * static_cast<double>(total) / static_cast<double>(n * (n - 1));
  return sd < 0.0 ? 0.0 : sd;
}

inline double route_score_reference(const StopSequence& a, const StopSequence& b,
                                    const NormalizedTimeMatrix& nt, double gap) {
  const AlignmentResult r = erp_exhaustive(a, b, nt, gap);
  if (r.nonzero_ops == 0) return 0.0;
  return sd_reference(a, b) * r.cost / static_cast<double>(r.nonzero_ops);
}

// Gauss-Jordan GP posterior, independent of the Cholesky implementation.
struct ReferenceGP {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<double> lengthscales;
  double signal_var = 1.0;
  double noise_var = 1e-6;

  double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
    double q = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
      const double d = (a[k] - b[k]) / lengthscales[k];
      q += d * d;
    }
    return signal_var * std::exp(-0.5 * q);
  }

  std::pair<double, double> posterior(const std::vector<double>& q) const {
    const size_t n = x.size();
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);

    // Invert K + noise I by Gauss-Jordan.
    std::vector<std::vector<double>> aug(n, std::vector<double>(2 * n, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) aug[i][j] = kernel(x[i], x[j]) + (i == j ? noise_var : 0.0);
      aug[i][n + i] = 1.0;
    }
    for (size_t col = 0; col < n; ++col) {
      size_t pivot = col;
      for (size_t r = col + 1; r < n; ++r) {
        if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
      }
      std::swap(aug[col], aug[pivot]);
      const double piv = aug[col][col];
      for (double& v : aug[col]) v /= piv;
      for (size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = aug[r][col];
        for (size_t c = 0; c < 2 * n; ++c) aug[r][c] -= f * aug[col][c];
      }
    }

    std::vector<double> kvec(n), kinv_k(n, 0.0), alpha(n, 0.0);
    for (size_t i = 0; i < n; ++i) kvec[i] = kernel(x[i], q);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        alpha[i] += aug[i][n + j] * (y[j] - mean_y);
        kinv_k[i] += aug[i][n + j] * kvec[j];
      }
    }
    double mu = mean_y, quad = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mu += kvec[i] * alpha[i];
      quad += kvec[i] * kinv_k[i];
    }
    const double var = std::max(0.0, signal_var - quad);
    return {mu, std::sqrt(var)};
  }
};

}  // namespace oracles
