#include "lastmile/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace lastmile {

namespace {

void check_same_set(const StopSequence& a, const StopSequence& b) {
  if (a.empty() || b.empty()) throw ValidationError("empty stop sequence");
  if (a.front() != b.front()) throw ValidationError("sequences start at different depots");
  if (a.size() != b.size()) throw ValidationError("sequences cover different stop sets");
  std::set<StopId> sa(a.begin(), a.end());
  std::set<StopId> sb(b.begin(), b.end());
  if (sa.size() != a.size() || sb.size() != b.size()) {
    throw ValidationError("sequence contains repeated stops");
  }
  if (sa != sb) throw ValidationError("sequences cover different stop sets");
}

}  // namespace

NormalizedTimeMatrix normalize_times(const TravelTimeMatrix& times) {
  NormalizedTimeMatrix out = times;
  const int n = out.m.n;
  if (n <= 1) {
    std::fill(out.m.v.begin(), out.m.v.end(), 0.0);
    return out;
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) sum += out.m(i, j);
    }
  }
  const double mean = sum / static_cast<double>(n) / static_cast<double>(n - 1);
  if (mean <= 0.0) return out;  // all-zero input stays all-zero
  for (double& v : out.m.v) v /= mean;
  return out;
}

double sequence_deviation(const StopSequence& benchmark, const StopSequence& candidate) {
  check_same_set(benchmark, candidate);
  const long long n = static_cast<long long>(benchmark.size()) - 1;
  if (n <= 1) return 0.0;

  std::unordered_map<StopId, long long> pos_in_benchmark;
  for (size_t i = 0; i < benchmark.size(); ++i) {
    pos_in_benchmark[benchmark[i]] = static_cast<long long>(i);
  }
  // a_0 = 0 is the depot; each scored term is |a_i - a_{i-1}| - 1.
  long long sum = 0;
  long long prev = 0;
  for (size_t i = 1; i < candidate.size(); ++i) {
    const long long cur = pos_in_benchmark.at(candidate[i]);
    sum += std::llabs(cur - prev) - 1;
    prev = cur;
  }
  const double sd = 2.0 * static_cast<double>(sum) /
                    (static_cast<double>(n) * static_cast<double>(n - 1));
  return std::max(0.0, sd);
}

ErpResult erp(const StopSequence& benchmark, const StopSequence& candidate,
              const NormalizedTimeMatrix& ntimes, double gap_penalty) {
  check_same_set(benchmark, candidate);
  const int n = static_cast<int>(benchmark.size());
  const int m = static_cast<int>(candidate.size());

  std::vector<int> bidx(static_cast<size_t>(n)), cidx(static_cast<size_t>(m));
  for (int i = 0; i < n; ++i) bidx[static_cast<size_t>(i)] = ntimes.at(benchmark[static_cast<size_t>(i)]);
  for (int j = 0; j < m; ++j) cidx[static_cast<size_t>(j)] = ntimes.at(candidate[static_cast<size_t>(j)]);

  // D[i][j]: min cost aligning the first i benchmark stops with the first j
  // candidate stops. Moves: substitute, delete-from-candidate (consume j),
  // insert-into-candidate (consume i).
  std::vector<std::vector<double>> dp(static_cast<size_t>(n) + 1,
                                      std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
  for (int j = 1; j <= m; ++j) dp[0][static_cast<size_t>(j)] = dp[0][static_cast<size_t>(j - 1)] + gap_penalty;
  for (int i = 1; i <= n; ++i) dp[static_cast<size_t>(i)][0] = dp[static_cast<size_t>(i - 1)][0] + gap_penalty;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const double sub = dp[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] +
                         ntimes.m(bidx[static_cast<size_t>(i - 1)], cidx[static_cast<size_t>(j - 1)]);
      const double del = dp[static_cast<size_t>(i)][static_cast<size_t>(j - 1)] + gap_penalty;
      const double ins = dp[static_cast<size_t>(i - 1)][static_cast<size_t>(j)] + gap_penalty;
      dp[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::min(sub, std::min(del, ins));
    }
  }

  // Backtrace one optimal alignment, preferring substitute > delete > insert,
  // counting only operations with nonzero cost.
  ErpResult r;
  r.erp_n = dp[static_cast<size_t>(n)][static_cast<size_t>(m)];
  int i = n, j = m;
  while (i > 0 || j > 0) {
    const double here = dp[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if (i > 0 && j > 0) {
      const double c = ntimes.m(bidx[static_cast<size_t>(i - 1)], cidx[static_cast<size_t>(j - 1)]);
      if (here == dp[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] + c) {
        if (c != 0.0) ++r.erp_e;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && here == dp[static_cast<size_t>(i)][static_cast<size_t>(j - 1)] + gap_penalty) {
      if (gap_penalty != 0.0) ++r.erp_e;
      --j;
      continue;
    }
    if (gap_penalty != 0.0) ++r.erp_e;
    --i;
  }
  return r;
}

ScoreBreakdown route_score(const StopSequence& benchmark, const StopSequence& candidate,
                           const NormalizedTimeMatrix& ntimes, double gap_penalty) {
  ScoreBreakdown b;
  b.sd = sequence_deviation(benchmark, candidate);
  const ErpResult e = erp(benchmark, candidate, ntimes, gap_penalty);
  b.erp_n = e.erp_n;
  b.erp_e = e.erp_e;
  b.score = (e.erp_e == 0) ? 0.0 : b.sd * b.erp_n / static_cast<double>(b.erp_e);
  return b;
}

double aggregate_score(const std::vector<ScoreBreakdown>& breakdowns) {
  if (breakdowns.empty()) throw ValidationError("aggregate over an empty score set");
  double s = 0.0;
  for (const auto& b : breakdowns) s += b.score;
  return s / static_cast<double>(breakdowns.size());
}

}  // namespace lastmile
