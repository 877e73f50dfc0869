#include "lastmile/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "lastmile/zone_model.hpp"

namespace lastmile {

std::array<double, kRouteFeatureCount> raw_route_features(const RouteInstance& inst) {
  if (!inst.actual) throw ValidationError("route " + inst.id + " has no benchmark sequence");
  const StopSequence& seq = *inst.actual;
  const StopId depot_id = inst.depot().id;
  const std::vector<StopId> deliveries = inst.delivery_stop_ids();
  if (deliveries.empty()) throw ValidationError("route " + inst.id + " has no delivery stops");

  std::array<double, kRouteFeatureCount> f{};
  f[0] = static_cast<double>(deliveries.size());

  double seq_cost = 0.0;
  for (size_t i = 1; i < seq.size(); ++i) seq_cost += inst.times.get(seq[i - 1], seq[i]);
  f[1] = seq_cost;

  // Mean depot leg to the first and last visited zones of the benchmark.
  const ZonePartition partition = build_partition(inst);
  auto zone_mean_from_depot = [&](const StopId& member) {
    const auto& stops = partition.members[static_cast<size_t>(partition.zone_of_stop.at(member))];
    double s = 0.0;
    for (const auto& sid : stops) s += inst.times.get(depot_id, sid);
    return s / static_cast<double>(stops.size());
  };
  f[2] = zone_mean_from_depot(seq[1]);
  f[3] = zone_mean_from_depot(seq.back());

  std::vector<double> volumes;
  volumes.reserve(deliveries.size());
  for (const auto& sid : deliveries) {
    double v = 0.0;
    for (const auto& p : inst.packages) {
      if (p.stop == sid) v += p.volume_cm3();
    }
    volumes.push_back(v);
  }
  f[4] = mean_of(volumes);
  f[5] = sample_stddev(volumes);

  std::vector<double> depot_legs;
  depot_legs.reserve(deliveries.size());
  for (const auto& sid : deliveries) depot_legs.push_back(inst.times.get(depot_id, sid));
  f[6] = sample_stddev(depot_legs);

  std::vector<double> legs;
  legs.reserve(deliveries.size() * deliveries.size());
  for (const auto& a : deliveries) {
    for (const auto& b : deliveries) {
      if (a != b) legs.push_back(inst.times.get(a, b));
    }
  }
  f[7] = legs.empty() ? 0.0 : sample_stddev(legs);
  return f;
}

std::vector<FeatureRow> extract_features(const std::vector<RouteInstance>& instances,
                                         const std::map<RouteId, double>& scores,
                                         std::vector<std::string>* skipped) {
  std::vector<FeatureRow> rows;
  for (const auto& inst : instances) {
    auto it = scores.find(inst.id);
    if (it == scores.end()) {
      if (skipped) skipped->push_back(inst.id + ": no score");
      continue;
    }
    try {
      FeatureRow row;
      row.route = inst.id;
      row.f = raw_route_features(inst);
      row.score = it->second;
      if (row.score > 0.0) {
        row.has_log = true;
        row.log_score = std::log(row.score);
      }
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      if (skipped) skipped->push_back(inst.id + ": " + e.what());
    }
  }

  // Corpus-level min-max per feature; constants map to 0.
  for (int k = 0; k < kRouteFeatureCount; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      lo = std::min(lo, row.f[static_cast<size_t>(k)]);
      hi = std::max(hi, row.f[static_cast<size_t>(k)]);
    }
    for (auto& row : rows) {
      row.f[static_cast<size_t>(k)] =
          (hi > lo) ? (row.f[static_cast<size_t>(k)] - lo) / (hi - lo) : 0.0;
    }
  }
  return rows;
}

RegressionResult ols(const std::vector<std::vector<double>>& design,
                     const std::vector<double>& y, const std::vector<std::string>& names) {
  const int n = static_cast<int>(design.size());
  if (n == 0 || design[0].empty()) throw ValidationError("ols: empty design");
  const int p = static_cast<int>(design[0].size());
  if (static_cast<int>(names.size()) != p) throw ValidationError("ols: name/column mismatch");
  if (n <= p) throw ValidationError("ols: need more observations than columns");

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = design[static_cast<size_t>(i)][static_cast<size_t>(j)];
    Y(i) = y[static_cast<size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) {
    // The pivot order puts dependent columns last; name them.
    std::vector<std::string> bad;
    const auto perm = qr.colsPermutation().indices();
    for (int j = qr.rank(); j < p; ++j) bad.push_back(names[static_cast<size_t>(perm[j])]);
    throw ValidationError("ols: rank-deficient design, collinear columns: " + join(bad, ", "));
  }

  RegressionResult r;
  r.names = names;
  r.n = n;
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd resid = Y - X * beta;
  r.sigma2 = resid.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  r.coef.resize(static_cast<size_t>(p));
  r.stderrs.resize(static_cast<size_t>(p));
  for (int j = 0; j < p; ++j) {
    r.coef[static_cast<size_t>(j)] = beta(j);
    r.stderrs[static_cast<size_t>(j)] = std::sqrt(r.sigma2 * xtx_inv(j, j));
  }
  return r;
}

RegressionResult route_score_regression(const std::vector<FeatureRow>& rows, int* excluded) {
  std::vector<std::vector<double>> design;
  std::vector<double> y;
  int dropped = 0;
  for (const auto& row : rows) {
    if (!row.has_log) {
      ++dropped;
      continue;
    }
    std::vector<double> x{1.0};
    x.insert(x.end(), row.f.begin(), row.f.end());
    design.push_back(std::move(x));
    y.push_back(row.log_score);
  }
  if (excluded) *excluded = dropped;
  std::vector<std::string> names{"intercept"};
  for (const char* n : kRouteFeatureNames) names.emplace_back(n);
  return ols(design, y, names);
}

SvmModel svm_fit(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                 double c, int epochs) {
  const size_t n = xs.size();
  if (n == 0 || n != ys.size()) throw ValidationError("svm_fit: bad training set");
  bool pos = false, neg = false;
  for (int y : ys) {
    pos = pos || y > 0;
    neg = neg || y < 0;
  }
  if (!pos || !neg) throw ValidationError("svm_fit: both classes must be present");
  const size_t d = xs[0].size();
  const double lambda = 1.0 / (c * static_cast<double>(n));

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  auto objective = [&](const std::vector<double>& wv, double bv) {
    double reg = 0.0;
    for (double v : wv) reg += v * v;
    double hinge = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double m = bv;
      for (size_t k = 0; k < d; ++k) m += wv[k] * xs[i][k];
      hinge += std::max(0.0, 1.0 - ys[i] * m);
    }
    return 0.5 * lambda * reg + hinge / static_cast<double>(n);
  };

  SvmModel best;
  best.w = w;
  best.b = b;
  double best_obj = objective(w, b);
  best.objective_history.reserve(static_cast<size_t>(epochs));

  for (int t = 1; t <= epochs; ++t) {
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    std::vector<double> grad(d, 0.0);
    double grad_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double m = b;
      for (size_t k = 0; k < d; ++k) m += w[k] * xs[i][k];
      if (ys[i] * m < 1.0) {
        for (size_t k = 0; k < d; ++k) grad[k] -= ys[i] * xs[i][k];
        grad_b -= ys[i];
      }
    }
    for (size_t k = 0; k < d; ++k) {
      w[k] -= eta * (lambda * w[k] + grad[k] / static_cast<double>(n));
    }
    b -= eta * grad_b / static_cast<double>(n);

    const double obj = objective(w, b);
    if (obj < best_obj) {
      best_obj = obj;
      best.w = w;
      best.b = b;
    }
    best.objective_history.push_back(best_obj);
  }
  return best;
}

int svm_predict(const SvmModel& model, const std::vector<double>& x) {
  double m = model.b;
  for (size_t k = 0; k < model.w.size(); ++k) m += model.w[k] * x[k];
  return m >= 0.0 ? 1 : -1;
}

namespace {

ClassMetrics metrics_for(int tp, int fp, int fn) {
  ClassMetrics m;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace

SvmReport svm_separation(const std::vector<FeatureRow>& rows, double c, uint64_t seed) {
  // low class (+1): score < 0.01; high class (-1): score > 0.1.
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (const auto& row : rows) {
    int label = 0;
    if (row.score < kLowScoreCut) label = 1;
    if (row.score > kHighScoreCut) label = -1;
    if (label == 0) continue;
    xs.emplace_back(row.f.begin(), row.f.end());
    ys.push_back(label);
  }
  if (xs.empty()) throw ValidationError("svm: no routes in the extreme score classes");

  std::vector<size_t> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const size_t n_train = static_cast<size_t>(std::lround(0.8 * static_cast<double>(order.size())));

  std::vector<std::vector<double>> train_x, test_x;
  std::vector<int> train_y, test_y;
  for (size_t i = 0; i < order.size(); ++i) {
    auto& dst_x = i < n_train ? train_x : test_x;
    auto& dst_y = i < n_train ? train_y : test_y;
    dst_x.push_back(xs[order[i]]);
    dst_y.push_back(ys[order[i]]);
  }

  SvmReport report;
  report.model = svm_fit(train_x, train_y, c);
  int tp_low = 0, fp_low = 0, fn_low = 0, tp_high = 0, fp_high = 0, fn_high = 0, correct = 0;
  for (size_t i = 0; i < test_x.size(); ++i) {
    const int pred = svm_predict(report.model, test_x[i]);
    const int truth = test_y[i];
    if (pred == truth) ++correct;
    if (truth == 1) ++(pred == 1 ? tp_low : fn_low);
    if (truth != 1 && pred == 1) ++fp_low;
    if (truth == -1) ++(pred == -1 ? tp_high : fn_high);
    if (truth != -1 && pred == -1) ++fp_high;
    (truth == 1 ? report.n_low : report.n_high)++;
  }
  report.low = metrics_for(tp_low, fp_low, fn_low);
  report.high = metrics_for(tp_high, fp_high, fn_high);
  report.accuracy = test_x.empty() ? 0.0 : static_cast<double>(correct) / test_x.size();
  report.macro_avg.precision = 0.5 * (report.low.precision + report.high.precision);
  report.macro_avg.recall = 0.5 * (report.low.recall + report.high.recall);
  report.macro_avg.f1 = 0.5 * (report.low.f1 + report.high.f1);
  const double total = std::max(1, report.n_low + report.n_high);
  report.weighted_avg.precision =
      (report.low.precision * report.n_low + report.high.precision * report.n_high) / total;
  report.weighted_avg.recall =
      (report.low.recall * report.n_low + report.high.recall * report.n_high) / total;
  report.weighted_avg.f1 = (report.low.f1 * report.n_low + report.high.f1 * report.n_high) / total;
  return report;
}

double welch_p_value(double t_stat, double df) {
  if (df <= 0.0) return 1.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t_stat)));
}

std::vector<MeanDiffRow> mean_difference_report(const std::vector<FeatureRow>& rows) {
  std::vector<MeanDiffRow> out;
  for (int k = 0; k < kRouteFeatureCount; ++k) {
    std::vector<double> low, high;
    for (const auto& row : rows) {
      if (row.score < kLowScoreCut) low.push_back(row.f[static_cast<size_t>(k)]);
      if (row.score > kHighScoreCut) high.push_back(row.f[static_cast<size_t>(k)]);
    }
    if (low.empty() || high.empty()) {
      throw ValidationError("mean difference test needs both score classes");
    }
    MeanDiffRow r;
    r.feature = kRouteFeatureNames[static_cast<size_t>(k)];
    r.mean_low = mean_of(low);
    r.mean_high = mean_of(high);
    r.diff = r.mean_low - r.mean_high;
    const double v1 = sample_variance(low) / static_cast<double>(low.size());
    const double v2 = sample_variance(high) / static_cast<double>(high.size());
    if (v1 + v2 <= 0.0) {
      r.t_stat = (r.diff == 0.0) ? 0.0 : std::numeric_limits<double>::infinity() * (r.diff > 0 ? 1 : -1);
      r.p_value = (r.diff == 0.0) ? 1.0 : 0.0;
    } else {
      r.t_stat = r.diff / std::sqrt(v1 + v2);
      const double df = (v1 + v2) * (v1 + v2) /
                        (v1 * v1 / std::max(1.0, static_cast<double>(low.size() - 1)) +
                         v2 * v2 / std::max(1.0, static_cast<double>(high.size() - 1)));
      r.p_value = welch_p_value(r.t_stat, df);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lastmile
