#pragma once

#include <array>
#include <map>

#include "lastmile/types.hpp"

namespace lastmile {

inline constexpr int kRouteFeatureCount = 8;
inline constexpr std::array<const char*, kRouteFeatureCount> kRouteFeatureNames = {
    "stop_number",      "actual_seq_cost", "depot_first_zone", "depot_last_zone",
    "mean_pac_volume",  "std_pac_volume",  "std_depot_stops",  "std_tra_stops"};

inline constexpr double kLowScoreCut = 0.01;   // below: best-performing routes
inline constexpr double kHighScoreCut = 0.1;   // above: worst-performing routes

struct FeatureRow {
  RouteId route;
  std::array<double, kRouteFeatureCount> f{};  // corpus-normalized to [0, 1]
  double score = 0.0;
  bool has_log = false;
  double log_score = 0.0;
};

// Raw (pre-normalization) feature values for one route; needs the benchmark.
std::array<double, kRouteFeatureCount> raw_route_features(const RouteInstance& inst);

// Raw extraction plus corpus-level min-max normalization. Routes whose
// features cannot be computed are reported in `skipped`.
std::vector<FeatureRow> extract_features(const std::vector<RouteInstance>& instances,
                                         const std::map<RouteId, double>& scores,
                                         std::vector<std::string>* skipped = nullptr);

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coef;
  std::vector<double> stderrs;
  int n = 0;
  double sigma2 = 0.0;  // residual variance estimate
};

// Least squares with classical standard errors; the caller supplies the
// design matrix (include an intercept column explicitly).
RegressionResult ols(const std::vector<std::vector<double>>& design,
                     const std::vector<double>& y, const std::vector<std::string>& names);

// log(score) regression on the 8 route features; zero-score rows are dropped
// and counted in `excluded`.
RegressionResult route_score_regression(const std::vector<FeatureRow>& rows, int* excluded = nullptr);

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> objective_history;  // best-so-far per epoch, non-increasing
};

// Hinge-loss linear SVM by full-batch subgradient descent with diminishing
// steps; the returned model is the best iterate seen.
SvmModel svm_fit(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                 double c = 1.0, int epochs = 10000);

int svm_predict(const SvmModel& model, const std::vector<double>& x);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SvmReport {
  SvmModel model;
  ClassMetrics low;   // best-performing class (score < 0.01)
  ClassMetrics high;  // worst-performing class (score > 0.1)
  double accuracy = 0.0;
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  int n_low = 0;
  int n_high = 0;
};

// Labels the extreme classes, 80/20 split, trains and evaluates.
SvmReport svm_separation(const std::vector<FeatureRow>& rows, double c, uint64_t seed);

struct MeanDiffRow {
  std::string feature;
  double mean_low = 0.0;
  double mean_high = 0.0;
  double diff = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

// Welch two-sample t test per feature between the extreme classes.
std::vector<MeanDiffRow> mean_difference_report(const std::vector<FeatureRow>& rows);

double welch_p_value(double t_stat, double df);

}  // namespace lastmile
