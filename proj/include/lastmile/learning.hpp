#pragma once

#include <functional>

#include <Eigen/Dense>

#include "lastmile/hierarchical_router.hpp"
#include "lastmile/scoring.hpp"

namespace lastmile {

struct GPHyperParams {
  std::vector<double> lengthscales;  // one per input dimension
  double signal_var = 1.0;
  double noise_var = 1e-6;
};

// Squared-exponential GP regression state with a cached Cholesky factor.
struct GPState {
  Eigen::MatrixXd X;  // n x d observed inputs
  Eigen::VectorXd y;  // observed targets
  double prior_mean = 0.0;
  GPHyperParams hyper;
  Eigen::MatrixXd chol_l;  // lower factor of K + noise*I
  Eigen::VectorXd alpha;   // (K + noise*I)^-1 (y - prior_mean)
};

struct GPPosterior {
  double mean = 0.0;
  double stdev = 0.0;
};

GPState gp_fit(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
               GPHyperParams hyper);
GPPosterior gp_posterior(const GPState& gp, const std::vector<double>& x);
double gp_log_marginal_likelihood(const GPState& gp);

// Marginal-likelihood re-estimation of lengthscales and signal variance by
// seeded multi-start search; the noise floor stays fixed.
GPHyperParams fit_hyperparams(const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys, GPHyperParams start,
                              uint64_t seed);

// Minimization-form expected improvement under N(mu, sigma^2).
double expected_improvement(double mu, double sigma, double best);
double expected_improvement(const GPState& gp, const std::vector<double>& x, double best);

struct BOConfig {
  int n0 = 20;      // initial quasi-random design points
  int iters = 100;  // total evaluations including the initial design
  double lo = kThetaLow;
  double hi = kThetaHigh;
  uint64_t seed = 0;
  int jobs = 1;
  double gap_penalty = kDefaultGapPenalty;
  int hyper_refit_every = 10;
};

struct BORecord {
  int iter = 0;  // 1-based evaluation count
  std::vector<double> theta;
  double loss = 0.0;
  double best_so_far = 0.0;
};

struct BOResult {
  std::vector<double> best_theta;
  double best_loss = 0.0;
  std::vector<BORecord> history;
};

using LossFn = std::function<double(const std::vector<double>&)>;

// Generic Bayesian minimization over a [lo, hi]^dim box: quasi-random initial
// design, GP surrogate, EI acquisition maximized by multi-start coordinate
// descent.
BOResult bo_minimize(int dim, const LossFn& loss, const BOConfig& config);

// One route with everything theta-independent precomputed, so a learner can
// evaluate thousands of weight vectors cheaply.
struct PreparedRoute {
  RouteInstance instance;
  ZonePartition partition;
  ZoneFeatureTensor features;
  NormalizedTimeMatrix ntimes;
  StopSequence benchmark;
};

// `with_zones` controls whether partition and zone features are built; the
// stop-level baseline has no use for them.
std::vector<PreparedRoute> prepare_routes(const std::vector<RouteInstance>& instances,
                                          const PartitionOptions& popts = {},
                                          bool with_zones = true);

// Mean route score of the hierarchical router across the prepared set.
// A route whose evaluation fails is skipped with a warning.
double hrlp_loss(const std::vector<double>& theta, const std::vector<PreparedRoute>& routes,
                 const RouterOptions& ropts, double gap_penalty, int jobs);

// Learns the 5 zone-feature weights against driver benchmarks.
BOResult optimize(const std::vector<RouteInstance>& routes, const RouterOptions& ropts,
                  const BOConfig& config);

}  // namespace lastmile
