#include "lastmile/learning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace lastmile {

namespace {

double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const GPHyperParams& h) {
  double q = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / h.lengthscales[static_cast<size_t>(k)];
    q += d * d;
  }
  return h.signal_var * std::exp(-0.5 * q);
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& xs) {
  const int n = static_cast<int>(xs.size());
  const int d = n > 0 ? static_cast<int>(xs[0].size()) : 0;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(xs[static_cast<size_t>(i)].size()) != d) {
      throw ValidationError("inconsistent observation dimensions");
    }
    for (int k = 0; k < d; ++k) X(i, k) = xs[static_cast<size_t>(i)][static_cast<size_t>(k)];
  }
  return X;
}

}  // namespace

GPState gp_fit(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
               GPHyperParams hyper) {
  if (xs.empty() || xs.size() != ys.size()) throw ValidationError("gp_fit needs matched observations");
  if (hyper.noise_var <= 0.0) throw ValidationError("gp_fit needs positive noise variance");
  const int d = static_cast<int>(xs[0].size());
  if (static_cast<int>(hyper.lengthscales.size()) != d) {
    throw ValidationError("lengthscale count does not match input dimension");
  }

  GPState gp;
  gp.X = to_matrix(xs);
  gp.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<long>(ys.size()));
  gp.prior_mean = gp.y.mean();
  gp.hyper = std::move(hyper);

  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = se_kernel(gp.X.row(i), gp.X.row(j), gp.hyper);
    }
  }

  // Cholesky with jitter escalation.
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += gp.hyper.noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kn);
    if (llt.info() == Eigen::Success) {
      gp.chol_l = llt.matrixL();
      const Eigen::VectorXd centered = gp.y.array() - gp.prior_mean;
      gp.alpha = llt.solve(centered);
      return gp;
    }
    jitter = (jitter == 0.0) ? 1e-10 * (1.0 + gp.hyper.signal_var) : jitter * 10.0;
  }
  throw ValidationError("gp_fit: Gram matrix not positive definite after jitter escalation");
}

GPPosterior gp_posterior(const GPState& gp, const std::vector<double>& x) {
  const int n = static_cast<int>(gp.X.rows());
  if (n < 1) throw ValidationError("gp_posterior before any observation");
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k(i) = se_kernel(gp.X.row(i), q, gp.hyper);

  GPPosterior post;
  post.mean = gp.prior_mean + k.dot(gp.alpha);
  const Eigen::VectorXd w = gp.chol_l.triangularView<Eigen::Lower>().solve(k);
  post.stdev = std::sqrt(std::max(0.0, gp.hyper.signal_var - w.squaredNorm()));
  return post;
}

double gp_log_marginal_likelihood(const GPState& gp) {
  const int n = static_cast<int>(gp.X.rows());
  const double fit = -0.5 * (gp.y.array() - gp.prior_mean).matrix().dot(gp.alpha);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(gp.chol_l(i, i));
  return fit - logdet - 0.5 * n * std::log(2.0 * M_PI);
}

GPHyperParams fit_hyperparams(const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys, GPHyperParams start,
                              uint64_t seed) {
  const double var_y = std::max(sample_variance(ys), 1e-12);
  auto clamp_hyper = [&](GPHyperParams h) {
    for (double& l : h.lengthscales) l = std::clamp(l, 0.1, 50.0);
    h.signal_var = std::clamp(h.signal_var, 1e-10, 1e4 * var_y + 1e-10);
    return h;
  };
  auto score = [&](const GPHyperParams& h) -> double {
    try {
      return gp_log_marginal_likelihood(gp_fit(xs, ys, h));
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  GPHyperParams best = clamp_hyper(std::move(start));
  double best_ll = score(best);

  Rng rng(seed);
  for (int s = 0; s < 24; ++s) {
    GPHyperParams cand = best;
    for (double& l : cand.lengthscales) l = std::exp(std::log(2.0) + rng.normal() * 1.0);
    cand.signal_var = var_y * std::exp(rng.normal() * 1.5);
    cand = clamp_hyper(cand);
    const double ll = score(cand);
    if (ll > best_ll) {
      best_ll = ll;
      best = cand;
    }
  }

  // Coordinate refinement in log space.
  const double factors[] = {0.5, 0.8, 1.25, 2.0};
  for (int pass = 0; pass < 3; ++pass) {
    for (size_t k = 0; k <= best.lengthscales.size(); ++k) {
      for (double f : factors) {
        GPHyperParams cand = best;
        if (k < best.lengthscales.size()) {
          cand.lengthscales[k] *= f;
        } else {
          cand.signal_var *= f;
        }
        cand = clamp_hyper(cand);
        const double ll = score(cand);
        if (ll > best_ll) {
          best_ll = ll;
          best = cand;
        }
      }
    }
  }
  return best;
}

double expected_improvement(double mu, double sigma, double best) {
  if (sigma <= 0.0) return std::max(best - mu, 0.0);
  const double z = (best - mu) / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  return (best - mu) * cdf + sigma * pdf;
}

double expected_improvement(const GPState& gp, const std::vector<double>& x, double best) {
  const GPPosterior p = gp_posterior(gp, x);
  return expected_improvement(p.mean, p.stdev, best);
}

namespace {

double radical_inverse(int base, int index) {
  double inv = 1.0 / base;
  double result = 0.0;
  double frac = inv;
  while (index > 0) {
    result += frac * (index % base);
    index /= base;
    frac *= inv;
  }
  return result;
}

// Halton points with a seeded Cranley-Patterson rotation per dimension.
std::vector<std::vector<double>> scrambled_halton(int count, int dim, double lo, double hi,
                                                  Rng& rng) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (dim > static_cast<int>(std::size(primes))) throw ConfigError("too many dimensions for the initial design");
  std::vector<double> shift(static_cast<size_t>(dim));
  for (double& s : shift) s = rng.u01();
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<size_t>(count));
  for (int t = 1; t <= count; ++t) {
    std::vector<double> p(static_cast<size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      double u = radical_inverse(primes[k], t) + shift[static_cast<size_t>(k)];
      u -= std::floor(u);
      p[static_cast<size_t>(k)] = lo + (hi - lo) * u;
    }
    points.push_back(std::move(p));
  }
  return points;
}

// 64-start coordinate descent over the box; each coordinate scans a fixed
// grid of candidate values.
std::vector<double> maximize_ei(const GPState& gp, double best_loss, int dim, double lo,
                                double hi, Rng& rng) {
  constexpr int kStarts = 64;
  constexpr int kGrid = 17;
  constexpr int kPasses = 8;

  std::vector<double> grid(static_cast<size_t>(kGrid));
  for (int g = 0; g < kGrid; ++g) {
    grid[static_cast<size_t>(g)] = lo + (hi - lo) * g / (kGrid - 1);
  }

  std::vector<double> best_x(static_cast<size_t>(dim), lo);
  double best_ei = -1.0;
  for (int s = 0; s < kStarts; ++s) {
    std::vector<double> x(static_cast<size_t>(dim));
    for (double& v : x) v = rng.uniform(lo, hi);
    double cur = expected_improvement(gp, x, best_loss);
    for (int pass = 0; pass < kPasses; ++pass) {
      bool moved = false;
      for (int k = 0; k < dim; ++k) {
        double best_v = x[static_cast<size_t>(k)];
        for (double g : grid) {
          x[static_cast<size_t>(k)] = g;
          const double ei = expected_improvement(gp, x, best_loss);
          if (ei > cur) {
            cur = ei;
            best_v = g;
            moved = true;
          }
        }
        x[static_cast<size_t>(k)] = best_v;
      }
      if (!moved) break;
    }
    if (cur > best_ei) {
      best_ei = cur;
      best_x = x;
    }
  }
  for (double& v : best_x) v = std::clamp(v, lo, hi);
  return best_x;
}

}  // namespace

BOResult bo_minimize(int dim, const LossFn& loss, const BOConfig& config) {
  if (dim < 1) throw ConfigError("bo_minimize: dimension must be positive");
  if (config.n0 < 1 || config.n0 >= config.iters) {
    throw ConfigError("bo_minimize: need 0 < n0 < iters");
  }

  uint64_t seed_state = config.seed;
  Rng design_rng(splitmix64(seed_state));
  Rng acq_rng(splitmix64(seed_state));
  Rng hyper_rng(splitmix64(seed_state));

  BOResult result;
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  auto record = [&](std::vector<double> theta, double l) {
    xs.push_back(theta);
    ys.push_back(l);
    const double best = result.history.empty()
                            ? l
                            : std::min(result.history.back().best_so_far, l);
    result.history.push_back(
        {static_cast<int>(result.history.size()) + 1, std::move(theta), l, best});
  };

  for (auto& p : scrambled_halton(config.n0, dim, config.lo, config.hi, design_rng)) {
    record(p, loss(p));
  }

  GPHyperParams hyper;
  hyper.lengthscales.assign(static_cast<size_t>(dim), 2.0);
  hyper.signal_var = std::max(sample_variance(ys), 1e-12);
  hyper.noise_var = 1e-6;

  while (static_cast<int>(result.history.size()) < config.iters) {
    const int n = static_cast<int>(result.history.size());
    if (config.hyper_refit_every > 0 && (n - config.n0) % config.hyper_refit_every == 0) {
      hyper.signal_var = std::max(sample_variance(ys), 1e-12);
      hyper = fit_hyperparams(xs, ys, hyper, hyper_rng.next());
    }
    const GPState gp = gp_fit(xs, ys, hyper);
    const double best = *std::min_element(ys.begin(), ys.end());
    std::vector<double> theta = maximize_ei(gp, best, dim, config.lo, config.hi, acq_rng);
    record(theta, loss(theta));
  }

  size_t best_idx = 0;
  for (size_t i = 1; i < ys.size(); ++i) {
    if (ys[i] < ys[best_idx]) best_idx = i;
  }
  result.best_theta = xs[best_idx];
  result.best_loss = ys[best_idx];
  return result;
}

std::vector<PreparedRoute> prepare_routes(const std::vector<RouteInstance>& instances,
                                          const PartitionOptions& popts, bool with_zones) {
  std::vector<PreparedRoute> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.actual) {
      throw ValidationError("route " + inst.id + " has no benchmark sequence to learn from");
    }
    PreparedRoute pr;
    pr.instance = inst;
    if (with_zones) {
      pr.partition = build_partition(inst, popts);
      pr.features = zone_features(inst, pr.partition);
    }
    pr.ntimes = normalize_times(inst.times);
    pr.benchmark = *inst.actual;
    out.push_back(std::move(pr));
  }
  return out;
}

double hrlp_loss(const std::vector<double>& theta, const std::vector<PreparedRoute>& routes,
                 const RouterOptions& ropts, double gap_penalty, int jobs) {
  if (routes.empty()) throw ValidationError("loss over an empty route set");
  std::vector<double> scores(routes.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(routes.size(), jobs, [&](size_t i) {
    const PreparedRoute& pr = routes[i];
    try {
      const HrlpResult r =
          route_with_features(pr.instance, pr.partition, pr.features, theta, ropts);
      scores[i] = route_score(pr.benchmark, r.sequence, pr.ntimes, gap_penalty).score;
    } catch (const std::exception& e) {
      std::cerr << "warning: route " << pr.instance.id << " skipped during loss: " << e.what()
                << "\n";
    }
  });
  double sum = 0.0;
  size_t n = 0;
  for (double s : scores) {
    if (!std::isnan(s)) {
      sum += s;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("every route failed during loss evaluation");
  return sum / static_cast<double>(n);
}

BOResult optimize(const std::vector<RouteInstance>& routes, const RouterOptions& ropts,
                  const BOConfig& config) {
  const std::vector<PreparedRoute> prepared = prepare_routes(routes, ropts.partition);
  return bo_minimize(
      kZoneFeatureCount,
      [&](const std::vector<double>& theta) {
        return hrlp_loss(theta, prepared, ropts, config.gap_penalty, config.jobs);
      },
      config);
}

}  // namespace lastmile
