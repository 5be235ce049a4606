#pragma once

// Test-only brute-force posterior oracle for p = 1 instances. Integrates the
// unnormalized joint posterior density on a deterministic grid over
// (beta, sigma^2), summing over the two-point tau support for spike-and-slab
// and quadrature over tau for the lasso. Independent of the sampler code: it
// evaluates the density from the model definition, never the conditional
// draws.

#include <cmath>
#include <vector>

#include "blockgibbs/linalg.hpp"
#include "blockgibbs/prior.hpp"

namespace oracle {

struct PosteriorMoments {
  double mean_sigma2 = 0.0;
  double mean_beta = 0.0;
};

// log of the unnormalized joint density pi(beta, sigma2, tau | Y) for p = 1:
//   (sigma2)^{-(n-1)/2} exp(-||y~ - x beta||^2 / (2 sigma2))
//   * (sigma2 tau)^{-1/2} exp(-beta^2 / (2 sigma2 tau))
//   * (1 / sigma2)
// The tau prior factor is supplied by the caller.
inline double log_joint_p1(double beta, double sigma2, double tau,
                           const blockgibbs::CenteredDesign& design) {
  const double n = static_cast<double>(design.n());
  const double resid2 =
      design.yty - 2.0 * beta * design.xty(0) + beta * beta * design.gram(0, 0);
  return -0.5 * (n - 1.0) * std::log(sigma2) - resid2 / (2.0 * sigma2) -
         0.5 * std::log(sigma2 * tau) - beta * beta / (2.0 * sigma2 * tau) -
         std::log(sigma2);
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
  return g;
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1));
  }
  return g;
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

template <typename TauTerm>
PosteriorMoments integrate_p1(const blockgibbs::CenteredDesign& design,
                              const std::vector<double>& beta_grid,
                              const std::vector<double>& sigma2_grid,
                              TauTerm&& tau_term) {
  const auto wb = trapezoid_weights(beta_grid);
  const auto ws = trapezoid_weights(sigma2_grid);

  // First pass for the max log density, second for the normalized sums.
  double max_log = -1e300;
  for (std::size_t ib = 0; ib < beta_grid.size(); ++ib) {
    for (std::size_t is = 0; is < sigma2_grid.size(); ++is) {
      max_log = std::max(max_log, tau_term(beta_grid[ib], sigma2_grid[is]));
    }
  }
  double z = 0.0, s_sum = 0.0, b_sum = 0.0;
  for (std::size_t ib = 0; ib < beta_grid.size(); ++ib) {
    for (std::size_t is = 0; is < sigma2_grid.size(); ++is) {
      const double log_f = tau_term(beta_grid[ib], sigma2_grid[is]);
      const double f = std::exp(log_f - max_log) * wb[ib] * ws[is];
      z += f;
      s_sum += f * sigma2_grid[is];
      b_sum += f * beta_grid[ib];
    }
  }
  return {s_sum / z, b_sum / z};
}

// Spike-and-slab: tau in {zeta, kappa*zeta} with prior weights {1-w, w}.
inline PosteriorMoments spike_slab_moments(
    const blockgibbs::CenteredDesign& design,
    const blockgibbs::SpikeSlabPrior& prior, const std::vector<double>& beta_grid,
    const std::vector<double>& sigma2_grid) {
  const double w = prior.w_at(0);
  const double kappa = prior.kappa_at(0);
  const double zeta = prior.zeta_at(0);
  auto tau_term = [&](double beta, double sigma2) {
    const double a =
        std::log(1.0 - w) + log_joint_p1(beta, sigma2, zeta, design);
    const double b =
        std::log(w) + log_joint_p1(beta, sigma2, kappa * zeta, design);
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  };
  return integrate_p1(design, beta_grid, sigma2_grid, tau_term);
}

// Lasso: tau ~ Exponential(lambda^2 / 2), integrated by quadrature on a
// log-spaced tau grid.
inline PosteriorMoments lasso_moments(const blockgibbs::CenteredDesign& design,
                                      double lambda,
                                      const std::vector<double>& beta_grid,
                                      const std::vector<double>& sigma2_grid,
                                      const std::vector<double>& tau_grid) {
  const auto wt = trapezoid_weights(tau_grid);
  const double rate = lambda * lambda / 2.0;
  auto tau_term = [&](double beta, double sigma2) {
    double max_log = -1e300;
    std::vector<double> logs(tau_grid.size());
    for (std::size_t it = 0; it < tau_grid.size(); ++it) {
      logs[it] = std::log(rate) - rate * tau_grid[it] +
                 log_joint_p1(beta, sigma2, tau_grid[it], design);
      max_log = std::max(max_log, logs[it]);
    }
    double sum = 0.0;
    for (std::size_t it = 0; it < tau_grid.size(); ++it) {
      sum += std::exp(logs[it] - max_log) * wt[it];
    }
    return max_log + std::log(sum);
  };
  return integrate_p1(design, beta_grid, sigma2_grid, tau_term);
}

}  // namespace oracle
