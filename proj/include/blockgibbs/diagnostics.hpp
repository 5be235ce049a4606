#pragma once

// Sample autocorrelation, effective sample size with Geyer's
// initial-positive-sequence truncation, and multi-chain aggregation.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "blockgibbs/errors.hpp"
#include "blockgibbs/sampler.hpp"

namespace blockgibbs {

struct AcfSummary {
  std::vector<double> rho;  // rho[k] for k = 0..K, rho[0] == 1
  std::int64_t trace_length = 0;
};

struct EfficiencyReport {
  double rho1 = 0.0;
  double n_eff = 0.0;
  double n_eff_per_second = 0.0;
  std::int64_t truncation_lag = 0;
};

inline std::int64_t default_max_lag(std::int64_t n) {
  const auto cap = static_cast<std::int64_t>(
      10.0 * std::ceil(std::sqrt(static_cast<double>(n))));
  return std::min(n - 2, cap);
}

// Biased (divide-by-total-sum-of-squares) estimator, which keeps the
// autocorrelation sequence positive semidefinite:
//   rho_k = sum_{t}(x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2.
inline AcfSummary autocorrelation(std::span<const double> trace,
                                  std::int64_t max_lag) {
  const auto n = static_cast<std::int64_t>(trace.size());
  if (max_lag < 0 || n < max_lag + 2) {
    throw InvalidInput("trace too short for requested max_lag");
  }
  double mean = 0.0;
  for (double x : trace) mean += x;
  mean /= static_cast<double>(n);

  std::vector<double> centered(trace.size());
  double denom = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    centered[t] = trace[t] - mean;
    denom += centered[t] * centered[t];
  }
  if (denom <= 0.0) throw DegenerateTrace("constant trace has no autocorrelation");

  AcfSummary acf;
  acf.trace_length = n;
  acf.rho.resize(static_cast<std::size_t>(max_lag) + 1);
  for (std::int64_t k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::int64_t t = 0; t + k < n; ++t) num += centered[t] * centered[t + k];
    acf.rho[static_cast<std::size_t>(k)] = num / denom;
  }
  return acf;
}

// N_eff = N / (1 + 2 sum_k rho_k), truncated by the initial-positive-sequence
// rule on pair sums Gamma_m = rho_{2m} + rho_{2m+1}: summation stops at the
// first m with Gamma_m <= 0. N_eff is deliberately not capped at N.
inline std::pair<double, std::int64_t> effective_sample_size(
    std::span<const double> trace) {
  const auto n = static_cast<std::int64_t>(trace.size());
  if (n < 4) throw InvalidInput("trace too short for ESS");
  const AcfSummary acf = autocorrelation(trace, n - 2);

  double rho_sum = 0.0;  // sum_{k >= 1} rho_k up to truncation
  std::int64_t truncation = 0;
  bool any_pair = false;
  for (std::size_t m = 0; 2 * m + 1 < acf.rho.size(); ++m) {
    const double pair = acf.rho[2 * m] + acf.rho[2 * m + 1];
    if (pair <= 0.0) break;
    truncation = static_cast<std::int64_t>(2 * m);
    rho_sum += pair;
    any_pair = true;
  }
  if (any_pair) rho_sum -= 1.0;  // remove rho_0 contributed by the first pair

  const double denom = std::max(1.0 + 2.0 * rho_sum, 1e-12);
  return {static_cast<double>(n) / denom, truncation};
}

inline EfficiencyReport make_report(std::span<const double> trace,
                                    double wall_seconds) {
  EfficiencyReport report;
  const AcfSummary acf = autocorrelation(trace, 1);
  report.rho1 = acf.rho[1];
  auto [n_eff, lag] = effective_sample_size(trace);
  report.n_eff = n_eff;
  report.truncation_lag = lag;
  report.n_eff_per_second = wall_seconds > 0.0 ? n_eff / wall_seconds : 0.0;
  return report;
}

inline EfficiencyReport chain_report(const ChainOutput& output) {
  return make_report(output.sigma2_trace, output.wall_seconds);
}

struct AggregateReport {
  double mean_rho1 = 0.0;
  double mean_neff_per_second = 0.0;
  double mean_neff = 0.0;
};

inline AggregateReport aggregate(std::span<const EfficiencyReport> reports) {
  if (reports.empty()) throw InvalidInput("cannot aggregate zero reports");
  AggregateReport agg;
  for (const auto& r : reports) {
    agg.mean_rho1 += r.rho1;
    agg.mean_neff_per_second += r.n_eff_per_second;
    agg.mean_neff += r.n_eff;
  }
  const double k = static_cast<double>(reports.size());
  agg.mean_rho1 /= k;
  agg.mean_neff_per_second /= k;
  agg.mean_neff /= k;
  return agg;
}

}  // namespace blockgibbs
