#pragma once

// Synthetic data generation and the experiment grid runner that produces
// the 2BG-vs-3BG comparison tables.

#include <filesystem>
#include <future>
#include <thread>
#include <vector>

#include "blockgibbs/linalg.hpp"
#include "blockgibbs/sampler.hpp"
#include "blockgibbs/trace_io.hpp"

namespace blockgibbs {

// Design rows are iid standard multivariate normal, then standardized to
// column mean 0 and squared norm n. A degenerate column is retried with
// fresh draws, at most 3 times.
inline Matrix generate_design(Eigen::Index n, Eigen::Index p, RngStream& rng) {
  if (n < 3 || p < 1) throw InvalidInput("need n >= 3 and p >= 1");
  for (int attempt = 0; attempt < 3; ++attempt) {
    Matrix x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = draw_normal(rng);
    }
    try {
      return standardize_columns(x);
    } catch (const DegenerateColumn&) {
      // fresh draws
    }
  }
  throw NumericalFailure("could not generate a non-degenerate design");
}

// First max(1, floor(p/5)) coefficients are t_2 draws, the rest exactly 0.
inline Vector generate_coefficients(Eigen::Index p, RngStream& rng) {
  if (p < 1) throw InvalidInput("need p >= 1");
  const Eigen::Index nonzero = std::max<Eigen::Index>(1, p / 5);
  Vector beta = Vector::Zero(p);
  for (Eigen::Index j = 0; j < nonzero; ++j) beta(j) = draw_student_t2(rng);
  return beta;
}

inline Vector generate_response(const Matrix& x, const Vector& beta_star,
                                RngStream& rng) {
  if (x.cols() != beta_star.size()) throw InvalidInput("X/beta shape mismatch");
  Vector y = x * beta_star;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += draw_normal(rng);
  return y;
}

struct SimSpec {
  Eigen::Index n = 50;
  std::vector<double> ratios = {0.5, 0.6, 0.7, 0.8, 0.9, 1, 2, 3, 4, 5};
  int datasets_per_combo = 10;
  PriorConfig prior = SpikeSlabPrior(0.5, 100.0, 0.01);
  int chains = 6;
  std::int64_t iterations = 15000;
  double burn_in_fraction = 0.1;
  std::uint64_t base_seed = 0;
  unsigned workers = std::thread::hardware_concurrency();

  void validate() const {
    if (n < 3) throw InvalidInput("n must be at least 3");
    if (ratios.empty()) throw InvalidInput("need at least one ratio");
    for (double r : ratios) {
      if (!(r > 0.0)) throw InvalidInput("ratios must be positive");
      if (std::llround(r * static_cast<double>(n)) < 1) {
        throw InvalidInput("ratio too small: p would be zero");
      }
    }
    if (datasets_per_combo < 1) throw InvalidInput("need at least one dataset");
    if (chains < 1) throw InvalidInput("need at least one chain");
  }
};

struct ExperimentOptions {
  std::filesystem::path out_dir;  // empty: no files written
  bool write_runs = false;
  bool plot_data = false;
};

namespace detail {

inline std::uint64_t chain_seed(std::uint64_t base_seed, int dataset,
                                int chain, SamplerKind sampler,
                                const PriorConfig& prior) {
  const std::uint64_t sampler_id = sampler == SamplerKind::TwoBlock ? 2 : 3;
  const std::uint64_t prior_id =
      std::holds_alternative<SpikeSlabPrior>(prior) ? 1 : 0;
  return derive_seed(base_seed, static_cast<std::uint64_t>(dataset),
                     static_cast<std::uint64_t>(chain), sampler_id, prior_id);
}

inline std::vector<ChainOutput> run_chains_parallel(
    const CenteredDesign& design, const std::vector<SamplerConfig>& configs,
    unsigned workers) {
  std::vector<ChainOutput> outputs(configs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      outputs[i] = run_chain(configs[i], design);
    }
    return outputs;
  }
  std::size_t next = 0;
  while (next < configs.size()) {
    const std::size_t batch_end = std::min(configs.size(), next + workers);
    std::vector<std::future<ChainOutput>> futures;
    for (std::size_t i = next; i < batch_end; ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        return run_chain(configs[i], design);
      }));
    }
    for (std::size_t i = next; i < batch_end; ++i) {
      outputs[i] = futures[i - next].get();
    }
    next = batch_end;
  }
  return outputs;
}

}  // namespace detail

// For each (ratio, sampler): generate datasets_per_combo datasets, run
// `chains` chains each, and aggregate mean rho_1 and mean N_eff/T. A
// ChainUnstable anywhere marks the row and continues.
inline std::vector<ResultRow> run_experiment(const SimSpec& spec,
                                             const ExperimentOptions& opts = {}) {
  spec.validate();
  namespace fs = std::filesystem;
  const bool writing = !opts.out_dir.empty();
  if (writing && opts.write_runs) fs::create_directories(opts.out_dir / "runs");
  else if (writing) fs::create_directories(opts.out_dir);

  std::vector<ResultRow> rows;
  for (std::size_t ri = 0; ri < spec.ratios.size(); ++ri) {
    const double ratio = spec.ratios[ri];
    const auto p = static_cast<Eigen::Index>(
        std::llround(ratio * static_cast<double>(spec.n)));

    // One set of datasets per (ratio), shared by both samplers.
    std::vector<CenteredDesign> designs;
    designs.reserve(spec.datasets_per_combo);
    for (int d = 0; d < spec.datasets_per_combo; ++d) {
      RngStream data_rng(derive_seed(spec.base_seed, 0x64617461ULL, ri, d));
      Matrix x = generate_design(spec.n, p, data_rng);
      Vector beta_star = generate_coefficients(p, data_rng);
      Vector y = generate_response(x, beta_star, data_rng);
      designs.emplace_back(Dataset(std::move(y), std::move(x)));
    }

    for (SamplerKind sampler : {SamplerKind::TwoBlock, SamplerKind::ThreeBlock}) {
      ResultRow row;
      row.n = spec.n;
      row.p = p;
      row.ratio = ratio;
      row.prior = prior_tag(spec.prior);
      row.sampler = sampler_tag(sampler);
      row.chains = spec.chains;
      row.iterations = spec.iterations;

      std::vector<EfficiencyReport> reports;
      for (int d = 0; d < spec.datasets_per_combo; ++d) {
        std::vector<SamplerConfig> configs;
        for (int c = 0; c < spec.chains; ++c) {
          SamplerConfig config;
          config.sampler = sampler;
          config.prior = spec.prior;
          config.iterations = spec.iterations;
          config.burn_in_fraction = spec.burn_in_fraction;
          config.seed = detail::chain_seed(spec.base_seed, d, c, sampler,
                                           spec.prior);
          configs.push_back(std::move(config));
        }
        try {
          auto outputs =
              detail::run_chains_parallel(designs[d], configs, spec.workers);
          for (std::size_t c = 0; c < outputs.size(); ++c) {
            reports.push_back(chain_report(outputs[c]));
            if (writing && opts.write_runs) {
              const std::string stem = std::string(sampler_tag(sampler)) + "_" +
                                       row.prior + "_r" + std::to_string(ri) +
                                       "_d" + std::to_string(d) + "_c" +
                                       std::to_string(c);
              write_trace_csv(opts.out_dir / "runs" / (stem + ".csv"), outputs[c]);
              write_sidecar_json(opts.out_dir / "runs" / (stem + ".json"),
                                 outputs[c]);
            }
          }
        } catch (const ChainUnstable&) {
          row.unstable = true;
        }
      }
      if (!reports.empty()) {
        const AggregateReport agg = aggregate(reports);
        row.mean_rho1 = agg.mean_rho1;
        row.mean_neff_per_sec = agg.mean_neff_per_second;
      } else {
        row.unstable = true;
      }
      rows.push_back(std::move(row));
    }
  }

  if (writing) {
    write_results_csv(opts.out_dir / "results.csv", rows);
    if (opts.plot_data) {
      std::ofstream os(opts.out_dir / "plot_data.csv");
      os.precision(17);
      os << "ratio,sampler,metric,value\n";
      for (const auto& r : rows) {
        os << r.ratio << "," << r.sampler << ",rho1," << r.mean_rho1 << "\n";
        os << r.ratio << "," << r.sampler << ",neff_per_sec,"
           << r.mean_neff_per_sec << "\n";
      }
    }
  }
  return rows;
}

}  // namespace blockgibbs
