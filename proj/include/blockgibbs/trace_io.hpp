#pragma once

// File formats: trace CSV (iteration, sigma2[, beta_1..beta_p]), JSON
// sidecars with the full run configuration, and the aggregated results CSV.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockgibbs/diagnostics.hpp"
#include "blockgibbs/sampler.hpp"

namespace blockgibbs {

using json = nlohmann::json;

inline json prior_to_json(const PriorConfig& prior) {
  json j;
  j["type"] = prior_tag(prior);
  if (const auto* ss = std::get_if<SpikeSlabPrior>(&prior)) {
    j["w"] = ss->w(0);
    j["kappa"] = ss->kappa(0);
    j["zeta"] = ss->zeta(0);
  } else {
    j["lambda"] = std::get<LassoPrior>(prior).lambda;
  }
  return j;
}

inline PriorConfig prior_from_json(const json& j) {
  if (j.at("type") == "lasso") {
    return LassoPrior(j.at("lambda").get<double>());
  }
  return SpikeSlabPrior(j.at("w").get<double>(), j.at("kappa").get<double>(),
                        j.at("zeta").get<double>());
}

inline json config_to_json(const SamplerConfig& config) {
  json j;
  j["sampler"] = sampler_tag(config.sampler);
  j["prior"] = prior_to_json(config.prior);
  j["iterations"] = config.iterations;
  j["burn_in_fraction"] = config.burn_in_fraction;
  j["init_sigma2"] = config.init_sigma2;
  j["record_beta"] = config.record_beta;
  j["seed"] = config.seed;
  return j;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const ChainOutput& output) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open trace file for writing: " + path.string());
  os.precision(17);
  os << "iteration,sigma2";
  const Eigen::Index p = output.beta_trace ? output.beta_trace->cols() : 0;
  for (Eigen::Index j = 0; j < p; ++j) os << ",beta_" << (j + 1);
  os << "\n";
  const std::int64_t burn = output.config.burn_in();
  for (std::size_t i = 0; i < output.sigma2_trace.size(); ++i) {
    os << (burn + static_cast<std::int64_t>(i) + 1) << "," << output.sigma2_trace[i];
    for (Eigen::Index j = 0; j < p; ++j) {
      os << "," << (*output.beta_trace)(static_cast<Eigen::Index>(i), j);
    }
    os << "\n";
  }
}

inline void write_sidecar_json(const std::filesystem::path& path,
                               const ChainOutput& output) {
  json j;
  j["config"] = config_to_json(output.config);
  j["seed"] = output.seed;
  j["wall_seconds"] = output.wall_seconds;
  j["scale_clamps"] = output.scale_clamps;
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open sidecar for writing: " + path.string());
  os << j.dump(2) << "\n";
}

// Reads the sigma2 column of a trace CSV in the schema written above.
inline std::vector<double> read_trace_sigma2(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open trace file: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("empty trace file");

  int sigma2_col = -1;
  {
    std::stringstream header(line);
    std::string field;
    for (int col = 0; std::getline(header, field, ','); ++col) {
      if (field == "sigma2") sigma2_col = col;
    }
  }
  if (sigma2_col < 0) throw SchemaError("trace file has no sigma2 column");

  std::vector<double> trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    for (int col = 0; std::getline(row, field, ','); ++col) {
      if (col == sigma2_col) {
        try {
          trace.push_back(std::stod(field));
        } catch (const std::exception&) {
          throw SchemaError("non-numeric sigma2 entry: " + field);
        }
      }
    }
  }
  if (trace.empty()) throw InvalidInput("trace file has no data rows");
  return trace;
}

inline json report_to_json(const EfficiencyReport& report) {
  json j;
  j["rho1"] = report.rho1;
  j["n_eff"] = report.n_eff;
  j["n_eff_per_second"] = report.n_eff_per_second;
  j["truncation_lag"] = report.truncation_lag;
  return j;
}

struct ResultRow {
  std::int64_t n = 0;
  std::int64_t p = 0;
  double ratio = 0.0;
  std::string prior;
  std::string sampler;
  double mean_rho1 = 0.0;
  double mean_neff_per_sec = 0.0;
  std::int64_t chains = 0;
  std::int64_t iterations = 0;
  bool unstable = false;
};

inline void write_results_csv(const std::filesystem::path& path,
                              const std::vector<ResultRow>& rows) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open results file: " + path.string());
  os.precision(17);
  os << "n,p,ratio,prior,sampler,mean_rho1,mean_neff_per_sec,chains,iterations,unstable\n";
  for (const auto& r : rows) {
    os << r.n << "," << r.p << "," << r.ratio << "," << r.prior << ","
       << r.sampler << "," << r.mean_rho1 << "," << r.mean_neff_per_sec << ","
       << r.chains << "," << r.iterations << "," << (r.unstable ? 1 : 0) << "\n";
  }
}

}  // namespace blockgibbs
