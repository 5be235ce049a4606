// Command-line driver: simulate / fit / diagnose.
//
// Exit codes: 0 success, 1 usage/config/data error, 2 completed with at
// least one unstable chain row.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "blockgibbs/diagnostics.hpp"
#include "blockgibbs/ingest.hpp"
#include "blockgibbs/simulate.hpp"
#include "blockgibbs/trace_io.hpp"

namespace fs = std::filesystem;
using blockgibbs::json;

namespace {

// Applies values from a flat JSON config file to options the user did not
// pass on the command line (flags win).
class ConfigBinder {
 public:
  template <typename T>
  CLI::Option* bind(std::string key, CLI::Option* opt, T& target) {
    entries_.push_back(
        {std::move(key), opt, [&target](const json& v) { target = v.get<T>(); }});
    return opt;
  }

  void apply(const json& config) {
    for (auto& [key, value] : config.items()) {
      const Entry* entry = nullptr;
      for (auto& e : entries_) {
        if (e.key == key) entry = &e;
      }
      if (!entry) throw blockgibbs::InvalidInput("unknown config key: " + key);
      if (entry->opt->count() == 0) entry->setter(value);
    }
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> setter;
  };
  std::vector<Entry> entries_;
};

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw blockgibbs::InvalidInput("cannot open config file: " + path);
  json j;
  is >> j;
  if (!j.is_object()) {
    throw blockgibbs::InvalidInput("config file must hold a flat JSON object");
  }
  return j;
}

std::uint64_t resolve_seed(std::uint64_t seed, bool seed_given) {
  if (seed_given) return seed;
  std::random_device entropy;
  return (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
}

blockgibbs::PriorConfig make_prior(const std::string& model, double w,
                                   double kappa, double zeta, double lambda) {
  if (model == "spike-slab") return blockgibbs::SpikeSlabPrior(w, kappa, zeta);
  if (model == "lasso") return blockgibbs::LassoPrior(lambda);
  throw blockgibbs::InvalidInput("unknown model: " + model +
                                 " (expected spike-slab or lasso)");
}

void write_run_config(const fs::path& out_dir, const json& resolved) {
  fs::create_directories(out_dir);
  std::ofstream os(out_dir / "config.json");
  os << resolved.dump(2) << "\n";
}

std::vector<double> parse_ratios(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw blockgibbs::InvalidInput("bad value in ratios: " + field);
    }
  }
  if (out.empty()) throw blockgibbs::InvalidInput("ratios is empty");
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& model,
                 std::int64_t n, const std::string& ratios_csv,
                 int datasets, int chains, std::int64_t iterations,
                 double burn_in, double w, double kappa, double zeta,
                 double lambda, std::uint64_t seed, bool seed_given,
                 unsigned workers, const std::string& out_dir, bool plot_data,
                 bool no_runs) {
  blockgibbs::SimSpec spec;
  spec.n = n;
  spec.ratios = parse_ratios(ratios_csv);
  spec.datasets_per_combo = datasets;
  spec.chains = chains;
  spec.iterations = iterations;
  spec.burn_in_fraction = burn_in;
  spec.prior = make_prior(model, w, kappa, zeta, lambda);
  spec.base_seed = resolve_seed(seed, seed_given);
  spec.workers = workers;
  spec.validate();

  json resolved;
  resolved["command"] = "simulate";
  resolved["model"] = model;
  resolved["n"] = spec.n;
  resolved["ratios"] = spec.ratios;
  resolved["datasets"] = datasets;
  resolved["chains"] = chains;
  resolved["iterations"] = iterations;
  resolved["burn-in"] = burn_in;
  resolved["prior"] = blockgibbs::prior_to_json(spec.prior);
  resolved["seed"] = spec.base_seed;
  resolved["workers"] = workers;
  resolved["config-file"] = config_path;
  write_run_config(out_dir, resolved);

  blockgibbs::ExperimentOptions opts;
  opts.out_dir = out_dir;
  opts.write_runs = !no_runs;
  opts.plot_data = plot_data;
  auto rows = blockgibbs::run_experiment(spec, opts);

  bool unstable = false;
  for (const auto& row : rows) {
    std::cout << "n=" << row.n << " p=" << row.p << " " << row.sampler << "/"
              << row.prior << " rho1=" << row.mean_rho1
              << " neff_per_sec=" << row.mean_neff_per_sec
              << (row.unstable ? " UNSTABLE" : "") << "\n";
    unstable = unstable || row.unstable;
  }
  std::cout << "wrote " << (fs::path(out_dir) / "results.csv").string() << "\n";
  return unstable ? 2 : 0;
}

int cmd_fit(const std::string& data_path, const std::string& response,
            std::int64_t response_index, std::int64_t screen_k,
            const std::string& prior_choice, int chains,
            std::int64_t iterations, double burn_in, double w, double kappa,
            double zeta, double lambda, std::uint64_t seed, bool seed_given,
            const std::string& out_dir) {
  std::string response_name = response;
  if (response_name.empty()) {
    if (response_index < 0) {
      throw blockgibbs::InvalidInput(
          "either --response <name> or --response-index <i> is required");
    }
    std::ifstream is(data_path);
    if (!is) throw blockgibbs::InvalidInput("cannot open " + data_path);
    std::string header;
    std::getline(is, header);
    std::stringstream ss(header);
    std::string field;
    for (std::int64_t c = 0; std::getline(ss, field, ','); ++c) {
      if (c == response_index) response_name = field;
    }
    if (response_name.empty()) {
      throw blockgibbs::SchemaError("response index out of range");
    }
  }

  const std::uint64_t base_seed = resolve_seed(seed, seed_given);
  auto table = blockgibbs::load_csv(data_path, response_name);
  auto [dataset, report] = blockgibbs::screen_predictors(table, screen_k);
  blockgibbs::CenteredDesign design(dataset);

  fs::create_directories(fs::path(out_dir));
  json resolved;
  resolved["command"] = "fit";
  resolved["data"] = data_path;
  resolved["response"] = response_name;
  resolved["screen-k"] = screen_k;
  resolved["prior"] = prior_choice;
  resolved["chains"] = chains;
  resolved["iterations"] = iterations;
  resolved["burn-in"] = burn_in;
  resolved["w"] = w;
  resolved["kappa"] = kappa;
  resolved["zeta"] = zeta;
  resolved["lambda"] = lambda;
  resolved["seed"] = base_seed;
  write_run_config(out_dir, resolved);

  {
    // screened dataset + screening report
    std::ofstream os(fs::path(out_dir) / "screened.csv");
    os.precision(17);
    os << response_name;
    for (const auto& name : report.selected) os << "," << name;
    os << "\n";
    for (Eigen::Index i = 0; i < design.n(); ++i) {
      os << dataset.y(i);
      for (Eigen::Index j = 0; j < design.p(); ++j) os << "," << dataset.X(i, j);
      os << "\n";
    }
    json sr;
    sr["method"] = report.method;
    sr["selected"] = report.selected;
    sr["correlations"] = report.correlations;
    sr["truncated_k"] = report.truncated_k;
    sr["imputed_cells"] = table.imputed_cells;
    sr["dropped_predictors"] = table.dropped_predictors;
    sr["dropped_rows"] = table.dropped_rows;
    std::ofstream js(fs::path(out_dir) / "screen_report.json");
    js << sr.dump(2) << "\n";
  }

  std::vector<blockgibbs::PriorConfig> priors;
  if (prior_choice == "spike-slab" || prior_choice == "both") {
    priors.push_back(blockgibbs::SpikeSlabPrior(w, kappa, zeta));
  }
  if (prior_choice == "lasso" || prior_choice == "both") {
    priors.push_back(blockgibbs::LassoPrior(lambda));
  }
  if (priors.empty()) {
    throw blockgibbs::InvalidInput("unknown prior: " + prior_choice);
  }

  std::ofstream cmp(fs::path(out_dir) / "comparison.csv");
  cmp.precision(17);
  cmp << "prior,sampler,rho1,n_eff,n_eff_per_sec\n";
  bool unstable = false;
  for (const auto& prior : priors) {
    for (auto kind :
         {blockgibbs::SamplerKind::TwoBlock, blockgibbs::SamplerKind::ThreeBlock}) {
      std::vector<blockgibbs::EfficiencyReport> reports;
      for (int c = 0; c < chains; ++c) {
        blockgibbs::SamplerConfig config;
        config.sampler = kind;
        config.prior = prior;
        config.iterations = iterations;
        config.burn_in_fraction = burn_in;
        config.seed = blockgibbs::detail::chain_seed(base_seed, 0, c, kind, prior);
        try {
          auto out = blockgibbs::run_chain(config, design);
          reports.push_back(blockgibbs::chain_report(out));
          const std::string stem = std::string(blockgibbs::sampler_tag(kind)) +
                                   "_" + blockgibbs::prior_tag(prior) + "_c" +
                                   std::to_string(c);
          blockgibbs::write_trace_csv(fs::path(out_dir) / (stem + ".csv"), out);
          blockgibbs::write_sidecar_json(fs::path(out_dir) / (stem + ".json"),
                                         out);
        } catch (const blockgibbs::ChainUnstable&) {
          unstable = true;
        }
      }
      if (reports.empty()) continue;
      auto agg = blockgibbs::aggregate(reports);
      cmp << blockgibbs::prior_tag(prior) << ","
          << blockgibbs::sampler_tag(kind) << "," << agg.mean_rho1 << ","
          << agg.mean_neff << "," << agg.mean_neff_per_second << "\n";
      std::cout << blockgibbs::prior_tag(prior) << "/"
                << blockgibbs::sampler_tag(kind) << ": rho1=" << agg.mean_rho1
                << " n_eff=" << agg.mean_neff << "\n";
    }
  }
  std::cout << "wrote " << (fs::path(out_dir) / "comparison.csv").string()
            << "\n";
  return unstable ? 2 : 0;
}

int cmd_diagnose(const std::string& trace_path, std::int64_t max_lag,
                 const std::string& out_dir) {
  auto trace = blockgibbs::read_trace_sigma2(trace_path);
  auto report = blockgibbs::make_report(trace, 0.0);

  json j = blockgibbs::report_to_json(report);
  if (max_lag > 0) {
    auto acf = blockgibbs::autocorrelation(trace, max_lag);
    j["acf"] = acf.rho;
  }
  std::cout << j.dump(2) << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    json resolved;
    resolved["command"] = "diagnose";
    resolved["trace"] = trace_path;
    resolved["max-lag"] = max_lag;
    write_run_config(out_dir, resolved);
    std::ofstream os(fs::path(out_dir) / "report.json");
    os << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-block vs three-block Gibbs samplers for Bayesian "
               "shrinkage regression"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the simulation grid");
  std::string sim_config, sim_model = "spike-slab",
              sim_ratios = "0.5,0.6,0.7,0.8,0.9,1,2,3,4,5", sim_out = "out";
  std::int64_t sim_n = 50, sim_iterations = 15000;
  int sim_datasets = 10, sim_chains = 6;
  double sim_burn = 0.1, sim_w = 0.5, sim_kappa = 100.0, sim_zeta = 0.01,
         sim_lambda = 1.0;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = std::thread::hardware_concurrency();
  bool sim_plot = false, sim_no_runs = false;
  ConfigBinder sim_binder;
  auto* sim_config_opt = sim->add_option("--config", sim_config, "flat JSON config file");
  sim_binder.bind("model", sim->add_option("--model", sim_model, "spike-slab or lasso"), sim_model);
  sim_binder.bind("n", sim->add_option("--n", sim_n, "sample size"), sim_n);
  sim_binder.bind("ratios", sim->add_option("--ratios", sim_ratios, "comma-separated p/n ratios"), sim_ratios);
  sim_binder.bind("datasets", sim->add_option("--datasets", sim_datasets, "datasets per combination"), sim_datasets);
  sim_binder.bind("chains", sim->add_option("--chains", sim_chains, "chains per dataset"), sim_chains);
  sim_binder.bind("iterations", sim->add_option("--iterations", sim_iterations, "sweeps per chain"), sim_iterations);
  sim_binder.bind("burn-in", sim->add_option("--burn-in", sim_burn, "burn-in fraction"), sim_burn);
  sim_binder.bind("w", sim->add_option("--w", sim_w, "spike-and-slab weight"), sim_w);
  sim_binder.bind("kappa", sim->add_option("--kappa", sim_kappa, "slab inflation"), sim_kappa);
  sim_binder.bind("zeta", sim->add_option("--zeta", sim_zeta, "spike variance"), sim_zeta);
  sim_binder.bind("lambda", sim->add_option("--lambda", sim_lambda, "lasso regularization"), sim_lambda);
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "base seed");
  sim_binder.bind("seed", sim_seed_opt, sim_seed);
  sim_binder.bind("workers", sim->add_option("--workers", sim_workers, "max concurrent chains"), sim_workers);
  sim_binder.bind("out", sim->add_option("--out", sim_out, "output directory"), sim_out);
  sim_binder.bind("plot-data", sim->add_flag("--plot-data", sim_plot, "emit long-format plot CSV"), sim_plot);
  sim_binder.bind("no-runs", sim->add_flag("--no-runs", sim_no_runs, "skip per-chain trace files"), sim_no_runs);

  // fit
  auto* fit = app.add_subcommand("fit", "fit an external CSV dataset");
  std::string fit_config, fit_data, fit_response, fit_prior = "both",
              fit_out = "out";
  std::int64_t fit_response_index = -1, fit_k = 100, fit_iterations = 18000;
  int fit_chains = 1;
  double fit_burn = 0.1, fit_w = 0.5, fit_kappa = 100.0, fit_zeta = 0.005,
         fit_lambda = 0.5;
  std::uint64_t fit_seed = 0;
  ConfigBinder fit_binder;
  auto* fit_config_opt = fit->add_option("--config", fit_config, "flat JSON config file");
  fit_binder.bind("data", fit->add_option("--data", fit_data, "input CSV path"), fit_data);
  fit_binder.bind("response", fit->add_option("--response", fit_response, "response column name"), fit_response);
  fit_binder.bind("response-index", fit->add_option("--response-index", fit_response_index, "response column index"), fit_response_index);
  fit_binder.bind("screen-k", fit->add_option("--screen-k", fit_k, "predictors kept by screening"), fit_k);
  fit_binder.bind("prior", fit->add_option("--prior", fit_prior, "spike-slab, lasso, or both"), fit_prior);
  fit_binder.bind("chains", fit->add_option("--chains", fit_chains, "chains per sampler"), fit_chains);
  fit_binder.bind("iterations", fit->add_option("--iterations", fit_iterations, "sweeps per chain"), fit_iterations);
  fit_binder.bind("burn-in", fit->add_option("--burn-in", fit_burn, "burn-in fraction"), fit_burn);
  fit_binder.bind("w", fit->add_option("--w", fit_w, "spike-and-slab weight"), fit_w);
  fit_binder.bind("kappa", fit->add_option("--kappa", fit_kappa, "slab inflation"), fit_kappa);
  fit_binder.bind("zeta", fit->add_option("--zeta", fit_zeta, "spike variance"), fit_zeta);
  fit_binder.bind("lambda", fit->add_option("--lambda", fit_lambda, "lasso regularization"), fit_lambda);
  auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "base seed");
  fit_binder.bind("seed", fit_seed_opt, fit_seed);
  fit_binder.bind("out", fit->add_option("--out", fit_out, "output directory"), fit_out);

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "recompute diagnostics from a trace");
  std::string diag_trace, diag_out;
  std::int64_t diag_max_lag = 0;
  diag->add_option("trace", diag_trace, "trace CSV path")->required();
  diag->add_option("--max-lag", diag_max_lag, "report the ACF up to this lag");
  diag->add_option("--out", diag_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      sim_binder.apply(load_config_file(sim_config));
      (void)sim_config_opt;
      return cmd_simulate(sim_config, sim_model, sim_n, sim_ratios,
                          sim_datasets, sim_chains, sim_iterations, sim_burn,
                          sim_w, sim_kappa, sim_zeta, sim_lambda, sim_seed,
                          sim_seed_opt->count() > 0 ||
                              load_config_file(sim_config).contains("seed"),
                          sim_workers, sim_out, sim_plot, sim_no_runs);
    }
    if (fit->parsed()) {
      fit_binder.apply(load_config_file(fit_config));
      (void)fit_config_opt;
      if (fit_data.empty()) {
        throw blockgibbs::InvalidInput("--data <csv> is required");
      }
      return cmd_fit(fit_data, fit_response, fit_response_index, fit_k,
                     fit_prior, fit_chains, fit_iterations, fit_burn, fit_w,
                     fit_kappa, fit_zeta, fit_lambda, fit_seed,
                     fit_seed_opt->count() > 0 ||
                         load_config_file(fit_config).contains("seed"),
                     fit_out);
    }
    if (diag->parsed()) {
      return cmd_diagnose(diag_trace, diag_max_lag, diag_out);
    }
  } catch (const blockgibbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
