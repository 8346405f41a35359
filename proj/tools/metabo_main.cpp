#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "metabo/io.hpp"

namespace {

using namespace metabo;

// Exit codes: 0 success, 1 runtime/usage error, 2 validation check failure.

void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& setting) {
  cmd->add_option("--setting", setting, "discrete or continuous");
  cmd->add_option("--m", cfg.m, "candidate grid size");
  cmd->add_option("--n", cfg.n, "number of training tasks");
  cmd->add_option("--t", cfg.t_steps, "BO horizon");
  cmd->add_option("--d", cfg.d, "input dimension");
  cmd->add_option("--k", cfg.k, "feature count (continuous)");
  cmd->add_option("--noise", cfg.noise_sd, "observation noise sd");
  cmd->add_option("--mask-rate", cfg.mask_rate, "fraction of masked entries (discrete)");
  cmd->add_option("--lengthscale", cfg.kernel.lengthscale, "SE kernel lengthscale");
  cmd->add_option("--signal-var", cfg.kernel.signal_var, "SE kernel signal variance");
  cmd->add_option("--trials", cfg.trials, "number of trials");
  cmd->add_option("--delta", cfg.delta, "confidence parameter");
  cmd->add_option("--seed", cfg.seed, "root seed");
  cmd->add_option("--bandwidth", cfg.bandwidth, "feature bandwidth (0 = lengthscale)");
  cmd->add_option("--train-fraction", cfg.train_fraction, "fraction of tasks used");
  cmd->add_option("--jobs", cfg.jobs, "parallel trial workers (0 = cores)");
}

int cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_prefix) {
  std::cout << dump_config(cfg);
  const OfflineDataset data = generate_offline_dataset(cfg);
  const std::string csv = out_prefix + ".csv";
  if (cfg.setting == Setting::Discrete) {
    write_offline_csv(data.observations, csv);
  } else {
    write_continuous_csv(data.inputs, data.observations.values, csv);
  }
  write_truth_sidecar(cfg, data, out_prefix + ".truth.json");
  std::cout << "wrote " << csv << " and " << out_prefix << ".truth.json\n";
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_prefix, const std::string& svg,
            const std::string& svg_metric) {
  std::cout << dump_config(cfg);
  const ExperimentResult result = run_experiment(cfg);
  write_results_csv(result, out_prefix + ".csv");
  write_aggregate_csv(result, out_prefix + ".agg.csv");
  for (const std::string& tag : result.skipped) std::cerr << "skipped: " << tag << '\n';
  if (!svg.empty()) write_svg_plot(result.aggregate, svg_metric, svg);
  std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".agg.csv\n";
  return 0;
}

int cmd_validate(const std::string& suite, std::uint64_t seed, int replications, int trials,
                 const std::string& out_csv) {
  ValidationReport report;
  const bool all = suite == "all";
  bool known = false;
  if (all || suite == "lemma1") {
    Lemma1Config cfg;
    cfg.seed = seed;
    cfg.replications = replications;
    report.append(validate_lemma1(cfg));
    known = true;
  }
  if (all || suite == "lemma3") {
    Lemma3Config cfg;
    cfg.seed = seed;
    cfg.replications = replications;
    report.append(validate_lemma3(cfg));
    known = true;
  }
  if (all || suite == "lemma4") {
    Lemma4Config cfg;
    cfg.seed = seed;
    report.append(validate_lemma4(cfg));
    known = true;
  }
  if (all || suite == "tails") {
    report.append(validate_tails(seed));
    known = true;
  }
  if (all || suite == "bounds") {
    report.append(validate_bounds_default(seed, trials));
    known = true;
  }
  if (!known) {
    std::cerr << "unknown suite: " << suite << '\n';
    return 1;
  }
  std::cout << report.text();
  if (!out_csv.empty()) write_report_csv(report, out_csv);
  return report.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meta Bayesian optimization with an estimated GP prior"};
  app.require_subcommand(1);

  ExperimentConfig gen_cfg;
  std::string gen_setting = "discrete", gen_out = "dataset";
  CLI::App* gen = app.add_subcommand("gen-data", "generate an offline multi-task dataset");
  add_experiment_flags(gen, gen_cfg, gen_setting);
  gen->add_option("--out", gen_out, "output path prefix");

  ExperimentConfig run_cfg;
  std::string run_setting, run_out = "results", run_config_file, run_svg,
              run_svg_metric = "ybest", run_methods;
  CLI::App* run = app.add_subcommand("run", "run the regret experiment");
  add_experiment_flags(run, run_cfg, run_setting);
  run->add_option("--config", run_config_file, "key=value config file (flags override)");
  run->add_option("--methods", run_methods, "methods joined by +, e.g. pembo-ucb+random");
  run->add_option("--out", run_out, "output path prefix");
  run->add_option("--svg", run_svg, "also write an SVG plot here");
  run->add_option("--svg-metric", run_svg_metric, "plot column: r, R or ybest");

  std::string val_suite = "all", val_csv = "report.csv";
  std::uint64_t val_seed = 1;
  int val_reps = 5000, val_trials = 40;
  CLI::App* val = app.add_subcommand("validate", "statistical validation suites");
  val->add_option("--suite", val_suite, "lemma1|lemma3|lemma4|tails|bounds|all");
  val->add_option("--seed", val_seed, "root seed");
  val->add_option("--replications", val_reps, "Monte-Carlo replications");
  val->add_option("--trials", val_trials, "trials for the bounds suite");
  val->add_option("--out", val_csv, "report CSV path");

  std::string plot_in, plot_out = "plot.svg", plot_metric = "ybest";
  CLI::App* plot = app.add_subcommand("plot", "render an aggregate CSV as SVG");
  plot->add_option("--in", plot_in, "aggregate CSV")->required();
  plot->add_option("--out", plot_out, "SVG path");
  plot->add_option("--metric", plot_metric, "column: r, R or ybest");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      apply_config_entry(gen_cfg, "setting", gen_setting);
      return cmd_gen_data(gen_cfg, gen_out);
    }
    if (run->parsed()) {
      ExperimentConfig cfg;
      if (!run_config_file.empty())
        for (const auto& [key, value] : read_config_file(run_config_file))
          apply_config_entry(cfg, key, value);
      // Explicitly passed flags override the config file.
      const ExperimentConfig& flags = run_cfg;
      if (run->count("--setting")) apply_config_entry(cfg, "setting", run_setting);
      if (run->count("--m")) cfg.m = flags.m;
      if (run->count("--n")) cfg.n = flags.n;
      if (run->count("--t")) cfg.t_steps = flags.t_steps;
      if (run->count("--d")) cfg.d = flags.d;
      if (run->count("--k")) cfg.k = flags.k;
      if (run->count("--noise")) cfg.noise_sd = flags.noise_sd;
      if (run->count("--mask-rate")) cfg.mask_rate = flags.mask_rate;
      if (run->count("--lengthscale")) cfg.kernel.lengthscale = flags.kernel.lengthscale;
      if (run->count("--signal-var")) cfg.kernel.signal_var = flags.kernel.signal_var;
      if (run->count("--trials")) cfg.trials = flags.trials;
      if (run->count("--delta")) cfg.delta = flags.delta;
      if (run->count("--seed")) cfg.seed = flags.seed;
      if (run->count("--bandwidth")) cfg.bandwidth = flags.bandwidth;
      if (run->count("--train-fraction")) cfg.train_fraction = flags.train_fraction;
      if (run->count("--jobs")) cfg.jobs = flags.jobs;
      if (!run_methods.empty()) apply_config_entry(cfg, "methods", run_methods);
      return cmd_run(cfg, run_out, run_svg, run_svg_metric);
    }
    if (val->parsed()) return cmd_validate(val_suite, val_seed, val_reps, val_trials, val_csv);
    if (plot->parsed()) {
      write_svg_plot(read_aggregate_csv(plot_in), plot_metric, plot_out);
      std::cout << "wrote " << plot_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
