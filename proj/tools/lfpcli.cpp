// Batch front door: `lfp test|confset|simulate --config <file> ...`.
// Exit status 0 on success regardless of the statistical decision, 2 on
// configuration or data errors.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfp/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliArgs {
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::string design;
  int workers = 0;  // 0 = take from config
};

lfp::RunConfig load_config(const CliArgs& args, const std::string& command) {
  lfp::RunConfig config = lfp::parse_config(args.config_path);
  if (!config.command.empty() && config.command != command)
    throw lfp::ConfigError("config: command \"" + config.command +
                           "\" does not match subcommand \"" + command + "\"");
  config.command = command;
  if (!args.data_path.empty()) config.data_path = args.data_path;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.workers > 0) config.workers = args.workers;
  if (config.out_dir.empty()) config.out_dir = ".";
  fs::create_directories(config.out_dir);

  // keep the manifest echo authoritative for re-runs
  config.raw["command"] = command;
  if (!config.data_path.empty()) config.raw["data"] = config.data_path;
  return config;
}

std::string out_path(const lfp::RunConfig& config, const std::string& name) {
  return (fs::path(config.out_dir) / name).string();
}

void write_manifest(const lfp::RunConfig& config,
                    const std::vector<std::string>& outputs) {
  lfp::write_text(out_path(config, "manifest.json"),
                  lfp::manifest_json(config, outputs).dump(2) + "\n");
}

int run_test(const CliArgs& args) {
  lfp::RunConfig config = load_config(args, "test");
  if (config.data_path.empty())
    throw lfp::ConfigError("test: a data file is required");
  if (config.hyp.theta0_grid.empty())
    throw lfp::ConfigError("test: hypothesis block must define Theta_0");
  if (config.hyp.search_box.empty())
    throw lfp::ConfigError("test: hypothesis block must define search_box");

  auto model = lfp::build_model(config.model);
  lfp::Dataset data = lfp::ingest_csv(config.data_path, model->space());
  lfp::SplitPlan plan = lfp::split_sample(data, config.seed);
  lfp::InferenceOptions opts;
  opts.criterion = config.criterion;
  opts.alpha = config.alpha;
  opts.seed = config.seed;
  lfp::TestRecord rec =
      lfp::crossfit_lr(data, plan, config.hyp, *model, opts);

  lfp::Json j = lfp::test_record_json(rec);
  j["config_hash"] = lfp::config_hash(config.raw);
  lfp::write_text(out_path(config, "record.json"), j.dump(2) + "\n");
  write_manifest(config, {"record.json"});
  std::cout << (rec.decision == lfp::Decision::Reject ? "reject"
                                                      : "fail_to_reject")
            << "\n";
  return 0;
}

int run_confset(const CliArgs& args) {
  lfp::RunConfig config = load_config(args, "confset");
  if (config.data_path.empty())
    throw lfp::ConfigError("confset: a data file is required");
  if (!config.has_functional)
    throw lfp::ConfigError("confset: a functional block is required");
  if (config.hyp.search_box.empty())
    throw lfp::ConfigError("confset: hypothesis block must define search_box");
  if (config.nuisance_box.empty())
    throw lfp::ConfigError(
        "confset: hypothesis block must define nuisance_box/nuisance_step");

  auto model = lfp::build_model(config.model);
  lfp::Dataset data = lfp::ingest_csv(config.data_path, model->space());
  const std::vector<lfp::Theta> lattice =
      lfp::build_lattice(config.nuisance_box, config.nuisance_step);
  const std::vector<lfp::InversionPoint> grid = lfp::build_inversion_grid(
      config.functional, lattice, config.model.cov_dim);
  if (grid.empty()) throw lfp::ConfigError("confset: empty grid");

  lfp::InferenceOptions opts;
  opts.criterion = config.criterion;
  opts.alpha = config.alpha;
  opts.seed = config.seed;
  const std::vector<lfp::ConfsetRow> rows = lfp::confidence_set(
      data, *model, grid, config.hyp.search_box, opts);

  lfp::write_text(out_path(config, "confset.csv"), lfp::confset_csv(rows));
  int retained = 0, skipped = 0;
  for (const auto& row : rows) {
    retained += row.retained ? 1 : 0;
    skipped += row.skipped ? 1 : 0;
  }
  lfp::Json summary;
  summary["version"] = "1.0";
  summary["alpha"] = config.alpha;
  summary["points"] = static_cast<int>(rows.size());
  summary["retained"] = retained;
  summary["skipped"] = skipped;
  summary["config_hash"] = lfp::config_hash(config.raw);
  lfp::write_text(out_path(config, "confset.json"), summary.dump(2) + "\n");
  write_manifest(config, {"confset.csv", "confset.json"});
  std::cout << "retained " << retained << "/" << rows.size() << "\n";
  return 0;
}

int run_simulate(const CliArgs& args) {
  lfp::RunConfig config = load_config(args, "simulate");
  if (!args.design.empty()) {
    config.simulate.design = args.design;
    config.raw["simulate"]["design"] = args.design;
  }

  lfp::McDesign design;
  if (config.simulate.design == "table1") {
    design = lfp::table1_design(config.simulate.n, config.criterion);
  } else if (config.simulate.design == "table2") {
    design = lfp::table2_design(config.simulate.n);
  } else {
    if (config.hyp.theta0_grid.empty() || config.hyp.search_box.empty())
      throw lfp::ConfigError(
          "simulate: custom designs need a hypothesis block");
    design = lfp::table1_design(config.simulate.n, config.criterion);
    design.name = "custom";
    design.cov_dim = config.model.cov_dim;
    design.hyp = config.hyp;
    design.criterion = config.criterion;
  }
  design.n = config.simulate.n;
  design.reps = config.simulate.reps;
  design.h_grid = config.simulate.h_grid;
  design.alpha = config.alpha;
  design.selection = config.simulate.selection;
  design.seed = config.seed;

  lfp::ModelBlock block = config.model;
  block.cov_dim = design.cov_dim;
  auto model = lfp::build_model(block);
  const std::vector<lfp::McRow> rows =
      lfp::mc_table(design, *model, config.workers);

  lfp::write_text(out_path(config, "table.csv"), lfp::mc_rows_csv(rows));
  write_manifest(config, {"table.csv"});
  for (const auto& row : rows)
    std::cout << "h=" << row.h << " power=" << row.power << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal tests and confidence sets for incomplete models"};
  app.require_subcommand(1);
  CliArgs args;

  auto add_common = [&](CLI::App* cmd, bool with_data) {
    cmd->add_option("--config", args.config_path, "Run configuration file")
        ->required();
    if (with_data)
      cmd->add_option("--data", args.data_path, "Input CSV data file");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--workers", args.workers, "Worker thread count");
  };
  CLI::App* test_cmd = app.add_subcommand("test", "Run a cross-fit LR test");
  add_common(test_cmd, true);
  CLI::App* confset_cmd =
      app.add_subcommand("confset", "Invert tests into a confidence set");
  add_common(confset_cmd, true);
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo size/power tables");
  add_common(simulate_cmd, false);
  simulate_cmd->add_option("--design", args.design,
                           "table1 | table2 | custom");

  CLI11_PARSE(app, argc, argv);
  try {
    if (app.got_subcommand(test_cmd)) return run_test(args);
    if (app.got_subcommand(confset_cmd)) return run_confset(args);
    return run_simulate(args);
  } catch (const lfp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
