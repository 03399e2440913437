#ifndef LFP_IO_HPP
#define LFP_IO_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lfp/inference.hpp"
#include "lfp/models.hpp"
#include "lfp/simulation.hpp"

// Batch front door plumbing: strict JSON run configs, CSV ingest/emit, and
// the serialized artifacts (test records, confidence-set tables, Monte Carlo
// tables, run manifests). Outputs carry no timestamps so re-runs are
// byte-identical.

namespace lfp {

using Json = nlohmann::ordered_json;

/// Configuration or data errors; the CLI maps these to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelBlock {
  std::string id = "entry_game";
  int cov_dim = 0;              // per player (entry game)
  std::string latent = "normal_iid";
  int nodes = 32;               // quadrature nodes per latent dimension
  int J = 3, kappa = 2, T = 2;  // choice-set / panel shape
};

struct FunctionalSpec {
  std::string type = "coordinate";  // or "entry_prob"
  int coordinate = 0;
  int player = 1;       // entry_prob: whose entry probability
  int rival_entry = 0;  // counterfactual rival action
  std::vector<double> x;
  double from = 0.0, to = 0.0, step = 1.0;  // phi* grid
  double tolerance = -1.0;  // match tolerance; default step/2
};

struct SimulateSpec {
  std::string design = "table1";
  int n = 100;
  int reps = 1000;
  std::vector<double> h_grid{0.0};
  SelectionPolicy selection;
};

struct RunConfig {
  std::string command;  // "test" | "confset" | "simulate"
  ModelBlock model;
  HypothesisSpec hyp;
  Box nuisance_box;             // confset lattice box
  std::vector<double> nuisance_step;
  FunctionalSpec functional;
  bool has_functional = false;
  double alpha = 0.05;
  Criterion criterion = Criterion::MLE;
  std::uint64_t seed = 20240101;
  int workers = 1;
  std::string data_path;
  std::string out_dir;
  SimulateSpec simulate;
  Json raw;  // canonical echo, hashed into the manifest
};

/// Strict parse: unknown keys rejected, invalid values named. Accepts either
/// a run config or a manifest (re-runs descend into its "config" field).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const Json& j);

std::unique_ptr<ModelSpec> build_model(const ModelBlock& block);

/// The functional phi(theta) described by the spec (coordinate projection or
/// counterfactual entry probability).
double evaluate_functional(const FunctionalSpec& spec, const Theta& theta,
                           int cov_dim);

/// Theta lattice from box and per-coordinate steps.
std::vector<Theta> build_lattice(const Box& box,
                                 const std::vector<double>& step);

/// Inversion grid: phi* from the functional's grid, Theta_0(phi*) the lattice
/// points matching phi within tolerance.
std::vector<InversionPoint> build_inversion_grid(
    const FunctionalSpec& spec, const std::vector<Theta>& lattice,
    int cov_dim);

/// CSV with header "y,x1,...,xk"; outcome labels matched exactly against the
/// model's outcome space. Errors carry row numbers.
Dataset ingest_csv(const std::string& path, const OutcomeSpace& space);
std::string dataset_csv(const Dataset& data, const OutcomeSpace& space);
void write_csv(const std::string& path, const Dataset& data,
               const OutcomeSpace& space);

Json test_record_json(const TestRecord& rec);
std::string mc_rows_csv(const std::vector<McRow>& rows);
std::string confset_csv(const std::vector<ConfsetRow>& rows);

/// FNV-1a hash of the canonical config dump, hex-encoded.
std::string config_hash(const Json& config);

/// Manifest: version, config echo, config hash, produced files.
Json manifest_json(const RunConfig& config,
                   const std::vector<std::string>& outputs);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace lfp

#endif  // LFP_IO_HPP
