#include "lfp/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lfp/quadrature.hpp"

namespace lfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kVersion = "1.0";

void check_keys(const Json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(ctx + ": unknown key \"" + item.key() + "\"");
  }
}

double require_number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
  return j.get<double>();
}

std::vector<double> number_array(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(require_number(v, ctx));
  return out;
}

Box box_from_json(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of pairs");
  Box box;
  for (const auto& pair : j) {
    const auto lohi = number_array(pair, ctx);
    if (lohi.size() != 2 || lohi[0] > lohi[1])
      throw ConfigError(ctx + ": each entry must be [lo, hi]");
    box.emplace_back(lohi[0], lohi[1]);
  }
  return box;
}

Criterion criterion_from_string(const std::string& s) {
  if (s == "moment") return Criterion::Moment;
  if (s == "mle") return Criterion::MLE;
  if (s == "entrants") return Criterion::Entrants;
  throw ConfigError("criterion: expected moment | mle | entrants, got \"" +
                    s + "\"");
}

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Moment:
      return "moment";
    case Criterion::Entrants:
      return "entrants";
    case Criterion::MLE:
    default:
      return "mle";
  }
}

SelectionKind selection_from_string(const std::string& s) {
  if (s == "fixed_prob") return SelectionKind::FixedProb;
  if (s == "always_first") return SelectionKind::AlwaysFirst;
  if (s == "always_second") return SelectionKind::AlwaysSecond;
  if (s == "covariate_dependent") return SelectionKind::CovariateDependent;
  if (s == "unit_alternating") return SelectionKind::UnitAlternating;
  throw ConfigError("selection.kind: unknown mechanism \"" + s + "\"");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json json_extended(double v) {
  if (v == kInf) return Json("inf");
  if (v == -kInf) return Json("-inf");
  return Json(v);
}

void parse_model_block(const Json& j, ModelBlock& block) {
  check_keys(j, "model",
             {"id", "cov_dim", "latent", "nodes", "J", "kappa", "T"});
  if (j.contains("id")) block.id = j.at("id").get<std::string>();
  if (block.id != "entry_game" && block.id != "choice_set" &&
      block.id != "panel")
    throw ConfigError("model.id: expected entry_game | choice_set | panel");
  if (j.contains("cov_dim")) block.cov_dim = j.at("cov_dim").get<int>();
  if (j.contains("latent")) block.latent = j.at("latent").get<std::string>();
  if (block.latent != "normal_iid" && block.latent != "gauss_hermite")
    throw ConfigError("model.latent: expected normal_iid | gauss_hermite");
  if (j.contains("nodes")) block.nodes = j.at("nodes").get<int>();
  if (block.nodes < 1) throw ConfigError("model.nodes: must be >= 1");
  if (j.contains("J")) block.J = j.at("J").get<int>();
  if (j.contains("kappa")) block.kappa = j.at("kappa").get<int>();
  if (j.contains("T")) block.T = j.at("T").get<int>();
}

void parse_hypothesis_block(const Json& j, RunConfig& config) {
  check_keys(j, "hypothesis",
             {"theta0_grid", "search_box", "restricted", "nuisance_box",
              "nuisance_step"});
  if (j.contains("search_box"))
    config.hyp.search_box = box_from_json(j.at("search_box"),
                                          "hypothesis.search_box");
  if (j.contains("nuisance_box"))
    config.nuisance_box =
        box_from_json(j.at("nuisance_box"), "hypothesis.nuisance_box");
  if (j.contains("nuisance_step")) {
    const Json& s = j.at("nuisance_step");
    if (s.is_number())
      config.nuisance_step.assign(config.nuisance_box.size(), s.get<double>());
    else
      config.nuisance_step = number_array(s, "hypothesis.nuisance_step");
  }
  if (j.contains("theta0_grid")) {
    for (const auto& point : j.at("theta0_grid"))
      config.hyp.theta0_grid.push_back(
          number_array(point, "hypothesis.theta0_grid"));
  } else if (j.contains("restricted")) {
    const Json& r = j.at("restricted");
    check_keys(r, "hypothesis.restricted", {"coords", "values"});
    const auto coords = number_array(r.at("coords"), "restricted.coords");
    const auto values = number_array(r.at("values"), "restricted.values");
    if (coords.size() != values.size())
      throw ConfigError("hypothesis.restricted: coords/values size mismatch");
    if (config.nuisance_box.empty())
      throw ConfigError(
          "hypothesis.restricted: needs nuisance_box and nuisance_step");
    std::vector<Theta> lattice =
        build_lattice(config.nuisance_box, config.nuisance_step);
    const int dim =
        static_cast<int>(coords.size() + config.nuisance_box.size());
    for (const Theta& free : lattice) {
      Theta theta(dim, 0.0);
      std::vector<bool> used(dim, false);
      for (std::size_t k = 0; k < coords.size(); ++k) {
        const int c = static_cast<int>(coords[k]);
        if (c < 0 || c >= dim)
          throw ConfigError("hypothesis.restricted: coordinate out of range");
        theta[c] = values[k];
        used[c] = true;
      }
      std::size_t next = 0;
      for (int c = 0; c < dim; ++c)
        if (!used[c]) theta[c] = free[next++];
      config.hyp.theta0_grid.push_back(std::move(theta));
    }
  }
}

void parse_functional_block(const Json& j, RunConfig& config) {
  check_keys(j, "functional",
             {"type", "coordinate", "player", "rival_entry", "x", "grid",
              "tolerance"});
  FunctionalSpec& f = config.functional;
  if (j.contains("type")) f.type = j.at("type").get<std::string>();
  if (f.type != "coordinate" && f.type != "entry_prob")
    throw ConfigError("functional.type: expected coordinate | entry_prob");
  if (j.contains("coordinate")) f.coordinate = j.at("coordinate").get<int>();
  if (j.contains("player")) f.player = j.at("player").get<int>();
  if (f.player != 1 && f.player != 2)
    throw ConfigError("functional.player: expected 1 or 2");
  if (j.contains("rival_entry"))
    f.rival_entry = j.at("rival_entry").get<int>();
  if (j.contains("x")) f.x = number_array(j.at("x"), "functional.x");
  if (!j.contains("grid"))
    throw ConfigError("functional: missing required key \"grid\"");
  const Json& g = j.at("grid");
  check_keys(g, "functional.grid", {"from", "to", "step"});
  f.from = require_number(g.at("from"), "functional.grid.from");
  f.to = require_number(g.at("to"), "functional.grid.to");
  f.step = require_number(g.at("step"), "functional.grid.step");
  if (f.step <= 0.0 || f.to < f.from)
    throw ConfigError("functional.grid: need step > 0 and to >= from");
  if (j.contains("tolerance"))
    f.tolerance = require_number(j.at("tolerance"), "functional.tolerance");
  if (f.tolerance < 0.0) f.tolerance = 0.5 * f.step;
  config.has_functional = true;
}

void parse_simulate_block(const Json& j, RunConfig& config) {
  check_keys(j, "simulate",
             {"design", "n", "reps", "h_grid", "selection"});
  SimulateSpec& s = config.simulate;
  if (j.contains("design")) s.design = j.at("design").get<std::string>();
  if (s.design != "table1" && s.design != "table2" && s.design != "custom")
    throw ConfigError("simulate.design: expected table1 | table2 | custom");
  if (j.contains("n")) s.n = j.at("n").get<int>();
  if (s.n < 2) throw ConfigError("simulate.n: must be >= 2");
  if (j.contains("reps")) s.reps = j.at("reps").get<int>();
  if (s.reps < 1) throw ConfigError("simulate.reps: must be >= 1");
  if (j.contains("h_grid"))
    s.h_grid = number_array(j.at("h_grid"), "simulate.h_grid");
  if (s.h_grid.empty()) throw ConfigError("simulate.h_grid: must be nonempty");
  if (j.contains("selection")) {
    const Json& sel = j.at("selection");
    check_keys(sel, "simulate.selection", {"kind", "p_sel"});
    if (sel.contains("kind"))
      s.selection.kind =
          selection_from_string(sel.at("kind").get<std::string>());
    if (sel.contains("p_sel"))
      s.selection.p_sel = require_number(sel.at("p_sel"), "selection.p_sel");
    if (s.selection.p_sel < 0.0 || s.selection.p_sel > 1.0)
      throw ConfigError("selection.p_sel: must lie in [0,1]");
  }
}

}  // namespace

RunConfig parse_config_json(const Json& input) {
  // manifests embed the config they were produced from
  const Json& j = input.is_object() && input.contains("config")
                      ? input.at("config")
                      : input;
  check_keys(j, "config",
             {"command", "model", "hypothesis", "functional", "alpha",
              "criterion", "seed", "workers", "data", "out", "simulate"});
  RunConfig config;
  config.raw = j;
  if (j.contains("command"))
    config.command = j.at("command").get<std::string>();
  if (!config.command.empty() && config.command != "test" &&
      config.command != "confset" && config.command != "simulate")
    throw ConfigError("command: expected test | confset | simulate");
  if (!j.contains("model"))
    throw ConfigError("config: missing required block \"model\"");
  parse_model_block(j.at("model"), config.model);
  if (j.contains("hypothesis"))
    parse_hypothesis_block(j.at("hypothesis"), config);
  if (j.contains("functional")) parse_functional_block(j.at("functional"), config);
  if (j.contains("alpha"))
    config.alpha = require_number(j.at("alpha"), "alpha");
  if (config.alpha <= 0.0 || config.alpha >= 1.0)
    throw ConfigError("alpha: must lie strictly between 0 and 1");
  if (j.contains("criterion"))
    config.criterion = criterion_from_string(j.at("criterion").get<std::string>());
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) config.workers = j.at("workers").get<int>();
  if (config.workers < 1) throw ConfigError("workers: must be >= 1");
  if (j.contains("data")) config.data_path = j.at("data").get<std::string>();
  if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
  if (j.contains("simulate")) parse_simulate_block(j.at("simulate"), config);
  return config;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read \"" + path + "\"");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config_json(j);
}

std::unique_ptr<ModelSpec> build_model(const ModelBlock& block) {
  if (block.id != "entry_game" && block.id != "choice_set" &&
      block.id != "panel")
    throw ConfigError("model.id: expected entry_game | choice_set | panel");
  LatentSpec latent;
  if (block.id == "entry_game") {
    if (block.latent == "gauss_hermite") {
      latent.kind = LatentKind::FixedNodes;
      latent.nodes = gauss_hermite_normal(block.nodes, 2);
    }
    return std::make_unique<EntryGameModel>(block.cov_dim, latent);
  }
  latent.kind = LatentKind::FixedNodes;
  if (block.id == "choice_set") {
    latent.nodes = gauss_hermite_normal(block.nodes, block.J);
    return std::make_unique<ChoiceSetModel>(block.J, block.kappa,
                                            std::max(1, block.cov_dim),
                                            latent);
  }
  latent.nodes = gauss_hermite_normal(block.nodes, block.T);
  return std::make_unique<PanelModel>(block.T, std::max(1, block.cov_dim),
                                      latent);
}

double evaluate_functional(const FunctionalSpec& spec, const Theta& theta,
                           int cov_dim) {
  if (spec.type == "coordinate") {
    if (spec.coordinate < 0 ||
        spec.coordinate >= static_cast<int>(theta.size()))
      throw ConfigError("functional.coordinate: out of range");
    return theta[spec.coordinate];
  }
  // counterfactual entry probability P(u_j >= -x'delta_j - beta_j y_rival)
  if (static_cast<int>(spec.x.size()) != cov_dim)
    throw ConfigError("functional.x: size must match the covariate block");
  const int j = spec.player - 1;
  const double beta = theta[j];
  double index = beta * spec.rival_entry;
  for (int k = 0; k < cov_dim; ++k)
    index += theta[2 + j * cov_dim + k] * spec.x[k];
  return norm_cdf(index);
}

std::vector<Theta> build_lattice(const Box& box,
                                 const std::vector<double>& step) {
  if (box.size() != step.size())
    throw ConfigError("lattice: box and step size mismatch");
  std::vector<Theta> lattice{{}};
  for (std::size_t d = 0; d < box.size(); ++d) {
    if (step[d] <= 0.0) throw ConfigError("lattice: step must be > 0");
    const int count = static_cast<int>(
        std::floor((box[d].second - box[d].first) / step[d] + 1e-9));
    std::vector<Theta> next;
    for (const Theta& prefix : lattice) {
      for (int k = 0; k <= count; ++k) {
        Theta point = prefix;
        point.push_back(box[d].first + step[d] * k);
        next.push_back(std::move(point));
      }
    }
    lattice = std::move(next);
  }
  return lattice;
}

std::vector<InversionPoint> build_inversion_grid(
    const FunctionalSpec& spec, const std::vector<Theta>& lattice,
    int cov_dim) {
  std::vector<double> phi(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    phi[i] = evaluate_functional(spec, lattice[i], cov_dim);
  std::vector<InversionPoint> grid;
  const int count =
      static_cast<int>(std::floor((spec.to - spec.from) / spec.step + 1e-9));
  for (int k = 0; k <= count; ++k) {
    InversionPoint point;
    point.phi_star = spec.from + spec.step * k;
    for (std::size_t i = 0; i < lattice.size(); ++i)
      if (std::abs(phi[i] - point.phi_star) <= spec.tolerance)
        point.theta0_grid.push_back(lattice[i]);
    grid.push_back(std::move(point));
  }
  return grid;
}

Dataset ingest_csv(const std::string& path, const OutcomeSpace& space) {
  std::ifstream in(path);
  if (!in) throw ConfigError("data: cannot read \"" + path + "\"");
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ConfigError("data: empty file \"" + path + "\"");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.empty() || header[0] != "y")
    throw ConfigError("data: first header column must be \"y\"");
  for (std::size_t i = 0; i < header.size(); ++i)
    for (std::size_t k = i + 1; k < header.size(); ++k)
      if (header[i] == header[k])
        throw ConfigError("data: duplicate header column \"" + header[i] +
                          "\"");
  const std::size_t cols = header.size();

  Dataset data;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != cols)
      throw ConfigError("data: row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(cols));
    Observation o;
    o.y = space.index_of(fields[0]);
    if (o.y < 0)
      throw ConfigError("data: row " + std::to_string(row) +
                        ": unknown outcome label \"" + fields[0] + "\"");
    for (std::size_t c = 1; c < cols; ++c) {
      try {
        std::size_t used = 0;
        o.x.push_back(std::stod(fields[c], &used));
        if (used != fields[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("data: row " + std::to_string(row) +
                          ": invalid number \"" + fields[c] + "\"");
      }
    }
    data.obs.push_back(std::move(o));
  }
  if (data.obs.empty()) throw ConfigError("data: no observations in file");
  return data;
}

std::string dataset_csv(const Dataset& data, const OutcomeSpace& space) {
  std::ostringstream out;
  out << "y";
  const std::size_t k = data.obs.empty() ? 0 : data.obs[0].x.size();
  for (std::size_t c = 1; c <= k; ++c) out << ",x" << c;
  out << "\n";
  for (const Observation& o : data.obs) {
    out << space.label(o.y);
    for (double v : o.x) out << "," << format_double(v);
    out << "\n";
  }
  return out.str();
}

void write_csv(const std::string& path, const Dataset& data,
               const OutcomeSpace& space) {
  write_text(path, dataset_csv(data, space));
}

Json test_record_json(const TestRecord& rec) {
  Json j;
  j["version"] = kVersion;
  j["alpha"] = rec.alpha;
  j["decision"] =
      rec.decision == Decision::Reject ? "reject" : "fail_to_reject";
  j["log_t"] = json_extended(rec.log_t);
  j["log_t_swap"] = json_extended(rec.log_t_swap);
  j["log_s"] = json_extended(rec.log_s);
  j["t_n"] = json_extended(std::exp(rec.log_t));
  j["t_n_swap"] = json_extended(std::exp(rec.log_t_swap));
  j["s_n"] = json_extended(std::exp(rec.log_s));
  j["theta_hat1"] = rec.theta_hat1;
  j["theta_hat0"] = rec.theta_hat0;
  j["theta_hat1_swap"] = rec.theta_hat1_swap;
  j["theta_hat0_swap"] = rec.theta_hat0_swap;
  j["split"] = Json{{"seed", rec.split.seed},
                    {"d0", rec.split.d0},
                    {"d1", rec.split.d1}};
  return j;
}

std::string mc_rows_csv(const std::vector<McRow>& rows) {
  std::ostringstream out;
  out << "n,criterion,h,power,mc_se,reps\n";
  for (const McRow& row : rows)
    out << row.n << "," << criterion_name(row.criterion) << ","
        << format_double(row.h) << "," << format_double(row.power) << ","
        << format_double(row.mc_se) << "," << row.reps << "\n";
  return out.str();
}

std::string confset_csv(const std::vector<ConfsetRow>& rows) {
  std::ostringstream out;
  out << "phi_star,log_s,retained,skipped\n";
  for (const ConfsetRow& row : rows) {
    out << format_double(row.phi_star) << ",";
    if (row.skipped)
      out << "nan";
    else if (row.log_s == kInf)
      out << "inf";
    else if (row.log_s == -kInf)
      out << "-inf";
    else
      out << format_double(row.log_s);
    out << "," << (row.retained ? 1 : 0) << "," << (row.skipped ? 1 : 0)
        << "\n";
  }
  return out.str();
}

std::string config_hash(const Json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

Json manifest_json(const RunConfig& config,
                   const std::vector<std::string>& outputs) {
  Json j;
  j["version"] = kVersion;
  j["config_hash"] = config_hash(config.raw);
  j["outputs"] = outputs;
  j["config"] = config.raw;
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output: cannot write \"" + path + "\"");
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lfp
