#include "riskflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "riskflow/error.hpp"

namespace riskflow {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "family",  "sigma",          "gamma",           "alpha",         "a_min",      "a_max",
    "y_max",   "horizon",        "n_x",             "n_y",           "n_a",        "n_t",
    "risk",    "theta",          "beta",            "initial_state", "initial_weights",
    "terminal_cost", "cost_scale", "discount_sampling", "generator_file", "cost_rate",
    "solver",  "validation"};
const std::set<std::string> kSolverKeys = {"tol_gap", "tol_feas", "max_iter", "fw_max_iter", "fw_tol"};
const std::set<std::string> kValidationKeys = {"paths", "seed"};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + prefix + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& prefix = "") {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + prefix + key + "': " + e.what());
  }
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

std::string family_name(Family f) { return f == Family::custom ? "custom" : "circle_follower"; }

}  // namespace

double ProblemSpec::effective_y_max() const { return y_max.value_or(2.0 + gamma * a_max * a_max); }

ProblemSpec spec_from_json(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(config, kTopLevelKeys, "");
  ProblemSpec spec;

  std::string family = "circle_follower";
  read(config, "family", family);
  if (family == "circle_follower") {
    spec.family = Family::circle_follower;
  } else if (family == "custom") {
    spec.family = Family::custom;
  } else {
    throw ConfigError("config key 'family': unknown family '" + family + "'");
  }

  read(config, "sigma", spec.sigma);
  read(config, "gamma", spec.gamma);
  read(config, "alpha", spec.alpha);
  read(config, "a_min", spec.a_min);
  read(config, "a_max", spec.a_max);
  if (config.contains("y_max")) {
    double y = 0.0;
    read(config, "y_max", y);
    spec.y_max = y;
  }
  read(config, "horizon", spec.horizon);
  read(config, "n_x", spec.n_x);
  read(config, "n_y", spec.n_y);
  read(config, "n_a", spec.n_a);
  read(config, "n_t", spec.n_t);

  std::string risk = to_string(spec.risk.kind);
  read(config, "risk", risk);
  try {
    spec.risk.kind = risk_kind_from_string(risk);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("config key 'risk': ") + e.what());
  }
  read(config, "theta", spec.risk.theta);
  read(config, "beta", spec.risk.beta);

  read(config, "initial_state", spec.initial_state);
  read(config, "initial_weights", spec.initial_weights);
  read(config, "terminal_cost", spec.terminal_cost);
  read(config, "cost_scale", spec.cost_scale);
  std::string sampling = "left";
  read(config, "discount_sampling", sampling);
  require(sampling == "left" || sampling == "right", "discount_sampling", "must be \"left\" or \"right\"");
  spec.discount_sampling = sampling == "left" ? DiscountSampling::left : DiscountSampling::right;
  read(config, "generator_file", spec.generator_file);
  read(config, "cost_rate", spec.cost_rate);

  if (config.contains("solver")) {
    const auto& s = config.at("solver");
    require(s.is_object(), "solver", "must be an object");
    reject_unknown(s, kSolverKeys, "solver.");
    read(s, "tol_gap", spec.solver.tol_gap, "solver.");
    read(s, "tol_feas", spec.solver.tol_feas, "solver.");
    read(s, "max_iter", spec.solver.max_iter, "solver.");
    read(s, "fw_max_iter", spec.solver.fw_max_iter, "solver.");
    read(s, "fw_tol", spec.solver.fw_tol, "solver.");
  }
  if (config.contains("validation")) {
    const auto& v = config.at("validation");
    require(v.is_object(), "validation", "must be an object");
    reject_unknown(v, kValidationKeys, "validation.");
    read(v, "paths", spec.validation.paths, "validation.");
    read(v, "seed", spec.validation.seed, "validation.");
  }

  // Invariants.
  require(spec.sigma > 0.0, "sigma", "must be positive");
  require(spec.gamma >= 0.0, "gamma", "must be non-negative");
  require(spec.alpha >= 0.0, "alpha", "must be non-negative");
  require(spec.a_min < spec.a_max, "a_min", "must be below a_max");
  require(spec.effective_y_max() > 0.0, "y_max", "must be positive");
  require(spec.horizon > 0.0, "horizon", "must be positive");
  require(spec.n_x >= 3, "n_x", "needs at least 3 points");
  require(spec.n_y >= 2, "n_y", "needs at least 2 points");
  require(spec.n_a >= 1, "n_a", "needs at least 1 action");
  require(spec.n_t >= 2, "n_t", "needs at least 2 time points");
  if (spec.risk.kind == RiskKind::entropic || spec.risk.kind == RiskKind::entropic_linear) {
    require(spec.risk.theta >= 0.0, "theta", "must be non-negative");
  }
  if (spec.risk.kind == RiskKind::mean_semideviation) {
    require(spec.risk.beta >= 0.0 && spec.risk.beta <= 1.0, "beta", "must lie in [0, 1]");
  }
  require(spec.cost_scale >= 0.0, "cost_scale", "must be non-negative");
  for (double v : spec.terminal_cost) require(v >= 0.0, "terminal_cost", "must be non-negative");
  for (double w : spec.initial_weights) require(w >= 0.0, "initial_weights", "must be non-negative");
  for (const auto& row : spec.cost_rate) {
    for (double c : row) require(c >= 0.0, "cost_rate", "must be non-negative");
  }
  require(spec.solver.tol_gap > 0.0, "solver.tol_gap", "must be positive");
  require(spec.solver.tol_feas > 0.0, "solver.tol_feas", "must be positive");
  require(spec.solver.max_iter > 0, "solver.max_iter", "must be positive");
  require(spec.solver.fw_max_iter > 0, "solver.fw_max_iter", "must be positive");
  require(spec.validation.paths >= 1, "validation.paths", "must be at least 1");
  if (spec.family == Family::custom) {
    require(!spec.generator_file.empty(), "generator_file", "required for the custom family");
  } else {
    require(spec.initial_state < spec.n_x, "initial_state", "outside the state grid");
    require(spec.initial_weights.empty() || spec.initial_weights.size() == spec.n_x, "initial_weights",
            "must have n_x entries");
    require(spec.terminal_cost.empty() || spec.terminal_cost.size() == spec.n_x, "terminal_cost",
            "must have n_x entries");
  }
  return spec;
}

json spec_to_json(const ProblemSpec& spec) {
  json j;
  j["family"] = family_name(spec.family);
  j["sigma"] = spec.sigma;
  j["gamma"] = spec.gamma;
  j["alpha"] = spec.alpha;
  j["a_min"] = spec.a_min;
  j["a_max"] = spec.a_max;
  if (spec.y_max) j["y_max"] = *spec.y_max;
  j["horizon"] = spec.horizon;
  j["n_x"] = spec.n_x;
  j["n_y"] = spec.n_y;
  j["n_a"] = spec.n_a;
  j["n_t"] = spec.n_t;
  j["risk"] = to_string(spec.risk.kind);
  j["theta"] = spec.risk.theta;
  j["beta"] = spec.risk.beta;
  j["initial_state"] = spec.initial_state;
  if (!spec.initial_weights.empty()) j["initial_weights"] = spec.initial_weights;
  if (!spec.terminal_cost.empty()) j["terminal_cost"] = spec.terminal_cost;
  j["cost_scale"] = spec.cost_scale;
  j["discount_sampling"] = spec.discount_sampling == DiscountSampling::left ? "left" : "right";
  if (!spec.generator_file.empty()) j["generator_file"] = spec.generator_file;
  if (!spec.cost_rate.empty()) j["cost_rate"] = spec.cost_rate;
  j["solver"] = {{"tol_gap", spec.solver.tol_gap},
                 {"tol_feas", spec.solver.tol_feas},
                 {"max_iter", spec.solver.max_iter},
                 {"fw_max_iter", spec.solver.fw_max_iter},
                 {"fw_tol", spec.solver.fw_tol}};
  j["validation"] = {{"paths", spec.validation.paths}, {"seed", spec.validation.seed}};
  return j;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return spec_from_json(config);
}

ControlledGenerator load_generator_triplets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open generator file " + path.string());
  struct Entry {
    std::size_t action, row, col;
    double rate;
  };
  std::vector<Entry> entries;
  std::size_t dim = 0;
  std::size_t actions = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long a = 0, r = 0, c = 0;
    double rate = 0.0;
    if (!(fields >> a >> r >> c >> rate)) {
      if (line_no == 1) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected action,row,col,rate");
    }
    if (a < 0 || r < 0 || c < 0) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": negative index");
    }
    entries.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(r), static_cast<std::size_t>(c), rate});
    dim = std::max({dim, static_cast<std::size_t>(r) + 1, static_cast<std::size_t>(c) + 1});
    actions = std::max(actions, static_cast<std::size_t>(a) + 1);
  }
  if (entries.empty()) throw ConfigError("generator file " + path.string() + " has no entries");

  std::vector<std::vector<Triplet>> per_action(actions);
  for (const auto& e : entries) {
    if (e.row == e.col) continue;
    if (e.rate < 0.0) {
      throw ConfigError("generator file " + path.string() + ": negative off-diagonal rate");
    }
    per_action[e.action].emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.rate);
  }
  std::vector<RateMatrix> mats;
  for (const auto& t : per_action) mats.push_back(make_rate_matrix(dim, t));
  return ControlledGenerator(std::move(mats));
}

AugmentedGenerator ProblemInstance::augmented() const { return AugmentedGenerator(base, cost, discount, y_grid); }

StateLayout ProblemInstance::layout() const {
  return StateLayout{x_values, y_grid.points, action_values, t_grid.points, terminal_cost};
}

Eigen::VectorXd ProblemInstance::terminal_total_cost() const {
  const std::size_t ny = y_grid.n;
  Eigen::VectorXd v(static_cast<Eigen::Index>(x_values.size() * ny));
  for (std::size_t x = 0; x < x_values.size(); ++x) {
    for (std::size_t j = 0; j < ny; ++j) {
      v(static_cast<Eigen::Index>(x * ny + j)) = y_grid.points[j] + (terminal_cost.empty() ? 0.0 : terminal_cost[x]);
    }
  }
  return v;
}

ProblemInstance build_instance(const ProblemSpec& spec, const std::filesystem::path& base_dir) {
  ProblemInstance inst;
  inst.y_grid = build_uniform_grid(0.0, spec.effective_y_max(), spec.n_y);
  inst.t_grid = build_uniform_grid(0.0, spec.horizon, spec.n_t);
  inst.discount = spec.alpha;
  inst.terminal_cost = spec.terminal_cost;
  inst.sampling = spec.discount_sampling;

  std::size_t nx = 0;
  if (spec.family == Family::circle_follower) {
    const CircleGrid xg = build_circle_grid(spec.n_x);
    const UniformGrid ag = spec.n_a == 1 ? UniformGrid{spec.a_min, spec.a_min, 1, 0.0, {spec.a_min}}
                                         : build_uniform_grid(spec.a_min, spec.a_max, spec.n_a);
    nx = xg.n;
    inst.x_values = xg.points;
    inst.action_values = ag.points;
    std::vector<RateMatrix> per_action;
    inst.cost.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ag.n));
    for (std::size_t a = 0; a < ag.n; ++a) {
      per_action.push_back(discretize_circle_diffusion(xg, ag.points[a], spec.sigma));
      for (std::size_t i = 0; i < nx; ++i) {
        const double c = 1.0 - std::cos(xg.points[i]) + spec.gamma * ag.points[a] * ag.points[a];
        inst.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = spec.cost_scale * c;
      }
    }
    inst.base = ControlledGenerator(std::move(per_action));
  } else {
    std::filesystem::path file = spec.generator_file;
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    inst.base = load_generator_triplets(file);
    nx = inst.base.dim();
    const std::size_t na = inst.base.num_actions();
    for (std::size_t i = 0; i < nx; ++i) inst.x_values.push_back(static_cast<double>(i));
    for (std::size_t a = 0; a < na; ++a) inst.action_values.push_back(static_cast<double>(a));
    inst.cost = CostTable::Zero(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(na));
    if (!spec.cost_rate.empty()) {
      if (spec.cost_rate.size() != nx) throw ConfigError("config key 'cost_rate': needs one row per state");
      for (std::size_t i = 0; i < nx; ++i) {
        if (spec.cost_rate[i].size() != na) throw ConfigError("config key 'cost_rate': needs one column per action");
        for (std::size_t a = 0; a < na; ++a) {
          inst.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = spec.cost_scale * spec.cost_rate[i][a];
        }
      }
    }
    if (spec.initial_state >= nx) throw ConfigError("config key 'initial_state': outside the state space");
    if (!spec.initial_weights.empty() && spec.initial_weights.size() != nx) {
      throw ConfigError("config key 'initial_weights': must have one entry per state");
    }
    if (!spec.terminal_cost.empty() && spec.terminal_cost.size() != nx) {
      throw ConfigError("config key 'terminal_cost': must have one entry per state");
    }
  }
  for (std::size_t a = 0; a < inst.base.num_actions(); ++a) {
    if (!validate_generator(inst.base.at(0, a)).valid) {
      throw ConfigError("generator for action " + std::to_string(a) + " is not a valid rate matrix");
    }
  }

  inst.nu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx));
  if (spec.initial_weights.empty()) {
    inst.nu(static_cast<Eigen::Index>(spec.initial_state)) = 1.0;
  } else {
    for (std::size_t i = 0; i < nx; ++i) inst.nu(static_cast<Eigen::Index>(i)) = spec.initial_weights[i];
    const double total = inst.nu.sum();
    if (!(total > 0.0)) throw ConfigError("config key 'initial_weights': must have positive total");
    inst.nu /= total;
  }

  inst.product = inst.augmented().assemble(inst.t_grid, inst.sampling);
  inst.initial = augmented_initial(inst.nu, inst.y_grid.n);
  return inst;
}

SolveOptions solve_options(const ProblemSpec& spec) {
  SolveOptions o;
  o.lp.tol_gap = spec.solver.tol_gap;
  o.lp.tol_feas = spec.solver.tol_feas;
  o.lp.max_iter = spec.solver.max_iter;
  o.max_fw_iter = spec.solver.fw_max_iter;
  o.fw_tol = spec.solver.fw_tol;
  return o;
}

}  // namespace riskflow
