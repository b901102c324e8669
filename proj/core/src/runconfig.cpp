#include "spsolve/runconfig.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace spsolve {

SolveMode parse_mode(const std::string& name) {
  if (name == "groundstate") return SolveMode::groundstate;
  if (name == "continuation") return SolveMode::continuation;
  if (name == "mountain_pass") return SolveMode::mountain_pass;
  if (name == "excited") return SolveMode::excited;
  if (name == "nonexistence") return SolveMode::nonexistence;
  if (name == "verify") return SolveMode::verify;
  throw std::invalid_argument("unknown solver mode '" + name + "'");
}

std::string mode_name(SolveMode mode) {
  switch (mode) {
  case SolveMode::groundstate: return "groundstate";
  case SolveMode::continuation: return "continuation";
  case SolveMode::mountain_pass: return "mountain_pass";
  case SolveMode::excited: return "excited";
  case SolveMode::nonexistence: return "nonexistence";
  case SolveMode::verify: return "verify";
  }
  return "?";
}

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>,
                           std::vector<std::string>>;
using Tree = std::map<std::string, std::map<std::string, Value>>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

Value parse_scalar(const std::string& tok, const std::string& key) {
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
    return tok.substr(1, tok.size() - 2);
  if (tok == "true")
    return true;
  if (tok == "false")
    return false;
  try {
    std::size_t used = 0;
    const double d = std::stod(tok, &used);
    if (used != tok.size())
      throw std::runtime_error("");
    return d;
  } catch (...) {
    throw std::runtime_error("config: cannot parse value '" + tok + "' for key '" + key + "'");
  }
}

Value parse_value(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s.empty())
    throw std::runtime_error("config: empty value for key '" + key + "'");
  if (s.front() == '[') {
    if (s.back() != ']')
      throw std::runtime_error("config: unterminated array for key '" + key + "'");
    std::vector<double> nums;
    std::vector<std::string> strs;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty())
        continue;
      Value v = parse_scalar(item, key);
      if (std::holds_alternative<double>(v))
        nums.push_back(std::get<double>(v));
      else if (std::holds_alternative<std::string>(v))
        strs.push_back(std::get<std::string>(v));
      else
        throw std::runtime_error("config: unsupported array element for key '" + key + "'");
    }
    if (!strs.empty() && !nums.empty())
      throw std::runtime_error("config: mixed array for key '" + key + "'");
    if (!strs.empty())
      return strs;
    return nums;
  }
  return parse_scalar(s, key);
}

Tree parse_toml_subset(const std::string& text) {
  Tree tree;
  std::string section = "";
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config: malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    tree[section][key] = parse_value(line.substr(eq + 1), key);
  }
  return tree;
}

Tree parse_json_tree(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Tree tree;
  for (auto sec = j.begin(); sec != j.end(); ++sec) {
    if (!sec.value().is_object())
      throw std::runtime_error("config: JSON top level must be an object of sections");
    for (auto kv = sec.value().begin(); kv != sec.value().end(); ++kv) {
      const auto& v = kv.value();
      if (v.is_number())
        tree[sec.key()][kv.key()] = v.get<double>();
      else if (v.is_boolean())
        tree[sec.key()][kv.key()] = v.get<bool>();
      else if (v.is_string())
        tree[sec.key()][kv.key()] = v.get<std::string>();
      else if (v.is_array()) {
        if (!v.empty() && v.front().is_string())
          tree[sec.key()][kv.key()] = v.get<std::vector<std::string>>();
        else
          tree[sec.key()][kv.key()] = v.get<std::vector<double>>();
      } else {
        throw std::runtime_error("config: unsupported JSON value for key '" + kv.key() + "'");
      }
    }
  }
  return tree;
}

class TreeReader {
public:
  explicit TreeReader(const Tree& t) : tree_(t) {}

  template <typename T>
  void get(const std::string& sec, const std::string& key, T& out) const {
    const auto s = tree_.find(sec);
    if (s == tree_.end())
      return;
    const auto k = s->second.find(key);
    if (k == s->second.end())
      return;
    if (!std::holds_alternative<T>(k->second))
      throw std::runtime_error("config: wrong type for '" + sec + "." + key + "'");
    out = std::get<T>(k->second);
  }

  void get_size(const std::string& sec, const std::string& key, std::size_t& out) const {
    double d = -1.0;
    get(sec, key, d);
    if (d >= 0.0)
      out = static_cast<std::size_t>(std::llround(d));
  }

  void get_opt(const std::string& sec, const std::string& key,
               std::optional<double>& out) const {
    double d = std::numeric_limits<double>::quiet_NaN();
    get(sec, key, d);
    if (!std::isnan(d))
      out = d;
  }

private:
  const Tree& tree_;
};

WeightModel weight_from_tree(const TreeReader& r) {
  std::string kind = "constant";
  r.get("weight", "kind", kind);
  double c = 1.0, kbar = 1.0, amplitude = 1.0, power = 2.0, offset = 0.0,
         r0 = 1.0, rho_inf = 1.0;
  std::optional<double> mbar;
  r.get("weight", "c", c);
  r.get("weight", "kbar", kbar);
  r.get("weight", "amplitude", amplitude);
  r.get("weight", "power", power);
  r.get("weight", "offset", offset);
  r.get("weight", "r0", r0);
  r.get("weight", "rho_inf", rho_inf);
  r.get_opt("weight", "mbar", mbar);

  if (kind == "constant")
    return WeightModel::make_constant(c);
  if (kind == "homogeneous")
    return WeightModel::make_homogeneous(kbar, amplitude);
  if (kind == "coercive")
    return WeightModel::make_coercive(amplitude, power, offset);
  if (kind == "vanishing_ball")
    return WeightModel::make_vanishing_ball(r0, rho_inf, mbar);
  throw std::invalid_argument("config: unknown weight kind '" + kind + "'");
}

} // namespace

RunConfig parse_config_text(const std::string& text, bool as_json) {
  const Tree tree = as_json ? parse_json_tree(text) : parse_toml_subset(text);
  TreeReader r(tree);

  RunConfig cfg;
  double dim = 3;
  r.get("problem", "dim", dim);
  cfg.problem.dim = static_cast<int>(std::llround(dim));
  r.get("problem", "q", cfg.problem.q);
  r.get("problem", "lambda", cfg.problem.lambda);
  r.get("problem", "mu", cfg.problem.mu);
  r.get_opt("problem", "nu", cfg.problem.nu);
  r.get_opt("problem", "kbar", cfg.problem.kbar);
  r.get_opt("problem", "k", cfg.problem.k);
  r.get("problem", "mu_ladder", cfg.mu_ladder);

  cfg.weight = weight_from_tree(r);

  r.get("grid", "r_max", cfg.r_max);
  r.get_size("grid", "n", cfg.n);
  std::string spacing = "uniform";
  r.get("grid", "spacing", spacing);
  if (spacing == "uniform")
    cfg.spacing = Spacing::uniform;
  else if (spacing == "graded")
    cfg.spacing = Spacing::graded;
  else
    throw std::invalid_argument("config: spacing must be 'uniform' or 'graded'");

  std::string mode = "groundstate";
  r.get("solver", "mode", mode);
  cfg.mode = parse_mode(mode);
  r.get("solver", "grad_tol", cfg.solver.grad_tol);
  r.get("solver", "constraint_tol", cfg.solver.constraint_tol);
  r.get_size("solver", "max_iters", cfg.solver.max_iters);
  r.get_size("solver", "nodes", cfg.nodes);
  r.get_size("solver", "path_nodes", cfg.path_nodes);
  r.get_size("solver", "sweeps", cfg.sweeps);

  r.get("init", "kind", cfg.init_kind);
  r.get("init", "amplitude", cfg.init_amplitude);
  r.get("init", "width", cfg.init_width);
  double seed = -1.0;
  r.get("init", "seed", seed);
  if (seed >= 0.0)
    cfg.seed = static_cast<unsigned>(seed);

  r.get("output", "directory", cfg.out_directory);
  r.get("output", "formats", cfg.formats);

  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const bool as_json =
      path.size() > 5 && path.substr(path.size() - 5) == ".json";
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  const bool sniff_json = first != std::string::npos && text[first] == '{';
  return parse_config_text(text, as_json || sniff_json);
}

void validate_config(const RunConfig& cfg) {
  const Params& p = cfg.problem;
  if (p.dim < 3 || p.dim > 5)
    throw std::invalid_argument("config: dim must be 3, 4 or 5 (the equation "
                                "is posed for N = 3,4,5)");
  const double qc1 = critical_exponent(p.dim) - 1.0;
  if (!(p.q > 1.0) || p.q > qc1 + 1e-12)
    throw std::invalid_argument("config: q must lie in (1, 2*-1]");
  if (p.lambda < 0.0)
    throw std::invalid_argument("config: lambda must be nonnegative");
  if (p.mu < 0.5 - 1e-12 || p.mu > 1.0 + 1e-12)
    throw std::invalid_argument("config: mu must lie in [1/2, 1]");
  if (!(cfg.r_max > 0.0) || cfg.n < 16)
    throw std::invalid_argument("config: grid needs r_max > 0 and n >= 16");

  if (p.nu && p.kbar && !nu_admissible(p.dim, p.q, *p.nu, *p.kbar))
    throw std::invalid_argument(
        "config: nu violates nu > max{N/2, 2/(q-1)} with kbar in "
        "((nu(3-q)-2)/2, (4nu-N-2)/2)");

  if (cfg.mode == SolveMode::continuation) {
    if (!(p.q > 2.0) || !(p.q < 3.0))
      throw std::invalid_argument("config: continuation requires q in (2, 3)");
    for (std::size_t i = 0; i < cfg.mu_ladder.size(); ++i)
      if (cfg.mu_ladder[i] < 0.5 || cfg.mu_ladder[i] > 1.0 ||
          (i > 0 && cfg.mu_ladder[i] <= cfg.mu_ladder[i - 1]))
        throw std::invalid_argument(
            "config: mu_ladder must increase within [1/2, 1]");
  }
  if (cfg.mode == SolveMode::nonexistence) {
    if (!(p.q > 1.0) || p.q > 2.0)
      throw std::invalid_argument("config: nonexistence flow requires q in (1, 2]");
    if (p.lambda < 0.5)
      throw std::invalid_argument("config: nonexistence flow requires lambda >= 1/2");
    for (double r : {0.0, 0.5 * cfg.r_max, cfg.r_max})
      if (eval_weight(cfg.weight, r) < 1.0)
        throw std::invalid_argument(
            "config: nonexistence flow requires rho >= 1 on the grid");
  }
  if (cfg.init_kind != "gaussian" && cfg.init_kind != "random")
    throw std::invalid_argument("config: init kind must be 'gaussian' or 'random'");
  for (const auto& f : cfg.formats)
    if (f != "csv" && f != "json" && f != "svg")
      throw std::invalid_argument("config: output formats are csv, json, svg");
}

} // namespace spsolve
