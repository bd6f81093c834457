#include "wetsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wetsim/experiments.hpp"

namespace wetsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int parse_int(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": expected integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": expected number, got '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& where) {
  std::vector<int> out;
  for (const auto& item : split(v, ','))
    if (!item.empty()) out.push_back(parse_int(item, where));
  return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& item : split(v, ','))
    if (!item.empty()) out.push_back(parse_double(item, where));
  return out;
}

// Every known key maps to a setter; anything else is rejected.
void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value, const std::string& where) {
  const std::string full = section + "." + key;
  if (full == "system.K") cfg.system.K = parse_int(value, where);
  else if (full == "system.N") cfg.system.N = parse_int(value, where);
  else if (full == "system.P") cfg.system.P = parse_double(value, where);
  else if (full == "system.xi") cfg.system.xi = parse_double(value, where);
  else if (full == "system.snr_db") cfg.system.snr_db = parse_double(value, where);
  else if (full == "system.seed") cfg.system.rng_seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (full == "training.L") cfg.L = parse_int(value, where);
  else if (full == "training.L_grid") cfg.L_grid = parse_int_list(value, where);
  else if (full == "sweep.trials") cfg.trials = parse_int(value, where);
  else if (full == "sweep.Q_grid") cfg.Q_grid = parse_int_list(value, where);
  else if (full == "sweep.N_grid") cfg.N_grid = parse_int_list(value, where);
  else if (full == "sweep.K_grid") cfg.K_grid = parse_int_list(value, where);
  else if (full == "epsilon.mode") cfg.epsilon_mode = value;
  else if (full == "epsilon.percentile") cfg.epsilon_percentile = parse_double(value, where);
  else if (full == "epsilon.value") cfg.epsilon_value = parse_double(value, where);
  else if (full == "cluster.Q") cfg.cluster_Q = parse_int(value, where);
  else if (full == "cluster.phases") cfg.cluster_phases = parse_double_list(value, where);
  else if (full == "output.dir") cfg.output_dir = value;
  else if (full == "run.workers") cfg.workers = parse_int(value, where);
  else throw ConfigError(where + ": unknown key '" + full + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section = "system";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    set_key(cfg, section, key, value, where);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string full = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = full.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  set_key(cfg, full.substr(0, dot), full.substr(dot + 1), value, "override '" + assignment + "'");
  cfg.validate();
}

void RunConfig::validate() const {
  system.validate();
  for (int l : effective_L_grid())
    if (l < 3) throw ConfigError("training.L: insufficient training length (L must be >= 3)");
  if (trials < 1) throw ConfigError("sweep.trials must be >= 1");
  for (int q : Q_grid)
    if (q < 1) throw ConfigError("sweep.Q_grid entries must be >= 1");
  for (int n : effective_N_grid())
    if (n < 1) throw ConfigError("sweep.N_grid entries must be >= 1");
  for (int k : effective_K_grid())
    if (k < 2) throw ConfigError("sweep.K_grid entries must be >= 2");
  if (epsilon_mode != "calibrated" && epsilon_mode != "fixed")
    throw ConfigError("epsilon.mode must be 'calibrated' or 'fixed'");
  if (!(epsilon_percentile > 0.0 && epsilon_percentile <= 100.0))
    throw ConfigError("epsilon.percentile must be in (0, 100]");
  if (epsilon_value < 0.0) throw ConfigError("epsilon.value must be >= 0");
  if (cluster_Q < 1) throw ConfigError("cluster.Q must be >= 1");
  if (workers < 0) throw ConfigError("run.workers must be >= 0");
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  const auto ints = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  out << "[system]\nK = " << system.K << "\nN = " << system.N << "\nP = " << num(system.P)
      << "\nxi = " << num(system.xi) << "\nsnr_db = " << num(system.snr_db)
      << "\nseed = " << system.rng_seed << "\n[training]\nL = " << L
      << "\nL_grid = " << ints(L_grid) << "\n[sweep]\ntrials = " << trials
      << "\nQ_grid = " << ints(Q_grid) << "\nN_grid = " << ints(N_grid)
      << "\nK_grid = " << ints(K_grid) << "\n[epsilon]\nmode = " << epsilon_mode
      << "\npercentile = " << num(epsilon_percentile) << "\nvalue = " << num(epsilon_value)
      << "\n[cluster]\nQ = " << cluster_Q << "\nphases =";
  for (double p : cluster_phases) out << " " << num(p);
  out << "\n[run]\nworkers = " << workers << "\n";
  // output.dir deliberately excluded: moving artifacts must not rename them
  return out.str();
}

std::string RunConfig::hash() const {
  const std::string c = canonical();
  const std::uint64_t h = fnv1a(1469598103934665603ull, c.data(), c.size());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16).substr(0, 12);
}

}  // namespace wetsim
