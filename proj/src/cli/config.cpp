#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "abnormal/cli.hpp"
#include "abnormal/errors.hpp"

namespace abnormal {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

using Items = std::map<std::string, std::vector<std::string>>;

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: " + s);
  }
}

double one_double(const std::string& key, const std::vector<std::string>& v) {
  if (v.size() != 1) throw ConfigError("key '" + key + "' expects one value");
  return to_double(key, v[0]);
}

int one_int(const std::string& key, const std::vector<std::string>& v) {
  double d = one_double(key, v);
  if (d != static_cast<int>(d)) throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<int>(d);
}

std::string one_string(const std::string& key, const std::vector<std::string>& v) {
  if (v.size() != 1) throw ConfigError("key '" + key + "' expects one value");
  return v[0];
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    auto a = cur.find_first_not_of(" \t\r"), b = cur.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
  }
  return out;
}

// header t,b11,b12,...; missing entries are zero, lower entries mirror upper ones
CoefficientField load_table(const std::string& path, int r) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient table " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty coefficient table");
  auto head = split(line, ',');
  if (head.empty() || head[0] != "t") throw ConfigError("coefficient table must start with column t");
  std::vector<std::pair<int, int>> cols;
  for (std::size_t c = 1; c < head.size(); ++c) {
    const auto& h = head[c];
    if (h.size() != 3 || h[0] != 'b' || h[1] < '1' || h[2] < '1' || h[1] - '0' > r || h[2] - '0' > r)
      throw ConfigError("bad coefficient column " + h);
    cols.emplace_back(h[1] - '1', h[2] - '1');
  }
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> b;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = split(line, ',');
    if (f.size() != head.size()) throw ConfigError("coefficient table row has the wrong width");
    t.push_back(to_double("t", f[0]));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, r);
    std::vector<std::vector<bool>> set(r, std::vector<bool>(r, false));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto [i, j] = cols[c];
      m(i, j) = to_double(head[c + 1], f[c + 1]);
      set[i][j] = true;
    }
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        if (!set[i][j] && set[j][i]) m(i, j) = m(j, i);
    b.push_back(m);
  }
  return CoefficientField::table(std::move(t), std::move(b));
}

}  // namespace

ControlSystem SystemConfig::system() const {
  if (preset == "martinet") return presets::martinet(alpha, beta, gamma);
  if (preset == "martinet-flat") return presets::martinet_flat();
  if (preset == "const4") return presets::const4();
  if (preset == "chain-n3") return presets::chain_n3(chain_b);
  if (!preset.empty()) throw ConfigError("unknown preset " + preset);
  auto X = parse_field(split(X_text, ','), dimension, "X");
  auto Y = parse_field(split(Y_text, ','), dimension, "Y");
  return ControlSystem(X, Y, "user");
}

nlohmann::json SystemConfig::tolerances() const {
  return {{"assumption", assumption_tol},  {"conjugate_time", conjugate_tol},  {"radius_factor", radius_factor},
          {"trajectory_grid", traj_grid},  {"control_grid", control_grid},    {"operator_grid", operator_grid},
          {"sample_steps", sample_steps},  {"scan_points", scan_points}};
}

SystemConfig parse_config(const std::string& text, const std::string& base_dir) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> raw;
  try {
    raw = CLI::ConfigINI().from_config(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::map<std::string, Items> sec;
  for (const auto& it : raw) {
    if (it.name == "++" || it.name == "--") continue;
    std::string s = it.parents.empty() ? "" : it.parents.back();
    sec[s][it.name] = it.inputs;
  }
  static const std::map<std::string, std::vector<std::string>> known = {
      {"system", {"preset", "alpha", "beta", "gamma", "b", "dimension", "X", "Y", "x0"}},
      {"run", {"T", "T_max", "eta", "sr_alpha", "samples", "seed", "curve_case", "sector_eps", "scan_points"}},
      {"grids", {"trajectory", "control", "operator", "sample_steps"}},
      {"tolerances", {"assumption", "conjugate_time", "radius_factor"}},
      {"coefficients", {"table"}}};
  for (const auto& [s, items] : sec) {
    auto k = known.find(s);
    if (k == known.end()) throw ConfigError("unknown section [" + s + "]");
    for (const auto& [name, v] : items) {
      bool ok = std::find(k->second.begin(), k->second.end(), name) != k->second.end();
      if (s == "coefficients" && name.size() == 3 && name[0] == 'b') ok = true;
      if (!ok) throw ConfigError("unknown key '" + name + "' in [" + s + "]");
    }
  }

  SystemConfig c;
  c.text = text;
  Items& sys = sec["system"];
  auto get = [](Items& m, const char* k) -> const std::vector<std::string>* {
    auto it = m.find(k);
    return it == m.end() ? nullptr : &it->second;
  };
  bool has_expr = get(sys, "X") || get(sys, "Y");
  if (auto v = get(sys, "preset")) c.preset = one_string("preset", *v);
  if (c.preset.empty() == !has_expr) throw ConfigError("give exactly one of a preset or X/Y expressions");
  if (auto v = get(sys, "alpha")) c.alpha = one_double("alpha", *v);
  if (auto v = get(sys, "beta")) c.beta = one_double("beta", *v);
  if (auto v = get(sys, "gamma")) c.gamma = one_double("gamma", *v);
  if (auto v = get(sys, "b")) c.chain_b = one_double("b", *v);
  if (has_expr) {
    if (!get(sys, "X") || !get(sys, "Y")) throw ConfigError("both X and Y are required");
    auto d = get(sys, "dimension");
    if (!d) throw ConfigError("dimension is required with expressions");
    c.dimension = one_int("dimension", *d);
    if (c.dimension < 3) throw ConfigError("dimension must be at least 3");
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
      return s;
    };
    c.X_text = join(*get(sys, "X"));
    c.Y_text = join(*get(sys, "Y"));
  }
  const int n = c.system().dimension();
  c.dimension = n;
  c.x0 = Eigen::VectorXd::Zero(n);
  if (auto v = get(sys, "x0")) {
    if (static_cast<int>(v->size()) != n) throw ConfigError("x0 needs " + std::to_string(n) + " values");
    for (int i = 0; i < n; ++i) c.x0[i] = to_double("x0", (*v)[i]);
  }

  Items& run = sec["run"];
  if (auto v = get(run, "T")) c.T = one_double("T", *v);
  if (auto v = get(run, "T_max")) c.T_max = one_double("T_max", *v);
  if (auto v = get(run, "eta")) c.eta = one_double("eta", *v);
  if (auto v = get(run, "sr_alpha")) c.sr_alpha = one_double("sr_alpha", *v);
  if (auto v = get(run, "samples")) c.samples = one_int("samples", *v);
  if (auto v = get(run, "seed")) c.seed = static_cast<std::uint64_t>(one_double("seed", *v));
  if (auto v = get(run, "curve_case")) c.curve_case = one_string("curve_case", *v);
  if (auto v = get(run, "scan_points")) c.scan_points = one_int("scan_points", *v);
  if (auto v = get(run, "sector_eps")) {
    c.sector_eps.clear();
    for (const auto& s : *v) c.sector_eps.push_back(to_double("sector_eps", s));
  }
  Items& g = sec["grids"];
  if (auto v = get(g, "trajectory")) c.traj_grid = one_int("trajectory", *v);
  if (auto v = get(g, "control")) c.control_grid = one_int("control", *v);
  if (auto v = get(g, "operator")) c.operator_grid = one_int("operator", *v);
  if (auto v = get(g, "sample_steps")) c.sample_steps = one_int("sample_steps", *v);
  Items& tol = sec["tolerances"];
  if (auto v = get(tol, "assumption")) c.assumption_tol = one_double("assumption", *v);
  if (auto v = get(tol, "conjugate_time")) c.conjugate_tol = one_double("conjugate_time", *v);
  if (auto v = get(tol, "radius_factor")) c.radius_factor = one_double("radius_factor", *v);

  if (!(c.T > 0) || !(c.T_max > 0)) throw ConfigError("horizons must be positive");
  if (!(c.assumption_tol > 0) || !(c.conjugate_tol > 0) || !(c.radius_factor > 0))
    throw ConfigError("tolerances must be positive");
  if (c.traj_grid < 1 || c.control_grid < 1 || c.operator_grid < 1 || c.sample_steps < 1 || c.samples < 1 ||
      c.scan_points < 2)
    throw ConfigError("grid sizes and counts must be positive");
  if (c.curve_case != "AFFINE" && c.curve_case != "SR") throw ConfigError("curve_case must be AFFINE or SR");

  // coefficients: presets that fix them, else an optional section
  const int r = n - 2;
  Items& co = sec["coefficients"];
  if (c.preset == "const4" || c.preset == "chain-n3") {
    if (!co.empty()) throw ConfigError("preset " + c.preset + " already fixes the coefficients");
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(r, r);
    if (c.preset == "const4") b << -1, 0, 0, 1;
    else b(0, 0) = c.chain_b;
    c.coefficients = CoefficientField::constant(b);
    c.coefficient_source = "preset";
  } else if (auto v = get(co, "table")) {
    if (co.size() != 1) throw ConfigError("give either a coefficient table or constants, not both");
    std::filesystem::path p(one_string("table", *v));
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.coefficients = load_table(p.string(), r);
    c.coefficient_source = "table";
  } else if (!co.empty()) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(r, r);
    Eigen::MatrixXi set = Eigen::MatrixXi::Zero(r, r);
    for (const auto& [name, v] : co) {
      int i = name[1] - '1', j = name[2] - '1';
      if (i < 0 || j < 0 || i >= r || j >= r) throw ConfigError("coefficient " + name + " out of range");
      b(i, j) = one_double(name, v);
      set(i, j) = 1;
    }
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        if (!set(i, j) && set(j, i)) b(i, j) = b(j, i);
    c.coefficients = CoefficientField::constant(b);
    c.coefficient_source = "constants";
  }
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace abnormal
