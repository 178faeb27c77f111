#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abnormal/operators.hpp"
#include "abnormal/system.hpp"
#include "json.hpp"

namespace abnormal {

struct SystemConfig {
  std::string text;  // raw file, hashed into every report

  // exactly one of preset / (X, Y)
  std::string preset;  // martinet, martinet-flat, const4, chain-n3
  double alpha = 1.0, beta = 0.0, gamma = 0.0;
  double chain_b = 0.5;
  int dimension = 0;
  std::string X_text, Y_text;
  Eigen::VectorXd x0;

  double T = 1.0;
  double T_max = 10.0;
  double eta = 0.3;
  double sr_alpha = 0.3;
  int samples = 20000;
  std::uint64_t seed = 1;
  std::string curve_case = "AFFINE";
  std::vector<double> sector_eps{0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
  int scan_points = 32;

  int traj_grid = 16;
  int control_grid = 64;
  int operator_grid = 2000;
  int sample_steps = 512;

  double assumption_tol = 1e-7;
  double conjugate_tol = 1e-4;
  double radius_factor = 0.1;  // neighborhood radius / T

  std::optional<CoefficientField> coefficients;
  std::string coefficient_source = "none";

  ControlSystem system() const;
  nlohmann::json tolerances() const;
};

SystemConfig parse_config(const std::string& text, const std::string& base_dir = ".");
SystemConfig load_config(const std::string& path);
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
};

// writes report.json (+ csv artifacts) into out_dir; 0 ok, 2 assumption failure, 1 numerical or config failure
int run(const RunOptions& opt, std::ostream& log);
// same, in memory; throws on failure
nlohmann::json run_command(const std::string& command, const SystemConfig& cfg, const std::string& out_dir,
                           int threads);

extern const std::vector<std::string> kCommands;

}  // namespace abnormal
