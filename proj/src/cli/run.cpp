#include <filesystem>
#include <fstream>
#include <ostream>

#include "abnormal/boundary.hpp"
#include "abnormal/cli.hpp"
#include "abnormal/errors.hpp"
#include "abnormal/jsonio.hpp"
#include "abnormal/reachset.hpp"
#include "abnormal/secondvar.hpp"

namespace abnormal {

const std::vector<std::string> kCommands = {"check-assumptions", "conjugate-times", "boundary", "sample",
                                            "sector-demo",       "classify",        "all"};

namespace {

struct AssumptionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json time_json(const ConjugateTimeResult& r) {
  return r.found() ? nlohmann::json(r.value()) : nlohmann::json("none");
}

double time_value(const ConjugateTimeResult& r) { return r.found() ? r.value() : INFINITY; }

class Runner {
 public:
  Runner(const SystemConfig& cfg, std::string out, int threads)
      : cfg_(cfg), sys_(cfg.system()), out_(std::move(out)), threads_(threads) {}

  nlohmann::json& report() { return report_; }

  void gate() {
    if (gated_) return;
    auto tr = reference_trajectory(sys_, cfg_.x0, cfg_.T, cfg_.traj_grid);
    auto rep = check_assumptions(tr, sys_, cfg_.assumption_tol);
    report_["assumptions"] = rep.to_json();
    if (!rep.all_pass()) throw AssumptionFailure("assumption " + rep.first_failure() + " fails on [0, T]");
    traj_ = adjoint_along(tr, sys_);
    gated_ = true;
  }

  void check_assumptions_cmd() { gate(); }

  SecondVarOptions sv_options() const {
    SecondVarOptions o;
    o.intervals = cfg_.control_grid;
    o.traj_grid = cfg_.traj_grid;
    o.prescan = cfg_.scan_points;
    o.assumption_tol = cfg_.assumption_tol;
    return o;
  }

  void conjugate_times() {
    gate();
    if (done_conj_) return;
    auto o = sv_options();
    free_ = conjugate_time_search(sys_, cfg_.x0, RestrictionMode::kFree, cfg_.T_max, cfg_.conjugate_tol, o);
    fixed_ = conjugate_time_search(sys_, cfg_.x0, RestrictionMode::kFixed, cfg_.T_max, cfg_.conjugate_tol, o);
    nlohmann::json j;
    j["t_cc"] = time_json(free_);
    j["t_c"] = time_json(fixed_);
    j["scan_max"] = cfg_.T_max;
    j["control_route"] = {{"FREE", free_.to_json()}, {"FIXED", fixed_.to_json()}};
    double min_free = INFINITY;
    for (const auto& [T, l] : free_.scan) min_free = std::min(min_free, l);
    j["free_scan_min"] = min_free;
    j["free_scan_points"] = free_.scan.size();
    std::ofstream csv(out_ + "/spectrum.csv");
    csv << "route,mode,T,lambda\n";
    auto rows = [&](const char* route, const ConjugateTimeResult& r) {
      char buf[96];
      for (const auto& [T, l] : r.scan) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g\n", route, r.mode.c_str(), T, l);
        csv << buf;
      }
    };
    rows("control", free_);
    rows("control", fixed_);
    if (cfg_.coefficients) {
      op_free_ = operator_conjugate_time(*cfg_.coefficients, OperatorKind::kD2, cfg_.T_max, cfg_.conjugate_tol,
                                         cfg_.operator_grid, cfg_.scan_points);
      op_fixed_ = operator_conjugate_time(*cfg_.coefficients, OperatorKind::kD1, cfg_.T_max, cfg_.conjugate_tol,
                                          cfg_.operator_grid, cfg_.scan_points);
      j["operator_route"] = {{"D2", op_free_.to_json()},
                             {"D1", op_fixed_.to_json()},
                             {"t_cc", time_json(op_free_)},
                             {"t_c", time_json(op_fixed_)}};
      auto gap = [](const ConjugateTimeResult& a, const ConjugateTimeResult& b) -> nlohmann::json {
        if (a.found() != b.found()) return "mismatch";
        return a.found() ? nlohmann::json(std::abs(a.value() - b.value())) : nlohmann::json(0.0);
      };
      j["route_gap"] = {{"t_cc", gap(free_, op_free_)}, {"t_c", gap(fixed_, op_fixed_)}};
      rows("operator", op_free_);
      rows("operator", op_fixed_);
    }
    report_["conjugate_times"] = j;
    done_conj_ = true;
  }

  void boundary() {
    gate();
    auto q = hessian_form(traj_, sys_, cfg_.control_grid);
    nlohmann::json j;
    j["T"] = cfg_.T;
    const double direct = direct_contact_coefficient(q);
    j["A_T_direct"] = direct;
    std::optional<CoefficientField> field = cfg_.coefficients;
    std::string source = cfg_.coefficient_source;
    if (!field && sys_.dimension() == 3) {
      double b = calibrate_coefficient(q, contact_minimizer(q));
      field = CoefficientField::constant(Eigen::MatrixXd::Constant(1, 1, b));
      source = "calibrated";
      j["calibrated_b"] = b;
    }
    j["coefficient_source"] = source;
    double A = direct;
    if (field) {
      auto sol = solve_kernel_bvp(*field, cfg_.T, contact_data(*field), cfg_.operator_grid);
      A = sol.energy;
      j["A_T"] = A;
      j["bvp_residual"] = sol.residual;
      Eigen::MatrixXd G = gram_matrix(*field, cfg_.T, cfg_.operator_grid);
      nlohmann::json g = nlohmann::json::array();
      for (int i = 0; i < G.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < G.cols(); ++k) row.push_back(G(i, k));
        g.push_back(row);
      }
      j["gram"] = g;
      auto tcc = operator_conjugate_time(*field, OperatorKind::kD2, cfg_.T_max, cfg_.conjugate_tol,
                                         cfg_.operator_grid, cfg_.scan_points);
      j["t_cc"] = time_json(tcc);
      j["expected_sign"] = cfg_.T < time_value(tcc) ? "positive" : "negative";
    } else {
      j["A_T"] = direct;
      j["A_T_route"] = "direct";
    }
    j["sign"] = A > 0 ? "positive" : (A < 0 ? "negative" : "zero");
    if (cfg_.preset == "martinet") {
      auto m = martinet_closed_form(cfg_.alpha, cfg_.T);
      j["closed_form"] = {{"A_T", m.A_T},
                          {"abs_error", std::abs(A - m.A_T)},
                          {"branch2", m.branch2},
                          {"branch2_exponent", m.branch2_exponent},
                          {"branch2_coefficient", m.branch2_coefficient}};
    }
    const double w = cfg_.radius_factor * cfg_.T;
    auto curve = boundary_curve(A, cfg_.T, cfg_.T - w, cfg_.T + w,
                                cfg_.curve_case == "SR" ? CurveCase::kSR : CurveCase::kAffine);
    std::ofstream csv(out_ + "/curve.csv");
    curve.write_csv(csv);
    j["curve"] = curve.metadata();
    report_["boundary"] = j;
    contact_ = A;
  }

  void sample() {
    gate();
    auto frame = adapted_frame(traj_, sys_);
    SamplerOptions o;
    o.steps = cfg_.sample_steps;
    o.threads = threads_;
    const double radius = cfg_.radius_factor * cfg_.T;
    auto aff = sample_affine(sys_, cfg_.x0, cfg_.T, cfg_.eta, cfg_.samples, cfg_.seed, o);
    auto sr = sample_sr(sys_, cfg_.x0, cfg_.T, cfg_.sr_alpha, cfg_.samples, cfg_.seed + 1, o);
    auto pa = adapted_projection(aff, frame), ps = adapted_projection(sr, frame);
    std::ofstream csv(out_ + "/cloud.csv");
    write_cloud_csv(csv, aff, pa, true);
    write_cloud_csv(csv, sr, ps, false);

    nlohmann::json j;
    auto positivity = [&](const std::vector<AdaptedPoint>& pts) {
      int inside = 0;
      double worst = INFINITY;
      for (const auto& p : pts)
        if (p.radius <= radius) {
          ++inside;
          worst = std::min(worst, p.xn);
        }
      return nlohmann::json{{"inside", inside}, {"min_xn", inside ? nlohmann::json(worst) : nlohmann::json(nullptr)}};
    };
    j["radius"] = radius;
    j["affine"] = {{"N", aff.size()},
                   {"eta", cfg_.eta},
                   {"kernel_family", aff.kernel_family},
                   {"positivity", positivity(pa)}};
    j["sr"] = {{"N", sr.size()},
               {"alpha", cfg_.sr_alpha},
               {"kernel_family", sr.kernel_family},
               {"positivity", positivity(ps)},
               {"reparam_checked", sr.reparam_checked},
               {"reparam_max_error", sr.reparam_max_error},
               {"reparam_max_w", sr.reparam_max_w},
               {"reparam_w_bound", cfg_.sr_alpha / (1 - cfg_.sr_alpha)},
               {"reparam_max_s", sr.reparam_max_s}};
    // right branch inside |x1 - T| <= eta^2, honoring x1 - T = o(eta)
    const double outer = cfg_.eta * cfg_.eta;
    try {
      auto env = empirical_envelope(pa, cfg_.T, Side::kRight, 10, outer / 20, outer, radius);
      j["affine"]["right_fit"] = fit_contact(env).to_json();
    } catch (const NumericalError& e) {
      j["affine"]["right_fit"] = {{"error", e.what()}};
    }
    try {
      auto env = empirical_envelope(ps, cfg_.T, Side::kLeft, 10, radius / 20, radius, radius);
      double mx = 0;
      for (double v : env.raw_min) mx = std::max(mx, std::abs(v));
      j["sr"]["left_envelope_max_abs"] = mx;
      j["sr"]["left_envelope_bins"] = env.raw_min.size();
    } catch (const NumericalError& e) {
      j["sr"]["left_envelope_max_abs"] = {{"error", e.what()}};
    }
    report_["sample"] = j;
  }

  void sector_demo() {
    gate();
    auto frame = adapted_frame(traj_, sys_);
    auto sw = sector_sweep(sys_, frame, cfg_.T, cfg_.sector_eps);
    report_["sector"] = sw.to_json();
  }

  void classify() {
    gate();
    double tcc, tc;
    std::string route;
    if (cfg_.coefficients) {
      tcc = time_value(operator_conjugate_time(*cfg_.coefficients, OperatorKind::kD2, cfg_.T_max,
                                               cfg_.conjugate_tol, cfg_.operator_grid, cfg_.scan_points));
      tc = time_value(operator_conjugate_time(*cfg_.coefficients, OperatorKind::kD1, cfg_.T_max, cfg_.conjugate_tol,
                                              cfg_.operator_grid, cfg_.scan_points));
      route = "operator";
    } else {
      conjugate_times();
      tcc = time_value(free_);
      tc = time_value(fixed_);
      route = "control";
    }
    auto tj = [&](double t) { return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json("none"); };
    report_["classify"] = {{"T", cfg_.T},
                           {"t_cc", tj(tcc)},
                           {"t_c", tj(tc)},
                           {"route", route},
                           {"scan_max", cfg_.T_max},
                           {"time_minimal", cfg_.T < tcc},
                           {"fixed_time_cost_minimal", cfg_.T < tc},
                           {"sr_c0_optimal", cfg_.T < tcc}};
  }

 private:
  const SystemConfig& cfg_;
  ControlSystem sys_;
  std::string out_;
  int threads_;
  nlohmann::json report_;
  bool gated_ = false, done_conj_ = false;
  TrajectoryData traj_;
  ConjugateTimeResult free_, fixed_, op_free_, op_fixed_;
  double contact_ = 0.0;
};

nlohmann::json header(const std::string& command, const SystemConfig& cfg) {
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = hex64(fnv1a(cfg.text));
  j["seed"] = cfg.seed;
  j["tolerances"] = cfg.tolerances();
  j["system"] = cfg.preset.empty() ? "user" : cfg.preset;
  j["dimension"] = cfg.dimension;
  return j;
}

void write_report(const std::string& dir, const nlohmann::json& j) {
  std::ofstream out(dir + "/report.json", std::ios::binary);
  out << dump_json(j) << "\n";
}

}  // namespace

nlohmann::json run_command(const std::string& command, const SystemConfig& cfg, const std::string& out_dir,
                           int threads) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ConfigError("unknown command " + command);
  std::filesystem::create_directories(out_dir);
  Runner r(cfg, out_dir, threads);
  try {
    if (command == "check-assumptions" || command == "all") r.check_assumptions_cmd();
    if (command == "conjugate-times" || command == "all") r.conjugate_times();
    if (command == "boundary" || command == "all") r.boundary();
    if (command == "sample" || command == "all") r.sample();
    if (command == "sector-demo" || command == "all") r.sector_demo();
    if (command == "classify" || command == "all") r.classify();
  } catch (const AssumptionFailure& e) {
    nlohmann::json j = header(command, cfg);
    j.update(r.report());
    j["status"] = "assumption_failure";
    j["error"] = e.what();
    throw std::make_pair(2, j);
  }
  nlohmann::json j = header(command, cfg);
  j.update(r.report());
  j["status"] = "ok";
  return j;
}

int run(const RunOptions& opt, std::ostream& log) {
  SystemConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    if (opt.seed_override) cfg.seed = *opt.seed_override;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  auto fail = [&](int code, const std::string& status, const std::string& msg) {
    nlohmann::json j = header(opt.command, cfg);
    j["status"] = status;
    j["error"] = msg;
    try {
      std::filesystem::create_directories(opt.out_dir);
      write_report(opt.out_dir, j);
    } catch (const std::exception&) {
    }
    log << status << ": " << msg << "\n";
    return code;
  };
  try {
    auto j = run_command(opt.command, cfg, opt.out_dir, opt.threads);
    write_report(opt.out_dir, j);
    log << "ok: " << opt.out_dir << "/report.json\n";
    return 0;
  } catch (const std::pair<int, nlohmann::json>& f) {
    write_report(opt.out_dir, f.second);
    log << "assumption failure: " << f.second["error"].get<std::string>() << "\n";
    return f.first;
  } catch (const AssumptionError& e) {
    return fail(2, "assumption_failure", e.what());
  } catch (const ConfigError& e) {
    return fail(1, "config_error", e.what());
  } catch (const ParseError& e) {
    return fail(1, "config_error", e.what());
  } catch (const std::exception& e) {
    return fail(1, "numerical_failure", e.what());
  }
}

}  // namespace abnormal
