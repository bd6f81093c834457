#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "wetsim/config.hpp"
#include "wetsim/experiments.hpp"
#include "wetsim/svg.hpp"

namespace fs = std::filesystem;
using namespace wetsim;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;  // --out override
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  cmd->add_option("-c,--config", args.config_path, "run configuration file")
      ->required(config_required);
  cmd->add_option("--set", args.overrides, "override a config key (section.key=value)");
  cmd->add_option("-o,--out", args.out_dir, "output directory");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  for (const auto& ov : args.overrides) apply_override(cfg, ov);
  if (!args.out_dir.empty()) {
    cfg.output_dir = args.out_dir;
  } else if (cfg.output_dir == ".") {
    if (const char* env = std::getenv("WETSIM_OUT_DIR"); env && *env) cfg.output_dir = env;
  }
  return cfg;
}

int effective_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::uint64_t file_content_hash(const std::string& text) {
  return fnv1a(1469598103934665603ull, text.data(), text.size());
}

void write_sidecar(const fs::path& path, const RunConfig& cfg,
                   const std::vector<std::pair<std::string, std::string>>& artifacts) {
  nlohmann::json j;
  j["config"] = cfg.canonical();
  j["config_hash"] = cfg.hash();
  j["seed"] = cfg.system.rng_seed;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& [name, content] : artifacts) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(file_content_hash(content)));
    j["artifacts"].push_back({{"file", name}, {"content_hash", std::string(buf)}});
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_estimate_sweep(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const auto rows = sweep_error_vs_feedback(cfg.system, cfg.effective_L_grid(), cfg.trials,
                                            effective_workers(cfg));
  fs::create_directories(cfg.output_dir);
  const std::string stem = "error_sweep_" + cfg.hash();

  std::ostringstream csv;
  write_error_sweep_csv(rows, csv);
  {
    std::ofstream out(fs::path(cfg.output_dir) / (stem + ".csv"), std::ios::binary);
    out << csv.str();
  }

  std::vector<double> x;
  SvgSeries phase{"phase error %", {}}, mag{"magnitude error %", {}},
      mrt{"MRT energy loss %", {}}, egt{"EGT energy loss %", {}};
  for (const auto& r : rows) {
    x.push_back(r.L);
    phase.y.push_back(r.phase_error_pct);
    mag.y.push_back(r.magnitude_error_pct);
    mrt.y.push_back(r.mrt_loss_pct);
    egt.y.push_back(r.egt_loss_pct);
  }
  std::ostringstream svg;
  write_line_chart(svg, "Estimation error vs feedback", "L", x, {phase, mag, mrt, egt});
  {
    std::ofstream out(fs::path(cfg.output_dir) / (stem + ".svg"), std::ios::binary);
    out << svg.str();
  }

  write_sidecar(fs::path(cfg.output_dir) / (stem + ".json"), cfg,
                {{stem + ".csv", csv.str()}, {stem + ".svg", svg.str()}});

  std::cout << "# resolved config (hash " << cfg.hash() << ")\n"
            << cfg.canonical() << "# wrote " << stem << ".{csv,svg,json} to " << cfg.output_dir
            << "\n";
  return 0;
}

int cmd_harvest_sweep(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const auto rows = sweep_harvest_vs_clusters(
      cfg.system, cfg.Q_grid, cfg.effective_N_grid(), cfg.effective_K_grid(), cfg.L, cfg.trials,
      cfg.fixed_epsilon(), cfg.epsilon_percentile, effective_workers(cfg));
  fs::create_directories(cfg.output_dir);
  const std::string stem = "harvest_sweep_" + cfg.hash();

  std::ostringstream csv;
  write_harvest_sweep_csv(rows, csv);
  {
    std::ofstream out(fs::path(cfg.output_dir) / (stem + ".csv"), std::ios::binary);
    out << csv.str();
  }
  write_sidecar(fs::path(cfg.output_dir) / (stem + ".json"), cfg, {{stem + ".csv", csv.str()}});

  std::cout << "# resolved config (hash " << cfg.hash() << ")\n"
            << cfg.canonical() << "# wrote " << stem << ".{csv,json} to " << cfg.output_dir
            << "\n";
  return 0;
}

int cmd_cluster_demo(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  std::vector<ChannelEstimate> estimates;
  if (!cfg.cluster_phases.empty()) {
    // Explicit K=2-style demo points.
    for (double phi : cfg.cluster_phases) {
      ChannelEstimate est;
      est.phases_rel = Eigen::VectorXd::Constant(1, wrap_2pi(phi));
      est.magnitudes = Eigen::VectorXd::Ones(2);
      estimates.push_back(std::move(est));
    }
  } else {
    Rng rng(cfg.system.rng_seed);
    const auto channels = draw_channels(cfg.system, rng);
    const auto schedule = build_schedule(cfg.system, cfg.L);
    const NoiseModel noise = sigma2_from_snr(cfg.system, channels, schedule);
    const auto feedback = collect_feedback(channels, schedule, cfg.system, noise, rng);
    estimates = estimate_channels(feedback, schedule, cfg.system).first;
  }
  if (cfg.cluster_Q > static_cast<int>(estimates.size()))
    throw ConfigError("cluster.Q exceeds the number of receivers");
  const auto points = embed_phases(estimates);
  const auto assignment = lloyd_cluster(points, cfg.cluster_Q, Rng(cfg.system.rng_seed));
  std::cout << assignment_to_json(assignment) << "\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, double tol) {
  const SdpProblem problem = problem_from_json(read_file(instance_path));
  SdpSettings settings;
  settings.tol = tol;
  const SdpSolution sol = solve(problem, settings);
  std::cout << solution_to_json(sol) << "\n";
  return sol.status == SdpStatus::numerical_failure ? 1 : 0;
}

int cmd_certify(const std::string& problem_path, const std::string& solution_path, double tol) {
  const SdpProblem problem = problem_from_json(read_file(problem_path));
  const SdpSolution sol = solution_from_json(read_file(solution_path), problem.K);
  const CertificateReport report = check_certificate(problem, sol, tol);
  std::cout << certificate_to_json(report) << "\n";
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSSI-feedback wireless energy beamforming toolkit"};
  app.require_subcommand(1);

  CommonArgs est_args, harv_args, clus_args;
  std::string instance_path, problem_path, solution_path;
  double solve_tol = 1e-6, certify_tol = 1e-5;

  auto* est = app.add_subcommand("estimate-sweep", "estimation error vs feedback sweep");
  add_common(est, est_args);
  auto* harv = app.add_subcommand("harvest-sweep", "harvested energy vs cluster-count sweep");
  add_common(harv, harv_args);
  auto* clus = app.add_subcommand("cluster-demo", "cluster receivers and print the assignment");
  add_common(clus, clus_args);
  auto* solve_cmd = app.add_subcommand("solve", "solve a robust max-min instance (JSON in, JSON out)");
  solve_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  solve_cmd->add_option("--tol", solve_tol, "solver tolerance");
  auto* cert = app.add_subcommand("certify", "re-check a solution against its problem");
  cert->add_option("--problem", problem_path, "problem JSON file")->required();
  cert->add_option("--solution", solution_path, "solution JSON file")->required();
  cert->add_option("--tol", certify_tol, "certification tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (est->parsed()) return cmd_estimate_sweep(est_args);
    if (harv->parsed()) return cmd_harvest_sweep(harv_args);
    if (clus->parsed()) return cmd_cluster_demo(clus_args);
    if (solve_cmd->parsed()) return cmd_solve(instance_path, solve_tol);
    if (cert->parsed()) return cmd_certify(problem_path, solution_path, certify_tol);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
