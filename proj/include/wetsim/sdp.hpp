#pragma once

#include <string>
#include <vector>

#include "wetsim/rng.hpp"
#include "wetsim/robust_instance.hpp"

namespace wetsim {

struct SdpSettings {
  double tol = 1e-6;
  int max_iter = 200;  // outer barrier stages
};

enum class SdpStatus { optimal, max_iterations, numerical_failure };

struct SdpIteration {
  double kappa = 0.0;
  double t = 0.0;
  double gap = 0.0;  // relative barrier gap bound
  int newton_steps = 0;
};

// The fixed problem family: maximize t over Hermitian PSD C with tr(C) <= P,
// mu >= 0, and one S-procedure block per member.
struct SdpProblem {
  int K = 2;
  double P = 1.0;
  std::vector<LmiBlock> blocks;

  static SdpProblem from_instance(const RobustInstance& instance) {
    instance.validate();
    return SdpProblem{instance.K, instance.P, build_lmi(instance)};
  }
};

struct SdpSolution {
  Eigen::MatrixXcd C;
  double t = 0.0;
  Eigen::VectorXd mu;
  SdpStatus status = SdpStatus::numerical_failure;
  double gap = 0.0;
  std::vector<SdpIteration> log;
};

// Hermitian H -> real symmetric [[Re H, -Im H], [Im H, Re H]]; PSD iff H is,
// eigenvalues doubled in multiplicity.
Eigen::MatrixXd to_real_embedding(const Eigen::MatrixXcd& H);

// Strictly feasible interior start used by the barrier method.
struct InteriorPoint {
  Eigen::MatrixXcd C;
  double t = 0.0;
  Eigen::VectorXd mu;
};
InteriorPoint initial_point(const SdpProblem& problem);

// Logarithmic-barrier path-following on the real embedding.
SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {});

struct CertificateCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;
  bool all_pass = true;

  void add(std::string name, bool pass, double value) {
    all_pass = all_pass && pass;
    checks.push_back({std::move(name), pass, value});
  }
};

// Recompute block eigenvalues, trace slack, multiplier signs, and a sampled
// worst-case perturbation sweep; tolerances relative to max(1, |t|, P).
CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                    double tol = 1e-5, int sphere_samples = 1000,
                                    std::uint64_t sample_seed = 7);

std::string problem_to_json(const SdpProblem& problem);
SdpProblem problem_from_json(const std::string& text);
std::string solution_to_json(const SdpSolution& solution);
SdpSolution solution_from_json(const std::string& text, int K);
std::string certificate_to_json(const CertificateReport& report);

}  // namespace wetsim
