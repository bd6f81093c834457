#pragma once

#include "wetsim/sdp.hpp"

namespace wetsim {

struct BeamSolution {
  CovarianceMatrix C;
  double t_star = 0.0;
  Eigen::VectorXd mu;
  Eigen::VectorXcd beam;      // principal beam, ||beam||^2 = tr(C)
  double rank_ratio = 0.0;    // lambda_2 / lambda_1 of C
  std::vector<SdpIteration> iterations;
};

// Thrown when the interior-point solve does not converge; carries the trace.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<SdpIteration> log)
      : std::runtime_error(what), iterations(std::move(log)) {}
  std::vector<SdpIteration> iterations;
};

// Robust max-min beamforming over the instance members via the S-procedure SDP.
BeamSolution solve_maxmin(const RobustInstance& instance, const SdpSettings& settings = {});

// Baselines.
Eigen::VectorXcd mrt_beam(const Eigen::VectorXcd& h_hat, double P);
Eigen::VectorXcd egt_beam(const Eigen::VectorXcd& h_hat, double P);
Eigen::VectorXcd random_beam(int K, double P, Rng& rng);
int best_channel_member(const std::vector<Eigen::VectorXcd>& estimates);

std::string beam_solution_to_json(const BeamSolution& solution);

}  // namespace wetsim
