#include "wetsim/beamformer.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace wetsim {

BeamSolution solve_maxmin(const RobustInstance& instance, const SdpSettings& settings) {
  const SdpProblem problem = SdpProblem::from_instance(instance);
  SdpSolution sdp_sol = solve(problem, settings);
  if (sdp_sol.status == SdpStatus::numerical_failure)
    throw SolverError("solve_maxmin: interior-point solve failed", std::move(sdp_sol.log));
  if (sdp_sol.status == SdpStatus::max_iterations)
    throw SolverError("solve_maxmin: iteration limit before reaching tolerance",
                      std::move(sdp_sol.log));

  BeamSolution out;
  out.C.entries = sdp_sol.C;
  out.t_star = sdp_sol.t;
  out.mu = sdp_sol.mu;
  out.iterations = std::move(sdp_sol.log);

  // Rank-one extraction: principal eigenpair rescaled to the full trace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sdp_sol.C);
  const Eigen::Index top = es.eigenvalues().size() - 1;
  const double l1 = std::max(es.eigenvalues()[top], 0.0);
  const double l2 = top > 0 ? std::max(es.eigenvalues()[top - 1], 0.0) : 0.0;
  out.rank_ratio = l1 > 0.0 ? l2 / l1 : 0.0;
  const double tr = std::max(sdp_sol.C.real().trace(), 0.0);
  out.beam = std::sqrt(tr) * es.eigenvectors().col(top);
  return out;
}

Eigen::VectorXcd mrt_beam(const Eigen::VectorXcd& h_hat, double P) {
  const double nrm = h_hat.norm();
  if (nrm == 0.0) throw std::invalid_argument("mrt_beam: zero channel vector");
  return std::sqrt(P) / nrm * h_hat;
}

Eigen::VectorXcd egt_beam(const Eigen::VectorXcd& h_hat, double P) {
  const int K = static_cast<int>(h_hat.size());
  Eigen::VectorXcd b(K);
  const double amp = std::sqrt(P / K);
  for (int k = 0; k < K; ++k) {
    const double a = std::abs(h_hat[k]);
    // Zero-magnitude entries get zero phase pre-compensation.
    b[k] = a > 0.0 ? amp * h_hat[k] / a : std::complex<double>(amp, 0.0);
  }
  return b;
}

Eigen::VectorXcd random_beam(int K, double P, Rng& rng) {
  Eigen::VectorXcd b(K);
  for (int k = 0; k < K; ++k) b[k] = std::complex<double>(rng.normal(), rng.normal());
  const double nrm = b.norm();
  if (nrm == 0.0) return random_beam(K, P, rng);
  return std::sqrt(P) / nrm * b;
}

int best_channel_member(const std::vector<Eigen::VectorXcd>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("best_channel_member: empty list");
  int best = 0;
  double best_norm = estimates[0].norm();
  for (int i = 1; i < static_cast<int>(estimates.size()); ++i) {
    const double n = estimates[i].norm();
    if (n > best_norm) {
      best_norm = n;
      best = i;
    }
  }
  return best;
}

std::string beam_solution_to_json(const BeamSolution& solution) {
  nlohmann::json j;
  const int K = solution.C.dim();
  std::vector<double> cre, cim, bre, bim;
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < K; ++c) {
      cre.push_back(solution.C.entries(r, c).real());
      cim.push_back(solution.C.entries(r, c).imag());
    }
  for (int k = 0; k < K; ++k) {
    bre.push_back(solution.beam[k].real());
    bim.push_back(solution.beam[k].imag());
  }
  j["C_re"] = cre;
  j["C_im"] = cim;
  j["t_star"] = solution.t_star;
  j["mu"] = std::vector<double>(solution.mu.begin(), solution.mu.end());
  j["beam_re"] = bre;
  j["beam_im"] = bim;
  j["rank_ratio"] = solution.rank_ratio;
  j["solver_iterations"] = solution.iterations.size();
  return j.dump(2);
}

}  // namespace wetsim
