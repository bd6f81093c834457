#pragma once

#include <vector>

#include "wetsim/types.hpp"

namespace wetsim {

// Max-min instance over the selected cluster: estimated channels with their
// bounded-error radii and the power budget.
struct RobustInstance {
  std::vector<Eigen::VectorXcd> members;  // h_hat per member
  std::vector<double> eps;                // error-norm bound per member
  double P = 1.0;
  int K = 2;

  void validate() const {
    if (members.empty()) throw std::invalid_argument("RobustInstance: no members");
    if (members.size() != eps.size())
      throw std::invalid_argument("RobustInstance: members/eps size mismatch");
    if (!(P > 0.0)) throw std::invalid_argument("RobustInstance: P must be > 0");
    for (const auto& h : members)
      if (h.size() != K) throw std::invalid_argument("RobustInstance: member dimension mismatch");
    for (double e : eps)
      if (e < 0.0) throw std::invalid_argument("RobustInstance: eps must be >= 0");
  }
};

// S-procedure block for one member: the (K+1)x(K+1) Hermitian matrix
//   [ mu I + C          C h        ]
//   [ h' C       h' C h - t - mu e^2 ]
// affine in (C, t, mu).
struct LmiBlock {
  int member = 0;
  Eigen::VectorXcd h;
  double eps = 0.0;

  Eigen::MatrixXcd evaluate(const Eigen::MatrixXcd& C, double t, double mu) const {
    const int K = static_cast<int>(h.size());
    Eigen::MatrixXcd T(K + 1, K + 1);
    T.topLeftCorner(K, K) = mu * Eigen::MatrixXcd::Identity(K, K) + C;
    T.block(0, K, K, 1) = C * h;
    T.block(K, 0, 1, K) = (C * h).adjoint();
    const std::complex<double> q = h.adjoint() * C * h;
    T(K, K) = q.real() - t - mu * eps * eps;
    return T;
  }
};

std::vector<LmiBlock> build_lmi(const RobustInstance& instance);

}  // namespace wetsim
