#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wetsim {

// Scenario parameters shared by every module.
struct SystemConfig {
  int K = 2;               // transmit antennas
  int N = 1;               // energy receivers
  double P = 1.0;          // transmit sum-power budget [W]
  double xi = 1.0;         // rectifier conversion efficiency
  double snr_db = 20.0;    // training-stage SNR
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (K < 2) throw std::invalid_argument("SystemConfig: K must be >= 2");
    if (N < 1) throw std::invalid_argument("SystemConfig: N must be >= 1");
    if (!(P > 0.0)) throw std::invalid_argument("SystemConfig: P must be > 0");
    if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("SystemConfig: xi must be in (0, 1]");
  }
};

// True MISO channel of one receiver, split into magnitudes and phases.
struct ChannelVector {
  Eigen::VectorXd magnitudes;  // |h_k| > 0
  Eigen::VectorXd phases;      // radians in [0, 2pi)

  int size() const { return static_cast<int>(magnitudes.size()); }

  Eigen::VectorXcd to_complex() const {
    Eigen::VectorXcd h(magnitudes.size());
    for (Eigen::Index k = 0; k < magnitudes.size(); ++k)
      h[k] = std::polar(magnitudes[k], phases[k]);
    return h;
  }
};

struct NoiseModel {
  double sigma2 = 0.0;  // RSSI measurement-noise variance

  void validate() const {
    if (sigma2 < 0.0) throw std::invalid_argument("NoiseModel: sigma2 must be >= 0");
  }
};

// Hermitian PSD transmit covariance with trace budget P.
struct CovarianceMatrix {
  Eigen::MatrixXcd entries;

  int dim() const { return static_cast<int>(entries.rows()); }

  static CovarianceMatrix from_beam(const Eigen::VectorXcd& b) {
    return CovarianceMatrix{b * b.adjoint()};
  }

  void validate(double P) const {
    if (entries.rows() != entries.cols())
      throw std::invalid_argument("CovarianceMatrix: not square");
    const double scale = std::max(1.0, entries.norm());
    if ((entries - entries.adjoint()).norm() > 1e-12 * scale)
      throw std::invalid_argument("CovarianceMatrix: not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    const double tr = entries.real().trace();
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(tr, 1.0))
      throw std::invalid_argument("CovarianceMatrix: not PSD");
    if (tr > P + 1e-9) throw std::invalid_argument("CovarianceMatrix: trace exceeds budget");
  }
};

// Wrap an angle into [0, 2pi).
inline double wrap_2pi(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  // fmod can land exactly on 2pi after the correction
  if (a >= two_pi) a -= two_pi;
  return a;
}

// Wrap an angle difference into (-pi, pi].
inline double wrap_pi(double a) {
  a = wrap_2pi(a);
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace wetsim
