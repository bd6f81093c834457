#pragma once

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "wetsim/channel.hpp"
#include "wetsim/codebook.hpp"

namespace wetsim {

// One fed-back RSSI measurement, tagged so ordering never matters downstream.
struct RssiFeedback {
  int receiver = 0;    // i, 0-based
  int v = 2;           // slot antenna index
  int l = 1;           // beam index 1..L+1
  int repetition = 0;  // 0 for the first send; >0 only for the K=2 repeats
  double value = 0.0;  // measured energy, may be negative after noise
};

// Least-squares fit of R_l = alpha + beta cos(theta_l + phi) on the uniform grid.
struct SinusoidFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double phi_hat = 0.0;     // wrapped to [0, 2pi)
  bool degenerate = false;  // both arctangent arguments exactly zero
};

struct ChannelEstimate {
  Eigen::VectorXd phases_rel;  // phi_hat for v = 2..K (size K-1)
  Eigen::VectorXd magnitudes;  // |h_k| estimates, k = 1..K (size K)

  int antennas() const { return static_cast<int>(magnitudes.size()); }

  // Complex estimate with the reference antenna's phase taken as zero.
  Eigen::VectorXcd to_complex() const {
    Eigen::VectorXcd h(magnitudes.size());
    h[0] = magnitudes[0];
    for (Eigen::Index v = 1; v < magnitudes.size(); ++v)
      h[v] = std::polar(magnitudes[v], phases_rel[v - 1]);
    return h;
  }
};

struct EstimationDiagnostics {
  int floor_clamps = 0;                          // squared-magnitude floor hits
  std::vector<std::pair<int, int>> clamped;      // (receiver, antenna index 1..K)
  std::vector<SinusoidFit> fits;                 // per (receiver, v), row-major
};

struct ErrorMetrics {
  double phase_error_pct = 0.0;
  double magnitude_error_pct = 0.0;
  double norm_error = 0.0;
};

struct ErrorBound {
  double epsilon = 0.0;
};

std::vector<RssiFeedback> collect_feedback(const std::vector<ChannelVector>& channels,
                                           const TrainingSchedule& schedule,
                                           const SystemConfig& cfg, const NoiseModel& noise,
                                           Rng& rng);

// Closed-form least-squares estimators on the theta grid; values must be the L
// grid measurements in order l = 1..L.
SinusoidFit fit_sinusoid(std::span<const double> values);

std::pair<std::vector<ChannelEstimate>, EstimationDiagnostics> estimate_channels(
    const std::vector<RssiFeedback>& feedback, const TrainingSchedule& schedule,
    const SystemConfig& cfg);

std::vector<ErrorMetrics> estimation_error_metrics(const std::vector<ChannelEstimate>& estimates,
                                                   const std::vector<ChannelVector>& truths);

// Monte-Carlo percentile of the estimation-error norm at the operating noise
// level; one bound per receiver.
std::vector<ErrorBound> calibrate_epsilon(const SystemConfig& cfg, int L, const NoiseModel& noise,
                                          int trials, double percentile, Rng& rng);

void write_feedback_csv(const std::vector<RssiFeedback>& feedback, std::ostream& out);
std::string estimates_to_json(const std::vector<ChannelEstimate>& estimates,
                              const EstimationDiagnostics& diag);

// Squared-magnitude clamp applied before square-rooting.
inline constexpr double kMagnitudeFloorSq = 1e-6;

}  // namespace wetsim
