#pragma once

#include <vector>

#include "wetsim/codebook.hpp"
#include "wetsim/rng.hpp"
#include "wetsim/types.hpp"

namespace wetsim {

// Draw N i.i.d. channels: magnitudes ~ U[0.1, 1], phases ~ U[0, 2pi).
std::vector<ChannelVector> draw_channels(const SystemConfig& cfg, Rng& rng);

// Exact received energy xi * h' C h, no noise.
double noiseless_rssi(const ChannelVector& h, const CovarianceMatrix& C, double xi);

// Measured RSSI: noiseless value plus one N(0, sigma2) sample.
double rssi(const ChannelVector& h, const CovarianceMatrix& C, double xi,
            const NoiseModel& noise, Rng& rng);

// Noiseless training-stage RSSI for beam l of slot v: the sinusoid law
// alpha + beta cos(theta_l + phi) for l <= L, (xi P / 2) |h_1|^2 for the
// single-antenna beam.
double noiseless_training_value(const ChannelVector& h, int v, int l, int L,
                                const SystemConfig& cfg);

// Calibrate sigma2 so the stated SNR is relative to the mean noiseless
// training-beam RSSI across all receivers and scheduled beams.
NoiseModel sigma2_from_snr(const SystemConfig& cfg, const std::vector<ChannelVector>& channels,
                           const TrainingSchedule& schedule);

}  // namespace wetsim
