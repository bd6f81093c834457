#include "wetsim/channel.hpp"

namespace wetsim {

std::vector<ChannelVector> draw_channels(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<ChannelVector> out;
  out.reserve(cfg.N);
  for (int i = 0; i < cfg.N; ++i) {
    ChannelVector h;
    h.magnitudes.resize(cfg.K);
    h.phases.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k) {
      h.magnitudes[k] = rng.uniform(0.1, 1.0);
      h.phases[k] = rng.uniform(0.0, 2.0 * M_PI);
    }
    out.push_back(std::move(h));
  }
  return out;
}

double noiseless_rssi(const ChannelVector& h, const CovarianceMatrix& C, double xi) {
  if (h.size() != C.dim()) throw std::invalid_argument("rssi: channel/covariance dimension mismatch");
  const Eigen::VectorXcd hc = h.to_complex();
  const std::complex<double> q = hc.adjoint() * C.entries * hc;
  return xi * q.real();
}

double rssi(const ChannelVector& h, const CovarianceMatrix& C, double xi,
            const NoiseModel& noise, Rng& rng) {
  return noiseless_rssi(h, C, xi) + rng.normal(std::sqrt(noise.sigma2));
}

double noiseless_training_value(const ChannelVector& h, int v, int l, int L,
                                const SystemConfig& cfg) {
  if (v < 2 || v > h.size()) throw std::invalid_argument("noiseless_training_value: v out of range");
  const double h1 = h.magnitudes[0];
  if (l == L + 1) return cfg.xi * cfg.P / 2.0 * h1 * h1;
  if (l < 1 || l > L) throw std::invalid_argument("noiseless_training_value: l out of range");
  const double hv = h.magnitudes[v - 1];
  const double alpha = cfg.xi * cfg.P / 4.0 * (h1 * h1 + hv * hv);
  const double beta = cfg.xi * cfg.P / 2.0 * h1 * hv;
  const double phi = h.phases[v - 1] - h.phases[0];
  const double theta = 2.0 * (l - 1) * M_PI / L;
  return alpha + beta * std::cos(theta + phi);
}

NoiseModel sigma2_from_snr(const SystemConfig& cfg, const std::vector<ChannelVector>& channels,
                           const TrainingSchedule& schedule) {
  if (channels.empty()) throw std::invalid_argument("sigma2_from_snr: empty channel list");
  double sum = 0.0;
  long count = 0;
  for (const auto& h : channels) {
    for (const auto& cb : schedule.slots) {
      for (int l = 1; l <= schedule.L + 1; ++l) {
        sum += noiseless_training_value(h, cb.v, l, schedule.L, cfg);
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  return NoiseModel{mean / std::pow(10.0, cfg.snr_db / 10.0)};
}

}  // namespace wetsim
