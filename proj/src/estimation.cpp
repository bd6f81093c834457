#include "wetsim/estimation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wetsim {

std::vector<RssiFeedback> collect_feedback(const std::vector<ChannelVector>& channels,
                                           const TrainingSchedule& schedule,
                                           const SystemConfig& cfg, const NoiseModel& noise,
                                           Rng& rng) {
  std::vector<RssiFeedback> out;
  const int L = schedule.L;
  out.reserve(channels.size() * schedule.slots.size() * (L + 1));
  for (int i = 0; i < static_cast<int>(channels.size()); ++i) {
    const auto& h = channels[i];
    for (const auto& cb : schedule.slots) {
      for (int l = 1; l <= L + 1; ++l) {
        const double clean = noiseless_training_value(h, cb.v, l, L, cfg);
        const double sigma = std::sqrt(noise.sigma2);
        out.push_back({i, cb.v, l, 0, clean + rng.normal(sigma)});
        if (l == L + 1) {
          for (int r = 1; r <= schedule.repeat_last_beam; ++r)
            out.push_back({i, cb.v, l, r, clean + rng.normal(sigma)});
        }
      }
    }
  }
  return out;
}

SinusoidFit fit_sinusoid(std::span<const double> values) {
  const int L = static_cast<int>(values.size());
  if (L < 3) throw std::invalid_argument("fit_sinusoid: insufficient training length (L must be >= 3)");

  double sum = 0.0, sc = 0.0, ss = 0.0;
  for (int l = 0; l < L; ++l) {
    const double theta = 2.0 * l * M_PI / L;
    sum += values[l];
    sc += values[l] * std::cos(theta);
    ss += values[l] * std::sin(theta);
  }

  SinusoidFit fit;
  fit.alpha_hat = sum / L;
  fit.beta_hat = (2.0 / L) * std::hypot(sc, ss);
  if (sc == 0.0 && ss == 0.0) {
    fit.phi_hat = 0.0;
    fit.degenerate = true;
  } else {
    // Two-argument arctangent of (-sum sin, sum cos): unambiguous whenever
    // beta > 0, since the pair equals (L/2) beta (sin phi, cos phi) in mean.
    fit.phi_hat = wrap_2pi(std::atan2(-ss, sc));
  }
  return fit;
}

std::pair<std::vector<ChannelEstimate>, EstimationDiagnostics> estimate_channels(
    const std::vector<RssiFeedback>& feedback, const TrainingSchedule& schedule,
    const SystemConfig& cfg) {
  const int K = cfg.K;
  const int L = schedule.L;

  // Index records by (receiver, v, l); repetitions pool into the same bucket.
  std::map<std::tuple<int, int, int>, std::vector<double>> buckets;
  int max_receiver = -1;
  for (const auto& fb : feedback) {
    buckets[{fb.receiver, fb.v, fb.l}].push_back(fb.value);
    max_receiver = std::max(max_receiver, fb.receiver);
  }
  const int N = max_receiver + 1;

  std::vector<ChannelEstimate> estimates;
  EstimationDiagnostics diag;
  estimates.reserve(N);

  for (int i = 0; i < N; ++i) {
    ChannelEstimate est;
    est.phases_rel.resize(K - 1);
    est.magnitudes.resize(K);

    // Reference magnitude from every single-antenna observation.
    double ref_sum = 0.0;
    int ref_count = 0;
    std::vector<double> alphas(K - 1);

    for (const auto& cb : schedule.slots) {
      std::vector<double> grid(L);
      for (int l = 1; l <= L; ++l) {
        auto it = buckets.find({i, cb.v, l});
        if (it == buckets.end() || it->second.empty()) {
          std::ostringstream msg;
          msg << "estimate_channels: missing feedback for receiver " << i << ", v=" << cb.v
              << ", l=" << l;
          throw std::runtime_error(msg.str());
        }
        grid[l - 1] = it->second.front();
      }
      auto it = buckets.find({i, cb.v, L + 1});
      if (it == buckets.end() || it->second.empty()) {
        std::ostringstream msg;
        msg << "estimate_channels: missing feedback for receiver " << i << ", v=" << cb.v
            << ", l=" << (L + 1);
        throw std::runtime_error(msg.str());
      }
      for (double r : it->second) {
        ref_sum += r;
        ++ref_count;
      }

      const SinusoidFit fit = fit_sinusoid(grid);
      est.phases_rel[cb.v - 2] = fit.phi_hat;
      alphas[cb.v - 2] = fit.alpha_hat;
      diag.fits.push_back(fit);
    }

    // |h_1|^2 from R = (xi P / 2)|h_1|^2, |h_v|^2 from alpha = (xi P / 4)(|h_1|^2 + |h_v|^2).
    double h1_sq = (2.0 / (cfg.xi * cfg.P)) * (ref_sum / ref_count);
    if (h1_sq < kMagnitudeFloorSq) {
      h1_sq = kMagnitudeFloorSq;
      ++diag.floor_clamps;
      diag.clamped.emplace_back(i, 1);
    }
    est.magnitudes[0] = std::sqrt(h1_sq);
    for (int v = 2; v <= K; ++v) {
      double hv_sq = (4.0 / (cfg.xi * cfg.P)) * alphas[v - 2] - h1_sq;
      if (hv_sq < kMagnitudeFloorSq) {
        hv_sq = kMagnitudeFloorSq;
        ++diag.floor_clamps;
        diag.clamped.emplace_back(i, v);
      }
      est.magnitudes[v - 1] = std::sqrt(hv_sq);
    }
    estimates.push_back(std::move(est));
  }
  return {std::move(estimates), std::move(diag)};
}

std::vector<ErrorMetrics> estimation_error_metrics(const std::vector<ChannelEstimate>& estimates,
                                                   const std::vector<ChannelVector>& truths) {
  if (estimates.size() != truths.size())
    throw std::invalid_argument("estimation_error_metrics: list size mismatch");

  std::vector<ErrorMetrics> out;
  out.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& est = estimates[i];
    const auto& tru = truths[i];
    const int K = est.antennas();
    ErrorMetrics m;

    double phase_acc = 0.0;
    for (int v = 2; v <= K; ++v) {
      const double true_phi = wrap_2pi(tru.phases[v - 1] - tru.phases[0]);
      phase_acc += std::abs(wrap_pi(est.phases_rel[v - 2] - true_phi)) / M_PI;
    }
    m.phase_error_pct = 100.0 * phase_acc / (K - 1);

    double mag_acc = 0.0;
    for (int k = 0; k < K; ++k)
      mag_acc += std::abs(est.magnitudes[k] - tru.magnitudes[k]) / tru.magnitudes[k];
    m.magnitude_error_pct = 100.0 * mag_acc / K;

    // Truth re-referenced so antenna 1 has zero phase, matching the estimate.
    Eigen::VectorXcd href = tru.to_complex() * std::polar(1.0, -tru.phases[0]);
    m.norm_error = (est.to_complex() - href).norm();
    out.push_back(m);
  }
  return out;
}

std::vector<ErrorBound> calibrate_epsilon(const SystemConfig& cfg, int L, const NoiseModel& noise,
                                          int trials, double percentile, Rng& rng) {
  if (trials < 100) throw std::invalid_argument("calibrate_epsilon: trials must be >= 100");
  if (!(percentile > 0.0 && percentile <= 100.0))
    throw std::invalid_argument("calibrate_epsilon: percentile must be in (0, 100]");

  const TrainingSchedule schedule = build_schedule(cfg, L);
  std::vector<std::vector<double>> norms(cfg.N);

  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = rng.substream(0x1ca1, static_cast<std::uint64_t>(t));
    auto channels = draw_channels(cfg, trial_rng);
    auto feedback = collect_feedback(channels, schedule, cfg, noise, trial_rng);
    auto [estimates, diag] = estimate_channels(feedback, schedule, cfg);
    auto metrics = estimation_error_metrics(estimates, channels);
    for (int i = 0; i < cfg.N; ++i) norms[i].push_back(metrics[i].norm_error);
  }

  std::vector<ErrorBound> out(cfg.N);
  for (int i = 0; i < cfg.N; ++i) {
    auto& v = norms[i];
    std::sort(v.begin(), v.end());
    // Nearest-rank quantile.
    const std::size_t idx =
        std::min(v.size() - 1, static_cast<std::size_t>(std::ceil(percentile / 100.0 * v.size())) -
                                   (percentile > 0.0 ? 1 : 0));
    out[i].epsilon = v[idx];
  }
  return out;
}

void write_feedback_csv(const std::vector<RssiFeedback>& feedback, std::ostream& out) {
  out << "receiver,v,l,repetition,value\n";
  char buf[96];
  for (const auto& fb : feedback) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g\n", fb.receiver, fb.v, fb.l, fb.repetition,
                  fb.value);
    out << buf;
  }
}

std::string estimates_to_json(const std::vector<ChannelEstimate>& estimates,
                              const EstimationDiagnostics& diag) {
  nlohmann::json j;
  j["estimates"] = nlohmann::json::array();
  for (const auto& est : estimates) {
    nlohmann::json e;
    e["phases_rel"] = std::vector<double>(est.phases_rel.begin(), est.phases_rel.end());
    e["magnitudes"] = std::vector<double>(est.magnitudes.begin(), est.magnitudes.end());
    j["estimates"].push_back(std::move(e));
  }
  j["diagnostics"]["floor_clamps"] = diag.floor_clamps;
  j["diagnostics"]["clamped"] = diag.clamped;
  return j.dump(2);
}

}  // namespace wetsim
