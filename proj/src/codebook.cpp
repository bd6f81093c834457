#include "wetsim/codebook.hpp"

#include <cinttypes>
#include <cstdio>

namespace wetsim {

Codebook build_codebook(int v, int K, int L, double P) {
  if (L < 3) throw std::invalid_argument("build_codebook: insufficient training length (L must be >= 3)");
  if (v < 2 || v > K) throw std::invalid_argument("build_codebook: antenna index v out of range");
  if (!(P > 0.0)) throw std::invalid_argument("build_codebook: P must be > 0");

  Codebook cb;
  cb.v = v;
  const double amp = std::sqrt(P / 2.0);
  cb.thetas.resize(L);
  for (int l = 0; l < L; ++l) cb.thetas[l] = 2.0 * l * M_PI / L;

  cb.beams.reserve(L + 1);
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(K);
    b[0] = amp;
    b[v - 1] = amp * std::polar(1.0, cb.thetas[l]);
    cb.beams.push_back(std::move(b));
  }
  // Beam L+1: first antenna only.
  Eigen::VectorXcd last = Eigen::VectorXcd::Zero(K);
  last[0] = amp;
  cb.beams.push_back(std::move(last));
  return cb;
}

TrainingSchedule build_schedule(const SystemConfig& cfg, int L) {
  cfg.validate();
  TrainingSchedule s;
  s.L = L;
  for (int v = 2; v <= cfg.K; ++v) s.slots.push_back(build_codebook(v, cfg.K, L, cfg.P));
  // With K = 2 only one single-antenna observation exists per block; repeat it
  // so |h_1|^2 is averaged over L measurements, like the sinusoid fit.
  s.repeat_last_beam = (cfg.K == 2) ? L - 1 : 0;
  return s;
}

void write_codebook_csv(const TrainingSchedule& schedule, std::ostream& out) {
  out << "v,l,k,re,im\n";
  char buf[128];
  for (const auto& cb : schedule.slots) {
    for (std::size_t l = 0; l < cb.beams.size(); ++l) {
      const auto& b = cb.beams[l];
      for (Eigen::Index k = 0; k < b.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%" PRIdPTR ",%.17g,%.17g\n", cb.v, l + 1,
                      static_cast<intptr_t>(k + 1), b[k].real(), b[k].imag());
        out << buf;
      }
    }
  }
}

}  // namespace wetsim
