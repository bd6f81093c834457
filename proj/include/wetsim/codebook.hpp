#pragma once

#include <ostream>
#include <vector>

#include "wetsim/types.hpp"

namespace wetsim {

// Training codebook B_v: L sinusoid-probing beams that pair antenna 1 with
// antenna v, plus one single-antenna beam for the reference magnitude.
struct Codebook {
  int v = 2;                             // paired antenna index, 2..K
  std::vector<Eigen::VectorXcd> beams;   // L+1 vectors, each scaled by sqrt(P/2)
  std::vector<double> thetas;            // theta_l = 2(l-1)pi/L, l = 1..L

  int L() const { return static_cast<int>(thetas.size()); }
};

struct TrainingSchedule {
  std::vector<Codebook> slots;  // K-1 codebooks, ascending v
  int repeat_last_beam = 0;     // extra sends of the single-antenna beam (K = 2)
  int L = 0;

  // Total beams transmitted, repetitions included.
  int beam_count() const {
    int n = 0;
    for (const auto& cb : slots) n += static_cast<int>(cb.beams.size());
    return n + repeat_last_beam;
  }
};

Codebook build_codebook(int v, int K, int L, double P);
TrainingSchedule build_schedule(const SystemConfig& cfg, int L);

// CSV dump (columns v,l,k,re,im) at 17 significant digits.
void write_codebook_csv(const TrainingSchedule& schedule, std::ostream& out);

}  // namespace wetsim
