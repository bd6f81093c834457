#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wetsim/beamformer.hpp"
#include "wetsim/clustering.hpp"

namespace wetsim {

enum class PolicyKind {
  proposed_cluster,
  no_cluster_maxmin,
  best_channel,
  random_beam,
  round_robin,
  mrt_perfect_csi,
  egt_estimated,
  mrt_estimated,
};

struct SchedulerPolicy {
  PolicyKind kind = PolicyKind::proposed_cluster;
  int Q = 1;  // cluster kinds only

  std::string name() const;
  static SchedulerPolicy parse(const std::string& name);
};

struct TrialRecord {
  int block = 0;
  SchedulerPolicy policy;
  Eigen::VectorXd energies;       // harvested energy per receiver, true channels
  std::vector<int> members;       // prioritized receivers (cluster / target)
  double t_star = 0.0;            // max-min value where applicable
  std::uint64_t draw_hash = 0;    // hash of channel + feedback draws (CRN check)
};

// One full block: training (policy permitting), estimation, clustering,
// beamforming, then energy scoring against the true channels. The same rng
// passed for different policies yields identical channel/noise draws.
TrialRecord run_block(const std::vector<ChannelVector>& channels, const SchedulerPolicy& policy,
                      const SystemConfig& cfg, int L, const NoiseModel& noise, double epsilon,
                      const Rng& block_rng, int block_index);

struct ErrorSweepRow {
  int L = 0;
  double phase_error_pct = 0.0;
  double magnitude_error_pct = 0.0;
  double mrt_energy = 0.0;      // MRT with estimated CSI
  double egt_energy = 0.0;      // EGT with estimated CSI
  double perfect_energy = 0.0;  // MRT with perfect CSI
  double mrt_loss_pct = 0.0;    // energy loss vs perfect CSI
  double egt_loss_pct = 0.0;
  int trials = 0;
};

struct HarvestSweepRow {
  int K = 0;
  int N = 0;
  std::string policy;
  double mean_energy_all = 0.0;      // network-wide mean per-ER harvested energy
  double mean_energy_members = 0.0;  // prioritized members only
  double mean_t_star = 0.0;
  double jain = 0.0;                 // fairness of membership counts
  double epsilon = 0.0;
  int trials = 0;
};

struct FairnessReport {
  std::vector<long> counts;        // Q*-membership count per receiver
  std::vector<double> frequency;
  double jain = 0.0;
  double chi_square = 0.0;
  int blocks = 0;
};

// Fig.-2-style sweep: estimation error and harvested-energy loss vs L.
std::vector<ErrorSweepRow> sweep_error_vs_feedback(const SystemConfig& cfg,
                                                   const std::vector<int>& L_grid, int trials,
                                                   int workers = 1);

// Fig.-3-style sweep: harvested energy per policy across (K, N, Q) with
// common random numbers across policies at each point.
std::vector<HarvestSweepRow> sweep_harvest_vs_clusters(const SystemConfig& cfg,
                                                       const std::vector<int>& Q_grid,
                                                       const std::vector<int>& N_grid,
                                                       const std::vector<int>& K_grid,
                                                       int L, int trials,
                                                       std::optional<double> fixed_epsilon,
                                                       double epsilon_percentile, int workers = 1);

FairnessReport fairness_report(const std::vector<TrialRecord>& records, int N);

double jain_index(const std::vector<long>& counts);

void write_error_sweep_csv(const std::vector<ErrorSweepRow>& rows, std::ostream& out);
void write_harvest_sweep_csv(const std::vector<HarvestSweepRow>& rows, std::ostream& out);

// Order-independent compensated sum, so parallel schedules reproduce serial
// aggregation bit-for-bit (inputs are reduced in index order regardless).
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown on the calling thread.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len);

}  // namespace wetsim
