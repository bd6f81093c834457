#include "wetsim/experiments.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace wetsim {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string SchedulerPolicy::name() const {
  switch (kind) {
    case PolicyKind::proposed_cluster:
      return "proposed-cluster-Q" + std::to_string(Q);
    case PolicyKind::no_cluster_maxmin:
      return "no-cluster-maxmin";
    case PolicyKind::best_channel:
      return "best-channel-opportunistic";
    case PolicyKind::random_beam:
      return "random-beam";
    case PolicyKind::round_robin:
      return "round-robin";
    case PolicyKind::mrt_perfect_csi:
      return "mrt-perfect-csi";
    case PolicyKind::egt_estimated:
      return "egt-estimated";
    case PolicyKind::mrt_estimated:
      return "mrt-estimated";
  }
  return "unknown";
}

SchedulerPolicy SchedulerPolicy::parse(const std::string& name) {
  if (name.rfind("proposed-cluster-Q", 0) == 0)
    return {PolicyKind::proposed_cluster, std::stoi(name.substr(18))};
  if (name == "proposed-cluster") return {PolicyKind::proposed_cluster, 3};
  if (name == "no-cluster-maxmin") return {PolicyKind::no_cluster_maxmin, 1};
  if (name == "best-channel-opportunistic") return {PolicyKind::best_channel, 1};
  if (name == "random-beam") return {PolicyKind::random_beam, 1};
  if (name == "round-robin") return {PolicyKind::round_robin, 1};
  if (name == "mrt-perfect-csi") return {PolicyKind::mrt_perfect_csi, 1};
  if (name == "egt-estimated") return {PolicyKind::egt_estimated, 1};
  if (name == "mrt-estimated") return {PolicyKind::mrt_estimated, 1};
  throw std::invalid_argument("unknown policy: " + name);
}

namespace {

bool needs_training(PolicyKind kind) {
  return kind != PolicyKind::random_beam && kind != PolicyKind::mrt_perfect_csi;
}

bool is_cluster_kind(PolicyKind kind) {
  return kind == PolicyKind::proposed_cluster || kind == PolicyKind::no_cluster_maxmin;
}

std::uint64_t hash_channels(const std::vector<ChannelVector>& channels) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& c : channels) {
    h = fnv1a(h, c.magnitudes.data(), sizeof(double) * c.magnitudes.size());
    h = fnv1a(h, c.phases.data(), sizeof(double) * c.phases.size());
  }
  return h;
}

}  // namespace

TrialRecord run_block(const std::vector<ChannelVector>& channels, const SchedulerPolicy& policy,
                      const SystemConfig& cfg, int L, const NoiseModel& noise, double epsilon,
                      const Rng& block_rng, int block_index) {
  const int N = static_cast<int>(channels.size());
  const int target = N > 0 ? block_index % N : 0;

  TrialRecord rec;
  rec.block = block_index;
  rec.policy = policy;
  rec.draw_hash = hash_channels(channels);

  std::vector<ChannelEstimate> estimates;
  TrainingSchedule schedule;
  if (needs_training(policy.kind)) {
    schedule = build_schedule(cfg, L);
    Rng noise_rng = block_rng.substream(1);
    const auto feedback = collect_feedback(channels, schedule, cfg, noise, noise_rng);
    for (const auto& fb : feedback) rec.draw_hash = fnv1a(rec.draw_hash, &fb.value, sizeof(double));
    estimates = estimate_channels(feedback, schedule, cfg).first;
  }

  Eigen::VectorXcd beam;
  switch (policy.kind) {
    case PolicyKind::proposed_cluster:
    case PolicyKind::no_cluster_maxmin: {
      const int Q = policy.kind == PolicyKind::no_cluster_maxmin ? 1 : policy.Q;
      const auto points = embed_phases(estimates);
      const auto assignment = lloyd_cluster(points, Q, block_rng.substream(3));
      auto [selected, members] = select_cluster(assignment);
      (void)selected;
      rec.members = members;
      RobustInstance instance;
      instance.K = cfg.K;
      instance.P = cfg.P;
      for (int i : members) {
        instance.members.push_back(estimates[i].to_complex());
        instance.eps.push_back(epsilon);
      }
      const BeamSolution sol = solve_maxmin(instance);
      rec.t_star = sol.t_star;
      beam = sol.beam;
      break;
    }
    case PolicyKind::best_channel: {
      std::vector<Eigen::VectorXcd> hs;
      hs.reserve(estimates.size());
      for (const auto& e : estimates) hs.push_back(e.to_complex());
      const int best = best_channel_member(hs);
      rec.members = {best};
      beam = mrt_beam(hs[best], cfg.P);
      break;
    }
    case PolicyKind::round_robin:
      rec.members = {target};
      beam = mrt_beam(estimates[target].to_complex(), cfg.P);
      break;
    case PolicyKind::random_beam: {
      Rng policy_rng = block_rng.substream(2);
      beam = random_beam(cfg.K, cfg.P, policy_rng);
      break;
    }
    case PolicyKind::mrt_perfect_csi:
      rec.members = {target};
      beam = mrt_beam(channels[target].to_complex(), cfg.P);
      break;
    case PolicyKind::mrt_estimated:
      rec.members = {target};
      beam = mrt_beam(estimates[target].to_complex(), cfg.P);
      break;
    case PolicyKind::egt_estimated:
      rec.members = {target};
      beam = egt_beam(estimates[target].to_complex(), cfg.P);
      break;
  }

  const CovarianceMatrix C = CovarianceMatrix::from_beam(beam);
  rec.energies.resize(N);
  for (int i = 0; i < N; ++i) rec.energies[i] = noiseless_rssi(channels[i], C, cfg.xi);
  return rec;
}

std::vector<ErrorSweepRow> sweep_error_vs_feedback(const SystemConfig& cfg,
                                                   const std::vector<int>& L_grid, int trials,
                                                   int workers) {
  cfg.validate();
  for (int L : L_grid)
    if (L < 3) throw std::invalid_argument("sweep_error_vs_feedback: insufficient training length (L must be >= 3)");

  const Rng master(cfg.rng_seed);

  struct TrialOut {
    double phase_err = 0.0, mag_err = 0.0;
    double mrt = 0.0, egt = 0.0, perfect = 0.0;
  };

  std::vector<ErrorSweepRow> rows;
  for (std::size_t li = 0; li < L_grid.size(); ++li) {
    const int L = L_grid[li];
    const TrainingSchedule schedule = build_schedule(cfg, L);
    std::vector<TrialOut> outs(trials);

    parallel_for(trials, workers, [&](int t) {
      // Channels keyed by trial only: common random numbers across L points.
      Rng chan_rng = master.substream(0xCAFE, static_cast<std::uint64_t>(t));
      const auto channels = draw_channels(cfg, chan_rng);
      const NoiseModel noise = sigma2_from_snr(cfg, channels, schedule);

      Rng noise_rng = master.substream(0xF00D + li, static_cast<std::uint64_t>(t));
      const auto feedback = collect_feedback(channels, schedule, cfg, noise, noise_rng);
      const auto estimates = estimate_channels(feedback, schedule, cfg).first;
      const auto metrics = estimation_error_metrics(estimates, channels);

      TrialOut o;
      for (const auto& m : metrics) {
        o.phase_err += m.phase_error_pct / metrics.size();
        o.mag_err += m.magnitude_error_pct / metrics.size();
      }
      const auto& h0 = channels[0];
      const auto hest0 = estimates[0].to_complex();
      o.perfect = noiseless_rssi(h0, CovarianceMatrix::from_beam(mrt_beam(h0.to_complex(), cfg.P)), cfg.xi);
      o.mrt = noiseless_rssi(h0, CovarianceMatrix::from_beam(mrt_beam(hest0, cfg.P)), cfg.xi);
      o.egt = noiseless_rssi(h0, CovarianceMatrix::from_beam(egt_beam(hest0, cfg.P)), cfg.xi);
      outs[t] = o;
    });

    KahanSum phase, mag, mrt, egt, perfect;
    for (const auto& o : outs) {
      phase.add(o.phase_err);
      mag.add(o.mag_err);
      mrt.add(o.mrt);
      egt.add(o.egt);
      perfect.add(o.perfect);
    }
    ErrorSweepRow row;
    row.L = L;
    row.trials = trials;
    row.phase_error_pct = phase.value() / trials;
    row.magnitude_error_pct = mag.value() / trials;
    row.mrt_energy = mrt.value() / trials;
    row.egt_energy = egt.value() / trials;
    row.perfect_energy = perfect.value() / trials;
    row.mrt_loss_pct = 100.0 * (row.perfect_energy - row.mrt_energy) / row.perfect_energy;
    row.egt_loss_pct = 100.0 * (row.perfect_energy - row.egt_energy) / row.perfect_energy;
    rows.push_back(row);
  }
  return rows;
}

double jain_index(const std::vector<long>& counts) {
  double sum = 0.0, sq = 0.0;
  for (long c : counts) {
    sum += static_cast<double>(c);
    sq += static_cast<double>(c) * static_cast<double>(c);
  }
  if (sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(counts.size()) * sq);
}

std::vector<HarvestSweepRow> sweep_harvest_vs_clusters(const SystemConfig& cfg,
                                                       const std::vector<int>& Q_grid,
                                                       const std::vector<int>& N_grid,
                                                       const std::vector<int>& K_grid,
                                                       int L, int trials,
                                                       std::optional<double> fixed_epsilon,
                                                       double epsilon_percentile, int workers) {
  if (Q_grid.empty() || N_grid.empty() || K_grid.empty())
    throw std::invalid_argument("sweep_harvest_vs_clusters: empty grid");
  for (int Q : Q_grid)
    for (int N : N_grid)
      if (Q > N) throw std::invalid_argument("sweep_harvest_vs_clusters: Q exceeds N");

  const Rng master(cfg.rng_seed);

  std::vector<SchedulerPolicy> policies;
  for (int Q : Q_grid)
    policies.push_back(Q == 1 ? SchedulerPolicy{PolicyKind::no_cluster_maxmin, 1}
                              : SchedulerPolicy{PolicyKind::proposed_cluster, Q});
  policies.push_back({PolicyKind::best_channel, 1});
  policies.push_back({PolicyKind::random_beam, 1});
  policies.push_back({PolicyKind::round_robin, 1});

  struct TrialOut {
    double mean_all = 0.0, mean_members = 0.0, t_star = 0.0;
    std::vector<int> members;
  };

  std::vector<HarvestSweepRow> rows;
  std::uint64_t point_id = 0;
  for (int K : K_grid) {
    for (int N : N_grid) {
      SystemConfig point_cfg = cfg;
      point_cfg.K = K;
      point_cfg.N = N;
      point_cfg.validate();
      const TrainingSchedule schedule = build_schedule(point_cfg, L);

      double epsilon;
      if (fixed_epsilon) {
        epsilon = *fixed_epsilon;
      } else {
        // Pilot batch fixes the noise level used for the bound calibration.
        Rng pilot = master.substream(0xE9, point_id);
        const auto pilot_channels = draw_channels(point_cfg, pilot);
        const NoiseModel pilot_noise = sigma2_from_snr(point_cfg, pilot_channels, schedule);
        Rng calib = master.substream(0xEA, point_id);
        const auto bounds =
            calibrate_epsilon(point_cfg, L, pilot_noise, 200, epsilon_percentile, calib);
        epsilon = bounds[0].epsilon;
      }

      std::vector<std::vector<TrialOut>> outs(policies.size(), std::vector<TrialOut>(trials));
      parallel_for(trials, workers, [&](int t) {
        const Rng block_rng = master.substream(point_id, static_cast<std::uint64_t>(t));
        Rng chan_rng = block_rng.substream(0);
        const auto channels = draw_channels(point_cfg, chan_rng);
        const NoiseModel noise = sigma2_from_snr(point_cfg, channels, schedule);

        std::uint64_t expect_hash = 0;
        for (std::size_t p = 0; p < policies.size(); ++p) {
          const TrialRecord rec =
              run_block(channels, policies[p], point_cfg, L, noise, epsilon, block_rng, t);
          if (needs_training(policies[p].kind)) {
            if (expect_hash == 0) expect_hash = rec.draw_hash;
            else if (rec.draw_hash != expect_hash)
              throw std::logic_error("sweep_harvest_vs_clusters: common-random-numbers violated");
          }
          TrialOut o;
          o.mean_all = rec.energies.mean();
          if (!rec.members.empty()) {
            for (int i : rec.members) o.mean_members += rec.energies[i];
            o.mean_members /= rec.members.size();
          }
          o.t_star = rec.t_star;
          o.members = rec.members;
          outs[p][t] = std::move(o);
        }
      });

      for (std::size_t p = 0; p < policies.size(); ++p) {
        KahanSum all, mem, ts;
        std::vector<long> counts(N, 0);
        for (const auto& o : outs[p]) {
          all.add(o.mean_all);
          mem.add(o.mean_members);
          ts.add(o.t_star);
          for (int i : o.members) ++counts[i];
        }
        HarvestSweepRow row;
        row.K = K;
        row.N = N;
        row.policy = policies[p].name();
        row.mean_energy_all = all.value() / trials;
        row.mean_energy_members = mem.value() / trials;
        row.mean_t_star = ts.value() / trials;
        row.jain = jain_index(counts);
        row.epsilon = epsilon;
        row.trials = trials;
        rows.push_back(std::move(row));
      }
      ++point_id;
    }
  }
  return rows;
}

FairnessReport fairness_report(const std::vector<TrialRecord>& records, int N) {
  if (static_cast<int>(records.size()) < 500)
    throw std::invalid_argument("fairness_report: need at least 500 blocks");
  FairnessReport rep;
  rep.blocks = static_cast<int>(records.size());
  rep.counts.assign(N, 0);
  long total = 0;
  for (const auto& rec : records) {
    for (int i : rec.members) {
      ++rep.counts[i];
      ++total;
    }
  }
  rep.frequency.resize(N);
  for (int i = 0; i < N; ++i)
    rep.frequency[i] = total > 0 ? static_cast<double>(rep.counts[i]) / total : 0.0;
  rep.jain = jain_index(rep.counts);
  const double expected = static_cast<double>(total) / N;
  rep.chi_square = 0.0;
  if (expected > 0.0)
    for (long c : rep.counts) {
      const double d = static_cast<double>(c) - expected;
      rep.chi_square += d * d / expected;
    }
  return rep;
}

void write_error_sweep_csv(const std::vector<ErrorSweepRow>& rows, std::ostream& out) {
  out << "L,phase_error_pct,magnitude_error_pct,mrt_energy,egt_energy,perfect_energy,"
         "mrt_loss_pct,egt_loss_pct,trials\n";
  char buf[320];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.L,
                  r.phase_error_pct, r.magnitude_error_pct, r.mrt_energy, r.egt_energy,
                  r.perfect_energy, r.mrt_loss_pct, r.egt_loss_pct, r.trials);
    out << buf;
  }
}

void write_harvest_sweep_csv(const std::vector<HarvestSweepRow>& rows, std::ostream& out) {
  out << "K,N,policy,mean_energy_all,mean_energy_members,mean_t_star,jain,epsilon,trials\n";
  char buf[320];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.K, r.N,
                  r.policy.c_str(), r.mean_energy_all, r.mean_energy_members, r.mean_t_star,
                  r.jain, r.epsilon, r.trials);
    out << buf;
  }
}

}  // namespace wetsim
