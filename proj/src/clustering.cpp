#include "wetsim/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

namespace wetsim {

std::vector<PhasePoint> embed_phases(const std::vector<ChannelEstimate>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("embed_phases: empty estimate list");
  std::vector<PhasePoint> out;
  out.reserve(estimates.size());
  for (int i = 0; i < static_cast<int>(estimates.size()); ++i) {
    const auto& est = estimates[i];
    PhasePoint p;
    p.receiver = i;
    p.coords.resize(2 * est.phases_rel.size());
    for (Eigen::Index v = 0; v < est.phases_rel.size(); ++v) {
      p.coords[2 * v] = std::cos(est.phases_rel[v]);
      p.coords[2 * v + 1] = std::sin(est.phases_rel[v]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PhasePoint> embed_phases_raw(const std::vector<ChannelEstimate>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("embed_phases_raw: empty estimate list");
  std::vector<PhasePoint> out;
  out.reserve(estimates.size());
  for (int i = 0; i < static_cast<int>(estimates.size()); ++i) {
    PhasePoint p;
    p.receiver = i;
    p.coords = estimates[i].phases_rel.unaryExpr([](double a) { return wrap_2pi(a); });
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

double sqdist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).squaredNorm(); }

struct LloydRun {
  std::vector<int> labels;  // over canonical order
  std::vector<Eigen::VectorXd> centroids;
  double objective = std::numeric_limits<double>::infinity();
};

// One seeded Lloyd run over canonically ordered points.
LloydRun run_lloyd(const std::vector<const Eigen::VectorXd*>& pts, int Q, Rng rng, int max_iter,
                   double tol) {
  const int n = static_cast<int>(pts.size());
  LloydRun run;
  run.centroids.reserve(Q);

  // k-means++ seeding.
  run.centroids.push_back(*pts[rng.index(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(run.centroids.size()) < Q) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : run.centroids) best = std::min(best, sqdist(*pts[i], c));
      d2[i] = best;
      total += best;
    }
    int pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.index(n));
    }
    run.centroids.push_back(*pts[pick]);
  }

  run.labels.assign(n, 0);
  double prev_obj = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assign, ties toward the lowest cluster id.
    bool changed = false;
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sqdist(*pts[i], run.centroids[0]);
      for (int q = 1; q < Q; ++q) {
        const double d = sqdist(*pts[i], run.centroids[q]);
        if (d < best_d) {
          best_d = d;
          best = q;
        }
      }
      obj += best_d;
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }
    run.objective = obj;
    if (obj > prev_obj + 1e-9 * std::max(1.0, prev_obj))
      throw std::logic_error("lloyd_cluster: objective increased");
    prev_obj = obj;

    // Recenter.
    const Eigen::Index dim = pts[0]->size();
    std::vector<Eigen::VectorXd> sums(Q, Eigen::VectorXd::Zero(dim));
    std::vector<int> counts(Q, 0);
    for (int i = 0; i < n; ++i) {
      sums[run.labels[i]] += *pts[i];
      ++counts[run.labels[i]];
    }
    double movement = 0.0;
    for (int q = 0; q < Q; ++q) {
      if (counts[q] == 0) {
        // Re-seed from the point farthest from its centroid.
        int far_i = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = sqdist(*pts[i], run.centroids[run.labels[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        movement = std::max(movement, std::sqrt(sqdist(run.centroids[q], *pts[far_i])));
        run.centroids[q] = *pts[far_i];
        changed = true;
        continue;
      }
      Eigen::VectorXd next = sums[q] / counts[q];
      movement = std::max(movement, std::sqrt(sqdist(run.centroids[q], next)));
      run.centroids[q] = std::move(next);
    }
    if (!changed || movement < tol) break;
  }
  return run;
}

}  // namespace

ClusterAssignment lloyd_cluster(const std::vector<PhasePoint>& points, int Q, const Rng& rng,
                                int max_iter, double tol, int restarts) {
  const int n = static_cast<int>(points.size());
  if (Q < 1) throw std::invalid_argument("lloyd_cluster: Q must be >= 1");
  if (Q > n) throw std::invalid_argument("lloyd_cluster: Q exceeds number of points");
  if (max_iter < 1) throw std::invalid_argument("lloyd_cluster: max_iter must be >= 1");

  // Canonical coordinate-sorted processing order; identical point sets then
  // cluster identically no matter how receivers were numbered.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = points[a].coords;
    const auto& cb = points[b].coords;
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  });
  std::vector<const Eigen::VectorXd*> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = &points[order[i]].coords;

  LloydRun best;
  for (int r = 0; r < restarts; ++r) {
    LloydRun run = run_lloyd(pts, Q, rng.substream(0xc1u, static_cast<std::uint64_t>(r)), max_iter, tol);
    if (run.objective < best.objective) best = std::move(run);
  }

  ClusterAssignment a;
  a.Q = Q;
  a.labels.assign(n, 0);
  for (int i = 0; i < n; ++i) a.labels[points[order[i]].receiver] = best.labels[i];
  a.centroids = best.centroids;
  a.objective = best.objective;

  a.dispersion.assign(Q, 0.0);
  std::vector<int> counts(Q, 0);
  for (int i = 0; i < n; ++i) {
    const int q = a.labels[points[i].receiver];
    a.dispersion[q] += std::sqrt(sqdist(points[i].coords, a.centroids[q]));
    ++counts[q];
  }

  a.selected = -1;
  for (int q = 0; q < Q; ++q) {
    if (counts[q] == 0) continue;
    if (a.selected < 0 || a.dispersion[q] < a.dispersion[a.selected]) a.selected = q;
  }
  return a;
}

std::pair<int, std::vector<int>> select_cluster(const ClusterAssignment& assignment) {
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(assignment.labels.size()); ++i)
    if (assignment.labels[i] == assignment.selected) members.push_back(i);
  return {assignment.selected, members};
}

std::string assignment_to_json(const ClusterAssignment& assignment) {
  nlohmann::json j;
  j["Q"] = assignment.Q;
  j["labels"] = assignment.labels;
  j["centroids"] = nlohmann::json::array();
  for (const auto& c : assignment.centroids)
    j["centroids"].push_back(std::vector<double>(c.begin(), c.end()));
  j["dispersion"] = assignment.dispersion;
  j["selected"] = assignment.selected;
  j["objective"] = assignment.objective;
  j["members"] = select_cluster(assignment).second;
  return j.dump(2);
}

}  // namespace wetsim
