#pragma once

#include <string>
#include <vector>

#include "wetsim/estimation.hpp"

namespace wetsim {

// Receiver embedded on the unit circle per relative phase: coordinates
// (cos phi_v, sin phi_v) for v = 2..K, so wraparound neighbors stay close.
struct PhasePoint {
  int receiver = 0;
  Eigen::VectorXd coords;  // length 2(K-1)
};

struct ClusterAssignment {
  int Q = 1;
  std::vector<int> labels;                 // receiver -> cluster id
  std::vector<Eigen::VectorXd> centroids;  // Q centroids
  std::vector<double> dispersion;          // per-cluster sum of member-to-centroid distances
  int selected = 0;                        // densest nonempty cluster (lowest id on ties)
  double objective = 0.0;                  // within-cluster sum of squared distances
};

std::vector<PhasePoint> embed_phases(const std::vector<ChannelEstimate>& estimates);

// Raw-phase variant kept for trend comparisons; coordinates are the wrapped
// phases themselves.
std::vector<PhasePoint> embed_phases_raw(const std::vector<ChannelEstimate>& estimates);

// Lloyd iteration with k-means++ seeding and restarts. Processing happens in a
// canonical coordinate-sorted order, so the selected member set does not
// depend on receiver ordering.
ClusterAssignment lloyd_cluster(const std::vector<PhasePoint>& points, int Q, const Rng& rng,
                                int max_iter = 100, double tol = 1e-8, int restarts = 5);

// Densest cluster and its member receivers.
std::pair<int, std::vector<int>> select_cluster(const ClusterAssignment& assignment);

std::string assignment_to_json(const ClusterAssignment& assignment);

}  // namespace wetsim
