#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "wetsim/beamformer.hpp"

using namespace wetsim;

namespace {

Eigen::VectorXcd random_channel(int K, Rng& rng, double lo = 0.1, double hi = 1.0) {
  Eigen::VectorXcd h(K);
  for (int k = 0; k < K; ++k)
    h[k] = std::polar(rng.uniform(lo, hi), rng.uniform(0.0, 2.0 * M_PI));
  return h;
}

RobustInstance make_instance(std::vector<Eigen::VectorXcd> members, std::vector<double> eps,
                             double P) {
  RobustInstance inst;
  inst.K = static_cast<int>(members[0].size());
  inst.members = std::move(members);
  inst.eps = std::move(eps);
  inst.P = P;
  return inst;
}

double energy(const Eigen::VectorXcd& h, const Eigen::VectorXcd& b) {
  return std::norm(h.dot(b));  // |h' b|^2 (Eigen dot conjugates the left argument)
}

// Worst-case received energy over the eps-sphere, by dense random sampling
// plus the analytic aligned direction.
double sphere_worst(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& C, double eps, Rng& rng,
                    int samples = 4000) {
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd eta(h.size());
    for (int k = 0; k < h.size(); ++k) eta[k] = std::complex<double>(rng.normal(), rng.normal());
    if (eta.norm() > 0) eta *= eps / eta.norm();
    const Eigen::VectorXcd hp = h + eta;
    const std::complex<double> q = hp.adjoint() * C * hp;
    worst = std::min(worst, q.real());
  }
  return worst;
}

// Exact worst case over the closed eps-ball: trust-region subproblem
// min (h+eta)' C (h+eta), eta(lambda) = -(C+lambda I)^{-1} C h with lambda >= 0
// chosen by bisection on ||eta(lambda)|| = eps (C is PD in these tests).
double ball_worst_exact(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& C, double eps) {
  if (eps >= h.norm()) return 0.0;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(h.size(), h.size());
  auto eta_of = [&](double lambda) -> Eigen::VectorXcd {
    return -(C + lambda * I).fullPivLu().solve(C * h);
  };
  double lo = 1e-12, hi = 1.0;
  while (eta_of(hi).norm() > eps) hi *= 2.0;
  while (eta_of(lo).norm() < eps) lo /= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eta_of(mid).norm() > eps ? lo : hi) = mid;
  }
  const Eigen::VectorXcd hp = h + eta_of(0.5 * (lo + hi));
  const std::complex<double> q = hp.adjoint() * C * hp;
  return q.real();
}

}  // namespace

TEST_CASE("lmi zero point and diagonal example") {
  RobustInstance inst = make_instance({Eigen::VectorXcd::Ones(3)}, {0.0}, 1.0);
  const auto blocks = build_lmi(inst);
  REQUIRE(blocks.size() == 1);
  const Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(3, 3);

  const Eigen::MatrixXcd T0 = blocks[0].evaluate(Z, 0.0, 0.0);
  CHECK(T0.norm() == 0.0);

  const Eigen::MatrixXcd T1 = blocks[0].evaluate(Z, 0.0, 1.0);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
  expect.topLeftCorner(3, 3) = Eigen::MatrixXcd::Identity(3, 3);
  CHECK((T1 - expect).norm() < 1e-15);
}

TEST_CASE("lmi matches the displayed block structure") {
  Rng rng(81);
  for (int t = 0; t < 10; ++t) {
    const int K = 2 + static_cast<int>(rng.index(3));
    const auto h = random_channel(K, rng);
    const double eps = rng.uniform(0.0, 0.5);
    RobustInstance inst = make_instance({h}, {eps}, 1.0);
    const auto blocks = build_lmi(inst);

    Eigen::MatrixXcd A(K, K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) A(r, c) = std::complex<double>(rng.normal(), rng.normal());
    const Eigen::MatrixXcd C = A * A.adjoint();
    const double tt = rng.uniform(-1.0, 1.0), mu = rng.uniform(0.0, 2.0);
    const Eigen::MatrixXcd T = blocks[0].evaluate(C, tt, mu);

    CHECK((T.topLeftCorner(K, K) - (mu * Eigen::MatrixXcd::Identity(K, K) + C)).norm() < 1e-12);
    CHECK((T.block(0, K, K, 1) - C * h).norm() < 1e-12);
    CHECK((T - T.adjoint()).norm() < 1e-12);
    const std::complex<double> q = h.adjoint() * C * h;
    CHECK(std::abs(T(K, K) - (q.real() - tt - mu * eps * eps)) < 1e-12);
  }
}

TEST_CASE("lmi feasibility boundary matches the sphere worst case") {
  // For a single member the S-procedure says: exists mu >= 0 with T PSD
  // iff t <= min over ||eta|| <= eps of (h+eta)' C (h+eta).
  Rng rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 2;
    const auto h = random_channel(K, rng, 0.4, 1.0);
    const double eps = rng.uniform(0.05, 0.3);
    Eigen::MatrixXcd A(K, K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) A(r, c) = std::complex<double>(rng.normal(), rng.normal());
    const Eigen::MatrixXcd C = A * A.adjoint();
    const double worst = ball_worst_exact(h, C, eps);
    // The dense sampler can only overshoot the exact minimum.
    CHECK(sphere_worst(h, C, eps, rng, 20000) >= worst - 1e-12);

    RobustInstance inst = make_instance({h}, {eps}, 10.0);
    const auto block = build_lmi(inst)[0];
    auto exists_mu = [&](double t) {
      for (double mu = 1e-8; mu < 1e6; mu *= 1.05) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block.evaluate(C, t, mu),
                                                           Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() >= -1e-9) return true;
      }
      return false;
    };
    CHECK(exists_mu(worst - 1e-4));
    CHECK_FALSE(exists_mu(worst + 1e-3));
  }
}

TEST_CASE("single-member exact-CSI optimum") {
  Eigen::VectorXcd h(2);
  h << 1.0, 0.0;
  const auto sol = solve_maxmin(make_instance({h}, {0.0}, 1.0));
  CHECK(std::abs(sol.t_star - 1.0) <= 1e-5);
  CHECK(std::abs(sol.C.entries(0, 0).real() - 1.0) <= 1e-4);
  CHECK(std::abs(sol.C.entries(1, 1).real()) <= 1e-4);
  CHECK(sol.rank_ratio <= 1e-3);
  CHECK(std::abs(sol.beam.squaredNorm() - sol.C.entries.real().trace()) < 1e-9);
}

TEST_CASE("single-member robust optimum P(||h||-eps)^2") {
  Rng rng(89);
  for (int t = 0; t < 5; ++t) {
    const int K = 2 + static_cast<int>(rng.index(2));
    const auto h = random_channel(K, rng, 0.4, 1.0);
    const double eps = rng.uniform(0.0, 0.5 * h.norm());
    const double P = rng.uniform(0.5, 2.0);
    const auto sol = solve_maxmin(make_instance({h}, {eps}, P));
    const double expect = P * (h.norm() - eps) * (h.norm() - eps);
    CHECK(sol.t_star == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("orthogonal pair splits the budget with C = I/2") {
  Eigen::VectorXcd h1(2), h2(2);
  h1 << 1.0, 0.0;
  h2 << 0.0, 1.0;
  const auto sol = solve_maxmin(make_instance({h1, h2}, {0.0, 0.0}, 1.0));
  CHECK(std::abs(sol.t_star - 0.5) <= 1e-5);
  CHECK((sol.C.entries - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-3);
}

TEST_CASE("worst-case sphere certification") {
  Rng rng(97);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 3;
    const int m = 1 + static_cast<int>(rng.index(3));
    std::vector<Eigen::VectorXcd> members;
    std::vector<double> eps;
    for (int i = 0; i < m; ++i) {
      members.push_back(random_channel(K, rng));
      eps.push_back(rng.uniform(0.0, 0.2));
    }
    const double P = 1.0;
    const auto inst = make_instance(members, eps, P);
    const auto sol = solve_maxmin(inst);
    for (int i = 0; i < m; ++i) {
      const double worst = sphere_worst(members[i], sol.C.entries, eps[i], rng, 1000);
      CHECK(worst >= sol.t_star - 1e-5 * P);
    }
  }
}

TEST_CASE("t* non-increasing in eps") {
  Rng rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 2;
    const auto h1 = random_channel(K, rng);
    const auto h2 = random_channel(K, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double e : {0.0, 0.15, 0.3}) {
      const auto sol = solve_maxmin(make_instance({h1, h2}, {e, e}, 1.0));
      CHECK(sol.t_star <= prev + 1e-7);
      prev = sol.t_star;
    }
  }
}

TEST_CASE("doubling P doubles t*") {
  Rng rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 3;
    std::vector<Eigen::VectorXcd> members{random_channel(K, rng), random_channel(K, rng)};
    std::vector<double> eps{0.1, 0.05};
    const auto a = solve_maxmin(make_instance(members, eps, 1.0));
    const auto b = solve_maxmin(make_instance(members, eps, 2.0));
    CHECK(b.t_star == doctest::Approx(2.0 * a.t_star).epsilon(1e-6));
  }
}

TEST_CASE("rank ratio small on most instances") {
  // Members drawn the way the pipeline produces them: a phase cluster, so the
  // channels are directionally aligned and the rank-one claim applies.
  Rng rng(107);
  int small = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const int K = 4;
    const int m = 1 + static_cast<int>(rng.index(K));  // |Q*| <= K
    Eigen::VectorXd base_phase(K);
    for (int k = 0; k < K; ++k) base_phase[k] = rng.uniform(0.0, 2.0 * M_PI);
    std::vector<Eigen::VectorXcd> members;
    std::vector<double> eps;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXcd h(K);
      for (int k = 0; k < K; ++k)
        h[k] = std::polar(rng.uniform(0.1, 1.0), base_phase[k] + rng.uniform(-0.3, 0.3));
      members.push_back(h);
      eps.push_back(rng.uniform(0.0, 0.15));
    }
    const auto sol = solve_maxmin(make_instance(members, eps, 1.0));
    if (sol.rank_ratio <= 1e-3) ++small;
  }
  CHECK(small >= static_cast<int>(0.95 * trials));
}

TEST_CASE("adding a member never increases t*") {
  Rng rng(109);
  for (int trial = 0; trial < 8; ++trial) {
    const int K = 3;
    std::vector<Eigen::VectorXcd> members{random_channel(K, rng), random_channel(K, rng)};
    std::vector<double> eps{0.1, 0.1};
    const auto base = solve_maxmin(make_instance(members, eps, 1.0));
    members.push_back(random_channel(K, rng));
    eps.push_back(0.1);
    const auto bigger = solve_maxmin(make_instance(members, eps, 1.0));
    CHECK(bigger.t_star <= base.t_star + 1e-6);
  }
}

TEST_CASE("mrt beam worked example and properties") {
  Eigen::VectorXcd h(2);
  h << 1.0, 0.0;
  const auto b = mrt_beam(h, 4.0);
  CHECK(std::abs(b[0] - 2.0) < 1e-12);
  CHECK(std::abs(b[1]) < 1e-12);

  Rng rng(113);
  for (int t = 0; t < 10; ++t) {
    const auto hh = random_channel(3, rng);
    const double P = rng.uniform(0.5, 3.0);
    CHECK(energy(hh, mrt_beam(hh, P)) == doctest::Approx(P * hh.squaredNorm()).epsilon(1e-10));
    // Common phase rotation leaves energy unchanged.
    const auto rotated = hh * std::polar(1.0, rng.uniform(0.0, 6.28));
    CHECK(energy(hh, mrt_beam(rotated, P)) ==
          doctest::Approx(P * hh.squaredNorm()).epsilon(1e-10));
  }
  CHECK_THROWS_AS(mrt_beam(Eigen::VectorXcd::Zero(2), 1.0), std::invalid_argument);
}

TEST_CASE("egt beam worked examples") {
  Eigen::VectorXcd h(2);
  h << 1.0, 1.0;
  const auto b = egt_beam(h, 2.0);
  CHECK(std::abs(b[0] - 1.0) < 1e-12);
  CHECK(std::abs(b[1] - 1.0) < 1e-12);

  // Equal magnitudes: EGT energy equals MRT energy.
  Rng rng(127);
  Eigen::VectorXcd he(2);
  he << std::polar(1.0, 0.7), std::polar(1.0, 2.1);
  CHECK(energy(he, egt_beam(he, 2.0)) == doctest::Approx(energy(he, mrt_beam(he, 2.0))).epsilon(1e-10));

  // Magnitudes (1, 0.1): MRT/EGT ratio = ||h||^2 K / (sum |h_k|)^2.
  Eigen::VectorXcd hu(2);
  hu << std::polar(1.0, 0.3), std::polar(0.1, 1.9);
  const double ratio = energy(hu, mrt_beam(hu, 1.0)) / energy(hu, egt_beam(hu, 1.0));
  CHECK(ratio == doctest::Approx(1.01 * 2.0 / (1.1 * 1.1)).epsilon(1e-10));
  CHECK(ratio == doctest::Approx(1.669).epsilon(1e-3));

  // EGT received energy at the true channel: (P/K)(sum |h_k|)^2.
  const auto hr = random_channel(4, rng);
  double mag_sum = 0.0;
  for (int k = 0; k < 4; ++k) mag_sum += std::abs(hr[k]);
  CHECK(energy(hr, egt_beam(hr, 1.6)) == doctest::Approx(1.6 / 4.0 * mag_sum * mag_sum).epsilon(1e-10));
}

TEST_CASE("random beam norm and isotropy") {
  Rng rng(131);
  const int K = 4;
  const double P = 2.5;
  const auto h = random_channel(K, rng);
  double acc = 0.0;
  const int draws = 20000;
  for (int t = 0; t < draws; ++t) {
    const auto b = random_beam(K, P, rng);
    CHECK(b.squaredNorm() == doctest::Approx(P).epsilon(1e-12));
    acc += energy(h, b);
  }
  const double expect = P * h.squaredNorm() / K;
  CHECK(acc / draws == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("best channel member argmax with tie-break") {
  Eigen::VectorXcd a = Eigen::VectorXcd::Ones(2);       // norm sqrt(2)
  Eigen::VectorXcd b = 3.0 * Eigen::VectorXcd::Ones(2); // norm 3 sqrt(2)
  Eigen::VectorXcd c = 2.0 * Eigen::VectorXcd::Ones(2);
  CHECK(best_channel_member({a, b, c}) == 1);
  CHECK(best_channel_member({b, b, a}) == 0);  // tie toward lowest index
  CHECK_THROWS_AS(best_channel_member({}), std::invalid_argument);
}

TEST_CASE("beam solution json fields") {
  Eigen::VectorXcd h(2);
  h << 1.0, 0.5;
  const auto sol = solve_maxmin(make_instance({h}, {0.0}, 1.0));
  const auto j = nlohmann::json::parse(beam_solution_to_json(sol));
  CHECK(j["C_re"].size() == 4);
  CHECK(j["C_im"].size() == 4);
  CHECK(j["beam_re"].size() == 2);
  CHECK(j.contains("t_star"));
  CHECK(j.contains("mu"));
  CHECK(j.contains("rank_ratio"));
  CHECK(j.contains("solver_iterations"));
}
