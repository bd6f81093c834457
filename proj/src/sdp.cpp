#include "wetsim/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace wetsim {

std::vector<LmiBlock> build_lmi(const RobustInstance& instance) {
  instance.validate();
  std::vector<LmiBlock> blocks;
  blocks.reserve(instance.members.size());
  for (int i = 0; i < static_cast<int>(instance.members.size()); ++i)
    blocks.push_back({i, instance.members[i], instance.eps[i]});
  return blocks;
}

Eigen::MatrixXd to_real_embedding(const Eigen::MatrixXcd& H) {
  const Eigen::Index n = H.rows();
  Eigen::MatrixXd E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return E;
}

namespace {

// Variable layout: K diagonal entries of C, then (re, im) pairs for each
// off-diagonal k < l in row-major order, then t, then the m multipliers.
struct Layout {
  int K = 0;
  int m = 0;
  int n_c = 0;  // K*K real parameters of Hermitian C
  int idx_t = 0;

  explicit Layout(int K_, int m_) : K(K_), m(m_), n_c(K_ * K_), idx_t(K_ * K_) {}
  int idx_mu(int i) const { return idx_t + 1 + i; }
  int size() const { return idx_t + 1 + m; }

  // Hermitian basis element for C-parameter d.
  Eigen::MatrixXcd basis(int d) const {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(K, K);
    if (d < K) {
      B(d, d) = 1.0;
      return B;
    }
    int off = d - K;
    const int pair = off / 2;
    const bool imag_part = (off % 2) == 1;
    int idx = 0;
    for (int k = 0; k < K; ++k) {
      for (int l = k + 1; l < K; ++l, ++idx) {
        if (idx == pair) {
          if (!imag_part) {
            B(k, l) = 1.0;
            B(l, k) = 1.0;
          } else {
            B(k, l) = std::complex<double>(0.0, 1.0);
            B(l, k) = std::complex<double>(0.0, -1.0);
          }
          return B;
        }
      }
    }
    throw std::logic_error("Layout::basis: index out of range");
  }

  Eigen::MatrixXcd c_from(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(K, K);
    for (int k = 0; k < K; ++k) C(k, k) = x[k];
    int d = K;
    for (int k = 0; k < K; ++k) {
      for (int l = k + 1; l < K; ++l) {
        C(k, l) = std::complex<double>(x[d], x[d + 1]);
        C(l, k) = std::conj(C(k, l));
        d += 2;
      }
    }
    return C;
  }

  void c_into(const Eigen::MatrixXcd& C, Eigen::VectorXd& x) const {
    for (int k = 0; k < K; ++k) x[k] = C(k, k).real();
    int d = K;
    for (int k = 0; k < K; ++k) {
      for (int l = k + 1; l < K; ++l) {
        x[d] = C(k, l).real();
        x[d + 1] = C(k, l).imag();
        d += 2;
      }
    }
  }
};

// One PSD barrier term: S(x) = sum over active vars of x[var] * coeff.
struct BarrierBlock {
  std::vector<int> vars;
  std::vector<Eigen::MatrixXd> coeffs;
  int dim = 0;

  Eigen::MatrixXd assemble(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < vars.size(); ++j) S += x[vars[j]] * coeffs[j];
    return S;
  }
};

struct BarrierModel {
  Layout layout;
  std::vector<BarrierBlock> blocks;  // one per member, then the C-PSD block
  double P = 0.0;
  double nu = 0.0;  // total barrier parameter

  explicit BarrierModel(const SdpProblem& problem) : layout(problem.K, static_cast<int>(problem.blocks.size())), P(problem.P) {
    const int K = problem.K;
    const int m = layout.m;

    for (int i = 0; i < m; ++i) {
      const auto& lmi = problem.blocks[i];
      BarrierBlock b;
      b.dim = 2 * (K + 1);
      for (int d = 0; d < layout.n_c; ++d) {
        const Eigen::MatrixXcd E = layout.basis(d);
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K + 1, K + 1);
        T.topLeftCorner(K, K) = E;
        T.block(0, K, K, 1) = E * lmi.h;
        T.block(K, 0, 1, K) = (E * lmi.h).adjoint();
        const std::complex<double> q = lmi.h.adjoint() * E * lmi.h;
        T(K, K) = q.real();
        b.vars.push_back(d);
        b.coeffs.push_back(to_real_embedding(T));
      }
      {
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K + 1, K + 1);
        T(K, K) = -1.0;
        b.vars.push_back(layout.idx_t);
        b.coeffs.push_back(to_real_embedding(T));
      }
      {
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K + 1, K + 1);
        T.topLeftCorner(K, K) = Eigen::MatrixXcd::Identity(K, K);
        T(K, K) = -lmi.eps * lmi.eps;
        b.vars.push_back(layout.idx_mu(i));
        b.coeffs.push_back(to_real_embedding(T));
      }
      blocks.push_back(std::move(b));
    }

    // C itself must stay PSD.
    BarrierBlock c_block;
    c_block.dim = 2 * K;
    for (int d = 0; d < layout.n_c; ++d) {
      c_block.vars.push_back(d);
      c_block.coeffs.push_back(to_real_embedding(layout.basis(d)));
    }
    blocks.push_back(std::move(c_block));

    nu = m * 2.0 * (K + 1) + 2.0 * K + 1.0 + m;
  }

  double trace_slack(const Eigen::VectorXd& x) const {
    double tr = 0.0;
    for (int k = 0; k < layout.K; ++k) tr += x[k];
    return P - tr;
  }

  // Returns false when any barrier term leaves the cone.
  bool feasible(const Eigen::VectorXd& x) const {
    if (trace_slack(x) <= 0.0) return false;
    for (int i = 0; i < layout.m; ++i)
      if (x[layout.idx_mu(i)] <= 0.0) return false;
    for (const auto& b : blocks) {
      Eigen::LLT<Eigen::MatrixXd> llt(b.assemble(x));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Barrier objective -kappa*t + Phi(x); +inf outside the domain.
  double value(const Eigen::VectorXd& x, double kappa) const {
    const double s = trace_slack(x);
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    double f = -kappa * x[layout.idx_t] - std::log(s);
    for (int i = 0; i < layout.m; ++i) {
      const double mu = x[layout.idx_mu(i)];
      if (mu <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(mu);
    }
    for (const auto& b : blocks) {
      Eigen::LLT<Eigen::MatrixXd> llt(b.assemble(x));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const Eigen::MatrixXd& Lm = llt.matrixLLT();
      double logdet = 0.0;
      for (int a = 0; a < b.dim; ++a) logdet += std::log(Lm(a, a));
      f -= 2.0 * logdet;
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& x, double kappa, Eigen::VectorXd& g,
                   Eigen::MatrixXd& H) const {
    const int n = layout.size();
    g.setZero(n);
    H.setZero(n, n);
    g[layout.idx_t] = -kappa;

    const double s = trace_slack(x);
    for (int k = 0; k < layout.K; ++k) {
      g[k] += 1.0 / s;
      for (int l = 0; l < layout.K; ++l) H(k, l) += 1.0 / (s * s);
    }
    for (int i = 0; i < layout.m; ++i) {
      const double mu = x[layout.idx_mu(i)];
      g[layout.idx_mu(i)] -= 1.0 / mu;
      H(layout.idx_mu(i), layout.idx_mu(i)) += 1.0 / (mu * mu);
    }

    std::vector<Eigen::MatrixXd> M;
    for (const auto& b : blocks) {
      Eigen::LLT<Eigen::MatrixXd> llt(b.assemble(x));
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("sdp: derivative evaluation outside the cone");
      const Eigen::MatrixXd Sinv =
          llt.solve(Eigen::MatrixXd::Identity(b.dim, b.dim));
      const std::size_t na = b.vars.size();
      M.assign(na, Eigen::MatrixXd());
      for (std::size_t j = 0; j < na; ++j) {
        M[j].noalias() = Sinv * b.coeffs[j];
        g[b.vars[j]] -= M[j].trace();
      }
      for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t k = j; k < na; ++k) {
          const double v = M[j].cwiseProduct(M[k].transpose()).sum();
          H(b.vars[j], b.vars[k]) += v;
          if (k != j) H(b.vars[k], b.vars[j]) += v;
        }
      }
    }
  }
};

}  // namespace

InteriorPoint initial_point(const SdpProblem& problem) {
  const int K = problem.K;
  InteriorPoint p;
  p.C = (problem.P / (2.0 * K)) * Eigen::MatrixXcd::Identity(K, K);
  p.mu = Eigen::VectorXd::Constant(problem.blocks.size(), problem.P);
  double max_h2 = 0.0, max_e2 = 0.0;
  for (const auto& b : problem.blocks) {
    max_h2 = std::max(max_h2, b.h.squaredNorm());
    max_e2 = std::max(max_e2, b.eps * b.eps);
  }
  p.t = -(1.0 + problem.P * max_h2 + problem.P);

  // Strict positivity holds for moderate eps; push t down if it does not.
  BarrierModel model(problem);
  Eigen::VectorXd x(model.layout.size());
  model.layout.c_into(p.C, x);
  x[model.layout.idx_t] = p.t;
  for (int i = 0; i < model.layout.m; ++i) x[model.layout.idx_mu(i)] = p.mu[i];
  for (int attempt = 0; attempt < 64 && !model.feasible(x); ++attempt) {
    p.t -= std::max(1.0, problem.P * (1.0 + max_e2));
    p.t *= 2.0;
    x[model.layout.idx_t] = p.t;
  }
  if (!model.feasible(x)) throw std::runtime_error("sdp: failed to construct interior point");
  return p;
}

SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings) {
  BarrierModel model(problem);
  const Layout& lay = model.layout;
  const int n = lay.size();

  const InteriorPoint start = initial_point(problem);
  Eigen::VectorXd x(n);
  lay.c_into(start.C, x);
  x[lay.idx_t] = start.t;
  for (int i = 0; i < lay.m; ++i) x[lay.idx_mu(i)] = start.mu[i];

  SdpSolution sol;
  sol.status = SdpStatus::max_iterations;

  const auto scale = [&](double t) { return std::max({1.0, std::abs(t), problem.P}); };

  Eigen::VectorXd g(n), dx(n);
  Eigen::MatrixXd H(n, n);
  double kappa = 1.0;
  bool stalled = false;

  for (int outer = 0; outer < settings.max_iter; ++outer) {
    int newton_steps = 0;
    for (int inner = 0; inner < 80; ++inner) {
      model.derivatives(x, kappa, g, H);

      // Newton direction, with a diagonal bump if the factorization balks.
      double bump = 0.0;
      for (;;) {
        Eigen::MatrixXd Hb = H;
        if (bump > 0.0) Hb.diagonal().array() += bump;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Hb);
        if (ldlt.info() == Eigen::Success) {
          dx = ldlt.solve(-g);
          if (dx.dot(g) < 0.0 && dx.allFinite()) break;
        }
        bump = (bump == 0.0) ? 1e-10 * std::max(1.0, H.diagonal().maxCoeff()) : bump * 100.0;
        if (bump > 1e20) {
          stalled = true;
          break;
        }
      }
      if (stalled) break;

      const double decrement2 = -g.dot(dx);
      if (decrement2 * 0.5 < 1e-10 * std::max(1.0, kappa)) break;

      // Backtracking line search inside the cone.
      const double f0 = model.value(x, kappa);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        Eigen::VectorXd xn = x + alpha * dx;
        const double fn = model.value(xn, kappa);
        if (fn < f0 + 0.25 * alpha * g.dot(dx)) {
          x = std::move(xn);
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++newton_steps;
      if (!moved) {
        stalled = true;
        break;
      }
    }

    const double t = x[lay.idx_t];
    const double gap = (model.nu / kappa) / scale(t);
    sol.log.push_back({kappa, t, gap, newton_steps});

    if (stalled) {
      sol.status = SdpStatus::numerical_failure;
      break;
    }
    if (gap <= settings.tol) {
      sol.status = SdpStatus::optimal;
      break;
    }
    kappa *= 10.0;
  }

  sol.C = lay.c_from(x);
  sol.t = x[lay.idx_t];
  sol.mu.resize(lay.m);
  for (int i = 0; i < lay.m; ++i) sol.mu[i] = x[lay.idx_mu(i)];
  sol.gap = sol.log.empty() ? std::numeric_limits<double>::infinity() : sol.log.back().gap;
  return sol;
}

CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                    double tol, int sphere_samples, std::uint64_t sample_seed) {
  CertificateReport report;
  const double scale = std::max({1.0, std::abs(solution.t), problem.P});

  for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
    const auto& b = problem.blocks[i];
    const Eigen::MatrixXcd T = b.evaluate(solution.C, solution.t, solution.mu[i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    report.add("block_" + std::to_string(i) + "_psd", min_eig >= -tol * scale, min_eig);
  }

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(solution.C, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    report.add("covariance_psd", min_eig >= -tol * scale, min_eig);
    const double tr = solution.C.real().trace();
    report.add("trace_cap", tr <= problem.P * (1.0 + tol), tr);
  }
  for (int i = 0; i < solution.mu.size(); ++i)
    report.add("mu_" + std::to_string(i) + "_sign", solution.mu[i] >= -tol, solution.mu[i]);

  // Sampled worst-case perturbations on each error sphere.
  Rng rng(sample_seed);
  for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
    const auto& b = problem.blocks[i];
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < sphere_samples; ++s) {
      Eigen::VectorXcd eta(problem.K);
      for (int k = 0; k < problem.K; ++k) eta[k] = std::complex<double>(rng.normal(), rng.normal());
      const double nrm = eta.norm();
      if (nrm > 0.0) eta *= b.eps / nrm;
      const Eigen::VectorXcd h = b.h + eta;
      const std::complex<double> q = h.adjoint() * solution.C * h;
      worst = std::min(worst, q.real());
    }
    report.add("worst_case_" + std::to_string(i), worst >= solution.t - tol * scale, worst);
  }
  return report;
}

std::string problem_to_json(const SdpProblem& problem) {
  nlohmann::json j;
  j["K"] = problem.K;
  j["P"] = problem.P;
  j["members"] = nlohmann::json::array();
  for (const auto& b : problem.blocks) {
    nlohmann::json m;
    std::vector<double> re(problem.K), im(problem.K);
    for (int k = 0; k < problem.K; ++k) {
      re[k] = b.h[k].real();
      im[k] = b.h[k].imag();
    }
    m["h_re"] = re;
    m["h_im"] = im;
    m["eps"] = b.eps;
    j["members"].push_back(std::move(m));
  }
  return j.dump(2);
}

SdpProblem problem_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RobustInstance inst;
  inst.K = j.at("K").get<int>();
  inst.P = j.at("P").get<double>();
  for (const auto& m : j.at("members")) {
    const auto re = m.at("h_re").get<std::vector<double>>();
    const auto im = m.at("h_im").get<std::vector<double>>();
    if (re.size() != im.size() || static_cast<int>(re.size()) != inst.K)
      throw std::invalid_argument("problem_from_json: member dimension mismatch");
    Eigen::VectorXcd h(inst.K);
    for (int k = 0; k < inst.K; ++k) h[k] = std::complex<double>(re[k], im[k]);
    inst.members.push_back(std::move(h));
    inst.eps.push_back(m.at("eps").get<double>());
  }
  return SdpProblem::from_instance(inst);
}

std::string solution_to_json(const SdpSolution& solution) {
  nlohmann::json j;
  j["t"] = solution.t;
  j["gap"] = solution.gap;
  j["status"] = solution.status == SdpStatus::optimal         ? "optimal"
                : solution.status == SdpStatus::max_iterations ? "max-iterations"
                                                               : "numerical-failure";
  j["mu"] = std::vector<double>(solution.mu.begin(), solution.mu.end());
  const int K = static_cast<int>(solution.C.rows());
  std::vector<double> cre, cim;
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < K; ++c) {
      cre.push_back(solution.C(r, c).real());
      cim.push_back(solution.C(r, c).imag());
    }
  j["C_re"] = cre;
  j["C_im"] = cim;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : solution.log)
    j["iterations"].push_back({{"kappa", it.kappa}, {"t", it.t}, {"gap", it.gap}, {"newton_steps", it.newton_steps}});
  return j.dump(2);
}

SdpSolution solution_from_json(const std::string& text, int K) {
  const auto j = nlohmann::json::parse(text);
  SdpSolution sol;
  sol.t = j.at("t").get<double>();
  sol.gap = j.value("gap", 0.0);
  const auto status = j.value("status", std::string("optimal"));
  sol.status = status == "optimal"          ? SdpStatus::optimal
               : status == "max-iterations" ? SdpStatus::max_iterations
                                            : SdpStatus::numerical_failure;
  const auto mu = j.at("mu").get<std::vector<double>>();
  sol.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), mu.size());
  const auto cre = j.at("C_re").get<std::vector<double>>();
  const auto cim = j.at("C_im").get<std::vector<double>>();
  if (static_cast<int>(cre.size()) != K * K || cim.size() != cre.size())
    throw std::invalid_argument("solution_from_json: covariance size mismatch");
  sol.C.resize(K, K);
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < K; ++c) sol.C(r, c) = std::complex<double>(cre[r * K + c], cim[r * K + c]);
  return sol;
}

std::string certificate_to_json(const CertificateReport& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
  return j.dump(2);
}

}  // namespace wetsim
