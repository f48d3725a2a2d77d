#include "sacov/engine.hpp"

#include <algorithm>
#include <cmath>

namespace sacov {

namespace {

std::vector<long> sorted_checkpoints(const std::vector<int>& path,
                                     const std::vector<long>& checkpoints) {
  if (checkpoints.empty()) {
    throw std::invalid_argument("checkpoint list must be nonempty");
  }
  std::vector<long> ck = checkpoints;
  std::sort(ck.begin(), ck.end());
  if (static_cast<long>(path.size()) < ck.back() + 1) {
    throw std::invalid_argument("path shorter than last checkpoint");
  }
  return ck;
}

void maybe_record(Trajectory& out, const std::vector<long>& checkpoints, long n,
                  const Eigen::VectorXd& theta) {
  if (std::binary_search(checkpoints.begin(), checkpoints.end(), n)) {
    out.push_back({n, theta});
  }
}

}  // namespace

Trajectory run_linear_sa(const LinearSAProblem& problem, const std::vector<int>& path,
                         const std::vector<long>& checkpoints) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const long N = ck.back();
  Trajectory out;
  Eigen::VectorXd theta = problem.theta0;
  maybe_record(out, ck, 0, theta);
  for (long n = 0; n < N; ++n) {
    const double a = problem.gain / static_cast<double>(n + 1);
    theta += a * (problem.A * theta + problem.noise.row(path[n + 1]).transpose());
    maybe_record(out, ck, n + 1, theta);
  }
  return out;
}

Trajectory run_mcmc_average(const StateFunction& F, const std::vector<int>& path,
                            const std::vector<long>& checkpoints) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const long N = ck.back();
  Trajectory out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(F.cols());
  maybe_record(out, ck, 0, theta);
  for (long n = 0; n < N; ++n) {
    theta += (F.row(path[n + 1]).transpose() - theta) / static_cast<double>(n + 1);
    maybe_record(out, ck, n + 1, theta);
  }
  return out;
}

Trajectory run_random_linear_sa(const RandomLinearSAProblem& problem,
                                const std::vector<int>& path,
                                const std::vector<long>& checkpoints) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const long N = ck.back();
  Trajectory out;
  Eigen::VectorXd theta = problem.theta0;
  maybe_record(out, ck, 0, theta);
  for (long n = 0; n < N; ++n) {
    const double a = problem.gain / static_cast<double>(n + 1);
    const Eigen::MatrixXd& An = problem.Amap[path[n + 1]];
    const Eigen::VectorXd& bn = problem.bmap[path[n + 1]];
    theta += a * (An * theta + An * problem.theta_star - bn);
    maybe_record(out, ck, n + 1, theta);
  }
  return out;
}

TDMatrices td_matrices(const TDProblem& problem) {
  const Eigen::MatrixXd& P = problem.state_chain.transition();
  const Eigen::MatrixXd& psi = problem.basis;
  const int S = problem.state_chain.num_states();
  const int d = static_cast<int>(psi.cols());
  const double beta = problem.discount;

  Eigen::VectorXd pi = stationary_dist(problem.state_chain);
  Eigen::MatrixXd gram = psi.transpose() * pi.asDiagonal() * psi;
  if (std::abs(gram.fullPivLu().determinant()) < 1e-12) {
    throw DegenerateBasisError("pi-weighted Gram matrix of the basis is singular");
  }

  TDMatrices out{Eigen::MatrixXd::Zero(d, d),
                 Eigen::VectorXd::Zero(d),
                 Eigen::VectorXd::Zero(d),
                 problem.state_chain,  // placeholder, replaced below
                 Eigen::VectorXd(),
                 {},
                 {}};

  for (int x = 0; x < S; ++x) {
    out.b -= pi(x) * problem.cost(x) * psi.row(x).transpose();
    for (int xp = 0; xp < S; ++xp) {
      out.A += pi(x) * P(x, xp) * psi.row(x).transpose() *
               (beta * psi.row(xp) - psi.row(x));
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(out.A);
  if (!lu.isInvertible()) {
    throw DegenerateBasisError("steady-state TD matrix A is singular");
  }
  out.theta_star = lu.solve(out.b);

  // Pair chain on z = (x_new, x_old), index x_new * S + x_old.
  Eigen::MatrixXd Ppair = Eigen::MatrixXd::Zero(S * S, S * S);
  Eigen::VectorXd pipair(S * S);
  out.Amap.resize(S * S);
  out.bmap.resize(S * S);
  for (int x1 = 0; x1 < S; ++x1) {
    for (int x0 = 0; x0 < S; ++x0) {
      const int z = x1 * S + x0;
      pipair(z) = pi(x0) * P(x0, x1);
      for (int x2 = 0; x2 < S; ++x2) {
        Ppair(z, x2 * S + x1) = P(x1, x2);
      }
      out.Amap[z] = psi.row(x0).transpose() * (beta * psi.row(x1) - psi.row(x0));
      out.bmap[z] = -problem.cost(x0) * psi.row(x0).transpose();
    }
  }
  out.pair_chain = FiniteChain(std::move(Ppair));
  out.pair_stationary = std::move(pipair);
  return out;
}

Trajectory run_td0(const TDProblem& problem, const Eigen::VectorXd& theta0,
                   const std::vector<int>& path, const std::vector<long>& checkpoints) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const Eigen::MatrixXd& psi = problem.basis;
  const double beta = problem.discount;
  const long N = ck.back();
  Trajectory out;
  Eigen::VectorXd theta = theta0;
  maybe_record(out, ck, 0, theta);
  for (long n = 0; n < N; ++n) {
    const int x = path[n], xp = path[n + 1];
    const double a = 1.0 / static_cast<double>(n + 1);
    const double d_td = problem.cost(x) + beta * theta.dot(psi.row(xp)) -
                        theta.dot(psi.row(x));
    theta += a * d_td * psi.row(x).transpose();
    maybe_record(out, ck, n + 1, theta);
  }
  return out;
}

SnrLstdResult run_snr_lstd(const TDProblem& problem, const std::vector<int>& path,
                           const std::vector<long>& checkpoints, double ridge) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const Eigen::MatrixXd& psi = problem.basis;
  const double beta = problem.discount;
  const int d = static_cast<int>(psi.cols());
  const long N = ck.back();

  SnrLstdResult out;
  // theta_0 = Ahat_0^{-1} bhat_0 keeps SNR and LSTD identical at every step.
  // The -I pair counts as one prior observation in the running averages
  // (weights 1/(n+2)), so Ahat never collapses to the rank-deficient early
  // sample averages and the ridge stays dormant on well-posed problems.
  Eigen::MatrixXd Ahat = -Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd bhat = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd theta_snr = Eigen::VectorXd::Zero(d);

  maybe_record(out.snr, ck, 0, theta_snr);
  maybe_record(out.lstd, ck, 0, theta_snr);

  long consecutive_ridged = 0;
  for (long n = 0; n < N; ++n) {
    const int x = path[n], xp = path[n + 1];
    const double a = 1.0 / static_cast<double>(n + 2);
    Eigen::MatrixXd An = psi.row(x).transpose() * (beta * psi.row(xp) - psi.row(x));
    Eigen::VectorXd bn = -problem.cost(x) * psi.row(x).transpose();
    Ahat += a * (An - Ahat);
    bhat += a * (bn - bhat);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ahat,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    Eigen::MatrixXd Ause = Ahat;
    if (smin <= 0.0 || smax / smin > 1e12) {
      Ause += ridge * Eigen::MatrixXd::Identity(d, d);
      out.ridged_steps.push_back(n + 1);
      if (++consecutive_ridged > 1000) {
        throw SingularGainError("Ahat persistently singular", n + 1);
      }
    } else {
      consecutive_ridged = 0;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ause);
    const double d_td = problem.cost(x) + beta * theta_snr.dot(psi.row(xp)) -
                        theta_snr.dot(psi.row(x));
    theta_snr -= a * lu.solve(d_td * psi.row(x).transpose());

    maybe_record(out.snr, ck, n + 1, theta_snr);
    maybe_record(out.lstd, ck, n + 1, lu.solve(bhat));
  }
  return out;
}

DecompositionTrace run_decomposition(const LinearSAProblem& problem,
                                     const PoissonSolution& fhat_sol,
                                     const FiniteChain& chain,
                                     const std::vector<int>& path, long horizon) {
  if (fhat_sol.residual_norm > 1e-8) {
    throw std::invalid_argument("run_decomposition: Poisson residual too large");
  }
  if (static_cast<long>(path.size()) < horizon + 2) {
    throw std::invalid_argument("run_decomposition: path must extend to Phi_{horizon+1}");
  }
  const Eigen::MatrixXd& A = problem.A;
  const int d = static_cast<int>(A.rows());
  const Eigen::MatrixXd& fhat = fhat_sol.fhat;
  const Eigen::MatrixXd Pfhat = chain.transition() * fhat;
  const double g = problem.gain;
  const Eigen::MatrixXd IA = Eigen::MatrixXd::Identity(d, d) + A;

  auto Z = [&](long k) { return fhat.row(path[k]).transpose().eval(); };
  // Martingale increment Delta^m_k = fhat(Phi_k) - (P fhat)(Phi_{k-1}).
  auto dm = [&](long k) {
    return (fhat.row(path[k]) - Pfhat.row(path[k - 1])).transpose().eval();
  };

  DecompositionTrace tr;
  tr.theta.resize(horizon + 1);
  tr.theta_M.resize(horizon + 1);
  tr.theta_T.resize(horizon + 1);
  tr.xi.assign(horizon + 1, Eigen::VectorXd::Zero(d));
  tr.z_path.resize(horizon + 2);
  for (long k = 0; k <= horizon + 1; ++k) tr.z_path[k] = Z(k);

  tr.theta[0] = problem.theta0;
  tr.theta_M[0] = problem.theta0;
  tr.theta_T[0] = Eigen::VectorXd::Zero(d);
  for (long n = 0; n < horizon; ++n) {
    const double a = g / static_cast<double>(n + 1);
    tr.theta[n + 1] =
        tr.theta[n] + a * (A * tr.theta[n] + problem.noise.row(path[n + 1]).transpose());
    tr.theta_M[n + 1] = tr.theta_M[n] + a * (A * tr.theta_M[n] + dm(n + 2));
    tr.theta_T[n + 1] = tr.theta_T[n] + a * (A * tr.theta_T[n] + Z(n + 1) - Z(n + 2));
  }
  if (horizon >= 1) {
    tr.xi[1] = Z(1);
    for (long n = 1; n < horizon; ++n) {
      const double a_next = g / static_cast<double>(n + 1);
      const double a_cur = g / static_cast<double>(n);
      tr.xi[n + 1] = tr.xi[n] + a_next * (A * tr.xi[n] - a_cur * IA * Z(n + 1));
    }
  }
  return tr;
}

CouplingTrace run_coupled(const RandomLinearSAProblem& problem,
                          const Eigen::MatrixXd& A_mean, const std::vector<int>& path,
                          const std::vector<long>& checkpoints) {
  const std::vector<long> ck = sorted_checkpoints(path, checkpoints);
  const long N = ck.back();
  CouplingTrace out;
  Eigen::VectorXd circ = problem.theta0;
  Eigen::VectorXd bullet = problem.theta0;
  auto record = [&](long n) {
    if (std::binary_search(ck.begin(), ck.end(), n)) {
      out.theta_circ.push_back({n, circ});
      out.theta_bullet.push_back({n, bullet});
      out.err.push_back({n, circ - bullet});
    }
  };
  record(0);
  for (long n = 0; n < N; ++n) {
    const double a = problem.gain / static_cast<double>(n + 1);
    const Eigen::MatrixXd& An = problem.Amap[path[n + 1]];
    const Eigen::VectorXd& bn = problem.bmap[path[n + 1]];
    const Eigen::VectorXd delta = An * problem.theta_star - bn;  // common noise
    circ += a * (An * circ + delta);
    bullet += a * (A_mean * bullet + delta);
    record(n + 1);
  }
  return out;
}

}  // namespace sacov
