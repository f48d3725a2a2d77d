#include "sacov/poisson.hpp"

#include <cmath>

namespace sacov {

namespace {

PoissonSolution fundamental_solve(const FiniteChain& chain,
                                  const Eigen::VectorXd& pi,
                                  const StateFunction& rhs) {
  const int S = chain.num_states();
  const Eigen::MatrixXd& P = chain.transition();
  Eigen::MatrixXd fund = Eigen::MatrixXd::Identity(S, S) - P +
                         Eigen::VectorXd::Ones(S) * pi.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(fund);
  if (std::abs(lu.determinant()) < 1e-300) {
    throw ErgodicityError("fundamental matrix is singular; chain not ergodic");
  }
  Eigen::MatrixXd fhat = lu.solve(rhs);
  fhat.rowwise() -= (pi.transpose() * fhat).eval();  // recentre

  PoissonSolution sol;
  sol.fhat = fhat;
  sol.residual_norm = ((fhat - P * fhat) - rhs).cwiseAbs().maxCoeff();
  sol.mean_norm = (pi.transpose() * fhat).cwiseAbs().maxCoeff();
  sol.truncation_error = 0.0;
  return sol;
}

}  // namespace

StateFunction center(const StateFunction& f, const Eigen::VectorXd& pi) {
  if (f.rows() != pi.size()) {
    throw std::invalid_argument("center: state dimension mismatch");
  }
  StateFunction out = f;
  out.rowwise() -= (pi.transpose() * f).eval();
  return out;
}

PoissonSolution solve_poisson(const FiniteChain& chain, const StateFunction& ftilde) {
  Eigen::VectorXd pi = stationary_dist(chain);
  double mean = (pi.transpose() * ftilde).cwiseAbs().maxCoeff();
  if (mean > 1e-10) {
    throw std::invalid_argument("solve_poisson: input not centered, |pi(f)| = " +
                                std::to_string(mean));
  }
  return fundamental_solve(chain, pi, ftilde);
}

PoissonSolution solve_second_poisson(const FiniteChain& chain, const StateFunction& fhat) {
  return solve_poisson(chain, fhat);
}

PoissonSolution mm1_solve_poisson(const QueueChain& queue, const StateFunction& f,
                                  double tail_tol) {
  const int N = static_cast<int>(f.rows()) - 1;
  const double rho = queue.load();
  const double growth = f.cwiseAbs().maxCoeff();
  const double declared = std::pow(rho, N + 1) * growth;
  if (declared > tail_tol) {
    int required =
        static_cast<int>(std::ceil(std::log(tail_tol / growth) / std::log(rho))) ;
    throw TruncationError("truncation level " + std::to_string(N) +
                              " declares tail error " + std::to_string(declared) +
                              " > tol; need N >= " + std::to_string(required),
                          required);
  }
  FiniteChain trunc = queue.truncated(N);
  Eigen::VectorXd pi = stationary_dist(trunc);
  PoissonSolution sol = fundamental_solve(trunc, pi, center(f, pi));
  sol.truncation_error = declared;
  return sol;
}

NoiseStats noise_stats(const FiniteChain& chain, const StateFunction& fstar) {
  Eigen::VectorXd pi = stationary_dist(chain);
  const Eigen::MatrixXd& P = chain.transition();
  const int S = chain.num_states();
  const int d = static_cast<int>(fstar.cols());

  StateFunction ftilde = center(fstar, pi);
  Eigen::MatrixXd fhat = solve_poisson(chain, ftilde).fhat;
  Eigen::MatrixXd fhathat = solve_second_poisson(chain, fhat).fhat;
  Eigen::MatrixXd Pfhat = P * fhat;
  Eigen::MatrixXd Pfhathat = P * fhathat;

  NoiseStats out;
  out.sigma_delta = Eigen::MatrixXd::Zero(d, d);
  out.cross_m_mhat = Eigen::MatrixXd::Zero(d, d);
  out.cross_m_zhat = Eigen::MatrixXd::Zero(d, d);
  out.sigma_z = fhat.transpose() * pi.asDiagonal() * fhat;

  // Martingale increments on the transition z -> z':
  //   dm    = fhat(z')    - (P fhat)(z)
  //   dmhat = fhathat(z') - (P fhathat)(z)
  for (int z = 0; z < S; ++z) {
    for (int zp = 0; zp < S; ++zp) {
      const double w = pi(z) * P(z, zp);
      if (w == 0.0) continue;
      Eigen::VectorXd dm = (fhat.row(zp) - Pfhat.row(z)).transpose();
      Eigen::VectorXd dmhat = (fhathat.row(zp) - Pfhathat.row(z)).transpose();
      out.sigma_delta += w * dm * dm.transpose();
      out.cross_m_mhat += w * dmhat * dm.transpose();
      out.cross_m_zhat += w * dm * fhathat.row(zp);
    }
  }
  return out;
}

Eigen::MatrixXd sigma_delta_sum(const FiniteChain& chain, const StateFunction& fstar,
                                int lag_cut) {
  Eigen::VectorXd pi = stationary_dist(chain);
  const Eigen::MatrixXd& P = chain.transition();
  StateFunction ftilde = center(fstar, pi);

  Eigen::MatrixXd total = ftilde.transpose() * pi.asDiagonal() * ftilde;
  Eigen::MatrixXd Pk_f = ftilde;
  for (int k = 1; k <= lag_cut; ++k) {
    Pk_f = P * Pk_f;
    Eigen::MatrixXd Ck = ftilde.transpose() * pi.asDiagonal() * Pk_f;
    total += Ck + Ck.transpose();
  }
  return total;
}

}  // namespace sacov
