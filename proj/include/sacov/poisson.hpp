#pragma once

#include <Eigen/Dense>

#include "sacov/chain.hpp"

namespace sacov {

/// Vector-valued function on the state space: row per state, column per
/// coordinate.
using StateFunction = Eigen::MatrixXd;

struct PoissonSolution {
  Eigen::MatrixXd fhat;     // S x d, zero mean under pi
  double residual_norm;     // max |(fhat - P fhat) - ftilde| over entries
  double mean_norm;         // max_i |pi(fhat_i)|
  double truncation_error;  // estimated tail mass error (M/M/1 only)
};

/// Steady-state noise statistics feeding the Lyapunov equations.
struct NoiseStats {
  Eigen::MatrixXd sigma_delta;   // E_pi[dm dm^T], martingale form
  Eigen::MatrixXd sigma_z;       // E_pi[Z Z^T]
  Eigen::MatrixXd cross_m_mhat;  // Cov_pi(dm_hat, dm)
  Eigen::MatrixXd cross_m_zhat;  // E_pi[dm Zhat^T]
};

/// ftilde(z) = f(z) - pi(f).
StateFunction center(const StateFunction& f, const Eigen::VectorXd& pi);

/// Fundamental-matrix solve of fhat - P fhat = ftilde, recentred so
/// pi(fhat) = 0. Requires pi(ftilde) = 0 within 1e-10.
PoissonSolution solve_poisson(const FiniteChain& chain, const StateFunction& ftilde);

/// Second Poisson equation: fhathat - P fhathat = fhat, zero mean under pi.
PoissonSolution solve_second_poisson(const FiniteChain& chain, const StateFunction& fhat);

/// Finite-section Poisson solve for the M/M/1 queue on levels 0..N with a
/// reflecting boundary. f is given on levels 0..N (centered internally
/// against the truncated stationary law). The declared truncation error
/// load^{N+1} * max|f| must be <= tail_tol, else TruncationError reports
/// the required N.
PoissonSolution mm1_solve_poisson(const QueueChain& queue, const StateFunction& f,
                                  double tail_tol);

/// All stationary noise statistics from the two Poisson solves. fstar is
/// centered internally if needed.
NoiseStats noise_stats(const FiniteChain& chain, const StateFunction& fstar);

/// Truncated autocovariance sum Sigma_0 + sum_{k=1..K}(C_k + C_k^T),
/// independent cross-check of noise_stats().sigma_delta.
Eigen::MatrixXd sigma_delta_sum(const FiniteChain& chain, const StateFunction& fstar,
                                int lag_cut);

}  // namespace sacov
