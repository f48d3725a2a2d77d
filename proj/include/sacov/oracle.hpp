#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sacov/chain.hpp"
#include "sacov/engine.hpp"

namespace sacov {

struct MomentCheckpoint {
  long n;
  Eigen::VectorXd mean;  // E[theta_n]
  Eigen::MatrixXd cov;   // Cov(theta_n) = E[tt^T] - E[t]E[t]^T
};

/// Exact joint law propagation of (theta_n, Phi_n) for the linear recursion:
/// per-state first and second conditional moments, no Monte Carlo error.
std::vector<MomentCheckpoint> propagate_linear(const FiniteChain& chain,
                                               const LinearSAProblem& problem,
                                               const Eigen::VectorXd& phi0_dist,
                                               const std::vector<long>& checkpoints);

/// Same propagation for the random-matrix recursion; the coefficient matrix
/// and drive depend on the arrival state.
std::vector<MomentCheckpoint> propagate_random_linear(
    const FiniteChain& chain, const RandomLinearSAProblem& problem,
    const Eigen::VectorXd& phi0_dist, const std::vector<long>& checkpoints);

}  // namespace sacov
