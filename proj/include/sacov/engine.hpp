#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sacov/chain.hpp"
#include "sacov/poisson.hpp"

namespace sacov {

/// Linear SA error recursion: theta_{n+1} = theta_n + a_{n+1}[A theta_n +
/// f*(Phi_{n+1})], step size a_n = gain/n.
struct LinearSAProblem {
  Eigen::MatrixXd A;
  StateFunction noise;  // S x d, f* per state
  double gain = 1.0;
  Eigen::VectorXd theta0;
};

/// Random-matrix linear recursion: per-state coefficient maps.
struct RandomLinearSAProblem {
  std::vector<Eigen::MatrixXd> Amap;  // per state, d x d
  std::vector<Eigen::VectorXd> bmap;  // per state, d
  Eigen::VectorXd theta_star;
  Eigen::VectorXd theta0;
  double gain = 1.0;
};

/// TD(0) evaluation problem on a policy-induced chain.
struct TDProblem {
  FiniteChain state_chain;
  Eigen::VectorXd cost;    // c(x) per state
  double discount;         // beta in (0,1)
  Eigen::MatrixXd basis;   // S x d, rows psi(x)^T
};

struct Checkpoint {
  long n;
  Eigen::VectorXd theta;
};

using Trajectory = std::vector<Checkpoint>;

struct DecompositionTrace {
  std::vector<Eigen::VectorXd> theta;     // full error sequence
  std::vector<Eigen::VectorXd> theta_M;   // martingale response
  std::vector<Eigen::VectorXd> theta_T;   // telescoping response
  std::vector<Eigen::VectorXd> xi;        // xi_n, n >= 1 (index 0 unused)
  std::vector<Eigen::VectorXd> z_path;    // Z_n = fhat(Phi_n)
};

struct CouplingTrace {
  Trajectory theta_circ;    // random-matrix iterate
  Trajectory theta_bullet;  // mean-matrix iterate on the same path
  Trajectory err;           // circ - bullet
};

struct TDMatrices {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd theta_star;
  FiniteChain pair_chain;                 // states (x_new, x_old), index x_new*S + x_old
  Eigen::VectorXd pair_stationary;
  std::vector<Eigen::MatrixXd> Amap;      // on the pair chain
  std::vector<Eigen::VectorXd> bmap;
};

Trajectory run_linear_sa(const LinearSAProblem& problem, const std::vector<int>& path,
                         const std::vector<long>& checkpoints);

/// Running-mean estimate of pi(F) along the path; uses Phi_1..Phi_{n+1}
/// (path[0] is the sampler seed state). Returns absolute theta_n.
Trajectory run_mcmc_average(const StateFunction& F, const std::vector<int>& path,
                            const std::vector<long>& checkpoints);

Trajectory run_random_linear_sa(const RandomLinearSAProblem& problem,
                                const std::vector<int>& path,
                                const std::vector<long>& checkpoints);

/// Steady-state TD matrices and the per-transition coefficient maps on the
/// pair chain Phi_{n+1} = (X_{n+1}, X_n).
TDMatrices td_matrices(const TDProblem& problem);

/// TD(0) iterates theta_n (absolute coordinates) along a path on X.
Trajectory run_td0(const TDProblem& problem, const Eigen::VectorXd& theta0,
                   const std::vector<int>& path, const std::vector<long>& checkpoints);

struct SnrLstdResult {
  Trajectory snr;
  Trajectory lstd;
  std::vector<long> ridged_steps;  // steps where the ridge fallback fired
};

/// Stochastic Newton-Raphson with running-average matrix gain, against
/// LSTD(0); identical whenever every Ahat along the prefix is invertible.
SnrLstdResult run_snr_lstd(const TDProblem& problem, const std::vector<int>& path,
                           const std::vector<long>& checkpoints, double ridge);

/// Martingale/telescoping decomposition along a path; fhat must solve
/// Poisson's equation for the problem's centered noise on the same chain.
DecompositionTrace run_decomposition(const LinearSAProblem& problem,
                                     const PoissonSolution& fhat,
                                     const FiniteChain& chain,
                                     const std::vector<int>& path, long horizon);

/// Coupled run of the random recursion and its mean-matrix linearization on
/// a common noise path.
CouplingTrace run_coupled(const RandomLinearSAProblem& problem,
                          const Eigen::MatrixXd& A_mean, const std::vector<int>& path,
                          const std::vector<long>& checkpoints);

}  // namespace sacov
