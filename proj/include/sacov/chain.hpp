#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sacov/errors.hpp"

namespace sacov {

/// Finite irreducible aperiodic Markov chain given by its transition matrix.
class FiniteChain {
 public:
  explicit FiniteChain(Eigen::MatrixXd transition);

  int num_states() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const { return transition_; }

 private:
  Eigen::MatrixXd transition_;
};

/// Uniformized M/M/1 queue: up one level w.p. p_a, down (reflected at 0)
/// w.p. p_s = 1 - p_a. Geometrically ergodic when load = p_a/p_s < 1.
class QueueChain {
 public:
  QueueChain(double arrival_prob, int analysis_truncation);

  double arrival_prob() const { return p_a_; }
  double service_prob() const { return 1.0 - p_a_; }
  double load() const { return p_a_ / (1.0 - p_a_); }
  int analysis_truncation() const { return trunc_; }

  /// Finite-section transition matrix on levels 0..N with a reflecting
  /// boundary at N (used for analysis only; sampling is untruncated).
  FiniteChain truncated(int N) const;

 private:
  double p_a_;
  int trunc_;
};

struct ErgodicityReport {
  bool irreducible = false;
  bool aperiodic = false;
  double second_eigenvalue_modulus = 0.0;
};

/// Stationary distribution by direct linear solve of pi P = pi with a
/// normalization row. Throws ErgodicityError on reducible/periodic chains.
Eigen::VectorXd stationary_dist(const FiniteChain& chain);

/// pi(z) = (1 - rho) rho^z for the M/M/1 queue.
double mm1_stationary(const QueueChain& queue, int z);

/// Irreducibility by reachability, aperiodicity by gcd of cycle lengths,
/// mixing proxy |lambda_2(P)|.
ErgodicityReport ergodicity_check(const FiniteChain& chain);

/// splitmix64-derived per-trial seed: bit-exact across platforms.
std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t stream);

/// Deterministic path sampler; identical (model, seed, initial state)
/// yields bit-identical paths. Single-threaded mutable state.
class ChainSampler {
 public:
  ChainSampler(const FiniteChain& chain, std::uint64_t seed, int initial_state);
  ChainSampler(const QueueChain& queue, std::uint64_t seed, int initial_state);

  int current_state() const { return state_; }
  int step();

  /// States Phi_0..Phi_n (n+1 entries, Phi_0 = the construction-time state
  /// or the state reached by previous calls).
  std::vector<int> sample_path(long n);

 private:
  double next_uniform();

  const FiniteChain* finite_ = nullptr;
  double queue_arrival_ = 0.0;
  int state_;
  std::uint64_t rng_state_;
};

}  // namespace sacov
