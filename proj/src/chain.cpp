#include "sacov/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace sacov {

namespace {

constexpr double kRowSumTol = 1e-12;

// Reachability over the support digraph from a given state.
std::vector<bool> reachable_from(const Eigen::MatrixXd& P, int start) {
  const int S = static_cast<int>(P.rows());
  std::vector<bool> seen(S, false);
  std::queue<int> frontier;
  seen[start] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    int z = frontier.front();
    frontier.pop();
    for (int zp = 0; zp < S; ++zp) {
      if (!seen[zp] && P(z, zp) > 0.0) {
        seen[zp] = true;
        frontier.push(zp);
      }
    }
  }
  return seen;
}

// Period of the (assumed irreducible) chain: gcd of all closed-walk lengths
// through state 0, computed from BFS levels on the support digraph.
int chain_period(const Eigen::MatrixXd& P) {
  const int S = static_cast<int>(P.rows());
  std::vector<int> level(S, -1);
  std::queue<int> frontier;
  level[0] = 0;
  frontier.push(0);
  int g = 0;
  while (!frontier.empty()) {
    int z = frontier.front();
    frontier.pop();
    for (int zp = 0; zp < S; ++zp) {
      if (P(z, zp) <= 0.0) continue;
      if (level[zp] < 0) {
        level[zp] = level[z] + 1;
        frontier.push(zp);
      } else {
        g = std::gcd(g, level[z] + 1 - level[zp]);
      }
    }
  }
  return g == 0 ? 0 : std::abs(g);
}

}  // namespace

FiniteChain::FiniteChain(Eigen::MatrixXd transition)
    : transition_(std::move(transition)) {
  if (transition_.rows() != transition_.cols() || transition_.rows() < 1) {
    throw ErgodicityError("transition matrix must be square and nonempty");
  }
  if ((transition_.array() < -kRowSumTol).any() ||
      (transition_.array() > 1.0 + kRowSumTol).any()) {
    throw ErgodicityError("transition probabilities must lie in [0,1]");
  }
  for (Eigen::Index z = 0; z < transition_.rows(); ++z) {
    double row_sum = transition_.row(z).sum();
    if (std::abs(row_sum - 1.0) > kRowSumTol) {
      throw ErgodicityError("row " + std::to_string(z) +
                            " sums to " + std::to_string(row_sum));
    }
  }
}

QueueChain::QueueChain(double arrival_prob, int analysis_truncation)
    : p_a_(arrival_prob), trunc_(analysis_truncation) {
  if (!(p_a_ > 0.0 && p_a_ < 0.5)) {
    throw StabilityError("arrival_prob must lie in (0, 1/2) so that load < 1");
  }
  if (trunc_ < 1) {
    throw StabilityError("analysis_truncation must be >= 1");
  }
}

FiniteChain QueueChain::truncated(int N) const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N + 1, N + 1);
  const double p_s = service_prob();
  P(0, 0) = p_s;
  P(0, 1) = p_a_;
  for (int z = 1; z < N; ++z) {
    P(z, z - 1) = p_s;
    P(z, z + 1) = p_a_;
  }
  P(N, N - 1) = p_s;
  P(N, N) = p_a_;  // reflecting boundary
  return FiniteChain(std::move(P));
}

Eigen::VectorXd stationary_dist(const FiniteChain& chain) {
  ErgodicityReport rep = ergodicity_check(chain);
  if (!rep.irreducible) {
    throw ErgodicityError("chain is reducible: not every state communicates");
  }
  if (!rep.aperiodic) {
    throw ErgodicityError("chain is periodic");
  }
  const int S = chain.num_states();
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd M = chain.transition().transpose() - Eigen::MatrixXd::Identity(S, S);
  M.row(S - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
  rhs(S - 1) = 1.0;
  Eigen::VectorXd pi = M.fullPivLu().solve(rhs);
  double residual = (chain.transition().transpose() * pi - pi).lpNorm<Eigen::Infinity>();
  if (residual > 1e-12) {
    throw ErgodicityError("stationary solve residual " + std::to_string(residual));
  }
  return pi;
}

double mm1_stationary(const QueueChain& queue, int z) {
  const double rho = queue.load();
  if (!(rho < 1.0)) {
    throw StabilityError("queue load must be < 1");
  }
  return (1.0 - rho) * std::pow(rho, z);
}

ErgodicityReport ergodicity_check(const FiniteChain& chain) {
  const Eigen::MatrixXd& P = chain.transition();
  const int S = chain.num_states();
  ErgodicityReport rep;

  rep.irreducible = true;
  for (int z = 0; z < S && rep.irreducible; ++z) {
    auto seen = reachable_from(P, z);
    rep.irreducible = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
  rep.aperiodic = rep.irreducible && chain_period(P) == 1;

  Eigen::EigenSolver<Eigen::MatrixXd> es(P, /*computeEigenvectors=*/false);
  std::vector<double> moduli(S);
  for (int i = 0; i < S; ++i) moduli[i] = std::abs(es.eigenvalues()(i));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  rep.second_eigenvalue_modulus = S > 1 ? moduli[1] : 0.0;
  return rep;
}

std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t stream) {
  // splitmix64 finalizer applied to master + stream * golden gamma.
  std::uint64_t z = master_seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ChainSampler::ChainSampler(const FiniteChain& chain, std::uint64_t seed,
                           int initial_state)
    : finite_(&chain), state_(initial_state), rng_state_(seed) {
  if (initial_state < 0 || initial_state >= chain.num_states()) {
    throw ErgodicityError("initial state out of range");
  }
}

ChainSampler::ChainSampler(const QueueChain& queue, std::uint64_t seed,
                           int initial_state)
    : queue_arrival_(queue.arrival_prob()), state_(initial_state), rng_state_(seed) {
  if (initial_state < 0) {
    throw ErgodicityError("initial level must be nonnegative");
  }
}

double ChainSampler::next_uniform() {
  // splitmix64 step; top 53 bits to a double in [0,1).
  rng_state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = rng_state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

int ChainSampler::step() {
  const double u = next_uniform();
  if (finite_ != nullptr) {
    const Eigen::MatrixXd& P = finite_->transition();
    double acc = 0.0;
    int zp = finite_->num_states() - 1;  // fallback absorbs rounding slack
    for (int j = 0; j < finite_->num_states(); ++j) {
      acc += P(state_, j);
      if (u < acc) {
        zp = j;
        break;
      }
    }
    state_ = zp;
  } else {
    state_ = (u < queue_arrival_) ? state_ + 1 : std::max(state_ - 1, 0);
  }
  return state_;
}

std::vector<int> ChainSampler::sample_path(long n) {
  std::vector<int> path;
  path.reserve(static_cast<std::size_t>(n) + 1);
  path.push_back(state_);
  for (long k = 0; k < n; ++k) path.push_back(step());
  return path;
}

}  // namespace sacov
