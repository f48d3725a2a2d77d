#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sacov/chain.hpp"
#include "sacov/engine.hpp"

namespace sacov {

enum class ExperimentKind { Theory, Simulate, Oracle, Compare, Couple, Td, Tails };

struct ChainSpec {
  bool is_queue = false;
  Eigen::MatrixXd transition;    // finite chains
  double arrival_prob = 0.0;     // M/M/1
  int truncation = 0;
};

struct ExperimentConfig {
  ExperimentKind kind;
  ChainSpec chain;
  Eigen::MatrixXd noise;   // S x d
  Eigen::MatrixXd A;
  double gain = 1.0;
  long horizon = 0;
  std::vector<long> checkpoints;
  long trials = 0;
  std::optional<std::uint64_t> master_seed;
  int initial_state = 0;
  Eigen::VectorXd theta0;
  double band = 4.0;
  double sigma_v_tol = 1e-8;

  // TD block
  Eigen::VectorXd td_cost;
  double td_discount = 0.0;
  Eigen::MatrixXd td_basis;

  // couple block
  std::vector<Eigen::MatrixXd> Amap;
  std::vector<Eigen::VectorXd> bmap;
  Eigen::VectorXd theta_star;

  // tails block
  std::vector<double> eps_grid;  // empty = derive from sample std
  std::string config_hash;
};

/// Geometric checkpoint grid (ratio 2^{1/4}) from n_lo up to horizon,
/// horizon always included.
std::vector<long> geometric_checkpoints(long n_lo, long horizon);

/// Strict-schema parse of the JSON config text; unknown keys rejected.
ExperimentConfig parse_config(const std::string& text);

/// Dispatch and write summary.json / trajectory.csv / tails.csv under
/// out_dir. Returns the process exit code: 0 pass, 2 comparisons failed.
int run_command(const ExperimentConfig& config, const std::string& out_dir,
                int threads);

}  // namespace sacov
