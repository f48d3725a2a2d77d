#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "sacov/engine.hpp"
#include "sacov/oracle.hpp"

namespace sacov {

/// One ensemble trial: given a per-trial seed, return the iterate at each
/// requested checkpoint (in checkpoint order).
using TrialRunner = std::function<std::vector<Eigen::VectorXd>(std::uint64_t seed)>;

struct EnsembleSpec {
  long trials;
  std::vector<long> checkpoints;
  std::uint64_t master_seed;
  int threads = 0;  // 0 = hardware concurrency; never changes the output
};

struct MomentEstimate {
  long n;
  long trials;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd mean_stderr;  // jackknife, per coordinate
  Eigen::MatrixXd cov_stderr;   // jackknife, per entry
};

using EmpiricalMoments = std::vector<MomentEstimate>;

struct RateFit {
  double exponent;
  double intercept;
  long n_lo, n_hi;
  double r_squared;
};

struct TailReport {
  std::vector<double> eps_grid;
  std::vector<long> lower_exceed;  // #{theta <= -eps}
  std::vector<long> upper_exceed;  // #{theta >= +eps}
  long trials;
  std::vector<long> histogram;
  double hist_lo, hist_hi;
};

struct ComparisonEntry {
  long n;
  double z_max;       // worst |z| over entries of n*Cov
  double z_trace;     // z-score of n*trace(Cov)
  bool pass;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  bool pass;
  double band;  // acceptance band in standard errors
};

/// Seeded parallel ensemble: trial t runs with split_seed(master_seed, t);
/// reduction is in trial-index order, so output is independent of thread
/// count and scheduling.
EmpiricalMoments run_ensemble(const EnsembleSpec& spec, const TrialRunner& runner);

/// OLS on (log n, log value) restricted to [n_lo, n_hi].
RateFit fit_rate(const std::vector<long>& checkpoints, const std::vector<double>& values,
                 long n_lo, long n_hi);

/// Two-sided exceedance counts and a histogram of scalar samples.
TailReport tail_report(const std::vector<double>& samples,
                       const std::vector<double>& eps_grid, int bins = 50);

/// Per-checkpoint z-scores of empirical n*Cov against predicted n*Cov.
ComparisonReport compare_to_theory(const EmpiricalMoments& emp,
                                   const std::vector<MomentCheckpoint>& predicted,
                                   double band = 4.0);

}  // namespace sacov
