#include "sacov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sacov/chain.hpp"

namespace sacov {

EmpiricalMoments run_ensemble(const EnsembleSpec& spec, const TrialRunner& runner) {
  if (spec.trials < 2) {
    throw std::invalid_argument("run_ensemble: need at least 2 trials");
  }
  const long N = spec.trials;
  const std::size_t C = spec.checkpoints.size();
  std::vector<std::vector<Eigen::VectorXd>> results(N);

  int threads = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1L, std::min<long>(threads, N));
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  auto work = [&]() {
    for (long t = next.fetch_add(1); t < N; t = next.fetch_add(1)) {
      results[t] = runner(split_seed(spec.master_seed, static_cast<std::uint64_t>(t)));
    }
  };
  for (int k = 0; k < threads; ++k) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  EmpiricalMoments out;
  out.reserve(C);
  for (std::size_t c = 0; c < C; ++c) {
    const int d = static_cast<int>(results[0][c].size());
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(d, d);
    for (long t = 0; t < N; ++t) {  // trial-index order: deterministic reduction
      const Eigen::VectorXd& x = results[t][c];
      s1 += x;
      s2 += x * x.transpose();
    }
    const double dn = static_cast<double>(N);
    Eigen::VectorXd mean = s1 / dn;
    Eigen::MatrixXd cov = (s2 - dn * mean * mean.transpose()) / (dn - 1.0);

    // Jackknife over trials: leave-one-out estimates via downdated sums.
    Eigen::VectorXd mean_js = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov_js = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd mean_jbar = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov_jbar = Eigen::MatrixXd::Zero(d, d);
    std::vector<Eigen::VectorXd> loo_mean(N);
    std::vector<Eigen::MatrixXd> loo_cov(N);
    for (long t = 0; t < N; ++t) {
      const Eigen::VectorXd& x = results[t][c];
      Eigen::VectorXd m = (s1 - x) / (dn - 1.0);
      Eigen::MatrixXd cv =
          (s2 - x * x.transpose() - (dn - 1.0) * m * m.transpose()) / (dn - 2.0);
      loo_mean[t] = m;
      loo_cov[t] = cv;
      mean_jbar += m;
      cov_jbar += cv;
    }
    mean_jbar /= dn;
    cov_jbar /= dn;
    for (long t = 0; t < N; ++t) {
      mean_js += (loo_mean[t] - mean_jbar).cwiseAbs2();
      cov_js += (loo_cov[t] - cov_jbar).cwiseAbs2();
    }
    const double scale = (dn - 1.0) / dn;
    MomentEstimate est;
    est.n = spec.checkpoints[c];
    est.trials = N;
    est.mean = std::move(mean);
    est.cov = std::move(cov);
    est.mean_stderr = (scale * mean_js).cwiseSqrt();
    est.cov_stderr = (scale * cov_js).cwiseSqrt();
    out.push_back(std::move(est));
  }
  return out;
}

RateFit fit_rate(const std::vector<long>& checkpoints, const std::vector<double>& values,
                 long n_lo, long n_hi) {
  if (checkpoints.size() != values.size()) {
    throw std::invalid_argument("fit_rate: size mismatch");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < n_lo || checkpoints[i] > n_hi) continue;
    if (!(values[i] > 0.0)) {
      throw std::invalid_argument("fit_rate: nonpositive value in window at n = " +
                                  std::to_string(checkpoints[i]));
    }
    xs.push_back(std::log(static_cast<double>(checkpoints[i])));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_rate: fewer than 3 points in window");
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double vxx = sxx - sx * sx / m;
  const double vxy = sxy - sx * sy / m;
  const double vyy = syy - sy * sy / m;
  RateFit fit;
  fit.exponent = vxy / vxx;
  fit.intercept = (sy - fit.exponent * sx) / m;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

TailReport tail_report(const std::vector<double>& samples,
                       const std::vector<double>& eps_grid, int bins) {
  if (samples.size() < 100) {
    throw std::invalid_argument("tail_report: need at least 100 samples");
  }
  TailReport rep;
  rep.eps_grid = eps_grid;
  rep.trials = static_cast<long>(samples.size());
  rep.lower_exceed.assign(eps_grid.size(), 0);
  rep.upper_exceed.assign(eps_grid.size(), 0);
  for (double x : samples) {
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      if (x <= -eps_grid[i]) ++rep.lower_exceed[i];
      if (x >= eps_grid[i]) ++rep.upper_exceed[i];
    }
  }
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  rep.hist_lo = *lo_it;
  rep.hist_hi = *hi_it;
  rep.histogram.assign(bins, 0);
  const double width = (rep.hist_hi - rep.hist_lo) / bins;
  for (double x : samples) {
    int b = width > 0.0 ? static_cast<int>((x - rep.hist_lo) / width) : 0;
    ++rep.histogram[std::clamp(b, 0, bins - 1)];
  }
  return rep;
}

ComparisonReport compare_to_theory(const EmpiricalMoments& emp,
                                   const std::vector<MomentCheckpoint>& predicted,
                                   double band) {
  if (emp.size() != predicted.size()) {
    throw std::invalid_argument("compare_to_theory: checkpoint count mismatch");
  }
  ComparisonReport rep;
  rep.band = band;
  rep.pass = true;
  for (std::size_t c = 0; c < emp.size(); ++c) {
    const MomentEstimate& e = emp[c];
    const MomentCheckpoint& p = predicted[c];
    if (e.n != p.n) {
      throw std::invalid_argument("compare_to_theory: checkpoint index mismatch");
    }
    ComparisonEntry entry;
    entry.n = e.n;
    entry.z_max = 0.0;
    double tr_err = 0.0, tr_diff = 0.0;
    for (int i = 0; i < e.cov.rows(); ++i) {
      for (int j = 0; j < e.cov.cols(); ++j) {
        double se = e.cov_stderr(i, j);
        double z = se > 0.0 ? std::abs(e.cov(i, j) - p.cov(i, j)) / se
                            : (e.cov(i, j) == p.cov(i, j) ? 0.0
                                                          : std::numeric_limits<double>::infinity());
        entry.z_max = std::max(entry.z_max, z);
      }
      tr_diff += e.cov(i, i) - p.cov(i, i);
      tr_err += e.cov_stderr(i, i) * e.cov_stderr(i, i);
    }
    entry.z_trace = tr_err > 0.0 ? std::abs(tr_diff) / std::sqrt(tr_err)
                                 : (tr_diff == 0.0 ? 0.0
                                                   : std::numeric_limits<double>::infinity());
    entry.pass = entry.z_max <= band;
    rep.pass = rep.pass && entry.pass;
    rep.entries.push_back(entry);
  }
  return rep;
}

}  // namespace sacov
