#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sacov/harness.hpp"

using namespace sacov;

namespace {

// Deterministic pseudo-trial: a 2-vector derived from the seed bits only.
std::vector<Eigen::VectorXd> fake_trial(std::uint64_t seed, std::size_t checkpoints) {
  std::vector<Eigen::VectorXd> out(checkpoints);
  for (std::size_t c = 0; c < checkpoints; ++c) {
    Eigen::VectorXd v(2);
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (c + 1);
    z ^= z >> 27;
    v(0) = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    v(1) = static_cast<double>((z * 0x2545F4914F6CDD1Dull) >> 11) * 0x1.0p-53 - 0.5;
    out[c] = v;
  }
  return out;
}

}  // namespace

TEST_CASE("run_ensemble: bit-identical across thread counts") {
  EnsembleSpec spec{257, {10, 100}, 42, 1};
  TrialRunner runner = [](std::uint64_t s) { return fake_trial(s, 2); };

  EmpiricalMoments one = run_ensemble(spec, runner);
  for (int threads : {2, 3, 8}) {
    spec.threads = threads;
    EmpiricalMoments multi = run_ensemble(spec, runner);
    REQUIRE(multi.size() == one.size());
    for (std::size_t c = 0; c < one.size(); ++c) {
      CHECK((multi[c].mean - one[c].mean).cwiseAbs().maxCoeff() == 0.0);
      CHECK((multi[c].cov - one[c].cov).cwiseAbs().maxCoeff() == 0.0);
      CHECK((multi[c].mean_stderr - one[c].mean_stderr).cwiseAbs().maxCoeff() == 0.0);
      CHECK((multi[c].cov_stderr - one[c].cov_stderr).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("run_ensemble: moments match a direct computation") {
  const long N = 64;
  EnsembleSpec spec{N, {1}, 7, 4};
  TrialRunner runner = [](std::uint64_t s) { return fake_trial(s, 1); };
  EmpiricalMoments est = run_ensemble(spec, runner);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  std::vector<Eigen::VectorXd> xs;
  for (long t = 0; t < N; ++t) {
    xs.push_back(fake_trial(split_seed(7, t), 1)[0]);
    mean += xs.back();
  }
  mean /= static_cast<double>(N);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& x : xs) cov += (x - mean) * (x - mean).transpose();
  cov /= static_cast<double>(N - 1);

  CHECK((est[0].mean - mean).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((est[0].cov - cov).cwiseAbs().maxCoeff() <= 1e-14);

  // Jackknife stderr of the mean equals the classical s/sqrt(N) for the
  // sample mean statistic.
  Eigen::VectorXd classical = (cov.diagonal() / static_cast<double>(N)).cwiseSqrt();
  CHECK((est[0].mean_stderr - classical).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS(run_ensemble(EnsembleSpec{1, {1}, 7, 1}, runner));
}

TEST_CASE("fit_rate recovers exact power laws") {
  std::vector<long> ns = {10, 20, 50, 100, 1000, 5000};
  std::vector<double> vals;
  for (long n : ns) vals.push_back(2.5 * std::pow(n, -0.6));
  RateFit fit = fit_rate(ns, vals, 10, 5000);
  CHECK(fit.exponent == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  // Window restriction: points outside [20, 1000] are ignored; use a
  // contaminated series that is a clean power law only inside the window.
  std::vector<double> dirty = vals;
  dirty.front() = 1e6;
  dirty.back() = 1e6;
  RateFit wfit = fit_rate(ns, dirty, 20, 1000);
  CHECK(wfit.exponent == doctest::Approx(-0.6).epsilon(1e-12));

  std::vector<double> flat(ns.size(), 3.0);
  CHECK(fit_rate(ns, flat, 10, 5000).exponent == doctest::Approx(0.0));

  CHECK_THROWS(fit_rate(ns, vals, 10, 21));  // only 2 points
  std::vector<double> neg = vals;
  neg[2] = 0.0;
  CHECK_THROWS(fit_rate(ns, neg, 10, 5000));
}

TEST_CASE("tail_report counts both sides") {
  std::vector<double> samples;
  for (int i = 0; i < 200; ++i) samples.push_back(i < 150 ? 1.0 : -1.0);
  samples[0] = 3.0;
  samples[199] = -3.0;

  TailReport rep = tail_report(samples, {0.5, 2.0});
  CHECK(rep.trials == 200);
  CHECK(rep.upper_exceed[0] == 150);
  CHECK(rep.lower_exceed[0] == 50);
  CHECK(rep.upper_exceed[1] == 1);
  CHECK(rep.lower_exceed[1] == 1);
  long total = 0;
  for (long h : rep.histogram) total += h;
  CHECK(total == 200);

  CHECK_THROWS(tail_report(std::vector<double>(10, 0.0), {1.0}));
}

TEST_CASE("compare_to_theory pass/fail logic") {
  MomentEstimate e;
  e.n = 100;
  e.trials = 1000;
  e.mean = Eigen::VectorXd::Zero(1);
  e.cov = Eigen::MatrixXd::Constant(1, 1, 1.05);
  e.mean_stderr = Eigen::VectorXd::Constant(1, 0.01);
  e.cov_stderr = Eigen::MatrixXd::Constant(1, 1, 0.02);

  MomentCheckpoint p{100, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 1.0)};

  ComparisonReport ok = compare_to_theory({e}, {p}, 4.0);
  CHECK(ok.pass);
  CHECK(ok.entries[0].z_max == doctest::Approx(2.5));
  CHECK(ok.entries[0].z_trace == doctest::Approx(2.5));

  ComparisonReport tight = compare_to_theory({e}, {p}, 2.0);
  CHECK_FALSE(tight.pass);

  MomentCheckpoint wrong_n{50, p.mean, p.cov};
  CHECK_THROWS(compare_to_theory({e}, {wrong_n}, 4.0));
}
