#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "sacov/oracle.hpp"

using namespace sacov;

namespace {

// Brute-force reference: enumerate every path z_0..z_n, run the recursion
// exactly, and accumulate path-probability-weighted moments.
struct BruteMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

BruteMoments brute_force(const FiniteChain& chain, const Eigen::VectorXd& phi0,
                         const Eigen::VectorXd& theta0, double gain, long n,
                         const std::vector<Eigen::MatrixXd>& Amap,
                         const std::vector<Eigen::VectorXd>& drive) {
  const int S = chain.num_states();
  const int d = static_cast<int>(theta0.size());
  const Eigen::MatrixXd& P = chain.transition();

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);

  std::vector<int> path(n + 1);
  std::function<void(long, double)> rec = [&](long k, double prob) {
    if (prob == 0.0) return;
    if (k == n) {
      Eigen::VectorXd theta = theta0;
      for (long j = 0; j < n; ++j) {
        const double a = gain / static_cast<double>(j + 1);
        const int zp = path[j + 1];
        theta += a * (Amap[zp] * theta + drive[zp]);
      }
      mean += prob * theta;
      second += prob * theta * theta.transpose();
      return;
    }
    for (int zp = 0; zp < S; ++zp) {
      path[k + 1] = zp;
      rec(k + 1, prob * P(path[k], zp));
    }
  };
  for (int z0 = 0; z0 < S; ++z0) {
    path[0] = z0;
    rec(0, phi0(z0));
  }
  return {mean, second - mean * mean.transpose()};
}

}  // namespace

TEST_CASE("n = 0 checkpoint: deterministic initial condition") {
  Eigen::MatrixXd P(2, 2);
  P << 0.75, 0.25, 0.25, 0.75;
  FiniteChain chain(P);
  Eigen::MatrixXd A(1, 1);
  A << -1.0;
  StateFunction f(2, 1);
  f << 1, -1;
  Eigen::VectorXd t0(1);
  t0 << 3.0;
  LinearSAProblem prob{A, f, 1.0, t0};
  Eigen::VectorXd phi0(2);
  phi0 << 1.0, 0.0;

  auto cps = propagate_linear(chain, prob, phi0, {0, 1});
  REQUIRE(cps.size() == 2);
  CHECK(cps[0].mean(0) == doctest::Approx(3.0));
  CHECK(cps[0].cov(0, 0) == doctest::Approx(0.0));
  // theta_1 = t0 + (A t0 + f(Phi_1)); from state 0, Phi_1 = 0 w.p. 3/4.
  // Values: 1 (prob 3/4) and -1 (prob 1/4); mean 1/2, var 3/4.
  CHECK(cps[1].mean(0) == doctest::Approx(0.5));
  CHECK(cps[1].cov(0, 0) == doctest::Approx(0.75));
}

TEST_CASE("phi0_dist validation") {
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 0.5, 0.5;
  FiniteChain chain(P);
  LinearSAProblem prob{-Eigen::MatrixXd::Identity(1, 1), StateFunction::Zero(2, 1), 1.0,
                       Eigen::VectorXd::Zero(1)};
  Eigen::VectorXd bad(2);
  bad << 0.6, 0.6;
  CHECK_THROWS(propagate_linear(chain, prob, bad, {1}));
  CHECK_THROWS(propagate_linear(chain, prob, Eigen::VectorXd::Ones(3) / 3.0, {1}));
}

TEST_CASE("propagate_linear matches brute-force path enumeration") {
  Eigen::MatrixXd P(3, 3);
  P << 0.2, 0.5, 0.3, 0.1, 0.6, 0.3, 0.4, 0.4, 0.2;
  FiniteChain chain(P);

  Eigen::MatrixXd A(2, 2);
  A << -1.0, 0.3, 0.1, -1.5;
  StateFunction f(3, 2);
  f << 1, 0.5, -2, 1, 0.3, -0.7;
  Eigen::VectorXd t0(2);
  t0 << 0.4, -0.2;
  LinearSAProblem prob{A, f, 0.9, t0};

  Eigen::VectorXd phi0(3);
  phi0 << 0.5, 0.25, 0.25;

  std::vector<Eigen::MatrixXd> Amap(3, A);
  std::vector<Eigen::VectorXd> drive(3);
  for (int z = 0; z < 3; ++z) drive[z] = f.row(z).transpose();

  auto cps = propagate_linear(chain, prob, phi0, {1, 2, 3, 5, 8});
  for (const MomentCheckpoint& cp : cps) {
    BruteMoments ref = brute_force(chain, phi0, t0, prob.gain, cp.n, Amap, drive);
    CHECK((cp.mean - ref.mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cp.cov - ref.cov).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("propagate_random_linear matches brute force with per-state matrices") {
  Eigen::MatrixXd P(2, 2);
  P << 0.7, 0.3, 0.4, 0.6;
  FiniteChain chain(P);

  Eigen::MatrixXd A0(2, 2), A1(2, 2);
  A0 << -2.0, 0.2, 0.0, -1.2;
  A1 << -1.1, -0.3, 0.4, -2.5;
  Eigen::VectorXd b0(2), b1(2);
  b0 << 1.0, -0.5;
  b1 << -2.0, 0.3;
  Eigen::VectorXd tstar(2), t0(2);
  tstar << 0.5, -1.0;
  t0 << 0.1, 0.1;
  RandomLinearSAProblem prob{{A0, A1}, {b0, b1}, tstar, t0, 1.0};

  Eigen::VectorXd phi0(2);
  phi0 << 0.3, 0.7;

  std::vector<Eigen::VectorXd> drive = {A0 * tstar - b0, A1 * tstar - b1};
  auto cps = propagate_random_linear(chain, prob, phi0, {1, 3, 6, 9});
  for (const MomentCheckpoint& cp : cps) {
    BruteMoments ref =
        brute_force(chain, phi0, t0, prob.gain, cp.n, prob.Amap, drive);
    CHECK((cp.mean - ref.mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cp.cov - ref.cov).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("oracle MCMC averaging matches the closed-form autocovariance sum") {
  // A = -I, gain 1 turns the recursion into the running average of the
  // noise: theta_n = (1/n) sum_{k=1..n} f(Phi_k). Compare Var(theta_n)
  // against the exact double sum over autocovariances from phi0 = pi.
  Eigen::MatrixXd P(2, 2);
  P << 0.75, 0.25, 0.25, 0.75;
  FiniteChain chain(P);
  Eigen::VectorXd pi = stationary_dist(chain);
  StateFunction f(2, 1);
  f << 1, -1;
  LinearSAProblem prob{-Eigen::MatrixXd::Identity(1, 1), f, 1.0,
                       Eigen::VectorXd::Zero(1)};

  const long n = 40;
  auto cps = propagate_linear(chain, prob, pi, {n});

  // Stationary pairwise covariances: E[f(Phi_j) f(Phi_k)] = f^T diag(pi)
  // P^{|k-j|} f. Accumulate (1/n^2) sum_{j,k}.
  double total = 0.0;
  for (long j = 1; j <= n; ++j) {
    for (long k = 1; k <= n; ++k) {
      long lag = std::labs(k - j);
      Eigen::MatrixXd Pl = Eigen::MatrixXd::Identity(2, 2);
      for (long t = 0; t < lag; ++t) Pl = Pl * P;
      total += (f.transpose() * pi.asDiagonal() * Pl * f)(0, 0);
    }
  }
  total /= static_cast<double>(n) * static_cast<double>(n);
  // Started from stationarity the mean is 0 and the variance is the sum.
  CHECK(std::abs(cps[0].mean(0)) <= 1e-13);
  CHECK(cps[0].cov(0, 0) == doctest::Approx(total).epsilon(1e-12));
}
