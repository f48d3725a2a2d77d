#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacov/covtheory.hpp"

using namespace sacov;

namespace {

Eigen::MatrixXd scalar(double x) {
  Eigen::MatrixXd m(1, 1);
  m << x;
  return m;
}

NoiseStats two_state_stats() {
  Eigen::MatrixXd P(2, 2);
  P << 0.75, 0.25, 0.25, 0.75;
  StateFunction f(2, 1);
  f << 1, -1;
  return noise_stats(FiniteChain(P), f);
}

}  // namespace

TEST_CASE("solve_lyapunov closed forms and residual") {
  // Scalar: m s + s m + q = 0 -> s = q / (-2m)
  CHECK(solve_lyapunov(scalar(-1.0), scalar(1.0))(0, 0) == doctest::Approx(0.5));
  CHECK(solve_lyapunov(scalar(-0.25), scalar(3.0))(0, 0) == doctest::Approx(6.0));

  // Diagonal M, identity Q: Sigma_ii = 1/(-2 m_i)
  Eigen::MatrixXd M = Eigen::Vector2d(-0.5, -2.0).asDiagonal();
  Eigen::MatrixXd S = solve_lyapunov(M, Eigen::MatrixXd::Identity(2, 2));
  CHECK(S(0, 0) == doctest::Approx(1.0));
  CHECK(S(1, 1) == doctest::Approx(0.25));
  CHECK(std::abs(S(0, 1)) <= 1e-12);

  // Non-normal M: verify the defining equation directly.
  Eigen::MatrixXd N(2, 2);
  N << -1, 5, 0, -1.2;
  Eigen::MatrixXd Q(2, 2);
  Q << 2, 0.3, 0.3, 1;
  Eigen::MatrixXd X = solve_lyapunov(N, Q);
  CHECK((N * X + X * N.transpose() + Q).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((X - X.transpose()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(solve_lyapunov(scalar(0.5), scalar(1.0)), StabilityError);
}

TEST_CASE("is_hurwitz boundary behaviour") {
  CHECK(is_hurwitz(scalar(-1.0)));
  CHECK_FALSE(is_hurwitz(scalar(0.0)));
  CHECK_FALSE(is_hurwitz(scalar(1e-12)));
  Eigen::MatrixXd rot(2, 2);
  rot << 0, 1, -1, 0;  // eigenvalues +-i, real part 0
  CHECK_FALSE(is_hurwitz(rot));
  CHECK(is_hurwitz(rot - 0.1 * Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("eigen_report: rho0, flags, leading left eigenvector") {
  Eigen::MatrixXd sd = Eigen::MatrixXd::Identity(2, 2);

  EigenReport r1 = eigen_report(-Eigen::MatrixXd::Identity(2, 2), sd);
  CHECK(r1.rho0 == doctest::Approx(1.0));
  CHECK(r1.half_condition);
  CHECK_FALSE(r1.one_condition);

  Eigen::MatrixXd D = Eigen::Vector2d(-0.3, -2.0).asDiagonal();
  EigenReport r2 = eigen_report(D, sd);
  CHECK(r2.rho0 == doctest::Approx(0.3));
  CHECK_FALSE(r2.half_condition);
  // Leading eigenvalue -0.3 has left eigenvector e_1.
  CHECK(std::abs(r2.leading_left_eigenvector(0)) == doctest::Approx(1.0));
  CHECK(std::abs(r2.leading_left_eigenvector(1)) <= 1e-12);
  CHECK(r2.leading_left_eigenvector(0).real() > 0);
  CHECK(r2.sigma_v_nonzero);  // v^T Sigma_Delta v = 1

  EigenReport r3 = eigen_report(D, Eigen::Vector2d(0.0, 1.0).asDiagonal().toDenseMatrix());
  CHECK_FALSE(r3.sigma_v_nonzero);  // noise vanishes along the slow direction

  Eigen::MatrixXd T(2, 2);
  T << -1, 5, 0, -1.2;
  EigenReport r4 = eigen_report(T, sd);
  CHECK(r4.rho0 == doctest::Approx(1.0));
  CHECK(r4.half_condition);

  CHECK_THROWS_AS(eigen_report(scalar(0.25), scalar(1.0)), StabilityError);
}

TEST_CASE("sigma_theta: scalar identity and degeneracy") {
  // Scalar: Sigma = Sigma_Delta / (2|A| - 1)
  CHECK(sigma_theta(scalar(-1.0), scalar(3.0))(0, 0) == doctest::Approx(3.0));
  CHECK(sigma_theta(scalar(-2.0), scalar(3.0))(0, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sigma_theta(scalar(-0.3), scalar(1.0)), RateDegenerateError);
  CHECK_THROWS_AS(sigma_theta(scalar(-0.5), scalar(1.0)), RateDegenerateError);
}

TEST_CASE("sigma_theta_gain: closed form, boundary, g=1 consistency") {
  // Scalar: Sigma^g = g^2 SigmaD / (2 g|A| - 1); A=-0.3, SigmaD=3, g=10/3 -> 100/3
  CHECK(sigma_theta_gain(scalar(-0.3), scalar(3.0), 10.0 / 3)(0, 0) ==
        doctest::Approx(100.0 / 3).epsilon(1e-12));
  CHECK(sigma_theta_gain(scalar(-0.3), scalar(1.0), 10.0 / 3)(0, 0) ==
        doctest::Approx(100.0 / 9).epsilon(1e-12));
  CHECK(sigma_theta_gain(scalar(-1.0), scalar(3.0), 1.0)(0, 0) ==
        sigma_theta(scalar(-1.0), scalar(3.0))(0, 0));
  // g|A| = 1/2 exactly: not admissible
  CHECK_THROWS_AS(sigma_theta_gain(scalar(-0.3), scalar(1.0), 5.0 / 3), StabilityError);
}

TEST_CASE("optimal_scalar_gain finds g* = 1/|A| in the scalar case") {
  // trace Sigma^g = g^2 s / (2g|A| - 1) is minimized at g = 1/|A|.
  std::vector<double> grid;
  for (double g = 0.5; g <= 12.0; g += 0.25) grid.push_back(g);
  GainChoice gc = optimal_scalar_gain(scalar(-0.3), scalar(3.0), grid);
  CHECK(gc.gain == doctest::Approx(10.0 / 3).epsilon(1e-4));
  CHECK(gc.trace_value == doctest::Approx(100.0 / 3).epsilon(1e-6));
}

TEST_CASE("sigma_theta_2 frozen scalar example") {
  NoiseStats st = two_state_stats();
  CHECK(st.sigma_delta(0, 0) == doctest::Approx(3.0));

  Eigen::MatrixXd A = scalar(-2.0);
  Eigen::MatrixXd S1 = sigma_theta(A, st.sigma_delta);
  CHECK(S1(0, 0) == doctest::Approx(1.0));

  SigmaThetaTwo s2 = sigma_theta_2(A, S1, st);
  CHECK(s2.sigma_sharp_1(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s2.sigma_sharp_2(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(s2.sigma_sharp(0, 0) == doctest::Approx(6.5).epsilon(1e-12));
  CHECK(s2.sigma_theta_2(0, 0) == doctest::Approx(-1.5).epsilon(1e-12));

  // Split consistency in a matrix case.
  Eigen::MatrixXd Am(1, 1);
  Am << -3.0;
  Eigen::MatrixXd Sm = sigma_theta(Am, st.sigma_delta);
  SigmaThetaTwo sm = sigma_theta_2(Am, Sm, st);
  CHECK((sm.sigma_sharp - sm.sigma_sharp_1 - sm.sigma_sharp_2).cwiseAbs().maxCoeff() <=
        1e-12);

  CHECK_THROWS_AS(sigma_theta_2(scalar(-1.0), sigma_theta(scalar(-1.0), st.sigma_delta),
                                st),
                  FinerBoundUnavailable);
}

TEST_CASE("predicted_covariance assembles the finite-n formula") {
  CovariancePrediction pred;
  pred.sigma_theta = scalar(1.0);
  pred.sigma_theta_2 = scalar(-1.5);
  CHECK(predicted_covariance(pred, 100)(0, 0) ==
        doctest::Approx(1.0 / 100 - 1.5 / 10000).epsilon(1e-14));

  pred.sigma_theta_2.reset();
  CHECK(predicted_covariance(pred, 100)(0, 0) == doctest::Approx(0.01).epsilon(1e-14));
}
