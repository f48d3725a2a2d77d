#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "sacov/errors.hpp"
#include "sacov/poisson.hpp"

namespace sacov {

struct EigenReport {
  std::vector<std::complex<double>> eigenvalues;
  double rho0 = 0.0;  // -max Real(lambda)
  Eigen::VectorXcd leading_left_eigenvector;
  bool half_condition = false;  // I/2 + A Hurwitz
  bool one_condition = false;   // I + A Hurwitz
  bool sigma_v_nonzero = false;
};

struct CovariancePrediction {
  Eigen::MatrixXd sigma_theta;
  std::optional<Eigen::MatrixXd> sigma_theta_2;
  double rate_exponent = 1.0;  // 1 when half_condition, else 2*rho0
  double gain = 1.0;
  EigenReport eigen;
};

struct SigmaThetaTwo {
  Eigen::MatrixXd sigma_sharp;
  Eigen::MatrixXd sigma_sharp_1;  // split per the two sub-equations
  Eigen::MatrixXd sigma_sharp_2;
  Eigen::MatrixXd sigma_theta_2;
};

/// Solves M Sigma + Sigma M^T + Q = 0 by the d^2 x d^2 vectorized system.
/// M must be Hurwitz; the result is symmetrized.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Q);

bool is_hurwitz(const Eigen::MatrixXd& M, double tol = 1e-9);

/// Eigen-structure of A with the Hurwitz-shift flags and the leading left
/// eigenvector (unit norm, largest-modulus entry made positive real).
EigenReport eigen_report(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_delta,
                         double sigma_v_tol = 1e-8);

/// Sigma_theta from [I/2 + A] Sigma + Sigma [I/2 + A]^T + Sigma_Delta = 0.
/// Throws RateDegenerateError when I/2 + A is not Hurwitz.
Eigen::MatrixXd sigma_theta(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_delta);

/// Gain variant: [I/2 + gA] Sigma + Sigma [I/2 + gA]^T + g^2 Sigma_Delta = 0.
Eigen::MatrixXd sigma_theta_gain(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& sigma_delta, double g);

struct GainChoice {
  double gain;
  double trace_value;
};

/// Minimizes trace(Sigma_theta^g) over the admissible part of the grid,
/// refined by golden-section to 1e-6.
GainChoice optimal_scalar_gain(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& sigma_delta,
                               const std::vector<double>& g_grid);

/// Second-order coefficient Sigma_theta,2 and the Sigma_sharp split.
/// Requires I + A Hurwitz (else FinerBoundUnavailable).
SigmaThetaTwo sigma_theta_2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_theta,
                            const NoiseStats& stats);

/// Sigma_theta/n (+ Sigma_theta,2/n^2 when present).
Eigen::MatrixXd predicted_covariance(const CovariancePrediction& pred, long n);

}  // namespace sacov
