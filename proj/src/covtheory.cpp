#include "sacov/covtheory.hpp"

#include <algorithm>
#include <cmath>

namespace sacov {

namespace {

double max_real_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

double trace_sigma_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_delta,
                        double g) {
  return sigma_theta_gain(A, sigma_delta, g).trace();
}

}  // namespace

bool is_hurwitz(const Eigen::MatrixXd& M, double tol) {
  return max_real_eigenvalue(M) < -tol;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Q) {
  const int d = static_cast<int>(M.rows());
  if (Q.rows() != d || Q.cols() != d) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  if (!is_hurwitz(M)) {
    throw StabilityError("solve_lyapunov: M is not Hurwitz");
  }
  // vec(M Sigma + Sigma M^T) = (I (x) M + M (x) I) vec(Sigma)
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d * d, d * d);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    K.block(j * d, j * d, d, d) += M;  // I (x) M
  }
  for (int jb = 0; jb < d; ++jb) {
    for (int ib = 0; ib < d; ++ib) {
      K.block(ib * d, jb * d, d, d) += M(ib, jb) * I;  // M (x) I
    }
  }
  Eigen::VectorXd q(Eigen::Map<const Eigen::VectorXd>(Q.data(), d * d));
  Eigen::VectorXd s = K.fullPivLu().solve(-q);
  Eigen::MatrixXd Sigma = Eigen::Map<Eigen::MatrixXd>(s.data(), d, d);
  Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();

  double res = (M * Sigma + Sigma * M.transpose() + Q).norm();
  if (res > 1e-10 * std::max(1.0, Q.norm())) {
    throw StabilityError("solve_lyapunov: residual " + std::to_string(res) +
                         " above tolerance (ill-conditioned system)");
  }
  return Sigma;
}

EigenReport eigen_report(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_delta,
                         double sigma_v_tol) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("eigen_report: A must be square");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(A.transpose());  // right evecs of A^T = left of A
  const Eigen::VectorXcd lambdas = es.eigenvalues();

  EigenReport rep;
  double max_real = -std::numeric_limits<double>::infinity();
  int lead = 0;
  for (int i = 0; i < lambdas.size(); ++i) {
    rep.eigenvalues.push_back(lambdas(i));
    if (lambdas(i).real() > max_real) {
      max_real = lambdas(i).real();
      lead = i;
    }
  }
  rep.rho0 = -max_real;
  if (!(rep.rho0 > 1e-9)) {
    throw StabilityError("eigen_report: A is not Hurwitz (max Real(lambda) = " +
                         std::to_string(max_real) + ")");
  }
  rep.half_condition = max_real < -0.5 - 1e-9;
  rep.one_condition = max_real < -1.0 - 1e-9;

  Eigen::VectorXcd v = es.eigenvectors().col(lead);
  v.normalize();
  // Phase convention: largest-modulus entry positive real.
  int imax = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  }
  v *= std::conj(v(imax)) / std::abs(v(imax));
  rep.leading_left_eigenvector = v;

  rep.sigma_v_nonzero =
      (sigma_delta.cast<std::complex<double>>() * v).norm() >
      sigma_v_tol * std::max(1e-300, sigma_delta.norm());
  return rep;
}

Eigen::MatrixXd sigma_theta(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_delta) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXd M = 0.5 * Eigen::MatrixXd::Identity(d, d) + A;
  if (!is_hurwitz(M)) {
    double rho0 = -max_real_eigenvalue(A);
    throw RateDegenerateError(
        "I/2 + A not Hurwitz; covariance rate degrades to n^(-" +
            std::to_string(2 * rho0) + ")",
        rho0);
  }
  return solve_lyapunov(M, sigma_delta);
}

Eigen::MatrixXd sigma_theta_gain(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& sigma_delta, double g) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXd M = 0.5 * Eigen::MatrixXd::Identity(d, d) + g * A;
  if (!is_hurwitz(M)) {
    throw StabilityError("sigma_theta_gain: I/2 + gA not Hurwitz at g = " +
                         std::to_string(g));
  }
  return solve_lyapunov(M, g * g * sigma_delta);
}

GainChoice optimal_scalar_gain(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& sigma_delta,
                               const std::vector<double>& g_grid) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  std::vector<double> admissible;
  for (double g : g_grid) {
    if (is_hurwitz(0.5 * I + g * A)) admissible.push_back(g);
  }
  if (admissible.empty()) {
    throw StabilityError("optimal_scalar_gain: no admissible gains in grid");
  }

  double best_g = admissible.front();
  double best_v = trace_sigma_gain(A, sigma_delta, best_g);
  for (double g : admissible) {
    double v = trace_sigma_gain(A, sigma_delta, g);
    if (v < best_v) {
      best_v = v;
      best_g = g;
    }
  }

  // Golden-section refinement on the bracketing admissible neighbours.
  std::sort(admissible.begin(), admissible.end());
  auto it = std::lower_bound(admissible.begin(), admissible.end(), best_g);
  double lo = (it == admissible.begin()) ? best_g : *(it - 1);
  double hi = (it + 1 == admissible.end()) ? best_g : *(it + 1);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = trace_sigma_gain(A, sigma_delta, x1);
  double f2 = trace_sigma_gain(A, sigma_delta, x2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = trace_sigma_gain(A, sigma_delta, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = trace_sigma_gain(A, sigma_delta, x2);
    }
  }
  double g_star = 0.5 * (a + b);
  return {g_star, trace_sigma_gain(A, sigma_delta, g_star)};
}

SigmaThetaTwo sigma_theta_2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_theta,
                            const NoiseStats& stats) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXd IA = Eigen::MatrixXd::Identity(d, d) + A;
  if (!is_hurwitz(IA)) {
    throw FinerBoundUnavailable("sigma_theta_2: I + A not Hurwitz");
  }

  SigmaThetaTwo out;
  // Combined equation, rearranged to standard Lyapunov form.
  Eigen::MatrixXd Q = A * sigma_theta * A.transpose() - stats.sigma_delta -
                      IA * stats.cross_m_mhat -
                      stats.cross_m_mhat.transpose() * IA.transpose();
  out.sigma_sharp = solve_lyapunov(IA, Q);

  out.sigma_sharp_1 = solve_lyapunov(
      IA, A * sigma_theta * A.transpose() - stats.sigma_delta);
  out.sigma_sharp_2 = solve_lyapunov(
      IA, -IA * stats.cross_m_mhat - stats.cross_m_mhat.transpose() * IA.transpose());

  out.sigma_theta_2 = out.sigma_sharp + stats.sigma_z - stats.cross_m_zhat -
                      stats.cross_m_zhat.transpose();
  return out;
}

Eigen::MatrixXd predicted_covariance(const CovariancePrediction& pred, long n) {
  if (n < 1) {
    throw std::invalid_argument("predicted_covariance: n must be >= 1");
  }
  Eigen::MatrixXd out = pred.sigma_theta / static_cast<double>(n);
  if (pred.sigma_theta_2) {
    out += *pred.sigma_theta_2 / (static_cast<double>(n) * static_cast<double>(n));
  }
  return out;
}

}  // namespace sacov
