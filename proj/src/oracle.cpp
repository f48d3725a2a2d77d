#include "sacov/oracle.hpp"

#include <algorithm>
#include <functional>

namespace sacov {

namespace {

struct MomentState {
  Eigen::VectorXd p;                // occupancy p_n(z)
  std::vector<Eigen::VectorXd> m;   // E[theta 1{Phi=z}]
  std::vector<Eigen::MatrixXd> S;   // E[theta theta^T 1{Phi=z}]
};

MomentCheckpoint summarize(long n, const MomentState& st) {
  const int d = static_cast<int>(st.m[0].size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t z = 0; z < st.m.size(); ++z) {
    mean += st.m[z];
    second += st.S[z];
  }
  return {n, mean, second - mean * mean.transpose()};
}

// One exact step with arrival-state-dependent contraction B(z') and drive
// d(z') (both already include the step size).
void step(const Eigen::MatrixXd& P, MomentState& st,
          const std::vector<Eigen::MatrixXd>& B,
          const std::vector<Eigen::VectorXd>& drive) {
  const int numS = static_cast<int>(P.rows());
  const int d = static_cast<int>(st.m[0].size());
  MomentState next;
  next.p = Eigen::VectorXd::Zero(numS);
  next.m.assign(numS, Eigen::VectorXd::Zero(d));
  next.S.assign(numS, Eigen::MatrixXd::Zero(d, d));
  for (int zp = 0; zp < numS; ++zp) {
    const Eigen::MatrixXd& Bz = B[zp];
    const Eigen::VectorXd& dz = drive[zp];
    for (int z = 0; z < numS; ++z) {
      const double w = P(z, zp);
      if (w == 0.0) continue;
      next.p(zp) += w * st.p(z);
      Eigen::VectorXd Bm = Bz * st.m[z];
      next.m[zp] += w * (Bm + dz * st.p(z));
      Eigen::MatrixXd BSB = Bz * st.S[z] * Bz.transpose();
      next.S[zp] += w * (BSB + Bm * dz.transpose() + dz * Bm.transpose() +
                         dz * dz.transpose() * st.p(z));
    }
  }
  st = std::move(next);
}

std::vector<MomentCheckpoint> propagate(
    const FiniteChain& chain, const Eigen::VectorXd& theta0, double gain,
    const Eigen::VectorXd& phi0_dist, const std::vector<long>& checkpoints,
    const std::function<Eigen::MatrixXd(int)>& Amat,
    const std::function<Eigen::VectorXd(int)>& drive_vec) {
  if (checkpoints.empty()) {
    throw std::invalid_argument("checkpoint list must be nonempty");
  }
  const int numS = chain.num_states();
  const int d = static_cast<int>(theta0.size());
  if (phi0_dist.size() != numS || std::abs(phi0_dist.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("phi0_dist must be a distribution over states");
  }
  std::vector<long> ck = checkpoints;
  std::sort(ck.begin(), ck.end());

  MomentState st;
  st.p = phi0_dist;
  st.m.resize(numS);
  st.S.resize(numS);
  for (int z = 0; z < numS; ++z) {
    st.m[z] = theta0 * st.p(z);
    st.S[z] = theta0 * theta0.transpose() * st.p(z);
  }

  std::vector<MomentCheckpoint> out;
  if (ck.front() == 0) out.push_back(summarize(0, st));

  std::vector<Eigen::MatrixXd> B(numS);
  std::vector<Eigen::VectorXd> dv(numS);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  for (long n = 0; n < ck.back(); ++n) {
    const double a = gain / static_cast<double>(n + 1);
    for (int zp = 0; zp < numS; ++zp) {
      B[zp] = I + a * Amat(zp);
      dv[zp] = a * drive_vec(zp);
    }
    step(chain.transition(), st, B, dv);
    if (std::binary_search(ck.begin(), ck.end(), n + 1)) {
      out.push_back(summarize(n + 1, st));
    }
  }
  return out;
}

}  // namespace

std::vector<MomentCheckpoint> propagate_linear(const FiniteChain& chain,
                                               const LinearSAProblem& problem,
                                               const Eigen::VectorXd& phi0_dist,
                                               const std::vector<long>& checkpoints) {
  return propagate(
      chain, problem.theta0, problem.gain, phi0_dist, checkpoints,
      [&](int) { return problem.A; },
      [&](int zp) { return problem.noise.row(zp).transpose().eval(); });
}

std::vector<MomentCheckpoint> propagate_random_linear(
    const FiniteChain& chain, const RandomLinearSAProblem& problem,
    const Eigen::VectorXd& phi0_dist, const std::vector<long>& checkpoints) {
  return propagate(
      chain, problem.theta0, problem.gain, phi0_dist, checkpoints,
      [&](int zp) { return problem.Amap[zp]; },
      [&](int zp) {
        return (problem.Amap[zp] * problem.theta_star - problem.bmap[zp]).eval();
      });
}

}  // namespace sacov
