#include "sacov/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include <json.hpp>

#include "sacov/covtheory.hpp"
#include "sacov/harness.hpp"
#include "sacov/oracle.hpp"
#include "sacov/poisson.hpp"

namespace sacov {

using nlohmann::json;

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::MatrixXd to_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(where + ": expected a nested array (matrix)");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) {
      throw ConfigError(where + ": ragged rows");
    }
    for (int k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

Eigen::VectorXd to_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
    }
  }
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

struct CsvWriter {
  std::ofstream out;
  explicit CsvWriter(const std::string& path) : out(path) {
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "n,source,stat,row,col,value\n";
  }
  void row(long n, const std::string& source, const std::string& stat, int r, int c,
           double v) {
    out << n << ',' << source << ',' << stat << ',' << r << ',' << c << ',' << fmt(v)
        << '\n';
  }
  void moments(long n, const std::string& source, const Eigen::VectorXd& mean,
               const Eigen::MatrixXd& cov) {
    for (int i = 0; i < mean.size(); ++i) row(n, source, "mean", i, 0, mean(i));
    for (int i = 0; i < cov.rows(); ++i)
      for (int j = 0; j < cov.cols(); ++j) row(n, source, "cov", i, j, cov(i, j));
    row(n, source, "trace_cov", 0, 0, cov.trace());
  }
};

FiniteChain analysis_chain(const ChainSpec& spec) {
  if (spec.is_queue) {
    return QueueChain(spec.arrival_prob, spec.truncation).truncated(spec.truncation);
  }
  return FiniteChain(spec.transition);
}

// Per-trial runner for the linear SA ensemble.
TrialRunner linear_runner(const ExperimentConfig& cfg, const FiniteChain& chain,
                          const std::vector<long>& ck) {
  LinearSAProblem prob{cfg.A, cfg.noise, cfg.gain, cfg.theta0};
  long horizon = ck.back();
  int init = cfg.initial_state;
  return [prob, &chain, ck, horizon, init](std::uint64_t seed) {
    ChainSampler sampler(chain, seed, init);
    std::vector<int> path = sampler.sample_path(horizon);
    Trajectory tr = run_linear_sa(prob, path, ck);
    std::vector<Eigen::VectorXd> out;
    out.reserve(tr.size());
    for (const auto& c : tr) out.push_back(c.theta);
    return out;
  };
}

int run_theory(const ExperimentConfig& cfg, json& summary) {
  FiniteChain chain = analysis_chain(cfg.chain);
  Eigen::VectorXd pi = stationary_dist(chain);
  StateFunction fstar = center(cfg.noise, pi);
  NoiseStats stats = noise_stats(chain, fstar);
  EigenReport rep = eigen_report(cfg.A, stats.sigma_delta, cfg.sigma_v_tol);

  summary["sigma_delta"] = matrix_json(stats.sigma_delta);
  summary["sigma_z"] = matrix_json(stats.sigma_z);
  summary["rho0"] = rep.rho0;
  summary["half_condition"] = rep.half_condition;
  summary["one_condition"] = rep.one_condition;
  summary["sigma_v_nonzero"] = rep.sigma_v_nonzero;
  json lam = json::array();
  for (auto& l : rep.eigenvalues) lam.push_back({l.real(), l.imag()});
  summary["eigenvalues"] = lam;

  Eigen::MatrixXd g2 = cfg.gain * cfg.gain * stats.sigma_delta;
  Eigen::MatrixXd gA = cfg.gain * cfg.A;
  const int d = static_cast<int>(cfg.A.rows());
  if (is_hurwitz(0.5 * Eigen::MatrixXd::Identity(d, d) + gA)) {
    Eigen::MatrixXd st = sigma_theta_gain(cfg.A, stats.sigma_delta, cfg.gain);
    summary["sigma_theta"] = matrix_json(st);
    summary["rate_exponent"] = 1.0;
    if (cfg.gain == 1.0 && rep.one_condition) {
      SigmaThetaTwo s2 = sigma_theta_2(cfg.A, st, stats);
      summary["sigma_theta_2"] = matrix_json(s2.sigma_theta_2);
      summary["sigma_sharp"] = matrix_json(s2.sigma_sharp);
    }
  } else {
    summary["rate_exponent"] = 2.0 * rep.rho0;
    summary["rate_degenerate"] = true;
  }
  return 0;
}

int run_oracle(const ExperimentConfig& cfg, const std::string& out_dir, json& summary) {
  FiniteChain chain = analysis_chain(cfg.chain);
  LinearSAProblem prob{cfg.A, cfg.noise, cfg.gain, cfg.theta0};
  Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(chain.num_states());
  phi0(cfg.initial_state) = 1.0;
  auto moments = propagate_linear(chain, prob, phi0, cfg.checkpoints);
  CsvWriter csv(out_dir + "/trajectory.csv");
  for (const auto& m : moments) csv.moments(m.n, "oracle", m.mean, m.cov);
  summary["checkpoints"] = cfg.checkpoints;
  return 0;
}

int run_simulate(const ExperimentConfig& cfg, const std::string& out_dir, json& summary,
                 int threads) {
  FiniteChain chain = analysis_chain(cfg.chain);
  EnsembleSpec spec{cfg.trials, cfg.checkpoints, *cfg.master_seed, threads};
  EmpiricalMoments emp = run_ensemble(spec, linear_runner(cfg, chain, cfg.checkpoints));
  CsvWriter csv(out_dir + "/trajectory.csv");
  for (const auto& m : emp) csv.moments(m.n, "empirical", m.mean, m.cov);
  summary["trials"] = cfg.trials;
  return 0;
}

int run_compare(const ExperimentConfig& cfg, const std::string& out_dir, json& summary,
                int threads) {
  FiniteChain chain = analysis_chain(cfg.chain);
  LinearSAProblem prob{cfg.A, cfg.noise, cfg.gain, cfg.theta0};
  Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(chain.num_states());
  phi0(cfg.initial_state) = 1.0;
  auto oracle = propagate_linear(chain, prob, phi0, cfg.checkpoints);

  EnsembleSpec spec{cfg.trials, cfg.checkpoints, *cfg.master_seed, threads};
  EmpiricalMoments emp = run_ensemble(spec, linear_runner(cfg, chain, cfg.checkpoints));

  ComparisonReport rep = compare_to_theory(emp, oracle, cfg.band);

  // Theory prediction alongside, when the 1/n rate applies.
  Eigen::VectorXd pi = stationary_dist(chain);
  NoiseStats stats = noise_stats(chain, center(cfg.noise, pi));
  CsvWriter csv(out_dir + "/trajectory.csv");
  for (const auto& m : oracle) csv.moments(m.n, "oracle", m.mean, m.cov);
  for (const auto& m : emp) csv.moments(m.n, "empirical", m.mean, m.cov);
  const int d = static_cast<int>(cfg.A.rows());
  if (is_hurwitz(0.5 * Eigen::MatrixXd::Identity(d, d) + cfg.gain * cfg.A)) {
    Eigen::MatrixXd st = sigma_theta_gain(cfg.A, stats.sigma_delta, cfg.gain);
    for (long n : cfg.checkpoints) {
      csv.moments(n, "theory", Eigen::VectorXd::Zero(d), (st / double(n)).eval());
    }
    summary["sigma_theta"] = matrix_json(st);
  }

  json zs = json::array();
  for (const auto& e : rep.entries) {
    zs.push_back({{"n", e.n}, {"z_max", e.z_max}, {"z_trace", e.z_trace},
                  {"pass", e.pass}});
  }
  summary["comparison"] = zs;
  summary["pass"] = rep.pass;
  summary["band"] = rep.band;
  return rep.pass ? 0 : 2;
}

int run_couple(const ExperimentConfig& cfg, const std::string& out_dir, json& summary,
               int threads) {
  FiniteChain chain = analysis_chain(cfg.chain);
  Eigen::VectorXd pi = stationary_dist(chain);
  const int d = static_cast<int>(cfg.theta_star.size());
  Eigen::MatrixXd A_mean = Eigen::MatrixXd::Zero(d, d);
  for (int z = 0; z < chain.num_states(); ++z) A_mean += pi(z) * cfg.Amap[z];

  RandomLinearSAProblem prob{cfg.Amap, cfg.bmap, cfg.theta_star, cfg.theta0, cfg.gain};
  const std::vector<long>& ck = cfg.checkpoints;
  int init = cfg.initial_state;
  TrialRunner runner = [&prob, &chain, &A_mean, &ck, init](std::uint64_t seed) {
    ChainSampler sampler(chain, seed, init);
    std::vector<int> path = sampler.sample_path(ck.back());
    CouplingTrace tr = run_coupled(prob, A_mean, path, ck);
    std::vector<Eigen::VectorXd> out;
    for (const auto& c : tr.err) {
      Eigen::VectorXd v(1);
      v(0) = c.theta.squaredNorm();
      out.push_back(v);
    }
    return out;
  };
  EnsembleSpec spec{cfg.trials, ck, *cfg.master_seed, threads};
  EmpiricalMoments emp = run_ensemble(spec, runner);

  CsvWriter csv(out_dir + "/trajectory.csv");
  std::vector<long> ns;
  std::vector<double> vals;
  for (const auto& m : emp) {
    csv.row(m.n, "empirical", "coupling_err", 0, 0, m.mean(0));
    if (m.n > 0) {
      ns.push_back(m.n);
      vals.push_back(m.mean(0));
    }
  }
  long n_hi = ns.back();
  long n_lo = std::max<long>(2, n_hi / 10);
  RateFit fit = fit_rate(ns, vals, n_lo, n_hi);
  double rho0 = -Eigen::EigenSolver<Eigen::MatrixXd>(A_mean).eigenvalues().real().maxCoeff();
  double bound = rho0 > 1.0 ? -2.0 + 0.1 : -2.0 * rho0 + 0.1;
  bool pass = fit.exponent <= bound;
  summary["rho0"] = rho0;
  summary["rate_fit"] = {{"exponent", fit.exponent}, {"r_squared", fit.r_squared},
                         {"window", {fit.n_lo, fit.n_hi}}};
  summary["rate_bound"] = bound;
  summary["pass"] = pass;
  return pass ? 0 : 2;
}

int run_td(const ExperimentConfig& cfg, const std::string& out_dir, json& summary) {
  FiniteChain chain(cfg.chain.transition);
  TDProblem prob{chain, cfg.td_cost, cfg.td_discount, cfg.td_basis};
  TDMatrices mats = td_matrices(prob);
  const int d = static_cast<int>(cfg.td_basis.cols());

  ChainSampler sampler(chain, *cfg.master_seed, cfg.initial_state);
  std::vector<int> xpath = sampler.sample_path(cfg.horizon);

  Eigen::VectorXd theta0 = cfg.theta0.size() == d ? cfg.theta0 : Eigen::VectorXd::Zero(d);
  Trajectory td = run_td0(prob, theta0, xpath, cfg.checkpoints);

  // Same recursion through the random-linear code path on the pair chain.
  const int S = chain.num_states();
  std::vector<int> pair_path(xpath.size());
  pair_path[0] = xpath[0] * S + xpath[0];
  for (std::size_t k = 1; k < xpath.size(); ++k)
    pair_path[k] = xpath[k] * S + xpath[k - 1];
  RandomLinearSAProblem rprob{mats.Amap, mats.bmap, mats.theta_star,
                              theta0 - mats.theta_star, 1.0};
  Trajectory rl = run_random_linear_sa(rprob, pair_path, cfg.checkpoints);

  double max_equiv = 0.0;
  for (std::size_t i = 0; i < td.size(); ++i) {
    max_equiv = std::max(
        max_equiv, (td[i].theta - mats.theta_star - rl[i].theta).lpNorm<Eigen::Infinity>());
  }

  SnrLstdResult snr = run_snr_lstd(prob, xpath, cfg.checkpoints, 1e-6);
  double max_snr_rel = 0.0;
  for (std::size_t i = 0; i < snr.snr.size(); ++i) {
    double denom = std::max(1.0, snr.lstd[i].theta.norm());
    max_snr_rel = std::max(max_snr_rel,
                           (snr.snr[i].theta - snr.lstd[i].theta).norm() / denom);
  }

  Eigen::VectorXd pip = mats.pair_stationary;
  Eigen::MatrixXd fstar(pip.size(), d);
  for (int z = 0; z < pip.size(); ++z) {
    fstar.row(z) = (mats.Amap[z] * mats.theta_star - mats.bmap[z]).transpose();
  }
  NoiseStats stats = noise_stats(mats.pair_chain, center(fstar, pip));
  EigenReport rep = eigen_report(mats.A, stats.sigma_delta, cfg.sigma_v_tol);

  bool pass = max_equiv <= 1e-12 && max_snr_rel <= 1e-10;
  summary["A"] = matrix_json(mats.A);
  summary["b"] = std::vector<double>(mats.b.data(), mats.b.data() + mats.b.size());
  summary["theta_star"] = std::vector<double>(
      mats.theta_star.data(), mats.theta_star.data() + mats.theta_star.size());
  summary["rho0"] = rep.rho0;
  summary["half_condition"] = rep.half_condition;
  summary["sigma_delta"] = matrix_json(stats.sigma_delta);
  summary["td_vs_random_linear_max_err"] = max_equiv;
  summary["snr_vs_lstd_max_rel_err"] = max_snr_rel;
  summary["ridged_steps"] = snr.ridged_steps.size();
  summary["pass"] = pass;

  CsvWriter csv(out_dir + "/trajectory.csv");
  for (const auto& c : td) {
    for (int i = 0; i < c.theta.size(); ++i)
      csv.row(c.n, "empirical", "mean", i, 0, c.theta(i));
  }
  return pass ? 0 : 2;
}

int run_tails(const ExperimentConfig& cfg, const std::string& out_dir, json& summary,
              int threads) {
  QueueChain queue(cfg.chain.arrival_prob, cfg.chain.truncation);
  const double rho = queue.load();
  const double pi_f = rho / (1.0 - rho);  // stationary mean of F(z) = z
  const long horizon = cfg.horizon;

  TrialRunner runner = [&queue, horizon, pi_f](std::uint64_t seed) {
    ChainSampler sampler(queue, seed, 0);
    double sum = 0.0;
    for (long k = 0; k < horizon; ++k) sum += sampler.step();
    Eigen::VectorXd v(1);
    v(0) = sum / static_cast<double>(horizon) - pi_f;
    return std::vector<Eigen::VectorXd>{v};
  };
  // Raw per-trial samples, seeded and reduced the same way as run_ensemble.
  std::vector<double> samples(cfg.trials);
  {
    std::atomic<long> next{0};
    int T = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    T = std::max(1, T);
    std::vector<std::thread> pool;
    for (int k = 0; k < T; ++k) {
      pool.emplace_back([&]() {
        for (long t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
          samples[t] = runner(split_seed(*cfg.master_seed, t))[0](0);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> grid = cfg.eps_grid;
  if (grid.empty()) {
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    double sd = std::sqrt(var / (samples.size() - 1));
    for (int k = 1; k <= 5; ++k) grid.push_back(sd * (1.0 + 0.25 * k));
  }
  TailReport rep = tail_report(samples, grid);

  std::ofstream out(out_dir + "/tails.csv");
  out << "epsilon,side,count,trials\n";
  bool asym = true, increasing = true;
  double prev_ratio = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << fmt(grid[i]) << ",lower," << rep.lower_exceed[i] << ',' << rep.trials << '\n';
    out << fmt(grid[i]) << ",upper," << rep.upper_exceed[i] << ',' << rep.trials << '\n';
    asym = asym && rep.upper_exceed[i] > rep.lower_exceed[i];
    double ratio = rep.lower_exceed[i] > 0
                       ? double(rep.upper_exceed[i]) / double(rep.lower_exceed[i])
                       : std::numeric_limits<double>::infinity();
    increasing = increasing && ratio >= prev_ratio;
    prev_ratio = ratio;
  }
  bool pass = asym && increasing;
  summary["eps_grid"] = grid;
  summary["upper_gt_lower"] = asym;
  summary["ratio_increasing"] = increasing;
  summary["pass"] = pass;
  return pass ? 0 : 2;
}

}  // namespace

std::vector<long> geometric_checkpoints(long n_lo, long horizon) {
  std::vector<long> out;
  const double ratio = std::pow(2.0, 0.25);
  double x = static_cast<double>(n_lo);
  long prev = 0;
  while (x < static_cast<double>(horizon)) {
    long n = std::lround(x);
    if (n > prev && n < horizon) {
      out.push_back(n);
      prev = n;
    }
    x *= ratio;
  }
  out.push_back(horizon);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"experiment", "chain", "noise", "A", "gain", "horizon",
                     "checkpoints", "trials", "master_seed", "initial_state", "theta0",
                     "band", "sigma_v_tol", "td", "Amap", "bmap", "theta_star",
                     "eps_grid"},
                 "config");

  ExperimentConfig cfg;
  std::string kind = j.at("experiment").get<std::string>();
  if (kind == "theory") cfg.kind = ExperimentKind::Theory;
  else if (kind == "simulate") cfg.kind = ExperimentKind::Simulate;
  else if (kind == "oracle") cfg.kind = ExperimentKind::Oracle;
  else if (kind == "compare") cfg.kind = ExperimentKind::Compare;
  else if (kind == "couple") cfg.kind = ExperimentKind::Couple;
  else if (kind == "td") cfg.kind = ExperimentKind::Td;
  else if (kind == "tails") cfg.kind = ExperimentKind::Tails;
  else throw ConfigError("experiment: unknown kind \"" + kind + "\"");

  const json& jc = j.at("chain");
  reject_unknown(jc, {"type", "transition", "arrival_prob", "truncation"}, "chain");
  std::string ctype = jc.at("type").get<std::string>();
  if (ctype == "finite") {
    cfg.chain.transition = to_matrix(jc.at("transition"), "chain.transition");
  } else if (ctype == "mm1") {
    cfg.chain.is_queue = true;
    cfg.chain.arrival_prob = jc.at("arrival_prob").get<double>();
    cfg.chain.truncation = jc.value("truncation", 80);
  } else {
    throw ConfigError("chain.type must be \"finite\" or \"mm1\"");
  }

  cfg.gain = j.value("gain", 1.0);
  cfg.horizon = j.value("horizon", 0L);
  cfg.trials = j.value("trials", 0L);
  cfg.initial_state = j.value("initial_state", 0);
  cfg.band = j.value("band", 4.0);
  cfg.sigma_v_tol = j.value("sigma_v_tol", 1e-8);
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("noise")) cfg.noise = to_matrix(j["noise"], "noise");
  if (j.contains("A")) cfg.A = to_matrix(j["A"], "A");
  if (j.contains("eps_grid"))
    cfg.eps_grid = j["eps_grid"].get<std::vector<double>>();

  if (j.contains("td")) {
    const json& jt = j["td"];
    reject_unknown(jt, {"cost", "discount", "basis"}, "td");
    cfg.td_cost = to_vector(jt.at("cost"), "td.cost");
    cfg.td_discount = jt.at("discount").get<double>();
    cfg.td_basis = to_matrix(jt.at("basis"), "td.basis");
  }
  if (j.contains("Amap")) {
    for (const auto& ja : j["Amap"]) cfg.Amap.push_back(to_matrix(ja, "Amap[i]"));
  }
  if (j.contains("bmap")) {
    for (const auto& jb : j["bmap"]) cfg.bmap.push_back(to_vector(jb, "bmap[i]"));
  }
  if (j.contains("theta_star")) cfg.theta_star = to_vector(j["theta_star"], "theta_star");

  // Dimension d for theta0 defaults.
  int d = 0;
  if (cfg.A.rows() > 0) d = static_cast<int>(cfg.A.rows());
  else if (cfg.td_basis.cols() > 0) d = static_cast<int>(cfg.td_basis.cols());
  else if (cfg.theta_star.size() > 0) d = static_cast<int>(cfg.theta_star.size());
  else if (cfg.noise.cols() > 0) d = static_cast<int>(cfg.noise.cols());
  cfg.theta0 = j.contains("theta0") ? to_vector(j["theta0"], "theta0")
                                    : Eigen::VectorXd::Zero(std::max(d, 1)).eval();

  if (j.contains("checkpoints")) {
    cfg.checkpoints = j["checkpoints"].get<std::vector<long>>();
    std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
  } else if (cfg.horizon > 0) {
    cfg.checkpoints = geometric_checkpoints(10, cfg.horizon);
  }

  const bool needs_seed = cfg.kind == ExperimentKind::Simulate ||
                          cfg.kind == ExperimentKind::Compare ||
                          cfg.kind == ExperimentKind::Couple ||
                          cfg.kind == ExperimentKind::Td ||
                          cfg.kind == ExperimentKind::Tails;
  if (needs_seed && !cfg.master_seed) {
    throw ConfigError("master_seed is required for experiment \"" + kind +
                      "\" (no implicit randomness)");
  }
  const bool needs_trials = cfg.kind == ExperimentKind::Simulate ||
                            cfg.kind == ExperimentKind::Compare ||
                            cfg.kind == ExperimentKind::Couple ||
                            cfg.kind == ExperimentKind::Tails;
  if (needs_trials && cfg.trials < 2) {
    throw ConfigError("trials must be >= 2 for experiment \"" + kind + "\"");
  }
  if (cfg.kind != ExperimentKind::Theory && cfg.checkpoints.empty() &&
      cfg.kind != ExperimentKind::Tails) {
    throw ConfigError("horizon or checkpoints required");
  }
  if (cfg.kind == ExperimentKind::Tails && cfg.horizon < 1) {
    throw ConfigError("tails: horizon required");
  }
  cfg.config_hash = fnv1a_hex(text);
  return cfg;
}

int run_command(const ExperimentConfig& cfg, const std::string& out_dir, int threads) {
  std::filesystem::create_directories(out_dir);
  json summary;
  summary["config_hash"] = cfg.config_hash;
  if (cfg.master_seed) summary["master_seed"] = *cfg.master_seed;

  int code = 1;
  try {
    switch (cfg.kind) {
      case ExperimentKind::Theory:
        code = run_theory(cfg, summary);
        break;
      case ExperimentKind::Oracle:
        code = run_oracle(cfg, out_dir, summary);
        break;
      case ExperimentKind::Simulate:
        code = run_simulate(cfg, out_dir, summary, threads);
        break;
      case ExperimentKind::Compare:
        code = run_compare(cfg, out_dir, summary, threads);
        break;
      case ExperimentKind::Couple:
        code = run_couple(cfg, out_dir, summary, threads);
        break;
      case ExperimentKind::Td:
        code = run_td(cfg, out_dir, summary);
        break;
      case ExperimentKind::Tails:
        code = run_tails(cfg, out_dir, summary, threads);
        break;
    }
  } catch (const std::exception& e) {
    summary["error"] = e.what();
    code = 1;
  }
  summary["exit_code"] = code;
  std::ofstream out(out_dir + "/summary.json");
  out << summary.dump(2) << '\n';
  return code;
}

}  // namespace sacov
