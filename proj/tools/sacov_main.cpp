#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sacov/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Covariance laboratory for linear stochastic approximation with "
               "Markovian noise"};
  std::string config_path;
  std::string out_dir = "./out";
  int threads = 0;
  long seed_override = -1;
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out-dir", out_dir, "Output directory for summary.json/CSV");
  app.add_option("--threads", threads,
                 "Worker threads (default: hardware); never changes any output bit");
  app.add_option("--seed", seed_override, "Override the config's master_seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config: " << config_path << "\n";
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    sacov::ExperimentConfig cfg = sacov::parse_config(buf.str());
    if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
    int code = sacov::run_command(cfg, out_dir, threads);
    std::cout << "summary: " << out_dir << "/summary.json (exit " << code << ")\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
