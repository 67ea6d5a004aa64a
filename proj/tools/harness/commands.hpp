#pragma once

#include "harness/config.hpp"
#include "harness/runner.hpp"

#include <string>

namespace demix::harness {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitIo = 4;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;          // overrides config "out" when set
  std::uint64_t seed = 0;       // overrides config "seed" when set
  bool seed_set = false;
  int threads = 0;              // overrides config "threads" when > 0
};

ExperimentConfig load_config(const GlobalArgs& args);

int cmd_gen(const GlobalArgs& args);
int cmd_solve(const GlobalArgs& args, const std::string& instance_path, const std::string& method,
              double sigma, bool sigma_set, const SolveOptions& opts, bool opts_set);
int cmd_certify(const GlobalArgs& args, const std::string& instance_path);
int cmd_phase(const GlobalArgs& args);
int cmd_moments(const GlobalArgs& args);
int cmd_deconv_demo(const GlobalArgs& args);

}  // namespace demix::harness
