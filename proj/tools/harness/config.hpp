#pragma once

#include "demix/ensemble.hpp"
#include "demix/io.hpp"
#include "demix/solvers.hpp"
#include "demix/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace demix::harness {

/// Config validation failure; what() carries the offending field path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what) {}
};

struct ExperimentConfig {
  Profile profile;
  std::vector<Index> sparsity;
  std::vector<Index> q_grid;  // single-q runs use a one-element grid
  std::string frame_kind = "dft";
  Convention convention = Convention::ComplexCircular;
  std::string signal = "generic";  // or "rank_one"
  int trials = 1;
  std::uint64_t seed = 0;
  double sigma = 0.0;      // absolute noise budget
  double sigma_rel = 0.0;  // relative to |A z0|, used when sigma == 0
  double success_threshold = 1e-4;
  std::vector<std::string> methods{"l12"};
  SolveOptions solver;
  long long moment_samples = 1000000;
  std::string out_dir = "out";
  int threads = 1;

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const Json& j);

}  // namespace demix::harness
