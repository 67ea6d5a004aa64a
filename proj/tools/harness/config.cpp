#include "harness/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace demix::harness {

void ExperimentConfig::validate() const {
  if (profile.empty()) throw ConfigError("profile", "must have at least one component");
  for (size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].rows < 1 || profile[i].cols < 1)
      throw ConfigError("profile[" + std::to_string(i) + "]", "dimensions must be >= 1");
  }
  if (sparsity.size() != profile.size())
    throw ConfigError("sparsity", "must match the number of components");
  for (size_t i = 0; i < sparsity.size(); ++i) {
    if (sparsity[i] < 0 || sparsity[i] > profile[i].cols)
      throw ConfigError("sparsity[" + std::to_string(i) + "]", "must be in [0, n_i]");
  }
  if (q_grid.empty()) throw ConfigError("q", "a q value or strictly increasing q_grid is required");
  for (size_t i = 0; i < q_grid.size(); ++i) {
    if (q_grid[i] < 1) throw ConfigError("q_grid[" + std::to_string(i) + "]", "must be >= 1");
    if (i > 0 && q_grid[i] <= q_grid[i - 1])
      throw ConfigError("q_grid", "must be strictly increasing");
  }
  if (frame_kind != "dft" && frame_kind != "random")
    throw ConfigError("frame", "must be \"dft\" or \"random\"");
  if (signal != "generic" && signal != "rank_one")
    throw ConfigError("signal", "must be \"generic\" or \"rank_one\"");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (sigma < 0) throw ConfigError("sigma", "must be >= 0");
  if (sigma_rel < 0) throw ConfigError("sigma_rel", "must be >= 0");
  if (!(success_threshold > 0)) throw ConfigError("success_threshold", "must be > 0");
  if (methods.empty()) throw ConfigError("methods", "must name at least one method");
  for (const auto& m : methods)
    if (m != "l12" && m != "l1" && m != "nuclear")
      throw ConfigError("methods", "unknown method \"" + m + "\"");
  if (moment_samples < 1) throw ConfigError("moment_samples", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  try {
    solver.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("solver", ex.what());
  }
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("profile"))
      for (const auto& b : j.at("profile"))
        c.profile.push_back({b.at(0).get<Index>(), b.at(1).get<Index>()});
    if (j.contains("sparsity")) c.sparsity = j.at("sparsity").get<std::vector<Index>>();
    if (j.contains("q")) c.q_grid.push_back(j.at("q").get<Index>());
    if (j.contains("q_grid")) {
      auto grid = j.at("q_grid").get<std::vector<Index>>();
      c.q_grid.insert(c.q_grid.end(), grid.begin(), grid.end());
    }
    if (j.contains("frame")) c.frame_kind = j.at("frame").get<std::string>();
    if (j.contains("convention"))
      c.convention = convention_from_name(j.at("convention").get<std::string>());
    if (j.contains("signal")) c.signal = j.at("signal").get<std::string>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("sigma_rel")) c.sigma_rel = j.at("sigma_rel").get<double>();
    if (j.contains("success_threshold"))
      c.success_threshold = j.at("success_threshold").get<double>();
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("max_iters")) c.solver.max_iters = s.at("max_iters").get<int>();
      if (s.contains("abs_tol")) c.solver.abs_tol = s.at("abs_tol").get<double>();
      if (s.contains("rel_tol")) c.solver.rel_tol = s.at("rel_tol").get<double>();
      if (s.contains("penalty")) c.solver.penalty = s.at("penalty").get<double>();
      if (s.contains("over_relaxation"))
        c.solver.over_relaxation = s.at("over_relaxation").get<double>();
    }
    if (j.contains("moment_samples")) c.moment_samples = j.at("moment_samples").get<long long>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const Json::exception& ex) {
    throw ConfigError("config", ex.what());
  }
  c.validate();
  return c;
}

}  // namespace demix::harness
