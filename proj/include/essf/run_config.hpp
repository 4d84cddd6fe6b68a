#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "essf/particle_system.hpp"
#include "essf/zspace.hpp"

namespace essf {

// Experiment configuration, loaded from a JSON document. Characteristics are
// given either literally ("characteristics") or through a named preset
// ("preset"). The seed is mandatory (there is no wall-clock default).
struct RunConfig {
  Characteristics characteristics;
  uint32_t level = 1;
  double horizon = 1.0;
  std::vector<double> query_times;
  double alpha = 0.0;
  uint64_t replicates = 1;
  std::optional<uint64_t> seed;
  double h_grid = 1e-3;
  std::vector<double> thetas;
  std::string out_dir = "out";
  bool dump_partitions = false;  // also write snapshots in the text format

  // diagnose
  std::vector<double> diag_thetas;
  std::vector<uint32_t> diag_levels;

  // test
  std::vector<std::string> test_names;
  uint64_t test_replicates = 10000;
  uint32_t test_level = 2;
  uint32_t test_level_m = 4;
  double test_time = 1.0;
  double test_theta = 0.0;
  std::vector<double> test_times;
  StatisticMode test_mode = StatisticMode::level_n;
  std::optional<double> test_rate_override;  // corrupted-exponent negative control

  unsigned jobs_hint = 1;   // replicate parallelism requested on the command line
  std::string config_hash;  // FNV-1a 64 over the canonicalized document
};

RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::string& path);

uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t v);

}  // namespace essf
