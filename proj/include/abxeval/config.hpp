#pragma once

#include "abxeval/corpus.hpp"
#include "abxeval/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace abxeval {

// Feature archives for one model. Either `all` (a single archive covering
// both languages, for models without language-specific training) or one or
// both of `fr`/`en`.
struct ModelFeatures {
  std::string model_id;
  std::optional<std::filesystem::path> fr, en, all;

  bool shared() const { return all.has_value(); }
};

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path responses;  // may be empty for eval-only runs
  std::filesystem::path out = "out";
  std::vector<ModelFeatures> models;  // sorted by model_id
  MetricKind metric = MetricKind::angular;
  double epsilon = 1e-10;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = all cores
  int n_resamples = 1000;
  double ci_level = 0.95;
  std::optional<std::filesystem::path> subset;  // one triplet_id per line
  ExpectedCounts expected;
  std::optional<long> expected_bootstrap_n;  // surfaced, never asserted
  bool warn_ab_speaker = true;

  const ModelFeatures* find_model(const std::string& id) const;
};

// Key-value config file: `key = value`, '#' comments, unknown keys rejected.
// Relative paths are resolved against the config file's directory. Path
// existence is checked here so a bad run fails before any work starts.
RunConfig load_config(const std::filesystem::path& path);

// Post-override validation used by the CLI after flags are applied.
void check_config(const RunConfig& config, bool need_responses);

}  // namespace abxeval
