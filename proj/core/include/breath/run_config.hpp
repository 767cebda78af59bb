#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "breath/autoencoder.hpp"
#include "breath/monitor.hpp"
#include "breath/rnn.hpp"

namespace breath {

inline constexpr const char* kSeedEnvVar = "BREATHSENTINEL_SEED";

// Flat key=value configuration. Lines starting with '#' and blank lines are
// ignored; unknown keys and out-of-range values raise Errc::config_error.
struct RunConfig {
  std::uint64_t seed = 1;

  std::size_t ae_epochs = 200;
  std::size_t ae_batch = 32;
  double ae_lr = 0.05;
  std::size_t ae_frames = 2400;

  std::size_t rnn_epochs = 300;
  double rnn_lr = 0.01;
  std::size_t rnn_hidden = kDefaultHidden;
  bool rnn_noise_aug = true;
  double rnn_clip_norm = 5.0;

  double confidence = 0.99;
  std::size_t run_length = 3;
  double refractory = 1.0;

  std::size_t interval_capacity = 20;
  double alpha = 0.05;
  double ci_level = 0.80;
  double floor_seconds = 0.5;

  double match_tolerance = 1.0;

  std::string corpus_path;
  std::string model_path;

  // Throws Errc::config_error for unknown keys or invalid values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  AETrainConfig ae_config() const;
  RNNTrainConfig rnn_config() const;
  MonitorConfig monitor_config() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

// Applies BREATHSENTINEL_SEED when set.
void apply_environment(RunConfig& config);

void write_config(std::ostream& out, const RunConfig& config);

}  // namespace breath
