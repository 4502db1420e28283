#pragma once

#include <string>
#include <vector>

#include "astgcn/augment.hpp"
#include "astgcn/dataset.hpp"
#include "astgcn/train.hpp"

namespace astgcn {

/// Everything one experiment needs: data paths, training hyperparameters,
/// augmentation switches, vocabulary orders, and per-command options.
/// Defaults follow the paper's protocol (learning rate 0.001, batch 64,
/// train ratio 0.8, 3000 epochs, 100 hidden units, one-hour input windows).
/// Values come from a flat `key = value` config file and/or CLI flags; flags
/// win.
struct ExperimentConfig {
  // data
  std::string adjacency;
  std::string speeds;
  std::string poi;
  std::string weather;
  std::string out_dir = "out";
  bool nodes_as_rows = true;
  int interval_minutes = 15;

  TrainConfig train;
  AugmentSpec augment;
  EncodingMode attr_encoding = EncodingMode::ordinal;
  std::vector<std::string> poi_vocab;      // defaults to the nine POI classes
  std::vector<std::string> weather_vocab;  // defaults to the five weather classes

  // eval
  std::vector<int> horizons_minutes = {15, 30, 45, 60};
  Index plot_node = 0;
  Index plot_begin = 0;   // offset into the test windows
  Index plot_steps = 288;  // 3 days at 15-minute resolution

  // perturb
  std::vector<double> gaussian_sigmas = {0.2, 0.4, 0.6, 0.8, 1.0, 2.0};
  std::vector<double> poisson_lambdas = {1, 2, 4, 8, 16};

  // sweep grids
  std::vector<int> epoch_grid = {500, 1000, 1500, 2000, 3000, 3500};
  std::vector<int> unit_grid = {8, 16, 32, 64, 100, 128};

  // synth
  Index synth_nodes = 20;
  Index synth_steps = 2000;
  double synth_effect = 10.0;

  ExperimentConfig();

  /// Typed assignment by key name. Errors: config_error (unknown key or
  /// unparsable value).
  void set(const std::string& key, const std::string& value);

  /// String form of a key's current value. Errors: config_error.
  std::string get(const std::string& key) const;

  static const std::vector<std::string>& keys();
};

/// Parses a flat config file: one `key = value` per line, `#` starts a
/// comment, blank lines ignored. Errors: io_error, config_error (with line
/// numbers).
void apply_config_file(ExperimentConfig& config, const std::string& path);

ExperimentConfig load_config_file(const std::string& path);

}  // namespace astgcn
