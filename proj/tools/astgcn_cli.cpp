// Command-line front end for the AST-GCN library. Talks to the core purely
// through the C API in astgcn/astgcn.h, the same surface other language
// bindings would use.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "astgcn/astgcn.h"

namespace {

struct ConfigHandle {
  astgcn_config* ptr = astgcn_config_create();
  ~ConfigHandle() { astgcn_config_free(ptr); }
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

int exit_code_for(astgcn_status status) {
  switch (status) {
    case ASTGCN_OK:
      return 0;
    case ASTGCN_E_IO:
    case ASTGCN_E_EMPTY_FILE:
      return 2;  // missing or unreadable files
    default:
      return 1;
  }
}

int check(astgcn_status status) {
  if (status != ASTGCN_OK) {
    std::fprintf(stderr, "error: %s\n", astgcn_last_error());
  }
  return exit_code_for(status);
}

std::string config_value(const astgcn_config* config, const char* key) {
  char buffer[4096];
  if (astgcn_config_get(config, key, buffer, sizeof buffer, nullptr) !=
      ASTGCN_OK) {
    return "";
  }
  return buffer;
}

/// Flag values collected from the command line, applied on top of the config
/// file so flags always win.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    cmd->add_option_function<std::string>(
           flag,
           [this, key](const std::string& v) { values.emplace_back(key, v); },
           help)
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  astgcn_status apply(astgcn_config* config) const {
    for (const auto& [key, value] : values) {
      const astgcn_status status =
          astgcn_config_set(config, key.c_str(), value.c_str());
      if (status != ASTGCN_OK) return status;
    }
    return ASTGCN_OK;
  }
};

void add_common_flags(CLI::App* cmd, std::string& config_path,
                      Overrides& overrides) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  overrides.add(cmd, "--seed", "seed", "random seed (all randomness)");
  overrides.add(cmd, "--out-dir", "out_dir", "output directory");
  overrides.add(cmd, "--adjacency", "adjacency", "adjacency CSV path");
  overrides.add(cmd, "--speeds", "speeds", "speed matrix CSV path");
  overrides.add(cmd, "--poi", "poi", "static attribute CSV path");
  overrides.add(cmd, "--weather", "weather", "dynamic attribute CSV path");
}

void add_train_flags(CLI::App* cmd, Overrides& overrides) {
  overrides.add(cmd, "--static", "use_static", "static attributes on|off");
  overrides.add(cmd, "--dynamic", "use_dynamic", "dynamic attributes on|off");
  overrides.add(cmd, "--window-m", "window_m", "trailing dynamic steps");
  overrides.add(cmd, "--epochs", "epochs", "training epochs");
  overrides.add(cmd, "--hidden-units", "hidden_units", "GRU hidden units");
  overrides.add(cmd, "--learning-rate", "learning_rate", "Adam learning rate");
  overrides.add(cmd, "--batch-size", "batch_size", "windows per mini-batch");
  overrides.add(cmd, "--train-ratio", "train_ratio", "train split fraction");
  overrides.add(cmd, "--seq-len", "seq_len", "input window length");
  overrides.add(cmd, "--horizon", "horizon", "prediction steps (T_out)");
  overrides.add(cmd, "--lambda", "lambda_reg", "L2 regularization weight");
}

int prepare(ConfigHandle& handle, const std::string& config_path,
            const Overrides& overrides) {
  if (!config_path.empty()) {
    const astgcn_status status =
        astgcn_config_load_file(handle.ptr, config_path.c_str());
    if (status != ASTGCN_OK) return check(status);
  }
  return check(overrides.apply(handle.ptr));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AST-GCN traffic forecasting experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string grid_kind = "epochs";
  Overrides overrides;

  CLI::App* synth = app.add_subcommand(
      "synth", "generate a synthetic dataset with planted attribute effects");
  add_common_flags(synth, config_path, overrides);
  overrides.add(synth, "--nodes", "synth_nodes", "number of road segments");
  overrides.add(synth, "--steps", "synth_steps", "number of time steps");
  overrides.add(synth, "--effect", "synth_effect",
                "planted attribute effect size");

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_common_flags(train, config_path, overrides);
  add_train_flags(train, overrides);

  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate a checkpoint over prediction horizons");
  add_common_flags(eval, config_path, overrides);
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint to evaluate")
      ->required();
  overrides.add(eval, "--horizons", "horizons",
                "comma-separated horizons in minutes");
  overrides.add(eval, "--plot-node", "plot_node", "node for the SVG chart");
  overrides.add(eval, "--plot-begin", "plot_begin",
                "first charted test window");
  overrides.add(eval, "--plot-steps", "plot_steps", "charted window count");

  CLI::App* ablate = app.add_subcommand(
      "ablate", "train and score the four attribute settings");
  add_common_flags(ablate, config_path, overrides);
  add_train_flags(ablate, overrides);
  overrides.add(ablate, "--horizons", "horizons",
                "comma-separated horizons in minutes");

  CLI::App* perturb = app.add_subcommand(
      "perturb", "score a checkpoint under Gaussian/Poisson input noise");
  add_common_flags(perturb, config_path, overrides);
  perturb->add_option("--checkpoint", checkpoint_path, "checkpoint to test")
      ->required();
  overrides.add(perturb, "--sigmas", "gaussian_sigmas",
                "Gaussian noise levels");
  overrides.add(perturb, "--lambdas", "poisson_lambdas",
                "Poisson noise levels");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "train across an epoch or hidden-unit grid");
  add_common_flags(sweep, config_path, overrides);
  add_train_flags(sweep, overrides);
  sweep->add_option("--grid", grid_kind, "grid kind: epochs or units");
  overrides.add(sweep, "--values", "epoch_grid",
                "epoch grid values (with --grid epochs)");
  overrides.add(sweep, "--unit-values", "unit_grid",
                "unit grid values (with --grid units)");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle handle;
  if (const int code = prepare(handle, config_path, overrides); code != 0) {
    return code;
  }
  const std::string out_dir = config_value(handle.ptr, "out_dir");

  if (synth->parsed()) {
    const int code = check(astgcn_run_synth(handle.ptr));
    if (code == 0) {
      std::printf("wrote adjacency.csv, speeds.csv, poi.csv, weather.csv under %s\n",
                  out_dir.c_str());
    }
    return code;
  }
  if (train->parsed()) {
    double final_loss = 0.0;
    const int code = check(astgcn_run_train(handle.ptr, &final_loss));
    if (code == 0) {
      std::printf("final epoch loss: %.10g\n", final_loss);
      std::printf("wrote %s/checkpoint.json and %s/loss_history.csv\n",
                  out_dir.c_str(), out_dir.c_str());
    }
    return code;
  }
  if (eval->parsed()) {
    const int code =
        check(astgcn_run_eval(handle.ptr, checkpoint_path.c_str()));
    if (code == 0) {
      std::printf("wrote %s/report.csv, %s/predictions.csv, %s/chart.svg\n",
                  out_dir.c_str(), out_dir.c_str(), out_dir.c_str());
    }
    return code;
  }
  if (ablate->parsed()) {
    const int code = check(astgcn_run_ablate(handle.ptr));
    if (code == 0) {
      std::printf("wrote %s/ablation_report.csv\n", out_dir.c_str());
    }
    return code;
  }
  if (perturb->parsed()) {
    const int code =
        check(astgcn_run_perturb(handle.ptr, checkpoint_path.c_str()));
    if (code == 0) {
      std::printf("wrote %s/perturbation_report.csv\n", out_dir.c_str());
    }
    return code;
  }
  if (sweep->parsed()) {
    const int code = check(astgcn_run_sweep(handle.ptr, grid_kind.c_str()));
    if (code == 0) {
      std::printf("wrote %s/sweep_%s.csv\n", out_dir.c_str(),
                  grid_kind.c_str());
    }
    return code;
  }
  return 1;
}
