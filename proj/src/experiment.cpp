#include "astgcn/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "astgcn/csv.hpp"
#include "astgcn/error.hpp"
#include "astgcn/rng.hpp"
#include "astgcn/svg.hpp"
#include "astgcn/synthetic.hpp"

namespace astgcn {

namespace {

namespace fs = std::filesystem;

std::string under(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create directory: " + dir);
}

std::string metric_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : "undefined";
}

/// Horizon steps from the configured minute list, validated against the
/// sampling interval and the model horizon.
std::vector<Index> horizon_steps_from_minutes(const std::vector<int>& minutes,
                                              int interval_minutes,
                                              Index max_horizon) {
  std::vector<Index> steps;
  for (int m : minutes) {
    if (m <= 0 || m % interval_minutes != 0) {
      fail(ErrorCode::config_error,
           "horizon " + std::to_string(m) +
               " min is not a multiple of the sampling interval (" +
               std::to_string(interval_minutes) + " min)");
    }
    const Index step = m / interval_minutes;
    if (step > max_horizon) {
      fail(ErrorCode::config_error,
           "horizon " + std::to_string(m) + " min needs " +
               std::to_string(step) + " steps, model predicts " +
               std::to_string(max_horizon));
    }
    steps.push_back(step);
  }
  return steps;
}

std::vector<PredictionRow> dump_rows(const Matrix& stacked_predictions,
                                     std::span<const WindowedSample> windows,
                                     const SpeedSeries& series,
                                     Index horizon_step) {
  const Index nodes = series.nodes();
  std::vector<PredictionRow> rows;
  rows.reserve(windows.size() * static_cast<std::size_t>(nodes));
  for (Index w = 0; w < static_cast<Index>(windows.size()); ++w) {
    const Index t =
        windows[static_cast<std::size_t>(w)].target.begin + horizon_step - 1;
    for (Index i = 0; i < nodes; ++i) {
      rows.push_back({t, i, series.values(t, i),
                      stacked_predictions(w * nodes + i, horizon_step - 1) *
                          series.max_speed});
    }
  }
  return rows;
}

void write_prediction_dump(const std::string& path,
                           const std::vector<PredictionRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  out << "time,node,true,pred\n";
  for (const PredictionRow& row : rows) {
    out << row.time << ',' << row.node << ',' << format_double(row.truth)
        << ',' << format_double(row.predicted) << '\n';
  }
}

}  // namespace

std::string spec_label(const AugmentSpec& spec) {
  if (spec.use_static && spec.use_dynamic) return "weather+poi";
  if (spec.use_static) return "poi";
  if (spec.use_dynamic) return "weather";
  return "tgcn";
}

LoadedData load_experiment_data(const ExperimentConfig& config) {
  if (config.adjacency.empty() || config.speeds.empty()) {
    fail(ErrorCode::config_error,
         "adjacency and speeds paths are required");
  }
  LoadedData data;
  data.graph = load_adjacency_csv(config.adjacency);
  data.series = load_speed_csv(config.speeds, config.interval_minutes,
                               config.nodes_as_rows);
  const Index n = data.graph.nodes();
  if (data.series.nodes() != n) {
    fail(ErrorCode::node_count_mismatch,
         "speed series has " + std::to_string(data.series.nodes()) +
             " nodes, adjacency has " + std::to_string(n));
  }
  data.attrs.static_encoding = {config.attr_encoding, config.poi_vocab};
  data.attrs.dynamic_encoding = {config.attr_encoding, config.weather_vocab};
  if (!config.poi.empty()) {
    data.attrs.static_attrs =
        load_static_attrs(config.poi, data.attrs.static_encoding, n);
  } else {
    data.attrs.static_attrs = Matrix::Zero(n, 0);
  }
  if (!config.weather.empty()) {
    data.attrs.dynamic_attrs = load_dynamic_attrs(
        config.weather, data.attrs.dynamic_encoding, n, data.series.steps());
  }
  return data;
}

void write_report_csv(const std::string& path,
                      const std::vector<MetricReport>& reports) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  out << "setting,horizon_min,rmse,mae,accuracy,r2,var\n";
  for (const MetricReport& r : reports) {
    out << r.setting_label << ',' << r.horizon_minutes << ','
        << format_double(r.rmse) << ',' << format_double(r.mae) << ','
        << metric_cell(r.accuracy) << ',' << metric_cell(r.r2) << ','
        << metric_cell(r.var) << '\n';
  }
  if (!out) fail(ErrorCode::io_error, "write failed: " + path);
}

void write_loss_history_csv(const std::string& path,
                            const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << (e + 1) << ',' << format_double(losses[e]) << '\n';
  }
}

SynthOutputs run_synth(const ExperimentConfig& config) {
  ensure_out_dir(config.out_dir);
  SyntheticOptions options;
  options.nodes = config.synth_nodes;
  options.steps = config.synth_steps;
  options.seed = config.train.seed;
  options.effect_size = config.synth_effect;
  options.interval_minutes = config.interval_minutes;
  options.encoding = config.attr_encoding;
  const SyntheticData data = generate_synthetic(options);

  SynthOutputs outputs;
  outputs.adjacency = under(config.out_dir, "adjacency.csv");
  outputs.speeds = under(config.out_dir, "speeds.csv");
  outputs.poi = under(config.out_dir, "poi.csv");
  outputs.weather = under(config.out_dir, "weather.csv");
  write_adjacency_csv(outputs.adjacency, data.graph.adjacency);
  write_speed_csv(outputs.speeds, data.series, config.nodes_as_rows);
  write_static_attrs_csv(outputs.poi, data.node_poi);
  write_dynamic_attrs_csv(outputs.weather, data.step_weather);
  return outputs;
}

TrainOutputs run_train(const ExperimentConfig& config) {
  ensure_out_dir(config.out_dir);
  LoadedData data = load_experiment_data(config);
  if (config.augment.use_static && data.attrs.static_width() == 0) {
    fail(ErrorCode::config_error,
         "static attributes enabled but no poi file given");
  }
  if (config.augment.use_dynamic && data.attrs.dynamic_width() == 0) {
    fail(ErrorCode::config_error,
         "dynamic attributes enabled but no weather file given");
  }
  const SplitRanges split =
      chronological_split(data.series, config.train.train_ratio,
                          config.train.seq_len, config.train.horizon);

  TrainOutputs outputs;
  outputs.checkpoint_path = under(config.out_dir, "checkpoint.json");
  outputs.loss_csv_path = under(config.out_dir, "loss_history.csv");

  const auto sink = [&](int epoch, const ModelParameters& params) {
    Checkpoint checkpoint;
    checkpoint.params = params;
    checkpoint.spec = config.augment;
    checkpoint.static_encoding = data.attrs.static_encoding;
    checkpoint.dynamic_encoding = data.attrs.dynamic_encoding;
    checkpoint.max_speed = data.series.max_speed;
    checkpoint.interval_minutes = data.series.interval_minutes;
    checkpoint.seq_len = config.train.seq_len;
    checkpoint.seed = config.train.seed;
    std::string path = outputs.checkpoint_path;
    if (epoch == 0) {
      path = under(config.out_dir, "checkpoint_last_good.json");
    } else if (epoch != config.train.epochs) {
      path = under(config.out_dir,
                   "checkpoint_epoch" + std::to_string(epoch) + ".json");
    }
    save_checkpoint(path, checkpoint);
  };

  const TrainResult result =
      train(config.train, data.graph, data.series, data.attrs, config.augment,
            split, sink);
  write_loss_history_csv(outputs.loss_csv_path, result.loss_history);
  outputs.final_loss =
      result.loss_history.empty() ? 0.0 : result.loss_history.back();
  return outputs;
}

EvalOutputs run_eval(const ExperimentConfig& config,
                     const std::string& checkpoint_path) {
  ensure_out_dir(config.out_dir);
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);

  ExperimentConfig data_config = config;
  data_config.attr_encoding = checkpoint.static_encoding.mode;
  data_config.poi_vocab = checkpoint.static_encoding.vocabulary;
  data_config.weather_vocab = checkpoint.dynamic_encoding.vocabulary;
  data_config.interval_minutes = checkpoint.interval_minutes;
  LoadedData data = load_experiment_data(data_config);
  if (data.graph.nodes() != checkpoint.params.dims.nodes) {
    fail(ErrorCode::node_count_mismatch,
         "checkpoint was trained on " +
             std::to_string(checkpoint.params.dims.nodes) +
             " nodes, data has " + std::to_string(data.graph.nodes()));
  }

  SplitRanges split =
      chronological_split(data.series, config.train.train_ratio,
                          checkpoint.seq_len, checkpoint.params.dims.horizon);
  // Normalization travels with the checkpoint, not the evaluation data.
  data.series.max_speed = checkpoint.max_speed;

  const auto steps = horizon_steps_from_minutes(
      config.horizons_minutes, data.series.interval_minutes,
      checkpoint.params.dims.horizon);

  const auto windows =
      make_windows(split.test, checkpoint.seq_len, checkpoint.params.dims.horizon);
  const auto augmented = augment_series(data.series.normalized(), data.attrs,
                                        checkpoint.spec);
  const Matrix predictions =
      predict_windows(checkpoint.params, data.graph, augmented, windows,
                      data.series.nodes());

  EvalOutputs outputs;
  for (Index step : steps) {
    MetricReport report =
        evaluate_horizon_step(predictions, windows, data.series, step);
    report.setting_label = spec_label(checkpoint.spec);
    outputs.reports.push_back(std::move(report));
  }
  outputs.report_csv = under(config.out_dir, "report.csv");
  write_report_csv(outputs.report_csv, outputs.reports);

  // Dump and chart use the first requested horizon; the chart is derived
  // from the same rows the CSV gets.
  const auto rows = dump_rows(predictions, windows, data.series, steps.front());
  outputs.predictions_csv = under(config.out_dir, "predictions.csv");
  write_prediction_dump(outputs.predictions_csv, rows);

  if (config.plot_node >= data.series.nodes()) {
    fail(ErrorCode::index_out_of_range,
         "plot_node " + std::to_string(config.plot_node) +
             " outside 0.." + std::to_string(data.series.nodes() - 1));
  }
  std::vector<double> x;
  ChartSeries truth{"true speed", "#1f77b4", {}};
  ChartSeries predicted{"predicted", "#d62728", {}};
  for (const PredictionRow& row : rows) {
    if (row.node != config.plot_node) continue;
    x.push_back(static_cast<double>(row.time));
    truth.values.push_back(row.truth);
    predicted.values.push_back(row.predicted);
  }
  const std::size_t begin = std::min(static_cast<std::size_t>(config.plot_begin),
                                     x.empty() ? 0 : x.size() - 1);
  const std::size_t end =
      std::min(x.size(), begin + static_cast<std::size_t>(config.plot_steps));
  x = std::vector<double>(x.begin() + static_cast<long>(begin),
                          x.begin() + static_cast<long>(end));
  truth.values = std::vector<double>(
      truth.values.begin() + static_cast<long>(begin),
      truth.values.begin() + static_cast<long>(end));
  predicted.values = std::vector<double>(
      predicted.values.begin() + static_cast<long>(begin),
      predicted.values.begin() + static_cast<long>(end));

  outputs.chart_svg = under(config.out_dir, "chart.svg");
  write_line_chart_svg(
      outputs.chart_svg,
      "node " + std::to_string(config.plot_node) + ", " +
          std::to_string(steps.front() * data.series.interval_minutes) +
          " min horizon",
      "time step", x, {truth, predicted});
  return outputs;
}

AblateOutputs run_ablate(const ExperimentConfig& config) {
  ensure_out_dir(config.out_dir);
  LoadedData data = load_experiment_data(config);
  if (data.attrs.static_width() == 0 || data.attrs.dynamic_width() == 0) {
    fail(ErrorCode::config_error,
         "ablation needs both poi and weather files");
  }
  SplitRanges split =
      chronological_split(data.series, config.train.train_ratio,
                          config.train.seq_len, config.train.horizon);
  const auto steps = horizon_steps_from_minutes(config.horizons_minutes,
                                                data.series.interval_minutes,
                                                config.train.horizon);
  const auto results =
      run_ablation(config.train, data.graph, data.series, data.attrs,
                   config.augment, split, steps);

  AblateOutputs outputs;
  for (const AblationResult& result : results) {
    write_loss_history_csv(
        under(config.out_dir, "loss_" + result.setting.label + ".csv"),
        result.train.loss_history);
    Checkpoint checkpoint;
    checkpoint.params = result.train.params;
    checkpoint.spec = result.setting.spec;
    checkpoint.static_encoding = data.attrs.static_encoding;
    checkpoint.dynamic_encoding = data.attrs.dynamic_encoding;
    checkpoint.max_speed = data.series.max_speed;
    checkpoint.interval_minutes = data.series.interval_minutes;
    checkpoint.seq_len = config.train.seq_len;
    checkpoint.seed = config.train.seed;
    save_checkpoint(under(config.out_dir,
                          "checkpoint_" + result.setting.label + ".json"),
                    checkpoint);
    outputs.reports.insert(outputs.reports.end(), result.reports.begin(),
                           result.reports.end());
  }
  outputs.report_csv = under(config.out_dir, "ablation_report.csv");
  write_report_csv(outputs.report_csv, outputs.reports);
  return outputs;
}

PerturbOutputs run_perturb(const ExperimentConfig& config,
                           const std::string& checkpoint_path) {
  ensure_out_dir(config.out_dir);
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);

  ExperimentConfig data_config = config;
  data_config.attr_encoding = checkpoint.static_encoding.mode;
  data_config.poi_vocab = checkpoint.static_encoding.vocabulary;
  data_config.weather_vocab = checkpoint.dynamic_encoding.vocabulary;
  data_config.interval_minutes = checkpoint.interval_minutes;
  LoadedData data = load_experiment_data(data_config);

  SplitRanges split =
      chronological_split(data.series, config.train.train_ratio,
                          checkpoint.seq_len, checkpoint.params.dims.horizon);
  data.series.max_speed = checkpoint.max_speed;
  const Matrix normalized = data.series.normalized();
  const std::vector<Index> steps = {horizon_steps_from_minutes(
      config.horizons_minutes, data.series.interval_minutes,
      checkpoint.params.dims.horizon).front()};

  PerturbOutputs outputs;
  const auto score = [&](const Matrix& inputs, const std::string& label) {
    auto reports = evaluate_horizons_with_inputs(
        checkpoint.params, data.graph, inputs, data.series, data.attrs,
        checkpoint.spec, split.test, checkpoint.seq_len, steps);
    for (MetricReport& report : reports) {
      report.setting_label = label;
      outputs.reports.push_back(std::move(report));
    }
  };

  score(normalized, "clean");
  std::uint64_t grid_index = 0;
  for (double sigma : config.gaussian_sigmas) {
    score(perturb_inputs(normalized, split.test, NoiseKind::gaussian, sigma,
                         derive_seed(config.train.seed, 0xF0 + grid_index),
                         data.series.max_speed),
          "gaussian(" + format_double(sigma) + ")");
    ++grid_index;
  }
  for (double lambda : config.poisson_lambdas) {
    score(perturb_inputs(normalized, split.test, NoiseKind::poisson, lambda,
                         derive_seed(config.train.seed, 0xF0 + grid_index),
                         data.series.max_speed),
          "poisson(" + format_double(lambda) + ")");
    ++grid_index;
  }
  outputs.report_csv = under(config.out_dir, "perturbation_report.csv");
  write_report_csv(outputs.report_csv, outputs.reports);
  return outputs;
}

SweepOutputs run_sweep(const ExperimentConfig& config,
                       const std::string& grid_kind) {
  ensure_out_dir(config.out_dir);
  if (grid_kind != "epochs" && grid_kind != "units") {
    fail(ErrorCode::config_error,
         "sweep grid must be 'epochs' or 'units', got '" + grid_kind + "'");
  }
  LoadedData data = load_experiment_data(config);
  SplitRanges split =
      chronological_split(data.series, config.train.train_ratio,
                          config.train.seq_len, config.train.horizon);
  std::vector<int> grid =
      grid_kind == "epochs" ? config.epoch_grid : config.unit_grid;
  std::sort(grid.begin(), grid.end());

  const std::vector<Index> steps = {horizon_steps_from_minutes(
      config.horizons_minutes, data.series.interval_minutes,
      config.train.horizon).front()};

  SweepOutputs outputs;
  for (int value : grid) {
    TrainConfig point = config.train;
    if (grid_kind == "epochs") {
      point.epochs = value;
    } else {
      point.hidden_units = value;
    }
    const TrainResult result = train(point, data.graph, data.series,
                                     data.attrs, config.augment, split);
    auto reports = evaluate_horizons(result.params, data.graph, data.series,
                                     data.attrs, config.augment, split.test,
                                     point.seq_len, steps);
    for (MetricReport& report : reports) {
      report.setting_label =
          (grid_kind == "epochs" ? "epochs=" : "units=") +
          std::to_string(value);
      outputs.reports.push_back(std::move(report));
    }
  }
  outputs.report_csv = under(config.out_dir, "sweep_" + grid_kind + ".csv");
  write_report_csv(outputs.report_csv, outputs.reports);
  return outputs;
}

}  // namespace astgcn
