#pragma once

#include <string>
#include <vector>

#include "astgcn/checkpoint.hpp"
#include "astgcn/config.hpp"
#include "astgcn/eval.hpp"

namespace astgcn {

/// Graph, speeds, and whatever attribute files the config names, with the
/// node counts cross-checked.
struct LoadedData {
  RoadGraph graph;
  SpeedSeries series;
  AttributeBundle attrs;
};
LoadedData load_experiment_data(const ExperimentConfig& config);

/// Label describing an augmentation setting, matching the ablation table:
/// tgcn | poi | weather | weather+poi.
std::string spec_label(const AugmentSpec& spec);

/// Report CSV, one row per metric set:
/// setting,horizon_min,rmse,mae,accuracy,r2,var (undefined metrics print as
/// "undefined").
void write_report_csv(const std::string& path,
                      const std::vector<MetricReport>& reports);

void write_loss_history_csv(const std::string& path,
                            const std::vector<double>& losses);

/// Writes synthetic adjacency/speeds/poi/weather files (the standard
/// formats) under out_dir.
struct SynthOutputs {
  std::string adjacency, speeds, poi, weather;
};
SynthOutputs run_synth(const ExperimentConfig& config);

struct TrainOutputs {
  std::string checkpoint_path;
  std::string loss_csv_path;
  double final_loss = 0.0;
};
TrainOutputs run_train(const ExperimentConfig& config);

/// One row of the prediction dump (time,node,true,pred).
struct PredictionRow {
  Index time;
  Index node;
  double truth;
  double predicted;
};

struct EvalOutputs {
  std::string report_csv;
  std::string predictions_csv;
  std::string chart_svg;
  std::vector<MetricReport> reports;
};
EvalOutputs run_eval(const ExperimentConfig& config,
                     const std::string& checkpoint_path);

struct AblateOutputs {
  std::string report_csv;
  std::vector<MetricReport> reports;
};
AblateOutputs run_ablate(const ExperimentConfig& config);

struct PerturbOutputs {
  std::string report_csv;
  std::vector<MetricReport> reports;
};
PerturbOutputs run_perturb(const ExperimentConfig& config,
                           const std::string& checkpoint_path);

struct SweepOutputs {
  std::string report_csv;
  std::vector<MetricReport> reports;
};
/// grid_kind is "epochs" or "units"; rows are sorted by grid value.
SweepOutputs run_sweep(const ExperimentConfig& config,
                       const std::string& grid_kind);

}  // namespace astgcn
