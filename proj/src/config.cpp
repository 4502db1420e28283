#include "astgcn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "astgcn/csv.hpp"
#include "astgcn/error.hpp"
#include "astgcn/synthetic.hpp"

namespace astgcn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorCode::config_error,
       "bad value '" + value + "' for config key '" + key + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto result = std::from_chars(v.data(), v.data() + v.size(), out);
  if (result.ec != std::errc() || result.ptr != v.data() + v.size()) {
    bad_value(key, value);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value);
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> items;
  for (const std::string& cell : split_csv_line(value)) {
    if (!cell.empty()) items.push_back(cell);
  }
  return items;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key,
                                 const std::string& value) {
  std::vector<T> out;
  for (const std::string& item : parse_list(value)) {
    out.push_back(parse_number<T>(key, item));
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_same_v<T, double>) {
      out << format_double(values[i]);
    } else {
      out << values[i];
    }
  }
  return out.str();
}

}  // namespace

ExperimentConfig::ExperimentConfig()
    : poi_vocab(default_poi_vocabulary()),
      weather_vocab(default_weather_vocabulary()) {}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = {
      "adjacency",      "speeds",          "poi",
      "weather",        "out_dir",         "nodes_as_rows",
      "interval_minutes", "learning_rate", "batch_size",
      "train_ratio",    "epochs",          "hidden_units",
      "gc_units",       "gc_layers",       "lambda_reg",
      "seed",           "seq_len",         "horizon",
      "checkpoint_every", "use_static",    "use_dynamic",
      "window_m",       "attr_encoding",   "poi_vocab",
      "weather_vocab",  "horizons",        "plot_node",
      "plot_begin",     "plot_steps",      "gaussian_sigmas",
      "poisson_lambdas", "epoch_grid",     "unit_grid",
      "synth_nodes",    "synth_steps",     "synth_effect",
  };
  return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "adjacency") adjacency = trim(value);
  else if (key == "speeds") speeds = trim(value);
  else if (key == "poi") poi = trim(value);
  else if (key == "weather") weather = trim(value);
  else if (key == "out_dir") out_dir = trim(value);
  else if (key == "nodes_as_rows") nodes_as_rows = parse_bool(key, value);
  else if (key == "interval_minutes") interval_minutes = parse_number<int>(key, value);
  else if (key == "learning_rate") train.learning_rate = parse_number<double>(key, value);
  else if (key == "batch_size") train.batch_size = parse_number<Index>(key, value);
  else if (key == "train_ratio") train.train_ratio = parse_number<double>(key, value);
  else if (key == "epochs") train.epochs = parse_number<int>(key, value);
  else if (key == "hidden_units") train.hidden_units = parse_number<Index>(key, value);
  else if (key == "gc_units") train.gc_units = parse_number<Index>(key, value);
  else if (key == "gc_layers") train.gc_layers = parse_number<int>(key, value);
  else if (key == "lambda_reg") train.lambda_reg = parse_number<double>(key, value);
  else if (key == "seed") train.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "seq_len") train.seq_len = parse_number<Index>(key, value);
  else if (key == "horizon") train.horizon = parse_number<Index>(key, value);
  else if (key == "checkpoint_every") train.checkpoint_every = parse_number<int>(key, value);
  else if (key == "use_static") augment.use_static = parse_bool(key, value);
  else if (key == "use_dynamic") augment.use_dynamic = parse_bool(key, value);
  else if (key == "window_m") augment.window_m = parse_number<int>(key, value);
  else if (key == "attr_encoding") {
    const std::string v = trim(value);
    if (v == "ordinal") attr_encoding = EncodingMode::ordinal;
    else if (v == "one-hot") attr_encoding = EncodingMode::one_hot;
    else bad_value(key, value);
  }
  else if (key == "poi_vocab") poi_vocab = parse_list(value);
  else if (key == "weather_vocab") weather_vocab = parse_list(value);
  else if (key == "horizons") horizons_minutes = parse_number_list<int>(key, value);
  else if (key == "plot_node") plot_node = parse_number<Index>(key, value);
  else if (key == "plot_begin") plot_begin = parse_number<Index>(key, value);
  else if (key == "plot_steps") plot_steps = parse_number<Index>(key, value);
  else if (key == "gaussian_sigmas") gaussian_sigmas = parse_number_list<double>(key, value);
  else if (key == "poisson_lambdas") poisson_lambdas = parse_number_list<double>(key, value);
  else if (key == "epoch_grid") epoch_grid = parse_number_list<int>(key, value);
  else if (key == "unit_grid") unit_grid = parse_number_list<int>(key, value);
  else if (key == "synth_nodes") synth_nodes = parse_number<Index>(key, value);
  else if (key == "synth_steps") synth_steps = parse_number<Index>(key, value);
  else if (key == "synth_effect") synth_effect = parse_number<double>(key, value);
  else fail(ErrorCode::config_error, "unknown config key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  if (key == "adjacency") return adjacency;
  if (key == "speeds") return speeds;
  if (key == "poi") return poi;
  if (key == "weather") return weather;
  if (key == "out_dir") return out_dir;
  if (key == "nodes_as_rows") return nodes_as_rows ? "on" : "off";
  if (key == "interval_minutes") return std::to_string(interval_minutes);
  if (key == "learning_rate") return format_double(train.learning_rate);
  if (key == "batch_size") return std::to_string(train.batch_size);
  if (key == "train_ratio") return format_double(train.train_ratio);
  if (key == "epochs") return std::to_string(train.epochs);
  if (key == "hidden_units") return std::to_string(train.hidden_units);
  if (key == "gc_units") return std::to_string(train.gc_units);
  if (key == "gc_layers") return std::to_string(train.gc_layers);
  if (key == "lambda_reg") return format_double(train.lambda_reg);
  if (key == "seed") return std::to_string(train.seed);
  if (key == "seq_len") return std::to_string(train.seq_len);
  if (key == "horizon") return std::to_string(train.horizon);
  if (key == "checkpoint_every") return std::to_string(train.checkpoint_every);
  if (key == "use_static") return augment.use_static ? "on" : "off";
  if (key == "use_dynamic") return augment.use_dynamic ? "on" : "off";
  if (key == "window_m") return std::to_string(augment.window_m);
  if (key == "attr_encoding")
    return attr_encoding == EncodingMode::ordinal ? "ordinal" : "one-hot";
  if (key == "poi_vocab") return join(poi_vocab);
  if (key == "weather_vocab") return join(weather_vocab);
  if (key == "horizons") return join(horizons_minutes);
  if (key == "plot_node") return std::to_string(plot_node);
  if (key == "plot_begin") return std::to_string(plot_begin);
  if (key == "plot_steps") return std::to_string(plot_steps);
  if (key == "gaussian_sigmas") return join(gaussian_sigmas);
  if (key == "poisson_lambdas") return join(poisson_lambdas);
  if (key == "epoch_grid") return join(epoch_grid);
  if (key == "unit_grid") return join(unit_grid);
  if (key == "synth_nodes") return std::to_string(synth_nodes);
  if (key == "synth_steps") return std::to_string(synth_steps);
  if (key == "synth_effect") return format_double(synth_effect);
  fail(ErrorCode::config_error, "unknown config key '" + key + "'");
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open config file: " + path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      fail(ErrorCode::config_error,
           path + ":" + std::to_string(line_number) +
               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    try {
      config.set(key, value);
    } catch (const Error& e) {
      fail(ErrorCode::config_error,
           path + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  ExperimentConfig config;
  apply_config_file(config, path);
  return config;
}

}  // namespace astgcn
