#include "astgcn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "astgcn/error.hpp"

namespace astgcn {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json rowvector_to_json(const RowVector& v) {
  json row = json::array();
  for (Index c = 0; c < v.size(); ++c) row.push_back(v(c));
  return row;
}

Matrix matrix_from_json(const json& j, Index rows, Index cols,
                        const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    fail(ErrorCode::checkpoint_error,
         name + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail(ErrorCode::checkpoint_error,
           name + ": expected " + std::to_string(cols) + " columns");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

RowVector rowvector_from_json(const json& j, Index size,
                              const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size) {
    fail(ErrorCode::checkpoint_error,
         name + ": expected " + std::to_string(size) + " entries");
  }
  RowVector v(size);
  for (Index c = 0; c < size; ++c) {
    v(c) = j[static_cast<std::size_t>(c)].get<double>();
  }
  return v;
}

json encoding_to_json(const CategoricalEncoding& encoding) {
  return json{{"mode", encoding.mode == EncodingMode::ordinal ? "ordinal"
                                                              : "one-hot"},
              {"vocabulary", encoding.vocabulary}};
}

CategoricalEncoding encoding_from_json(const json& j) {
  CategoricalEncoding encoding;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "ordinal") {
    encoding.mode = EncodingMode::ordinal;
  } else if (mode == "one-hot") {
    encoding.mode = EncodingMode::one_hot;
  } else {
    fail(ErrorCode::checkpoint_error, "unknown encoding mode: " + mode);
  }
  encoding.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  return encoding;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  const ModelDims& dims = checkpoint.params.dims;
  json j;
  j["format"] = "astgcn-checkpoint";
  j["version"] = checkpoint.version;
  j["dims"] = {{"nodes", dims.nodes},
               {"feature_width", dims.feature_width},
               {"gc_units", dims.gc_units},
               {"hidden_units", dims.hidden_units},
               {"horizon", dims.horizon},
               {"gc_layers", dims.gc_layers}};
  j["augment"] = {{"use_static", checkpoint.spec.use_static},
                  {"use_dynamic", checkpoint.spec.use_dynamic},
                  {"window_m", checkpoint.spec.window_m}};
  j["encodings"] = {{"static", encoding_to_json(checkpoint.static_encoding)},
                    {"dynamic", encoding_to_json(checkpoint.dynamic_encoding)}};
  j["normalization"] = {{"max_speed", checkpoint.max_speed}};
  j["interval_minutes"] = checkpoint.interval_minutes;
  j["seq_len"] = checkpoint.seq_len;
  j["seed"] = checkpoint.seed;

  json gc_layers = json::array();
  for (const GcLayer& layer : checkpoint.params.gc) {
    gc_layers.push_back({{"weight", matrix_to_json(layer.weight)},
                         {"bias", rowvector_to_json(layer.bias)}});
  }
  j["parameters"] = {
      {"gc", std::move(gc_layers)},
      {"update_weight", matrix_to_json(checkpoint.params.update_weight)},
      {"reset_weight", matrix_to_json(checkpoint.params.reset_weight)},
      {"candidate_weight", matrix_to_json(checkpoint.params.candidate_weight)},
      {"update_bias", rowvector_to_json(checkpoint.params.update_bias)},
      {"reset_bias", rowvector_to_json(checkpoint.params.reset_bias)},
      {"candidate_bias", rowvector_to_json(checkpoint.params.candidate_bias)},
      {"output_weight", matrix_to_json(checkpoint.params.output_weight)},
      {"output_bias", rowvector_to_json(checkpoint.params.output_bias)}};

  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write checkpoint: " + path);
  out << j.dump(1) << '\n';
  if (!out) fail(ErrorCode::io_error, "checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::checkpoint_error,
         path + ": not valid JSON (" + e.what() + ")");
  }

  try {
    if (j.at("format").get<std::string>() != "astgcn-checkpoint") {
      fail(ErrorCode::checkpoint_error, path + ": not an astgcn checkpoint");
    }
    Checkpoint checkpoint;
    checkpoint.version = j.at("version").get<int>();
    if (checkpoint.version != 1) {
      fail(ErrorCode::checkpoint_error,
           path + ": unsupported checkpoint version " +
               std::to_string(checkpoint.version));
    }

    const json& dims_json = j.at("dims");
    ModelDims dims;
    dims.nodes = dims_json.at("nodes").get<Index>();
    dims.feature_width = dims_json.at("feature_width").get<Index>();
    dims.gc_units = dims_json.at("gc_units").get<Index>();
    dims.hidden_units = dims_json.at("hidden_units").get<Index>();
    dims.horizon = dims_json.at("horizon").get<Index>();
    dims.gc_layers = dims_json.at("gc_layers").get<int>();
    dims.validate();

    const json& augment_json = j.at("augment");
    checkpoint.spec.use_static = augment_json.at("use_static").get<bool>();
    checkpoint.spec.use_dynamic = augment_json.at("use_dynamic").get<bool>();
    checkpoint.spec.window_m = augment_json.at("window_m").get<int>();

    checkpoint.static_encoding =
        encoding_from_json(j.at("encodings").at("static"));
    checkpoint.dynamic_encoding =
        encoding_from_json(j.at("encodings").at("dynamic"));
    checkpoint.max_speed = j.at("normalization").at("max_speed").get<double>();
    checkpoint.interval_minutes = j.at("interval_minutes").get<int>();
    checkpoint.seq_len = j.at("seq_len").get<Index>();
    checkpoint.seed = j.at("seed").get<std::uint64_t>();

    const json& params_json = j.at("parameters");
    ModelParameters params;
    params.dims = dims;
    const json& gc_json = params_json.at("gc");
    if (static_cast<int>(gc_json.size()) != dims.gc_layers) {
      fail(ErrorCode::checkpoint_error,
           path + ": gc layer count does not match dims");
    }
    Index in = dims.feature_width;
    for (const json& layer : gc_json) {
      params.gc.push_back(
          {matrix_from_json(layer.at("weight"), in, dims.gc_units, "gc weight"),
           rowvector_from_json(layer.at("bias"), dims.gc_units, "gc bias")});
      in = dims.gc_units;
    }
    const Index gate_in = dims.gc_units + dims.hidden_units;
    params.update_weight = matrix_from_json(
        params_json.at("update_weight"), gate_in, dims.hidden_units,
        "update_weight");
    params.reset_weight =
        matrix_from_json(params_json.at("reset_weight"), gate_in,
                         dims.hidden_units, "reset_weight");
    params.candidate_weight =
        matrix_from_json(params_json.at("candidate_weight"), gate_in,
                         dims.hidden_units, "candidate_weight");
    params.update_bias = rowvector_from_json(
        params_json.at("update_bias"), dims.hidden_units, "update_bias");
    params.reset_bias = rowvector_from_json(
        params_json.at("reset_bias"), dims.hidden_units, "reset_bias");
    params.candidate_bias = rowvector_from_json(
        params_json.at("candidate_bias"), dims.hidden_units, "candidate_bias");
    params.output_weight =
        matrix_from_json(params_json.at("output_weight"), dims.hidden_units,
                         dims.horizon, "output_weight");
    params.output_bias = rowvector_from_json(params_json.at("output_bias"),
                                             dims.horizon, "output_bias");
    checkpoint.params = std::move(params);
    return checkpoint;
  } catch (const json::exception& e) {
    fail(ErrorCode::checkpoint_error,
         path + ": malformed checkpoint (" + e.what() + ")");
  }
}

}  // namespace astgcn
