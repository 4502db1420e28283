#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "astgcn/checkpoint.hpp"
#include "astgcn/error.hpp"
#include "astgcn/synthetic.hpp"
#include "support/references.hpp"

using namespace astgcn;

namespace {

Checkpoint sample_checkpoint(std::uint64_t seed, int gc_layers = 1) {
  Checkpoint checkpoint;
  checkpoint.params = init_params(ModelDims{5, 4, 3, 6, 4, gc_layers}, seed);
  // make biases non-trivial so the round trip covers them
  checkpoint.params.update_bias.setLinSpaced(6, -0.3, 0.4);
  checkpoint.params.output_bias.setLinSpaced(4, 0.01, 0.07);
  checkpoint.spec = AugmentSpec{true, true, 2};
  checkpoint.static_encoding = {EncodingMode::ordinal,
                                default_poi_vocabulary()};
  checkpoint.dynamic_encoding = {EncodingMode::one_hot,
                                 default_weather_vocabulary()};
  checkpoint.max_speed = 63.25;
  checkpoint.interval_minutes = 15;
  checkpoint.seq_len = 4;
  checkpoint.seed = seed;
  return checkpoint;
}

}  // namespace

TEST_CASE("save/load preserves every field bit for bit") {
  refs::TempDir dir("astgcn-ckpt");
  const Checkpoint original = sample_checkpoint(7, 2);
  save_checkpoint(dir.str("model.json"), original);
  const Checkpoint loaded = load_checkpoint(dir.str("model.json"));

  CHECK(loaded.version == 1);
  CHECK(loaded.params.dims == original.params.dims);
  CHECK(loaded.spec.use_static == original.spec.use_static);
  CHECK(loaded.spec.use_dynamic == original.spec.use_dynamic);
  CHECK(loaded.spec.window_m == original.spec.window_m);
  CHECK(loaded.max_speed == original.max_speed);
  CHECK(loaded.seq_len == original.seq_len);
  CHECK(loaded.seed == original.seed);
  CHECK(loaded.static_encoding.vocabulary ==
        original.static_encoding.vocabulary);
  CHECK(loaded.dynamic_encoding.mode == EncodingMode::one_hot);

  auto& mutable_original = const_cast<Checkpoint&>(original);
  const auto a = parameter_slices(mutable_original.params);
  auto loaded_params = loaded.params;
  const auto b = parameter_slices(loaded_params);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(std::memcmp(a[s].data, b[s].data,
                      sizeof(double) * static_cast<std::size_t>(a[s].size)) ==
          0);
  }
}

TEST_CASE("loaded parameters reproduce forward bit for bit") {
  refs::TempDir dir("astgcn-ckpt");
  const Checkpoint original = sample_checkpoint(21);
  save_checkpoint(dir.str("model.json"), original);
  const Checkpoint loaded = load_checkpoint(dir.str("model.json"));

  std::mt19937_64 rng(3);
  const RoadGraph graph = build_graph(refs::random_adjacency(5, rng));
  std::vector<Matrix> seq;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 4; ++t) {
    Matrix e(5, 4);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 4; ++j) e(i, j) = unit(rng);
    }
    seq.push_back(e);
  }
  const Matrix a = forward(seq, original.params, graph);
  const Matrix b = forward(seq, loaded.params, graph);
  CHECK(std::memcmp(a.data(), b.data(),
                    sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

TEST_CASE("save -> load -> save is byte-stable") {
  refs::TempDir dir("astgcn-ckpt");
  const Checkpoint original = sample_checkpoint(9);
  save_checkpoint(dir.str("a.json"), original);
  const Checkpoint loaded = load_checkpoint(dir.str("a.json"));
  save_checkpoint(dir.str("b.json"), loaded);
  CHECK(refs::slurp(dir.str("a.json")) == refs::slurp(dir.str("b.json")));
}

TEST_CASE("malformed checkpoints are rejected") {
  refs::TempDir dir("astgcn-ckpt");

  CHECK_THROWS_AS(load_checkpoint(dir.str("missing.json")), Error);
  try {
    load_checkpoint(dir.str("missing.json"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }

  refs::spit(dir.str("garbage.json"), "not json at all{");
  try {
    load_checkpoint(dir.str("garbage.json"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::checkpoint_error);
  }

  // wrong version
  const Checkpoint original = sample_checkpoint(4);
  save_checkpoint(dir.str("v.json"), original);
  std::string text = refs::slurp(dir.str("v.json"));
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 9");
  refs::spit(dir.str("v.json"), text);
  try {
    load_checkpoint(dir.str("v.json"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::checkpoint_error);
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }

  // missing parameters block
  save_checkpoint(dir.str("m.json"), original);
  text = refs::slurp(dir.str("m.json"));
  const auto param_pos = text.find("\"parameters\"");
  REQUIRE(param_pos != std::string::npos);
  text.replace(param_pos, 12, "\"renamed\"");
  refs::spit(dir.str("m.json"), text);
  try {
    load_checkpoint(dir.str("m.json"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::checkpoint_error);
  }
}
