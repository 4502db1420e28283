#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "astgcn/error.hpp"
#include "astgcn/eval.hpp"
#include "astgcn/rng.hpp"
#include "astgcn/synthetic.hpp"
#include "support/references.hpp"

using namespace astgcn;

namespace {

struct Fixture {
  RoadGraph graph;
  SpeedSeries series;
  AttributeBundle attrs;
  SplitRanges split;
};

Fixture make_fixture(std::uint64_t seed, Index nodes = 6, Index steps = 260) {
  SyntheticOptions options;
  options.nodes = nodes;
  options.steps = steps;
  options.seed = seed;
  SyntheticData data = generate_synthetic(options);
  Fixture f{std::move(data.graph), std::move(data.series),
            std::move(data.attrs), {}};
  f.split = chronological_split(f.series, 0.8, 4, 4);
  return f;
}

TrainConfig quick_config(std::uint64_t seed, int epochs = 8) {
  TrainConfig config;
  config.learning_rate = 0.01;
  config.batch_size = 32;
  config.epochs = epochs;
  config.hidden_units = 8;
  config.seq_len = 4;
  config.horizon = 4;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("horizon slice scoring equals compute_metrics on that step") {
  Fixture f = make_fixture(3);
  const AugmentSpec spec{true, true, 2};
  const TrainConfig config = quick_config(3);
  const TrainResult result =
      train(config, f.graph, f.series, f.attrs, spec, f.split);

  const auto windows = make_windows(f.split.test, 4, 4);
  const auto augmented =
      augment_series(f.series.normalized(), f.attrs, spec);
  const Matrix predictions = predict_windows(result.params, f.graph,
                                             augmented, windows,
                                             f.series.nodes());

  const MetricReport direct =
      evaluate_horizon_step(predictions, windows, f.series, 1);

  // independent assembly of the same slice
  const Index n = f.series.nodes();
  Matrix truth(static_cast<Index>(windows.size()), n);
  Matrix predicted(static_cast<Index>(windows.size()), n);
  for (Index w = 0; w < static_cast<Index>(windows.size()); ++w) {
    truth.row(w) =
        f.series.values.row(windows[static_cast<std::size_t>(w)].target.begin);
    predicted.row(w) =
        predictions.col(0).segment(w * n, n).transpose() * f.series.max_speed;
  }
  const MetricReport expected = compute_metrics(truth, predicted);
  CHECK(direct.rmse == doctest::Approx(expected.rmse).epsilon(1e-15));
  CHECK(direct.mae == doctest::Approx(expected.mae).epsilon(1e-15));
  CHECK(direct.horizon_minutes == 15);

  const auto reports =
      evaluate_horizons(result.params, f.graph, f.series, f.attrs, spec,
                        f.split.test, 4, {1, 2, 3, 4});
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].rmse == doctest::Approx(direct.rmse).epsilon(1e-15));
  CHECK(reports[3].horizon_minutes == 60);

  CHECK_THROWS_AS(evaluate_horizon_step(predictions, windows, f.series, 5),
                  Error);
}

TEST_CASE("ablation settings cover the four attribute configurations") {
  const auto settings = ablation_settings(AugmentSpec{true, true, 3});
  REQUIRE(settings.size() == 4);
  CHECK(settings[0].label == "tgcn");
  CHECK_FALSE(settings[0].spec.use_static);
  CHECK_FALSE(settings[0].spec.use_dynamic);
  CHECK(settings[1].label == "poi");
  CHECK(settings[1].spec.use_static);
  CHECK_FALSE(settings[1].spec.use_dynamic);
  CHECK(settings[2].label == "weather");
  CHECK(settings[2].spec.use_dynamic);
  CHECK(settings[3].label == "weather+poi");
  CHECK(settings[3].spec.use_static);
  CHECK(settings[3].spec.use_dynamic);
  for (const auto& setting : settings) {
    CHECK(setting.spec.window_m == 3);
  }
}

TEST_CASE("ablation trains all four settings from one seed") {
  Fixture f = make_fixture(7);
  const TrainConfig config = quick_config(7, 4);
  const auto results = run_ablation(config, f.graph, f.series, f.attrs,
                                    AugmentSpec{true, true, 2}, f.split, {1});
  REQUIRE(results.size() == 4);
  for (const auto& result : results) {
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].setting_label == result.setting.label);
    CHECK(result.reports[0].rmse > 0.0);
  }

  // the attribute-free arm is exactly a direct TGCN training run
  const TrainResult direct = train(config, f.graph, f.series, f.attrs,
                                   AugmentSpec{false, false, 2}, f.split);
  CHECK((results[0].train.params.update_weight - direct.params.update_weight)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(results[0].train.loss_history == direct.loss_history);
}

TEST_CASE("gaussian perturbation: zero sigma is the identity") {
  Fixture f = make_fixture(9);
  const Matrix normalized = f.series.normalized();
  const Matrix same = perturb_inputs(normalized, f.split.test,
                                     NoiseKind::gaussian, 0.0, 4,
                                     f.series.max_speed);
  CHECK((same - normalized).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbation only touches the requested range") {
  Fixture f = make_fixture(10);
  const Matrix normalized = f.series.normalized();
  const Matrix noisy = perturb_inputs(normalized, f.split.test,
                                      NoiseKind::gaussian, 0.3, 4,
                                      f.series.max_speed);
  CHECK((noisy.topRows(f.split.train.end) -
         normalized.topRows(f.split.train.end))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((noisy.bottomRows(f.split.test.length()) -
         normalized.bottomRows(f.split.test.length()))
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("perturbation is seed-deterministic") {
  Fixture f = make_fixture(11);
  const Matrix normalized = f.series.normalized();
  const Matrix a = perturb_inputs(normalized, f.split.test,
                                  NoiseKind::poisson, 4.0, 99,
                                  f.series.max_speed);
  const Matrix b = perturb_inputs(normalized, f.split.test,
                                  NoiseKind::poisson, 4.0, 99,
                                  f.series.max_speed);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const Matrix c = perturb_inputs(normalized, f.split.test,
                                  NoiseKind::poisson, 4.0, 100,
                                  f.series.max_speed);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("poisson noise is centered and gaussian noise has the right scale") {
  Rng rng(5);
  const double lambda = 4.0;
  const long draws = 1000000;
  double sum = 0.0;
  for (long i = 0; i < draws; ++i) {
    sum += static_cast<double>(rng.poisson(lambda)) - lambda;
  }
  const double mean = sum / static_cast<double>(draws);
  const double standard_error = std::sqrt(lambda / static_cast<double>(draws));
  CHECK(std::abs(mean) < 3.0 * standard_error);

  double sq = 0.0;
  const double sigma = 0.2;
  const long normal_draws = 200000;
  for (long i = 0; i < normal_draws; ++i) {
    const double x = sigma * rng.normal();
    sq += x * x;
  }
  CHECK(std::sqrt(sq / static_cast<double>(normal_draws)) ==
        doctest::Approx(sigma).epsilon(0.02));
}

TEST_CASE("perturbed evaluation keeps the truth untouched") {
  Fixture f = make_fixture(13);
  const AugmentSpec spec{true, true, 2};
  const TrainConfig config = quick_config(13, 6);
  const TrainResult result =
      train(config, f.graph, f.series, f.attrs, spec, f.split);

  const auto clean = evaluate_horizons(result.params, f.graph, f.series,
                                       f.attrs, spec, f.split.test, 4, {1});
  const Matrix noisy_inputs =
      perturb_inputs(f.series.normalized(), f.split.test, NoiseKind::gaussian,
                     0.5, 21, f.series.max_speed);
  const auto noisy = evaluate_horizons_with_inputs(
      result.params, f.graph, noisy_inputs, f.series, f.attrs, spec,
      f.split.test, 4, {1});
  // strong noise must hurt, and both reports score against the same truth
  CHECK(noisy[0].rmse > clean[0].rmse);
}
