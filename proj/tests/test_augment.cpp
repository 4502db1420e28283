#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "astgcn/augment.hpp"
#include "astgcn/error.hpp"
#include "astgcn/synthetic.hpp"
#include "support/references.hpp"

using namespace astgcn;

namespace {

AttributeBundle tiny_bundle() {
  AttributeBundle attrs;
  attrs.static_attrs = Matrix(2, 1);
  attrs.static_attrs << 0.1, 0.2;
  Matrix weather(3, 2);
  weather << 0.0, 0.0,  // t = 0
      0.3, 0.4,         // t = 1
      0.5, 0.6;         // t = 2
  attrs.dynamic_attrs = {weather};
  return attrs;
}

}  // namespace

TEST_CASE("attributes off reduces to the raw speed column") {
  Vector x(2);
  x << 5.0, 6.0;
  const AugmentSpec off{false, false, 2};
  const Matrix out = augment_step(x, Matrix(), {}, 0, off);
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 1);
  CHECK(out(0, 0) == 5.0);
  CHECK(out(1, 0) == 6.0);
  CHECK(off.width(3, 7) == 1);  // F = 1 exactly when both flags are off
}

TEST_CASE("worked two-node example stacks columns in the documented order") {
  const AttributeBundle attrs = tiny_bundle();
  Vector x(2);
  x << 5.0, 6.0;
  const AugmentSpec spec{true, true, 1};
  const Matrix out =
      augment_step(x, attrs.static_attrs, attrs.dynamic_attrs, 2, spec);
  REQUIRE(out.cols() == 4);  // F = 1 + 1 + 1*(1+1)
  Matrix expected(2, 4);
  expected << 5.0, 0.1, 0.3, 0.5, 6.0, 0.2, 0.4, 0.6;
  CHECK((out - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sequence start pads dynamic history by replication") {
  const AttributeBundle attrs = tiny_bundle();
  Vector x(2);
  x << 1.0, 2.0;
  const AugmentSpec spec{false, true, 2};
  const Matrix out =
      augment_step(x, attrs.static_attrs, attrs.dynamic_attrs, 0, spec);
  REQUIRE(out.cols() == 4);  // 1 + 1*(2+1)
  // all three trailing columns equal D at index 0
  for (Index c = 1; c < 4; ++c) {
    CHECK(out(0, c) == attrs.dynamic_attrs[0](0, 0));
    CHECK(out(1, c) == attrs.dynamic_attrs[0](0, 1));
  }
}

TEST_CASE("width formula holds for every flag and window combination") {
  std::mt19937_64 rng(31);
  for (int mask = 0; mask < 4; ++mask) {
    for (int m = 0; m <= 3; ++m) {
      const AugmentSpec spec{(mask & 1) != 0, (mask & 2) != 0, m};
      const Index p = 1 + static_cast<Index>(rng() % 3);
      const Index w = 1 + static_cast<Index>(rng() % 2);
      const Index expected = 1 + (spec.use_static ? p : 0) +
                             (spec.use_dynamic ? w * (m + 1) : 0);
      CHECK(spec.width(p, w) == expected);

      const Index n = 4;
      AttributeBundle attrs;
      attrs.static_attrs = Matrix::Random(n, p).cwiseAbs();
      for (Index j = 0; j < w; ++j) {
        attrs.dynamic_attrs.push_back(Matrix::Random(10, n).cwiseAbs());
      }
      const Matrix out = augment_step(Vector::Ones(n), attrs.static_attrs,
                                      attrs.dynamic_attrs, 5, spec);
      CHECK(out.cols() == expected);
    }
  }
}

TEST_CASE("augmented sequences keep static columns constant over time") {
  SyntheticOptions options;
  options.nodes = 6;
  options.steps = 220;
  options.seed = 4;
  const SyntheticData data = generate_synthetic(options);
  SpeedSeries series = data.series;
  chronological_split(series, 0.8, 4, 1);

  const AugmentSpec spec{true, true, 2};
  const WindowedSample window{{10, 14}, {14, 15}};
  const auto sequence =
      augment_sequence(series.normalized(), data.attrs, spec, window);
  REQUIRE(sequence.size() == 4);
  const Index p = data.attrs.static_width();
  for (std::size_t t = 1; t < sequence.size(); ++t) {
    CHECK((sequence[t].middleCols(1, p) - sequence[0].middleCols(1, p))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  // every step carries the spec width
  for (const Matrix& step : sequence) {
    CHECK(step.cols() ==
          spec.width(p, data.attrs.dynamic_width()));
  }
}

TEST_CASE("attributes-off sequence is bitwise the raw speed window") {
  SyntheticOptions options;
  options.nodes = 5;
  options.steps = 200;
  options.seed = 9;
  const SyntheticData data = generate_synthetic(options);
  SpeedSeries series = data.series;
  chronological_split(series, 0.8, 4, 1);
  const Matrix normalized = series.normalized();

  const AugmentSpec off{false, false, 2};
  const WindowedSample window{{37, 41}, {41, 42}};
  const auto sequence = augment_sequence(normalized, data.attrs, off, window);
  for (Index j = 0; j < 4; ++j) {
    const Matrix raw = normalized.row(window.input.begin + j).transpose();
    CHECK((sequence[static_cast<std::size_t>(j)] - raw)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("first column recovers the speed vector exactly") {
  const AttributeBundle attrs = tiny_bundle();
  Vector x(2);
  x << -0.25, 7.5;
  const AugmentSpec spec{true, true, 1};
  const Matrix out =
      augment_step(x, attrs.static_attrs, attrs.dynamic_attrs, 1, spec);
  CHECK(out(0, 0) == x(0));
  CHECK(out(1, 0) == x(1));
}

TEST_CASE("shape and index violations are rejected") {
  const AttributeBundle attrs = tiny_bundle();
  Vector x(2);
  x << 1, 2;

  try {
    augment_step(x, Matrix::Zero(3, 1), attrs.dynamic_attrs, 0,
                 AugmentSpec{true, false, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape_mismatch);
  }

  try {
    augment_step(x, attrs.static_attrs, {Matrix::Zero(3, 5)}, 0,
                 AugmentSpec{false, true, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape_mismatch);
  }

  try {
    augment_step(x, attrs.static_attrs, attrs.dynamic_attrs, 3,
                 AugmentSpec{false, true, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::index_out_of_range);
  }
}
