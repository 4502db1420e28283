#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "astgcn/error.hpp"
#include "astgcn/model.hpp"
#include "astgcn/train.hpp"
#include "support/references.hpp"

using namespace astgcn;

namespace {

RoadGraph random_graph(Index n, std::mt19937_64& rng) {
  return build_graph(refs::random_adjacency(n, rng));
}

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng,
                     double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = unit(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("parameter bookkeeping") {
  ModelDims dims{5, 4, 3, 4, 2, 1};
  CHECK(dims.parameter_count() ==
        4 * 3 + 3 + 3 * ((3 + 4) * 4 + 4) + 4 * 2 + 2);

  ModelParameters params = init_params(dims, 7);
  Index total = 0;
  for (const ParamSlice& slice : parameter_slices(params)) {
    total += slice.size;
  }
  CHECK(total == dims.parameter_count());

  ModelDims two_layer = dims;
  two_layer.gc_layers = 2;
  CHECK(two_layer.parameter_count() ==
        dims.parameter_count() + 3 * 3 + 3);

  const ModelDims degenerate{0, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(degenerate.validate(), Error);
}

TEST_CASE("initialization is seeded, bounded, and bias-free") {
  const ModelDims dims{5, 4, 3, 4, 2, 1};
  const ModelParameters a = init_params(dims, 42);
  ModelParameters b = init_params(dims, 42);
  for (std::size_t s = 0; s < parameter_slices(b).size(); ++s) {
    const auto sa = parameter_slices(const_cast<ModelParameters&>(a))[s];
    const auto sb = parameter_slices(b)[s];
    CHECK(std::memcmp(sa.data, sb.data,
                      sizeof(double) * static_cast<std::size_t>(sa.size)) ==
          0);
  }

  for (const auto& slice :
       parameter_slices(const_cast<ModelParameters&>(a))) {
    if (!slice.is_weight) {
      for (Index i = 0; i < slice.size; ++i) CHECK(slice.data[i] == 0.0);
    }
  }
  const double gate_bound = std::sqrt(6.0 / ((3 + 4) + 4));
  CHECK(a.update_weight.cwiseAbs().maxCoeff() < gate_bound);
  const double gc_bound = std::sqrt(6.0 / (4 + 3));
  CHECK(a.gc[0].weight.cwiseAbs().maxCoeff() < gc_bound);

  const ModelParameters c = init_params(dims, 43);
  CHECK((a.update_weight - c.update_weight).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("graph convolution basics") {
  std::mt19937_64 rng(3);

  ModelDims dims{1, 2, 2, 1, 1, 1};
  ModelParameters params = init_params(dims, 1);
  const RoadGraph one = build_graph(Matrix::Zero(1, 1));

  params.gc[0].weight.setZero();
  params.gc[0].bias.setZero();
  CHECK(gc(params, one, Matrix::Ones(1, 2)).cwiseAbs().maxCoeff() == 0.0);

  params.gc[0].weight = Matrix::Identity(2, 2);
  Matrix e(1, 2);
  e << 0.3, -0.7;
  CHECK((gc(params, one, e) - e).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("graph convolution matches the brute-force oracle") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 9);
    ModelDims dims{n, 3, 4, 2, 1, trial % 2 == 0 ? 1 : 2};
    ModelParameters params = init_params(dims, 100 + trial);
    for (auto& layer : params.gc) {
      layer.bias = random_matrix(1, dims.gc_units, rng).row(0);
    }
    const RoadGraph graph = random_graph(n, rng);
    const Matrix features = random_matrix(n, 3, rng);
    const Matrix expected = refs::naive_gc(params, graph.adjacency, features);
    const Matrix actual = gc(params, graph, features);
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gc is linear when the bias is zero") {
  std::mt19937_64 rng(23);
  const Index n = 6;
  ModelDims dims{n, 4, 3, 2, 1, 1};
  ModelParameters params = init_params(dims, 5);
  params.gc[0].bias.setZero();
  const RoadGraph graph = random_graph(n, rng);
  const Matrix e1 = random_matrix(n, 4, rng);
  const Matrix e2 = random_matrix(n, 4, rng);
  const double a = 1.7, b = -0.4;
  const Matrix lhs = gc(params, graph, a * e1 + b * e2);
  const Matrix rhs = a * gc(params, graph, e1) + b * gc(params, graph, e2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cell step closed forms") {
  const ModelDims dims{3, 2, 2, 4, 1, 1};
  ModelParameters zero = zeros_like(init_params(dims, 1));
  std::mt19937_64 rng(8);
  const RoadGraph graph = random_graph(3, rng);
  const Matrix h_prev = random_matrix(3, 4, rng);
  const Matrix features = random_matrix(3, 2, rng);

  const CellState state = cell_step(features, h_prev, zero, graph);
  CHECK((state.cache.update.array() == 0.5).all());
  CHECK((state.cache.candidate.array() == 0.0).all());
  CHECK((state.hidden - 0.5 * h_prev).cwiseAbs().maxCoeff() == 0.0);

  // from a zero hidden state, h = (1 - u) .* c stays inside (-1, 1)
  const ModelParameters params = init_params(dims, 3);
  const CellState fresh =
      cell_step(features, Matrix::Zero(3, 4), params, graph);
  const Matrix expected = (1.0 - fresh.cache.update.array())
                              .matrix()
                              .cwiseProduct(fresh.cache.candidate);
  CHECK((fresh.hidden - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fresh.hidden.cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("cell step matches the scalar-loop reference") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 3;
    const ModelDims dims{n, 3, 2, 4, 1, trial % 2 == 0 ? 1 : 2};
    ModelParameters params = init_params(dims, 500 + trial);
    for (auto& layer : params.gc) {
      layer.bias = random_matrix(1, dims.gc_units, rng, 0.3).row(0);
    }
    params.update_bias = random_matrix(1, 4, rng, 0.3).row(0);
    params.reset_bias = random_matrix(1, 4, rng, 0.3).row(0);
    params.candidate_bias = random_matrix(1, 4, rng, 0.3).row(0);
    const RoadGraph graph = random_graph(n, rng);
    const Matrix features = random_matrix(n, 3, rng);
    const Matrix h_prev = random_matrix(n, 4, rng, 0.9);

    const CellState state = cell_step(features, h_prev, params, graph);
    const refs::NaiveCell naive =
        refs::naive_cell_step(params, graph.adjacency, features, h_prev);
    CHECK((state.hidden - naive.hidden).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((state.cache.update - naive.update).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((state.cache.reset - naive.reset).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((state.cache.candidate - naive.candidate).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("forward closed forms") {
  std::mt19937_64 rng(4);
  const ModelDims dims{4, 2, 3, 5, 3, 1};
  const RoadGraph graph = random_graph(4, rng);

  ModelParameters zero = zeros_like(init_params(dims, 1));
  zero.output_bias << 1.5, -2.0, 0.25;
  const std::vector<Matrix> sequence = {random_matrix(4, 2, rng)};
  const Matrix predictions = forward(sequence, zero, graph);
  for (Index i = 0; i < 4; ++i) {
    CHECK(predictions(i, 0) == 1.5);
    CHECK(predictions(i, 1) == -2.0);
    CHECK(predictions(i, 2) == 0.25);
  }

  // doubling the output weight doubles (predictions - output bias)
  ModelParameters params = init_params(dims, 9);
  std::vector<Matrix> seq;
  for (int t = 0; t < 3; ++t) seq.push_back(random_matrix(4, 2, rng));
  const Matrix base = forward(seq, params, graph);
  ModelParameters doubled = params;
  doubled.output_weight *= 2.0;
  const Matrix twice = forward(seq, doubled, graph);
  const Matrix lhs = twice.rowwise() - params.output_bias;
  const Matrix rhs = 2.0 * (base.rowwise() - params.output_bias);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("node permutation equivariance") {
  std::mt19937_64 rng(55);
  const Index n = 6;
  const ModelDims dims{n, 3, 2, 4, 2, 1};
  const ModelParameters params = init_params(dims, 12);
  const RoadGraph graph = random_graph(n, rng);

  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;

  std::vector<Matrix> seq, permuted_seq;
  for (int t = 0; t < 3; ++t) {
    seq.push_back(random_matrix(n, 3, rng));
    permuted_seq.push_back(p * seq.back());
  }
  const RoadGraph permuted_graph =
      build_graph(p * graph.adjacency * p.transpose());

  const Matrix original = forward(seq, params, graph);
  const Matrix permuted = forward(permuted_seq, params, permuted_graph);
  CHECK((permuted - p * original).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hidden state stays strictly inside the unit box") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 7);
    const Index h = 2 + static_cast<Index>(rng() % 7);
    const ModelDims dims{n, 3, 3, h, 1, 1};
    const ModelParameters params = init_params(dims, 900 + trial);
    const RoadGraph graph = random_graph(n, rng);
    Matrix hidden = Matrix::Zero(n, h);
    const Index steps = 1 + static_cast<Index>(rng() % 20);
    for (Index t = 0; t < steps; ++t) {
      hidden = cell_step(random_matrix(n, 3, rng), hidden, params, graph)
                   .hidden;
      CHECK(hidden.cwiseAbs().maxCoeff() < 1.0);
    }
  }
}

TEST_CASE("batched forward equals stacked per-sample forwards") {
  std::mt19937_64 rng(31);
  const Index n = 5;
  const ModelDims dims{n, 4, 3, 4, 2, 1};
  const ModelParameters params = init_params(dims, 77);
  const RoadGraph graph = random_graph(n, rng);

  const Index batch = 3;
  std::vector<Matrix> stacked(2, Matrix(batch * n, 4));
  std::vector<std::vector<Matrix>> individual(static_cast<std::size_t>(batch));
  for (Index b = 0; b < batch; ++b) {
    for (int t = 0; t < 2; ++t) {
      const Matrix e = random_matrix(n, 4, rng);
      stacked[static_cast<std::size_t>(t)].middleRows(b * n, n) = e;
      individual[static_cast<std::size_t>(b)].push_back(e);
    }
  }
  const Matrix batched = forward(stacked, params, graph, batch);
  for (Index b = 0; b < batch; ++b) {
    const Matrix single =
        forward(individual[static_cast<std::size_t>(b)], params, graph);
    CHECK((batched.middleRows(b * n, n) - single).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("backward: zero upstream gradient zeroes every parameter") {
  std::mt19937_64 rng(6);
  const ModelDims dims{4, 3, 2, 3, 2, 1};
  const ModelParameters params = init_params(dims, 3);
  const RoadGraph graph = random_graph(4, rng);
  std::vector<Matrix> seq = {random_matrix(4, 3, rng),
                             random_matrix(4, 3, rng)};
  Tape tape;
  forward(seq, params, graph, 1, &tape);
  ModelParameters grads =
      backward(tape, params, graph, Matrix::Zero(4, 2));
  for (const auto& slice : parameter_slices(grads)) {
    for (Index i = 0; i < slice.size; ++i) CHECK(slice.data[i] == 0.0);
  }
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(123);
  for (int point = 0; point < 3; ++point) {
    const Index n = 4;
    const ModelDims dims{n, 3, 2, 3, 2, point == 2 ? 2 : 1};
    ModelParameters params = init_params(dims, 1000 + point);
    for (auto& slice : parameter_slices(params)) {
      if (!slice.is_weight) {
        for (Index i = 0; i < slice.size; ++i) {
          slice.data[i] = 0.1 * std::uniform_real_distribution<>(-1, 1)(rng);
        }
      }
    }
    const RoadGraph graph = random_graph(n, rng);
    std::vector<Matrix> seq;
    for (int t = 0; t < 2; ++t) seq.push_back(random_matrix(n, 3, rng));
    const Matrix targets = random_matrix(n, 2, rng);
    const double lambda = 1e-3;

    Tape tape;
    const Matrix predictions = forward(seq, params, graph, 1, &tape);
    ModelParameters grads = backward(
        tape, params, graph, loss_prediction_gradient(targets, predictions));
    add_regularizer_gradient(params, lambda, grads);

    const auto loss_at = [&] {
      return loss(targets, forward(seq, params, graph), params, lambda);
    };
    const auto param_view = parameter_slices(params);
    const auto grad_view = parameter_slices(grads);
    double worst = 0.0;
    for (std::size_t s = 0; s < param_view.size(); ++s) {
      for (Index i = 0; i < param_view[s].size; ++i) {
        const double numeric =
            refs::central_difference(param_view[s].data[i], 1e-5, loss_at);
        worst = std::max(
            worst, refs::gradcheck_error(grad_view[s].data[i], numeric));
      }
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("output bias gradient is twice the mean residual") {
  std::mt19937_64 rng(14);
  const ModelDims dims{5, 2, 2, 3, 1, 1};
  const ModelParameters params = init_params(dims, 21);
  const RoadGraph graph = random_graph(5, rng);
  std::vector<Matrix> seq = {random_matrix(5, 2, rng)};
  const Matrix targets = random_matrix(5, 1, rng);

  Tape tape;
  const Matrix predictions = forward(seq, params, graph, 1, &tape);
  const ModelParameters grads = backward(
      tape, params, graph, loss_prediction_gradient(targets, predictions));
  const double expected = 2.0 * (predictions - targets).mean();
  CHECK(grads.output_bias(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("error paths") {
  std::mt19937_64 rng(1);
  const ModelDims dims{3, 2, 2, 3, 1, 1};
  const ModelParameters params = init_params(dims, 2);
  const RoadGraph graph = random_graph(3, rng);

  // shape mismatch on features
  CHECK_THROWS_AS(gc(params, graph, Matrix::Zero(3, 5)), Error);

  // tape mismatch on the upstream gradient
  std::vector<Matrix> seq = {random_matrix(3, 2, rng)};
  Tape tape;
  forward(seq, params, graph, 1, &tape);
  try {
    backward(tape, params, graph, Matrix::Zero(3, 4));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::tape_mismatch);
  }

  // non-finite inputs surface as a dedicated error
  Matrix poisoned = random_matrix(3, 2, rng);
  poisoned(1, 1) = std::numeric_limits<double>::infinity();
  try {
    forward(std::vector<Matrix>{poisoned}, params, graph);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_finite_activation);
  }
}

TEST_CASE("forward is deterministic") {
  std::mt19937_64 rng(456);
  const ModelDims dims{4, 3, 3, 4, 2, 1};
  const ModelParameters params = init_params(dims, 88);
  const RoadGraph graph = random_graph(4, rng);
  std::vector<Matrix> seq;
  for (int t = 0; t < 4; ++t) seq.push_back(random_matrix(4, 3, rng));
  const Matrix a = forward(seq, params, graph);
  const Matrix b = forward(seq, params, graph);
  CHECK(std::memcmp(a.data(), b.data(),
                    sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}
