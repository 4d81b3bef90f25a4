#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "ppgm/core/errors.h"
#include "ppgm/nn/mlp.h"
#include "ppgm/nn/optimizer.h"
#include "ppgm/nn/tape.h"
#include "support.h"

using namespace ppgm;
using namespace ppgm::nn;

namespace {

double regression_loss(const Mlp& net, const Matrix& inputs, const Matrix& targets) {
  return (net.forward_batch(inputs) - targets).squaredNorm() / static_cast<double>(inputs.cols());
}

Vector tape_gradient(const Mlp& net, const Matrix& inputs, const Matrix& targets) {
  Tape tape;
  auto binding = bind(tape, net);
  auto out = mlp_record(tape, net, binding, inputs);
  auto loss = tape.sum_squares(tape.sub(out, tape.constant(targets)), 1.0 / static_cast<double>(inputs.cols()));
  return tape.grad(loss);
}

Vector central_difference(const Mlp& net, const Matrix& inputs, const Matrix& targets, double h) {
  Mlp probe = net;
  const Vector p = net.params();
  Vector g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Vector q = p;
    q(i) += h;
    probe.set_params(q);
    const double up = regression_loss(probe, inputs, targets);
    q(i) -= 2 * h;
    probe.set_params(q);
    g(i) = (up - regression_loss(probe, inputs, targets)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("parameter count formula") {
  CHECK(parameter_count({2, 10, 10, 3}) == 173);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Index> dims(2 + trial % 4);
    for (auto& x : dims) x = d(rng);
    std::size_t expect = 0;
    for (std::size_t i = 1; i < dims.size(); ++i) expect += dims[i] * (dims[i - 1] + 1);
    auto net = mlp_init(dims, trial);
    CHECK(net.parameter_count() == expect);
    CHECK(static_cast<std::size_t>(net.params().size()) == expect);
  }
}

TEST_CASE("initialization is deterministic in the seed") {
  auto a = mlp_init({2, 10, 10, 3}, 5), b = mlp_init({2, 10, 10, 3}, 5), c = mlp_init({2, 10, 10, 3}, 6);
  CHECK(a.params() == b.params());
  CHECK(a.params() != c.params());
}

TEST_CASE("zero spread gives zero parameters and the output bias") {
  auto net = mlp_init({2, 4, 3}, 1, 0.0);
  CHECK(net.params().isZero(0));
  Vector p = net.params();
  p.tail(3) << 0.5, -1.0, 2.0;
  net.set_params(p);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) CHECK(net.forward(test::random_vector(rng, 2, 5.0)) == p.tail(3));
}

TEST_CASE("hidden activations stay within the tanh range") {
  // Identity output layer exposes the hidden layer.
  auto net = mlp_init({3, 4, 4}, 3, 5.0);
  Vector p = net.params();
  const Eigen::Index first = 4 * 3 + 4;
  const Matrix eye = Matrix::Identity(4, 4);
  p.segment(first, 16) = Eigen::Map<const Vector>(eye.data(), 16);
  p.tail(4).setZero();
  net.set_params(p);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) CHECK(net.forward(test::random_vector(rng, 3, 1e3)).cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("batched forward equals per-sample forward") {
  auto net = time_state_net(2, 3, {6, 5}, 2.0, 10.0, 7);
  std::mt19937_64 rng(8);
  const Matrix in = test::random_matrix(rng, 3, 9, 4.0);
  const Matrix out = net.forward_batch(in);
  for (Eigen::Index j = 0; j < in.cols(); ++j) CHECK((out.col(j) - mlp_forward(net, in.col(j))).norm() <= 1e-14);
}

TEST_CASE("time-state inputs are scaled to the unit interval") {
  auto net = time_state_net(2, 1, {3}, 2.0, 10.0, 1);
  Vector in(3);
  in << 2.0, 10.0, -10.0;
  const Vector scaled = net.inputScale.cwiseProduct(in) + net.inputShift;
  CHECK(scaled(0) == doctest::Approx(1.0));
  CHECK(scaled(1) == doctest::Approx(1.0));
  CHECK(scaled(2) == doctest::Approx(-1.0));
  in(0) = 0.0;
  CHECK((net.inputScale.cwiseProduct(in) + net.inputShift)(0) == doctest::Approx(-1.0));
}

TEST_CASE("non-finite input is rejected") {
  auto net = mlp_init({2, 3, 1}, 1);
  CHECK_THROWS_AS(net.forward(Vector::Constant(2, NAN)), NumericError);
}

TEST_CASE("directional derivative in parameter space matches a finite difference") {
  std::mt19937_64 rng(12);
  auto net = time_state_net(2, 2, {8, 8}, 1.0, 10.0, 3, 0.5);
  const Matrix in = test::random_matrix(rng, 3, 5, 3.0), target = test::random_matrix(rng, 2, 5);
  const Vector g = tape_gradient(net, in, target);
  const Vector dir = test::random_vector(rng, g.size()).normalized();
  const Vector p = net.params();
  const double h = 1e-5;
  Mlp probe = net;
  probe.set_params(p + h * dir);
  const double up = regression_loss(probe, in, target);
  probe.set_params(p - h * dir);
  const double fd = (up - regression_loss(probe, in, target)) / (2 * h);
  CHECK(std::abs(fd - g.dot(dir)) <= 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("reverse-mode gradients of random networks match central differences") {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> width(1, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Index> dims{width(rng)};
    for (int l = 0; l < 1 + trial % 3; ++l) dims.push_back(width(rng));
    dims.push_back(width(rng));
    auto net = mlp_init(dims, 100 + trial, 0.7);
    const Matrix in = test::random_matrix(rng, dims.front(), 4, 2.0);
    const Matrix target = test::random_matrix(rng, dims.back(), 4);
    const Vector g = tape_gradient(net, in, target);
    const Vector fd = central_difference(net, in, target, 1e-5);
    CHECK((g - fd).norm() <= 1e-5 * std::max(g.norm(), 1e-8));
  }
}

TEST_CASE("gradient of tanh at zero") {
  Tape tape;
  auto w = tape.parameter(Matrix::Zero(1, 1));
  CHECK(tape.grad(tape.tanh(w))(0) == 1.0);
}

TEST_CASE("linear regression gradient") {
  std::mt19937_64 rng(3);
  const Matrix W = test::random_matrix(rng, 3, 4), x = test::random_matrix(rng, 4, 1), y = test::random_matrix(rng, 3, 1);
  Tape tape;
  auto w = tape.parameter(W);
  auto loss = tape.sum_squares(tape.sub(tape.matmul(w, tape.constant(x)), tape.constant(y)), 1.0);
  const Matrix expect = 2.0 * (W * x - y) * x.transpose();
  CHECK((tape.grad(loss) - Eigen::Map<const Vector>(expect.data(), expect.size())).norm() <= 1e-13);
}

TEST_CASE("tape operations differentiate correctly") {
  // loss = 0.5 |K (a .* w) + bias - c|^2 with every op on the path.
  std::mt19937_64 rng(6);
  const Matrix K = test::random_matrix(rng, 2, 3), A0 = test::random_matrix(rng, 3, 4);
  const Matrix b0 = test::random_matrix(rng, 2, 1), c = test::random_matrix(rng, 2, 4);
  const RowVector w = test::random_matrix(rng, 1, 4);
  auto eval = [&](const Matrix& A, const Matrix& b, Vector* grad) {
    Tape tape;
    auto a = tape.parameter(A);
    auto bias = tape.parameter(b);
    auto z = tape.add_bias(tape.left_multiply(K, tape.scale_columns(tape.tanh(a), w)), bias);
    auto loss = tape.sum_squares(tape.scale(tape.sub(z, tape.constant(c)), 2.0), 0.5);
    if (grad) *grad = tape.grad(loss);
    return tape.value(loss)(0, 0);
  };
  Vector g;
  eval(A0, b0, &g);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Matrix A = A0, b = b0;
    double* slot = i < A.size() ? A.data() + i : b.data() + (i - A.size());
    *slot += h;
    const double up = eval(A, b, nullptr);
    *slot -= 2 * h;
    const double fd = (up - eval(A, b, nullptr)) / (2 * h);
    CHECK(std::abs(fd - g(i)) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("grad rejects foreign and non-scalar nodes") {
  Tape a, b;
  auto p = a.parameter(Matrix::Ones(2, 2));
  auto q = b.parameter(Matrix::Ones(1, 1));
  CHECK_THROWS_AS(a.grad(p), UsageError);
  CHECK_THROWS_AS(a.grad(q), UsageError);
  CHECK_THROWS_AS(a.matmul(p, q), UsageError);
}

TEST_CASE("optimizer leaves parameters unchanged on a zero gradient") {
  const Vector p = Vector::LinSpaced(4, -1, 1);
  for (auto kind : {OptimizerKind::Plain, OptimizerKind::Adam}) {
    auto st = make_optimizer(kind, 0.1);
    CHECK(optimizer_step(st, p, Vector::Zero(4)) == p);
  }
}

TEST_CASE("plain gradient step arithmetic") {
  auto st = make_optimizer(OptimizerKind::Plain, 0.01);
  CHECK(optimizer_step(st, Vector::Constant(1, 1.0), Vector::Constant(1, 2.0))(0) == doctest::Approx(0.98));
}

TEST_CASE("adaptive optimizer minimizes a convex quadratic") {
  Matrix H(3, 3);
  H << 3, 1, 0, 1, 2, 0.5, 0, 0.5, 1;
  const Vector opt(Vector::LinSpaced(3, -1, 2));
  auto f = [&](const Vector& p) { return 0.5 * (p - opt).dot(H * (p - opt)); };
  auto st = make_optimizer(OptimizerKind::Adam, 0.05);
  Vector p = Vector::Zero(3);
  for (int k = 0; k < 500; ++k) p = optimizer_step(st, p, H * (p - opt));
  CHECK(f(p) <= 1e-6);
}

TEST_CASE("optimizer names and shape checks") {
  CHECK(optimizer_kind_from_string("plain") == OptimizerKind::Plain);
  CHECK(optimizer_kind_from_string("gd") == OptimizerKind::Plain);
  CHECK(optimizer_kind_from_string("adam") == OptimizerKind::Adam);
  CHECK_THROWS_AS(optimizer_kind_from_string("sgd"), SpecError);
  auto st = make_optimizer(OptimizerKind::Plain, 0.1);
  CHECK_THROWS_AS(optimizer_step(st, Vector::Zero(2), Vector::Zero(3)), UsageError);
}

TEST_CASE("concurrent forward passes agree") {
  auto net = time_state_net(3, 3, {10, 10}, 1.0, 10.0, 9);
  std::mt19937_64 rng(10);
  const Matrix in = test::random_matrix(rng, 4, 200, 5.0);
  const Matrix expect = net.forward_batch(in);
  std::vector<Matrix> results(4);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      Matrix out(3, in.cols());
      for (Eigen::Index j = 0; j < in.cols(); ++j) out.col(j) = mlp_forward(net, in.col(j));
      results[w] = out;
    });
  for (auto& t : pool) t.join();
  for (const auto& r : results) CHECK((r - expect).cwiseAbs().maxCoeff() <= 1e-14);
}
