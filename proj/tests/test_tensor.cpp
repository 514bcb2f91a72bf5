#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dygssm/errors.hpp"
#include "dygssm/grad_check.hpp"
#include "dygssm/rng.hpp"
#include "dygssm/tensor.hpp"

using namespace dygssm;

namespace {

Tensor random_tensor(Rng& rng, int rows, int cols, bool requires_grad = true) {
  Tensor t = Tensor::zeros(rows, cols, requires_grad);
  for (auto& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("tensor construction and handle semantics") {
  Tensor a = Tensor::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 2);
  CHECK(a.at(1, 0) == 3.0);

  Tensor alias = a;
  alias.at(0, 0) = 9.0;
  CHECK(a.at(0, 0) == 9.0);
  CHECK(a.same_storage(alias));

  Tensor deep = a.clone();
  deep.at(0, 0) = -1.0;
  CHECK(a.at(0, 0) == 9.0);
  CHECK_FALSE(a.same_storage(deep));

  CHECK_THROWS_AS(Tensor::from_data(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}

TEST_CASE("sigmoid value and derivative at zero") {
  Tape tape;
  Tensor x = Tensor::from_rows({{0.0}}, true);
  Tensor y = tape.sigmoid(x);
  CHECK(y.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  tape.backward(y);
  CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("softmax of a constant row is uniform and rows sum to one") {
  Tape tape;
  Tensor x = Tensor::from_rows({{3.0, 3.0, 3.0, 3.0}, {-2.0, 0.0, 1.0, 5.0}});
  Tensor y = tape.softmax_rows(x);
  for (int c = 0; c < 4; ++c) CHECK(y.at(0, c) == doctest::Approx(0.25).epsilon(1e-15));
  for (int r = 0; r < 2; ++r) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += y.at(r, c);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matmul against identity and a hand-computed product") {
  Tape tape;
  Tensor a = Tensor::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  Tensor eye = Tensor::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  Tensor p = tape.matmul(a, eye);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(p.at(r, c) == a.at(r, c));

  Tensor b = Tensor::from_rows({{5.0, 6.0}, {7.0, 8.0}});
  Tensor q = tape.matmul(a, b);
  CHECK(q.at(0, 0) == 19.0);
  CHECK(q.at(0, 1) == 22.0);
  CHECK(q.at(1, 0) == 43.0);
  CHECK(q.at(1, 1) == 50.0);

  CHECK_THROWS_AS(tape.matmul(a, Tensor::zeros(3, 2)), ShapeError);
}

TEST_CASE("mean of W*x has the outer-product gradient in W") {
  // d mean(Wx) / dW[i][j] = x[j] / rows(W).
  Tensor w = Tensor::from_rows({{0.5, -1.0}, {2.0, 0.25}}, true);
  Tensor x = Tensor::from_rows({{3.0}, {-2.0}});
  Tape tape;
  Tensor loss = tape.mean_scalar(tape.matmul(w, x));
  tape.backward(loss);
  CHECK(w.grad()[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(w.grad()[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w.grad()[2] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(w.grad()[3] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("a tensor used twice accumulates both gradient paths") {
  // loss = mean(x*x + x)  =>  dloss/dx_i = (2 x_i + 1) / n
  Tensor x = Tensor::from_rows({{1.0, -3.0, 0.5}}, true);
  Tape tape;
  Tensor loss = tape.mean_scalar(tape.add(tape.mul_elem(x, x), x));
  tape.backward(loss);
  for (int i = 0; i < 3; ++i)
    CHECK(x.grad()[i] == doctest::Approx((2.0 * x.at(0, i) + 1.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("backward is linear in the loss scale") {
  Rng rng(11);
  Tensor x = random_tensor(rng, 2, 3);
  Tensor w = random_tensor(rng, 3, 2);

  Tape t1;
  t1.backward(t1.mean_scalar(t1.sigmoid(t1.matmul(x, w))));
  std::vector<double> g1(w.grad().begin(), w.grad().end());

  w.zero_grad();
  x.zero_grad();
  Tape t2;
  t2.backward(t2.scale(t2.mean_scalar(t2.sigmoid(t2.matmul(x, w))), 5.0));
  for (std::int64_t i = 0; i < w.size(); ++i)
    CHECK(w.grad()[i] == doctest::Approx(5.0 * g1[i]).epsilon(1e-10));
}

TEST_CASE("spmm matches dense multiply and backward uses symmetry") {
  // Symmetric 3-node path graph operator.
  CsrMatrix m;
  m.rows = 3;
  m.cols = 3;
  m.row_ptr = {0, 1, 3, 4};
  m.col_idx = {1, 0, 2, 1};
  m.values = {0.5, 0.5, 0.25, 0.25};
  CHECK(m.is_symmetric());
  CHECK(m.nnz() == 4);

  Tensor h = Tensor::from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}, true);
  Tape tape;
  Tensor out = tape.spmm(m, h);
  CHECK(out.at(0, 0) == doctest::Approx(1.5));
  CHECK(out.at(1, 0) == doctest::Approx(0.5 * 1.0 + 0.25 * 5.0));
  CHECK(out.at(2, 1) == doctest::Approx(1.0));

  auto params = std::vector<std::pair<std::string, Tensor>>{{"h", h}};
  auto res = grad_check(params, [&](Tape& t) { return t.mean_scalar(t.spmm(m, t.sigmoid(h))); });
  CHECK(res.max_rel_err < 1e-6);
}

TEST_CASE("finite differences validate every primitive in one composite graph") {
  Rng rng(7);
  Tensor w1 = random_tensor(rng, 4, 5);
  Tensor b1 = random_tensor(rng, 1, 5);
  Tensor w2 = random_tensor(rng, 5, 3);
  Tensor q = random_tensor(rng, 3, 3);
  Tensor x = random_tensor(rng, 6, 4, false);

  auto loss = [&](Tape& t) -> Tensor {
    Tensor h = t.tanh(t.add(t.matmul(x, w1), b1));        // matmul, add (bias), tanh
    Tensor a = t.softmax_rows(t.matmul(h, w2));            // softmax
    Tensor g = t.gather_rows(a, {0, 2, 2, 5});             // gather with a repeat
    Tensor s = t.sigmoid(t.matmul(g, t.transpose(q)));     // transpose
    Tensor r = t.relu(t.sub(s, t.scale(s, 0.5)));          // sub, scale, relu
    Tensor c = t.concat_cols(r, t.mul_elem(r, r));         // concat, mul_elem
    Tensor lg = t.log(t.clamp(c, 1e-6, 1.0));              // clamp, log
    return t.mean_scalar(t.sub(t.row_sum(c), t.row_sum(lg)));
  };

  auto params = std::vector<std::pair<std::string, Tensor>>{
      {"w1", w1}, {"b1", b1}, {"w2", w2}, {"q", q}};
  auto res = grad_check(params, loss);
  INFO("worst ", res.worst_param, " analytic ", res.analytic, " numeric ", res.numeric);
  CHECK(res.max_rel_err < 1e-5);
}

TEST_CASE("broadcast bias gradient is the column sum of the output gradient") {
  Tensor a = Tensor::from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  Tensor bias = Tensor::from_rows({{0.5, -0.5}}, true);
  Tape tape;
  Tensor loss = tape.mean_scalar(tape.add(a, bias));
  tape.backward(loss);
  CHECK(bias.grad()[0] == doctest::Approx(3.0 / 6.0).epsilon(1e-12));
  CHECK(bias.grad()[1] == doctest::Approx(3.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("two backward passes on a retained tape double leaf gradients") {
  Tensor x = Tensor::from_rows({{2.0}}, true);
  Tape tape;
  Tensor loss = tape.mean_scalar(tape.mul_elem(x, x));
  tape.backward(loss, /*clear=*/false);
  CHECK(x.grad()[0] == doctest::Approx(4.0));
  tape.backward(loss);
  CHECK(x.grad()[0] == doctest::Approx(8.0));
}

TEST_CASE("backward contract violations throw") {
  Tape tape;
  Tensor x = Tensor::from_rows({{1.0, 2.0}}, true);
  CHECK_THROWS_AS(tape.backward(x), ContractError);  // empty tape
  Tensor y = tape.sigmoid(x);
  CHECK_THROWS_AS(tape.backward(y), ContractError);  // non-scalar loss
}

TEST_CASE("values stay finite across the supported input range") {
  Tape tape;
  Tensor x = Tensor::zeros(1, 201, true);
  for (int i = 0; i <= 200; ++i) x.at(0, i) = -10.0 + 0.1 * i;
  Tensor y = tape.add(tape.sigmoid(x), tape.tanh(x));
  Tensor loss = tape.mean_scalar(tape.softmax_rows(y));
  CHECK(y.all_finite());
  tape.backward(loss);
  for (double g : x.grad()) CHECK(std::isfinite(g));
}
