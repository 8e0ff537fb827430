#include <doctest.h>

#include <numbers>

#include "sfode/errors.hpp"
#include "sfode/trig_poly.hpp"
#include "support.hpp"

using namespace sfode;
using namespace sfode::testing;

TEST_CASE("evaluate: constant and unit frequency") {
  const auto one = SparseTrigPoly::from_terms(1, {{{0}, 1.0}});
  const double x = 0.37;
  CHECK(one.evaluate(std::span<const double>(&x, 1)) == Complex(1.0));

  const auto p = SparseTrigPoly::from_terms(2, {{{1, 0}, 1.0}});
  const std::vector<double> pt{0.25, 0.7};
  const auto v = p.evaluate(pt);
  CHECK(v.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(v.imag() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate matches naive summation") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 3, 12, 5);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(rng, 3);
      CHECK(std::abs(p.evaluate(x) - naive_evaluate(p, x)) <= 1e-12);
    }
  }
}

TEST_CASE("evaluate rejects wrong dimension") {
  const auto p = SparseTrigPoly::from_terms(2, {{{1, 0}, 1.0}});
  const std::vector<double> x{0.1};
  CHECK_THROWS_AS(p.evaluate(x), ContractError);
}

TEST_CASE("duplicate frequencies are rejected") {
  CHECK_THROWS_AS(SparseTrigPoly::from_terms(1, {{{2}, 1.0}, {{2}, 3.0}}), ContractError);
}

TEST_CASE("evaluate_batch") {
  Rng rng(5);
  const auto p = random_poly(rng, 4, 10, 30);
  CHECK(p.evaluate_batch({}).empty());
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(random_point(rng, 4));
  const auto single = p.evaluate_batch({xs[0]});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == p.evaluate(xs[0]));
  for (unsigned workers : {1u, 4u}) {
    const auto batch = p.evaluate_batch(xs, workers);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(batch[i] == p.evaluate(xs[i]));
  }
}

TEST_CASE("antiderivative of a constant is linear") {
  const auto p = SparseTrigPoly::from_terms(1, {{{0}, 2.0}});
  const auto u = p.antiderivative_first_var();
  CHECK(u.oscillatory().empty());
  REQUIRE(u.linear().size() == 1);
  CHECK(u.linear().dim() == 0);
  CHECK(u.linear().coefficients()[0] == Complex(2.0));
  CHECK(u.evaluate(0.3, {}).real() == doctest::Approx(0.6));
}

TEST_CASE("antiderivative of 2 pi i e^{2 pi i x}") {
  const auto p = SparseTrigPoly::from_terms(1, {{{1}, Complex(0.0, kTwoPi)}});
  const auto u = p.antiderivative_first_var();
  REQUIRE(u.oscillatory().size() == 1);
  CHECK(std::abs(u.oscillatory().coefficients()[0] - Complex(1.0)) < 1e-15);
  for (double x : {0.0, 0.1, 0.45, 0.9}) CHECK(std::abs(u.evaluate(x, {}) - (unit_phase(x) - 1.0)) < 1e-14);
  CHECK(max_coefficient_error(u.derivative_first_var(), p) < 1e-14);
}

TEST_CASE("antiderivative linear part carries the trailing frequency") {
  const auto p = SparseTrigPoly::from_terms(2, {{{0, 3}, 5.0}});
  const auto u = p.antiderivative_first_var();
  CHECK(u.oscillatory().empty());
  REQUIRE(u.linear().size() == 1);
  CHECK(u.linear().frequencies()[0][0] == 3);
  const double y = 0.2, x = 0.4;
  CHECK(std::abs(u.evaluate(x, std::span<const double>(&y, 1)) - 5.0 * x * unit_phase(3 * y)) < 1e-14);
}

TEST_CASE("antiderivative properties on random polynomials") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 4;
    const auto p = random_poly(rng, d, 6, 1 + trial % 9);
    const auto u = p.antiderivative_first_var();
    // Differentiation undoes antidifferentiation.
    CHECK(max_coefficient_error(u.derivative_first_var(), p) <= 1e-12);
    // Vanishes at x = 0.
    const auto y = random_point(rng, d - 1);
    CHECK(u.evaluate(0.0, y) == Complex(0.0));
    // Fast evaluator agrees with the direct one.
    const FastEvaluator fast(u);
    std::vector<double> pt{rng.uniform01()};
    pt.insert(pt.end(), y.begin(), y.end());
    CHECK(std::abs(fast(pt) - u.evaluate(pt[0], y)) <= 1e-11);
  }
}

TEST_CASE("linearity of evaluation") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 3;
    const auto p = random_poly(rng, d, 5, 4);
    const auto q = random_poly(rng, d, 5, 4);
    const auto x = random_point(rng, d);
    CHECK(std::abs((p + q).evaluate(x) - (p.evaluate(x) + q.evaluate(x))) <= 1e-12);
  }
}

TEST_CASE("directional expansion") {
  CHECK(SparseTrigPoly(3).directional_expansion(0.0) == std::vector<int>{0, 0, 0});
  const auto p = SparseTrigPoly::from_terms(2, {{{3, -2}, 1.0}});
  CHECK(p.directional_expansion(0.0) == std::vector<int>{3, 2});
  CHECK(p.directional_expansion(2.0) == std::vector<int>{0, 0});
}

TEST_CASE("directional expansion is monotone in the floor") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_poly(rng, 3, 9, 12, 0.01, 10.0);
    const double f1 = rng.uniform(0.0, 5.0), f2 = f1 + rng.uniform(0.0, 5.0);
    const auto a = p.directional_expansion(f1), b = p.directional_expansion(f2);
    for (int j = 0; j < 3; ++j) CHECK(b[j] <= a[j]);
  }
}

TEST_CASE("fast evaluator matches plain evaluation") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 6;
    const auto p = random_poly(rng, d, 40, 60);
    const FastEvaluator fast(p);
    for (int i = 0; i < 20; ++i) {
      const auto x = random_point(rng, d);
      CHECK(std::abs(fast(x) - naive_evaluate(p, x)) <= 1e-10);
    }
  }
}

TEST_CASE("fixing trailing variables matches evaluation") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = static_cast<int>(rng.integer(1, 5));
    const auto p = testing::random_poly(rng, d, 30, 40);
    const int m = static_cast<int>(rng.integer(0, d));
    const auto x = testing::random_point(rng, d);
    const std::vector<double> head(x.begin(), x.end() - m), tail(x.end() - m, x.end());
    const auto q = p.fix_trailing(tail);
    REQUIRE(q.dim() == d - m);
    CHECK(std::abs(q.evaluate(head) - testing::naive_evaluate(p, x)) <= 1e-10);
  }
  CHECK_THROWS_AS(SparseTrigPoly(1).fix_trailing(std::vector<double>{0.1, 0.2}), ContractError);
}

TEST_CASE("antiderivative at a fixed first variable") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = testing::random_poly(rng, 3, 6, 40).antiderivative_first_var();
    const double x = rng.uniform01();
    const auto y = testing::random_point(rng, 2);
    CHECK(std::abs(u.at_first(x).evaluate(y) - u.evaluate(x, y)) <= 1e-10);
  }
}
