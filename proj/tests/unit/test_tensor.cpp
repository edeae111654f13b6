#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "smoothnorm/error.hpp"
#include "smoothnorm/tensor.hpp"

using namespace smoothnorm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vector gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

TensorElement random_tensor(std::mt19937_64& rng, const ModelSpace& x, const ModelSpace& y) {
  return TensorElement(x, y, gaussian(rng, x.dim() * y.dim()));
}

double double_sum(const Functional& f, const Functional& g, const TensorElement& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) s += f.coords[i] * g.coords[j] * u(i, j);
  return s;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// sup over a fine grid of unit g in R^2 of ||g^X(u)||_X
double circle_grid_norm(const TensorElement& u, std::size_t steps) {
  double best = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(steps);
    const Functional g{{std::cos(a), std::sin(a)}};
    best = std::max(best, u.x_space().norm(apply_gX(g, u)));
  }
  return best;
}

std::vector<ModelSpace> x_spaces() {
  return {ModelSpace::sup(3), ModelSpace::lorentz_predual({1.0, 0.5, 0.25, 0.125}),
          ModelSpace::lorentz({1.0, 0.7, 0.3}),
          ModelSpace::polyhedral(2, {Functional{{1.0, 0.5}}, Functional{{-0.3, 1.0}}})};
}

}  // namespace

TEST_CASE("slice operator examples", "[tensor]") {
  const auto X = ModelSpace::sup(2);
  const auto Y = ModelSpace::euclidean(2);
  const auto e11 = TensorElement::rank_one(X, Y, {1, 0}, {1, 0});
  CHECK(apply_fY(Functional{{1, 0}}, e11) == Vector{1, 0});
  CHECK(apply_gX(Functional{{1, 0}}, e11) == Vector{1, 0});

  const TensorElement id(X, Y, {1, 0, 0, 1});
  CHECK(apply_fY(Functional{{0.3, -2}}, id) == Vector{0.3, -2});
  CHECK(apply_gX(Functional{{0.3, -2}}, id) == Vector{0.3, -2});

  CHECK_THROWS_AS(apply_fY(Functional{{1, 0, 0}}, id), ParameterError);
  CHECK_THROWS_AS(apply_gX(Functional{{1}}, id), ParameterError);
  CHECK_THROWS_AS(TensorElement(X, Y, {1, 0, 0}), ParameterError);
}

TEST_CASE("three-way identity and bilinearity", "[tensor][property]") {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 500; ++s) {
    const auto X = ModelSpace::sup(1 + rng() % 5);
    const auto Y = ModelSpace::euclidean(1 + rng() % 4);
    const auto u = random_tensor(rng, X, Y);
    const auto v = random_tensor(rng, X, Y);
    const Functional f{gaussian(rng, X.dim())};
    const Functional g{gaussian(rng, Y.dim())};
    const double oracle = double_sum(f, g, u);
    CHECK_THAT(apply_pair(f, g, u), WithinAbs(oracle, 1e-12));
    CHECK_THAT(dot(g.coords, apply_fY(f, u)), WithinAbs(oracle, 1e-12));
    CHECK_THAT(dot(f.coords, apply_gX(g, u)), WithinAbs(oracle, 1e-12));

    const double a = 1.7, b = -0.4;
    const auto w = u.scaled(a).plus(v.scaled(b));
    CHECK_THAT(apply_pair(f, g, w), WithinAbs(a * oracle + b * double_sum(f, g, v), 1e-12));
  }
}

TEST_CASE("injective norm examples", "[tensor][injective]") {
  const auto X = ModelSpace::sup(2);
  const auto Y = ModelSpace::euclidean(2);
  const TensorElement id(X, Y, {1, 0, 0, 1});
  const auto n = injective_norm(id, InjectiveStrategy::enumerate);
  CHECK(n.value == 1.0);
  CHECK(n.exact);
  CHECK(n.f.coords == std::vector<double>{1, 0});
  CHECK_THAT(apply_pair(n.f, n.g, id), WithinAbs(1.0, 1e-15));

  const auto r1 = TensorElement::rank_one(X, Y, {0.5, -2}, {3, 4});
  CHECK_THAT(injective_norm(r1).value, WithinRel(2.0 * 5.0, 1e-12));

  const TensorElement zero(X, Y, {0, 0, 0, 0});
  CHECK(injective_norm(zero).value == 0.0);
  CHECK(injective_norm(zero, InjectiveStrategy::sample_ascent).value == 0.0);

  const auto hm = ModelSpace::orlicz_hm(2, PowerFunction{3.0});
  CHECK_THROWS_AS(injective_norm(TensorElement(hm, Y, {1, 0, 0, 1}), InjectiveStrategy::enumerate),
                  ParameterError);
}

TEST_CASE("enumerated injective norm matches row norms and a grid oracle", "[tensor][injective]") {
  std::mt19937_64 rng(5);
  const auto Y = ModelSpace::euclidean(2);
  for (int s = 0; s < 50; ++s) {
    const auto X = ModelSpace::sup(3);
    const auto u = random_tensor(rng, X, Y);
    double rows = 0.0;
    for (std::size_t i = 0; i < 3; ++i) rows = std::max(rows, std::hypot(u(i, 0), u(i, 1)));
    CHECK_THAT(injective_norm(u, InjectiveStrategy::enumerate).value, WithinRel(rows, 1e-14));
  }
  for (const auto& X : x_spaces()) {
    INFO(X.describe());
    for (int s = 0; s < 10; ++s) {
      const auto u = random_tensor(rng, X, Y);
      const double exact = injective_norm(u, InjectiveStrategy::enumerate).value;
      const double grid = circle_grid_norm(u, 20000);
      CHECK(exact >= grid - 1e-12);
      CHECK(exact <= grid * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("injective norm is a cross norm", "[tensor][injective][property]") {
  std::mt19937_64 rng(7);
  for (const auto& X : x_spaces()) {
    for (std::size_t ydim : {1, 2, 3}) {
      const auto Y = ModelSpace::euclidean(ydim);
      for (int s = 0; s < 50; ++s) {
        const auto x = gaussian(rng, X.dim());
        const auto y = gaussian(rng, ydim);
        const auto u = TensorElement::rank_one(X, Y, x, y);
        CHECK_THAT(injective_norm(u).value, WithinRel(X.norm(x) * Y.norm(y), 1e-9));
      }
    }
  }
}

TEST_CASE("ascent never exceeds enumeration", "[tensor][injective][property]") {
  std::mt19937_64 rng(9);
  for (const auto& X : x_spaces()) {
    const auto Y = ModelSpace::euclidean(3);
    for (int s = 0; s < 20; ++s) {
      const auto u = random_tensor(rng, X, Y);
      const auto en = injective_norm(u, InjectiveStrategy::enumerate);
      const auto asc = injective_norm(u, InjectiveStrategy::sample_ascent);
      CHECK(!asc.exact);
      CHECK(asc.value <= en.value + 1e-12);
      CHECK(asc.value >= 0.99 * en.value);
    }
  }
}

TEST_CASE("slices are bounded by the injective norm", "[tensor][property]") {
  std::mt19937_64 rng(11);
  for (const auto& X : x_spaces()) {
    const auto Y = ModelSpace::euclidean(2);
    for (int s = 0; s < 100; ++s) {
      const auto u = random_tensor(rng, X, Y);
      const Functional f{gaussian(rng, X.dim())};
      const auto dn = X.dual_norm(f.coords);
      if (!dn.exact) continue;
      CHECK(Y.norm(apply_fY(f, u)) <= dn.value * injective_norm(u).value * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("extreme dual points lie on the dual sphere", "[tensor]") {
  for (const auto& X : x_spaces()) {
    INFO(X.describe());
    REQUIRE(has_enumerable_dual(X));
    for (const auto& f : extreme_dual_points(X)) {
      const auto dn = X.dual_norm(f.coords);
      if (dn.exact) CHECK_THAT(dn.value, WithinAbs(1.0, 1e-12));
    }
  }
  CHECK(!has_enumerable_dual(ModelSpace::euclidean(2)));
  CHECK_THROWS_AS(extreme_dual_points(ModelSpace::euclidean(2)), ParameterError);
}

TEST_CASE("boundary of the product examples", "[tensor][product]") {
  const auto X = ModelSpace::sup(2);
  const auto Y = ModelSpace::euclidean(2);
  const auto N = extreme_dual_points(X);

  std::mt19937_64 rng(1);
  std::vector<Functional> M;
  for (int k = 0; k < 10000; ++k) {
    auto v = gaussian(rng, 2);
    const double n = std::hypot(v[0], v[1]);
    M.push_back(Functional{{v[0] / n, v[1] / n}});
  }
  const TensorElement id(X, Y, {1, 0, 0, 1});
  const auto r = boundary_product_check(N, M, {id}, 1e-4);
  CHECK(r.pass());
  CHECK(r.worst_gap <= 1e-4);
  CHECK(r.rows[0].two_step <= r.rows[0].brute_max);

  const auto e11 = TensorElement::rank_one(X, Y, {1, 0}, {1, 0});
  const std::vector<Functional> exact_m{Functional{{1, 0}}, Functional{{0, 1}}};
  const auto re = boundary_product_check(N, exact_m, {e11}, 1e-12);
  CHECK(re.pass());
  CHECK(re.rows[0].two_step == 1.0);

  // rank one: attained by the norming pair of the factors
  const Vector x{0.4, -1.0}, y{0.6, 0.8};
  const auto xy = TensorElement::rank_one(X, Y, x, y);
  const auto gy = Y.norming_functional(y);
  const auto fx = X.norming_functional(x);
  const std::vector<Functional> m2{Functional{{0, 1}}, gy, Functional{{-gy.coords[0], -gy.coords[1]}}};
  const auto rr = boundary_product_check(N, m2, {xy}, 1e-12);
  CHECK(rr.pass());
  const auto& fhat = N[rr.rows[0].f_index];
  CHECK((fhat == fx || fhat == Functional{{-fx.coords[0], -fx.coords[1]}}));
  CHECK(rr.rows[0].g_index >= 1);

  CHECK_THROWS_AS(boundary_product_check(N, M, {id.scaled(2.0)}, 1e-6), ParameterError);
  CHECK_THROWS_AS(boundary_product_check({}, M, {id}, 1e-6), ParameterError);
}

TEST_CASE("two-step attainment on random unit tensors", "[tensor][product][property]") {
  std::mt19937_64 rng(21);
  const auto Y = ModelSpace::euclidean(2);
  std::vector<Functional> M;
  for (int k = 0; k < 4096; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 4096.0;
    M.push_back(Functional{{std::cos(a), std::sin(a)}});
  }
  for (const auto& X : x_spaces()) {
    const auto N = extreme_dual_points(X);
    std::vector<TensorElement> samples;
    for (int s = 0; s < 50; ++s) {
      const auto u = random_tensor(rng, X, Y);
      samples.push_back(u.scaled(1.0 / injective_norm(u).value));
    }
    const auto r = boundary_product_check(N, M, samples, 1e-5);
    CHECK(r.pass());
    CHECK(r.norms_exact);
    for (const auto& row : r.rows) CHECK(row.brute_max <= 1.0 + 1e-12);
  }
}
