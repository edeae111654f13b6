#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/error.hpp"

using namespace smoothnorm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Functional point(double x) { return Functional{{x}}; }

double line_metric(const Functional& f, const Functional& g) {
  return std::abs(f.coords[0] - g.coords[0]);
}

// random l1-normalised functionals clustered around a few centres
std::vector<Functional> clustered(std::mt19937_64& rng, std::size_t dim, std::size_t centres,
                                  std::size_t per_centre, double jitter) {
  std::normal_distribution<double> g;
  std::vector<Functional> out;
  for (std::size_t c = 0; c < centres; ++c) {
    std::vector<double> centre(dim);
    for (double& v : centre) v = g(rng);
    for (std::size_t k = 0; k < per_centre; ++k) {
      Functional f{centre};
      double l1 = 0.0;
      for (double& v : f.coords) {
        v += jitter * g(rng);
        l1 += std::abs(v);
      }
      for (double& v : f.coords) v /= l1;
      out.push_back(std::move(f));
    }
  }
  return out;
}

Decomposition random_decomposition(std::mt19937_64& rng, std::size_t pieces, double eps) {
  std::vector<Piece> ps;
  for (std::size_t n = 0; n < pieces; ++n) {
    Piece p;
    p.members = clustered(rng, 4, 3, 6, 1e-5);
    ps.push_back(std::move(p));
  }
  return Decomposition(ModelSpace::sup(4), std::move(ps), eps);
}

}  // namespace

TEST_CASE("psi values", "[boundary][psi]") {
  const std::vector<std::size_t> i0{0}, i01{0, 1}, i1{1};
  CHECK(psi_from_indices(0.1, i0) == 1.0625);
  CHECK_THAT(psi_from_indices(0.1, i01), WithinRel(1.06875, 1e-15));
  CHECK_THAT(psi_from_indices(0.1, i1), WithinRel(1.028125, 1e-15));
  CHECK_THROWS_AS(psi_from_indices(0.1, std::vector<std::size_t>{}), ParameterError);
}

TEST_CASE("psi through a decomposition and closure oracle", "[boundary][psi]") {
  Piece a = coordinate_piece(2);
  Piece b;
  b.members = {Functional{{0.5, 0.5}}};
  ClosureOracle oracle;
  oracle.set({0, 1}, {1});
  oracle.set({1, 0}, {});
  const Decomposition d(ModelSpace::sup(2), {a, b}, 0.1, oracle);
  CHECK(psi(d, {0, 0}) == 1.0625);
  CHECK_THAT(psi(d, {0, 1}), WithinRel(1.06875, 1e-15));
  CHECK_THAT(psi(d, {1, 0}), WithinRel(1.028125, 1e-15));
  CHECK(d.oracle().indices({0, 1}) == std::vector<std::size_t>{0, 1});
  CHECK(d.oracle().indices({1, 0}) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(psi(d, {2, 0}), ParameterError);
  CHECK_THROWS_AS(psi(d, {1, 1}), ParameterError);
}

TEST_CASE("epsilon_n schedule", "[boundary]") {
  CHECK_THAT(epsilon_n(0.96, 0), WithinRel(0.01, 1e-15));
  CHECK_THAT(epsilon_n(0.96, 1), WithinRel(0.0025, 1e-15));
  for (double eps : {0.1, 0.37, 0.9})
    for (std::size_t n = 0; n < 8; ++n)
      CHECK_THAT(epsilon_n(eps, n), WithinRel(4.0 * epsilon_n(eps, n + 1), 1e-15));
}

TEST_CASE("psi binning examples", "[boundary][bins]") {
  const auto single = bin_by_value(std::vector<double>{1.05, 1.05, 1.05}, 0.01);
  REQUIRE(single.size() == 1);
  CHECK(single[0].members.size() == 3);

  const auto split = bin_by_value(std::vector<double>{1.05, 1.0611}, 0.01);
  CHECK(split.size() == 2);

  const auto bins = bin_by_value(std::vector<double>{1.010, 1.0101, 1.03}, 0.01);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].members == std::vector<std::size_t>{0, 1});
  CHECK(bins[1].members == std::vector<std::size_t>{2});
  CHECK(bins[0].id == 1);
  CHECK(bins[1].id == 3);

  CHECK_THROWS_AS(bin_by_value(std::vector<double>{1.0}, 0.0), ParameterError);
}

TEST_CASE("bins have small psi diameter", "[boundary][bins][property]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(1.0, 1.1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values(50);
    for (double& v : values) v = u(rng);
    const double width = 0.001 + 0.01 * u(rng);
    for (const auto& bin : bin_by_value(values, width)) {
      double lo = 2.0, hi = 0.0;
      for (std::size_t m : bin.members) {
        lo = std::min(lo, values[m]);
        hi = std::max(hi, values[m]);
      }
      CHECK(hi - lo <= width);
    }
  }
}

TEST_CASE("greedy net examples", "[boundary][net]") {
  const std::vector<Functional> line{point(0.0), point(0.5), point(1.2)};
  CHECK(greedy_net(line, 0.6, line_metric) == std::vector<std::size_t>{0, 2});

  // brute force over all subsets: the greedy output is one of the maximal separated sets
  std::vector<unsigned> maximal_sets;
  for (unsigned mask = 1; mask < 8; ++mask) {
    bool separated = true;
    for (unsigned i = 0; i < 3; ++i)
      for (unsigned j = i + 1; j < 3; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && line_metric(line[i], line[j]) < 0.6)
          separated = false;
    if (!separated) continue;
    bool maximal = true;
    for (unsigned k = 0; k < 3; ++k) {
      if (mask >> k & 1) continue;
      bool far = true;
      for (unsigned i = 0; i < 3; ++i)
        if ((mask >> i & 1) && line_metric(line[i], line[k]) < 0.6) far = false;
      if (far) maximal = false;
    }
    if (maximal) maximal_sets.push_back(mask);
  }
  CHECK(maximal_sets == std::vector<unsigned>{0b101, 0b110});

  CHECK(greedy_net({point(3.0)}, 0.6, line_metric) == std::vector<std::size_t>{0});
  const std::vector<Functional> spread{point(0.0), point(1.0), point(2.0)};
  CHECK(greedy_net(spread, 0.6, line_metric) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(greedy_net(spread, 0.0, line_metric), ParameterError);
}

TEST_CASE("greedy nets are separated, maximal and stable", "[boundary][net][property]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Functional> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(point(u(rng)));
    const double sep = 0.2 + u(rng) / 5.0;
    const auto kept = greedy_net(pts, sep, line_metric);
    for (std::size_t a = 0; a < kept.size(); ++a)
      for (std::size_t b = a + 1; b < kept.size(); ++b)
        CHECK(line_metric(pts[kept[a]], pts[kept[b]]) >= sep);
    for (const auto& p : pts) {
      bool covered = false;
      for (std::size_t k : kept) covered = covered || line_metric(p, pts[k]) < sep || &p == &pts[k];
      CHECK(covered);
    }
    auto extended = pts;
    for (std::size_t k : kept) extended.push_back(point(pts[k].coords[0] + 0.5 * sep));
    CHECK(greedy_net(extended, sep, line_metric) == kept);
  }
}

TEST_CASE("build_net examples", "[boundary][net]") {
  const Decomposition coord(ModelSpace::sup(2), {coordinate_piece(2)}, 0.1);
  const auto net = build_net(coord);
  CHECK(net.size() == 4);
  CHECK(net.metric_exact());
  for (std::size_t m = 0; m < 4; ++m) CHECK(net.lookup({0, m}) == m);
  CHECK(net.points()[0].psi == 1.0625);
  CHECK_THAT(net.points()[0].theta, WithinRel(1.0625 - 0.1 / 96, 1e-15));

  std::vector<Piece> singletons(3);
  singletons[0].members = {Functional{{1.0, 0.0}}};
  singletons[1].members = {Functional{{0.0, -1.0}}};
  singletons[2].members = {Functional{{0.5, 0.5}}};
  const auto sn = build_net(Decomposition(ModelSpace::sup(2), singletons, 0.2));
  REQUIRE(sn.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(sn.lookup({n, 0}) == n);
    CHECK(sn.net_of_piece(n) == std::vector<std::size_t>{n});
  }

  Piece dup;
  dup.members = {Functional{{1.0, 0.0}}, Functional{{1.0, 0.0}}};
  const Decomposition dd(ModelSpace::sup(2), {dup}, 0.1);
  const auto dn = build_net(dd);
  REQUIRE(dn.size() == 1);
  CHECK(dn.lookup({0, 1}) == 0);
  CHECK(verify_net(dd, dn).max_lookup_distance == 0.0);
}

TEST_CASE("decomposition validation", "[boundary][errors]") {
  const auto sup2 = ModelSpace::sup(2);
  Piece big;
  big.members = {Functional{{1.0, 0.5}}};
  CHECK_THROWS_AS(Decomposition(sup2, {big}, 0.1), ParameterError);
  CHECK_THROWS_AS(Decomposition(sup2, {coordinate_piece(2), coordinate_piece(2)}, 0.1),
                  ParameterError);
  CHECK_THROWS_AS(Decomposition(sup2, {coordinate_piece(2)}, 0.0), ParameterError);
  CHECK_THROWS_AS(Decomposition(sup2, {coordinate_piece(2)}, 1.0), ParameterError);
  CHECK_THROWS_AS(Decomposition(sup2, {coordinate_piece(3)}, 0.1), ParameterError);
  ClosureOracle bad;
  bad.set({0, 0}, {4});
  CHECK_THROWS_AS(Decomposition(sup2, {coordinate_piece(2)}, 0.1, bad), ParameterError);
}

TEST_CASE("nets satisfy separation and property one", "[boundary][net][property]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_decomposition(rng, 1 + trial % 4, 0.05 + 0.04 * (trial % 5));
    const auto net = build_net(d);
    const auto check = verify_net(d, net);
    CHECK(check.pass());
    CHECK(check.metric_exact);
    CHECK(check.min_theta > 1.0);
    CHECK(net.size() < d.size());
    for (const auto& p : net.points()) {
      CHECK(p.psi > 1.0);
      CHECK(p.psi <= 1.0 + 0.75 * d.epsilon());
      CHECK(p.theta < p.psi);
      CHECK(d.at(p.source) == p.functional);
    }
    // psi depends only on the piece when the oracle is trivial
    for (std::size_t n = 0; n < d.pieces().size(); ++n)
      for (std::size_t m = 1; m < d.pieces()[n].members.size(); ++m)
        CHECK(psi(d, {n, m}) == psi(d, {n, 0}));
  }
}

TEST_CASE("psi stays in range with nontrivial closures", "[boundary][psi][property]") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 12; ++i)
      if (rng() % 3 == 0) idx.push_back(i);
    if (idx.empty()) idx.push_back(rng() % 12);
    const double eps = 0.01 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    const double v = psi_from_indices(eps, idx);
    CHECK(v > 1.0);
    CHECK(v <= 1.0 + 0.75 * eps);
  }
}

TEST_CASE("boundary check examples", "[boundary][check]") {
  const auto sup2 = ModelSpace::sup(2);
  const auto e = coordinate_piece(2).members;  // +e1, -e1, +e2, -e2
  const auto r = check_boundary(sup2, e, {{1.0, 0.5}, {0.6, -1.0}, {1.0, 1.0}}, 1e-12);
  CHECK(r.pass());
  CHECK(r.best_index[0] == 0);
  CHECK(r.best_index[1] == 3);
  CHECK((r.best_index[2] == 0 || r.best_index[2] == 2));
  CHECK(r.worst_gap == 0.0);

  const auto miss = check_boundary(sup2, {e[0], e[1]}, {{0.5, 1.0}}, 1e-12);
  CHECK(!miss.pass());
  CHECK(miss.best_value[0] == 0.5);
  CHECK_THROWS_AS(check_boundary(sup2, e, {{2.0, 0.0}}, 1e-9), ParameterError);
}

TEST_CASE("lrc criterion examples", "[boundary][lrc]") {
  CHECK(check_lrc_criterion(coordinate_piece(3)));
  Piece mixed;
  mixed.members = {Functional{{1.0, 0.0}}, Functional{{0.5, 0.5}}};
  CHECK(!check_lrc_criterion(mixed));
  CHECK(check_lrc_criterion(Piece{}));
}
