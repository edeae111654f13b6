// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance CONFIG
//
// CONFIG is the run configuration used for the determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/cli.hpp"
#include "smoothnorm/equiv.hpp"
#include "smoothnorm/orlicz.hpp"
#include "smoothnorm/renorm.hpp"
#include "smoothnorm/sampling.hpp"
#include "smoothnorm/spaces.hpp"
#include "smoothnorm/tensor.hpp"

using namespace smoothnorm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Vector gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double p_norm(const Vector& x, double p) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

// max over disjoint selections B_n subset of A_n of sum_n sum_{k in B_n} |z_k|^{p_n}
double lap_modular_brute(const ModelSpace& space, const Vector& z) {
  const std::size_t d = z.size();
  std::vector<std::vector<int>> options(d, std::vector<int>{-1});
  for (std::size_t n = 0; n < space.blocks().size(); ++n)
    for (std::size_t k : space.blocks()[n]) options[k].push_back(static_cast<int>(n));
  std::vector<int> choice(d, -1);
  double best = 0.0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == d) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        if (choice[i] >= 0 && z[i] != 0.0) s += std::pow(std::abs(z[i]), space.exponents()[choice[i]]);
      best = std::max(best, s);
      return;
    }
    for (int o : options[k]) {
      choice[k] = o;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

PhiNormSpec sup_spec(std::size_t dim) {
  const auto X = ModelSpace::sup(dim);
  return build_renorm(X, Decomposition(X, {coordinate_piece(dim)}, 0.1), ModelSpace::scalar());
}

// approximation, strictness, ridge smoothness and local dependence on one spec
Outcome renorm_checks(const PhiNormSpec& spec, std::size_t samples, std::uint64_t seed) {
  const auto elems = random_elements(spec, samples, seed);
  const auto approx = check_approximation(spec, elems, 1e-9);
  const double eps = spec.epsilon();
  const bool ratio_ok = approx.min_ratio > 1.0 && approx.max_ratio <= (1.0 + eps) * (1.0 + 1e-9);

  const std::size_t n = spec.x_space().dim() * spec.y_space().dim();
  Vector x(n, 0.0), dir(n, 0.0);
  x[0] = x[1] = 1.0;
  dir[0] = 1.0;
  dir[1] = -1.0;
  const NormFunction phi = [&](std::span<const double> v) { return phi_norm(spec, v); };
  Vector generic(n);
  for (std::size_t i = 0; i < n; ++i) generic[i] = 1.0 + static_cast<double>(i);
  const auto sm = smoothness_check(phi, x, {dir, generic}, {1e-4, 1e-5});

  const auto points = random_elements(spec, 100, seed, 1);
  const auto local = check_local_dependence(spec, points, 20, seed);

  Outcome o;
  o.pass = approx.pass() && ratio_ok && !sm.kink() && sm.max_richardson() <= 1e-5 && local.pass();
  o.detail = fmt("ratio in [%.12f, %.12f], min gap %.3g, richardson %.2g, min margin %.3g, leaked %zu",
                 approx.min_ratio, approx.max_ratio, approx.min_gap, sm.max_richardson(),
                 local.min_margin, local.total_leaked);
  return o;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (double p : {1.0, 2.0, 4.0}) {
    for (int s = 0; s < 1000; ++s) {
      const std::size_t dim = 1 + rng() % 16;
      const auto x = gaussian(rng, dim);
      const auto fam = OrliczFamily::constant(PowerFunction{p}, dim);
      const double expected = p_norm(x, p);
      worst = std::max(worst, std::abs(luxemburg_norm(fam, x) - expected) / expected);
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5.0, fmt("max rel err %.3g, %.2f s", worst, secs)};
}

Outcome criterion2() {
  std::mt19937_64 rng(102);
  std::size_t violations = 0, total = 0;
  for (auto [alpha, beta] : {std::pair{0.5, 1.0}, {1.0, 2.0}, {0.9, 0.95}, {1.0 / 1.0625, 1.0}}) {
    const std::size_t dim = 6;
    const auto fam = OrliczFamily::constant(make_orlicz(alpha, beta), dim);
    std::vector<std::vector<double>> samples;
    for (int s = 0; s < 1000; ++s) {
      auto x = gaussian(rng, dim);
      const double scale = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
      for (double& v : x) v *= scale;
      samples.push_back(x);
    }
    const auto r = check_lemma1_bounds(fam, alpha, beta, samples);
    violations += r.violations.size();
    total += r.samples.size();
  }
  return {violations == 0, fmt("%zu violations over %zu samples", violations, total)};
}

Outcome criterion3() {
  const double e0 = epsilon_n(0.96, 0);
  const std::size_t zero = 0;
  const double p = psi_from_indices(0.1, std::span<const std::size_t>(&zero, 1));
  const auto X = ModelSpace::sup(2);
  const Decomposition d(X, {coordinate_piece(2)}, 0.1);
  const double pd = psi(d, {0, 0});
  return {e0 == 0.01 && p == 1.0625 && pd == 1.0625,
          fmt("epsilon_n(0.96, 0) = %.17g, psi = %.17g", e0, p)};
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  const auto spec = sup_spec(5);
  const auto elems = random_elements(spec, 1000, 104);
  const auto r = check_approximation(spec, elems, 1e-9);
  const double secs = seconds_since(t0);
  const bool ok = r.pass() && r.min_ratio > 1.0 && r.max_ratio <= 1.1 * (1.0 + 1e-9) && secs < 30.0;
  return {ok, fmt("ratio in [%.12f, %.12f], min gap %.3g, %.2f s", r.min_ratio, r.max_ratio,
                  r.min_gap, secs)};
}

Outcome criterion5() {
  const auto X = ModelSpace::sup(3);
  const auto spec = sup_spec(3);
  const Vector x{1.0, 1.0, 0.0};
  const Vector dir{1.0, -1.0, 0.0};
  const NormFunction base = [&](std::span<const double> v) { return X.norm(v); };
  const NormFunction phi = [&](std::span<const double> v) { return phi_norm(spec, v); };
  const std::vector<double> steps{1e-3, 1e-4};
  const auto rb = smoothness_check(base, x, {dir}, steps);
  // off-ridge directions give the gradient check something to measure
  const auto rp = smoothness_check(phi, x, {dir, {1.0, 0.0, 0.0}, {1.0, 2.0, 3.0}}, steps);

  bool base_ok = rb.kink();
  for (const auto& row : rb.directions[0].rows)
    base_ok = base_ok && std::abs(row.second * row.step / 2.0 - 1.0) <= 0.01;
  // a kink makes second differences scale like 1/h; here they must settle instead
  const double s0 = std::abs(rp.directions[0].rows[0].second);
  const double s1 = std::abs(rp.directions[0].rows[1].second);
  const double s2 = std::abs(smoothness_check(phi, x, {dir}, {1e-5}).directions[0].rows[0].second);
  const bool bounded = s1 < std::sqrt(10.0) * s0 && std::abs(s2 - s1) <= 0.05 * s1;
  const bool phi_ok = !rp.kink() && bounded && rp.max_richardson() <= 1e-5;
  return {base_ok && phi_ok,
          fmt("base second diffs %.6g, %.6g (kink %d); phi second diffs %.4g, %.4g, %.4g at h=1e-5, richardson %.2g (kink %d)",
              rb.directions[0].rows[0].second, rb.directions[0].rows[1].second, rb.kink(), s0, s1,
              s2, rp.max_richardson(), rp.kink())};
}

Outcome criterion6() {
  const auto spec = sup_spec(5);
  const auto points = random_elements(spec, 100, 106);
  const auto r = check_local_dependence(spec, points, 20, 106);
  return {r.pass() && r.rows.size() == 100,
          fmt("min margin %.4g, leaked %zu over %zu points", r.min_margin, r.total_leaked, r.rows.size())};
}

Outcome criterion7() {
  const auto spec = sup_spec(5);
  const Functional g{{1.0}};
  bool ok = true;
  double slack = 1e300;
  for (std::size_t k = 0; k < spec.net().size(); ++k) {
    const auto r = verify_claim2d(spec, k, g, {10000, 107}, 1e-7);
    ok = ok && r.pass && r.samples == 10000;
    slack = std::min(slack, r.bound - r.max_value);
  }
  return {ok, fmt("%zu net points, min slack %.4g", spec.net().size(), slack)};
}

Outcome criterion8() {
  const auto X = ModelSpace::sup(3);
  const auto Y = ModelSpace::euclidean(2);
  std::mt19937_64 rng(108);
  double identity = 0.0;
  bool enum_exact = true;
  std::vector<TensorElement> unit;
  for (int s = 0; s < 200; ++s) {
    const TensorElement u(X, Y, gaussian(rng, 6));
    const Functional f{gaussian(rng, 3)};
    const Functional g{gaussian(rng, 2)};
    const double direct = apply_pair(f, g, u);
    identity = std::max(identity, std::abs(direct - g(apply_fY(f, u))));
    identity = std::max(identity, std::abs(direct - f(apply_gX(g, u))));
    double rows = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      Functional e{{0.0, 0.0, 0.0}};
      for (double sign : {1.0, -1.0}) {
        e.coords[i] = sign;
        rows = std::max(rows, Y.norm(apply_fY(e, u)));
      }
    }
    const auto inj = injective_norm(u, InjectiveStrategy::enumerate);
    enum_exact = enum_exact && inj.value == rows;
    unit.push_back(u.scaled(1.0 / inj.value));
  }
  const auto n_set = extreme_dual_points(X);
  std::vector<Functional> m_set{Functional{{1, 0}}, Functional{{-1, 0}}, Functional{{0, 1}},
                                Functional{{0, -1}}};
  for (const auto& y : sphere_samples(Y, 4000, 108)) m_set.push_back(Functional{y});
  const auto sampled = boundary_product_check(n_set, m_set, unit, 1e-4);

  std::vector<TensorElement> rank_one;
  for (std::size_t s = 0; s < 50; ++s) {
    Vector x = gaussian(rng, 3);
    const double n = X.norm(x);
    for (double& v : x) v /= n;
    Vector y{0.0, 0.0};
    y[s % 2] = s % 4 < 2 ? 1.0 : -1.0;
    rank_one.push_back(TensorElement::rank_one(X, Y, x, y));
  }
  const auto exact = boundary_product_check(n_set, m_set, rank_one, 0.0);
  return {identity <= 1e-12 && enum_exact && sampled.pass() && exact.pass(),
          fmt("identity err %.3g, enumerate exact %d, sampled gap %.3g, rank-one gap %.3g",
              identity, enum_exact, sampled.worst_gap, exact.worst_gap)};
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t dim : {4u, 6u}) {
    std::vector<double> w(dim);
    for (std::size_t k = 0; k < dim; ++k) w[k] = std::pow(0.5, static_cast<double>(k));
    const auto X = ModelSpace::lorentz_predual(w);
    std::mt19937_64 rng(109 + dim);
    double worst = 0.0;
    std::size_t found = 0;
    for (int s = 0; s < 500; ++s) {
      auto y = gaussian(rng, dim);
      const double n = X.norm(y);
      for (double& v : y) v /= n;
      const auto sigma = find_norming_support(X, y, 1e-9);
      if (!sigma) continue;
      ++found;
      worst = std::max(worst, std::abs(X.norm(proj(y, *sigma)) - 1.0));
    }
    ok = ok && found == 500 && worst <= 1e-9;

    PipelineOptions popts;
    popts.route = PipelineRoute::norming_support;
    const auto sphere = sphere_samples(X, 500, 109);
    const auto pr = corollary_b_pipeline(X, sphere, 0.1, ModelSpace::scalar(), popts);
    const auto rc = renorm_checks(pr.spec, 1000, 109);
    ok = ok && pr.supports_found == 500 && rc.pass;
    detail << "|A|=" << dim << ": supports " << found << "/500, max gap " << worst << ", "
           << rc.detail << "; ";
  }
  const double secs = seconds_since(t0);
  detail << fmt("%.2f s", secs);
  return {ok && secs < 60.0, detail.str()};
}

Outcome criterion10() {
  std::mt19937_64 rng(110);
  double worst = 0.0;
  bool attained = true, lrc = true;
  std::size_t configs = 0;
  std::vector<ModelSpace> spaces{ModelSpace::sup(4), ModelSpace::lorentz_predual({1.0, 0.5, 0.25, 0.125}),
                                 ModelSpace::lorentz({1.0, 0.6, 0.3, 0.2}),
                                 ModelSpace::lorentz_predual({1.0, 0.7, 0.4})};
  while (configs < 100) {
    const auto& space = spaces[configs % spaces.size()];
    const std::size_t n = 1 + rng() % space.dim();
    const auto samples = sphere_samples(space, 40, rng());
    const double bn = compute_bn(support_ball(space, n).members, samples);
    const double cn = compute_cn(space, samples, n);
    worst = std::max(worst, std::abs(bn - cn));
    ++configs;
  }
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    const auto built = build_F(build_chain(spaces[k], sphere_samples(spaces[k], 200, 110 + k)));
    attained = attained && built.attained;
    for (const auto& p : built.pieces) lrc = lrc && check_lrc_criterion(p);
  }
  return {worst <= 1e-9 && attained && lrc,
          fmt("%zu configurations, max |b_n - c_n| %.3g, attained %d, lrc %d", configs, worst,
              attained, lrc)};
}

Outcome criterion11() {
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> pu(1.0, 4.0);
  std::size_t mismatches = 0, total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 6;
    const std::size_t nblocks = 1 + rng() % std::min<std::size_t>(3, d);
    std::vector<std::vector<std::size_t>> blocks(nblocks);
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<bool> in(nblocks, false);
      in[k < nblocks ? k : rng() % nblocks] = true;
      for (std::size_t b = 0; b < nblocks; ++b)
        if (rng() % 3 == 0) in[b] = true;
      for (std::size_t b = 0; b < nblocks; ++b)
        if (in[b]) blocks[b].push_back(k);
    }
    std::vector<double> p(nblocks);
    for (double& e : p) e = pu(rng);
    std::sort(p.begin(), p.end());
    const auto space = ModelSpace::lap(d, blocks, p);
    for (int s = 0; s < 10; ++s) {
      const auto z = gaussian(rng, d);
      if (lap_modular(space, z) != lap_modular_brute(space, z)) ++mismatches;
      ++total;
    }
  }
  return {mismatches == 0 && total == 200, fmt("%zu mismatches over %zu vectors", mismatches, total)};
}

Outcome criterion12(const std::string& config_path) {
  const auto config = load_config(config_path);
  const auto a = run_suites(config, {});
  const auto b = run_suites(config, {});
  bool tables = a.tables.size() == b.tables.size();
  for (std::size_t i = 0; tables && i < a.tables.size(); ++i)
    tables = a.tables[i].csv == b.tables[i].csv;
  return {a.report == b.report && tables && a.pass,
          fmt("report %zu bytes, identical %d, tables identical %d, suites pass %d", a.report.size(),
              a.report == b.report, tables, a.pass)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance CONFIG\n";
    return 2;
  }
  const std::string config_path = argv[1];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"luxemburg norm matches p-norms", criterion1},
      {"sup-norm bounds for threshold families", criterion2},
      {"closed-form constants", criterion3},
      {"approximation on sup(5)", criterion4},
      {"smoothness contrast at the ridge", criterion5},
      {"local finite dependence", criterion6},
      {"dual bound at every net point", criterion7},
      {"tensor identities and product boundary", criterion8},
      {"lorentz predual norming supports and pipeline", criterion9},
      {"relative boundary identities and built norms", criterion10},
      {"greedy selection matches brute force", criterion11},
      {"deterministic reports", [&] { return criterion12(config_path); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first
              << " (" << o.detail << ")" << std::endl;
  }
  return all ? 0 : 1;
}
