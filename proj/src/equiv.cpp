#include "smoothnorm/equiv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "smoothnorm/error.hpp"
#include "smoothnorm/sampling.hpp"
#include "subsets.hpp"

namespace smoothnorm {

namespace {

using detail::for_each_subset;

constexpr std::size_t kExhaustiveProjectionDim = 12;
constexpr std::size_t kMaxLorentzVertexDim = 8;
constexpr std::uint64_t kSupportStream = 0x5b;

bool exact_support_ball(const ModelSpace& space) {
  switch (space.kind()) {
    case SpaceKind::sup:
    case SpaceKind::lorentz_predual:
      return true;
    case SpaceKind::lorentz:
      return space.dim() <= kMaxLorentzVertexDim;
    default:
      return false;
  }
}

Functional negated(Functional f) {
  for (double& c : f.coords) c = -c;
  return f;
}

// Every sign pattern on sigma applied to the magnitudes `mags` (same length).
void push_sign_patterns(std::size_t dim, const SupportSet& sigma, const std::vector<double>& mags,
                        std::vector<Functional>& out) {
  const std::size_t k = sigma.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Functional f{std::vector<double>(dim, 0.0)};
    for (std::size_t j = 0; j < k; ++j) f.coords[sigma[j]] = (mask >> j & 1U) ? -mags[j] : mags[j];
    out.push_back(std::move(f));
  }
}

// Members of the support ball with support exactly of size k (k >= 1).
std::vector<Functional> support_level(const ModelSpace& space, std::size_t k,
                                      std::size_t resolution, std::uint64_t seed) {
  const std::size_t dim = space.dim();
  std::vector<Functional> out;
  if (k == 0 || k > dim) return out;

  switch (space.kind()) {
    case SpaceKind::sup:
      if (k == 1)
        for (std::size_t i = 0; i < dim; ++i) push_sign_patterns(dim, {i}, {1.0}, out);
      return out;
    case SpaceKind::lorentz_predual: {
      // extreme points of the Lorentz ball: signed indicators over partial sums
      const auto& w = space.weights();
      const double wk = std::accumulate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
      const std::vector<double> mags(k, 1.0 / wk);
      for_each_subset(dim, k, [&](const SupportSet& sigma) {
        push_sign_patterns(dim, sigma, mags, out);
        return false;
      });
      return out;
    }
    case SpaceKind::lorentz:
      if (dim <= kMaxLorentzVertexDim) {
        // vertices of the restricted predual ball: signed permutations of w_0..w_{k-1}
        const auto& w = space.weights();
        for_each_subset(dim, k, [&](const SupportSet& sigma) {
          std::vector<std::size_t> perm(k);
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          do {
            std::vector<double> mags(k);
            for (std::size_t j = 0; j < k; ++j) mags[j] = w[perm[j]];
            push_sign_patterns(dim, sigma, mags, out);
          } while (std::next_permutation(perm.begin(), perm.end()));
          return false;
        });
        return out;
      }
      break;
    default:
      break;
  }

  if (!space.monotone_unconditional())
    throw ParameterError("support_ball: discretised supports need a monotone unconditional basis");
  std::size_t sigma_index = 0;
  for_each_subset(dim, k, [&](const SupportSet& sigma) {
    std::set<std::vector<double>> seen;
    for (std::size_t r = 0; r < resolution; ++r) {
      auto rng = sample_rng(seed, kSupportStream + k, sigma_index * resolution + r);
      auto g = gaussian_vector(rng, k);
      Vector x(dim, 0.0);
      for (std::size_t j = 0; j < k; ++j) x[sigma[j]] = g[j];
      if (!(space.norm(x) > 0.0)) continue;
      Functional f = space.norming_functional(x);
      f.coords = proj(f.coords, sigma);
      if (f.support_size() != k) continue;
      for (auto cand : {f, negated(f)}) {
        if (seen.insert(cand.coords).second) out.push_back(std::move(cand));
      }
    }
    ++sigma_index;
    return false;
  });
  return out;
}

}  // namespace

SupportBall support_ball(const ModelSpace& space, std::size_t n, std::size_t resolution,
                         std::uint64_t seed) {
  SupportBall ball;
  ball.exact = exact_support_ball(space);
  if (n == 0) {
    ball.members.push_back(Functional{std::vector<double>(space.dim(), 0.0)});
    return ball;
  }
  if (!ball.exact && resolution == 0)
    throw ParameterError("support_ball: resolution must be positive");
  for (std::size_t k = 1; k <= std::min(n, space.dim()); ++k) {
    auto level = support_level(space, k, resolution, seed);
    ball.members.insert(ball.members.end(), std::make_move_iterator(level.begin()),
                        std::make_move_iterator(level.end()));
  }
  return ball;
}

double compute_bn(const std::vector<Functional>& h, const std::vector<Vector>& samples) {
  if (samples.empty()) throw ParameterError("compute_bn: empty sample set");
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    double best = h.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    for (const auto& f : h) best = std::max(best, f(x));
    inf = std::min(inf, best);
  }
  return inf;
}

ProjectionMax max_projection_norm(const ModelSpace& space, std::span<const double> x,
                                  std::size_t n) {
  space.check_vector(x, "max_projection_norm");
  const std::size_t k = std::min(n, space.dim());
  ProjectionMax out;
  if (k == 0) return out;
  if (space.dim() <= kExhaustiveProjectionDim) {
    out.value = -1.0;
    for_each_subset(space.dim(), k, [&](const SupportSet& sigma) {
      const double v = space.norm(proj(x, sigma));
      if (v > out.value) {
        out.value = v;
        out.sigma = sigma;
      }
      return false;
    });
    return out;
  }
  const auto order = decreasing_order(x);
  out.sigma.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.sigma.begin(), out.sigma.end());
  out.value = space.norm(proj(x, out.sigma));
  out.exhaustive = false;
  return out;
}

double compute_cn(const ModelSpace& space, const std::vector<Vector>& samples, std::size_t n) {
  if (!space.monotone_unconditional())
    throw ParameterError("compute_cn: space is not flagged monotone unconditional");
  if (samples.empty()) throw ParameterError("compute_cn: empty sample set");
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) inf = std::min(inf, max_projection_norm(space, x, n).value);
  return inf;
}

std::vector<Functional> RelativeBoundaryChain::h(std::size_t n) const {
  std::vector<Functional> out;
  for (std::size_t m = 0; m <= n; ++m) out.insert(out.end(), added_.at(m).begin(), added_.at(m).end());
  return out;
}

RelativeBoundaryChain build_chain(const ModelSpace& space, const std::vector<Vector>& sphere,
                                  const ChainOptions& options) {
  if (!space.monotone_unconditional())
    throw ParameterError("build_chain: space is not flagged monotone unconditional");
  if (sphere.empty()) throw ParameterError("build_chain: no sphere samples");
  const std::size_t top =
      options.max_level == 0 ? space.dim() : std::min(options.max_level, space.dim());

  RelativeBoundaryChain chain(space);
  chain.exact_ = exact_support_ball(space);
  chain.added_.push_back({Functional{std::vector<double>(space.dim(), 0.0)}});
  for (std::size_t n = 1; n <= top; ++n)
    chain.added_.push_back(support_level(space, n, options.resolution, options.seed));

  chain.samples_.assign(top + 1, {});
  std::vector<double> c(top + 1, std::numeric_limits<double>::infinity());
  for (const auto& x : sphere) {
    const double nx = space.norm(x);
    if (std::abs(nx - 1.0) > 1e-9) throw ParameterError("build_chain: samples must have norm 1");
    std::size_t level = top;
    double value = 0.0;
    for (std::size_t n = 1; n <= top; ++n) {
      value = max_projection_norm(space, x, n).value;
      if (value >= options.level_threshold) {
        level = n;
        break;
      }
    }
    chain.samples_[level].push_back(x);
    c[level] = std::min(c[level], value);
  }

  chain.b_.assign(top + 1, std::nullopt);
  chain.c_.assign(top + 1, std::nullopt);
  for (std::size_t n = 0; n <= top; ++n) {
    if (chain.samples_[n].empty()) continue;
    chain.b_[n] = compute_bn(chain.h(n), chain.samples_[n]);
    chain.c_[n] = c[n];
  }
  return chain;
}

std::vector<double> a_coefficients(const RelativeBoundaryChain& chain, const AOptions& options) {
  const std::size_t levels = chain.levels();
  std::vector<double> a(levels, 1.0);
  switch (options.strategy) {
    case AStrategy::unit:
      return a;
    case AStrategy::explicit_values:
      if (options.values.size() != levels)
        throw ParameterError("a_coefficients: need one explicit value per level");
      for (double v : options.values)
        if (!(v > 0.0) || !std::isfinite(v))
          throw ParameterError("a_coefficients: explicit values must be positive");
      return options.values;
    case AStrategy::tail_gap:
      break;
  }
  double tail = 0.0;
  for (std::size_t n = levels; n-- > 0;) {
    if (const auto& b = chain.b(n)) {
      if (!(*b > 0.0)) {
        std::ostringstream msg;
        msg << "a_coefficients: b_" << n << " = " << *b << " is not strictly positive";
        throw ConstructionError(msg.str());
      }
      tail = std::max(tail, (1.0 - *b) / *b);
    }
    a[n] = 1.0 + std::ldexp(1.0, -static_cast<int>(n) - 1) + tail;
  }
  return a;
}

BuiltNorm build_F(const RelativeBoundaryChain& chain, const AOptions& options) {
  for (std::size_t n = 0; n < chain.levels(); ++n) {
    if (const auto& b = chain.b(n); b && !(*b > 0.0)) {
      std::ostringstream msg;
      msg << "build_F: b_" << n << " = " << *b << " is not strictly positive";
      throw ConstructionError(msg.str());
    }
  }
  const auto a = a_coefficients(chain, options);
  const ModelSpace& space = chain.space();

  std::vector<Piece> pieces;
  std::vector<Functional> all;
  std::set<std::vector<double>> seen;
  double upper = 0.0;
  for (std::size_t n = 1; n < chain.levels(); ++n) {
    Piece piece;
    piece.label = "a_" + std::to_string(n) + " (H_" + std::to_string(n) + " \\ H_" +
                  std::to_string(n - 1) + ")";
    for (const auto& h : chain.added(n)) {
      Functional f = h;
      for (double& c : f.coords) c *= a[n];
      for (auto cand : {f, negated(f)})
        if (seen.insert(cand.coords).second) piece.members.push_back(std::move(cand));
    }
    if (piece.members.empty()) continue;
    upper = std::max(upper, a[n]);
    piece.index = pieces.size();
    all.insert(all.end(), piece.members.begin(), piece.members.end());
    pieces.push_back(std::move(piece));
  }
  if (pieces.empty()) throw ConstructionError("build_F: every level is empty");

  BuiltNorm out{std::move(pieces), a, ModelSpace::polyhedral(space.dim(), all)};
  out.upper_bound = upper;
  out.lower_bound = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < chain.levels(); ++n)
    if (const auto& b = chain.b(n)) out.lower_bound = std::min(out.lower_bound, a[n] * *b);
  if (!std::isfinite(out.lower_bound)) out.lower_bound = 0.0;

  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0.0;
  for (std::size_t n = 0; n < chain.levels(); ++n) {
    for (const auto& x : chain.samples(n)) {
      const double nn = out.norm.norm(x);
      const double r = nn / space.norm(x);
      out.min_ratio = std::min(out.min_ratio, r);
      out.max_ratio = std::max(out.max_ratio, r);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& f : all) best = std::max(best, f(x));
      if (best != nn) out.attained = false;
    }
  }
  for (const auto& p : out.pieces)
    if (!check_lrc_criterion(p)) out.lrc = false;
  return out;
}

std::string to_string(PipelineRoute route) {
  switch (route) {
    case PipelineRoute::automatic: return "auto";
    case PipelineRoute::norming_support: return "norming_support";
    case PipelineRoute::projection_constants: return "projection_constants";
  }
  return "unknown";
}

PipelineResult corollary_b_pipeline(const ModelSpace& space, const std::vector<Vector>& sphere,
                                    double epsilon, const ModelSpace& y_space,
                                    const PipelineOptions& options) {
  auto chain = build_chain(space, sphere, options.chain);

  std::size_t found = 0;
  std::size_t max_support = 0;
  for (const auto& y : sphere) {
    if (auto sigma = find_norming_support(space, y, options.support_tol)) {
      ++found;
      max_support = std::max(max_support, sigma->size());
    }
  }
  const bool supports_everywhere = found == sphere.size() && max_support < chain.levels();
  const bool support_route_ok = chain.exact() && supports_everywhere;

  PipelineRoute route = options.route;
  if (route == PipelineRoute::automatic)
    route = support_route_ok ? PipelineRoute::norming_support : PipelineRoute::projection_constants;
  if (route == PipelineRoute::norming_support && !support_route_ok) {
    std::ostringstream msg;
    msg << "corollary_b_pipeline: norming-support route needs exact support balls and a norming "
           "support for every sample (found "
        << found << " of " << sphere.size() << ")";
    throw ConstructionError(msg.str());
  }

  if (route == PipelineRoute::norming_support) {
    std::vector<Piece> pieces;
    for (std::size_t n = 1; n < chain.levels(); ++n) {
      if (chain.added(n).empty()) continue;
      Piece p;
      p.index = pieces.size();
      p.members = chain.added(n);
      p.label = "H_" + std::to_string(n) + " \\ H_" + std::to_string(n - 1);
      pieces.push_back(std::move(p));
    }
    Decomposition d(space, std::move(pieces), epsilon);
    auto spec = build_renorm(space, d, y_space, options.renorm);
    return PipelineResult{route, std::move(chain), std::nullopt, found, max_support, std::move(spec)};
  }

  auto built = build_F(chain, options.a);
  if (!built.attained) throw ConstructionError("corollary_b_pipeline: F does not attain its norm");
  Decomposition d(built.norm, built.pieces, epsilon);
  auto spec = build_renorm(built.norm, d, y_space, options.renorm);
  return PipelineResult{route, std::move(chain), std::move(built), found, max_support,
                        std::move(spec)};
}

}  // namespace smoothnorm
