#include "smoothnorm/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "smoothnorm/error.hpp"
#include "subsets.hpp"

namespace smoothnorm {

namespace {

constexpr LuxemburgOptions kSpaceNormOptions{1e-13, 400};

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double l1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double l2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double linf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

void check_weights(const std::vector<double>& w) {
  if (w.empty()) throw ParameterError("Lorentz space: weight sequence is empty");
  if (w[0] != 1.0) throw ParameterError("Lorentz space: w_0 must equal 1");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw ParameterError("Lorentz space: weights must be positive");
    if (i > 0 && w[i] > w[i - 1])
      throw ParameterError("Lorentz space: weights must be nonincreasing");
  }
}

// sum_j w_j |x|*_j
double lorentz_sum(std::span<const double> w, std::span<const double> x) {
  const auto order = decreasing_order(x);
  double s = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) s += w[j] * std::abs(x[order[j]]);
  return s;
}

double max_average(std::span<const double> w, std::span<const double> y) {
  const auto avg = lorentz_averages(w, y);
  return avg.empty() ? 0.0 : *std::max_element(avg.begin(), avg.end());
}

}  // namespace

double Functional::operator()(std::span<const double> x) const {
  if (x.size() != coords.size()) throw ParameterError("Functional: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += coords[i] * x[i];
  return s;
}

SupportSet Functional::support() const {
  SupportSet s;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] != 0.0) s.push_back(i);
  return s;
}

std::size_t Functional::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(coords.begin(), coords.end(), [](double v) { return v != 0.0; }));
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::sup: return "sup";
    case SpaceKind::orlicz_hm: return "orlicz_hm";
    case SpaceKind::lap: return "lap";
    case SpaceKind::lorentz_predual: return "lorentz_predual";
    case SpaceKind::lorentz: return "lorentz";
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::polyhedral: return "polyhedral";
  }
  return "unknown";
}

std::optional<SpaceKind> space_kind_from_string(const std::string& name) {
  for (auto k : {SpaceKind::sup, SpaceKind::orlicz_hm, SpaceKind::lap, SpaceKind::lorentz_predual,
                 SpaceKind::lorentz, SpaceKind::euclidean, SpaceKind::polyhedral})
    if (to_string(k) == name) return k;
  if (name == "sup_finite") return SpaceKind::sup;
  return std::nullopt;
}

ModelSpace ModelSpace::sup(std::size_t dim) {
  if (dim == 0) throw ParameterError("sup space: dimension must be positive");
  return ModelSpace(SpaceKind::sup, dim);
}

ModelSpace ModelSpace::euclidean(std::size_t dim) {
  if (dim == 0) throw ParameterError("euclidean space: dimension must be positive");
  return ModelSpace(SpaceKind::euclidean, dim);
}

ModelSpace ModelSpace::orlicz_hm(std::size_t dim, OrliczTerm m, double growth_constant) {
  if (dim == 0) throw ParameterError("orlicz_hm space: dimension must be positive");
  if (!(growth_constant > 0.0)) throw ParameterError("orlicz_hm space: K must be positive");
  ModelSpace s(SpaceKind::orlicz_hm, dim);
  s.family_ = OrliczFamily::constant(m, dim);
  s.growth_constant_ = growth_constant;
  return s;
}

ModelSpace ModelSpace::lap(std::size_t dim, std::vector<std::vector<std::size_t>> blocks,
                           std::vector<double> exponents) {
  if (dim == 0) throw ParameterError("lap space: dimension must be positive");
  if (blocks.empty() || blocks.size() != exponents.size())
    throw ParameterError("lap space: need one exponent per block");
  for (std::size_t n = 0; n < exponents.size(); ++n) {
    if (!(exponents[n] >= 1.0)) throw ParameterError("lap space: exponents must be >= 1");
    if (n > 0 && exponents[n] < exponents[n - 1])
      throw ParameterError("lap space: exponents must be nondecreasing");
  }
  std::vector<std::vector<double>> per_index(dim);
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    std::sort(blocks[n].begin(), blocks[n].end());
    blocks[n].erase(std::unique(blocks[n].begin(), blocks[n].end()), blocks[n].end());
    for (std::size_t k : blocks[n]) {
      if (k >= dim) throw ParameterError("lap space: block index outside the index set");
      per_index[k].push_back(exponents[n]);
    }
  }
  std::vector<OrliczTerm> terms;
  for (std::size_t k = 0; k < dim; ++k) {
    if (per_index[k].empty()) throw ParameterError("lap space: blocks do not cover the index set");
    terms.emplace_back(MaxPowerFunction{per_index[k]});
  }
  ModelSpace s(SpaceKind::lap, dim);
  s.blocks_ = std::move(blocks);
  s.exponents_ = std::move(exponents);
  s.family_ = OrliczFamily(std::move(terms));
  return s;
}

ModelSpace ModelSpace::lorentz(std::vector<double> weights) {
  check_weights(weights);
  ModelSpace s(SpaceKind::lorentz, weights.size());
  s.weights_ = std::move(weights);
  return s;
}

ModelSpace ModelSpace::lorentz_predual(std::vector<double> weights) {
  check_weights(weights);
  ModelSpace s(SpaceKind::lorentz_predual, weights.size());
  s.weights_ = std::move(weights);
  return s;
}

ModelSpace ModelSpace::polyhedral(std::size_t dim, std::vector<Functional> functionals) {
  if (dim == 0) throw ParameterError("polyhedral space: dimension must be positive");
  if (functionals.empty()) throw ParameterError("polyhedral space: no functionals");
  for (const auto& f : functionals)
    if (f.dim() != dim) throw ParameterError("polyhedral space: functional dimension mismatch");
  ModelSpace s(SpaceKind::polyhedral, dim);
  s.functionals_ = std::move(functionals);
  // a finite functional set need not be sign/permutation stable
  s.monotone_unconditional_ = false;
  return s;
}

void ModelSpace::check_vector(std::span<const double> x, const char* where) const {
  if (x.size() != dim_) {
    std::ostringstream msg;
    msg << where << ": expected " << dim_ << " coordinates, got " << x.size();
    throw ParameterError(msg.str());
  }
}

double ModelSpace::norm(std::span<const double> x) const {
  check_vector(x, "space_norm");
  switch (kind_) {
    case SpaceKind::sup:
      return linf(x);
    case SpaceKind::euclidean:
      return l2(x);
    case SpaceKind::orlicz_hm:
    case SpaceKind::lap:
      return luxemburg_norm(*family_, x, kSpaceNormOptions);
    case SpaceKind::lorentz:
      return lorentz_sum(weights_, x);
    case SpaceKind::lorentz_predual:
      return max_average(weights_, x);
    case SpaceKind::polyhedral: {
      double m = 0.0;
      for (const auto& f : functionals_) m = std::max(m, std::abs(f(x)));
      return m;
    }
  }
  return 0.0;
}

DualNorm ModelSpace::dual_norm(std::span<const double> f) const {
  check_vector(f, "dual_norm");
  switch (kind_) {
    case SpaceKind::sup:
      return {l1(f), true};
    case SpaceKind::euclidean:
      return {l2(f), true};
    case SpaceKind::lorentz_predual:
      return {lorentz_sum(weights_, f), true};
    case SpaceKind::lorentz:
      return {max_average(weights_, f), true};
    case SpaceKind::orlicz_hm:
    case SpaceKind::lap:
    case SpaceKind::polyhedral:
      return {l1(f), false};
  }
  return {};
}

DualNorm ModelSpace::dual_distance(const Functional& f, const Functional& g) const {
  if (f.dim() != g.dim()) throw ParameterError("dual_distance: dimension mismatch");
  std::vector<double> d(f.dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = f.coords[i] - g.coords[i];
  return dual_norm(d);
}

Functional ModelSpace::norming_functional(std::span<const double> x) const {
  check_vector(x, "norming_functional");
  Functional f{std::vector<double>(dim_, 0.0)};
  const double nx = norm(x);
  if (!(nx > 0.0)) throw ParameterError("norming_functional: x must be nonzero");
  switch (kind_) {
    case SpaceKind::sup: {
      const auto order = decreasing_order(x);
      f.coords[order[0]] = sign_of(x[order[0]]);
      break;
    }
    case SpaceKind::euclidean:
      for (std::size_t i = 0; i < dim_; ++i) f.coords[i] = x[i] / nx;
      break;
    case SpaceKind::lorentz: {
      const auto order = decreasing_order(x);
      for (std::size_t j = 0; j < dim_; ++j) f.coords[order[j]] = sign_of(x[order[j]]) * weights_[j];
      break;
    }
    case SpaceKind::lorentz_predual: {
      const auto avg = lorentz_averages(weights_, x);
      const auto k = static_cast<std::size_t>(std::max_element(avg.begin(), avg.end()) - avg.begin()) + 1;
      const auto order = decreasing_order(x);
      const double wk = std::accumulate(weights_.begin(), weights_.begin() + k, 0.0);
      for (std::size_t j = 0; j < k; ++j) f.coords[order[j]] = sign_of(x[order[j]]) / wk;
      break;
    }
    case SpaceKind::orlicz_hm:
    case SpaceKind::lap: {
      // gradient of the Luxemburg norm by implicit differentiation of S(x, rho) = 1
      double denom = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double s = std::abs(x[i]) / nx;
        const double d = s > 0.0 ? term_derivative((*family_)[i], s) : 0.0;
        f.coords[i] = d * sign_of(x[i]);
        denom += d * s;
      }
      if (!(denom > 0.0)) throw NumericError("norming_functional: degenerate Luxemburg gradient");
      for (double& c : f.coords) c /= denom;
      break;
    }
    case SpaceKind::polyhedral: {
      double best = -1.0;
      for (const auto& g : functionals_) {
        const double v = g(x);
        if (std::abs(v) > best) {
          best = std::abs(v);
          f = g;
          if (v < 0.0)
            for (double& c : f.coords) c = -c;
        }
      }
      break;
    }
  }
  return f;
}

std::string ModelSpace::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << "(" << dim_ << ")";
  return out.str();
}

std::vector<std::size_t> decreasing_order(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(x[a]) > std::abs(x[b]); });
  return idx;
}

std::vector<double> lorentz_averages(std::span<const double> weights, std::span<const double> y) {
  if (weights.size() < y.size()) throw ParameterError("lorentz_averages: too few weights");
  const auto order = decreasing_order(y);
  std::vector<double> out(y.size());
  double top = 0.0;
  double wsum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    top += std::abs(y[order[k]]);
    wsum += weights[k];
    out[k] = top / wsum;
  }
  return out;
}

double lap_modular(const ModelSpace& space, std::span<const double> z) {
  if (space.kind() != SpaceKind::lap) throw ParameterError("lap_modular: not an l_{A,p} space");
  space.check_vector(z, "lap_modular");
  return modular(*space.family(), z, 1.0);
}

double space_norm(const ModelSpace& space, std::span<const double> x) { return space.norm(x); }

Vector proj(std::span<const double> x, const SupportSet& sigma) {
  Vector out(x.size(), 0.0);
  for (std::size_t i : sigma) {
    if (i >= x.size()) throw ParameterError("proj: support index outside the index set");
    out[i] = x[i];
  }
  return out;
}

using detail::for_each_subset;

std::optional<SupportSet> find_norming_support(const ModelSpace& space, std::span<const double> y,
                                               double tol, std::size_t cap) {
  const double ny = space.norm(y);
  if (std::abs(ny - 1.0) > tol) {
    std::ostringstream msg;
    msg << "find_norming_support: ||y|| = " << ny << " is not 1 within " << tol;
    throw ParameterError(msg.str());
  }
  if (cap == 0 || cap > space.dim()) cap = space.dim();
  auto norms_y = [&](const SupportSet& sigma) {
    return std::abs(space.norm(proj(y, sigma)) - 1.0) <= tol;
  };

  if (space.kind() == SpaceKind::lorentz_predual) {
    const auto avg = lorentz_averages(space.weights(), y);
    const auto k = static_cast<std::size_t>(std::max_element(avg.begin(), avg.end()) - avg.begin()) + 1;
    if (k > cap) return std::nullopt;
    const auto order = decreasing_order(y);
    SupportSet sigma(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(sigma.begin(), sigma.end());
    if (norms_y(sigma)) return sigma;
    return std::nullopt;
  }

  std::optional<SupportSet> found;
  for (std::size_t k = 1; k <= cap && !found; ++k) {
    for_each_subset(space.dim(), k, [&](const SupportSet& sigma) {
      if (!norms_y(sigma)) return false;
      found = sigma;
      return true;
    });
  }
  return found;
}

}  // namespace smoothnorm
