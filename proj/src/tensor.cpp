#include "smoothnorm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "smoothnorm/error.hpp"
#include "smoothnorm/sampling.hpp"

namespace smoothnorm {

namespace {

constexpr std::size_t kMaxEnumerableDim = 12;

void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want) {
    std::ostringstream msg;
    msg << where << ": dimension mismatch (" << got << " vs " << want << ")";
    throw ParameterError(msg.str());
  }
}

Functional zero_functional(std::size_t dim) { return Functional{std::vector<double>(dim, 0.0)}; }

// All signed 0/1 patterns on subsets S, scaled by 1/(w_0 + ... + w_{|S|-1}).
std::vector<Functional> lorentz_ball_vertices(const std::vector<double>& w, std::size_t dim) {
  std::vector<Functional> out;
  for (std::size_t k = 1; k <= dim; ++k) {
    const double wk = std::accumulate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    std::vector<bool> mask(dim, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
    // lexicographic order of index subsets
    do {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < dim; ++i)
        if (mask[i]) s.push_back(i);
      for (std::size_t signs = 0; signs < (std::size_t{1} << k); ++signs) {
        Functional f = zero_functional(dim);
        for (std::size_t j = 0; j < k; ++j) f.coords[s[j]] = ((signs >> j) & 1U ? -1.0 : 1.0) / wk;
        out.push_back(std::move(f));
      }
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return out;
}

// Signed permutations of w: the vertices of the unit ball of max_k top_k / W_k.
std::vector<Functional> predual_ball_vertices(const std::vector<double>& w, std::size_t dim) {
  std::vector<Functional> out;
  std::vector<std::size_t> perm(dim);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    for (std::size_t signs = 0; signs < (std::size_t{1} << dim); ++signs) {
      Functional f = zero_functional(dim);
      for (std::size_t j = 0; j < dim; ++j)
        f.coords[perm[j]] = ((signs >> j) & 1U ? -1.0 : 1.0) * w[j];
      out.push_back(std::move(f));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TensorElement::TensorElement(ModelSpace x_space, ModelSpace y_space, std::vector<double> coeffs)
    : x_space_(std::move(x_space)), y_space_(std::move(y_space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != x_space_.dim() * y_space_.dim())
    throw ParameterError("TensorElement: coefficient count does not match dim X * dim Y");
}

TensorElement TensorElement::from_vector(const ModelSpace& x_space, Vector v) {
  return TensorElement(x_space, ModelSpace::scalar(), std::move(v));
}

TensorElement TensorElement::rank_one(const ModelSpace& x_space, const ModelSpace& y_space,
                                      const Vector& x, const Vector& y) {
  x_space.check_vector(x, "rank_one");
  y_space.check_vector(y, "rank_one");
  std::vector<double> c(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) c[i * y.size() + j] = x[i] * y[j];
  return TensorElement(x_space, y_space, std::move(c));
}

TensorElement TensorElement::scaled(double s) const {
  auto c = coeffs_;
  for (double& v : c) v *= s;
  return TensorElement(x_space_, y_space_, std::move(c));
}

TensorElement TensorElement::plus(const TensorElement& other) const {
  if (other.rows() != rows() || other.cols() != cols())
    throw ParameterError("TensorElement::plus: shape mismatch");
  auto c = coeffs_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.coeffs_[i];
  return TensorElement(x_space_, y_space_, std::move(c));
}

Vector apply_fY(const Functional& f, const TensorElement& u) {
  require_dim(f.dim(), u.rows(), "apply_fY");
  Vector out(u.cols(), 0.0);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    if (f.coords[i] == 0.0) continue;
    for (std::size_t j = 0; j < u.cols(); ++j) out[j] += f.coords[i] * u(i, j);
  }
  return out;
}

Vector apply_gX(const Functional& g, const TensorElement& u) {
  require_dim(g.dim(), u.cols(), "apply_gX");
  Vector out(u.rows(), 0.0);
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) out[i] += u(i, j) * g.coords[j];
  return out;
}

double apply_pair(const Functional& f, const Functional& g, const TensorElement& u) {
  require_dim(f.dim(), u.rows(), "apply_pair");
  require_dim(g.dim(), u.cols(), "apply_pair");
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) s += f.coords[i] * g.coords[j] * u(i, j);
  return s;
}

bool has_enumerable_dual(const ModelSpace& space) {
  switch (space.kind()) {
    case SpaceKind::sup:
    case SpaceKind::polyhedral:
      return true;
    case SpaceKind::lorentz_predual:
      return space.dim() <= kMaxEnumerableDim;
    case SpaceKind::lorentz:
      return space.dim() <= 8;
    default:
      return space.dim() == 1;
  }
}

std::vector<Functional> extreme_dual_points(const ModelSpace& space) {
  if (!has_enumerable_dual(space)) {
    throw ParameterError("extreme_dual_points: dual ball of " + space.describe() +
                         " is not an enumerable polytope");
  }
  const std::size_t dim = space.dim();
  switch (space.kind()) {
    case SpaceKind::lorentz_predual:
      return lorentz_ball_vertices(space.weights(), dim);
    case SpaceKind::lorentz:
      return predual_ball_vertices(space.weights(), dim);
    case SpaceKind::polyhedral: {
      std::vector<Functional> out;
      for (const auto& f : space.functionals()) {
        out.push_back(f);
        Functional neg = f;
        for (double& c : neg.coords) c = -c;
        out.push_back(std::move(neg));
      }
      return out;
    }
    default: {
      // sup, and any one-dimensional space: +- the norming functional of each e_i
      std::vector<Functional> out;
      for (std::size_t i = 0; i < dim; ++i) {
        Vector e(dim, 0.0);
        e[i] = 1.0;
        Functional f{std::vector<double>(dim, 0.0)};
        f.coords[i] = space.kind() == SpaceKind::sup ? 1.0 : 1.0 / space.norm(e);
        out.push_back(f);
        for (double& c : f.coords) c = -c;
        out.push_back(std::move(f));
      }
      return out;
    }
  }
}

InjectiveNorm injective_norm(const TensorElement& u, InjectiveStrategy strategy,
                             const AscentOptions& options) {
  const auto& X = u.x_space();
  const auto& Y = u.y_space();
  InjectiveNorm out{0.0, zero_functional(X.dim()), zero_functional(Y.dim()), true};
  const bool is_zero =
      std::all_of(u.coeffs().begin(), u.coeffs().end(), [](double c) { return c == 0.0; });

  if (strategy == InjectiveStrategy::enumerate) {
    const auto ext = extreme_dual_points(X);
    if (is_zero) return out;
    double best = -1.0;
    for (const auto& f : ext) {
      const auto fy = apply_fY(f, u);
      const double v = Y.norm(fy);
      if (v > best) {
        best = v;
        out.f = f;
        if (v > 0.0) out.g = Y.norming_functional(fy);
      }
    }
    out.value = best;
    return out;
  }

  if (is_zero) return out;
  auto evaluate = [&](const Functional& g) { return X.norm(apply_gX(g, u)); };
  auto finish = [&](const Functional& g, double value, bool exact) {
    out.value = value;
    out.g = g;
    out.f = X.norming_functional(apply_gX(g, u));
    out.exact = exact;
    return out;
  };

  if (has_enumerable_dual(Y)) {
    double best = -1.0;
    Functional arg;
    for (const auto& g : extreme_dual_points(Y)) {
      const double v = evaluate(g);
      if (v > best) {
        best = v;
        arg = g;
      }
    }
    return finish(arg, best, true);
  }
  if (Y.kind() != SpaceKind::euclidean)
    throw ParameterError("injective_norm: sampled ascent needs a euclidean factor Y");

  Rng rng(options.seed);
  auto unit = [](Vector v) {
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    for (double& c : v) c /= n;
    return Functional{std::move(v)};
  };
  Functional best_g = unit(gaussian_vector(rng, Y.dim()));
  double best = evaluate(best_g);
  for (std::size_t s = 1; s < options.samples; ++s) {
    auto g = unit(gaussian_vector(rng, Y.dim()));
    const double v = evaluate(g);
    if (v > best) {
      best = v;
      best_g = std::move(g);
    }
  }
  double step = 0.5;
  for (std::size_t r = 0; r < options.rounds; ++r) {
    bool improved = false;
    for (int trial = 0; trial < 8; ++trial) {
      auto dir = gaussian_vector(rng, Y.dim());
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] = best_g.coords[j] + step * dir[j];
      auto g = unit(std::move(dir));
      const double v = evaluate(g);
      if (v > best) {
        best = v;
        best_g = std::move(g);
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return finish(best_g, best, false);
}

InjectiveNorm injective_norm(const TensorElement& u) {
  return injective_norm(u, has_enumerable_dual(u.x_space()) ? InjectiveStrategy::enumerate
                                                            : InjectiveStrategy::sample_ascent);
}

bool ProductBoundaryReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.attained; });
}

ProductBoundaryReport boundary_product_check(const std::vector<Functional>& n_set,
                                             const std::vector<Functional>& m_set,
                                             const std::vector<TensorElement>& samples,
                                             double tol) {
  if (n_set.empty() || m_set.empty())
    throw ParameterError("boundary_product_check: empty functional set");
  ProductBoundaryReport report;
  for (const auto& u : samples) {
    const auto inj = injective_norm(u);
    report.norms_exact = report.norms_exact && inj.exact;
    if (std::abs(inj.value - 1.0) > tol) {
      std::ostringstream msg;
      msg << "boundary_product_check: sample has injective norm " << inj.value;
      throw ParameterError(msg.str());
    }
    ProductBoundaryRow row;
    row.norm = inj.value;

    const auto gx = apply_gX(inj.g, u);
    double best_f = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_set.size(); ++i) {
      const double v = n_set[i](gx);
      if (v > best_f) {
        best_f = v;
        row.f_index = i;
      }
    }
    const auto fy = apply_fY(n_set[row.f_index], u);
    double best_g = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m_set.size(); ++j) {
      const double v = m_set[j](fy);
      if (v > best_g) {
        best_g = v;
        row.g_index = j;
      }
    }
    row.two_step = apply_pair(n_set[row.f_index], m_set[row.g_index], u);

    row.brute_max = -std::numeric_limits<double>::infinity();
    for (const auto& f : n_set) {
      const auto f_y = apply_fY(f, u);
      for (const auto& g : m_set) row.brute_max = std::max(row.brute_max, g(f_y));
    }
    row.attained = row.two_step >= 1.0 - tol;
    report.worst_gap = std::max(report.worst_gap, 1.0 - row.two_step);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace smoothnorm
