#pragma once

// Finite-dimensional model normed spaces over the index set {0, ..., dim-1}.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothnorm/orlicz.hpp"

namespace smoothnorm {

using Vector = std::vector<double>;

/// Sorted subset of the index set.
using SupportSet = std::vector<std::size_t>;

/// A linear functional given by its coordinates against the canonical basis.
struct Functional {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  double operator()(std::span<const double> x) const;
  SupportSet support() const;
  std::size_t support_size() const;

  friend bool operator==(const Functional&, const Functional&) = default;
};

enum class SpaceKind {
  sup,              // l_inf^n
  orlicz_hm,        // Luxemburg norm with one Orlicz function M on every coordinate
  lap,              // l_{A,p}
  lorentz_predual,  // d_*(w, 1, A)
  lorentz,          // d(w, 1, A)
  euclidean,        // l_2^n; dimension 1 is the scalar field
  polyhedral,       // max |f(x)| over a finite set of functionals
};

std::string to_string(SpaceKind kind);
std::optional<SpaceKind> space_kind_from_string(const std::string& name);

struct DualNorm {
  double value = 0.0;
  bool exact = true;  // false when the coordinate l1 surrogate was used
};

class ModelSpace {
 public:
  static ModelSpace sup(std::size_t dim);
  static ModelSpace euclidean(std::size_t dim);
  static ModelSpace scalar() { return euclidean(1); }
  /// `growth_constant` is the K of the h_M growth condition; it is recorded only.
  static ModelSpace orlicz_hm(std::size_t dim, OrliczTerm m, double growth_constant = 1.0);
  /// blocks[n] = A_n, exponents[n] = p_n (>= 1, nondecreasing); the A_n may overlap.
  static ModelSpace lap(std::size_t dim, std::vector<std::vector<std::size_t>> blocks,
                        std::vector<double> exponents);
  /// Weights must satisfy w_0 = 1, w_n > 0 and be nonincreasing; dim = w.size().
  static ModelSpace lorentz(std::vector<double> weights);
  static ModelSpace lorentz_predual(std::vector<double> weights);
  static ModelSpace polyhedral(std::size_t dim, std::vector<Functional> functionals);

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool monotone_unconditional() const { return monotone_unconditional_; }
  void set_monotone_unconditional(bool flag) { monotone_unconditional_ = flag; }
  bool is_scalar() const { return kind_ == SpaceKind::euclidean && dim_ == 1; }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<double>& exponents() const { return exponents_; }
  const std::vector<Functional>& functionals() const { return functionals_; }
  double growth_constant() const { return growth_constant_; }
  /// Per-coordinate Orlicz family for the Luxemburg kinds (orlicz_hm, lap).
  const std::optional<OrliczFamily>& family() const { return family_; }

  double norm(std::span<const double> x) const;
  DualNorm dual_norm(std::span<const double> f) const;
  /// Dual-norm distance used as the separation metric for nets.
  DualNorm dual_distance(const Functional& f, const Functional& g) const;
  /// f with f(x) = ||x|| and dual norm 1; x must be nonzero.
  Functional norming_functional(std::span<const double> x) const;

  void check_vector(std::span<const double> x, const char* where) const;
  std::string describe() const;

 private:
  ModelSpace(SpaceKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  SpaceKind kind_;
  std::size_t dim_;
  bool monotone_unconditional_ = true;
  std::vector<double> weights_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<double> exponents_;
  std::vector<Functional> functionals_;
  double growth_constant_ = 1.0;
  std::optional<OrliczFamily> family_;
};

/// Indices of x ordered by |x_i| descending; ties keep the lower index first.
std::vector<std::size_t> decreasing_order(std::span<const double> x);

/// ybar_k = (sum of the k largest |y|) / (w_0 + ... + w_{k-1}), k = 1..dim.
std::vector<double> lorentz_averages(std::span<const double> weights, std::span<const double> y);

/// Phi(z) for an l_{A,p} space: each index takes its best exponent.
double lap_modular(const ModelSpace& space, std::span<const double> z);

double space_norm(const ModelSpace& space, std::span<const double> x);

/// P_sigma x; throws ParameterError when sigma is not inside the index set.
Vector proj(std::span<const double> x, const SupportSet& sigma);

/// A support sigma with ||P_sigma y|| within tol of 1, or none. Requires
/// |space_norm(y) - 1| <= tol. cap = 0 means cap = dim.
std::optional<SupportSet> find_norming_support(const ModelSpace& space,
                                               std::span<const double> y, double tol,
                                               std::size_t cap = 0);

}  // namespace smoothnorm
