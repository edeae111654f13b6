#pragma once

// Finite-dimensional injective tensor products X (x)_eps Y.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smoothnorm/spaces.hpp"

namespace smoothnorm {

/// u = sum_ij u_ij e_i (x) e_j, stored row-major (rows index X, columns Y).
class TensorElement {
 public:
  TensorElement(ModelSpace x_space, ModelSpace y_space, std::vector<double> coeffs);

  /// v (x) 1 in X (x) R = X.
  static TensorElement from_vector(const ModelSpace& x_space, Vector v);
  static TensorElement rank_one(const ModelSpace& x_space, const ModelSpace& y_space,
                                const Vector& x, const Vector& y);

  std::size_t rows() const { return x_space_.dim(); }
  std::size_t cols() const { return y_space_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return coeffs_[i * cols() + j]; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const ModelSpace& x_space() const { return x_space_; }
  const ModelSpace& y_space() const { return y_space_; }

  TensorElement scaled(double s) const;
  TensorElement plus(const TensorElement& other) const;

 private:
  ModelSpace x_space_;
  ModelSpace y_space_;
  std::vector<double> coeffs_;
};

/// f^Y(u) = sum_i f_i u_{i,.}, a vector of Y.
Vector apply_fY(const Functional& f, const TensorElement& u);
/// g^X(u) = sum_j u_{.,j} g_j, a vector of X.
Vector apply_gX(const Functional& g, const TensorElement& u);
/// (f (x) g)(u) = sum_ij f_i g_j u_ij.
double apply_pair(const Functional& f, const Functional& g, const TensorElement& u);

/// Extreme points of the dual unit ball, when it is a polytope we can list
/// (sup, lorentz_predual, polyhedral). ParameterError otherwise.
std::vector<Functional> extreme_dual_points(const ModelSpace& space);
bool has_enumerable_dual(const ModelSpace& space);

enum class InjectiveStrategy { enumerate, sample_ascent };

struct AscentOptions {
  std::size_t samples = 256;
  std::size_t rounds = 60;
  std::uint64_t seed = 0x5eed;
};

struct InjectiveNorm {
  double value = 0.0;
  Functional f;  // witness on X
  Functional g;  // witness on Y
  bool exact = true;  // false: sampled lower bound
};

InjectiveNorm injective_norm(const TensorElement& u, InjectiveStrategy strategy,
                             const AscentOptions& options = {});

/// Enumerate when the X dual is enumerable, sampled ascent otherwise.
InjectiveNorm injective_norm(const TensorElement& u);

struct ProductBoundaryRow {
  double norm = 0.0;        // injective norm of the sample
  double two_step = 0.0;    // (f_hat (x) g_hat)(u) from the two-step argument
  double brute_max = 0.0;   // max over N x M
  std::size_t f_index = 0;
  std::size_t g_index = 0;
  bool attained = false;
};

struct ProductBoundaryReport {
  std::vector<ProductBoundaryRow> rows;
  double worst_gap = 0.0;
  bool norms_exact = true;
  bool pass() const;
};

/// For every sample with injective norm 1 (within tol), finds f_hat in N by
/// norming g^X(u), then g_hat in M by norming f_hat^Y(u), and reports whether
/// (f_hat (x) g_hat)(u) >= 1 - tol. N and M are expected to be boundaries of
/// X and Y; that is the caller's check.
ProductBoundaryReport boundary_product_check(const std::vector<Functional>& n_set,
                                             const std::vector<Functional>& m_set,
                                             const std::vector<TensorElement>& samples,
                                             double tol);

}  // namespace smoothnorm
