#pragma once

// The smooth approximating norm ||u||_phi = || Pi(u) ||_phi built on a net B,
// with Pi(u)(f) = ||f^Y(u)||_Y, and its verification routines.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/orlicz.hpp"
#include "smoothnorm/spaces.hpp"
#include "smoothnorm/tensor.hpp"

namespace smoothnorm {

class PhiNormSpec {
 public:
  const Decomposition& decomposition() const { return decomposition_; }
  const NetB& net() const { return net_; }
  const OrliczFamily& family() const { return family_; }
  const ModelSpace& x_space() const { return decomposition_.space(); }
  const ModelSpace& y_space() const { return y_space_; }
  double epsilon() const { return decomposition_.epsilon(); }
  double max_psi() const { return max_psi_; }
  const LuxemburgOptions& options() const { return options_; }

 private:
  friend struct RenormBuilder;
  PhiNormSpec(Decomposition d, NetB net, OrliczFamily family, ModelSpace y, LuxemburgOptions options);

  Decomposition decomposition_;
  NetB net_;
  OrliczFamily family_;
  ModelSpace y_space_;
  LuxemburgOptions options_;
  double max_psi_ = 1.0;
};

struct RenormBuildOptions {
  std::size_t boundary_samples = 256;
  std::uint64_t seed = 1;
  double boundary_tol = 1e-9;
  // bisection is run to adjacent doubles so finite differences see no bracket noise
  LuxemburgOptions luxemburg{1e-15, 400};
  /// Bump width of each phi_f: the threshold gap 1/theta - 1/psi when true, 1 otherwise.
  bool gap_adapted_bump = true;
};

/// Checks that d's functionals norm `boundary_samples` random unit vectors of X,
/// builds the net and one Orlicz function per net point with thresholds
/// 1/psi(f) and 1/theta(f). Y must be euclidean (dimension 1 is the scalar
/// field). Throws ConstructionError when the boundary check fails or a theta <= 1.
PhiNormSpec build_renorm(const ModelSpace& x_space, const Decomposition& d,
                         const ModelSpace& y_space, const RenormBuildOptions& options = {});

/// Pi(u)(f) = ||f^Y(u)||_Y for every net point f, in net order.
std::vector<double> pi_coords(const PhiNormSpec& spec, const TensorElement& u);
std::vector<double> pi_coords(const PhiNormSpec& spec, std::span<const double> u);

TensorElement as_element(const PhiNormSpec& spec, std::span<const double> u);

double phi_norm(const PhiNormSpec& spec, const TensorElement& u);
double phi_norm(const PhiNormSpec& spec, std::span<const double> u);
LuxemburgBracket phi_bracket(const PhiNormSpec& spec, const TensorElement& u);

/// X's norm when Y is scalar, the injective norm otherwise.
double base_norm(const PhiNormSpec& spec, const TensorElement& u);

struct ActiveSet {
  std::vector<std::size_t> points;  // positions in net().points()
  double margin = 1.0;
  double phi_norm = 0.0;
  /// Coordinate perturbations strictly below this leave the complement inactive.
  double radius = 0.0;
};

/// F = {f : psi(f) Pi(u)(f) >= ||u||_phi}; throws ParameterError for u = 0.
ActiveSet active_set(const PhiNormSpec& spec, const TensorElement& u);

struct SamplerSpec {
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

struct Claim2dReport {
  std::size_t net_point = 0;
  double max_value = 0.0;  // sampled lower bound of ||h (x) g||_phi*
  double bound = 0.0;      // 1 / theta(h)
  std::size_t samples = 0;
  bool pass = false;
};

/// Samples v with ||v||_phi = 1 and reports max (h (x) g)(v) against 1/theta(h).
/// g must be a unit functional on Y (ParameterError otherwise).
Claim2dReport verify_claim2d(const PhiNormSpec& spec, std::size_t net_point, const Functional& g,
                             const SamplerSpec& sampler, double tol = 1e-7);

struct FiniteDifferenceRow {
  double step = 0.0;
  double first = 0.0;   // (g(h) - g(-h)) / 2h
  double second = 0.0;  // (g(h) - 2 g(0) + g(-h)) / h^2
};

struct DirectionReport {
  Vector direction;
  std::vector<FiniteDifferenceRow> rows;
  std::vector<double> richardson;  // consistency of consecutive first differences
  double max_richardson = 0.0;
  double max_second = 0.0;
  bool kink = false;
};

struct SmoothnessReport {
  Vector point;
  double value = 0.0;
  std::vector<DirectionReport> directions;
  bool kink() const;
  double max_richardson() const;
};

using NormFunction = std::function<double(std::span<const double>)>;

/// Central first and second differences of t -> normfn(x + t d) for each step.
/// A direction is flagged as a kink when the second difference grows by at
/// least sqrt(h_k / h_{k+1}) between consecutive steps while h * |D2| stays
/// above `kink_floor` * |normfn(x)|. Steps must be positive, strictly
/// decreasing and large enough to move x.
SmoothnessReport smoothness_check(const NormFunction& normfn, std::span<const double> x,
                                  const std::vector<Vector>& directions,
                                  const std::vector<double>& steps, double kink_floor = 1e-3);

// Sample-level verification used by the test suites and the CLI.

struct ApproximationRow {
  double base = 0.0;
  double phi = 0.0;
  double ratio = 0.0;
};

struct ApproximationReport {
  std::vector<ApproximationRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double min_gap = 0.0;  // min of ||u||_phi - ||u|| (strictness)
  bool lower_ok = true;  // ||u|| < ||u||_phi strictly
  bool upper_ok = true;  // ||u||_phi <= (1 + eps) ||u|| (1 + tol)
  bool pass() const { return lower_ok && upper_ok; }
};

std::vector<TensorElement> random_elements(const PhiNormSpec& spec, std::size_t count,
                                           std::uint64_t seed, std::uint64_t stream = 0);

ApproximationReport check_approximation(const PhiNormSpec& spec,
                                        const std::vector<TensorElement>& samples,
                                        double tol = 1e-9, std::size_t workers = 1);

struct LocalDependenceRow {
  std::size_t active = 0;
  double margin = 0.0;
  double radius = 0.0;
  double max_coordinate_move = 0.0;  // over perturbations, relative to radius
  std::size_t leaked = 0;            // inactive coordinates with nonzero phi value
};

struct LocalDependenceReport {
  std::vector<LocalDependenceRow> rows;
  double min_margin = 0.0;
  std::size_t total_leaked = 0;
  bool pass() const;
};

/// For each point (rescaled to phi-norm 1) draws `perturbations` u' with every
/// Pi coordinate moving by less than 0.9 * radius, and counts inactive net points
/// whose Orlicz term at Pi(u')/||u'||_phi is nonzero.
LocalDependenceReport check_local_dependence(const PhiNormSpec& spec,
                                             const std::vector<TensorElement>& points,
                                             std::size_t perturbations, std::uint64_t seed,
                                             std::size_t workers = 1);

}  // namespace smoothnorm
