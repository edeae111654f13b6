#pragma once

// Chains of relative boundaries H_0 <= H_1 <= ... built from support-bounded
// pieces of the dual ball, the constants b_n / c_n, the boundary
// F = U a_n (H_n \ H_{n-1}) of an equivalent norm, and the end-to-end pipeline
// from a space with a monotone unconditional basis to a smooth approximating norm.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/renorm.hpp"
#include "smoothnorm/spaces.hpp"

namespace smoothnorm {

struct SupportBall {
  std::vector<Functional> members;  // ordered by support size, then lexicographically
  bool exact = true;                // false when supports were discretised
};

/// {h in B_X* : |supp h| <= n}. Exact extreme-point enumeration for sup,
/// lorentz_predual and lorentz (dim <= 8); otherwise, per support sigma,
/// norming functionals of `resolution` random unit vectors of P_sigma X
/// (approximate, needs the monotone unconditional flag). n = 0 gives {0}.
SupportBall support_ball(const ModelSpace& space, std::size_t n, std::size_t resolution = 64,
                         std::uint64_t seed = 1);

/// inf over x in samples of max over h of h(x); ParameterError on empty samples.
double compute_bn(const std::vector<Functional>& h, const std::vector<Vector>& samples);

struct ProjectionMax {
  double value = 0.0;
  SupportSet sigma;
  bool exhaustive = true;
};

/// max over |sigma| = min(n, dim) of ||P_sigma x||; exhaustive for dim <= 12,
/// otherwise sigma = indices of the n largest |x_i|.
ProjectionMax max_projection_norm(const ModelSpace& space, std::span<const double> x,
                                  std::size_t n);

/// inf over samples of max_projection_norm; needs the monotone unconditional
/// flag and a nonempty sample set (ParameterError otherwise).
double compute_cn(const ModelSpace& space, const std::vector<Vector>& samples, std::size_t n);

struct ChainOptions {
  std::size_t max_level = 0;        // 0 means dim
  double level_threshold = 0.9;     // x joins S_n for the first n with c-value >= threshold
  std::size_t resolution = 64;
  std::uint64_t seed = 1;
};

class RelativeBoundaryChain {
 public:
  const ModelSpace& space() const { return space_; }
  std::size_t levels() const { return added_.size(); }
  /// H_n \ H_{n-1}; level 0 is {0}, so every H_n contains 0.
  const std::vector<Functional>& added(std::size_t n) const { return added_.at(n); }
  std::vector<Functional> h(std::size_t n) const;
  const std::vector<Vector>& samples(std::size_t n) const { return samples_.at(n); }
  /// b_n over S_n; empty when S_n is empty.
  const std::optional<double>& b(std::size_t n) const { return b_.at(n); }
  const std::optional<double>& c(std::size_t n) const { return c_.at(n); }
  bool exact() const { return exact_; }

 private:
  friend RelativeBoundaryChain build_chain(const ModelSpace&, const std::vector<Vector>&,
                                           const ChainOptions&);
  explicit RelativeBoundaryChain(ModelSpace space) : space_(std::move(space)) {}

  ModelSpace space_;
  std::vector<std::vector<Functional>> added_;
  std::vector<std::vector<Vector>> samples_;
  std::vector<std::optional<double>> b_;
  std::vector<std::optional<double>> c_;
  bool exact_ = true;
};

/// H_n = support_ball(n) for n = 0..N; the unit samples are split into S_n by
/// the smallest n whose projection maximum reaches the level threshold.
RelativeBoundaryChain build_chain(const ModelSpace& space, const std::vector<Vector>& sphere,
                                  const ChainOptions& options = {});

enum class AStrategy {
  tail_gap,  // a_n = 1 + 2^{-n-1} + max_{m >= n} (1 - b_m) / b_m
  unit,      // a_n = 1
  explicit_values,
};

struct AOptions {
  AStrategy strategy = AStrategy::tail_gap;
  std::vector<double> values;  // a_0..a_N for explicit_values
};

std::vector<double> a_coefficients(const RelativeBoundaryChain& chain, const AOptions& options);

struct BuiltNorm {
  std::vector<Piece> pieces;   // a_n (H_n \ H_{n-1}), sign-symmetrised, empty levels skipped
  std::vector<double> a;       // a_0..a_N
  ModelSpace norm;             // max |f(x)| over F
  double lower_bound = 0.0;    // min over levels with samples of a_n b_n
  double upper_bound = 0.0;    // max_n a_n
  double min_ratio = 0.0;      // measured |||x||| / ||x|| over all chain samples
  double max_ratio = 0.0;
  bool attained = true;        // some f in F has f(x) = |||x||| on every sample
  bool lrc = true;             // every piece has constant support size
  bool equivalent(double tol) const {
    return min_ratio >= lower_bound - tol && max_ratio <= upper_bound + tol;
  }
};

/// ConstructionError when some b_n with samples is 0.
BuiltNorm build_F(const RelativeBoundaryChain& chain, const AOptions& options = {});

enum class PipelineRoute { automatic, norming_support, projection_constants };
std::string to_string(PipelineRoute route);

struct PipelineOptions {
  PipelineRoute route = PipelineRoute::automatic;
  ChainOptions chain;
  AOptions a;
  RenormBuildOptions renorm;
  double support_tol = 1e-9;
};

struct PipelineResult {
  PipelineRoute route = PipelineRoute::automatic;
  RelativeBoundaryChain chain;
  std::optional<BuiltNorm> built;
  std::size_t supports_found = 0;  // samples with a norming support
  std::size_t max_support = 0;
  PhiNormSpec spec;
};

/// norming_support route: every sample has a norming support and support balls
/// are exact, so the pieces H_n \ H_{n-1} of the original dual ball form the
/// decomposition. projection_constants route: build_F and renorm the equivalent
/// polyhedral norm. The automatic route prefers norming_support when it applies.
PipelineResult corollary_b_pipeline(const ModelSpace& space, const std::vector<Vector>& sphere,
                                    double epsilon, const ModelSpace& y_space,
                                    const PipelineOptions& options = {});

}  // namespace smoothnorm
