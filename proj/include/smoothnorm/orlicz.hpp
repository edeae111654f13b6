#pragma once

// Smooth Orlicz functions and the Luxemburg (generalised Orlicz) norm on a
// finite index set.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace smoothnorm {

/// C-infinity convex Orlicz function that vanishes on [0, zero_threshold] and
/// reaches 1 + exceed_margin at exceed_threshold:
///
///   value(t) = scale * \int_a^t exp(-w/(s-a)) ds   for t > a = zero_threshold
///
/// w is the bump width (1 by default). With w = 1 and thresholds 1e-3 apart the
/// whole rise from ~0 to 1 happens within ~1e-6 of exceed_threshold; taking w of
/// the order of the threshold gap spreads it over the gap.
///
/// The scale constant is astronomically large when the two thresholds are
/// close, so everything is evaluated in log space; scale() may overflow to
/// +inf while value() stays finite.
class OrliczFunction {
 public:
  static constexpr double kDefaultExceedMargin = 0.5;

  OrliczFunction(double zero_threshold, double exceed_threshold,
                 double exceed_margin = kDefaultExceedMargin, double bump_width = 1.0);

  double zero_threshold() const { return zero_threshold_; }
  double exceed_threshold() const { return exceed_threshold_; }
  double exceed_margin() const { return exceed_margin_; }
  double bump_width() const { return bump_width_; }
  double log_scale() const { return log_scale_; }
  double scale() const;

  double value(double t) const;
  double first_derivative(double t) const;
  double second_derivative(double t) const;

 private:
  double zero_threshold_;
  double exceed_threshold_;
  double exceed_margin_;
  double bump_width_;
  double log_scale_;
};

/// make_orlicz with the default margin; throws ParameterError on bad ordering.
OrliczFunction make_orlicz(double zero_threshold, double exceed_threshold,
                           double exceed_margin = OrliczFunction::kDefaultExceedMargin,
                           double bump_width = 1.0);

/// Checked evaluation of a value (order 0) or a derivative (order 1, 2).
double orlicz_eval(const OrliczFunction& f, double t, int order);

/// log of the primitive G(x) = \int_0^x exp(-1/s) ds, x > 0.
double log_smooth_primitive(double x);

/// exp(z) * E_2(z), the scaled second exponential integral, z > 0.
double scaled_expint2(double z);

/// phi(s) = s^p, p >= 1.
struct PowerFunction {
  double exponent;
};

/// phi(s) = max_n s^{p_n}; the per-coordinate modular of an l_{A,p} space.
struct MaxPowerFunction {
  std::vector<double> exponents;
};

using OrliczTerm = std::variant<OrliczFunction, PowerFunction, MaxPowerFunction>;

double term_value(const OrliczTerm& term, double t);
double term_derivative(const OrliczTerm& term, double t);

/// A family phi_t indexed by the positions 0..size()-1 of a finite ordered set.
class OrliczFamily {
 public:
  explicit OrliczFamily(std::vector<OrliczTerm> terms);

  /// The same term repeated `size` times.
  static OrliczFamily constant(const OrliczTerm& term, std::size_t size);

  std::size_t size() const { return terms_.size(); }
  const OrliczTerm& operator[](std::size_t i) const { return terms_[i]; }
  const std::vector<OrliczTerm>& terms() const { return terms_; }

 private:
  std::vector<OrliczTerm> terms_;
};

struct LuxemburgOptions {
  double tol = 1e-10;  // relative bracket width
  int max_iterations = 400;
};

/// Final bisection bracket; `upper` is the reported norm and always satisfies
/// modular(upper) <= 1 as computed.
struct LuxemburgBracket {
  double upper = 0.0;
  double lower = 0.0;
  int iterations = 0;
};

/// S(rho) = sum_t phi_t(|coords(t)| / rho).
double modular(const OrliczFamily& family, std::span<const double> coords, double rho);

LuxemburgBracket luxemburg_bracket(const OrliczFamily& family, std::span<const double> coords,
                                   const LuxemburgOptions& options = {});

double luxemburg_norm(const OrliczFamily& family, std::span<const double> coords,
                      const LuxemburgOptions& options = {});

struct Lemma1Sample {
  double sup_norm = 0.0;
  double phi_upper = 0.0;
  double phi_lower = 0.0;
  bool lower_ok = true;  // alpha * ||f||_phi <= ||f||_inf
  bool upper_ok = true;  // ||f||_inf <= beta * ||f||_phi
};

struct Lemma1Report {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<Lemma1Sample> samples;
  std::vector<std::size_t> violations;  // sample indices
  double min_lower_slack = 0.0;  // min of ||f||_inf - alpha*upper over nonzero samples
  double min_upper_slack = 0.0;  // min of beta*lower - ||f||_inf over nonzero samples
  bool pass() const { return violations.empty(); }
};

/// Verifies alpha*||f||_phi <= ||f||_inf <= beta*||f||_phi on every sample, with
/// each side evaluated against the conservative end of the Luxemburg bracket.
/// Throws PreconditionError naming the first t with phi_t(alpha) != 0 or
/// phi_t(beta) < 1.
Lemma1Report check_lemma1_bounds(const OrliczFamily& family, double alpha, double beta,
                                 const std::vector<std::vector<double>>& samples,
                                 const LuxemburgOptions& options = {});

}  // namespace smoothnorm
