#include "smoothnorm/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>

#include "smoothnorm/error.hpp"

namespace smoothnorm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double scaled_expint2(double z) {
  if (!(z > 0.0)) throw ParameterError("scaled_expint2: argument must be positive");
  if (z <= 1.0) return std::exp(z) * boost::math::expint(2, z);
  // Modified Lentz evaluation of the continued fraction for E_2(z) e^z.
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 10000;
  double b = z + 2.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (1.0 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= 1e-16) return h;
  }
  throw NumericError("scaled_expint2: continued fraction did not converge");
}

double log_smooth_primitive(double x) {
  if (!(x > 0.0)) throw ParameterError("log_smooth_primitive: argument must be positive");
  // G(x) = x E_2(1/x)
  const double z = 1.0 / x;
  return std::log(x) - z + std::log(scaled_expint2(z));
}

OrliczFunction::OrliczFunction(double zero_threshold, double exceed_threshold,
                               double exceed_margin, double bump_width)
    : zero_threshold_(zero_threshold),
      exceed_threshold_(exceed_threshold),
      exceed_margin_(exceed_margin),
      bump_width_(bump_width) {
  if (!std::isfinite(zero_threshold) || !std::isfinite(exceed_threshold) ||
      zero_threshold < 0.0 || !(exceed_threshold > zero_threshold)) {
    std::ostringstream msg;
    msg << "make_orlicz: need 0 <= zero_threshold < exceed_threshold, got (" << zero_threshold
        << ", " << exceed_threshold << ")";
    throw ParameterError(msg.str());
  }
  if (!(exceed_margin > 0.0) || !std::isfinite(exceed_margin))
    throw ParameterError("make_orlicz: exceed_margin must be positive");
  if (!(bump_width > 0.0) || !std::isfinite(bump_width))
    throw ParameterError("make_orlicz: bump_width must be positive");
  // \int_0^x exp(-w/s) ds = w G(x/w)
  const double gap = exceed_threshold - zero_threshold;
  const double log_norm = std::log(bump_width) + log_smooth_primitive(gap / bump_width);
  log_scale_ = std::log1p(exceed_margin) - log_norm;
  if (!std::isfinite(log_scale_))
    throw NumericError("make_orlicz: normalisation integral is not representable");
}

double OrliczFunction::scale() const { return std::exp(log_scale_); }

double OrliczFunction::value(double t) const {
  const double x = t - zero_threshold_;
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_scale_ + std::log(bump_width_) + log_smooth_primitive(x / bump_width_));
}

double OrliczFunction::first_derivative(double t) const {
  const double x = t - zero_threshold_;
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_scale_ - bump_width_ / x);
}

double OrliczFunction::second_derivative(double t) const {
  const double x = t - zero_threshold_;
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_scale_ - bump_width_ / x + std::log(bump_width_) - 2.0 * std::log(x));
}

OrliczFunction make_orlicz(double zero_threshold, double exceed_threshold, double exceed_margin,
                           double bump_width) {
  return OrliczFunction(zero_threshold, exceed_threshold, exceed_margin, bump_width);
}

double orlicz_eval(const OrliczFunction& f, double t, int order) {
  if (!(t >= 0.0)) throw ParameterError("orlicz_eval: t must be nonnegative");
  switch (order) {
    case 0:
      return f.value(t);
    case 1:
      return f.first_derivative(t);
    case 2:
      return f.second_derivative(t);
    default:
      throw ParameterError("orlicz_eval: order must be 0, 1 or 2");
  }
}

double term_value(const OrliczTerm& term, double t) {
  return std::visit(overloaded{
                        [t](const OrliczFunction& f) { return f.value(t); },
                        [t](const PowerFunction& f) { return std::pow(t, f.exponent); },
                        [t](const MaxPowerFunction& f) {
                          double best = 0.0;
                          for (double p : f.exponents) best = std::max(best, std::pow(t, p));
                          return best;
                        },
                    },
                    term);
}

double term_derivative(const OrliczTerm& term, double t) {
  return std::visit(overloaded{
                        [t](const OrliczFunction& f) { return f.first_derivative(t); },
                        [t](const PowerFunction& f) {
                          return f.exponent * std::pow(t, f.exponent - 1.0);
                        },
                        [t](const MaxPowerFunction& f) {
                          // derivative of the active branch; largest exponent on ties
                          double best = -1.0;
                          double slope = 0.0;
                          for (double p : f.exponents) {
                            const double v = std::pow(t, p);
                            if (v > best || (v == best && p * std::pow(t, p - 1.0) > slope)) {
                              best = v;
                              slope = p * std::pow(t, p - 1.0);
                            }
                          }
                          return slope;
                        },
                    },
                    term);
}

OrliczFamily::OrliczFamily(std::vector<OrliczTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ParameterError("OrliczFamily: index set must be nonempty");
  for (const auto& term : terms_) {
    if (const auto* p = std::get_if<PowerFunction>(&term); p && !(p->exponent >= 1.0))
      throw ParameterError("OrliczFamily: power exponent must be >= 1");
    if (const auto* m = std::get_if<MaxPowerFunction>(&term)) {
      if (m->exponents.empty()) throw ParameterError("OrliczFamily: empty exponent list");
      for (double p : m->exponents)
        if (!(p >= 1.0)) throw ParameterError("OrliczFamily: power exponent must be >= 1");
    }
  }
}

OrliczFamily OrliczFamily::constant(const OrliczTerm& term, std::size_t size) {
  return OrliczFamily(std::vector<OrliczTerm>(size, term));
}

double modular(const OrliczFamily& family, std::span<const double> coords, double rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double c = std::abs(coords[i]);
    if (c == 0.0) continue;
    sum += term_value(family[i], c / rho);
  }
  return sum;
}

LuxemburgBracket luxemburg_bracket(const OrliczFamily& family, std::span<const double> coords,
                                   const LuxemburgOptions& options) {
  if (coords.size() != family.size())
    throw ParameterError("luxemburg_norm: coordinates do not cover the index set");
  double max_abs = 0.0;
  for (double c : coords) {
    if (!std::isfinite(c)) throw ParameterError("luxemburg_norm: non-finite coordinate");
    max_abs = std::max(max_abs, std::abs(c));
  }
  LuxemburgBracket out;
  if (max_abs == 0.0) return out;

  auto feasible = [&](double rho) { return modular(family, coords, rho) <= 1.0; };
  auto budget_error = [&](double lo, double hi) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "luxemburg_norm: iteration budget exhausted with bracket [" << lo << ", " << hi
        << "]";
    return NumericError(msg.str());
  };

  int it = 0;
  double hi = max_abs;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (++it > options.max_iterations || !std::isfinite(hi)) throw budget_error(0.0, hi);
  }
  double lo = 0.5 * hi;
  while (feasible(lo)) {
    hi = lo;
    lo *= 0.5;
    if (++it > options.max_iterations || lo == 0.0) throw budget_error(lo, hi);
  }
  while (hi - lo > options.tol * hi) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket is a pair of adjacent doubles
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
    if (++it > options.max_iterations) throw budget_error(lo, hi);
  }
  out.upper = hi;
  out.lower = lo;
  out.iterations = it;
  return out;
}

double luxemburg_norm(const OrliczFamily& family, std::span<const double> coords,
                      const LuxemburgOptions& options) {
  return luxemburg_bracket(family, coords, options).upper;
}

Lemma1Report check_lemma1_bounds(const OrliczFamily& family, double alpha, double beta,
                                 const std::vector<std::vector<double>>& samples,
                                 const LuxemburgOptions& options) {
  if (!(alpha > 0.0) || !(beta > alpha))
    throw ParameterError("check_lemma1_bounds: need 0 < alpha < beta");
  for (std::size_t t = 0; t < family.size(); ++t) {
    const double at_alpha = term_value(family[t], alpha);
    const double at_beta = term_value(family[t], beta);
    if (at_alpha != 0.0 || at_beta < 1.0) {
      std::ostringstream msg;
      msg << "check_lemma1_bounds: hypothesis fails at t = " << t << " (phi(alpha) = "
          << at_alpha << ", phi(beta) = " << at_beta << ")";
      throw PreconditionError(msg.str());
    }
  }

  Lemma1Report report;
  report.alpha = alpha;
  report.beta = beta;
  report.min_lower_slack = std::numeric_limits<double>::infinity();
  report.min_upper_slack = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& f = samples[s];
    Lemma1Sample row;
    for (double c : f) row.sup_norm = std::max(row.sup_norm, std::abs(c));
    const auto bracket = luxemburg_bracket(family, f, options);
    row.phi_upper = bracket.upper;
    row.phi_lower = bracket.lower;
    row.lower_ok = alpha * row.phi_upper <= row.sup_norm;
    row.upper_ok = row.sup_norm <= beta * row.phi_lower;
    if (row.sup_norm > 0.0) {
      report.min_lower_slack = std::min(report.min_lower_slack, row.sup_norm - alpha * row.phi_upper);
      report.min_upper_slack = std::min(report.min_upper_slack, beta * row.phi_lower - row.sup_norm);
    }
    if (!row.lower_ok || !row.upper_ok) report.violations.push_back(s);
    report.samples.push_back(row);
  }
  return report;
}

}  // namespace smoothnorm
