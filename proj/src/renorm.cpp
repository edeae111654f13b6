#include "smoothnorm/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smoothnorm/error.hpp"
#include "smoothnorm/sampling.hpp"

namespace smoothnorm {

namespace {

// Sample streams; fixed so reports stay comparable across releases.
constexpr std::uint64_t kBoundaryStream = 0xb0;
constexpr std::uint64_t kClaim2dStream = 0xc2;
constexpr std::uint64_t kLocalStream = 0x1d;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

struct RenormBuilder {
  static PhiNormSpec make(Decomposition d, NetB net, OrliczFamily family, ModelSpace y,
                          LuxemburgOptions options) {
    return PhiNormSpec(std::move(d), std::move(net), std::move(family), std::move(y), options);
  }
};

PhiNormSpec::PhiNormSpec(Decomposition d, NetB net, OrliczFamily family, ModelSpace y,
                         LuxemburgOptions options)
    : decomposition_(std::move(d)), net_(std::move(net)), family_(std::move(family)),
      y_space_(std::move(y)), options_(options) {
  for (const auto& p : net_.points()) max_psi_ = std::max(max_psi_, p.psi);
}

PhiNormSpec build_renorm(const ModelSpace& x_space, const Decomposition& d,
                         const ModelSpace& y_space, const RenormBuildOptions& options) {
  if (x_space.dim() != d.space().dim() || x_space.kind() != d.space().kind())
    throw ParameterError("build_renorm: decomposition lives on a different space");
  if (y_space.kind() != SpaceKind::euclidean)
    throw ParameterError("build_renorm: Y must be euclidean or the scalar field");

  const auto functionals = d.all_functionals();
  if (options.boundary_samples > 0) {
    const auto samples =
        sphere_samples(x_space, options.boundary_samples, options.seed, kBoundaryStream);
    const auto report = check_boundary(x_space, functionals, samples, options.boundary_tol);
    if (!report.pass()) {
      std::ostringstream msg;
      msg << "build_renorm: decomposition is not a boundary (worst gap " << report.worst_gap
          << ")";
      throw ConstructionError(msg.str());
    }
  }

  NetB net = build_net(d);
  std::vector<OrliczTerm> terms;
  terms.reserve(net.size());
  for (const auto& p : net.points()) {
    const double a = 1.0 / p.psi;
    const double b = 1.0 / p.theta;
    const double width = options.gap_adapted_bump ? b - a : 1.0;
    terms.emplace_back(make_orlicz(a, b, OrliczFunction::kDefaultExceedMargin, width));
  }
  return RenormBuilder::make(d, std::move(net), OrliczFamily(std::move(terms)), y_space,
                             options.luxemburg);
}

TensorElement as_element(const PhiNormSpec& spec, std::span<const double> u) {
  return TensorElement(spec.x_space(), spec.y_space(), std::vector<double>(u.begin(), u.end()));
}

std::vector<double> pi_coords(const PhiNormSpec& spec, const TensorElement& u) {
  if (u.rows() != spec.x_space().dim() || u.cols() != spec.y_space().dim())
    throw ParameterError("pi_coords: element shape does not match X (x) Y");
  const auto& pts = spec.net().points();
  std::vector<double> out(pts.size());
  if (u.cols() == 1) {
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = std::abs(pts[k].functional(u.coeffs()));
    return out;
  }
  for (std::size_t k = 0; k < pts.size(); ++k)
    out[k] = spec.y_space().norm(apply_fY(pts[k].functional, u));
  return out;
}

std::vector<double> pi_coords(const PhiNormSpec& spec, std::span<const double> u) {
  return pi_coords(spec, as_element(spec, u));
}

LuxemburgBracket phi_bracket(const PhiNormSpec& spec, const TensorElement& u) {
  return luxemburg_bracket(spec.family(), pi_coords(spec, u), spec.options());
}

double phi_norm(const PhiNormSpec& spec, const TensorElement& u) {
  return phi_bracket(spec, u).upper;
}

double phi_norm(const PhiNormSpec& spec, std::span<const double> u) {
  return phi_norm(spec, as_element(spec, u));
}

double base_norm(const PhiNormSpec& spec, const TensorElement& u) {
  if (u.cols() == 1) return spec.x_space().norm(u.coeffs());
  return injective_norm(u).value;
}

ActiveSet active_set(const PhiNormSpec& spec, const TensorElement& u) {
  const auto coords = pi_coords(spec, u);
  const double rho = luxemburg_norm(spec.family(), coords, spec.options());
  if (!(rho > 0.0)) throw ParameterError("active_set: u must be nonzero");
  ActiveSet out;
  out.phi_norm = rho;
  double worst = 0.0;
  const auto& pts = spec.net().points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double load = pts[k].psi * coords[k];
    if (load >= rho)
      out.points.push_back(k);
    else
      worst = std::max(worst, load / rho);
  }
  out.margin = out.points.size() == pts.size() ? 1.0 : 1.0 - worst;
  out.radius = out.margin * rho / (2.0 * spec.max_psi());
  return out;
}

Claim2dReport verify_claim2d(const PhiNormSpec& spec, std::size_t net_point, const Functional& g,
                             const SamplerSpec& sampler, double tol) {
  const auto& pts = spec.net().points();
  if (net_point >= pts.size()) throw ParameterError("verify_claim2d: net point out of range");
  const auto& Y = spec.y_space();
  Y.check_vector(g.coords, "verify_claim2d");
  const double gn = Y.dual_norm(g.coords).value;
  if (std::abs(gn - 1.0) > 1e-9) throw ParameterError("verify_claim2d: g is not a unit functional");

  const auto& h = pts[net_point];
  const std::size_t rows = spec.x_space().dim();
  const std::size_t cols = Y.dim();
  Claim2dReport report;
  report.net_point = net_point;
  report.bound = 1.0 / h.theta;

  // Direction of h's norming vector for the coordinate-type duals; any other
  // direction is still a valid sample.
  Vector x_probe(rows);
  for (std::size_t i = 0; i < rows; ++i) x_probe[i] = sign_of(h.functional.coords[i]);

  for (std::size_t s = 0; s < sampler.count; ++s) {
    auto rng = sample_rng(sampler.seed, kClaim2dStream + net_point * 0x100000ULL, s);
    std::vector<double> c(rows * cols);
    if (s == 0 || s % 5 == 1) {
      const double spread = s == 0 ? 0.0 : 0.3;
      auto nx = gaussian_vector(rng, rows);
      auto ny = gaussian_vector(rng, cols);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          c[i * cols + j] = (x_probe[i] + spread * nx[i]) * (g.coords[j] + spread * ny[j]);
    } else {
      c = gaussian_vector(rng, rows * cols);
    }
    TensorElement v(spec.x_space(), Y, std::move(c));
    const double n = phi_norm(spec, v);
    if (!(n > 0.0)) continue;
    const double value = apply_pair(h.functional, g, v) / n;
    report.max_value = std::max(report.max_value, value);
    ++report.samples;
  }
  report.pass = report.max_value <= report.bound + tol;
  return report;
}

bool SmoothnessReport::kink() const {
  return std::any_of(directions.begin(), directions.end(), [](const auto& d) { return d.kink; });
}

double SmoothnessReport::max_richardson() const {
  double m = 0.0;
  for (const auto& d : directions) m = std::max(m, d.max_richardson);
  return m;
}

SmoothnessReport smoothness_check(const NormFunction& normfn, std::span<const double> x,
                                  const std::vector<Vector>& directions,
                                  const std::vector<double>& steps, double kink_floor) {
  if (steps.empty()) throw ParameterError("smoothness_check: no steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0) || !std::isfinite(steps[k]))
      throw ParameterError("smoothness_check: steps must be positive");
    if (k > 0 && !(steps[k] < steps[k - 1]))
      throw ParameterError("smoothness_check: steps must be strictly decreasing");
  }
  SmoothnessReport report;
  report.point.assign(x.begin(), x.end());
  report.value = normfn(x);
  if (!(report.value > 0.0)) throw ParameterError("smoothness_check: x must be nonzero");

  for (const auto& d : directions) {
    if (d.size() != x.size()) throw ParameterError("smoothness_check: direction dimension mismatch");
    auto shifted = [&](double t) {
      Vector y(x.begin(), x.end());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * d[i];
      return y;
    };
    {
      const auto moved = shifted(steps.back());
      if (std::equal(moved.begin(), moved.end(), x.begin()))
        throw ParameterError("smoothness_check: step underflows at x");
    }
    DirectionReport dir;
    dir.direction = d;
    for (double h : steps) {
      const double gp = normfn(shifted(h));
      const double gm = normfn(shifted(-h));
      FiniteDifferenceRow row;
      row.step = h;
      row.first = (gp - gm) / (2.0 * h);
      row.second = (gp - 2.0 * report.value + gm) / (h * h);
      dir.max_second = std::max(dir.max_second, std::abs(row.second));
      dir.rows.push_back(row);
    }
    for (std::size_t k = 0; k + 1 < dir.rows.size(); ++k) {
      const auto& a = dir.rows[k];
      const auto& b = dir.rows[k + 1];
      const double r = a.step / b.step;
      // |D1(h_small) - Richardson(h_large, h_small)|
      const double rich = std::abs(b.first - a.first) / (r * r - 1.0);
      dir.richardson.push_back(rich);
      dir.max_richardson = std::max(dir.max_richardson, rich);
      const bool grows = std::abs(b.second) >= std::sqrt(r) * std::abs(a.second);
      const bool visible = std::abs(b.second) * b.step >= kink_floor * std::abs(report.value);
      if (grows && visible) dir.kink = true;
    }
    report.directions.push_back(std::move(dir));
  }
  return report;
}

std::vector<TensorElement> random_elements(const PhiNormSpec& spec, std::size_t count,
                                           std::uint64_t seed, std::uint64_t stream) {
  std::vector<TensorElement> out;
  out.reserve(count);
  const std::size_t n = spec.x_space().dim() * spec.y_space().dim();
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = sample_rng(seed, stream, i);
    auto c = gaussian_vector(rng, n);
    if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) c[0] = 1.0;
    out.emplace_back(spec.x_space(), spec.y_space(), std::move(c));
  }
  return out;
}

ApproximationReport check_approximation(const PhiNormSpec& spec,
                                        const std::vector<TensorElement>& samples, double tol,
                                        std::size_t workers) {
  struct Row {
    ApproximationRow row;
    double lower = 0.0;
  };
  const auto rows = parallel_map<Row>(samples.size(), workers, [&](std::size_t i) {
    Row r;
    r.row.base = base_norm(spec, samples[i]);
    const auto bracket = phi_bracket(spec, samples[i]);
    r.row.phi = bracket.upper;
    r.lower = bracket.lower;
    r.row.ratio = r.row.base > 0.0 ? r.row.phi / r.row.base : 0.0;
    return r;
  });

  ApproximationReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = 0.0;
  report.min_gap = std::numeric_limits<double>::infinity();
  const double cap = 1.0 + spec.epsilon();
  for (const auto& r : rows) {
    report.rows.push_back(r.row);
    if (r.row.base == 0.0) continue;
    report.min_ratio = std::min(report.min_ratio, r.row.ratio);
    report.max_ratio = std::max(report.max_ratio, r.row.ratio);
    report.min_gap = std::min(report.min_gap, r.lower - r.row.base);
    if (!(r.row.base < r.lower)) report.lower_ok = false;
    if (!(r.row.phi <= cap * r.row.base * (1.0 + tol))) report.upper_ok = false;
  }
  return report;
}

bool LocalDependenceReport::pass() const {
  return total_leaked == 0 && min_margin > 0.0 &&
         std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.max_coordinate_move < 1.0; });
}

LocalDependenceReport check_local_dependence(const PhiNormSpec& spec,
                                             const std::vector<TensorElement>& points,
                                             std::size_t perturbations, std::uint64_t seed,
                                             std::size_t workers) {
  const auto& pts = spec.net().points();
  const auto rows = parallel_map<LocalDependenceRow>(points.size(), workers, [&](std::size_t p) {
    const double n0 = phi_norm(spec, points[p]);
    if (!(n0 > 0.0)) throw ParameterError("check_local_dependence: zero point");
    const auto u = points[p].scaled(1.0 / n0);
    const auto active = active_set(spec, u);
    const auto base_coords = pi_coords(spec, u);
    std::vector<bool> is_active(pts.size(), false);
    for (std::size_t k : active.points) is_active[k] = true;

    LocalDependenceRow row;
    row.active = active.points.size();
    row.margin = active.margin;
    row.radius = active.radius;
    for (std::size_t q = 0; q < perturbations; ++q) {
      auto rng = sample_rng(seed, kLocalStream + p * 0x10000ULL, q);
      auto dir = TensorElement(u.x_space(), u.y_space(), gaussian_vector(rng, u.coeffs().size()));
      const double dn = base_norm(spec, dir);
      std::uniform_real_distribution<double> unit(0.05, 0.9);
      double delta = unit(rng) * active.radius / (dn > 0.0 ? dn : 1.0);
      // shrink until every coordinate provably moves less than 0.9 * radius
      std::vector<double> moved;
      double move = 0.0;
      TensorElement candidate = u;
      for (int attempt = 0; attempt < 60; ++attempt) {
        candidate = u.plus(dir.scaled(delta));
        moved = pi_coords(spec, candidate);
        move = 0.0;
        for (std::size_t k = 0; k < moved.size(); ++k)
          move = std::max(move, std::abs(moved[k] - base_coords[k]));
        if (move < 0.9 * active.radius) break;
        delta *= 0.5;
      }
      row.max_coordinate_move = std::max(row.max_coordinate_move, move / active.radius);
      const double rho = luxemburg_norm(spec.family(), moved, spec.options());
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (is_active[k]) continue;
        if (term_value(spec.family()[k], moved[k] / rho) != 0.0) ++row.leaked;
      }
    }
    return row;
  });

  LocalDependenceReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    report.min_margin = std::min(report.min_margin, r.margin);
    report.total_leaked += r.leaked;
    report.rows.push_back(r);
  }
  if (rows.empty()) report.min_margin = 0.0;
  return report;
}

}  // namespace smoothnorm
