#include "smoothnorm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smoothnorm/renorm.hpp"
#include "smoothnorm/sampling.hpp"
#include "smoothnorm/tensor.hpp"

namespace smoothnorm {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kApproxStream = 0xa1;
constexpr std::uint64_t kLocalPointStream = 0xa2;
constexpr std::uint64_t kBoundaryCheckStream = 0xa3;
constexpr std::uint64_t kTensorStream = 0xa4;
constexpr std::uint64_t kTensorMStream = 0xa5;
constexpr std::uint64_t kEquivStream = 0xa6;
constexpr std::uint64_t kPipelineStream = 0xa7;

// ---------------------------------------------------------------- parsing

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return obj.at(key);
}

template <class T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::size_t get_size(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(where + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

double get_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

Vector get_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_real(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vector> get_vectors(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of arrays");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_vector(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

OrliczTerm parse_term(const json& v, const std::string& where) {
  const auto type = get_as<std::string>(require(v, "type", where), where + ".type");
  if (type == "power") {
    check_keys(v, {"type", "exponent"}, where);
    return PowerFunction{get_real(require(v, "exponent", where), where + ".exponent")};
  }
  if (type == "smooth") {
    check_keys(v, {"type", "zero", "exceed", "margin", "width"}, where);
    const double margin = v.contains("margin") ? get_real(v["margin"], where + ".margin")
                                               : OrliczFunction::kDefaultExceedMargin;
    const double width = v.contains("width") ? get_real(v["width"], where + ".width") : 1.0;
    return make_orlicz(get_real(require(v, "zero", where), where + ".zero"),
                       get_real(require(v, "exceed", where), where + ".exceed"), margin, width);
  }
  throw ConfigError(where + ": unknown function type '" + type + "'");
}

std::vector<double> parse_weights(const json& v, const std::string& where) {
  if (v.is_array()) return get_vector(v, where);
  check_keys(v, {"geometric", "dim"}, where);
  const double r = get_real(require(v, "geometric", where), where + ".geometric");
  const std::size_t n = get_size(require(v, "dim", where), where + ".dim");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(r, static_cast<double>(i));
  return w;
}

ModelSpace parse_space(const json& v, const std::string& where) {
  const auto name = get_as<std::string>(require(v, "kind", where), where + ".kind");
  const auto kind = space_kind_from_string(name);
  if (!kind) throw ConfigError(where + ": unknown space kind '" + name + "'");
  auto dim = [&] { return get_size(require(v, "dim", where), where + ".dim"); };
  std::optional<ModelSpace> space;
  switch (*kind) {
    case SpaceKind::sup:
      check_keys(v, {"kind", "dim", "monotone_unconditional"}, where);
      space = ModelSpace::sup(dim());
      break;
    case SpaceKind::euclidean:
      check_keys(v, {"kind", "dim", "monotone_unconditional"}, where);
      space = ModelSpace::euclidean(dim());
      break;
    case SpaceKind::orlicz_hm: {
      check_keys(v, {"kind", "dim", "function", "growth_constant", "monotone_unconditional"}, where);
      const double k = v.contains("growth_constant")
                           ? get_real(v["growth_constant"], where + ".growth_constant")
                           : 1.0;
      space = ModelSpace::orlicz_hm(dim(), parse_term(require(v, "function", where), where + ".function"), k);
      break;
    }
    case SpaceKind::lap: {
      check_keys(v, {"kind", "dim", "blocks", "exponents", "monotone_unconditional"}, where);
      const auto& blocks_json = require(v, "blocks", where);
      if (!blocks_json.is_array()) throw ConfigError(where + ".blocks: expected an array");
      std::vector<std::vector<std::size_t>> blocks;
      for (std::size_t i = 0; i < blocks_json.size(); ++i) {
        const std::string w = where + ".blocks[" + std::to_string(i) + "]";
        if (!blocks_json[i].is_array()) throw ConfigError(w + ": expected an array");
        std::vector<std::size_t> block;
        for (const auto& idx : blocks_json[i]) block.push_back(get_size(idx, w));
        blocks.push_back(std::move(block));
      }
      space = ModelSpace::lap(dim(), std::move(blocks),
                              get_vector(require(v, "exponents", where), where + ".exponents"));
      break;
    }
    case SpaceKind::lorentz:
    case SpaceKind::lorentz_predual: {
      check_keys(v, {"kind", "weights", "monotone_unconditional"}, where);
      auto w = parse_weights(require(v, "weights", where), where + ".weights");
      space = *kind == SpaceKind::lorentz ? ModelSpace::lorentz(std::move(w))
                                          : ModelSpace::lorentz_predual(std::move(w));
      break;
    }
    case SpaceKind::polyhedral: {
      check_keys(v, {"kind", "dim", "functionals", "monotone_unconditional"}, where);
      std::vector<Functional> fs;
      for (auto& c : get_vectors(require(v, "functionals", where), where + ".functionals"))
        fs.push_back(Functional{std::move(c)});
      space = ModelSpace::polyhedral(dim(), std::move(fs));
      break;
    }
  }
  if (v.contains("monotone_unconditional"))
    space->set_monotone_unconditional(
        get_as<bool>(v["monotone_unconditional"], where + ".monotone_unconditional"));
  return *space;
}

PipelineRoute parse_route(const std::string& s, const std::string& where) {
  if (s == "auto") return PipelineRoute::automatic;
  if (s == "norming_support") return PipelineRoute::norming_support;
  if (s == "projection_constants") return PipelineRoute::projection_constants;
  throw ConfigError(where + ": unknown route '" + s + "'");
}

DecompositionConfig parse_decomposition(const json& v, const std::string& where) {
  DecompositionConfig out;
  const auto type = get_as<std::string>(require(v, "type", where), where + ".type");
  if (type == "coordinate") {
    check_keys(v, {"type"}, where);
    out.type = DecompositionConfig::Type::coordinate;
  } else if (type == "explicit") {
    check_keys(v, {"type", "pieces", "closure"}, where);
    out.type = DecompositionConfig::Type::explicit_pieces;
    const auto& pieces = require(v, "pieces", where);
    if (!pieces.is_array() || pieces.empty())
      throw ConfigError(where + ".pieces: expected a nonempty array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string w = where + ".pieces[" + std::to_string(i) + "]";
      check_keys(pieces[i], {"label", "functionals"}, w);
      Piece p;
      p.index = i;
      if (pieces[i].contains("label")) p.label = get_as<std::string>(pieces[i]["label"], w + ".label");
      for (auto& c : get_vectors(require(pieces[i], "functionals", w), w + ".functionals"))
        p.members.push_back(Functional{std::move(c)});
      out.pieces.push_back(std::move(p));
    }
    if (v.contains("closure")) {
      const auto& cl = v["closure"];
      if (!cl.is_array()) throw ConfigError(where + ".closure: expected an array");
      for (std::size_t i = 0; i < cl.size(); ++i) {
        const std::string w = where + ".closure[" + std::to_string(i) + "]";
        check_keys(cl[i], {"piece", "member", "pieces"}, w);
        FunctionalRef ref{get_size(require(cl[i], "piece", w), w + ".piece"),
                          get_size(require(cl[i], "member", w), w + ".member")};
        std::vector<std::size_t> idx;
        const auto& ps = require(cl[i], "pieces", w);
        if (!ps.is_array()) throw ConfigError(w + ".pieces: expected an array");
        for (const auto& p : ps) idx.push_back(get_size(p, w + ".pieces"));
        out.closure.set(ref, std::move(idx));
      }
    }
  } else if (type == "pipeline") {
    check_keys(v, {"type", "route", "samples", "level_threshold", "resolution", "max_level", "a",
                   "support_tol"},
               where);
    out.type = DecompositionConfig::Type::pipeline;
    auto& p = out.pipeline;
    if (v.contains("route")) p.route = parse_route(get_as<std::string>(v["route"], where), where + ".route");
    if (v.contains("samples")) out.pipeline_samples = get_size(v["samples"], where + ".samples");
    if (v.contains("level_threshold"))
      p.chain.level_threshold = get_real(v["level_threshold"], where + ".level_threshold");
    if (v.contains("resolution")) p.chain.resolution = get_size(v["resolution"], where + ".resolution");
    if (v.contains("max_level")) p.chain.max_level = get_size(v["max_level"], where + ".max_level");
    if (v.contains("support_tol")) p.support_tol = get_real(v["support_tol"], where + ".support_tol");
    if (v.contains("a")) {
      const auto& a = v["a"];
      const std::string w = where + ".a";
      check_keys(a, {"strategy", "values"}, w);
      const auto s = get_as<std::string>(require(a, "strategy", w), w + ".strategy");
      if (s == "tail_gap") {
        p.a.strategy = AStrategy::tail_gap;
      } else if (s == "unit") {
        p.a.strategy = AStrategy::unit;
      } else if (s == "explicit") {
        p.a.strategy = AStrategy::explicit_values;
        p.a.values = get_vector(require(a, "values", w), w + ".values");
      } else {
        throw ConfigError(w + ": unknown strategy '" + s + "'");
      }
    }
    if (out.pipeline_samples == 0) throw ConfigError(where + ".samples: must be positive");
  } else {
    throw ConfigError(where + ": unknown decomposition type '" + type + "'");
  }
  return out;
}

void parse_budgets(const json& v, BudgetConfig& b) {
  const std::string where = "samples";
  check_keys(v, {"approx", "claim2d", "localdep_points", "localdep_perturbations", "boundary",
                 "tensor", "tensor_m", "equiv"},
             where);
  auto set = [&](const char* key, std::size_t& dst) {
    if (v.contains(key)) dst = get_size(v[key], where + "." + key);
  };
  set("approx", b.approx);
  set("claim2d", b.claim2d);
  set("localdep_points", b.localdep_points);
  set("localdep_perturbations", b.localdep_perturbations);
  set("boundary", b.boundary);
  set("tensor", b.tensor);
  set("tensor_m", b.tensor_m);
  set("equiv", b.equiv);
}

void parse_tolerances(const json& v, ToleranceConfig& t) {
  const std::string where = "tolerances";
  check_keys(v, {"approx", "claim2d", "boundary", "richardson", "tensor", "product", "equiv"}, where);
  auto set = [&](const char* key, double& dst) {
    if (v.contains(key)) dst = get_real(v[key], where + "." + key);
    if (!(dst >= 0.0)) throw ConfigError(where + "." + key + ": must be nonnegative");
  };
  set("approx", t.approx);
  set("claim2d", t.claim2d);
  set("boundary", t.boundary);
  set("richardson", t.richardson);
  set("tensor", t.tensor);
  set("product", t.product);
  set("equiv", t.equiv);
}

void parse_smooth(const json& v, SmoothConfig& s) {
  const std::string where = "smooth";
  check_keys(v, {"points", "directions", "steps", "kink_floor"}, where);
  if (v.contains("points")) s.points = get_vectors(v["points"], where + ".points");
  if (v.contains("directions")) s.directions = get_vectors(v["directions"], where + ".directions");
  if (v.contains("steps")) s.steps = get_vector(v["steps"], where + ".steps");
  if (v.contains("kink_floor")) s.kink_floor = get_real(v["kink_floor"], where + ".kink_floor");
}

bool known_suite(const std::string& s) {
  const auto& names = suite_names();
  return s == "all" || std::find(names.begin(), names.end(), s) != names.end();
}

// ---------------------------------------------------------------- output helpers

std::string csv_number(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

json to_json(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// ---------------------------------------------------------------- suites

struct Context {
  const RunConfig& config;
  std::uint64_t seed;
  std::size_t workers;
  ToleranceConfig tol;
  const PhiNormSpec& spec;
  std::optional<ApproximationReport> approx;
  std::vector<TensorElement> approx_samples;
  std::vector<Table> tables;
};

const ApproximationReport& approximation(Context& ctx) {
  if (!ctx.approx) {
    ctx.approx_samples = random_elements(ctx.spec, ctx.config.budgets.approx, ctx.seed, kApproxStream);
    ctx.approx = check_approximation(ctx.spec, ctx.approx_samples, ctx.tol.approx, ctx.workers);
    std::ostringstream csv;
    csv << "sample_id";
    const std::size_t n = ctx.spec.x_space().dim() * ctx.spec.y_space().dim();
    for (std::size_t i = 0; i < n; ++i) csv << ",u_" << i;
    csv << ",base_norm,phi_norm,ratio\n";
    for (std::size_t s = 0; s < ctx.approx_samples.size(); ++s) {
      csv << s;
      for (double c : ctx.approx_samples[s].coeffs()) csv << ',' << csv_number(c);
      const auto& row = ctx.approx->rows[s];
      csv << ',' << csv_number(row.base) << ',' << csv_number(row.phi) << ','
          << csv_number(row.ratio) << '\n';
    }
    ctx.tables.push_back({"approx.csv", csv.str()});
  }
  return *ctx.approx;
}

json suite_approx(Context& ctx) {
  const auto& r = approximation(ctx);
  return json{{"pass", r.upper_ok},
              {"samples", r.rows.size()},
              {"min_ratio", r.min_ratio},
              {"max_ratio", r.max_ratio},
              {"bound", 1.0 + ctx.spec.epsilon()},
              {"tol", ctx.tol.approx}};
}

json suite_claim1(Context& ctx) {
  const auto& r = approximation(ctx);
  return json{{"pass", r.lower_ok},
              {"samples", r.rows.size()},
              {"min_gap", r.min_gap},
              {"min_ratio", r.min_ratio}};
}

json suite_claim2d(Context& ctx) {
  const auto& Y = ctx.spec.y_space();
  Functional g{std::vector<double>(Y.dim(), 0.0)};
  g.coords[0] = 1.0;
  json rows = json::array();
  bool pass = true;
  double worst = std::numeric_limits<double>::infinity();
  const auto reports = parallel_map<Claim2dReport>(
      ctx.spec.net().size(), ctx.workers, [&](std::size_t k) {
        return verify_claim2d(ctx.spec, k, g, {ctx.config.budgets.claim2d, ctx.seed}, ctx.tol.claim2d);
      });
  for (const auto& r : reports) {
    pass = pass && r.pass;
    worst = std::min(worst, r.bound - r.max_value);
    rows.push_back(json{{"net_point", r.net_point}, {"max_value", r.max_value}, {"bound", r.bound}});
  }
  return json{{"pass", pass},
              {"net_points", reports.size()},
              {"samples_per_point", ctx.config.budgets.claim2d},
              {"min_slack", reports.empty() ? 0.0 : worst},
              {"tol", ctx.tol.claim2d},
              {"rows", rows}};
}

json suite_localdep(Context& ctx) {
  const auto points =
      random_elements(ctx.spec, ctx.config.budgets.localdep_points, ctx.seed, kLocalPointStream);
  const auto r = check_local_dependence(ctx.spec, points, ctx.config.budgets.localdep_perturbations,
                                        ctx.seed, ctx.workers);
  double move = 0.0;
  std::size_t min_active = std::numeric_limits<std::size_t>::max();
  std::size_t max_active = 0;
  for (const auto& row : r.rows) {
    move = std::max(move, row.max_coordinate_move);
    min_active = std::min(min_active, row.active);
    max_active = std::max(max_active, row.active);
  }
  return json{{"pass", r.pass()},
              {"points", r.rows.size()},
              {"perturbations", ctx.config.budgets.localdep_perturbations},
              {"min_margin", r.min_margin},
              {"leaked", r.total_leaked},
              {"max_coordinate_move", move},
              {"active_min", r.rows.empty() ? 0 : min_active},
              {"active_max", max_active}};
}

json suite_smooth(Context& ctx) {
  const std::size_t n = ctx.spec.x_space().dim() * ctx.spec.y_space().dim();
  auto points = ctx.config.smooth.points;
  auto dirs = ctx.config.smooth.directions;
  if (points.empty()) {
    // e_0 (x) e_0 + e_1 (x) e_0: the ridge between the first two coordinates
    Vector x(n, 0.0);
    x[0] = 1.0;
    if (ctx.spec.x_space().dim() > 1) x[ctx.spec.y_space().dim()] = 1.0;
    points.push_back(x);
  }
  if (dirs.empty()) {
    for (const auto& x : points) {
      Vector d(n, 0.0);
      std::size_t first = n, second = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        if (first == n) first = i;
        else if (second == n) second = i;
      }
      if (first < n) d[first] = 1.0;
      if (second < n) d[second] = -1.0;
      if (first == n) d[0] = 1.0;
      dirs.push_back(d);
    }
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());
  }
  for (const auto& x : points)
    if (x.size() != n) throw ConfigError("smooth.points: expected " + std::to_string(n) + " coordinates");
  for (const auto& d : dirs)
    if (d.size() != n) throw ConfigError("smooth.directions: expected " + std::to_string(n) + " coordinates");

  const NormFunction phi = [&](std::span<const double> v) { return phi_norm(ctx.spec, v); };
  const NormFunction base = [&](std::span<const double> v) {
    return base_norm(ctx.spec, as_element(ctx.spec, v));
  };

  std::ostringstream csv;
  csv << "norm,point,direction,step,first_difference,second_difference\n";
  json rows = json::array();
  bool pass = true;
  double max_rich = 0.0;
  std::size_t base_kinks = 0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto rp = smoothness_check(phi, points[p], dirs, ctx.config.smooth.steps,
                                     ctx.config.smooth.kink_floor);
    const auto rb = smoothness_check(base, points[p], dirs, ctx.config.smooth.steps,
                                     ctx.config.smooth.kink_floor);
    for (const auto& [label, rep] : {std::pair<const char*, const SmoothnessReport*>{"phi", &rp},
                                     {"base", &rb}}) {
      for (std::size_t d = 0; d < rep->directions.size(); ++d)
        for (const auto& row : rep->directions[d].rows)
          csv << label << ',' << p << ',' << d << ',' << csv_number(row.step) << ','
              << csv_number(row.first) << ',' << csv_number(row.second) << '\n';
    }
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const auto& dp = rp.directions[d];
      const auto& db = rb.directions[d];
      rows.push_back(json{{"point", p},
                          {"direction", d},
                          {"phi_kink", dp.kink},
                          {"phi_max_second", dp.max_second},
                          {"phi_richardson", dp.max_richardson},
                          {"base_kink", db.kink},
                          {"base_max_second", db.max_second}});
      if (db.kink) ++base_kinks;
    }
    max_rich = std::max(max_rich, rp.max_richardson());
    if (rp.kink() || rp.max_richardson() > ctx.tol.richardson) pass = false;
  }
  ctx.tables.push_back({"fd.csv", csv.str()});
  json points_json = json::array();
  for (const auto& x : points) points_json.push_back(to_json(x));
  json dirs_json = json::array();
  for (const auto& d : dirs) dirs_json.push_back(to_json(d));
  return json{{"pass", pass},
              {"points", points_json},
              {"directions", dirs_json},
              {"steps", to_json(ctx.config.smooth.steps)},
              {"max_richardson", max_rich},
              {"richardson_tol", ctx.tol.richardson},
              {"base_kinks", base_kinks},
              {"rows", rows}};
}

json suite_boundary(Context& ctx) {
  const auto& d = ctx.spec.decomposition();
  const auto samples =
      sphere_samples(d.space(), ctx.config.budgets.boundary, ctx.seed, kBoundaryCheckStream);
  const auto br = check_boundary(d.space(), d.all_functionals(), samples, ctx.tol.boundary);
  const auto nc = verify_net(d, ctx.spec.net());
  bool lrc = true;
  for (const auto& p : d.pieces()) lrc = lrc && check_lrc_criterion(p);
  return json{{"pass", br.pass() && nc.pass()},
              {"samples", samples.size()},
              {"worst_gap", br.worst_gap},
              {"pieces", d.pieces().size()},
              {"functionals", d.size()},
              {"net_size", ctx.spec.net().size()},
              {"separated", nc.separated},
              {"property_one", nc.property_one},
              {"min_separation", nc.min_separation},
              {"max_lookup_distance", nc.max_lookup_distance},
              {"max_psi_gap", nc.max_psi_gap},
              {"min_theta", nc.min_theta},
              {"metric_exact", nc.metric_exact},
              {"lrc", lrc}};
}

json suite_tensor(Context& ctx) {
  const ModelSpace& X = ctx.spec.x_space();
  const ModelSpace Y = ModelSpace::euclidean(ctx.config.tensor_y_dim);
  const std::size_t count = ctx.config.budgets.tensor;

  std::vector<TensorElement> samples;
  double identity_err = 0.0;
  double enum_vs_ascent = 0.0;
  bool ascent_below = true;
  const bool enumerable = has_enumerable_dual(X);
  for (std::size_t s = 0; s < count; ++s) {
    auto rng = sample_rng(ctx.seed, kTensorStream, s);
    TensorElement u(X, Y, gaussian_vector(rng, X.dim() * Y.dim()));
    const Functional f = X.norming_functional(sphere_sample(X, rng));
    const Functional g{gaussian_vector(rng, Y.dim())};
    const double direct = apply_pair(f, g, u);
    identity_err = std::max(identity_err, std::abs(direct - g(apply_fY(f, u))));
    identity_err = std::max(identity_err, std::abs(direct - f(apply_gX(g, u))));
    const auto inj = injective_norm(u);
    if (enumerable) {
      const auto asc = injective_norm(u, InjectiveStrategy::sample_ascent);
      enum_vs_ascent = std::max(enum_vs_ascent, std::abs(inj.value - asc.value));
      if (asc.value > inj.value * (1.0 + 1e-12)) ascent_below = false;
    }
    samples.push_back(u.scaled(1.0 / inj.value));
  }

  // M: the coordinate functionals of Y plus sampled unit functionals.
  std::vector<Functional> m_set;
  for (std::size_t j = 0; j < Y.dim(); ++j) {
    Functional e{std::vector<double>(Y.dim(), 0.0)};
    e.coords[j] = 1.0;
    m_set.push_back(e);
    e.coords[j] = -1.0;
    m_set.push_back(e);
  }
  for (const auto& y : sphere_samples(Y, ctx.config.budgets.tensor_m, ctx.seed, kTensorMStream))
    m_set.push_back(Functional{y});
  const auto n_set = ctx.spec.decomposition().all_functionals();
  const auto sampled = boundary_product_check(n_set, m_set, samples, ctx.tol.product);

  std::vector<TensorElement> rank_one;
  for (std::size_t s = 0; s < std::min<std::size_t>(count, 50); ++s) {
    auto rng = sample_rng(ctx.seed, kTensorStream + 1, s);
    Vector y(Y.dim(), 0.0);
    y[s % Y.dim()] = 1.0;
    rank_one.push_back(TensorElement::rank_one(X, Y, sphere_sample(X, rng), y));
  }
  const auto exact = boundary_product_check(n_set, m_set, rank_one, ctx.tol.tensor);

  const bool pass = identity_err <= ctx.tol.tensor && ascent_below && sampled.pass() && exact.pass();
  return json{{"pass", pass},
              {"samples", count},
              {"y_dim", Y.dim()},
              {"identity_max_error", identity_err},
              {"enumerable", enumerable},
              {"enumerate_minus_ascent", enum_vs_ascent},
              {"product_worst_gap", sampled.worst_gap},
              {"product_pass", sampled.pass()},
              {"rank_one_samples", rank_one.size()},
              {"rank_one_worst_gap", exact.worst_gap},
              {"rank_one_pass", exact.pass()}};
}

json suite_equiv(Context& ctx) {
  const ModelSpace& X = ctx.config.space.value();
  if (!X.monotone_unconditional())
    return json{{"pass", true}, {"applicable", false}, {"reason", "no monotone unconditional basis"}};
  const auto sphere = sphere_samples(X, ctx.config.budgets.equiv, ctx.seed, kEquivStream);
  ChainOptions copts = ctx.config.decomposition.pipeline.chain;
  copts.seed = ctx.seed;
  const auto chain = build_chain(X, sphere, copts);

  bool identity_ok = true;
  double identity_err = 0.0;
  bool monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  std::ostringstream csv;
  csv << "level,added,samples,b,c,b_all\n";
  std::vector<double> b_all(chain.levels());
  for (std::size_t n = 0; n < chain.levels(); ++n) {
    b_all[n] = compute_bn(chain.h(n), sphere);
    if (b_all[n] < prev) monotone = false;
    prev = std::max(prev, b_all[n]);
    if (chain.exact()) {
      // on the whole sample set, b_n from H_n equals c_n from projections
      const double cn = compute_cn(X, sphere, n);
      identity_err = std::max(identity_err, std::abs(cn - b_all[n]));
    }
  }
  if (identity_err > ctx.tol.equiv) identity_ok = false;

  const auto built = build_F(chain, ctx.config.decomposition.pipeline.a);
  json levels = json::array();
  for (std::size_t n = 0; n < chain.levels(); ++n) {
    json lvl{{"level", n},
             {"added", chain.added(n).size()},
             {"samples", chain.samples(n).size()},
             {"a", built.a[n]},
             {"b_all", b_all[n]}};
    lvl["b"] = chain.b(n) ? json(*chain.b(n)) : json(nullptr);
    lvl["c"] = chain.c(n) ? json(*chain.c(n)) : json(nullptr);
    levels.push_back(lvl);
    csv << n << ',' << chain.added(n).size() << ',' << chain.samples(n).size() << ','
        << (chain.b(n) ? csv_number(*chain.b(n)) : "") << ','
        << (chain.c(n) ? csv_number(*chain.c(n)) : "") << ',' << csv_number(b_all[n]) << '\n';
  }
  ctx.tables.push_back({"equiv.csv", csv.str()});
  const bool equivalent = built.equivalent(ctx.tol.equiv);
  return json{{"pass", identity_ok && monotone && built.attained && built.lrc && equivalent},
              {"applicable", true},
              {"samples", sphere.size()},
              {"exact_support_balls", chain.exact()},
              {"identity_max_error", identity_err},
              {"b_monotone", monotone},
              {"attained", built.attained},
              {"lrc", built.lrc},
              {"equivalent", equivalent},
              {"lower_bound", built.lower_bound},
              {"upper_bound", built.upper_bound},
              {"min_ratio", built.min_ratio},
              {"max_ratio", built.max_ratio},
              {"F_size", built.norm.functionals().size()},
              {"levels", levels}};
}

using SuiteFn = json (*)(Context&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"approx", suite_approx},   {"claim1", suite_claim1},     {"claim2d", suite_claim2d},
      {"localdep", suite_localdep}, {"smooth", suite_smooth},   {"boundary", suite_boundary},
      {"tensor", suite_tensor},   {"equiv", suite_equiv},
  };
  return table;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suite_table()) out.push_back(name);
    return out;
  }();
  return names;
}

RunConfig parse_config(std::string_view text, std::string name) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(name + ": " + e.what());
  }
  check_keys(root,
             {"name", "space", "factor", "decomposition", "epsilon", "seed", "samples", "tolerances",
              "smooth", "tensor", "suites"},
             name);
  RunConfig cfg;
  cfg.name = root.contains("name") ? get_as<std::string>(root["name"], "name") : name;
  try {
    cfg.space = parse_space(require(root, "space", name), "space");
    if (root.contains("factor")) {
      cfg.factor = parse_space(root["factor"], "factor");
      if (cfg.factor->kind() != SpaceKind::euclidean)
        throw ConfigError("factor: must be euclidean (dim 1 is the scalar field)");
    }
    cfg.epsilon = get_real(require(root, "epsilon", name), "epsilon");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError("epsilon: must lie in (0, 1)");
    if (root.contains("decomposition"))
      cfg.decomposition = parse_decomposition(root["decomposition"], "decomposition");
    if (root.contains("seed")) {
      if (!root["seed"].is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
      cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("samples")) parse_budgets(root["samples"], cfg.budgets);
    if (root.contains("tolerances")) parse_tolerances(root["tolerances"], cfg.tolerances);
    if (root.contains("smooth")) parse_smooth(root["smooth"], cfg.smooth);
    if (root.contains("tensor")) {
      check_keys(root["tensor"], {"y_dim"}, "tensor");
      if (root["tensor"].contains("y_dim")) cfg.tensor_y_dim = get_size(root["tensor"]["y_dim"], "tensor.y_dim");
      if (cfg.tensor_y_dim == 0) throw ConfigError("tensor.y_dim: must be positive");
    }
    if (root.contains("suites")) {
      const auto& s = root["suites"];
      if (!s.is_array()) throw ConfigError("suites: expected an array of names");
      for (const auto& v : s) {
        auto n = get_as<std::string>(v, "suites");
        if (!known_suite(n)) throw ConfigError("suites: unknown suite '" + n + "'");
        cfg.suites.push_back(std::move(n));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.filename().string());
}

RunResult run_suites(const RunConfig& config, const RunOptions& options) {
  if (!config.space) throw ConfigError("config has no space");
  std::vector<std::string> requested = options.suites.empty() ? config.suites : options.suites;
  if (requested.empty()) requested.push_back("all");
  std::set<std::string> selected;
  for (const auto& s : requested) {
    if (!known_suite(s)) throw ConfigError("unknown suite '" + s + "'");
    if (s == "all")
      selected.insert(suite_names().begin(), suite_names().end());
    else
      selected.insert(s);
  }
  const auto seed = options.seed ? options.seed : config.seed;
  if (!seed) throw ConfigError("a seed is required (config 'seed' or --seed)");

  ToleranceConfig tol = config.tolerances;
  if (options.tol) tol.approx = *options.tol;
  const ModelSpace factor = config.factor.value_or(ModelSpace::scalar());
  const std::size_t workers = std::max<std::size_t>(1, options.workers);

  RunResult result;
  json report;
  report["config"] = config.name;
  report["seed"] = *seed;
  report["epsilon"] = config.epsilon;
  report["space"] = config.space->describe();
  report["factor"] = factor.describe();

  auto t0 = std::chrono::steady_clock::now();
  std::optional<PhiNormSpec> spec;
  json build;
  try {
    RenormBuildOptions ropts;
    ropts.boundary_samples = config.budgets.boundary;
    ropts.seed = *seed;
    ropts.boundary_tol = tol.boundary;
    const auto& dc = config.decomposition;
    switch (dc.type) {
      case DecompositionConfig::Type::coordinate: {
        Decomposition d(*config.space, {coordinate_piece(config.space->dim())}, config.epsilon);
        spec.emplace(build_renorm(*config.space, d, factor, ropts));
        build["decomposition"] = "coordinate";
        break;
      }
      case DecompositionConfig::Type::explicit_pieces: {
        Decomposition d(*config.space, dc.pieces, config.epsilon, dc.closure);
        spec.emplace(build_renorm(*config.space, d, factor, ropts));
        build["decomposition"] = "explicit";
        break;
      }
      case DecompositionConfig::Type::pipeline: {
        auto popts = dc.pipeline;
        popts.renorm = ropts;
        popts.chain.seed = *seed;
        const auto sphere =
            sphere_samples(*config.space, dc.pipeline_samples, *seed, kPipelineStream);
        auto pr = corollary_b_pipeline(*config.space, sphere, config.epsilon, factor, popts);
        build["decomposition"] = "pipeline";
        build["route"] = to_string(pr.route);
        build["supports_found"] = pr.supports_found;
        build["max_support"] = pr.max_support;
        if (pr.built) {
          build["F_size"] = pr.built->norm.functionals().size();
          build["equivalence_lower"] = pr.built->lower_bound;
          build["equivalence_upper"] = pr.built->upper_bound;
        }
        spec.emplace(std::move(pr.spec));
        break;
      }
    }
    build["pass"] = true;
    build["net_size"] = spec->net().size();
    build["pieces"] = spec->decomposition().pieces().size();
    build["max_psi"] = spec->max_psi();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    build["pass"] = false;
    build["error"] = e.what();
  }
  result.seconds["build"] = seconds_since(t0);
  report["build"] = build;

  json suites = json::object();
  bool pass = build["pass"].get<bool>();
  if (spec) {
    Context ctx{config, *seed, workers, tol, *spec, std::nullopt, {}, {}};
    for (const auto& [name, fn] : suite_table()) {
      if (!selected.count(name)) continue;
      auto ts = std::chrono::steady_clock::now();
      json r;
      try {
        r = fn(ctx);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        r = json{{"pass", false}, {"error", e.what()}};
      }
      result.seconds[name] = seconds_since(ts);
      const bool ok = r["pass"].get<bool>();
      result.suite_pass[name] = ok;
      pass = pass && ok;
      suites[name] = std::move(r);
    }
    // "--suite smooth" on its own emits only the finite-difference table
    result.tables = std::move(ctx.tables);
  } else {
    for (const auto& name : suite_names())
      if (selected.count(name)) result.suite_pass[name] = false;
  }
  report["suites"] = suites;
  report["pass"] = pass;
  result.pass = pass;
  result.report = report.dump(2) + "\n";
  return result;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("report.json", result.report);
  json timing = json::object();
  for (const auto& [name, s] : result.seconds) timing[name] = s;
  write("timing.json", timing.dump(2) + "\n");
  for (const auto& t : result.tables) write(t.name, t.csv);
}

}  // namespace smoothnorm
