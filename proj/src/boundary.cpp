#include "smoothnorm/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "smoothnorm/error.hpp"

namespace smoothnorm {

void ClosureOracle::set(FunctionalRef ref, std::vector<std::size_t> pieces) {
  pieces.push_back(ref.piece);
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  overrides_[ref] = std::move(pieces);
}

std::vector<std::size_t> ClosureOracle::indices(FunctionalRef ref) const {
  if (auto it = overrides_.find(ref); it != overrides_.end()) return it->second;
  return {ref.piece};
}

Decomposition::Decomposition(ModelSpace space, std::vector<Piece> pieces, double epsilon,
                             ClosureOracle oracle)
    : space_(std::move(space)), pieces_(std::move(pieces)), epsilon_(epsilon),
      oracle_(std::move(oracle)) {
  if (!(epsilon_ > 0.0 && epsilon_ < 1.0))
    throw ParameterError("Decomposition: epsilon must lie in (0, 1)");
  if (pieces_.empty()) throw ParameterError("Decomposition: no pieces");
  std::set<std::vector<double>> seen;
  for (std::size_t n = 0; n < pieces_.size(); ++n) {
    pieces_[n].index = n;
    std::set<std::vector<double>> own;
    for (const auto& f : pieces_[n].members) {
      space_.check_vector(f.coords, "Decomposition");
      const auto dn = space_.dual_norm(f.coords);
      if (dn.exact && dn.value > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "Decomposition: member of piece " << n << " has dual norm " << dn.value;
        throw ParameterError(msg.str());
      }
      if (seen.count(f.coords)) {
        std::ostringstream msg;
        msg << "Decomposition: piece " << n << " intersects an earlier piece";
        throw ParameterError(msg.str());
      }
      own.insert(f.coords);
    }
    seen.merge(own);
  }
  for (const auto& [ref, idx] : oracle_.overrides()) {
    if (!contains(ref)) throw ParameterError("Decomposition: closure oracle names a missing functional");
    for (std::size_t i : idx)
      if (i >= pieces_.size())
        throw ParameterError("Decomposition: closure oracle names a missing piece");
  }
}

const Functional& Decomposition::at(FunctionalRef ref) const {
  if (!contains(ref)) throw ParameterError("Decomposition: functional reference out of range");
  return pieces_[ref.piece].members[ref.member];
}

bool Decomposition::contains(FunctionalRef ref) const {
  return ref.piece < pieces_.size() && ref.member < pieces_[ref.piece].members.size();
}

std::vector<Functional> Decomposition::all_functionals() const {
  std::vector<Functional> out;
  for (const auto& p : pieces_) out.insert(out.end(), p.members.begin(), p.members.end());
  return out;
}

std::size_t Decomposition::size() const {
  std::size_t n = 0;
  for (const auto& p : pieces_) n += p.members.size();
  return n;
}

Piece coordinate_piece(std::size_t dim) {
  Piece p;
  p.label = "coordinate";
  for (std::size_t i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      Functional f{std::vector<double>(dim, 0.0)};
      f.coords[i] = s;
      p.members.push_back(std::move(f));
    }
  }
  return p;
}

double epsilon_n(double eps, std::size_t n) {
  return eps * std::ldexp(1.0, -2 * static_cast<int>(n)) / 96.0;
}

double psi_from_indices(double eps, std::span<const std::size_t> closure_indices) {
  if (closure_indices.empty()) throw ParameterError("psi: empty closure index set");
  const std::size_t n_min = *std::min_element(closure_indices.begin(), closure_indices.end());
  double tail = 0.0;
  for (std::size_t i : closure_indices) tail += std::ldexp(1.0, -static_cast<int>(i));
  return 1.0 + 0.5 * eps * std::ldexp(1.0, -static_cast<int>(n_min)) * (1.0 + 0.25 * tail);
}

double psi(const Decomposition& d, FunctionalRef ref) {
  if (!d.contains(ref)) throw ParameterError("psi: functional is in no piece");
  const auto idx = d.oracle().indices(ref);
  return psi_from_indices(d.epsilon(), idx);
}

std::vector<Bin> bin_by_value(std::span<const double> psi_values, double width) {
  if (!(width > 0.0)) throw ParameterError("psi_binning: width must be positive");
  std::map<std::int64_t, Bin> bins;
  for (std::size_t i = 0; i < psi_values.size(); ++i) {
    const auto id = static_cast<std::int64_t>(std::floor((psi_values[i] - 1.0) / width));
    auto& bin = bins[id];
    bin.id = id;
    bin.members.push_back(i);
  }
  std::vector<Bin> out;
  out.reserve(bins.size());
  for (auto& [id, bin] : bins) out.push_back(std::move(bin));
  return out;
}

std::vector<Bin> psi_binning(const Decomposition& d, std::size_t piece) {
  if (piece >= d.pieces().size()) throw ParameterError("psi_binning: piece not in decomposition");
  const auto& members = d.pieces()[piece].members;
  std::vector<double> values(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) values[m] = psi(d, {piece, m});
  return bin_by_value(values, epsilon_n(d.epsilon(), piece));
}

std::vector<std::size_t> greedy_net(const std::vector<Functional>& bin, double separation,
                                    const FunctionalMetric& metric) {
  if (!(separation > 0.0)) throw ParameterError("greedy_net: separation must be positive");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < bin.size(); ++i) {
    const bool far = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return metric(bin[i], bin[k]) >= separation;
    });
    if (far) kept.push_back(i);
  }
  return kept;
}

std::vector<std::size_t> NetB::net_of_piece(std::size_t n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].source.piece == n) out.push_back(i);
  return out;
}

NetB build_net(const Decomposition& d) {
  const auto& space = d.space();
  bool exact = true;
  FunctionalMetric metric = [&](const Functional& f, const Functional& g) {
    const auto dist = space.dual_distance(f, g);
    exact = exact && dist.exact;
    return dist.value;
  };

  NetB net;
  net.lookup_.resize(d.pieces().size());
  for (std::size_t n = 0; n < d.pieces().size(); ++n) {
    const auto& members = d.pieces()[n].members;
    const double sep = epsilon_n(d.epsilon(), n);
    net.lookup_[n].assign(members.size(), std::numeric_limits<std::size_t>::max());
    for (const auto& bin : psi_binning(d, n)) {
      std::vector<Functional> bin_members;
      for (std::size_t m : bin.members) bin_members.push_back(members[m]);
      const auto kept = greedy_net(bin_members, sep, metric);
      std::vector<std::size_t> flat_kept;
      for (std::size_t k : kept) {
        const FunctionalRef ref{n, bin.members[k]};
        NetPoint p;
        p.functional = members[ref.member];
        p.source = ref;
        p.psi = psi(d, ref);
        p.theta = p.psi - sep;
        p.bin = bin.id;
        if (!(p.theta > 1.0)) {
          std::ostringstream msg;
          msg << "build_net: theta = " << p.theta << " <= 1 for piece " << n << " member "
              << ref.member;
          throw ConstructionError(msg.str());
        }
        flat_kept.push_back(net.points_.size());
        net.points_.push_back(std::move(p));
      }
      // every member maps to the first kept point closer than the separation
      for (std::size_t j = 0; j < bin.members.size(); ++j) {
        for (std::size_t k = 0; k < kept.size(); ++k) {
          if (metric(bin_members[j], bin_members[kept[k]]) < sep || kept[k] == j) {
            net.lookup_[n][bin.members[j]] = flat_kept[k];
            break;
          }
        }
      }
    }
  }
  net.metric_exact_ = exact;
  return net;
}

NetCheck verify_net(const Decomposition& d, const NetB& net) {
  NetCheck check;
  check.min_separation = std::numeric_limits<double>::infinity();
  check.min_theta = std::numeric_limits<double>::infinity();
  const auto& space = d.space();
  const auto& pts = net.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    check.min_theta = std::min(check.min_theta, pts[i].theta);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].source.piece != pts[j].source.piece || pts[i].bin != pts[j].bin) continue;
      const double sep = epsilon_n(d.epsilon(), pts[i].source.piece);
      const auto dist = space.dual_distance(pts[i].functional, pts[j].functional);
      check.metric_exact = check.metric_exact && dist.exact;
      check.min_separation = std::min(check.min_separation, dist.value / sep);
      if (dist.value < sep) check.separated = false;
    }
  }
  for (std::size_t n = 0; n < d.pieces().size(); ++n) {
    const double sep = epsilon_n(d.epsilon(), n);
    for (std::size_t m = 0; m < d.pieces()[n].members.size(); ++m) {
      const FunctionalRef ref{n, m};
      const auto& h = pts.at(net.lookup(ref));
      const auto dist = space.dual_distance(d.at(ref), h.functional);
      const double gap = std::abs(psi(d, ref) - h.psi);
      check.max_lookup_distance = std::max(check.max_lookup_distance, dist.value / sep);
      check.max_psi_gap = std::max(check.max_psi_gap, gap / sep);
      if (h.source.piece != n || dist.value > sep || gap > sep) check.property_one = false;
    }
  }
  return check;
}

bool BoundaryReport::pass() const {
  return std::all_of(attained.begin(), attained.end(), [](bool b) { return b; });
}

BoundaryReport check_boundary(const ModelSpace& space, const std::vector<Functional>& functionals,
                              const std::vector<Vector>& sphere_samples, double tol) {
  if (functionals.empty()) throw ParameterError("check_boundary: empty functional set");
  BoundaryReport report;
  for (const auto& x : sphere_samples) {
    const double nx = space.norm(x);
    if (std::abs(nx - 1.0) > tol) {
      std::ostringstream msg;
      msg << "check_boundary: sample has norm " << nx << ", expected 1";
      throw ParameterError(msg.str());
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < functionals.size(); ++i) {
      const double v = functionals[i](x);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    report.best_value.push_back(best);
    report.best_index.push_back(arg);
    report.attained.push_back(best >= 1.0 - tol);
    report.worst_gap = std::max(report.worst_gap, 1.0 - best);
  }
  return report;
}

bool check_lrc_criterion(const Piece& piece) {
  if (piece.members.empty()) return true;
  const auto size = piece.members.front().support_size();
  return std::all_of(piece.members.begin(), piece.members.end(),
                     [size](const Functional& f) { return f.support_size() == size; });
}

}  // namespace smoothnorm
