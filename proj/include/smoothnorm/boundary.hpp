#pragma once

// Boundary decompositions of a dual ball, the psi / theta / epsilon_n
// bookkeeping of the renorming construction, psi-binning and greedy maximal
// separated nets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smoothnorm/spaces.hpp"

namespace smoothnorm {

/// Identity of a functional inside a decomposition: (piece, position in piece).
struct FunctionalRef {
  std::size_t piece = 0;
  std::size_t member = 0;
  auto operator<=>(const FunctionalRef&) const = default;
};

struct Piece {
  std::size_t index = 0;
  std::vector<Functional> members;
  std::string label;
};

/// I(f): indices of the pieces whose w*-closure contains f. At finite scale this
/// is the singleton of f's own piece unless overridden.
class ClosureOracle {
 public:
  /// Declares I(f) for one functional. The own piece is added if missing.
  void set(FunctionalRef ref, std::vector<std::size_t> pieces);
  /// Sorted I(f).
  std::vector<std::size_t> indices(FunctionalRef ref) const;
  const std::map<FunctionalRef, std::vector<std::size_t>>& overrides() const { return overrides_; }

 private:
  std::map<FunctionalRef, std::vector<std::size_t>> overrides_;
};

class Decomposition {
 public:
  /// Pieces are renumbered 0..N-1 in the given order. Throws ParameterError when
  /// pieces intersect, a member has the wrong dimension or dual norm > 1 + 1e-9,
  /// epsilon is outside (0, 1), or the oracle names a missing piece/member.
  Decomposition(ModelSpace space, std::vector<Piece> pieces, double epsilon,
                ClosureOracle oracle = {});

  const ModelSpace& space() const { return space_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double epsilon() const { return epsilon_; }
  const ClosureOracle& oracle() const { return oracle_; }

  const Functional& at(FunctionalRef ref) const;
  bool contains(FunctionalRef ref) const;
  std::vector<Functional> all_functionals() const;
  std::size_t size() const;

 private:
  ModelSpace space_;
  std::vector<Piece> pieces_;
  double epsilon_;
  ClosureOracle oracle_;
};

/// {+-e_i*} as a single piece.
Piece coordinate_piece(std::size_t dim);

/// epsilon * 4^-n / 96
double epsilon_n(double eps, std::size_t n);

/// 1 + eps/2 * 2^-min(I) * (1 + 1/4 * sum_{i in I} 2^-i); I must be nonempty.
double psi_from_indices(double eps, std::span<const std::size_t> closure_indices);

double psi(const Decomposition& d, FunctionalRef ref);

struct Bin {
  std::int64_t id = 0;  // covers [1 + id*width, 1 + (id+1)*width)
  std::vector<std::size_t> members;
};

/// Half-open bins of the given width anchored at 1, in increasing id order.
std::vector<Bin> bin_by_value(std::span<const double> psi_values, double width);

/// Bins of piece `piece` of d at width epsilon_n(d.epsilon(), piece).
std::vector<Bin> psi_binning(const Decomposition& d, std::size_t piece);

using FunctionalMetric = std::function<double(const Functional&, const Functional&)>;

/// Greedy maximal separated subset, insertion in input order. Returns the
/// positions kept.
std::vector<std::size_t> greedy_net(const std::vector<Functional>& bin, double separation,
                                    const FunctionalMetric& metric);

struct NetPoint {
  Functional functional;
  FunctionalRef source;
  double psi = 0.0;
  double theta = 0.0;  // psi - epsilon_n
  std::int64_t bin = 0;
};

class NetB {
 public:
  const std::vector<NetPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  /// Net points drawn from piece n, as positions into points().
  std::vector<std::size_t> net_of_piece(std::size_t n) const;
  /// The net point h assigned to f by property (1).
  std::size_t lookup(FunctionalRef ref) const { return lookup_.at(ref.piece).at(ref.member); }
  bool metric_exact() const { return metric_exact_; }

 private:
  friend NetB build_net(const Decomposition& d);
  std::vector<NetPoint> points_;
  std::vector<std::vector<std::size_t>> lookup_;
  bool metric_exact_ = true;
};

/// Builds Gamma_0..Gamma_N; throws ConstructionError if some theta <= 1.
NetB build_net(const Decomposition& d);

struct NetCheck {
  double min_separation = 0.0;     // smallest ratio distance/epsilon_n inside a bin
  double max_lookup_distance = 0;  // largest ||f - h|| / epsilon_n
  double max_psi_gap = 0.0;        // largest |psi(f) - psi(h)| / epsilon_n
  double min_theta = 0.0;
  bool separated = true;
  bool property_one = true;
  bool metric_exact = true;
  bool pass() const { return separated && property_one; }
};

/// Exhaustive check of separation, the net property and property (1).
NetCheck verify_net(const Decomposition& d, const NetB& net);

struct BoundaryReport {
  std::vector<double> best_value;        // max_f f(x)
  std::vector<std::size_t> best_index;   // attaining functional
  std::vector<bool> attained;
  double worst_gap = 0.0;                // max over samples of 1 - best_value
  bool pass() const;
};

/// Each sample must have space norm 1 within tol (ParameterError otherwise).
BoundaryReport check_boundary(const ModelSpace& space, const std::vector<Functional>& functionals,
                              const std::vector<Vector>& sphere_samples, double tol);

/// True iff all members have the same (finite) support size; vacuous when empty.
bool check_lrc_criterion(const Piece& piece);

}  // namespace smoothnorm
