#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l2disc/haar.hpp"
#include "l2disc/pointset.hpp"

namespace l2disc {

/// Occupancy histogram r -> a_r(j) of the 2^|j| boxes of one shape.
struct ShapeCensus {
  DyadicShape shape;
  std::map<std::uint64_t, std::uint64_t> counts;

  std::uint64_t a(std::uint64_t r) const {
    const auto it = counts.find(r);
    return it == counts.end() ? 0 : it->second;
  }
};

/// b_u: one-point boxes of level l with exactly u one-point parents among
/// their existing parents of level l - 1. Boxes of shape (l, 0) or (0, l)
/// have a single parent, so u <= 1 there.
struct TypeCounts {
  std::uint64_t b0 = 0;
  std::uint64_t b1 = 0;
  std::uint64_t b2 = 0;
};

struct LevelCensus {
  int level = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::optional<TypeCounts> types;  ///< present for level >= 1

  std::uint64_t a(std::uint64_t r) const {
    const auto it = counts.find(r);
    return it == counts.end() ? 0 : it->second;
  }
};

inline constexpr int kMaxShapeCensusLevel = 24;
inline constexpr int kMaxLevelCensusLevel = 20;

/// Throws DomainError for an improper shape, SizeLimitError above level 24.
ShapeCensus shape_census(const PointSet& set, DyadicShape shape);

/// Aggregates the level+1 shapes of one level and classifies one-point
/// boxes by type. Throws SizeLimitError above level 20.
LevelCensus level_census(const PointSet& set, int level);

/// Edges between one-point boxes of `level` and one-point boxes of
/// `level + 1` contained in them, enumerated from the coarse side by
/// visiting all four sub-boxes of each one-point box.
std::uint64_t count_bipartite_edges(const PointSet& set, int level);

struct IdentityCheck {
  std::string name;
  int level;
  bool pass;
  std::string detail;
};

/// Integer identities of the occupancy census for levels 0..max_level:
/// per-shape totals and a_0 bound, per-level totals, the two type identities,
/// the derived b_0/b_1 identity and the direct edge count.
std::vector<IdentityCheck> check_identities(const PointSet& set, int max_level);

/// A one-point box with the two boxes of the next level (one per refined
/// coordinate) that hold the same point.
struct RhoBundle {
  DyadicBox parent;
  std::array<DyadicBox, 2> children;
  double rho;
};

/// Throws DomainError unless `parent` holds exactly one point.
RhoBundle rho_bundle(const PointSet& set, const DyadicBox& parent);

/// rho for a box whose only point is z, with a real point count N.
double rho_one_point(const DyadicBox& parent, const Point2& z, double n_points);

/// N = 2^(M + kappa) with M = floor(log2 N); kappa is exactly 0 for powers of two.
struct DyadicSplit {
  int M;
  double kappa;
};

DyadicSplit split_count(std::uint64_t n);

/// sum_{l >= first_level} 2^l (l+1)(2^l - N) N^2 2^(-4l-8) in closed form.
/// Requires 2^first_level > N.
double empty_tail_sum(double n_points, int first_level);

struct MasterTerms {
  int M;
  double kappa;
  double empty_direct;  ///< empty boxes of levels 0..M+1, counted
  double empty_tail;    ///< empty boxes of levels >= M+2, lower bound in closed form
  double bundles_M;     ///< sum over one-point boxes of level M of 2^M rho
  double bundles_M1;    ///< sum over type-u boxes of level M+1 of (2-u) 2^M rho
  double total;
};

/// Right-hand side of the bundled Parseval lower bound. Throws DomainError for N < 2.
MasterTerms master_rhs(const PointSet& set);

/// Empty-box-only lower bound summed from level M+1. Throws DomainError for N < 2.
double hm_rhs(const PointSet& set);

/// Every link of the lower-bound argument evaluated on one set:
///   l2 >= master >= 2^-M Sigma_1 + Sigma_2 >= Sigma'_1 + Sigma'_2
///      >= (M+1) Delta(kappa) >= ln N Delta(kappa) / ln 2.
struct ProofChain {
  std::uint64_t n;
  int M;
  double kappa;
  double l2_squared;
  double master;
  double census_route;
  double primed_route;
  double level_route;
  double log_route;
  double hm;

  /// Links that fail by more than `rel_tol` times the larger side.
  std::vector<std::string> violations(double rel_tol = 1e-12) const;
};

ProofChain proof_chain(const PointSet& set);

/// CSV "level,r,a_r" for levels 0..max_level.
void write_counts_csv(std::ostream& out, const std::vector<LevelCensus>& levels);
/// CSV "level,b0,b1,b2" for the levels that carry types.
void write_types_csv(std::ostream& out, const std::vector<LevelCensus>& levels);

}  // namespace l2disc
