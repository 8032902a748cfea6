#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "l2disc/pointset.hpp"
#include "l2disc/rational.hpp"

namespace l2disc {

/// Exponent pair j = (j1, j2) with components >= -1. A -1 component stands
/// for the constant function 1 in that coordinate.
struct DyadicShape {
  int j1 = 0;
  int j2 = 0;

  /// max(0, j1) + max(0, j2).
  int level() const noexcept { return (j1 > 0 ? j1 : 0) + (j2 > 0 ? j2 : 0); }
  bool is_proper() const noexcept { return j1 >= 0 && j2 >= 0; }

  friend bool operator==(const DyadicShape&, const DyadicShape&) = default;
};

/// I_{j,m} = [m1 2^-j1, (m1+1) 2^-j1) x [m2 2^-j2, (m2+1) 2^-j2) for a
/// proper shape j. Construction validates 0 <= j_i <= 60 and m_i < 2^j_i.
class DyadicBox {
 public:
  DyadicBox(DyadicShape shape, std::uint64_t m1, std::uint64_t m2);

  const DyadicShape& shape() const noexcept { return shape_; }
  std::uint64_t m1() const noexcept { return m1_; }
  std::uint64_t m2() const noexcept { return m2_; }
  int level() const noexcept { return shape_.level(); }

  bool contains(const Point2& z) const;

  friend bool operator==(const DyadicBox&, const DyadicBox&) = default;

 private:
  DyadicShape shape_;
  std::uint64_t m1_;
  std::uint64_t m2_;
};

/// Quarters of I_{j,m}: first sign is the x half (+ left, - right), second
/// the y half (+ lower, - upper). h_{j,m} is +1 on ++ and --, -1 on +- and -+.
enum class Quarter { PlusPlus, PlusMinus, MinusPlus, MinusMinus, Outside };

std::string_view to_string(Quarter q);

enum class Derivation { EmptyClosedForm, OnePointClosedForm, GeneralSum };

std::string_view to_string(Derivation d);

struct HaarCoefficient {
  DyadicBox box;
  double value;
  Derivation derivation;
};

Quarter quarter_of(const DyadicBox& box, const Point2& z);

/// Integral of x1 x2 h_{j,m}: 2^(-2|j|-4). Throws DomainError for a
/// negative component.
double lemma1_integral(DyadicShape shape);
Rational lemma1_integral_exact(DyadicShape shape);

/// Integral of chi_{C_z} h_{j,m} for z inside the box, by the four-quarter
/// product of distances to the box edges. Throws DomainError if z is
/// outside (the integral is then 0).
double mu_point(const DyadicBox& box, const Point2& z);
Rational mu_point_exact(const DyadicBox& box, const Point2& z);

/// Haar coefficient of D_P: the sum of mu_point over the points in the box
/// minus N 2^(-2|j|-4). With 0 or 1 points inside it is the corresponding
/// closed form and `derivation` says which branch applied.
HaarCoefficient mu(const PointSet& set, const DyadicBox& box);
Rational mu_exact(const PointSet& set, const DyadicBox& box);

/// One-point closed form for a box whose only point is z, with a real
/// point count (used by the bundle bounds where N = 2^(M + kappa)).
double mu_one_point(const DyadicBox& box, const Point2& z, double n_points);

/// Empty-box closed form -N 2^(-2|j|-4).
double mu_empty(DyadicShape shape, double n_points);

/// Coefficient for any shape, -1 components included, by factorising each
/// coordinate: integral of t h(t) and of h over [z, 1). Throws DomainError
/// when m is nonzero in a -1 coordinate or out of range.
double mu_general_shape(const PointSet& set, DyadicShape shape, std::uint64_t m1,
                        std::uint64_t m2);
Rational mu_general_shape_exact(const PointSet& set, DyadicShape shape, std::uint64_t m1,
                                std::uint64_t m2);

inline constexpr int kMaxParsevalLevel = 24;

/// Sum of 2^|j| mu_{j,m}^2 over every shape with |j| <= max_level
/// (components in {-1, 0, 1, ...}) and every position. Empty boxes are
/// counted in closed form, so the cost is O(N L^2). Throws SizeLimitError
/// above kMaxParsevalLevel.
double parseval_partial(const PointSet& set, int max_level);

/// Partial sums for levels 0..max_level (entry L equals parseval_partial(set, L)).
std::vector<double> parseval_levels(const PointSet& set, int max_level);

Rational parseval_partial_exact(const PointSet& set, int max_level);

inline constexpr int kMaxDumpLevel = 20;

/// CSV dump "j1,j2,m1,m2,mu,derivation" of every coefficient with
/// |j| <= max_level. Shapes with a -1 component report derivation
/// "factorized".
void write_coefficients_csv(std::ostream& out, const PointSet& set, int max_level);

}  // namespace l2disc
