#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "l2disc/rational.hpp"

namespace l2disc {

/// A coordinate held as a binary float, optionally backed by an exact
/// rational. Comparisons are always exact: a float is promoted to the
/// rational it represents whenever the other operand is exact.
class Coord {
 public:
  Coord() = default;
  Coord(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Coord(Rational r);              // NOLINT(google-explicit-constructor)

  double value() const noexcept { return value_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::optional<Rational>& exact() const noexcept { return exact_; }

  /// The exact rational when present, otherwise the exact value of the float.
  Rational rational() const;

  friend bool operator<(const Coord& a, const Coord& b);
  friend bool operator==(const Coord& a, const Coord& b);

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

struct Point2 {
  Coord x;
  Coord y;
};

/// Number of binary digits kept per coordinate for dyadic cell lookups.
inline constexpr int kDyadicKeyBits = 60;

/// floor(c * 2^60), computed exactly for either representation. The index
/// of the half-open dyadic interval of length 2^-j holding c is key >> (60 - j).
std::uint64_t dyadic_key(const Coord& c);

/// Ordered multiset of points in [0,1)^2.
class PointSet {
 public:
  /// Throws DomainError when empty or when a coordinate lies outside [0,1).
  explicit PointSet(std::vector<Point2> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point2> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  /// True when every coordinate carries an exact rational.
  bool all_exact() const noexcept;

  /// dyadic_key of coordinate `axis` (0 = x, 1 = y) of point i.
  std::uint64_t key(std::size_t i, int axis) const noexcept {
    return keys_[i][static_cast<std::size_t>(axis)];
  }

  /// Index along `axis` (0 = x, 1 = y) of the level-`j` dyadic interval
  /// containing point i. Requires 0 <= j <= 60.
  std::uint64_t cell(std::size_t i, int axis, int j) const noexcept {
    return j == 0 ? 0 : keys_[i][static_cast<std::size_t>(axis)] >> (kDyadicKeyBits - j);
  }

 private:
  std::vector<Point2> points_;
  std::vector<std::array<std::uint64_t, 2>> keys_;
};

/// 2^n points (i/2^n, radical-inverse_2(i)). Requires n <= 30.
PointSet hammersley(int n);

/// k-th Fibonacci number with F_1 = F_2 = 1.
std::uint64_t fibonacci(int k);

/// F_k points (i/F_k, {i F_{k-1} / F_k}); with `symmetrize` also the
/// reflections (x, 1 - y), where a reflected 1 folds to 0. Requires 2 <= k <= 35.
PointSet fibonacci_lattice(int k, bool symmetrize);

/// n pseudo-random points from a seeded 64-bit Mersenne twister. Each
/// coordinate is an exact multiple of 2^-53.
PointSet random_uniform(std::size_t n, std::uint64_t seed);

/// Reads the text format: one point per line, two whitespace-separated
/// fields, each a decimal or "p/q" in [0,1). Blank lines and lines starting
/// with '#' are skipped. Throws ParseError or DomainError.
PointSet read_points(std::istream& in);

/// Writes exact coordinates as "p/q" and floats in shortest round-trip form.
void write_points(std::ostream& out, const PointSet& set);

PointSet load(const std::filesystem::path& path);
void save(const PointSet& set, const std::filesystem::path& path);

}  // namespace l2disc
