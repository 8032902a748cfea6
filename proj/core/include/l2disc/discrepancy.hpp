#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "l2disc/pointset.hpp"
#include "l2disc/rational.hpp"

namespace l2disc {

/// Upper-right corner x of the anchored box [0, x1) x [0, x2). Unlike a
/// point, a corner may sit on 1.
struct Corner {
  Coord x1;
  Coord x2;
};

struct DiscrepancyValue {
  double value = 0.0;
  /// Present when the corner and every point are exact rationals.
  std::optional<Rational> exact;
  Corner at;
};

/// #{i : p_i1 < x1 and p_i2 < x2} - N x1 x2. Throws DomainError when the
/// corner leaves [0,1]^2.
DiscrepancyValue discrepancy_at(const PointSet& set, const Corner& corner);

/// Float-only evaluation of the same quantity, for quadrature loops.
double discrepancy_at(const PointSet& set, double x1, double x2);

/// Squared L2 norm of the discrepancy function by the pair-sum formula
///
///   sum_{i,k} (1 - max(x_i, x_k)) (1 - max(y_i, y_k))
///     - (N/2) sum_i (1 - x_i^2)(1 - y_i^2) + N^2 / 9,
///
/// accumulated with compensated summation over a fixed block order.
double l2_squared(const PointSet& set);

/// The same formula in exact rational arithmetic. Floats are promoted to
/// the rationals they represent, so the result is the exact integral for
/// the stored set.
Rational l2_squared_exact(const PointSet& set);

struct OracleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of the integral of D_P^2 over uniformly drawn
/// corners. Throws DomainError when samples == 0.
OracleEstimate l2_oracle(const PointSet& set, std::size_t samples, std::uint64_t seed);

/// sqrt(l2_squared) / sqrt(ln N). Throws DomainError for N < 2.
double normalized_ratio(const PointSet& set);

}  // namespace l2disc
