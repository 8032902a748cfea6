#include "l2disc/discrepancy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "l2disc/errors.hpp"
#include "l2disc/summation.hpp"

namespace l2disc {

namespace {

bool in_closed_unit(const Coord& c) {
  if (c.exact()) return *c.exact() >= 0 && *c.exact() <= 1;
  return c.value() >= 0.0 && c.value() <= 1.0;
}

}  // namespace

DiscrepancyValue discrepancy_at(const PointSet& set, const Corner& corner) {
  if (!in_closed_unit(corner.x1) || !in_closed_unit(corner.x2)) {
    throw DomainError(fmt::format("corner ({}, {}) outside [0,1]^2", corner.x1.value(),
                                  corner.x2.value()));
  }
  std::size_t count = 0;
  for (const auto& p : set) {
    if (p.x < corner.x1 && p.y < corner.x2) ++count;
  }
  const auto n = static_cast<double>(set.size());
  DiscrepancyValue out;
  out.at = corner;
  out.value = static_cast<double>(count) - n * corner.x1.value() * corner.x2.value();
  if (corner.x1.is_exact() && corner.x2.is_exact() && set.all_exact()) {
    const Rational e = Rational(static_cast<unsigned long>(count)) -
                       Rational(static_cast<unsigned long>(set.size())) * *corner.x1.exact() *
                           *corner.x2.exact();
    out.value = e.get_d();
    out.exact = e;
  }
  return out;
}

double discrepancy_at(const PointSet& set, double x1, double x2) {
  std::size_t count = 0;
  for (const auto& p : set) {
    if (p.x.value() < x1 && p.y.value() < x2) ++count;
  }
  return static_cast<double>(count) - static_cast<double>(set.size()) * x1 * x2;
}

double l2_squared(const PointSet& set) {
  const std::size_t n = set.size();
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = set[i].x.value();
    ys[i] = set[i].y.value();
  }

  // The three parts are each of order N^2 while the result is of order
  // log N, so everything is carried in extended precision. Rows are summed
  // plainly and combined with compensation; off-diagonal pairs are counted
  // once and doubled.
  using Wide = long double;
  BasicCompensatedSum<Wide> pairs;
  BasicCompensatedSum<Wide> diagonal;
  BasicCompensatedSum<Wide> linear;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = xs[i];
    const double yi = ys[i];
    Wide row = 0;
    for (std::size_t k = i + 1; k < n; ++k) {
      row += (Wide{1} - std::max(xi, xs[k])) * (Wide{1} - std::max(yi, ys[k]));
    }
    pairs.add(row);
    diagonal.add((Wide{1} - xi) * (Wide{1} - yi));
    linear.add((Wide{1} - Wide{xi} * xi) * (Wide{1} - Wide{yi} * yi));
  }

  const auto nd = static_cast<Wide>(n);
  BasicCompensatedSum<Wide> total;
  total.add(2 * pairs.value());
  total.add(diagonal.value());
  total.add(-nd * linear.value() / 2);
  total.add(nd * nd / 9);
  return std::max(static_cast<double>(total.value()), 0.0);
}

namespace {

mpz_class lcm_of_denominators(const std::vector<Rational>& values) {
  mpz_class l = 1;
  for (const auto& v : values) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  return l;
}

std::vector<mpz_class> scale_to_integers(const std::vector<Rational>& values, const mpz_class& d) {
  std::vector<mpz_class> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.get_num() * (d / v.get_den()));
  return out;
}

__extension__ using u128 = unsigned __int128;

mpz_class from_u128(u128 v) {
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

// sum_{i,k} (dx - max(X_i, X_k)) (dy - max(Y_i, Y_k)) over all ordered pairs.
mpz_class pair_sum(const std::vector<mpz_class>& xs, const std::vector<mpz_class>& ys,
                   const mpz_class& dx, const mpz_class& dy) {
  const std::size_t n = xs.size();
  const auto bits = [](const mpz_class& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); };
  const std::size_t nbits = static_cast<std::size_t>(std::bit_width(n));
  mpz_class total = 0;

  if (bits(dx) <= 64 && bits(dy) <= 64 && nbits + bits(dx) + bits(dy) <= 127) {
    std::vector<std::uint64_t> gx(n);
    std::vector<std::uint64_t> gy(n);
    const auto to_u64 = [](const mpz_class& z) {
      std::uint64_t v = 0;
      mpz_export(&v, nullptr, -1, sizeof v, 0, 0, z.get_mpz_t());
      return v;
    };
    const std::uint64_t dx64 = to_u64(dx);
    const std::uint64_t dy64 = to_u64(dy);
    for (std::size_t i = 0; i < n; ++i) {
      gx[i] = dx64 - to_u64(xs[i]);
      gy[i] = dy64 - to_u64(ys[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      u128 row = 0;
      for (std::size_t k = 0; k < n; ++k) {
        row += static_cast<u128>(std::min(gx[i], gx[k])) * std::min(gy[i], gy[k]);
      }
      total += from_u128(row);
    }
    return total;
  }

  mpz_class term;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      term = (dx - std::max(xs[i], xs[k])) * (dy - std::max(ys[i], ys[k]));
      total += term;
    }
  }
  return total;
}

}  // namespace

Rational l2_squared_exact(const PointSet& set) {
  std::vector<Rational> xr;
  std::vector<Rational> yr;
  xr.reserve(set.size());
  yr.reserve(set.size());
  for (const auto& p : set) {
    xr.push_back(p.x.rational());
    yr.push_back(p.y.rational());
  }
  const mpz_class dx = lcm_of_denominators(xr);
  const mpz_class dy = lcm_of_denominators(yr);
  const auto xs = scale_to_integers(xr, dx);
  const auto ys = scale_to_integers(yr, dy);

  const Rational pairs(pair_sum(xs, ys, dx, dy), dx * dy);

  mpz_class linear = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    linear += (dx * dx - xs[i] * xs[i]) * (dy * dy - ys[i] * ys[i]);
  }
  const mpz_class n(static_cast<unsigned long>(set.size()));
  Rational result = pairs - Rational(n * linear, 2 * dx * dx * dy * dy) + Rational(n * n, 9);
  result.canonicalize();
  return result;
}

OracleEstimate l2_oracle(const PointSet& set, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("l2_oracle: samples must be positive");
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  // Welford running mean and variance of D^2.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x1 = uniform();
    const double x2 = uniform();
    const double d = discrepancy_at(set, x1, x2);
    const double v = d * d;
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  OracleEstimate est;
  est.mean = mean;
  est.samples = samples;
  if (samples > 1) {
    const double variance = m2 / static_cast<double>(samples - 1);
    est.std_error = std::sqrt(variance / static_cast<double>(samples));
  }
  return est;
}

double normalized_ratio(const PointSet& set) {
  if (set.size() < 2) throw DomainError("normalized_ratio requires N >= 2");
  return std::sqrt(l2_squared(set) / std::log(static_cast<double>(set.size())));
}

}  // namespace l2disc
