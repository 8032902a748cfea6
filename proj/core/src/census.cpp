#include "l2disc/census.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "l2disc/bounds.hpp"
#include "l2disc/discrepancy.hpp"
#include "l2disc/errors.hpp"
#include "l2disc/summation.hpp"

namespace l2disc {

namespace {

struct Occupant {
  std::uint64_t count = 0;
  std::size_t first = 0;
};

// Nonempty boxes of one shape, keyed by (m1 << j2) | m2.
using Occupancy = std::unordered_map<std::uint64_t, Occupant>;

std::uint64_t box_key(std::uint64_t m1, std::uint64_t m2, int j2) { return (m1 << j2) | m2; }

Occupancy occupancy(const PointSet& set, DyadicShape s) {
  Occupancy occ;
  occ.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto key = box_key(set.cell(i, 0, s.j1), set.cell(i, 1, s.j2), s.j2);
    auto [it, inserted] = occ.try_emplace(key, Occupant{0, i});
    ++it->second.count;
  }
  return occ;
}

std::uint64_t occupancy_at(const Occupancy& occ, std::uint64_t key) {
  const auto it = occ.find(key);
  return it == occ.end() ? 0 : it->second.count;
}

// Occupancies of the level+1 shapes (j1, level - j1), indexed by j1.
std::vector<Occupancy> level_occupancy(const PointSet& set, int level) {
  std::vector<Occupancy> out;
  out.reserve(static_cast<std::size_t>(level) + 1);
  for (int j1 = 0; j1 <= level; ++j1) out.push_back(occupancy(set, {j1, level - j1}));
  return out;
}

// Number of one-point parents (at level - 1) of the box of shape (j1, j2)
// holding point i.
int type_of(const PointSet& set, std::size_t i, int j1, int j2,
            const std::vector<Occupancy>& parents) {
  int u = 0;
  if (j1 >= 1) {
    const auto key = box_key(set.cell(i, 0, j1 - 1), set.cell(i, 1, j2), j2);
    if (occupancy_at(parents[static_cast<std::size_t>(j1 - 1)], key) == 1) ++u;
  }
  if (j2 >= 1) {
    const auto key = box_key(set.cell(i, 0, j1), set.cell(i, 1, j2 - 1), j2 - 1);
    if (occupancy_at(parents[static_cast<std::size_t>(j1)], key) == 1) ++u;
  }
  return u;
}

void check_level_guard(int level, int max, const char* what) {
  if (level < 0 || level > max) {
    throw SizeLimitError(fmt::format("{}: level {} outside [0, {}]", what, level, max));
  }
}

}  // namespace

ShapeCensus shape_census(const PointSet& set, DyadicShape shape) {
  if (!shape.is_proper()) throw DomainError("shape_census requires j1, j2 >= 0");
  check_level_guard(shape.level(), kMaxShapeCensusLevel, "shape_census");
  ShapeCensus out{shape, {}};
  const Occupancy occ = occupancy(set, shape);
  for (const auto& [key, o] : occ) ++out.counts[o.count];
  const std::uint64_t empty = (std::uint64_t{1} << shape.level()) - occ.size();
  if (empty > 0) out.counts[0] = empty;
  return out;
}

LevelCensus level_census(const PointSet& set, int level) {
  check_level_guard(level, kMaxLevelCensusLevel, "level_census");
  LevelCensus out;
  out.level = level;
  const auto occ = level_occupancy(set, level);
  for (const auto& shape_occ : occ) {
    for (const auto& [key, o] : shape_occ) ++out.counts[o.count];
    const std::uint64_t empty = (std::uint64_t{1} << level) - shape_occ.size();
    if (empty > 0) out.counts[0] += empty;
  }
  if (level >= 1) {
    const auto parents = level_occupancy(set, level - 1);
    TypeCounts types;
    for (int j1 = 0; j1 <= level; ++j1) {
      for (const auto& [key, o] : occ[static_cast<std::size_t>(j1)]) {
        if (o.count != 1) continue;
        switch (type_of(set, o.first, j1, level - j1, parents)) {
          case 0:
            ++types.b0;
            break;
          case 1:
            ++types.b1;
            break;
          default:
            ++types.b2;
            break;
        }
      }
    }
    out.types = types;
  }
  return out;
}

std::uint64_t count_bipartite_edges(const PointSet& set, int level) {
  check_level_guard(level + 1, kMaxLevelCensusLevel, "count_bipartite_edges");
  const auto coarse = level_occupancy(set, level);
  const auto fine = level_occupancy(set, level + 1);
  std::uint64_t edges = 0;
  for (int j1 = 0; j1 <= level; ++j1) {
    const int j2 = level - j1;
    for (const auto& [key, o] : coarse[static_cast<std::size_t>(j1)]) {
      if (o.count != 1) continue;
      const std::uint64_t m1 = key >> j2;
      const std::uint64_t m2 = key & ((std::uint64_t{1} << j2) - 1);
      for (std::uint64_t half = 0; half < 2; ++half) {
        // Refine x: shape (j1 + 1, j2).
        if (occupancy_at(fine[static_cast<std::size_t>(j1 + 1)],
                         box_key(2 * m1 + half, m2, j2)) == 1) {
          ++edges;
        }
        // Refine y: shape (j1, j2 + 1).
        if (occupancy_at(fine[static_cast<std::size_t>(j1)], box_key(m1, 2 * m2 + half, j2 + 1)) ==
            1) {
          ++edges;
        }
      }
    }
  }
  return edges;
}

std::vector<IdentityCheck> check_identities(const PointSet& set, int max_level) {
  check_level_guard(max_level, kMaxLevelCensusLevel, "check_identities");
  const auto n = static_cast<std::uint64_t>(set.size());
  std::vector<IdentityCheck> checks;
  std::vector<LevelCensus> levels;
  for (int level = 0; level <= max_level; ++level) levels.push_back(level_census(set, level));

  for (int level = 0; level <= max_level; ++level) {
    const std::uint64_t boxes = std::uint64_t{1} << level;
    bool count_ok = true;
    bool mass_ok = true;
    bool empty_ok = true;
    std::string count_detail;
    std::string mass_detail;
    std::string empty_detail;
    for (int j1 = 0; j1 <= level; ++j1) {
      const ShapeCensus sc = shape_census(set, {j1, level - j1});
      std::uint64_t total = 0;
      std::uint64_t mass = 0;
      for (const auto& [r, a] : sc.counts) {
        total += a;
        mass += r * a;
      }
      if (total != boxes) {
        count_ok = false;
        count_detail += fmt::format("shape ({},{}): {} != {}; ", j1, level - j1, total, boxes);
      }
      if (mass != n) {
        mass_ok = false;
        mass_detail += fmt::format("shape ({},{}): {} != {}; ", j1, level - j1, mass, n);
      }
      const auto a0 = static_cast<long double>(sc.a(0));
      if (a0 < static_cast<long double>(boxes) - static_cast<long double>(n)) {
        empty_ok = false;
        empty_detail += fmt::format("shape ({},{}): a_0 = {}; ", j1, level - j1, sc.a(0));
      }
    }
    checks.push_back({"shape-box-count", level, count_ok, count_detail});
    checks.push_back({"shape-point-count", level, mass_ok, mass_detail});
    checks.push_back({"shape-empty-bound", level, empty_ok, empty_detail});

    const LevelCensus& lc = levels[static_cast<std::size_t>(level)];
    std::uint64_t total = 0;
    std::uint64_t mass = 0;
    for (const auto& [r, a] : lc.counts) {
      total += a;
      mass += r * a;
    }
    const std::uint64_t shapes = static_cast<std::uint64_t>(level) + 1;
    checks.push_back({"level-box-count", level, total == shapes * boxes,
                      fmt::format("{} vs {}", total, shapes * boxes)});
    checks.push_back({"level-point-count", level, mass == shapes * n,
                      fmt::format("{} vs {}", mass, shapes * n)});

    if (level >= 1) {
      const TypeCounts& t = *lc.types;
      const std::uint64_t a1 = lc.a(1);
      const std::uint64_t a1_prev = levels[static_cast<std::size_t>(level - 1)].a(1);
      checks.push_back({"types-partition", level, a1 == t.b0 + t.b1 + t.b2,
                        fmt::format("a_1 = {}, b = ({}, {}, {})", a1, t.b0, t.b1, t.b2)});
      checks.push_back({"types-degree", level, 2 * a1_prev == t.b1 + 2 * t.b2,
                        fmt::format("2 a_1(prev) = {}, b_1 + 2 b_2 = {}", 2 * a1_prev,
                                    t.b1 + 2 * t.b2)});
      const auto lhs = static_cast<long long>(2 * t.b0 + t.b1);
      const auto rhs = 2 * static_cast<long long>(a1) - 2 * static_cast<long long>(a1_prev);
      checks.push_back({"types-b0-b1", level, lhs == rhs, fmt::format("{} vs {}", lhs, rhs)});
      const std::uint64_t edges = count_bipartite_edges(set, level - 1);
      checks.push_back({"edge-count", level, edges == t.b1 + 2 * t.b2,
                        fmt::format("edges = {}, b_1 + 2 b_2 = {}", edges, t.b1 + 2 * t.b2)});
    }
  }
  return checks;
}

double rho_one_point(const DyadicBox& parent, const Point2& z, double n_points) {
  const int j1 = parent.shape().j1;
  const int j2 = parent.shape().j2;
  const std::uint64_t kx = dyadic_key(z.x);
  const std::uint64_t ky = dyadic_key(z.y);
  const DyadicBox wide(DyadicShape{j1 + 1, j2}, kx >> (kDyadicKeyBits - j1 - 1), parent.m2());
  const DyadicBox tall(DyadicShape{j1, j2 + 1}, parent.m1(), ky >> (kDyadicKeyBits - j2 - 1));
  const double a = mu_one_point(parent, z, n_points);
  const double b = mu_one_point(wide, z, n_points);
  const double c = mu_one_point(tall, z, n_points);
  return a * a + b * b + c * c;
}

RhoBundle rho_bundle(const PointSet& set, const DyadicBox& parent) {
  std::size_t count = 0;
  std::size_t index = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.cell(i, 0, parent.shape().j1) == parent.m1() &&
        set.cell(i, 1, parent.shape().j2) == parent.m2()) {
      ++count;
      index = i;
    }
  }
  if (count != 1) {
    throw DomainError(fmt::format("rho_bundle: parent box holds {} points, expected 1", count));
  }
  const int j1 = parent.shape().j1;
  const int j2 = parent.shape().j2;
  const DyadicBox wide(DyadicShape{j1 + 1, j2}, set.cell(index, 0, j1 + 1), parent.m2());
  const DyadicBox tall(DyadicShape{j1, j2 + 1}, parent.m1(), set.cell(index, 1, j2 + 1));
  const double a = mu(set, parent).value;
  const double b = mu(set, wide).value;
  const double c = mu(set, tall).value;
  return RhoBundle{parent, {wide, tall}, a * a + b * b + c * c};
}

DyadicSplit split_count(std::uint64_t n) {
  if (n == 0) throw DomainError("split_count: N must be positive");
  const int M = static_cast<int>(std::bit_width(n)) - 1;
  const double kappa = std::log2(static_cast<double>(n) / std::exp2(M));
  return {M, kappa};
}

double empty_tail_sum(double n_points, int first_level) {
  if (!(std::exp2(first_level) > n_points)) {
    throw DomainError("empty_tail_sum: need 2^first_level > N");
  }
  // sum_{l >= L} (l+1) r^l = r^L ((L+1)/(1-r) + r/(1-r)^2)
  const auto series = [first_level](double r) {
    const double L = first_level;
    return std::pow(r, L) * ((L + 1.0) / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
  };
  return n_points * n_points / 256.0 * (series(0.25) - n_points * series(0.125));
}

MasterTerms master_rhs(const PointSet& set) {
  if (set.size() < 2) throw DomainError("master_rhs requires N >= 2");
  const auto [M, kappa] = split_count(set.size());
  const double n = static_cast<double>(set.size());
  MasterTerms t{M, kappa, 0.0, 0.0, 0.0, 0.0, 0.0};

  CompensatedSum empty;
  std::vector<Occupancy> at_M;
  std::vector<Occupancy> at_M1;
  for (int level = 0; level <= M + 1; ++level) {
    auto occ = level_occupancy(set, level);
    std::uint64_t a0 = 0;
    for (const auto& shape_occ : occ) a0 += (std::uint64_t{1} << level) - shape_occ.size();
    empty.add(std::exp2(level) * static_cast<double>(a0) * n * n * std::exp2(-4.0 * level - 8.0));
    if (level == M) at_M = std::move(occ);
    if (level == M + 1) at_M1 = std::move(occ);
  }
  t.empty_direct = empty.value();
  t.empty_tail = empty_tail_sum(n, M + 2);

  const double weight = std::exp2(M);
  CompensatedSum level_m;
  for (int j1 = 0; j1 <= M; ++j1) {
    for (const auto& [key, o] : at_M[static_cast<std::size_t>(j1)]) {
      if (o.count != 1) continue;
      const int j2 = M - j1;
      const DyadicBox box({j1, j2}, key >> j2, key & ((std::uint64_t{1} << j2) - 1));
      level_m.add(weight * rho_one_point(box, set[o.first], n));
    }
  }
  t.bundles_M = level_m.value();

  CompensatedSum level_m1;
  for (int j1 = 0; j1 <= M + 1; ++j1) {
    for (const auto& [key, o] : at_M1[static_cast<std::size_t>(j1)]) {
      if (o.count != 1) continue;
      const int j2 = M + 1 - j1;
      const int u = type_of(set, o.first, j1, j2, at_M);
      if (u == 2) continue;
      const DyadicBox box({j1, j2}, key >> j2, key & ((std::uint64_t{1} << j2) - 1));
      level_m1.add((2 - u) * weight * rho_one_point(box, set[o.first], n));
    }
  }
  t.bundles_M1 = level_m1.value();

  CompensatedSum total;
  total.add(t.empty_direct);
  total.add(t.empty_tail);
  total.add(t.bundles_M);
  total.add(t.bundles_M1);
  t.total = total.value();
  return t;
}

double hm_rhs(const PointSet& set) {
  if (set.size() < 2) throw DomainError("hm_rhs requires N >= 2");
  const auto split = split_count(set.size());
  return empty_tail_sum(static_cast<double>(set.size()), split.M + 1);
}

std::vector<std::string> ProofChain::violations(double rel_tol) const {
  std::vector<std::string> out;
  const auto link = [&](const char* name, double big, double small) {
    const double scale = std::max(std::abs(big), std::abs(small));
    if (big < small - rel_tol * scale) {
      out.push_back(fmt::format("{}: {:.12g} < {:.12g}", name, big, small));
    }
  };
  link("l2 >= master", l2_squared, master);
  link("master >= census", master, census_route);
  link("census >= primed", census_route, primed_route);
  link("primed >= level", primed_route, level_route);
  link("level >= log", level_route, log_route);
  link("master >= hm", master, hm);
  return out;
}

ProofChain proof_chain(const PointSet& set) {
  if (set.size() < 2) throw DomainError("proof_chain requires N >= 2");
  ProofChain c{};
  c.n = set.size();
  const auto split = split_count(c.n);
  c.M = split.M;
  c.kappa = split.kappa;
  const double n = static_cast<double>(c.n);
  const double kappa = c.kappa;

  c.l2_squared = l2_squared(set);
  c.master = master_rhs(set).total;
  c.hm = hm_rhs(set);

  const LevelCensus at_M = level_census(set, c.M);
  const LevelCensus at_M1 = level_census(set, c.M + 1);
  const double g0 = gamma_of(kappa);
  const double g1 = gamma_of(kappa - 1.0);
  const TypeCounts& t = *at_M1.types;
  const double sigma1 = static_cast<double>(at_M.a(0)) * std::exp2(2.0 * kappa - 8.0) +
                        static_cast<double>(at_M1.a(0)) * std::exp2(2.0 * kappa - 11.0) +
                        static_cast<double>(at_M.a(1)) * g0 +
                        static_cast<double>(t.b1 + 2 * t.b0) * 0.25 * g1;
  c.census_route = std::exp2(-c.M) * sigma1 + empty_tail_sum(n, c.M + 2);
  c.primed_route = sigma1_prime(c.M, kappa) + sigma2_exact(c.M, kappa);
  const double d = delta(kappa);
  c.level_route = (c.M + 1.0) * d;
  c.log_route = std::log(n) * d / std::log(2.0);
  return c;
}

void write_counts_csv(std::ostream& out, const std::vector<LevelCensus>& levels) {
  out << "level,r,a_r\n";
  for (const auto& lc : levels) {
    for (const auto& [r, a] : lc.counts) out << fmt::format("{},{},{}\n", lc.level, r, a);
  }
}

void write_types_csv(std::ostream& out, const std::vector<LevelCensus>& levels) {
  out << "level,b0,b1,b2\n";
  for (const auto& lc : levels) {
    if (!lc.types) continue;
    out << fmt::format("{},{},{},{}\n", lc.level, lc.types->b0, lc.types->b1, lc.types->b2);
  }
}

}  // namespace l2disc
