#include "l2disc/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "l2disc/bounds.hpp"
#include "l2disc/census.hpp"
#include "l2disc/discrepancy.hpp"
#include "l2disc/haar.hpp"
#include "l2disc/pointset.hpp"

namespace l2disc {

namespace {

constexpr double kUniversalRatio = 0.0515599;

// The structured and seeded sets shared by several checks.
std::vector<PointSet> sample_sets(std::uint64_t seed) {
  std::vector<PointSet> sets;
  for (int n = 1; n <= 8; ++n) sets.push_back(hammersley(n));
  for (int k = 4; k <= 14; k += 2) {
    sets.push_back(fibonacci_lattice(k, false));
    sets.push_back(fibonacci_lattice(k, true));
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 12; ++i) sets.push_back(random_uniform(2 + rng() % 300, rng()));
  return sets;
}

std::string describe(const PointSet& s) { return fmt::format("N={}", s.size()); }

// Returns an empty string on success, a diagnostic otherwise.
using Check = std::function<std::string()>;

std::string check_ranges() {
  std::vector<PointSet> sets;
  for (int n = 0; n <= 10; ++n) sets.push_back(hammersley(n));
  for (int k = 2; k <= 20; ++k) {
    sets.push_back(fibonacci_lattice(k, false));
    sets.push_back(fibonacci_lattice(k, true));
  }
  sets.push_back(random_uniform(1000, 7));
  for (const auto& s : sets) {
    for (const auto& p : s) {
      if (!(p.x.value() >= 0.0 && p.x.value() < 1.0 && p.y.value() >= 0.0 && p.y.value() < 1.0)) {
        return fmt::format("point ({}, {}) outside [0,1)^2", p.x.value(), p.y.value());
      }
    }
  }
  return {};
}

std::string check_hammersley_distinct() {
  for (int n = 0; n <= 12; ++n) {
    const PointSet s = hammersley(n);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
    for (std::size_t i = 0; i < s.size(); ++i) keys.emplace_back(s.key(i, 0), s.key(i, 1));
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
      return fmt::format("hammersley({}) has a repeated point", n);
    }
  }
  return {};
}

std::string check_fibonacci_denominators() {
  for (int k = 2; k <= 25; ++k) {
    const PointSet s = fibonacci_lattice(k, false);
    const std::uint64_t f = fibonacci(k);
    if (s.size() != f) return fmt::format("k={}: {} points, expected {}", k, s.size(), f);
    for (const auto& p : s) {
      for (const Coord* c : {&p.x, &p.y}) {
        const Rational r = c->rational();
        if (mpz_class(static_cast<unsigned long>(f)) % r.get_den() != 0) {
          return fmt::format("k={}: denominator of {} does not divide {}", k, to_string(r), f);
        }
      }
    }
  }
  return {};
}

std::string check_roundtrip(std::uint64_t seed) {
  for (const auto& s : {hammersley(5), fibonacci_lattice(9, true), random_uniform(50, seed)}) {
    std::stringstream buf;
    write_points(buf, s);
    const PointSet back = read_points(buf);
    if (back.size() != s.size()) return "size changed on round trip";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(back[i].x == s[i].x && back[i].y == s[i].y)) {
        return fmt::format("point {} changed on round trip", i);
      }
    }
  }
  return {};
}

std::string check_l2_exact_vs_float() {
  for (int n = 0; n <= 8; ++n) {
    const PointSet s = hammersley(n);
    const double exact = l2_squared_exact(s).get_d();
    const double fl = l2_squared(s);
    if (std::abs(exact - fl) > 1e-12 * std::abs(exact)) {
      return fmt::format("hammersley({}): exact {} vs float {}", n, exact, fl);
    }
  }
  return {};
}

std::string check_l2_permutation(std::uint64_t seed) {
  const PointSet s = fibonacci_lattice(10, true);
  std::vector<Point2> pts(s.begin(), s.end());
  std::shuffle(pts.begin(), pts.end(), std::mt19937_64(seed));
  if (l2_squared_exact(s) != l2_squared_exact(PointSet(pts))) return "exact value changed";
  return {};
}

std::string check_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 20; ++i) {
    const PointSet s = random_uniform(1 + rng() % 64, rng());
    const auto est = l2_oracle(s, 40000, rng());
    const double ref = l2_squared(s);
    if (std::abs(est.mean - ref) > 4.0 * est.std_error) {
      return fmt::format("{}: oracle {} +- {} vs {}", describe(s), est.mean, est.std_error, ref);
    }
  }
  return {};
}

std::string check_universal_ratio(const std::vector<PointSet>& sets) {
  for (const auto& s : sets) {
    if (s.size() < 2) continue;
    const double r = normalized_ratio(s);
    if (!(r >= kUniversalRatio)) return fmt::format("{}: ratio {}", describe(s), r);
  }
  return {};
}

std::string check_haar_routes(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 200; ++trial) {
    const PointSet s = random_uniform(1 + rng() % 8, rng());
    const int j1 = static_cast<int>(rng() % 4);
    const int j2 = static_cast<int>(rng() % 4);
    const DyadicBox box({j1, j2}, rng() % (1u << j1), rng() % (1u << j2));
    const double closed = mu(s, box).value;
    const double factorized = mu_general_shape(s, {j1, j2}, box.m1(), box.m2());
    const double exact = mu_exact(s, box).get_d();
    if (std::abs(closed - factorized) > 1e-13 || std::abs(closed - exact) > 1e-13) {
      return fmt::format("box ({},{}),({},{}): {} / {} / {}", j1, j2, box.m1(), box.m2(), closed,
                         factorized, exact);
    }
  }
  return {};
}

std::string check_parseval(const std::vector<PointSet>& sets) {
  for (const auto& s : sets) {
    if (s.size() > 64) continue;
    const auto partial = parseval_levels(s, 12);
    const double full = l2_squared(s);
    for (std::size_t l = 0; l < partial.size(); ++l) {
      if (l > 0 && partial[l] < partial[l - 1]) {
        return fmt::format("{}: partial sum decreases at level {}", describe(s), l);
      }
      if (partial[l] > full * (1.0 + 1e-12)) {
        return fmt::format("{}: partial sum {} exceeds {}", describe(s), partial[l], full);
      }
    }
  }
  return {};
}

std::string check_census(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PointSet> sets{hammersley(6), fibonacci_lattice(12, true)};
  for (int i = 0; i < 10; ++i) sets.push_back(random_uniform(1 + rng() % 1024, rng()));
  for (const auto& s : sets) {
    for (const auto& c : check_identities(s, 10)) {
      if (!c.pass) return fmt::format("{}: {} at level {}: {}", describe(s), c.name, c.level, c.detail);
    }
  }
  return {};
}

std::string check_master_chain(const std::vector<PointSet>& sets) {
  for (const auto& s : sets) {
    if (s.size() < 2) continue;
    const double l2 = l2_squared(s);
    const double master = master_rhs(s).total;
    const double hm = hm_rhs(s);
    if (l2 < master || master < hm) {
      return fmt::format("{}: l2 {} master {} hm {}", describe(s), l2, master, hm);
    }
  }
  return {};
}

std::string check_bundle_bound(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t n = 2 + rng() % 4000;
    const auto [M, kappa] = split_count(n);
    const double scale = std::exp2(2.0 * M);
    for (int extra = 0; extra <= 1; ++extra) {
      const int level = M + extra;
      const int j1 = static_cast<int>(rng() % (level + 1));
      const int j2 = level - j1;
      const DyadicBox box({j1, j2}, rng() % (std::uint64_t{1} << j1),
                          rng() % (std::uint64_t{1} << j2));
      const double x = (box.m1() + unit(rng)) * std::exp2(-j1);
      const double y = (box.m2() + unit(rng)) * std::exp2(-j2);
      const double rho = rho_one_point(box, {x, y}, static_cast<double>(n));
      const double bound = extra == 0 ? gamma_of(kappa) : 0.25 * gamma_of(kappa - 1.0);
      if (scale * rho < bound * (1.0 - 1e-12)) {
        return fmt::format("N={} level {}: 2^2M rho = {} < {}", n, level, scale * rho, bound);
      }
    }
  }
  return {};
}

std::string check_delta_boundary() {
  const Rational expected(317, 172032);
  if (delta_exact(0) != expected || delta_exact(1) != expected) {
    return fmt::format("Delta(0) = {}, Delta(1) = {}", to_string(delta_exact(0)),
                       to_string(delta_exact(1)));
  }
  return {};
}

std::string check_phi() {
  for (int i = 0; i < 10000; ++i) {
    const double k = i / 10000.0;
    const double g0 = gamma_of(k);
    const double g1 = gamma_of(k - 1.0);
    if (g0 - 0.5 * g1 < 0.0) return fmt::format("gamma(k) - gamma(k-1)/2 < 0 at {}", k);
    if (2.0 * (g0 - 0.5 * g1) > std::exp2(2.0 * k - 8.0) || g1 > std::exp2(2.0 * k - 11.0)) {
      return fmt::format("weight ordering fails at {}", k);
    }
  }
  return {};
}

std::string check_sigma2() {
  for (int M = 0; M <= 20; ++M) {
    for (int i = 0; i < 50; ++i) {
      const double k = i / 50.0;
      if (sigma2_exact(M, k) < sigma2_bound(M, k)) {
        return fmt::format("M={} kappa={}: {} < {}", M, k, sigma2_exact(M, k), sigma2_bound(M, k));
      }
    }
  }
  return {};
}

std::string check_diagonal() {
  for (double k : {-1.0, -0.5, 0.0, 0.5, 0.99}) certify_diagonal(k, 600, 1e-6);
  return {};
}

std::string check_hm_improvement() {
  BoundOptions opt;
  opt.grid = 1025;
  opt.certificate_count = 2;
  opt.certificate_resolution = 200;
  opt.certificate_tolerance = 1e-4;
  const BoundReport r = theorem_constants(opt);
  if (!(r.hm_cbar < r.c_bar_lower && r.hm_bbar < r.b_bar_lower)) {
    return fmt::format("empty-box constants {} / {} not below {} / {}", r.hm_cbar, r.hm_bbar,
                       r.c_bar_lower, r.b_bar_lower);
  }
  return {};
}

}  // namespace

std::vector<CheckResult> run_property_battery(std::uint64_t seed) {
  const std::vector<PointSet> sets = sample_sets(seed);
  const std::vector<std::pair<std::string, Check>> checks{
      {"pointset.range", check_ranges},
      {"pointset.hammersley-distinct", check_hammersley_distinct},
      {"pointset.fibonacci-denominators", check_fibonacci_denominators},
      {"pointset.roundtrip", [seed] { return check_roundtrip(seed); }},
      {"discrepancy.exact-vs-float", check_l2_exact_vs_float},
      {"discrepancy.permutation", [seed] { return check_l2_permutation(seed); }},
      {"discrepancy.oracle", [seed] { return check_oracle(seed); }},
      {"discrepancy.lower-bound", [&sets] { return check_universal_ratio(sets); }},
      {"haar.routes-agree", [seed] { return check_haar_routes(seed); }},
      {"haar.parseval", [&sets] { return check_parseval(sets); }},
      {"census.identities", [seed] { return check_census(seed); }},
      {"census.master-chain", [&sets] { return check_master_chain(sets); }},
      {"census.bundle-bound", [seed] { return check_bundle_bound(seed); }},
      {"bounds.delta-boundary", check_delta_boundary},
      {"bounds.phi-weights", check_phi},
      {"bounds.sigma2", check_sigma2},
      {"bounds.diagonal", check_diagonal},
      {"bounds.improvement", check_hm_improvement},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    try {
      const std::string why = fn();
      out.push_back({name, why.empty(), why});
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  }
  return out;
}

}  // namespace l2disc
