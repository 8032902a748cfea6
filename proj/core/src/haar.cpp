#include "l2disc/haar.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <ostream>

#include "l2disc/errors.hpp"
#include "l2disc/summation.hpp"

namespace l2disc {

namespace {

constexpr int kMaxShapeComponent = kDyadicKeyBits - 1;

std::uint64_t cell_at(std::uint64_t key, int j) {
  return j == 0 ? 0 : key >> (kDyadicKeyBits - j);
}

// Position of a coordinate relative to the 1-D dyadic interval (j, m):
// -1 outside, 0 in the left half, 1 in the right half.
int half_of(std::uint64_t key, int j, std::uint64_t m) {
  const std::uint64_t k = key >> (kDyadicKeyBits - (j + 1));
  if ((k >> 1) != m) return -1;
  return static_cast<int>(k & 1u);
}

template <class T>
T coord_as(const Coord& c);

template <>
double coord_as<double>(const Coord& c) {
  return c.value();
}

template <>
Rational coord_as<Rational>(const Coord& c) {
  return c.rational();
}

template <class T>
T dyadic(std::uint64_t m, int j);

template <>
double dyadic<double>(std::uint64_t m, int j) {
  return std::ldexp(static_cast<double>(m), -j);
}

template <>
Rational dyadic<Rational>(std::uint64_t m, int j) {
  Rational r = Rational(mpz_class(static_cast<unsigned long>(m))) * pow2(-j);
  r.canonicalize();
  return r;
}

template <class T>
T lemma1_value(const DyadicShape& s) {
  return dyadic<T>(1, 2 * s.level() + 4);
}

template <class T>
T mu_point_impl(const DyadicBox& box, const Point2& z) {
  const Quarter q = quarter_of(box, z);
  if (q == Quarter::Outside) {
    throw DomainError("mu_point: point lies outside the box (coefficient is 0 there)");
  }
  const int j1 = box.shape().j1;
  const int j2 = box.shape().j2;
  const T z1 = coord_as<T>(z.x);
  const T z2 = coord_as<T>(z.y);
  const T lo1 = dyadic<T>(box.m1(), j1);
  const T lo2 = dyadic<T>(box.m2(), j2);
  const T hi1 = dyadic<T>(box.m1() + 1, j1);
  const T hi2 = dyadic<T>(box.m2() + 1, j2);
  switch (q) {
    case Quarter::PlusPlus:
      return T((z1 - lo1) * (z2 - lo2));
    case Quarter::PlusMinus:
      return T((z1 - lo1) * (hi2 - z2));
    case Quarter::MinusPlus:
      return T((hi1 - z1) * (z2 - lo2));
    case Quarter::MinusMinus:
      return T((hi1 - z1) * (hi2 - z2));
    case Quarter::Outside:
      break;
  }
  return T(0);
}

template <class T>
T count_as(std::size_t n) {
  return T(static_cast<unsigned long>(n));
}

template <class T>
T coefficient_from_members(const PointSet& set, const DyadicBox& box,
                           const std::vector<std::size_t>& members, Derivation* how) {
  const T linear = count_as<T>(set.size()) * lemma1_value<T>(box.shape());
  if (members.empty()) {
    if (how) *how = Derivation::EmptyClosedForm;
    return T(-linear);
  }
  if (members.size() == 1) {
    if (how) *how = Derivation::OnePointClosedForm;
    return T(mu_point_impl<T>(box, set[members.front()]) - linear);
  }
  if (how) *how = Derivation::GeneralSum;
  T sum(0);
  for (std::size_t i : members) sum += mu_point_impl<T>(box, set[i]);
  return T(sum - linear);
}

std::vector<std::size_t> members_of(const PointSet& set, const DyadicBox& box) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.cell(i, 0, box.shape().j1) == box.m1() && set.cell(i, 1, box.shape().j2) == box.m2()) {
      out.push_back(i);
    }
  }
  return out;
}

// One-dimensional factors of the tensor Haar function in one coordinate.
//   counting factor: integral over [z, 1) of h(t) dt
//   linear factor:   integral over [0, 1) of t h(t) dt
template <class T>
T counting_factor(int j, std::uint64_t m, const Coord& z, std::uint64_t key) {
  if (j < 0) return T(1 - coord_as<T>(z));
  const int half = half_of(key, j, m);
  if (half < 0) return T(0);
  if (half == 0) return T(dyadic<T>(m, j) - coord_as<T>(z));
  return T(coord_as<T>(z) - dyadic<T>(m + 1, j));
}

template <class T>
T linear_factor(int j) {
  if (j < 0) return dyadic<T>(1, 1);
  return T(-dyadic<T>(1, 2 * j + 2));
}

void check_general_shape(DyadicShape s, std::uint64_t m1, std::uint64_t m2) {
  const auto check = [](int j, std::uint64_t m, const char* name) {
    if (j < -1 || j > kMaxShapeComponent) {
      throw DomainError(fmt::format("shape component {} = {} outside [-1, {}]", name, j,
                                    kMaxShapeComponent));
    }
    if (j == -1 && m != 0) {
      throw DomainError(fmt::format("position {} must be 0 for a -1 shape component", name));
    }
    if (j >= 0 && (m >> j) != 0) {
      throw DomainError(fmt::format("position {} = {} outside [0, 2^{})", name, m, j));
    }
  };
  check(s.j1, m1, "1");
  check(s.j2, m2, "2");
}

template <class T>
T mu_general_impl(const PointSet& set, DyadicShape s, std::uint64_t m1, std::uint64_t m2) {
  check_general_shape(s, m1, m2);
  T sum(0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    sum += counting_factor<T>(s.j1, m1, set[i].x, set.key(i, 0)) *
           counting_factor<T>(s.j2, m2, set[i].y, set.key(i, 1));
  }
  return T(sum - count_as<T>(set.size()) * linear_factor<T>(s.j1) * linear_factor<T>(s.j2));
}

template <class T>
struct Accumulator;

template <>
struct Accumulator<double> {
  CompensatedSum sum;
  void add(double v) { sum.add(v); }
  double value() const { return sum.value(); }
};

template <>
struct Accumulator<Rational> {
  Rational sum = 0;
  void add(const Rational& v) { sum += v; }
  Rational value() const { return sum; }
};

// sum_m mu_{j,m}^2 for one shape (unweighted). Points are bucketed by box;
// every box without points shares the empty closed form.
template <class T>
T shape_energy(const PointSet& set, DyadicShape s) {
  const int c1 = s.j1 < 0 ? 0 : s.j1;
  const int c2 = s.j2 < 0 ? 0 : s.j2;
  std::map<std::uint64_t, T> boxes;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::uint64_t m1 = s.j1 < 0 ? 0 : set.cell(i, 0, s.j1);
    const std::uint64_t m2 = s.j2 < 0 ? 0 : set.cell(i, 1, s.j2);
    const T term = counting_factor<T>(s.j1, m1, set[i].x, set.key(i, 0)) *
                   counting_factor<T>(s.j2, m2, set[i].y, set.key(i, 1));
    auto [it, inserted] = boxes.try_emplace((m1 << c2) | m2, T(0));
    it->second += term;
  }
  const T linear = count_as<T>(set.size()) * linear_factor<T>(s.j1) * linear_factor<T>(s.j2);
  Accumulator<T> acc;
  for (auto& [key, counting] : boxes) {
    const T value = counting - linear;
    acc.add(T(value * value));
  }
  const std::uint64_t total = std::uint64_t{1} << (c1 + c2);
  const std::uint64_t empty = total - boxes.size();
  if (empty > 0) acc.add(T(T(static_cast<unsigned long>(empty)) * linear * linear));
  return acc.value();
}

template <class T>
std::vector<T> level_energies(const PointSet& set, int max_level) {
  if (max_level < 0 || max_level > kMaxParsevalLevel) {
    throw SizeLimitError(
        fmt::format("parseval level {} outside [0, {}]", max_level, kMaxParsevalLevel));
  }
  std::vector<T> energy(static_cast<std::size_t>(max_level) + 1, T(0));
  for (int j1 = -1; j1 <= max_level; ++j1) {
    for (int j2 = -1; j2 <= max_level; ++j2) {
      const DyadicShape s{j1, j2};
      const int level = s.level();
      if (level > max_level) continue;
      energy[static_cast<std::size_t>(level)] += shape_energy<T>(set, s) * dyadic<T>(1, -level);
    }
  }
  return energy;
}

}  // namespace

DyadicBox::DyadicBox(DyadicShape shape, std::uint64_t m1, std::uint64_t m2)
    : shape_(shape), m1_(m1), m2_(m2) {
  if (!shape.is_proper() || shape.j1 > kMaxShapeComponent || shape.j2 > kMaxShapeComponent) {
    throw DomainError(fmt::format("dyadic box shape ({}, {}) outside [0, {}]^2", shape.j1,
                                  shape.j2, kMaxShapeComponent));
  }
  if ((m1 >> shape.j1) != 0 || (m2 >> shape.j2) != 0) {
    throw DomainError(fmt::format("dyadic box position ({}, {}) out of range for shape ({}, {})",
                                  m1, m2, shape.j1, shape.j2));
  }
}

bool DyadicBox::contains(const Point2& z) const {
  return cell_at(dyadic_key(z.x), shape_.j1) == m1_ && cell_at(dyadic_key(z.y), shape_.j2) == m2_;
}

std::string_view to_string(Quarter q) {
  switch (q) {
    case Quarter::PlusPlus:
      return "++";
    case Quarter::PlusMinus:
      return "+-";
    case Quarter::MinusPlus:
      return "-+";
    case Quarter::MinusMinus:
      return "--";
    case Quarter::Outside:
      break;
  }
  return "outside";
}

std::string_view to_string(Derivation d) {
  switch (d) {
    case Derivation::EmptyClosedForm:
      return "empty-closed-form";
    case Derivation::OnePointClosedForm:
      return "one-point-closed-form";
    case Derivation::GeneralSum:
      break;
  }
  return "general-sum";
}

Quarter quarter_of(const DyadicBox& box, const Point2& z) {
  const int hx = half_of(dyadic_key(z.x), box.shape().j1, box.m1());
  const int hy = half_of(dyadic_key(z.y), box.shape().j2, box.m2());
  if (hx < 0 || hy < 0) return Quarter::Outside;
  if (hx == 0) return hy == 0 ? Quarter::PlusPlus : Quarter::PlusMinus;
  return hy == 0 ? Quarter::MinusPlus : Quarter::MinusMinus;
}

double lemma1_integral(DyadicShape shape) {
  if (!shape.is_proper()) throw DomainError("lemma1_integral requires j1, j2 >= 0");
  return lemma1_value<double>(shape);
}

Rational lemma1_integral_exact(DyadicShape shape) {
  if (!shape.is_proper()) throw DomainError("lemma1_integral requires j1, j2 >= 0");
  return lemma1_value<Rational>(shape);
}

double mu_point(const DyadicBox& box, const Point2& z) { return mu_point_impl<double>(box, z); }

Rational mu_point_exact(const DyadicBox& box, const Point2& z) {
  return mu_point_impl<Rational>(box, z);
}

HaarCoefficient mu(const PointSet& set, const DyadicBox& box) {
  Derivation how{};
  const double v = coefficient_from_members<double>(set, box, members_of(set, box), &how);
  return HaarCoefficient{box, v, how};
}

Rational mu_exact(const PointSet& set, const DyadicBox& box) {
  return coefficient_from_members<Rational>(set, box, members_of(set, box), nullptr);
}

double mu_one_point(const DyadicBox& box, const Point2& z, double n_points) {
  return mu_point(box, z) - n_points * lemma1_integral(box.shape());
}

double mu_empty(DyadicShape shape, double n_points) {
  return -n_points * lemma1_integral(shape);
}

double mu_general_shape(const PointSet& set, DyadicShape shape, std::uint64_t m1,
                        std::uint64_t m2) {
  return mu_general_impl<double>(set, shape, m1, m2);
}

Rational mu_general_shape_exact(const PointSet& set, DyadicShape shape, std::uint64_t m1,
                                std::uint64_t m2) {
  return mu_general_impl<Rational>(set, shape, m1, m2);
}

std::vector<double> parseval_levels(const PointSet& set, int max_level) {
  const auto energy = level_energies<double>(set, max_level);
  std::vector<double> partial;
  partial.reserve(energy.size());
  CompensatedSum running;
  for (double e : energy) {
    running.add(e);
    partial.push_back(running.value());
  }
  return partial;
}

double parseval_partial(const PointSet& set, int max_level) {
  return parseval_levels(set, max_level).back();
}

Rational parseval_partial_exact(const PointSet& set, int max_level) {
  Rational total = 0;
  for (const auto& e : level_energies<Rational>(set, max_level)) total += e;
  total.canonicalize();
  return total;
}

void write_coefficients_csv(std::ostream& out, const PointSet& set, int max_level) {
  if (max_level < 0 || max_level > kMaxDumpLevel) {
    throw SizeLimitError(
        fmt::format("coefficient dump level {} outside [0, {}]", max_level, kMaxDumpLevel));
  }
  out << "j1,j2,m1,m2,mu,derivation\n";
  for (int level = 0; level <= max_level; ++level) {
    for (int j1 = -1; j1 <= level; ++j1) {
      for (int j2 = -1; j2 <= level; ++j2) {
        const DyadicShape s{j1, j2};
        if (s.level() != level) continue;
        if (!s.is_proper()) {
          const std::uint64_t n1 = j1 < 0 ? 1 : std::uint64_t{1} << j1;
          const std::uint64_t n2 = j2 < 0 ? 1 : std::uint64_t{1} << j2;
          for (std::uint64_t m1 = 0; m1 < n1; ++m1) {
            for (std::uint64_t m2 = 0; m2 < n2; ++m2) {
              out << fmt::format("{},{},{},{},{:.12g},factorized\n", j1, j2, m1, m2,
                                 mu_general_shape(set, s, m1, m2));
            }
          }
          continue;
        }
        std::map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < set.size(); ++i) {
          buckets[(set.cell(i, 0, j1) << j2) | set.cell(i, 1, j2)].push_back(i);
        }
        const std::vector<std::size_t> none;
        for (std::uint64_t m1 = 0; m1 < (std::uint64_t{1} << j1); ++m1) {
          for (std::uint64_t m2 = 0; m2 < (std::uint64_t{1} << j2); ++m2) {
            const auto it = buckets.find((m1 << j2) | m2);
            const DyadicBox box(s, m1, m2);
            Derivation how{};
            const double v = coefficient_from_members<double>(
                set, box, it == buckets.end() ? none : it->second, &how);
            out << fmt::format("{},{},{},{},{:.12g},{}\n", j1, j2, m1, m2, v, to_string(how));
          }
        }
      }
    }
  }
}

}  // namespace l2disc
