#include "l2disc/pointset.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <system_error>

#include "l2disc/errors.hpp"

namespace l2disc {

Coord::Coord(Rational r) : value_(r.get_d()), exact_(std::move(r)) {
  exact_->canonicalize();
}

Rational Coord::rational() const {
  return exact_ ? *exact_ : exact_from_double(value_);
}

bool operator<(const Coord& a, const Coord& b) {
  if (!a.exact_ && !b.exact_) return a.value_ < b.value_;
  return a.rational() < b.rational();
}

bool operator==(const Coord& a, const Coord& b) {
  if (!a.exact_ && !b.exact_) return a.value_ == b.value_;
  return a.rational() == b.rational();
}

std::uint64_t dyadic_key(const Coord& c) {
  if (c.exact()) {
    mpz_class scaled = c.exact()->get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), kDyadicKeyBits);
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), c.exact()->get_den_mpz_t());
    return static_cast<std::uint64_t>(mpz_get_ui(scaled.get_mpz_t()));
  }
  // Scaling by a power of two is exact, so the floor is too.
  return static_cast<std::uint64_t>(std::floor(std::ldexp(c.value(), kDyadicKeyBits)));
}

namespace {

bool in_unit_interval(const Coord& c) {
  if (c.exact()) return *c.exact() >= 0 && *c.exact() < 1;
  return c.value() >= 0.0 && c.value() < 1.0;
}

}  // namespace

PointSet::PointSet(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("point set must contain at least one point");
  keys_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!in_unit_interval(p.x) || !in_unit_interval(p.y)) {
      throw DomainError(fmt::format("point {} = ({}, {}) lies outside [0,1)^2", i,
                                    p.x.value(), p.y.value()));
    }
    keys_.push_back({dyadic_key(p.x), dyadic_key(p.y)});
  }
}

bool PointSet::all_exact() const noexcept {
  for (const auto& p : points_) {
    if (!p.x.is_exact() || !p.y.is_exact()) return false;
  }
  return true;
}

PointSet hammersley(int n) {
  if (n < 0 || n > 30) throw SizeLimitError(fmt::format("hammersley: n = {} outside [0, 30]", n));
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Point2> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t reversed = 0;
    for (int b = 0; b < n; ++b) reversed |= ((i >> b) & 1u) << (n - 1 - b);
    const mpz_class den = mpz_class(1) << n;
    pts.push_back({Coord(Rational(mpz_class(static_cast<unsigned long>(i)), den)),
                   Coord(Rational(mpz_class(static_cast<unsigned long>(reversed)), den))});
  }
  return PointSet(std::move(pts));
}

std::uint64_t fibonacci(int k) {
  std::uint64_t a = 0;
  std::uint64_t b = 1;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t t = a + b;
    a = b;
    b = t;
  }
  return a;
}

PointSet fibonacci_lattice(int k, bool symmetrize) {
  if (k < 2 || k > 35) {
    throw SizeLimitError(fmt::format("fibonacci_lattice: k = {} outside [2, 35]", k));
  }
  const std::uint64_t n = fibonacci(k);
  const std::uint64_t g = fibonacci(k - 1);
  const mpz_class den(static_cast<unsigned long>(n));
  std::vector<Point2> pts;
  pts.reserve(symmetrize ? 2 * n : n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t y = (i * g) % n;
    pts.push_back({Coord(Rational(mpz_class(static_cast<unsigned long>(i)), den)),
                   Coord(Rational(mpz_class(static_cast<unsigned long>(y)), den))});
  }
  if (symmetrize) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t y = (i * g) % n;
      const std::uint64_t reflected = y == 0 ? 0 : n - y;
      pts.push_back({Coord(Rational(mpz_class(static_cast<unsigned long>(i)), den)),
                     Coord(Rational(mpz_class(static_cast<unsigned long>(reflected)), den))});
    }
  }
  return PointSet(std::move(pts));
}

PointSet random_uniform(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("random_uniform: n must be positive");
  std::mt19937_64 rng(seed);
  const mpz_class den = mpz_class(1) << 53;
  auto draw = [&] {
    const std::uint64_t bits = rng() >> 11;
    return Coord(Rational(mpz_class(static_cast<unsigned long>(bits)), den));
  };
  std::vector<Point2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Coord x = draw();
    Coord y = draw();
    pts.push_back({std::move(x), std::move(y)});
  }
  return PointSet(std::move(pts));
}

namespace {

Coord parse_field(const std::string& field, std::size_t line) {
  if (field.find('/') != std::string::npos) {
    auto r = parse_rational(field);
    if (!r) throw ParseError(line, "malformed rational '" + field + "'");
    if (*r < 0 || *r >= 1) {
      throw DomainError(fmt::format("line {}: coordinate {} outside [0,1)", line, field));
    }
    return Coord(std::move(*r));
  }
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, "malformed number '" + field + "'");
  }
  if (v < 0.0 || v >= 1.0) {
    throw DomainError(fmt::format("line {}: coordinate {} outside [0,1)", line, field));
  }
  return Coord(v);
}

}  // namespace

PointSet read_points(std::istream& in) {
  std::vector<Point2> pts;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::istringstream fields(text);
    std::string a;
    std::string b;
    std::string extra;
    if (!(fields >> a)) continue;
    if (a.front() == '#') continue;
    if (!(fields >> b)) throw ParseError(line, "expected two fields");
    if (fields >> extra) throw ParseError(line, "unexpected third field '" + extra + "'");
    Coord x = parse_field(a, line);
    Coord y = parse_field(b, line);
    pts.push_back({std::move(x), std::move(y)});
  }
  if (pts.empty()) throw ParseError(line, "no points in input");
  return PointSet(std::move(pts));
}

namespace {

std::string format_coord(const Coord& c) {
  if (c.exact()) return to_string(*c.exact());
  return fmt::format("{}", c.value());
}

}  // namespace

void write_points(std::ostream& out, const PointSet& set) {
  for (const auto& p : set) out << format_coord(p.x) << ' ' << format_coord(p.y) << '\n';
}

PointSet load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_points(in);
}

void save(const PointSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_points(out, set);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace l2disc
