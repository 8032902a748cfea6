#include "l2disc/bounds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <ostream>

#include "l2disc/errors.hpp"

namespace l2disc {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

double p2(double e) { return std::exp2(e); }

void require_kappa(double kappa, double lo, double hi, bool hi_open, const char* what) {
  const bool ok = kappa >= lo && (hi_open ? kappa < hi : kappa <= hi);
  if (!ok || std::isnan(kappa)) {
    throw DomainError(fmt::format("{}: kappa = {} outside [{}, {}{}", what, kappa, lo, hi,
                                  hi_open ? ")" : "]"));
  }
}

// g restricted to the diagonal, with its first two derivatives.
struct DiagonalG {
  double c1;  // 2^(k-2)
  double c2;  // 2^(k-4)

  explicit DiagonalG(double kappa) : c1(p2(kappa - 2)), c2(p2(kappa - 4)) {}

  double operator()(double b) const {
    const double u = b * b - c1;
    const double v = b - b * b - c2;
    return u * u + 2.0 * v * v;
  }
  double d1(double b) const {
    return 4.0 * b * (b * b - c1) + 4.0 * (b - b * b - c2) * (1.0 - 2.0 * b);
  }
  double d2(double b) const {
    const double s = 1.0 - 2.0 * b;
    return 12.0 * b * b - 4.0 * c1 + 4.0 * (s * s - 2.0 * (b - b * b - c2));
  }
};

}  // namespace

double case1_q(double z, double kappa) {
  const double a = z - p2(kappa - 4);
  const double b = z - p2(kappa - 6);
  return a * a + 2.0 * b * b;
}

Case1Minimum case1_min(double kappa) {
  // Weighted mean of the two targets, clipped to the admissible range.
  const double z = std::clamp((p2(kappa - 4) + 2.0 * p2(kappa - 6)) / 3.0, 0.0, 0.0625);
  return {z, case1_q(z, kappa)};
}

double case2_f(double alpha, double beta, double kappa) {
  if (!(alpha >= 0.0 && alpha < 0.5 && beta >= 0.5 && beta < 1.0)) {
    throw DomainError(
        fmt::format("case2_f: (alpha, beta) = ({}, {}) outside [0,1/2) x [1/2,1)", alpha, beta));
  }
  const double ab = alpha * beta;
  const double t1 = ab - p2(kappa - 2);
  const double t2 = ab - p2(kappa - 4);
  const double t3 = alpha * (1.0 - beta) - p2(kappa - 4);
  return t1 * t1 + t2 * t2 + t3 * t3;
}

Case2Minimum case2_min(double kappa) {
  // Free minimum in (p, q): p = (2^(k-2) + 2^(k-4)) / 2 = 5 2^k / 32, q = 2^(k-4).
  const double p = 5.0 * p2(kappa) / 32.0;
  const double q = p2(kappa - 4);
  const double alpha = p + q;
  const double beta = p / alpha;
  if (!(alpha >= 0.0 && alpha < 0.5 && beta >= 0.5 && beta < 1.0)) {
    throw ConsistencyError(fmt::format(
        "case2_min: unconstrained minimiser ({}, {}) infeasible at kappa = {}", alpha, beta, kappa));
  }
  return {alpha, beta, case2_f(alpha, beta, kappa)};
}

double case4_g(double alpha, double beta, double kappa) {
  if (!(alpha >= 0.5 && alpha <= 1.0 && beta >= 0.5 && beta <= 1.0)) {
    throw DomainError(
        fmt::format("case4_g: (alpha, beta) = ({}, {}) outside [1/2,1]^2", alpha, beta));
  }
  const double t1 = alpha * beta - p2(kappa - 2);
  const double t2 = alpha * (1.0 - beta) - p2(kappa - 4);
  const double t3 = (1.0 - alpha) * beta - p2(kappa - 4);
  return t1 * t1 + t2 * t2 + t3 * t3;
}

HMinimum h_minimum(double kappa) {
  require_kappa(kappa, -1.0, 1.0, false, "h_of");
  const DiagonalG phi(kappa);

  constexpr int kScan = 64;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = phi(0.5 + 0.5 * i / kScan);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = 0.5 + 0.5 * std::max(best - 1, 0) / kScan;
  const double hi = 0.5 + 0.5 * std::min(best + 1, kScan) / kScan;
  const auto [brent_x, brent_v] = boost::math::tools::brent_find_minima(
      phi, lo, hi, std::numeric_limits<double>::digits / 2);

  double b = brent_x;
  if (lo == 0.5 && phi.d1(0.5) >= 0.0 && phi(0.5) <= brent_v) {
    return {0.5, phi(0.5), true};
  }
  if (hi == 1.0 && phi.d1(1.0) <= 0.0 && phi(1.0) <= brent_v) {
    return {1.0, phi(1.0), false};
  }
  for (int it = 0; it < 50; ++it) {
    const double curvature = phi.d2(b);
    if (!(curvature > 0.0)) break;
    const double next = std::clamp(b - phi.d1(b) / curvature, lo, hi);
    const bool done = std::abs(next - b) <= 4.0 * std::numeric_limits<double>::epsilon();
    b = next;
    if (done) break;
  }
  if (phi(b) > brent_v) b = brent_x;
  return {b, phi(b), false};
}

double h_of(double kappa) { return h_minimum(kappa).value; }

DiagonalCertificate certify_diagonal(double kappa, int resolution, double tolerance) {
  if (resolution < 2) throw DomainError("certify_diagonal: resolution must be at least 2");
  const HMinimum diag = h_minimum(kappa);
  DiagonalCertificate cert{kappa, diag.value, std::numeric_limits<double>::infinity(), 0.0, 0.0,
                           resolution};
  const double step = 0.5 / (resolution - 1);
  const double c1 = p2(kappa - 2);
  const double c2 = p2(kappa - 4);
  for (int i = 0; i < resolution; ++i) {
    const double a = 0.5 + step * i;
    for (int k = 0; k < resolution; ++k) {
      const double b = 0.5 + step * k;
      const double t1 = a * b - c1;
      const double t2 = a * (1.0 - b) - c2;
      const double t3 = (1.0 - a) * b - c2;
      const double v = t1 * t1 + t2 * t2 + t3 * t3;
      if (v < cert.grid_min) {
        cert.grid_min = v;
        cert.grid_alpha = a;
        cert.grid_beta = b;
      }
    }
  }
  if (std::abs(cert.grid_min - cert.diagonal_min) > tolerance) {
    throw ConsistencyError(fmt::format(
        "diagonal minimum of g not confirmed at kappa = {}: diagonal {} vs grid {} at ({}, {})",
        kappa, cert.diagonal_min, cert.grid_min, cert.grid_alpha, cert.grid_beta));
  }
  if (diag.beta >= 1.0) {
    throw ConsistencyError(
        fmt::format("minimiser of g sits on the excluded edge beta = 1 at kappa = {}", kappa));
  }
  return cert;
}

std::string_view to_string(GammaBranch b) {
  return b == GammaBranch::Quadratic ? "quadratic" : "diagonal";
}

GammaValue gamma_eval(double kappa) {
  require_kappa(kappa, -1.0, 1.0, false, "gamma");
  const double quadratic = 9.0 * p2(2.0 * kappa - 13.0);
  const double diagonal = h_of(kappa) / 16.0;
  if (quadratic <= diagonal) return {quadratic, GammaBranch::Quadratic};
  return {diagonal, GammaBranch::Diagonal};
}

double gamma_of(double kappa) { return gamma_eval(kappa).value; }

double delta(double kappa) {
  require_kappa(kappa, 0.0, 1.0, false, "delta");
  const double s = p2(kappa);
  double d = p2(2.0 * kappa - 8.0) / 3.0 - p2(3.0 * kappa - 8.0) / 7.0;
  if (2.0 - s != 0.0) d += (2.0 - s) * gamma_of(kappa);
  if (s - 1.0 != 0.0) d += (s - 1.0) * gamma_of(kappa - 1.0);
  return d;
}

Rational delta_exact(int kappa) {
  if (kappa != 0 && kappa != 1) throw DomainError("delta_exact: kappa must be 0 or 1");
  if (gamma_eval(0.0).branch != GammaBranch::Quadratic) {
    throw ConsistencyError("delta_exact: gamma(0) is not on the quadratic branch");
  }
  const Rational gamma0 = Rational(9) * pow2(-13);
  Rational d = pow2(2 * kappa - 8) / 3 - pow2(3 * kappa - 8) / 7 + gamma0;
  d.canonicalize();
  return d;
}

PhiValues phi_values(double kappa) {
  require_kappa(kappa, 0.0, 1.0, true, "phi_values");
  const double s = p2(kappa);
  const double g0 = gamma_of(kappa);
  const double g1 = gamma_of(kappa - 1.0);
  return {(2.0 - s) * (g0 - 0.5 * g1), (2.0 - s) * p2(2.0 * kappa - 11.0) + s * 0.5 * g1};
}

double sigma1_prime(int M, double kappa) {
  require_kappa(kappa, 0.0, 1.0, true, "sigma1_prime");
  const double s = p2(kappa);
  const double g0 = gamma_of(kappa);
  const double g1 = gamma_of(kappa - 1.0);
  return (M + 1.0) * (2.0 - s) * (g0 - 0.5 * g1) + (M + 2.0) * s * 0.5 * g1;
}

bool lemma6_check(std::span<const double> a, double alpha, double beta, double sigma) {
  constexpr double kTol = 1e-12;
  if (a.empty()) throw DomainError("lemma6_check: empty distribution");
  double mass = 0.0;
  double mean = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (!(a[r] >= 0.0)) throw DomainError("lemma6_check: negative weight");
    mass += a[r];
    mean += static_cast<double>(r) * a[r];
  }
  if (std::abs(mass - 1.0) > kTol) throw DomainError("lemma6_check: weights must sum to 1");
  if (!(sigma >= 0.0 && sigma <= 2.0)) throw DomainError("lemma6_check: sigma outside [0, 2]");
  if (std::abs(mean - sigma) > kTol * std::max(1.0, sigma)) {
    throw DomainError("lemma6_check: mean of the distribution differs from sigma");
  }
  if (!(beta >= 0.0 && alpha >= 2.0 * beta)) {
    throw DomainError("lemma6_check: need alpha >= 2 beta >= 0");
  }
  const double a0 = a[0];
  const double a1 = a.size() > 1 ? a[1] : 0.0;
  const double lhs = alpha * a0 + beta * a1;
  const double slack = kTol * std::max({1.0, alpha, beta});
  bool ok = true;
  if (sigma <= 1.0) ok = ok && lhs >= alpha * (1.0 - sigma) + beta * sigma - slack;
  if (sigma >= 1.0) ok = ok && lhs >= beta * (2.0 - sigma) - slack;
  return ok;
}

double sigma2_exact(int M, double kappa) {
  if (M < 0 || M > kMaxSigma2M) {
    throw SizeLimitError(fmt::format("sigma2_exact: M = {} outside [0, {}]", M, kMaxSigma2M));
  }
  // With l = M + 1 + t the summand is (M + 2 + t)(2^(2k-10-2t) - 2^(3k-11-3t)).
  double sum = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const double term =
        (M + 2.0 + t) * (p2(2.0 * kappa - 10.0 - 2.0 * t) - p2(3.0 * kappa - 11.0 - 3.0 * t));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double sigma2_bound(int M, double kappa) {
  return (M + 2.0) * (p2(2.0 * kappa - 8.0) / 3.0 - p2(3.0 * kappa - 8.0) / 7.0);
}

double hm_w(double y) { return y * y / 192.0 - y * y * y / 224.0; }

Rational hm_w_exact(const Rational& y) {
  Rational w = y * y / 192 - y * y * y / 224;
  w.canonicalize();
  return w;
}

HmCorrected hm_corrected() {
  HmCorrected out;
  out.w_at_one = hm_w_exact(Rational(1));
  // w'(y) = y/96 - 3y^2/224 vanishes at y = 224/288 = 7/9.
  out.y_max = Rational(7, 9);
  out.w_max = hm_w_exact(out.y_max);
  out.cbar = std::sqrt(out.w_at_one.get_d() / kLn2);
  out.bbar = std::sqrt(out.w_max.get_d() / kLn2);
  return out;
}

std::vector<KappaRow> kappa_table(int grid) {
  if (grid < 2) throw DomainError("kappa_table: grid must have at least 2 points");
  std::vector<KappaRow> rows;
  rows.reserve(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double kappa = i == grid - 1 ? 1.0 : -1.0 + 2.0 * i / (grid - 1);
    const GammaValue g = gamma_eval(kappa);
    KappaRow row{kappa, h_of(kappa), g.value, g.branch, std::nullopt};
    if (kappa >= 0.0) row.delta = delta(kappa);
    rows.push_back(row);
  }
  return rows;
}

void write_kappa_table_csv(std::ostream& out, const std::vector<KappaRow>& rows) {
  out << "kappa,h,gamma,gamma_branch,delta\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.12g},{:.12g},{:.12g},{},", r.kappa, r.h, r.gamma, to_string(r.branch));
    if (r.delta) out << fmt::format("{:.12g}", *r.delta);
    out << '\n';
  }
}

namespace {

// Root of 9 2^(2k-13) - h(k)/16 on [0, 1): the quadratic branch holds below it.
double branch_switch_point() {
  const auto gap = [](double k) { return 9.0 * p2(2.0 * k - 13.0) - h_of(k) / 16.0; };
  double lo = 0.0;
  double hi = 0.999999;
  if (!(gap(lo) < 0.0 && gap(hi) > 0.0)) {
    throw ConsistencyError("gamma branches do not cross exactly once on [0, 1)");
  }
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BoundReport theorem_constants(const BoundOptions& options) {
  if (options.grid < 5) throw DomainError("theorem_constants: grid must have at least 5 points");
  BoundReport report;
  report.grid = options.grid;

  std::vector<double> ks(static_cast<std::size_t>(options.grid));
  std::vector<double> ds(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ks[i] = i + 1 == ks.size() ? 1.0 : static_cast<double>(i) / (options.grid - 1);
    ds[i] = delta(ks[i]);
  }

  // Shape: one sign change of the forward differences, from + to -.
  int last_sign = 0;
  int first_sign = 0;
  int changes = 0;
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
    const double diff = ds[i + 1] - ds[i];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (first_sign == 0) first_sign = sign;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  report.sign_changes = changes;
  if (changes != 1 || first_sign != 1) {
    throw ConsistencyError(fmt::format(
        "Delta is not increasing-then-decreasing on [0,1]: {} sign changes, first sign {}",
        changes, first_sign));
  }

  report.delta_min_exact = std::min(delta_exact(0), delta_exact(1));
  report.delta_min = report.delta_min_exact.get_d();
  const double grid_min = *std::min_element(ds.begin(), ds.end());
  if (grid_min < report.delta_min * (1.0 - 1e-13)) {
    throw ConsistencyError(
        fmt::format("Delta has an interior value {} below the boundary minimum {}", grid_min,
                    report.delta_min));
  }
  report.c_bar_lower = std::sqrt(report.delta_min / kLn2);

  const auto top = static_cast<std::size_t>(std::max_element(ds.begin(), ds.end()) - ds.begin());
  const double lo = ks[top == 0 ? 0 : top - 1];
  const double hi = ks[std::min(top + 1, ks.size() - 1)];
  const auto [kx, neg] = boost::math::tools::brent_find_minima(
      [](double k) { return -delta(k); }, lo, hi, std::numeric_limits<double>::digits / 2);
  report.kappa0 = kx;
  report.delta_max = -neg;
  report.branch_switch = branch_switch_point();
  if (report.branch_switch >= lo && report.branch_switch <= hi) {
    const double at_switch = delta(report.branch_switch);
    if (at_switch >= report.delta_max) {
      report.kappa0 = report.branch_switch;
      report.delta_max = at_switch;
    }
  }
  report.b_bar_lower = std::sqrt(report.delta_max / kLn2);

  const HmCorrected hm = hm_corrected();
  report.hm_cbar = hm.cbar;
  report.hm_bbar = hm.bbar;

  const int count = std::max(options.certificate_count, 2);
  for (int i = 0; i < count; ++i) {
    const double kappa = -1.0 + 1.99 * i / (count - 1);
    report.certificates.push_back(
        certify_diagonal(kappa, options.certificate_resolution, options.certificate_tolerance));
  }
  return report;
}

}  // namespace l2disc
