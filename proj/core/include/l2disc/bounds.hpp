#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "l2disc/rational.hpp"

// Constants of the improved lower bound for the two-dimensional
// L2-discrepancy. All functions of kappa refer to the split N = 2^(M + kappa)
// with M integral and 0 <= kappa < 1, and are scaled by 2^(2M) (Case 1) or
// 2^(2M + 4) (Cases 2 and 4) so that M drops out.

namespace l2disc {

// --- Case 1: both coordinates in the inner lower-left quarter -------------

/// (z - 2^(k-4))^2 + 2 (z - 2^(k-6))^2.
double case1_q(double z, double kappa);

struct Case1Minimum {
  double z;
  double value;
};

/// Minimum of case1_q over z in [0, 2^-4]: z = 2^(k-5), value 3 * 2^(2k-11).
Case1Minimum case1_min(double kappa);

// --- Case 2: one coordinate in the outer half ------------------------------

/// (ab - 2^(k-2))^2 + (ab - 2^(k-4))^2 + (a(1-b) - 2^(k-4))^2 on
/// 0 <= a < 1/2, 1/2 <= b < 1. Throws DomainError outside.
double case2_f(double alpha, double beta, double kappa);

struct Case2Minimum {
  double alpha;
  double beta;
  double value;
};

/// Substituting p = ab and q = a(1 - b) decouples f into three squares;
/// the free minimiser a = 7 2^k / 32, b = 5/7 is feasible for k < log2(16/7).
/// Throws ConsistencyError if it is not.
Case2Minimum case2_min(double kappa);

// --- Case 4: both coordinates in the outer half ----------------------------

/// (ab - 2^(k-2))^2 + (a(1-b) - 2^(k-4))^2 + ((1-a)b - 2^(k-4))^2 on the
/// closed square [1/2, 1]^2. Throws DomainError outside.
double case4_g(double alpha, double beta, double kappa);

struct HMinimum {
  double beta;   ///< minimiser on the diagonal alpha = beta
  double value;  ///< h(kappa)
  bool at_lower_edge;
};

/// Minimum of g along the diagonal: coarse scan, Brent refinement, then
/// Newton on the cubic derivative of g(b, b). Throws DomainError outside [-1, 1].
HMinimum h_minimum(double kappa);
double h_of(double kappa);

struct DiagonalCertificate {
  double kappa;
  double diagonal_min;
  double grid_min;
  double grid_alpha;
  double grid_beta;
  int resolution;
};

/// Brute-force scan of g over a resolution x resolution grid of [1/2, 1]^2.
/// Throws ConsistencyError when the grid minimum and the diagonal minimum
/// differ by more than `tolerance`, or when the minimiser sits on beta = 1.
DiagonalCertificate certify_diagonal(double kappa, int resolution = 1500,
                                     double tolerance = 1e-7);

// --- gamma, Delta ----------------------------------------------------------

enum class GammaBranch {
  Quadratic,  ///< 9 * 2^(2k - 13), from Cases 2 and 3
  Diagonal,   ///< 2^-4 h(k), from Case 4
};

std::string_view to_string(GammaBranch b);

struct GammaValue {
  double value;
  GammaBranch branch;
};

/// gamma(k) = min(9 * 2^(2k-13), 2^-4 h(k)). The Case 1 value 3 * 2^(2k-11)
/// always exceeds the first branch. Domain [-1, 1].
GammaValue gamma_eval(double kappa);
double gamma_of(double kappa);

/// Delta(k) = 2^(2k-8)/3 - 2^(3k-8)/7 + (2 - 2^k) gamma(k) + (2^k - 1) gamma(k - 1)
/// on [0, 1]. Terms with a zero weight are skipped.
double delta(double kappa);

/// Delta at kappa in {0, 1} in rational arithmetic. Requires the quadratic
/// branch of gamma(0); throws ConsistencyError otherwise, DomainError for
/// any other kappa.
Rational delta_exact(int kappa);

// --- Weights over occupancy ---------------------------------------------------

struct PhiValues {
  double phi_M;
  double phi_M1;
};

/// phi_M = (2 - 2^k)(gamma(k) - gamma(k-1)/2),
/// phi_{M+1} = (2 - 2^k) 2^(2k-11) + 2^k gamma(k-1)/2. Domain [0, 1).
PhiValues phi_values(double kappa);

/// (M+1)(2 - 2^k)(gamma(k) - gamma(k-1)/2) + (M+2) 2^k gamma(k-1)/2.
double sigma1_prime(int M, double kappa);

/// Given a distribution a_r (index r) with sum 1 and mean sigma and weights
/// alpha >= 2 beta >= 0, reports whether
///   alpha a_0 + beta a_1 >= alpha (1 - sigma) + beta sigma   (0 <= sigma <= 1)
///   alpha a_0 + beta a_1 >= beta (2 - sigma)                 (1 <= sigma <= 2)
/// holds (both when sigma = 1). Throws DomainError on infeasible input.
bool lemma6_check(std::span<const double> a, double alpha, double beta, double sigma);

// --- Empty-box series --------------------------------------------------------

inline constexpr int kMaxSigma2M = 60;

/// sum_{l >= M+1} 2^l (l+1)(2^l - 2^(M+k)) 2^(2M + 2k - 4l - 8), term by term
/// until the relative tail is below 1e-16.
double sigma2_exact(int M, double kappa);

/// (M + 2)(2^(2k-8)/3 - 2^(3k-8)/7).
double sigma2_bound(int M, double kappa);

// --- Corrected constants of the empty-box bound ------------------------------

/// w(y) = y^2/192 - y^3/224.
double hm_w(double y);
Rational hm_w_exact(const Rational& y);

struct HmCorrected {
  Rational w_at_one;  ///< 1/1344, the minimum over (1/2, 1]
  Rational y_max;     ///< 7/9
  Rational w_max;     ///< 49/46656
  double cbar;        ///< sqrt(w(1) / ln 2)
  double bbar;        ///< sqrt(w(7/9) / ln 2)
};

HmCorrected hm_corrected();

// --- Theorem constants --------------------------------------------------------

struct KappaRow {
  double kappa;
  double h;
  double gamma;
  GammaBranch branch;
  std::optional<double> delta;  ///< present for kappa in [0, 1]
};

/// `grid` equally spaced kappa values covering [-1, 1].
std::vector<KappaRow> kappa_table(int grid);

/// Header "kappa,h,gamma,gamma_branch,delta"; delta is empty outside [0, 1].
void write_kappa_table_csv(std::ostream& out, const std::vector<KappaRow>& rows);

struct BoundOptions {
  int grid = 4097;
  int certificate_resolution = 1500;
  int certificate_count = 21;
  double certificate_tolerance = 1e-7;
};

struct BoundReport {
  Rational delta_min_exact;
  double delta_min;
  double c_bar_lower;  ///< sqrt(delta_min / ln 2)
  double kappa0;
  double delta_max;
  double b_bar_lower;    ///< sqrt(delta_max / ln 2)
  double branch_switch;  ///< kappa in [0, 1) where the two gamma branches cross
  int sign_changes;      ///< of the forward differences of Delta on the grid
  int grid;
  double hm_cbar;
  double hm_bbar;
  std::vector<DiagonalCertificate> certificates;
};

/// Scans Delta on [0, 1], certifies the increasing-then-decreasing shape and
/// the boundary minimum, refines the interior maximum, and runs the
/// diagonal certificates for h. Throws ConsistencyError on any failed check.
BoundReport theorem_constants(const BoundOptions& options = {});

}  // namespace l2disc
