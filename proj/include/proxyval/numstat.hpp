#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace proxyval {

// Statistic + p-value pair shared by every test in the kernel. `statistic`
// holds the test's natural quantity (chi2 value, correlation r, trend Z);
// `df` carries degrees of freedom where the test has them, else 0.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
};

// Counts; rows exposed/unexposed, columns case/control.
struct TwoByTwoTable {
  double a = 0;  // exposed cases
  double b = 0;  // exposed controls
  double c = 0;  // unexposed cases
  double d = 0;  // unexposed controls
};

// One ordered dose group: score, case count, group size.
struct TrendGroup {
  double score = 0;
  double cases = 0;
  double total = 0;
};

// ---- special functions -------------------------------------------------

// Regularized upper incomplete gamma Q(s,x). Series for x < s+1, Lentz
// continued fraction otherwise; absolute error <= 1e-10 on s in [0.5,50],
// x in [0,200].
double reg_incomplete_gamma_upper(double s, double x);
double reg_incomplete_gamma_lower(double s, double x);

// Regularized incomplete beta I_x(a,b), continued fraction with the
// symmetry switch at x = (a+1)/(a+b+2).
double reg_incomplete_beta(double a, double b, double x);

// Upper tail of the standard normal, built on the incomplete gamma
// (erfc(t) = Q(1/2, t^2) for t >= 0).
double std_normal_sf(double z);

// Survival function of the chi-squared distribution.
double chi_squared_sf(double x, double df);

// ---- tests ---------------------------------------------------------------

// Pearson chi-squared on a 2x2 table, df=1, no continuity correction unless
// `yates`. Throws DegenerateMargin when a row or column total is zero.
TestResult chi_squared_2x2(const TwoByTwoTable& t, bool yates = false);

// Correlation r with two-sided p from the t distribution on n-2 df.
TestResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Rank correlation (average ranks on ties); p as for pearson on the ranks.
TestResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// Cochran-Armitage trend test; statistic is the signed Z, p two-sided normal.
TestResult cochran_armitage(const std::vector<TrendGroup>& groups);

// ---- LOESS -----------------------------------------------------------------

// Locally weighted regression at each xs[i]: tricube weights over the `span`
// nearest neighbors (times optional robustness weights), weighted
// least-squares of `degree` (0 or 1) evaluated at the point. xs must be
// strictly increasing; span is clamped to n.
std::vector<double> loess(const std::vector<double>& xs, const std::vector<double>& ys, int span,
                          int degree, const std::vector<double>* robustness = nullptr);

// Engine used by loess and by the STL decomposition: fits at arbitrary
// targets (inside or outside the data range) and inflates the bandwidth when
// span exceeds n, following the classic seasonal-trend smoother.
std::vector<double> loess_at(const std::vector<double>& xs, const std::vector<double>& ys,
                             int span, int degree, const std::vector<double>* robustness,
                             const std::vector<double>& targets);

// Window of min(span,n) consecutive points minimizing the max distance to
// `target` (leftmost on ties). Exposed so oracle tests can reproduce the
// exact neighborhood choice.
std::pair<std::size_t, std::size_t> loess_window(const std::vector<double>& xs, double target,
                                                 int span);

// (1-u^3)^3 on [0,1), 0 beyond.
double tricube(double u);

}  // namespace proxyval
