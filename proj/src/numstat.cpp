#include "proxyval/numstat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proxyval/error.hpp"

namespace proxyval {
namespace {

constexpr double kConvEps = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 500;

// P(s,x) by the power series, x < s+1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kConvEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Q(s,x) by modified Lentz continued fraction, x >= s+1.
double gamma_q_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = std::fabs(b) < kTiny ? 1.0 / kTiny : 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kConvEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kConvEps) break;
  }
  return h;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double reg_incomplete_gamma_upper(double s, double x) {
  if (!(s > 0.0)) throw DomainError("DomainError", "gamma shape s must be > 0");
  if (!(x >= 0.0)) throw DomainError("DomainError", "gamma argument x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double reg_incomplete_gamma_lower(double s, double x) {
  return 1.0 - reg_incomplete_gamma_upper(s, x);
}

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("DomainError", "beta shapes must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("DomainError", "beta argument x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x);
  double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double std_normal_sf(double z) {
  if (z < 0.0) return 1.0 - std_normal_sf(-z);
  if (z == 0.0) return 0.5;
  return 0.5 * reg_incomplete_gamma_upper(0.5, 0.5 * z * z);
}

double chi_squared_sf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("DomainError", "chi-squared df must be > 0");
  if (!(x >= 0.0)) throw DomainError("DomainError", "chi-squared statistic must be >= 0");
  return reg_incomplete_gamma_upper(0.5 * df, 0.5 * x);
}

TestResult chi_squared_2x2(const TwoByTwoTable& t, bool yates) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
    throw DomainError("DomainError", "2x2 counts must be non-negative");
  double r1 = t.a + t.b, r2 = t.c + t.d;
  double c1 = t.a + t.c, c2 = t.b + t.d;
  double n = r1 + r2;
  if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0)
    throw DomainError("DegenerateMargin", "2x2 table has an empty row or column");
  double obs[4] = {t.a, t.b, t.c, t.d};
  double expd[4] = {r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n};
  double stat = 0.0;
  for (int i = 0; i < 4; ++i) {
    double diff = std::fabs(obs[i] - expd[i]);
    if (yates) diff = std::max(0.0, diff - 0.5);
    stat += diff * diff / expd[i];
  }
  return {stat, chi_squared_sf(stat, 1.0), 1.0};
}

TestResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("LengthMismatch", "pearson inputs differ in length");
  std::size_t n = x.size();
  if (n < 3) throw DomainError("TooFewPoints", "pearson needs n >= 3");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DomainError("ZeroVariance", "pearson input has no variance");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  double df = static_cast<double>(n - 2);
  double p;
  double rr = r * r;
  if (rr >= 1.0) {
    p = 0.0;
  } else {
    double t2 = rr * df / (1.0 - rr);
    p = reg_incomplete_beta(0.5 * df, 0.5, df / (df + t2));
  }
  return {r, p, df};
}

TestResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("LengthMismatch", "spearman inputs differ in length");
  return pearson(average_ranks(x), average_ranks(y));
}

TestResult cochran_armitage(const std::vector<TrendGroup>& groups) {
  if (groups.size() < 2) throw DomainError("DomainError", "trend test needs >= 2 groups");
  double n_total = 0.0, cases_total = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const TrendGroup& g = groups[i];
    if (g.total <= 0 || g.cases < 0 || g.cases > g.total)
      throw DomainError("DomainError", "trend group counts invalid");
    if (i > 0 && !(g.score > groups[i - 1].score))
      throw DomainError("DomainError", "trend scores must be strictly increasing");
    n_total += g.total;
    cases_total += g.cases;
  }
  double pbar = cases_total / n_total;
  if (pbar <= 0.0 || pbar >= 1.0)
    throw DomainError("DegenerateVariance", "all cases or all controls");
  double num = 0.0, s2n = 0.0, sn = 0.0;
  for (const TrendGroup& g : groups) {
    num += g.score * (g.cases - g.total * pbar);
    s2n += g.score * g.score * g.total;
    sn += g.score * g.total;
  }
  double var = pbar * (1.0 - pbar) * (s2n - sn * sn / n_total);
  if (var <= 0.0) throw DomainError("DegenerateVariance", "score spread is zero");
  double z = num / std::sqrt(var);
  return {z, 2.0 * std_normal_sf(std::fabs(z)), 0.0};
}

double tricube(double u) {
  u = std::fabs(u);
  if (u >= 1.0) return 0.0;
  double t = 1.0 - u * u * u;
  return t * t * t;
}

std::pair<std::size_t, std::size_t> loess_window(const std::vector<double>& xs, double target,
                                                 int span) {
  std::size_t n = xs.size();
  std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(span), n);
  std::size_t l = 0, r = q - 1;
  while (r + 1 < n && target - xs[l] > xs[r + 1] - target) {
    ++l;
    ++r;
  }
  return {l, r};
}

namespace {

double loess_fit_point(const std::vector<double>& xs, const std::vector<double>& ys, int span,
                       int degree, const std::vector<double>* rob, double target) {
  std::size_t n = xs.size();
  auto [l, r] = loess_window(xs, target, span);
  double h = std::max(target - xs[l], xs[r] - target);
  if (static_cast<std::size_t>(span) > n && n > 1) {
    // Bandwidth inflation for spans wider than the data, as in the classic
    // seasonal-trend smoother.
    double dbar = (xs[n - 1] - xs[0]) / static_cast<double>(n - 1);
    h += static_cast<double>((span - static_cast<int>(n)) / 2) * dbar;
  }

  double sw = 0.0, swx = 0.0, swy = 0.0;
  if (h <= 0.0) return ys[l];  // single-point window
  for (std::size_t j = l; j <= r; ++j) {
    double w = tricube((xs[j] - target) / h);
    if (rob) w *= (*rob)[j];
    sw += w;
    swx += w * xs[j];
    swy += w * ys[j];
  }
  if (sw <= 0.0) {
    // Every usable weight vanished (robustness zeros or a target exactly
    // between two extreme points); fall back to the plain window mean.
    double m = 0.0;
    for (std::size_t j = l; j <= r; ++j) m += ys[j];
    return m / static_cast<double>(r - l + 1);
  }
  double ym = swy / sw;
  if (degree == 0) return ym;

  double xm = swx / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = l; j <= r; ++j) {
    double w = tricube((xs[j] - target) / h);
    if (rob) w *= (*rob)[j];
    double dx = xs[j] - xm;
    sxx += w * dx * dx;
    sxy += w * dx * (ys[j] - ym);
  }
  double range = xs[n - 1] - xs[0];
  if (std::sqrt(sxx / sw) <= 1e-3 * range) return ym;  // no usable x spread
  return ym + (sxy / sxx) * (target - xm);
}

void validate_loess_args(const std::vector<double>& xs, const std::vector<double>& ys, int span,
                         int degree, const std::vector<double>* rob) {
  if (xs.size() != ys.size()) throw DomainError("LengthMismatch", "loess x/y lengths differ");
  if (xs.empty()) throw DomainError("DomainError", "loess needs data");
  if (degree != 0 && degree != 1) throw DomainError("DomainError", "loess degree must be 0 or 1");
  if (span < degree + 1) throw DomainError("SpanTooSmall", "span must be >= degree+1");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw DomainError("NonMonotoneX", "loess x values must be strictly increasing");
  }
  if (rob && rob->size() != xs.size())
    throw DomainError("LengthMismatch", "robustness weights length differs from data");
}

}  // namespace

std::vector<double> loess_at(const std::vector<double>& xs, const std::vector<double>& ys,
                             int span, int degree, const std::vector<double>* robustness,
                             const std::vector<double>& targets) {
  validate_loess_args(xs, ys, span, degree, robustness);
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    out[i] = loess_fit_point(xs, ys, span, degree, robustness, targets[i]);
  return out;
}

std::vector<double> loess(const std::vector<double>& xs, const std::vector<double>& ys, int span,
                          int degree, const std::vector<double>* robustness) {
  validate_loess_args(xs, ys, span, degree, robustness);
  int span_eff = std::min<int>(span, static_cast<int>(xs.size()));
  return loess_at(xs, ys, span_eff, degree, robustness, xs);
}

}  // namespace proxyval
