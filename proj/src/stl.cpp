#include "proxyval/stl.hpp"

#include <algorithm>
#include <cmath>

#include "proxyval/error.hpp"
#include "proxyval/numstat.hpp"

namespace proxyval {
namespace {

// Moving average of window m; output length is a.size() - m + 1.
std::vector<double> moving_average(const std::vector<double>& a, int m) {
  std::size_t out_n = a.size() - static_cast<std::size_t>(m) + 1;
  std::vector<double> out(out_n);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += a[static_cast<std::size_t>(i)];
  out[0] = acc / m;
  for (std::size_t i = 1; i < out_n; ++i) {
    acc += a[i + m - 1] - a[i - 1];
    out[i] = acc / m;
  }
  return out;
}

// Smooth each cycle subseries of `detrended`, extending one period beyond
// each end. Returns an array of length n + 2*period whose index 0 maps to
// time -period.
std::vector<double> cycle_subseries_smooth(const std::vector<double>& detrended, int period,
                                           int span, const std::vector<double>* rw) {
  std::size_t n = detrended.size();
  std::vector<double> c(n + 2 * static_cast<std::size_t>(period));
  std::vector<double> xs, ys, sub_rw, targets;
  for (int k = 0; k < period; ++k) {
    xs.clear();
    ys.clear();
    sub_rw.clear();
    std::size_t len = 0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; t += period) {
      ++len;
      xs.push_back(static_cast<double>(len));
      ys.push_back(detrended[t]);
      if (rw) sub_rw.push_back((*rw)[t]);
    }
    targets.resize(len + 2);
    for (std::size_t j = 0; j < len + 2; ++j) targets[j] = static_cast<double>(j);
    std::vector<double> fit =
        loess_at(xs, ys, span, 1, rw ? &sub_rw : nullptr, targets);
    for (std::size_t j = 0; j < len + 2; ++j) {
      // target j sits at time k + (j-1)*period, offset by +period into c
      c[static_cast<std::size_t>(k) + j * static_cast<std::size_t>(period)] = fit[j];
    }
  }
  return c;
}

// MA(period) twice, MA(3), then a degree-1 loess: n + 2*period -> n.
std::vector<double> low_pass(const std::vector<double>& c, int period, int span) {
  std::vector<double> s = moving_average(c, period);
  s = moving_average(s, period);
  s = moving_average(s, 3);
  std::vector<double> xs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) xs[i] = static_cast<double>(i + 1);
  return loess(xs, s, span, 1, nullptr);
}

std::vector<double> robustness_weights(const std::vector<double>& remainder) {
  std::size_t n = remainder.size();
  std::vector<double> abs_r(n);
  for (std::size_t i = 0; i < n; ++i) abs_r[i] = std::fabs(remainder[i]);
  std::vector<double> sorted = abs_r;
  std::sort(sorted.begin(), sorted.end());
  double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double h = 6.0 * median;
  std::vector<double> w(n, 1.0);
  if (h <= 0.0) return w;
  for (std::size_t i = 0; i < n; ++i) {
    if (abs_r[i] <= 0.001 * h) {
      w[i] = 1.0;
    } else if (abs_r[i] >= 0.999 * h) {
      w[i] = 0.0;
    } else {
      double u = abs_r[i] / h;
      double t = 1.0 - u * u;
      w[i] = t * t;
    }
  }
  return w;
}

void validate_params(std::size_t n, const StlParams& p) {
  if (p.period < 2) throw DomainError("DomainError", "period must be >= 2");
  if (n < 2 * static_cast<std::size_t>(p.period))
    throw DomainError("SeriesTooShort", "need at least two full periods of data");
  for (int span : {p.seasonal_span, p.trend_span, p.lowpass_span}) {
    if (span < 3 || span % 2 == 0)
      throw DomainError("DomainError", "loess spans must be odd and >= 3");
  }
  if (p.n_inner < 1) throw DomainError("DomainError", "n_inner must be >= 1");
  if (p.n_outer < 0) throw DomainError("DomainError", "n_outer must be >= 0");
}

}  // namespace

StlResult stl_decompose(const std::vector<double>& y, const StlParams& params) {
  std::size_t n = y.size();
  validate_params(n, params);

  std::vector<double> trend(n, 0.0);
  std::vector<double> seasonal(n, 0.0);
  std::vector<double> rw(n, 1.0);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i + 1);

  std::vector<double> detrended(n), deseasonalized(n);
  for (int outer = 0; outer <= params.n_outer; ++outer) {
    const std::vector<double>* weights = outer > 0 ? &rw : nullptr;
    for (int inner = 0; inner < params.n_inner; ++inner) {
      for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];
      std::vector<double> c =
          cycle_subseries_smooth(detrended, params.period, params.seasonal_span, weights);
      std::vector<double> low = low_pass(c, params.period, params.lowpass_span);
      for (std::size_t i = 0; i < n; ++i)
        seasonal[i] = c[i + static_cast<std::size_t>(params.period)] - low[i];
      for (std::size_t i = 0; i < n; ++i) deseasonalized[i] = y[i] - seasonal[i];
      trend = loess(xs, deseasonalized, params.trend_span, 1, weights);
    }
    if (outer < params.n_outer) {
      std::vector<double> remainder(n);
      for (std::size_t i = 0; i < n; ++i) remainder[i] = y[i] - trend[i] - seasonal[i];
      rw = robustness_weights(remainder);
    }
  }

  StlResult out;
  out.trend = std::move(trend);
  out.seasonal = std::move(seasonal);
  out.remainder.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.remainder[i] = y[i] - out.trend[i] - out.seasonal[i];
  out.weights = params.n_outer > 0 ? std::move(rw) : std::vector<double>(n, 1.0);
  return out;
}

}  // namespace proxyval
