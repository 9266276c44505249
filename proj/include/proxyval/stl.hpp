#pragma once

#include <vector>

namespace proxyval {

// Seasonal-trend decomposition by loess, after Cleveland et al. (1990).
// Additive model: y = trend + seasonal + remainder, exact by construction.
struct StlParams {
  int period = 12;
  int seasonal_span = 7;   // loess span for cycle-subseries smoothing, odd
  int trend_span = 23;     // loess span for trend smoothing, odd
  int lowpass_span = 13;   // loess span inside the low-pass filter, odd
  int n_inner = 2;         // inner-loop iterations per robustness pass
  int n_outer = 1;         // robustness iterations (0 disables reweighting)
};

struct StlResult {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> remainder;
  std::vector<double> weights;  // final robustness weights, all 1 if n_outer == 0
};

// Throws DomainError("SeriesTooShort") unless y.size() >= 2 * period,
// DomainError("DomainError") for bad parameter values (period < 2,
// even or non-positive spans, negative iteration counts).
StlResult stl_decompose(const std::vector<double>& y, const StlParams& params);

}  // namespace proxyval
