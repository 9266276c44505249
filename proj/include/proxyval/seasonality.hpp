#pragma once

#include <cstddef>
#include <vector>

#include "proxyval/cohort.hpp"
#include "proxyval/dates.hpp"
#include "proxyval/ingest.hpp"
#include "proxyval/numstat.hpp"
#include "proxyval/stl.hpp"

namespace proxyval {

struct MonthlySeries {
  YearMonth start_month{0};
  std::vector<double> values;
};

// Case count per month of first target purchase. The two-argument form
// spans the observed case months; the explicit-range form aligns the series
// with another source (cases outside the range are dropped). Throws
// DomainError("NoCases") when no case exists.
MonthlySeries ec_onset_series(const std::vector<CohortAssignment>& assignments);
MonthlySeries ec_onset_series(const std::vector<CohortAssignment>& assignments, YearMonth start,
                              std::size_t n_months);

MonthlySeries claims_to_series(const std::vector<ClaimSeriesRow>& rows);

struct SeasonalAgreement {
  TestResult correlation;          // Pearson between the two seasonal components
  TestResult profile_correlation;  // Pearson between 12-month average profiles
  double profile_a[12] = {0};      // average seasonal value per calendar month (Jan..Dec)
  double profile_b[12] = {0};
  int peak_month_a = 0;  // calendar month 1..12 with the highest average seasonal
  int peak_month_b = 0;
  int best_lag = 0;      // lag in [-3,3] maximizing corr(a[t], b[t+lag])
  StlResult stl_a;
  StlResult stl_b;
};

// Decomposes both series and quantifies seasonal agreement. Throws
// DomainError("RangeMismatch") unless the month ranges are identical.
SeasonalAgreement seasonal_agreement(const MonthlySeries& a, const MonthlySeries& b,
                                     const StlParams& params = {});

}  // namespace proxyval
