#include "proxyval/seasonality.hpp"

#include <algorithm>
#include <cmath>

#include "proxyval/error.hpp"

namespace proxyval {

MonthlySeries ec_onset_series(const std::vector<CohortAssignment>& assignments) {
  int lo = 0, hi = 0;
  bool any = false;
  for (const CohortAssignment& a : assignments) {
    if (a.group != CohortGroup::case_group || !a.first_target_date) continue;
    int m = month_of(*a.first_target_date).index;
    if (!any) {
      lo = hi = m;
      any = true;
    } else {
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  }
  if (!any) throw DomainError("NoCases", "no case has a first target purchase");
  return ec_onset_series(assignments, YearMonth{lo}, static_cast<std::size_t>(hi - lo + 1));
}

MonthlySeries ec_onset_series(const std::vector<CohortAssignment>& assignments, YearMonth start,
                              std::size_t n_months) {
  MonthlySeries s;
  s.start_month = start;
  s.values.assign(n_months, 0.0);
  bool any = false;
  for (const CohortAssignment& a : assignments) {
    if (a.group != CohortGroup::case_group || !a.first_target_date) continue;
    any = true;
    int offset = month_of(*a.first_target_date).index - start.index;
    if (offset >= 0 && offset < static_cast<int>(n_months))
      s.values[static_cast<std::size_t>(offset)] += 1.0;
  }
  if (!any) throw DomainError("NoCases", "no case has a first target purchase");
  return s;
}

MonthlySeries claims_to_series(const std::vector<ClaimSeriesRow>& rows) {
  MonthlySeries s;
  if (rows.empty()) return s;
  s.start_month = rows.front().month;
  s.values.reserve(rows.size());
  for (const ClaimSeriesRow& r : rows) s.values.push_back(static_cast<double>(r.count));
  return s;
}

SeasonalAgreement seasonal_agreement(const MonthlySeries& a, const MonthlySeries& b,
                                     const StlParams& params) {
  if (a.start_month.index != b.start_month.index || a.values.size() != b.values.size())
    throw DomainError("RangeMismatch", "series cover different month ranges");

  SeasonalAgreement out;
  out.stl_a = stl_decompose(a.values, params);
  out.stl_b = stl_decompose(b.values, params);
  out.correlation = pearson(out.stl_a.seasonal, out.stl_b.seasonal);

  double count[12] = {0};
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    int cal = (a.start_month.index + static_cast<int>(i)) % 12;  // 0 = January
    out.profile_a[cal] += out.stl_a.seasonal[i];
    out.profile_b[cal] += out.stl_b.seasonal[i];
    count[cal] += 1.0;
  }
  std::vector<double> pa, pb;
  for (int m = 0; m < 12; ++m) {
    if (count[m] > 0) {
      out.profile_a[m] /= count[m];
      out.profile_b[m] /= count[m];
    }
    pa.push_back(out.profile_a[m]);
    pb.push_back(out.profile_b[m]);
  }
  out.profile_correlation = pearson(pa, pb);
  out.peak_month_a =
      static_cast<int>(std::max_element(pa.begin(), pa.end()) - pa.begin()) + 1;
  out.peak_month_b =
      static_cast<int>(std::max_element(pb.begin(), pb.end()) - pb.begin()) + 1;

  // Lag scan: positive lag means b trails a.
  double best_r = -2.0;
  int n = static_cast<int>(a.values.size());
  for (int lag = -3; lag <= 3; ++lag) {
    std::vector<double> xa, xb;
    for (int t = 0; t < n; ++t) {
      int u = t + lag;
      if (u < 0 || u >= n) continue;
      xa.push_back(out.stl_a.seasonal[static_cast<std::size_t>(t)]);
      xb.push_back(out.stl_b.seasonal[static_cast<std::size_t>(u)]);
    }
    if (xa.size() < 3) continue;
    double r;
    try {
      r = pearson(xa, xb).statistic;
    } catch (const DomainError&) {
      continue;  // constant slice carries no lag information
    }
    bool better = r > best_r + 1e-12 ||
                  (std::fabs(r - best_r) <= 1e-12 && std::abs(lag) < std::abs(out.best_lag));
    if (better) {
      best_r = r;
      out.best_lag = lag;
    }
  }
  return out;
}

}  // namespace proxyval
