#include "proxyval/cohort.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "proxyval/csv.hpp"
#include "proxyval/error.hpp"

namespace proxyval {
namespace {

std::vector<PurchaseRecord> purchases_in_window(const std::vector<PurchaseRecord>& purchases,
                                                const std::set<std::string>& general_ids,
                                                Date start, Date end) {
  std::vector<PurchaseRecord> out;
  for (const PurchaseRecord& p : purchases) {
    if (p.date >= start && p.date < end && general_ids.count(p.product_id)) out.push_back(p);
  }
  return out;
}

}  // namespace

CohortAssignment assign_cohort(const std::vector<PurchaseRecord>& user_purchases,
                               const std::set<std::string>& target_ids,
                               const std::set<std::string>& general_ids,
                               const CohortOptions& opts) {
  CohortAssignment a;
  if (user_purchases.empty()) return a;
  a.user_id = user_purchases.front().user_id;

  std::optional<Date> first_target;
  std::optional<Date> last_general;
  bool general_before_target = false;
  for (const PurchaseRecord& p : user_purchases) {
    if (target_ids.count(p.product_id)) {
      if (!first_target) first_target = p.date;
    } else if (general_ids.count(p.product_id)) {
      if (!last_general || p.date > *last_general) last_general = p.date;
      if (!first_target) general_before_target = true;
    }
  }

  std::chrono::days window{opts.window_days};
  if (first_target) {
    a.first_target_date = first_target;
    if (!general_before_target) return a;  // target-first: no switch observed
    Date end = *first_target;
    Date start = end - window;
    a.window_purchases = purchases_in_window(user_purchases, general_ids, start, end);
    if (a.window_purchases.size() < static_cast<std::size_t>(opts.min_window_purchases)) {
      a.window_purchases.clear();
      return a;  // switch too stale: diet unobservable in-window
    }
    a.group = CohortGroup::case_group;
    a.window_start = start;
    a.window_end = end;
    return a;
  }

  if (!last_general) return a;  // only unclassified products
  Date end = *last_general + std::chrono::days{1};
  Date start = end - window;
  a.window_purchases = purchases_in_window(user_purchases, general_ids, start, end);
  if (a.window_purchases.size() < static_cast<std::size_t>(opts.min_window_purchases)) {
    a.window_purchases.clear();
    return a;
  }
  a.group = CohortGroup::control_group;
  a.window_start = start;
  a.window_end = end;
  return a;
}

std::vector<CohortAssignment> assign_all(const std::vector<PurchaseRecord>& purchases,
                                         const std::set<std::string>& target_ids,
                                         const std::set<std::string>& general_ids,
                                         const CohortOptions& opts, unsigned n_threads) {
  // Contiguous index range per user; input is sorted by user_id.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t i = 0;
  while (i < purchases.size()) {
    std::size_t j = i + 1;
    while (j < purchases.size() && purchases[j].user_id == purchases[i].user_id) ++j;
    ranges.emplace_back(i, j);
    i = j;
  }

  std::vector<CohortAssignment> out(ranges.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      std::vector<PurchaseRecord> slice(purchases.begin() + ranges[k].first,
                                        purchases.begin() + ranges[k].second);
      out[k] = assign_cohort(slice, target_ids, general_ids, opts);
    }
  };

  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(ranges.size(), 1));
  if (n_threads <= 1) {
    work(0, ranges.size());
  } else {
    std::vector<std::jthread> pool;
    std::size_t chunk = (ranges.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      std::size_t lo = std::min(ranges.size(), t * chunk);
      std::size_t hi = std::min(ranges.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const CohortAssignment& a, const CohortAssignment& b) {
                     return a.user_id < b.user_id;
                   });
  return out;
}

CohortSummary cohort_summary(const std::vector<CohortAssignment>& assignments) {
  CohortSummary s;
  for (const CohortAssignment& a : assignments) {
    switch (a.group) {
      case CohortGroup::case_group: s.cases += 1; break;
      case CohortGroup::control_group: s.controls += 1; break;
      case CohortGroup::excluded: s.excluded += 1; break;
    }
  }
  return s;
}

void save_cohort(const std::string& path, const std::vector<CohortAssignment>& assignments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "user_id,group,window_start,window_end,first_target_date\n";
  for (const CohortAssignment& a : assignments) {
    out << csv_escape(a.user_id) << ',' << cohort_group_name(a.group) << ','
        << (a.window_start ? format_date(*a.window_start) : "") << ','
        << (a.window_end ? format_date(*a.window_end) : "") << ','
        << (a.first_target_date ? format_date(*a.first_target_date) : "") << '\n';
  }
}

const char* cohort_group_name(CohortGroup g) {
  switch (g) {
    case CohortGroup::case_group: return "case";
    case CohortGroup::control_group: return "control";
    default: return "excluded";
  }
}

}  // namespace proxyval
