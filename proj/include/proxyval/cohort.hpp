#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "proxyval/dates.hpp"
#include "proxyval/ingest.hpp"

namespace proxyval {

enum class CohortGroup { case_group, control_group, excluded };

struct CohortAssignment {
  std::string user_id;
  CohortGroup group = CohortGroup::excluded;
  std::optional<Date> window_start;           // inclusive
  std::optional<Date> window_end;             // exclusive
  std::optional<Date> first_target_date;
  std::vector<PurchaseRecord> window_purchases;  // general-product events in window
};

struct CohortOptions {
  int window_days = 365;
  int min_window_purchases = 1;
};

// Case: >= 1 general purchase strictly before the first target purchase;
// window is the window_days before that purchase, end exclusive. Control:
// general purchases only; window ends the day after the last one. Everyone
// else (target-first users, users with only unclassified products, cases
// whose window holds too few general purchases) is excluded.
CohortAssignment assign_cohort(const std::vector<PurchaseRecord>& user_purchases,
                               const std::set<std::string>& target_ids,
                               const std::set<std::string>& general_ids,
                               const CohortOptions& opts = {});

// Batch assignment over purchases sorted by (user_id, date). Splits work
// across threads on user boundaries; output is sorted by user_id and
// independent of the thread count. n_threads 0 picks the hardware count.
std::vector<CohortAssignment> assign_all(const std::vector<PurchaseRecord>& purchases,
                                         const std::set<std::string>& target_ids,
                                         const std::set<std::string>& general_ids,
                                         const CohortOptions& opts = {}, unsigned n_threads = 0);

struct CohortSummary {
  std::size_t cases = 0;
  std::size_t controls = 0;
  std::size_t excluded = 0;
};

CohortSummary cohort_summary(const std::vector<CohortAssignment>& assignments);

void save_cohort(const std::string& path, const std::vector<CohortAssignment>& assignments);

const char* cohort_group_name(CohortGroup g);

}  // namespace proxyval
