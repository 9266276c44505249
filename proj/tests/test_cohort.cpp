#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "proxyval/cohort.hpp"
#include "proxyval/dates.hpp"
#include "proxyval/rng.hpp"
#include "testutil.hpp"

using namespace proxyval;

namespace {

Date D(const char* s) { return parse_date(s).value(); }

PurchaseRecord rec(std::string user, const char* date, std::string pid, long qty = 1) {
  return PurchaseRecord{std::move(user), D(date), std::move(pid), qty};
}

const std::set<std::string> kTargets{"t1"};
const std::set<std::string> kGenerals{"g1", "g2"};

bool same_assignment(const CohortAssignment& a, const CohortAssignment& b) {
  return a.user_id == b.user_id && a.group == b.group && a.window_start == b.window_start &&
         a.window_end == b.window_end && a.first_target_date == b.first_target_date &&
         a.window_purchases == b.window_purchases;
}

}  // namespace

TEST_SUITE("cohort") {

TEST_CASE("switcher becomes a case with a look-back window") {
  std::vector<PurchaseRecord> p{rec("u1", "2018-02-01", "g1"), rec("u1", "2018-06-01", "g1"),
                                rec("u1", "2018-09-01", "t1")};
  CohortAssignment a = assign_cohort(p, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::case_group);
  CHECK(a.first_target_date == D("2018-09-01"));
  CHECK(a.window_start == D("2017-09-01"));
  CHECK(a.window_end == D("2018-09-01"));
  REQUIRE(a.window_purchases.size() == 2);
  CHECK(a.window_purchases[0].date == D("2018-02-01"));
  CHECK(*a.window_end - *a.window_start == std::chrono::days{365});
}

TEST_CASE("target-first users are excluded but keep the target date") {
  std::vector<PurchaseRecord> p{rec("u2", "2018-01-01", "t1"), rec("u2", "2018-03-01", "g1")};
  CohortAssignment a = assign_cohort(p, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::excluded);
  CHECK(a.first_target_date == D("2018-01-01"));
  CHECK_FALSE(a.window_start.has_value());
  CHECK(a.window_purchases.empty());
}

TEST_CASE("non-switcher becomes a control anchored on the last purchase") {
  std::vector<PurchaseRecord> p{rec("u3", "2019-06-01", "g1"), rec("u3", "2020-12-15", "g2")};
  CohortAssignment a = assign_cohort(p, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::control_group);
  CHECK(a.window_end == D("2020-12-16"));
  CHECK(a.window_start == D("2019-12-17"));
  REQUIRE(a.window_purchases.size() == 1);
  CHECK(a.window_purchases[0].date == D("2020-12-15"));
}

TEST_CASE("window boundaries are start-inclusive and end-exclusive") {
  // A general purchase on the switch day itself falls outside the window.
  std::vector<PurchaseRecord> same_day{rec("u4", "2018-01-01", "g1"),
                                       rec("u4", "2018-09-01", "g1"),
                                       rec("u4", "2018-09-01", "t1")};
  CohortAssignment a = assign_cohort(same_day, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::case_group);
  REQUIRE(a.window_purchases.size() == 1);
  CHECK(a.window_purchases[0].date == D("2018-01-01"));

  // A purchase exactly 365 days before the switch is still inside.
  std::vector<PurchaseRecord> edge{rec("u5", "2018-01-01", "g1"), rec("u5", "2019-01-01", "t1")};
  CohortAssignment b = assign_cohort(edge, kTargets, kGenerals);
  CHECK(b.group == CohortGroup::case_group);
  CHECK(b.window_start == D("2018-01-01"));
  CHECK(b.window_purchases.size() == 1);
}

TEST_CASE("stale switches and sparse windows are excluded") {
  std::vector<PurchaseRecord> stale{rec("u6", "2016-01-01", "g1"), rec("u6", "2018-09-01", "t1")};
  CohortAssignment a = assign_cohort(stale, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::excluded);
  CHECK(a.first_target_date == D("2018-09-01"));
  CHECK(a.window_purchases.empty());

  CohortOptions two;
  two.min_window_purchases = 2;
  std::vector<PurchaseRecord> one{rec("u7", "2018-06-01", "g1"), rec("u7", "2018-09-01", "t1")};
  CHECK(assign_cohort(one, kTargets, kGenerals, two).group == CohortGroup::excluded);
  CHECK(assign_cohort(one, kTargets, kGenerals).group == CohortGroup::case_group);

  std::vector<PurchaseRecord> ctrl{rec("u8", "2018-06-01", "g1")};
  CHECK(assign_cohort(ctrl, kTargets, kGenerals, two).group == CohortGroup::excluded);
}

TEST_CASE("users without classified purchases are excluded") {
  std::vector<PurchaseRecord> p{rec("u9", "2018-01-01", "zz")};
  CohortAssignment a = assign_cohort(p, kTargets, kGenerals);
  CHECK(a.group == CohortGroup::excluded);
  CHECK(a.user_id == "u9");
  CHECK_FALSE(a.first_target_date.has_value());

  CohortAssignment empty = assign_cohort({}, kTargets, kGenerals);
  CHECK(empty.group == CohortGroup::excluded);
  CHECK(empty.user_id.empty());
}

TEST_CASE("assign_all is thread-count invariant and sorted") {
  SplitRng rng(31);
  std::vector<PurchaseRecord> purchases;
  const char* products[] = {"g1", "g2", "g1", "g2", "t1", "zz"};
  for (int u = 0; u < 300; ++u) {
    std::string uid = "u" + std::to_string(1000 + u);
    int n = 1 + static_cast<int>(rng.next_below(7));
    for (int k = 0; k < n; ++k) {
      Date d = D("2018-01-01") + std::chrono::days{static_cast<int>(rng.next_below(1000))};
      purchases.push_back({uid, d, products[rng.next_below(6)], 1});
    }
  }
  std::stable_sort(purchases.begin(), purchases.end(),
                   [](const PurchaseRecord& a, const PurchaseRecord& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     return a.date < b.date;
                   });

  std::vector<CohortAssignment> one = assign_all(purchases, kTargets, kGenerals, {}, 1);
  std::vector<CohortAssignment> four = assign_all(purchases, kTargets, kGenerals, {}, 4);
  std::vector<CohortAssignment> hw = assign_all(purchases, kTargets, kGenerals, {}, 0);
  REQUIRE(one.size() == 300);
  REQUIRE(four.size() == 300);
  REQUIRE(hw.size() == 300);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(same_assignment(one[i], four[i]));
    CHECK(same_assignment(one[i], hw[i]));
    if (i > 0) CHECK(one[i - 1].user_id < one[i].user_id);
  }

  CohortSummary sum = cohort_summary(one);
  CHECK(sum.cases + sum.controls + sum.excluded == 300);
  CHECK(sum.cases > 0);
  CHECK(sum.controls > 0);

  // With no target products at all, nobody can be a case.
  std::vector<CohortAssignment> no_targets = assign_all(purchases, {}, kGenerals, {}, 2);
  for (const CohortAssignment& a : no_targets) CHECK(a.group != CohortGroup::case_group);
}

TEST_CASE("save_cohort emits one row per user") {
  std::vector<PurchaseRecord> sw{rec("u1", "2018-02-01", "g1"), rec("u1", "2018-09-01", "t1")};
  std::vector<PurchaseRecord> tf{rec("u2", "2018-01-01", "t1")};
  std::vector<CohortAssignment> rows{assign_cohort(sw, kTargets, kGenerals),
                                     assign_cohort(tf, kTargets, kGenerals)};
  std::filesystem::path dir = testutil::scratch_dir("cohort");
  std::string path = (dir / "cohort.csv").string();
  save_cohort(path, rows);
  CHECK(testutil::read_file(path) ==
        "user_id,group,window_start,window_end,first_target_date\n"
        "u1,case,2017-09-01,2018-09-01,2018-09-01\n"
        "u2,excluded,,,2018-01-01\n");
}

}  // TEST_SUITE
