#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "proxyval/dates.hpp"

namespace proxyval {

struct PurchaseRecord {
  std::string user_id;
  Date date;
  std::string product_id;
  long quantity = 1;
  bool operator==(const PurchaseRecord&) const = default;
};

enum class Category { general, therapeutic };
enum class FoodForm { wet, dry, other };

struct ProductEntry {
  std::string product_id;
  std::string name;
  Category category = Category::general;
  FoodForm food_form = FoodForm::other;
  std::vector<std::string> ingredients;  // normalized, sorted, unique
  bool operator==(const ProductEntry&) const = default;
};

struct ClaimSeriesRow {
  YearMonth month;
  long count = 0;
  bool operator==(const ClaimSeriesRow&) const = default;
};

enum class Group { case_group, control_group };

struct QuestionnaireRecord {
  std::string animal_id;
  Group group = Group::control_group;
  std::vector<std::string> exposures;  // normalized, sorted, unique
  bool operator==(const QuestionnaireRecord&) const = default;
};

// Lenient loads skip malformed rows and record one message per skip;
// strict loads throw ParseError on the first bad row. Structural problems
// (bad header, non-contiguous claim months) always throw.
struct LoadReport {
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::vector<std::string> messages;
};

using Catalog = std::map<std::string, ProductEntry>;

// Sorted by (user_id, date), input order as tiebreak.
std::vector<PurchaseRecord> load_purchases(const std::string& path, bool strict = true,
                                           LoadReport* report = nullptr);
Catalog load_catalog(const std::string& path, bool strict = true, LoadReport* report = nullptr);
std::vector<ClaimSeriesRow> load_claim_series(const std::string& path, bool strict = true,
                                              LoadReport* report = nullptr);
std::vector<QuestionnaireRecord> load_questionnaire(const std::string& path, bool strict = true,
                                                    LoadReport* report = nullptr);

void save_purchases(const std::string& path, const std::vector<PurchaseRecord>& rows);
void save_catalog(const std::string& path, const Catalog& catalog);
void save_claim_series(const std::string& path, const std::vector<ClaimSeriesRow>& rows);
void save_questionnaire(const std::string& path, const std::vector<QuestionnaireRecord>& rows);

std::size_t count_distinct_users(const std::vector<PurchaseRecord>& rows);
std::map<Category, std::size_t> catalog_category_counts(const Catalog& catalog);
std::map<Group, std::size_t> questionnaire_group_counts(
    const std::vector<QuestionnaireRecord>& rows);

const char* category_name(Category c);
const char* food_form_name(FoodForm f);
const char* group_name(Group g);

}  // namespace proxyval
