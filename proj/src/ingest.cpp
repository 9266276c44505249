#include "proxyval/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <utility>

#include "proxyval/csv.hpp"
#include "proxyval/error.hpp"
#include "proxyval/text.hpp"

namespace proxyval {
namespace {

void check_header(CsvReader& reader, const std::vector<std::string>& expected) {
  std::vector<std::string> cols;
  if (!reader.next(cols)) throw ParseError(ParseErrorCode::MissingColumn, 1, "empty file");
  for (std::string& c : cols) c = trim(c);
  if (cols != expected) {
    std::string want = csv_join(expected);
    throw ParseError(ParseErrorCode::MissingColumn, 1, "header must be `" + want + "`");
  }
}

void check_arity(const std::vector<std::string>& fields, std::size_t line_no, std::size_t arity) {
  if (fields.size() != arity)
    throw ParseError(ParseErrorCode::BadRow, line_no,
                     "expected " + std::to_string(arity) + " fields, got " +
                         std::to_string(fields.size()));
}

long parse_count(const std::string& s, std::size_t line_no) {
  std::string t{trim(s)};
  if (t.empty()) throw ParseError(ParseErrorCode::BadNumber, line_no, "empty number");
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (const std::exception&) {
    throw ParseError(ParseErrorCode::BadNumber, line_no, "not an integer: " + t);
  }
  if (pos != t.size())
    throw ParseError(ParseErrorCode::BadNumber, line_no, "not an integer: " + t);
  return v;
}

std::vector<std::string> parse_token_set(const std::string& field) {
  std::set<std::string> uniq;
  for (const std::string& raw : split(field, ';')) {
    std::string tok = normalize_token(raw);
    if (!tok.empty()) uniq.insert(tok);
  }
  return {uniq.begin(), uniq.end()};
}

// Runs `parse_row` per data row; in lenient mode row-level ParseErrors are
// tallied and skipped instead of thrown.
template <typename Fn>
void for_each_row(CsvReader& reader, bool strict, LoadReport* report, Fn parse_row) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    try {
      parse_row(fields, reader.line());
      rep.accepted += 1;
    } catch (const ParseError& e) {
      if (strict) throw;
      rep.skipped += 1;
      rep.messages.push_back(e.what());
    }
  }
}

}  // namespace

std::vector<PurchaseRecord> load_purchases(const std::string& path, bool strict,
                                           LoadReport* report) {
  CsvReader reader(path);
  check_header(reader, {"user_id", "date", "product_id", "quantity"});
  std::vector<PurchaseRecord> rows;
  for_each_row(reader, strict, report, [&](const std::vector<std::string>& f,
                                           std::size_t line_no) {
    check_arity(f, line_no, 4);
    PurchaseRecord r;
    r.user_id = trim(f[0]);
    if (r.user_id.empty()) throw ParseError(ParseErrorCode::EmptyField, line_no, "empty user_id");
    std::optional<Date> d = parse_date(trim(f[1]));
    if (!d) throw ParseError(ParseErrorCode::BadDate, line_no, "date `" + f[1] + "`");
    r.date = *d;
    r.product_id = trim(f[2]);
    if (r.product_id.empty())
      throw ParseError(ParseErrorCode::EmptyField, line_no, "empty product_id");
    r.quantity = parse_count(f[3], line_no);
    if (r.quantity < 1)
      throw ParseError(ParseErrorCode::NonPositiveQuantity, line_no,
                       "quantity " + std::to_string(r.quantity));
    rows.push_back(std::move(r));
  });
  std::stable_sort(rows.begin(), rows.end(), [](const PurchaseRecord& a, const PurchaseRecord& b) {
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    return a.date < b.date;
  });
  return rows;
}

Catalog load_catalog(const std::string& path, bool strict, LoadReport* report) {
  CsvReader reader(path);
  check_header(reader, {"product_id", "name", "category", "food_form", "ingredients"});
  Catalog catalog;
  for_each_row(reader, strict, report, [&](const std::vector<std::string>& f,
                                           std::size_t line_no) {
    check_arity(f, line_no, 5);
    ProductEntry e;
    e.product_id = trim(f[0]);
    if (e.product_id.empty())
      throw ParseError(ParseErrorCode::EmptyField, line_no, "empty product_id");
    e.name = f[1];
    std::string cat = normalize_token(f[2]);
    if (cat == "general")
      e.category = Category::general;
    else if (cat == "therapeutic")
      e.category = Category::therapeutic;
    else
      throw ParseError(ParseErrorCode::UnknownCategory, line_no, "category `" + f[2] + "`");
    std::string form = normalize_token(f[3]);
    if (form == "wet")
      e.food_form = FoodForm::wet;
    else if (form == "dry")
      e.food_form = FoodForm::dry;
    else if (form == "other")
      e.food_form = FoodForm::other;
    else
      throw ParseError(ParseErrorCode::UnknownFoodForm, line_no, "food_form `" + f[3] + "`");
    e.ingredients = parse_token_set(f[4]);
    auto [it, inserted] = catalog.emplace(e.product_id, std::move(e));
    if (!inserted)
      throw ParseError(ParseErrorCode::DuplicateProductId, line_no, "product_id " + it->first);
  });
  return catalog;
}

std::vector<ClaimSeriesRow> load_claim_series(const std::string& path, bool strict,
                                              LoadReport* report) {
  CsvReader reader(path);
  check_header(reader, {"month", "count"});
  std::vector<ClaimSeriesRow> rows;
  for_each_row(reader, strict, report, [&](const std::vector<std::string>& f,
                                           std::size_t line_no) {
    check_arity(f, line_no, 2);
    ClaimSeriesRow r;
    std::optional<YearMonth> m = parse_month(trim(f[0]));
    if (!m) throw ParseError(ParseErrorCode::BadMonth, line_no, "month `" + f[0] + "`");
    r.month = *m;
    r.count = parse_count(f[1], line_no);
    if (r.count < 0)
      throw ParseError(ParseErrorCode::NegativeCount, line_no,
                       "count " + std::to_string(r.count));
    rows.push_back(r);
  });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].month.index != rows[i - 1].month.index + 1)
      throw ParseError(ParseErrorCode::NonContiguousMonths, 0,
                       "gap after " + format_month(rows[i - 1].month));
  }
  return rows;
}

std::vector<QuestionnaireRecord> load_questionnaire(const std::string& path, bool strict,
                                                    LoadReport* report) {
  CsvReader reader(path);
  check_header(reader, {"animal_id", "group", "exposures"});
  std::vector<QuestionnaireRecord> rows;
  std::set<std::string> seen;
  for_each_row(reader, strict, report, [&](const std::vector<std::string>& f,
                                           std::size_t line_no) {
    check_arity(f, line_no, 3);
    QuestionnaireRecord r;
    r.animal_id = trim(f[0]);
    if (r.animal_id.empty())
      throw ParseError(ParseErrorCode::EmptyField, line_no, "empty animal_id");
    std::string g = normalize_token(f[1]);
    if (g == "case")
      r.group = Group::case_group;
    else if (g == "control")
      r.group = Group::control_group;
    else
      throw ParseError(ParseErrorCode::UnknownGroup, line_no, "group `" + f[1] + "`");
    r.exposures = parse_token_set(f[2]);
    if (!seen.insert(r.animal_id).second)
      throw ParseError(ParseErrorCode::DuplicateAnimalId, line_no, "animal_id " + r.animal_id);
    rows.push_back(std::move(r));
  });
  return rows;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void save_purchases(const std::string& path, const std::vector<PurchaseRecord>& rows) {
  std::ofstream out = open_out(path);
  out << "user_id,date,product_id,quantity\n";
  for (const PurchaseRecord& r : rows) {
    out << csv_escape(r.user_id) << ',' << format_date(r.date) << ',' << csv_escape(r.product_id)
        << ',' << r.quantity << '\n';
  }
}

void save_catalog(const std::string& path, const Catalog& catalog) {
  std::ofstream out = open_out(path);
  out << "product_id,name,category,food_form,ingredients\n";
  for (const auto& [id, e] : catalog) {
    std::string ing;
    for (std::size_t i = 0; i < e.ingredients.size(); ++i) {
      if (i) ing += ';';
      ing += e.ingredients[i];
    }
    out << csv_escape(id) << ',' << csv_escape(e.name) << ',' << category_name(e.category) << ','
        << food_form_name(e.food_form) << ',' << csv_escape(ing) << '\n';
  }
}

void save_claim_series(const std::string& path, const std::vector<ClaimSeriesRow>& rows) {
  std::ofstream out = open_out(path);
  out << "month,count\n";
  for (const ClaimSeriesRow& r : rows) out << format_month(r.month) << ',' << r.count << '\n';
}

void save_questionnaire(const std::string& path, const std::vector<QuestionnaireRecord>& rows) {
  std::ofstream out = open_out(path);
  out << "animal_id,group,exposures\n";
  for (const QuestionnaireRecord& r : rows) {
    std::string exp;
    for (std::size_t i = 0; i < r.exposures.size(); ++i) {
      if (i) exp += ';';
      exp += r.exposures[i];
    }
    out << csv_escape(r.animal_id) << ',' << group_name(r.group) << ',' << csv_escape(exp) << '\n';
  }
}

std::size_t count_distinct_users(const std::vector<PurchaseRecord>& rows) {
  std::set<std::string> users;
  for (const PurchaseRecord& r : rows) users.insert(r.user_id);
  return users.size();
}

std::map<Category, std::size_t> catalog_category_counts(const Catalog& catalog) {
  std::map<Category, std::size_t> counts;
  for (const auto& [id, e] : catalog) counts[e.category] += 1;
  return counts;
}

std::map<Group, std::size_t> questionnaire_group_counts(
    const std::vector<QuestionnaireRecord>& rows) {
  std::map<Group, std::size_t> counts;
  for (const QuestionnaireRecord& r : rows) counts[r.group] += 1;
  return counts;
}

const char* category_name(Category c) {
  return c == Category::general ? "general" : "therapeutic";
}

const char* food_form_name(FoodForm f) {
  switch (f) {
    case FoodForm::wet: return "wet";
    case FoodForm::dry: return "dry";
    default: return "other";
  }
}

const char* group_name(Group g) {
  return g == Group::case_group ? "case" : "control";
}

}  // namespace proxyval
