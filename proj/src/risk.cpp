#include "proxyval/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "proxyval/classify.hpp"
#include "proxyval/error.hpp"

namespace proxyval {
namespace {

RateEstimate make_rate(long positives, long total, const char* what) {
  if (total <= 0) throw DomainError("EmptyDenominator", what);
  RateEstimate r;
  r.positives = positives;
  r.total = total;
  r.rate = static_cast<double>(positives) / static_cast<double>(total);
  return r;
}

}  // namespace

RateEstimate switch_rate(long cases, long controls) {
  return make_rate(cases, cases + controls, "switch rate needs cases + controls > 0");
}

RateEstimate claim_rate(long case_n, long control_n) {
  return make_rate(case_n, case_n + control_n, "claim rate needs case + control animals > 0");
}

std::vector<IngredientRiskRow> ingredient_risk_table(
    const std::vector<CohortAssignment>& assignments, const Catalog& catalog,
    const std::vector<QuestionnaireRecord>& questionnaire, const RiskOptions& opts) {
  struct SideCounts {
    long cases = 0;
    long controls = 0;
  };
  std::map<std::string, SideCounts> ec, claim;

  for (const CohortAssignment& a : assignments) {
    if (a.group == CohortGroup::excluded) continue;
    std::set<std::string> products;
    for (const PurchaseRecord& p : a.window_purchases) products.insert(p.product_id);
    std::set<std::string> exposed = ingredient_exposure(products, catalog);
    for (const std::string& ing : exposed) {
      SideCounts& c = ec[ing];
      if (a.group == CohortGroup::case_group)
        c.cases += 1;
      else
        c.controls += 1;
    }
  }

  long claim_case_total = 0, claim_control_total = 0;
  for (const QuestionnaireRecord& q : questionnaire) {
    bool is_case = q.group == Group::case_group;
    if (is_case)
      claim_case_total += 1;
    else
      claim_control_total += 1;
    for (const std::string& ing : q.exposures) {
      SideCounts& c = claim[ing];
      if (is_case)
        c.cases += 1;
      else
        c.controls += 1;
    }
  }

  std::vector<IngredientRiskRow> rows;
  bool any_shared = false;
  for (const auto& [ing, ec_counts] : ec) {
    auto it = claim.find(ing);
    if (it == claim.end()) continue;
    any_shared = true;
    const SideCounts& cl = it->second;
    long ec_exposed = ec_counts.cases + ec_counts.controls;
    long cl_exposed = cl.cases + cl.controls;
    if (ec_exposed < opts.min_exposure || cl_exposed < opts.min_exposure) continue;
    long unexp_case = claim_case_total - cl.cases;
    long unexp_control = claim_control_total - cl.controls;
    if (unexp_case + unexp_control <= 0) continue;  // no contrast on the claim side

    IngredientRiskRow row;
    row.ingredient = ing;
    row.switch_rate = switch_rate(ec_counts.cases, ec_counts.controls);
    row.claim_rate = claim_rate(cl.cases, cl.controls);
    TwoByTwoTable t;
    t.a = static_cast<double>(cl.cases);
    t.b = static_cast<double>(cl.controls);
    t.c = static_cast<double>(unexp_case);
    t.d = static_cast<double>(unexp_control);
    row.chi2 = chi_squared_2x2(t);
    row.significant = row.chi2.p_value < opts.alpha;
    rows.push_back(std::move(row));
  }
  if (!any_shared)
    throw DomainError("NoSharedIngredients",
                      "purchase and questionnaire ingredient vocabularies do not overlap");
  return rows;  // map iteration already sorts by ingredient
}

TestResult validate_ingredients(const std::vector<IngredientRiskRow>& rows) {
  std::vector<double> claim, sw;
  for (const IngredientRiskRow& r : rows) {
    if (!r.significant) continue;
    claim.push_back(r.claim_rate.rate);
    sw.push_back(r.switch_rate.rate);
  }
  if (claim.size() < 3)
    throw DomainError("TooFewSignificant",
                      "need >= 3 significant ingredient rows, have " +
                          std::to_string(claim.size()));
  return pearson(claim, sw);
}

double wet_rate(const CohortAssignment& assignment, const Catalog& catalog) {
  long wet = 0, dry = 0;
  for (const PurchaseRecord& p : assignment.window_purchases) {
    auto it = catalog.find(p.product_id);
    if (it == catalog.end()) throw DomainError("UnknownProductId", "product_id " + p.product_id);
    switch (it->second.food_form) {
      case FoodForm::wet: wet += 1; break;
      case FoodForm::dry: dry += 1; break;
      case FoodForm::other: break;
    }
  }
  if (wet + dry == 0)
    throw DomainError("NoFormKnownPurchases", "user " + assignment.user_id);
  return static_cast<double>(wet) / static_cast<double>(wet + dry);
}

DoseResponse dose_response(const std::vector<CohortAssignment>& assignments,
                           const Catalog& catalog) {
  constexpr int kBins = 6;
  long cases[kBins] = {0};
  long totals[kBins] = {0};
  DoseResponse out;

  for (const CohortAssignment& a : assignments) {
    if (a.group == CohortGroup::excluded) continue;
    double r;
    try {
      r = wet_rate(a, catalog);
    } catch (const DomainError&) {
      out.skipped += 1;
      continue;
    }
    int bin;
    if (r == 0.0)
      bin = 0;
    else if (r <= 0.25)
      bin = 1;
    else if (r <= 0.5)
      bin = 2;
    else if (r <= 0.75)
      bin = 3;
    else if (r < 1.0)
      bin = 4;
    else
      bin = 5;
    totals[bin] += 1;
    if (a.group == CohortGroup::case_group) cases[bin] += 1;
  }

  for (int b = 0; b < kBins; ++b) {
    WetRateBin wb;
    wb.bin = static_cast<WetBin>(b);
    if (totals[b] > 0) {
      wb.switch_rate = make_rate(cases[b], totals[b], "bin rate");
    }
    out.bins.push_back(wb);
  }

  std::vector<TrendGroup> groups;
  for (int b = 1; b < kBins; ++b) {
    if (totals[b] == 0) continue;
    groups.push_back({static_cast<double>(b), static_cast<double>(cases[b]),
                      static_cast<double>(totals[b])});
  }
  if (groups.size() < 2)
    throw DomainError("EmptyBins", "need >= 2 populated positive wet-rate bins");
  out.trend = cochran_armitage(groups);

  if (totals[1] > 0 && totals[5] > 0 && out.bins[5].switch_rate.rate > 0.0)
    out.ratio = out.bins[1].switch_rate.rate / out.bins[5].switch_rate.rate;
  else
    out.ratio = std::numeric_limits<double>::quiet_NaN();
  return out;
}

const char* wet_bin_name(WetBin b) {
  switch (b) {
    case WetBin::exactly0: return "0%";
    case WetBin::le25: return "(0,25%]";
    case WetBin::le50: return "(25,50%]";
    case WetBin::le75: return "(50,75%]";
    case WetBin::lt100: return "(75,100%)";
    default: return "100%";
  }
}

}  // namespace proxyval
