#pragma once

#include <string>
#include <vector>

#include "proxyval/cohort.hpp"
#include "proxyval/ingest.hpp"
#include "proxyval/numstat.hpp"

namespace proxyval {

struct RateEstimate {
  long positives = 0;
  long total = 0;
  double rate = 0.0;
};

// Proxy indicator: cases / (cases + controls) on the purchase side.
RateEstimate switch_rate(long cases, long controls);
// Ground-truth indicator: case animals / (case + control animals).
RateEstimate claim_rate(long case_n, long control_n);

struct IngredientRiskRow {
  std::string ingredient;
  RateEstimate switch_rate;
  RateEstimate claim_rate;
  TestResult chi2;
  bool significant = false;
};

struct RiskOptions {
  double alpha = 0.05;
  long min_exposure = 50;  // minimum exposed units per side; smaller rows drop
};

// Per-ingredient rates from both sources. EC side: case/control users whose
// in-window purchases contain the ingredient. Claim side: case/control
// questionnaire animals listing it, with a chi-squared test on the claim 2x2
// table (screening side). Rows sorted by ingredient token. Throws
// DomainError("NoSharedIngredients") if the two vocabularies are disjoint.
std::vector<IngredientRiskRow> ingredient_risk_table(
    const std::vector<CohortAssignment>& assignments, const Catalog& catalog,
    const std::vector<QuestionnaireRecord>& questionnaire, const RiskOptions& opts = {});

// Pearson r between claim_rate and switch_rate over the significant rows.
// Throws DomainError("TooFewSignificant") below 3 rows.
TestResult validate_ingredients(const std::vector<IngredientRiskRow>& rows);

// Wet-form share of in-window general purchase events; `other` forms count
// on neither side. Throws DomainError("NoFormKnownPurchases") when no wet
// or dry event exists.
double wet_rate(const CohortAssignment& assignment, const Catalog& catalog);

enum class WetBin { exactly0, le25, le50, le75, lt100, exactly100 };

struct WetRateBin {
  WetBin bin = WetBin::exactly0;
  RateEstimate switch_rate;
};

struct DoseResponse {
  std::vector<WetRateBin> bins;  // all six bins in order, possibly empty
  TestResult trend;              // Cochran-Armitage over the five positive bins, scores 1..5
  double ratio = 0.0;            // switch rate in (0,25%] over switch rate at 100%
  std::size_t skipped = 0;       // users with no form-known purchases
};

// Throws DomainError("EmptyBins") when fewer than two positive bins are
// populated.
DoseResponse dose_response(const std::vector<CohortAssignment>& assignments,
                           const Catalog& catalog);

const char* wet_bin_name(WetBin b);

}  // namespace proxyval
