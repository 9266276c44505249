#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxyval/cohort.hpp"
#include "proxyval/dates.hpp"
#include "proxyval/ingest.hpp"

namespace proxyval {

// Planted-parameter generator configuration. Monthly onset probability for
// a user is logistic(logit(base_monthly_hazard) + sum of effects over the
// user's exposed ingredients + wet_effect * wet preference + seasonal term).
struct GeneratorConfig {
  std::uint64_t seed = 1;
  long n_users = 10000;
  int n_general_products = 1270;  // must be even: wet/dry variants come in pairs
  int n_target_products = 24;
  int n_decoy_products = 6;  // therapeutic products matching no keyword
  int n_ingredients = 411;
  std::map<std::string, double> ingredient_effects;  // log-odds; absent = 0
  double seasonal_amplitude = 0.0;     // log-odds swing of the cosine term
  int seasonal_peak_month = 12;        // calendar month 1..12
  double base_monthly_hazard = 0.003;
  double claim_prob = 1.0;
  double switch_prob = 1.0;
  double switch_lag_mean_days = 10.0;  // onset-to-first-target-purchase lag
  double wet_effect = 0.0;             // log-odds per unit wet preference
  int onset_runin_months = 0;          // onset-free months after signup
  YearMonth start_month = YearMonth::of(2018, 1);
  int n_months = 36;
};

struct DataBundle {
  std::vector<PurchaseRecord> purchases;  // sorted by (user_id, date)
  Catalog catalog;
  std::vector<ClaimSeriesRow> claims;
  std::vector<QuestionnaireRecord> questionnaire;
};

struct UserTruth {
  std::string user_id;
  CohortGroup intended_group = CohortGroup::control_group;
  std::optional<YearMonth> onset_month;
  bool claimed = false;
  bool switched = false;
  double wet_pref = 0.0;
  int signup_offset = 0;                // months after start_month, 0..11
  std::vector<std::string> exposures;   // sorted unique ingredient tokens
};

struct GroundTruth {
  std::vector<UserTruth> users;
  std::map<std::string, double> ingredient_effects;
  std::map<std::string, bool> product_is_target;  // planted label per product
  double seasonal_log_odds[12] = {0};             // hazard term per calendar month
};

struct SynthResult {
  DataBundle bundle;
  GroundTruth truth;
};

// Deterministic function of the config; per-user substreams make the
// result independent of generation order. Throws
// DomainError("ConfigInvalid") on out-of-range parameters.
SynthResult generate(const GeneratorConfig& config);

// Config calibrated so the expected pipeline outputs land near the headline
// magnitudes this toolkit validates against: overall switch fraction around
// 0.078, claim fraction around 0.031, winter-peaking seasonality, and a
// low-vs-100% wet bin ratio around 1.48. Ingredient effects are drawn from
// the seed.
GeneratorConfig paper_scenario(std::uint64_t seed, long n_users = 50000);

// P(onset within the simulated range) for a hypothetical user, by direct
// product over monthly hazards; no sampling.
double analytic_onset_prob(const GeneratorConfig& config,
                           const std::vector<std::string>& exposures, double wet_pref,
                           int signup_offset);

// Flat key=value config file; `effect.<ingredient>` keys fill the effects map.
GeneratorConfig load_generator_config(const std::string& path);
void save_generator_config(const std::string& path, const GeneratorConfig& config);

// Writes purchases.csv, catalog.csv, claims.csv, questionnaire.csv plus
// ground-truth files (gt_users.csv, gt_ingredients.csv, gt_products.csv,
// gt_seasonal.csv) into dir, creating it if needed.
void write_bundle(const std::string& dir, const DataBundle& bundle, const GroundTruth& truth);

}  // namespace proxyval
