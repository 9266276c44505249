#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "proxyval/dates.hpp"
#include "proxyval/numstat.hpp"
#include "proxyval/synth.hpp"
#include "testutil.hpp"

using namespace proxyval;
using doctest::Approx;
using testutil::domain_kind;

namespace {

GeneratorConfig small_cfg(std::uint64_t seed = 3) {
  GeneratorConfig c;
  c.seed = seed;
  c.n_users = 120;
  c.n_general_products = 60;
  c.n_target_products = 10;
  c.n_decoy_products = 4;
  c.n_ingredients = 40;
  c.base_monthly_hazard = 0.02;
  c.claim_prob = 0.5;
  c.switch_prob = 0.8;
  c.seasonal_amplitude = 0.3;
  c.seasonal_peak_month = 12;
  c.n_months = 30;
  return c;
}

bool truth_equal(const UserTruth& a, const UserTruth& b, bool ignore_id) {
  return (ignore_id || a.user_id == b.user_id) && a.intended_group == b.intended_group &&
         a.onset_month == b.onset_month && a.claimed == b.claimed && a.switched == b.switched &&
         a.wet_pref == b.wet_pref && a.signup_offset == b.signup_offset &&
         a.exposures == b.exposures;
}

std::map<std::string, std::vector<PurchaseRecord>> by_user(
    const std::vector<PurchaseRecord>& purchases) {
  std::map<std::string, std::vector<PurchaseRecord>> out;
  for (const PurchaseRecord& p : purchases) out[p.user_id].push_back(p);
  return out;
}

bool config_equal(const GeneratorConfig& a, const GeneratorConfig& b) {
  return a.seed == b.seed && a.n_users == b.n_users &&
         a.n_general_products == b.n_general_products &&
         a.n_target_products == b.n_target_products &&
         a.n_decoy_products == b.n_decoy_products && a.n_ingredients == b.n_ingredients &&
         a.ingredient_effects == b.ingredient_effects &&
         a.seasonal_amplitude == b.seasonal_amplitude &&
         a.seasonal_peak_month == b.seasonal_peak_month &&
         a.base_monthly_hazard == b.base_monthly_hazard && a.claim_prob == b.claim_prob &&
         a.switch_prob == b.switch_prob && a.switch_lag_mean_days == b.switch_lag_mean_days &&
         a.wet_effect == b.wet_effect && a.onset_runin_months == b.onset_runin_months &&
         a.start_month == b.start_month && a.n_months == b.n_months;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is a pure function of the config") {
  SynthResult a = generate(small_cfg());
  SynthResult b = generate(small_cfg());
  CHECK(a.bundle.purchases == b.bundle.purchases);
  CHECK(a.bundle.catalog == b.bundle.catalog);
  CHECK(a.bundle.claims == b.bundle.claims);
  CHECK(a.bundle.questionnaire == b.bundle.questionnaire);
  REQUIRE(a.truth.users.size() == b.truth.users.size());
  for (std::size_t i = 0; i < a.truth.users.size(); ++i)
    CHECK(truth_equal(a.truth.users[i], b.truth.users[i], false));

  SynthResult c = generate(small_cfg(4));
  CHECK(a.bundle.purchases != c.bundle.purchases);
}

TEST_CASE("write_bundle output is byte stable") {
  SynthResult res = generate(small_cfg());
  std::filesystem::path base = testutil::scratch_dir("synth_bundle");
  write_bundle((base / "one").string(), res.bundle, res.truth);
  write_bundle((base / "two").string(), res.bundle, res.truth);
  const char* names[] = {"purchases.csv",     "catalog.csv",     "claims.csv",
                         "questionnaire.csv", "gt_users.csv",    "gt_ingredients.csv",
                         "gt_products.csv",   "gt_seasonal.csv"};
  for (const char* name : names) {
    std::string one = testutil::read_file((base / "one" / name).string());
    std::string two = testutil::read_file((base / "two" / name).string());
    CHECK_FALSE(one.empty());
    CHECK(one == two);
  }
}

TEST_CASE("catalog is built from twin wet/dry lines plus therapeutics") {
  GeneratorConfig cfg = small_cfg();
  SynthResult res = generate(cfg);
  const Catalog& cat = res.bundle.catalog;
  REQUIRE(cat.size() == 60 + 10 + 4);

  for (int i = 1; i <= 30; ++i) {
    const ProductEntry& wet = cat.at("g" + std::string(2 * i - 1 < 10 ? "0" : "") +
                                     std::to_string(2 * i - 1));
    const ProductEntry& dry =
        cat.at("g" + std::string(2 * i < 10 ? "0" : "") + std::to_string(2 * i));
    CHECK(wet.name == "Wet Pouch Dinner " + std::to_string(i));
    CHECK(dry.name == "Dry Kibble Meal " + std::to_string(i));
    CHECK(wet.category == Category::general);
    CHECK(dry.category == Category::general);
    CHECK(wet.food_form == FoodForm::wet);
    CHECK(dry.food_form == FoodForm::dry);
    CHECK(wet.ingredients == dry.ingredients);  // exposure can't depend on the wet/dry mix
    CHECK(wet.ingredients.size() >= 2);
    CHECK(wet.ingredients.size() <= 4);
  }

  int wet_targets = 0;
  for (int i = 1; i <= 10; ++i) {
    const ProductEntry& t = cat.at("t" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    CHECK(t.category == Category::therapeutic);
    CHECK(res.truth.product_is_target.at(t.product_id));
    CHECK(t.ingredients.size() >= 3);
    CHECK(t.ingredients.size() <= 8);
    wet_targets += t.food_form == FoodForm::wet;
  }
  CHECK(wet_targets == 5);  // forms alternate down the target list

  for (int i = 1; i <= 4; ++i) {
    const ProductEntry& d = cat.at("d" + std::to_string(i));
    CHECK(d.category == Category::therapeutic);
    CHECK_FALSE(res.truth.product_is_target.at(d.product_id));
  }
  for (const auto& [pid, entry] : cat)
    CHECK(res.truth.product_is_target.count(pid) == 1);
}

TEST_CASE("purchases, questionnaire and claims replay from the truth") {
  GeneratorConfig cfg = small_cfg();
  SynthResult res = generate(cfg);
  REQUIRE(res.truth.users.size() == 120);
  REQUIRE(res.bundle.questionnaire.size() == 120);

  for (std::size_t i = 1; i < res.bundle.purchases.size(); ++i) {
    const PurchaseRecord& prev = res.bundle.purchases[i - 1];
    const PurchaseRecord& cur = res.bundle.purchases[i];
    CHECK((prev.user_id < cur.user_id ||
           (prev.user_id == cur.user_id && prev.date <= cur.date)));
  }

  std::map<std::string, std::vector<PurchaseRecord>> rows = by_user(res.bundle.purchases);
  std::vector<long> want_claims(static_cast<std::size_t>(cfg.n_months), 0);

  for (std::size_t i = 0; i < res.truth.users.size(); ++i) {
    const UserTruth& u = res.truth.users[i];

    // Derived flags are internally consistent.
    if (u.claimed || u.switched) CHECK(u.onset_month.has_value());
    bool is_case = u.onset_month.has_value() && u.switched;
    CHECK(u.intended_group ==
          (is_case ? CohortGroup::case_group : CohortGroup::control_group));
    if (u.onset_month) {
      int m = u.onset_month->index - cfg.start_month.index;
      CHECK(m >= u.signup_offset + 1 + cfg.onset_runin_months);
      CHECK(m < cfg.n_months);
      if (u.claimed) want_claims[static_cast<std::size_t>(m)] += 1;
    }

    // The questionnaire row mirrors the truth record.
    const QuestionnaireRecord& q = res.bundle.questionnaire[i];
    CHECK(q.animal_id == u.user_id);
    CHECK(q.group == (u.claimed ? Group::case_group : Group::control_group));
    CHECK(q.exposures == u.exposures);

    // Purchase stream: 1-3 general events in every month from signup on.
    const std::vector<PurchaseRecord>& mine = rows[u.user_id];
    std::map<int, int> per_month;
    std::set<std::string> bought;
    int targets_bought = 0;
    for (const PurchaseRecord& p : mine) {
      if (p.product_id[0] == 'g') {
        int m = month_of(p.date).index - cfg.start_month.index;
        CHECK(m >= u.signup_offset);
        CHECK(m < cfg.n_months);
        CHECK(p.quantity >= 1);
        CHECK(p.quantity <= 2);
        per_month[m] += 1;
        bought.insert(p.product_id);
      } else {
        CHECK(p.product_id[0] == 't');
        CHECK(p.quantity == 1);
        targets_bought += 1;
        REQUIRE(u.onset_month.has_value());
        int lag_months = month_of(p.date).index - u.onset_month->index;
        CHECK(lag_months >= 0);
        CHECK(lag_months <= 3);
      }
    }
    CHECK(targets_bought == (u.switched ? 1 : 0));
    for (int m = u.signup_offset; m < cfg.n_months; ++m) {
      CHECK(per_month[m] >= 1);
      CHECK(per_month[m] <= 3);
    }
    CHECK(u.signup_offset >= 0);
    CHECK(u.signup_offset < 12);

    // Exposures are the ingredient union over distinct purchased generals.
    std::set<std::string> exposure;
    for (const std::string& pid : bought) {
      const ProductEntry& e = res.bundle.catalog.at(pid);
      exposure.insert(e.ingredients.begin(), e.ingredients.end());
    }
    CHECK(u.exposures == std::vector<std::string>(exposure.begin(), exposure.end()));
  }

  REQUIRE(res.bundle.claims.size() == static_cast<std::size_t>(cfg.n_months));
  for (int m = 0; m < cfg.n_months; ++m) {
    CHECK(res.bundle.claims[m].month == YearMonth{cfg.start_month.index + m});
    CHECK(res.bundle.claims[m].count == want_claims[static_cast<std::size_t>(m)]);
  }
}

TEST_CASE("onset respects a run-in period") {
  GeneratorConfig cfg = small_cfg(6);
  cfg.onset_runin_months = 2;
  SynthResult res = generate(cfg);
  int onsets = 0;
  for (const UserTruth& u : res.truth.users) {
    if (!u.onset_month) continue;
    ++onsets;
    CHECK(u.onset_month->index - cfg.start_month.index >= u.signup_offset + 3);
  }
  CHECK(onsets > 0);
}

TEST_CASE("per-user streams do not depend on the population size") {
  GeneratorConfig small = small_cfg();
  small.n_users = 50;
  GeneratorConfig large = small_cfg();
  REQUIRE(large.n_users == 120);

  SynthResult a = generate(small);
  SynthResult b = generate(large);
  std::map<std::string, std::vector<PurchaseRecord>> rows_a = by_user(a.bundle.purchases);
  std::map<std::string, std::vector<PurchaseRecord>> rows_b = by_user(b.bundle.purchases);

  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(truth_equal(a.truth.users[i], b.truth.users[i], true));
    const std::vector<PurchaseRecord>& pa = rows_a[a.truth.users[i].user_id];
    const std::vector<PurchaseRecord>& pb = rows_b[b.truth.users[i].user_id];
    REQUIRE(pa.size() == pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      CHECK(pa[k].date == pb[k].date);
      CHECK(pa[k].product_id == pb[k].product_id);
      CHECK(pa[k].quantity == pb[k].quantity);
    }
  }
}

TEST_CASE("analytic onset probability matches the closed form") {
  GeneratorConfig cfg = small_cfg();
  cfg.seasonal_amplitude = 0.0;
  cfg.wet_effect = 0.0;
  double h = cfg.base_monthly_hazard;
  for (int signup : {0, 4, 11}) {
    int k = cfg.n_months - (signup + 1);
    double want = 1.0 - std::pow(1.0 - h, k);
    CHECK(analytic_onset_prob(cfg, {}, 0.0, signup) == Approx(want).epsilon(1e-12));
  }
  cfg.onset_runin_months = 5;
  double want = 1.0 - std::pow(1.0 - h, cfg.n_months - 6);
  CHECK(analytic_onset_prob(cfg, {}, 0.0, 0) == Approx(want).epsilon(1e-12));
}

TEST_CASE("analytic onset probability is monotone in the hazard terms") {
  GeneratorConfig cfg = small_cfg();
  cfg.ingredient_effects = {{"ing001", 0.4}, {"ing002", -0.3}, {"ing003", 0.2}};
  cfg.wet_effect = -0.5;

  double base = analytic_onset_prob(cfg, {}, 0.0, 0);
  double up = analytic_onset_prob(cfg, {"ing001"}, 0.0, 0);
  double down = analytic_onset_prob(cfg, {"ing002"}, 0.0, 0);
  CHECK(up > base);
  CHECK(down < base);

  GeneratorConfig stronger = cfg;
  stronger.ingredient_effects["ing003"] = 0.5;
  CHECK(analytic_onset_prob(stronger, {"ing003"}, 0.0, 0) >
        analytic_onset_prob(cfg, {"ing003"}, 0.0, 0));

  CHECK(analytic_onset_prob(cfg, {}, 1.0, 0) < analytic_onset_prob(cfg, {}, 0.0, 0));
  CHECK(analytic_onset_prob(cfg, {}, 0.0, 6) < analytic_onset_prob(cfg, {}, 0.0, 0));

  GeneratorConfig slower = cfg;
  slower.onset_runin_months = 4;
  CHECK(analytic_onset_prob(slower, {}, 0.0, 0) < analytic_onset_prob(cfg, {}, 0.0, 0));
}

TEST_CASE("simulated onset fraction tracks the analytic mean") {
  GeneratorConfig cfg;
  cfg.seed = 17;
  cfg.n_users = 2000;
  cfg.n_general_products = 60;
  cfg.n_target_products = 4;
  cfg.n_decoy_products = 0;
  cfg.n_ingredients = 40;
  cfg.base_monthly_hazard = 0.02;
  cfg.seasonal_amplitude = 0.3;
  cfg.seasonal_peak_month = 12;
  cfg.wet_effect = -0.5;
  cfg.ingredient_effects = {{"ing001", 0.4}, {"ing002", -0.4}};
  cfg.n_months = 24;

  SynthResult res = generate(cfg);
  double expected = 0.0;
  double observed = 0.0;
  for (const UserTruth& u : res.truth.users) {
    expected += analytic_onset_prob(cfg, u.exposures, u.wet_pref, u.signup_offset);
    observed += u.onset_month.has_value() ? 1.0 : 0.0;
  }
  expected /= static_cast<double>(res.truth.users.size());
  observed /= static_cast<double>(res.truth.users.size());
  // Conditional on exposures the onset draws are independent Bernoullis, so
  // the gap stays within ~4 binomial standard errors.
  CHECK(std::fabs(observed - expected) < 0.045);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  CHECK(domain_kind([] { generate(small_cfg()); }).empty());
  auto reject = [](auto mutate) {
    GeneratorConfig c = small_cfg();
    mutate(c);
    CHECK(domain_kind([&] { generate(c); }) == "ConfigInvalid");
  };
  reject([](GeneratorConfig& c) { c.n_users = 0; });
  reject([](GeneratorConfig& c) { c.n_general_products = 0; });
  reject([](GeneratorConfig& c) { c.n_general_products = 7; });  // wet/dry pairing
  reject([](GeneratorConfig& c) { c.n_target_products = 0; });
  reject([](GeneratorConfig& c) { c.n_decoy_products = -1; });
  reject([](GeneratorConfig& c) { c.n_ingredients = 7; });
  reject([](GeneratorConfig& c) { c.base_monthly_hazard = 0.0; });
  reject([](GeneratorConfig& c) { c.base_monthly_hazard = 1.0; });
  reject([](GeneratorConfig& c) { c.claim_prob = 0.0; });
  reject([](GeneratorConfig& c) { c.claim_prob = 1.1; });
  reject([](GeneratorConfig& c) { c.switch_prob = 0.0; });
  reject([](GeneratorConfig& c) { c.switch_prob = 1.5; });
  reject([](GeneratorConfig& c) { c.switch_lag_mean_days = -1.0; });
  reject([](GeneratorConfig& c) { c.seasonal_amplitude = -0.1; });
  reject([](GeneratorConfig& c) { c.seasonal_peak_month = 0; });
  reject([](GeneratorConfig& c) { c.seasonal_peak_month = 13; });
  reject([](GeneratorConfig& c) { c.onset_runin_months = -1; });
  reject([](GeneratorConfig& c) { c.n_months = 1; });
}

TEST_CASE("generator config files round trip exactly") {
  GeneratorConfig cfg;
  cfg.seed = 42;
  cfg.n_users = 77;
  cfg.n_general_products = 10;
  cfg.n_target_products = 3;
  cfg.n_decoy_products = 2;
  cfg.n_ingredients = 25;
  cfg.ingredient_effects = {{"chicken", -0.125}, {"ing007", 0.25}};
  cfg.seasonal_amplitude = 0.45;
  cfg.seasonal_peak_month = 2;
  cfg.base_monthly_hazard = 0.0075;
  cfg.claim_prob = 0.9;
  cfg.switch_prob = 0.85;
  cfg.switch_lag_mean_days = 12.5;
  cfg.wet_effect = -0.3123456789012345;
  cfg.onset_runin_months = 4;
  cfg.start_month = YearMonth::of(2019, 3);
  cfg.n_months = 28;

  std::filesystem::path dir = testutil::scratch_dir("synth_cfg");
  std::string path = (dir / "gen.cfg").string();
  save_generator_config(path, cfg);
  CHECK(config_equal(load_generator_config(path), cfg));

  std::string commented = testutil::write_file(dir, "commented.cfg",
                                               "# base\r\n"
                                               "n_users = 5\r\n"
                                               "\r\n"
                                               "effect.fish = 0.5  # planted\r\n");
  GeneratorConfig partial = load_generator_config(commented);
  CHECK(partial.n_users == 5);
  CHECK(partial.ingredient_effects == std::map<std::string, double>{{"fish", 0.5}});
  CHECK(partial.n_months == 36);  // untouched defaults stay

  CHECK_THROWS_AS(load_generator_config(testutil::write_file(dir, "nokv.cfg", "n_users 5\n")),
                  ConfigError);
  CHECK_THROWS_AS(load_generator_config(testutil::write_file(dir, "unknown.cfg", "bogus=3\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      load_generator_config(testutil::write_file(dir, "badval.cfg", "n_users=abc\n")),
      ConfigError);
  CHECK_THROWS_AS(load_generator_config((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("null model plants no ingredient signal") {
  GeneratorConfig cfg;
  cfg.seed = 101;
  cfg.n_users = 4000;
  cfg.n_general_products = 60;
  cfg.n_target_products = 4;
  cfg.n_decoy_products = 0;
  cfg.n_ingredients = 40;
  cfg.base_monthly_hazard = 0.01;
  cfg.claim_prob = 1.0;
  cfg.switch_prob = 1.0;
  cfg.n_months = 24;

  SynthResult res = generate(cfg);
  std::map<std::string, std::pair<long, long>> counts;  // ingredient -> (onsets, exposed)
  for (const UserTruth& u : res.truth.users) {
    long onset = u.onset_month.has_value() ? 1 : 0;
    for (const std::string& ing : u.exposures) {
      counts[ing].first += onset;
      counts[ing].second += 1;
    }
  }

  std::vector<std::pair<long, long>> table;
  for (const auto& [ing, c] : counts)
    if (c.second > 0) table.push_back(c);

  double min_p = 1.0;
  long pairs = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      TwoByTwoTable t{static_cast<double>(table[i].first),
                      static_cast<double>(table[i].second - table[i].first),
                      static_cast<double>(table[j].first),
                      static_cast<double>(table[j].second - table[j].first)};
      min_p = std::min(min_p, chi_squared_2x2(t).p_value);
      ++pairs;
    }
  }
  // A few ingredients may land only in therapeutic products and never show
  // up as exposures, so the pair count can dip a little below C(40,2).
  CHECK(pairs >= 400);
  CHECK(min_p > 0.01 / static_cast<double>(pairs));
}

TEST_CASE("paper_scenario pins the headline configuration") {
  GeneratorConfig cfg = paper_scenario(9);
  CHECK(cfg.seed == 9);
  CHECK(cfg.n_users == 50000);
  CHECK(cfg.n_general_products == 12000);
  CHECK(cfg.n_target_products == 24);
  CHECK(cfg.n_decoy_products == 6);
  CHECK(cfg.n_ingredients == 411);
  CHECK(cfg.seasonal_amplitude == 0.35);
  CHECK(cfg.seasonal_peak_month == 12);
  CHECK(cfg.base_monthly_hazard == 0.0024);
  CHECK(cfg.claim_prob == 0.36);
  CHECK(cfg.switch_prob == 0.9);
  CHECK(cfg.switch_lag_mean_days == 4.0);
  CHECK(cfg.wet_effect == -0.52);
  CHECK(cfg.onset_runin_months == 12);
  CHECK(cfg.start_month == YearMonth::of(2018, 1));
  CHECK(cfg.n_months == 36);

  REQUIRE(cfg.ingredient_effects.size() == 411);
  double lo = 1.0, hi = -1.0;
  for (const auto& [ing, e] : cfg.ingredient_effects) {
    CHECK(std::fabs(e) <= 0.6);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);

  CHECK(paper_scenario(9).ingredient_effects == cfg.ingredient_effects);
  CHECK(paper_scenario(10).ingredient_effects != cfg.ingredient_effects);
  CHECK(paper_scenario(9, 1234).n_users == 1234);
}

TEST_CASE("seasonal log-odds table follows the planted cosine") {
  GeneratorConfig cfg = small_cfg();
  cfg.n_users = 1;
  cfg.seasonal_amplitude = 0.4;
  cfg.seasonal_peak_month = 12;
  SynthResult res = generate(cfg);
  const double* s = res.truth.seasonal_log_odds;
  CHECK(s[11] == Approx(0.4).epsilon(1e-15));
  CHECK(s[5] == Approx(-0.4).epsilon(1e-15));
  for (int k = 1; k <= 5; ++k)
    CHECK(s[(11 - k + 12) % 12] == Approx(s[(11 + k) % 12]).epsilon(1e-12));

  cfg.seasonal_peak_month = 3;
  SynthResult march = generate(cfg);
  CHECK(march.truth.seasonal_log_odds[2] == Approx(0.4).epsilon(1e-15));
  CHECK(march.truth.seasonal_log_odds[8] == Approx(-0.4).epsilon(1e-15));
}

}  // TEST_SUITE
