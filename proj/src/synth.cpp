#include "proxyval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "proxyval/csv.hpp"
#include "proxyval/error.hpp"
#include "proxyval/rng.hpp"
#include "proxyval/text.hpp"

namespace proxyval {
namespace {

constexpr std::uint64_t kCatalogLane = 0;
constexpr std::uint64_t kEffectLane = 1;
constexpr std::uint64_t kUserLaneBase = 100;

constexpr double kPi = 3.14159265358979323846;

struct WetAtom {
  double pref;
  double prob;
};
// Planted wet-preference mixture; the mass at 0 and 1 feeds the singleton
// dose-response bins.
constexpr WetAtom kWetAtoms[] = {{0.0, 0.34},   {0.125, 0.22}, {0.375, 0.13},
                                 {0.625, 0.10}, {0.875, 0.07}, {1.0, 0.14}};

constexpr double kEventCountProbs[] = {0.35, 0.45, 0.20};  // 1, 2, or 3 events per month

constexpr int kFavoriteLines = 6;  // distinct product lines a user buys from

constexpr const char* kTargetNames[] = {
    "FLUTD Support Formula",
    "Lower Urinary Tract Diet",
    "Urinary Disease Therapy",
    "Struvite Dissolution Recipe",
    "Stone Defense Blend",
    "Urinary Health Special",
    "pH Control Feline",
    "pH Care Advanced",
    "pH Balance Recipe",
    "Mineral Control Diet",
    "\xEF\xBD\x90\xEF\xBC\xA8\xE3\x80\x80\xEF\xBC\xA3\xEF\xBD\x8F\xEF\xBD\x8E\xEF\xBD\x94"
    "\xEF\xBD\x92\xEF\xBD\x8F\xEF\xBD\x8C",  // fullwidth "pH Control"
    "\xEF\xBC\xA6\xEF\xBC\xAC\xEF\xBC\xB5\xEF\xBC\xB4\xEF\xBC\xA4 \xE3\x82\xB1\xE3\x82\xA2",
    // fullwidth "FLUTD" + katakana "care"
};

constexpr const char* kDecoyNames[] = {
    "Renal Support Diet",     "Hepatic Formula",      "Digestive Recovery Recipe",
    "Dermatology Blend",      "Joint Mobility Diet",  "Weight Management Formula",
};

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int id_width(long n) {
  int w = 1;
  while (n >= 10) {
    n /= 10;
    ++w;
  }
  return w;
}

std::string pad_id(const char* prefix, long i, int width) {
  std::string digits = std::to_string(i);
  std::string out = prefix;
  if (static_cast<int>(digits.size()) < width)
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
  out += digits;
  return out;
}

int draw_categorical(SplitRng& rng, const double* probs, int k) {
  double u = rng.next_double();
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return k - 1;
}

double draw_wet_pref(SplitRng& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (const WetAtom& a : kWetAtoms) {
    acc += a.prob;
    if (u < acc) return a.pref;
  }
  return 1.0;
}

void validate_config(const GeneratorConfig& c) {
  auto fail = [](const std::string& msg) { throw DomainError("ConfigInvalid", msg); };
  if (c.n_users < 1) fail("n_users must be >= 1");
  if (c.n_general_products < 2) fail("n_general_products must be >= 2");
  if (c.n_target_products < 1) fail("n_target_products must be >= 1");
  if (c.n_decoy_products < 0) fail("n_decoy_products must be >= 0");
  if (c.n_ingredients < 8) fail("n_ingredients must be >= 8");
  if (!(c.base_monthly_hazard > 0.0 && c.base_monthly_hazard < 1.0))
    fail("base_monthly_hazard must be in (0,1)");
  if (!(c.claim_prob > 0.0 && c.claim_prob <= 1.0)) fail("claim_prob must be in (0,1]");
  if (!(c.switch_prob > 0.0 && c.switch_prob <= 1.0)) fail("switch_prob must be in (0,1]");
  if (c.switch_lag_mean_days < 0.0) fail("switch_lag_mean_days must be >= 0");
  if (c.seasonal_amplitude < 0.0) fail("seasonal_amplitude must be >= 0");
  if (c.seasonal_peak_month < 1 || c.seasonal_peak_month > 12)
    fail("seasonal_peak_month must be 1..12");
  if (c.n_general_products % 2 != 0) fail("n_general_products must be even");
  if (c.onset_runin_months < 0) fail("onset_runin_months must be >= 0");
  if (c.n_months < 2) fail("n_months must be >= 2");
}

std::vector<std::string> make_ingredient_tokens(int n) {
  int width = std::max(3, id_width(n));
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) tokens.push_back(pad_id("ing", i, width));
  return tokens;
}

std::vector<std::string> sample_ingredients(SplitRng& rng,
                                            const std::vector<std::string>& tokens, int lo,
                                            int hi) {
  int count = lo + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(hi - lo + 1)));
  std::set<std::string> picked;
  while (static_cast<int>(picked.size()) < count)
    picked.insert(tokens[rng.next_below(static_cast<std::uint32_t>(tokens.size()))]);
  return {picked.begin(), picked.end()};
}

struct CatalogPlan {
  Catalog catalog;
  // General products come in wet/dry pairs sharing one ingredient list, so a
  // user's ingredient exposure does not depend on the wet/dry mix they buy.
  std::vector<std::pair<std::string, std::string>> lines;  // wet id, dry id
  std::vector<std::string> targets;
  std::map<std::string, bool> product_is_target;
};

CatalogPlan build_catalog(const GeneratorConfig& cfg, SplitRng rng,
                          const std::vector<std::string>& tokens) {
  CatalogPlan plan;
  int gw = id_width(cfg.n_general_products);
  for (int i = 1; i <= cfg.n_general_products / 2; ++i) {
    std::vector<std::string> shared = sample_ingredients(rng, tokens, 2, 4);
    ProductEntry wet;
    wet.product_id = pad_id("g", 2L * i - 1, gw);
    wet.name = "Wet Pouch Dinner " + std::to_string(i);
    wet.category = Category::general;
    wet.food_form = FoodForm::wet;
    wet.ingredients = shared;
    ProductEntry dry;
    dry.product_id = pad_id("g", 2L * i, gw);
    dry.name = "Dry Kibble Meal " + std::to_string(i);
    dry.category = Category::general;
    dry.food_form = FoodForm::dry;
    dry.ingredients = std::move(shared);
    plan.lines.emplace_back(wet.product_id, dry.product_id);
    plan.product_is_target[wet.product_id] = false;
    plan.product_is_target[dry.product_id] = false;
    plan.catalog.emplace(wet.product_id, std::move(wet));
    plan.catalog.emplace(dry.product_id, std::move(dry));
  }
  constexpr int kTargetNameCount = static_cast<int>(std::size(kTargetNames));
  int tw = id_width(cfg.n_target_products);
  for (int i = 1; i <= cfg.n_target_products; ++i) {
    ProductEntry e;
    e.product_id = pad_id("t", i, tw);
    e.name = std::string(kTargetNames[(i - 1) % kTargetNameCount]) + " No." + std::to_string(i);
    e.category = Category::therapeutic;
    e.food_form = i % 2 == 0 ? FoodForm::wet : FoodForm::dry;
    e.ingredients = sample_ingredients(rng, tokens, 3, 8);
    plan.targets.push_back(e.product_id);
    plan.product_is_target[e.product_id] = true;
    plan.catalog.emplace(e.product_id, std::move(e));
  }
  constexpr int kDecoyNameCount = static_cast<int>(std::size(kDecoyNames));
  int dw = std::max(1, id_width(std::max(cfg.n_decoy_products, 1)));
  for (int i = 1; i <= cfg.n_decoy_products; ++i) {
    ProductEntry e;
    e.product_id = pad_id("d", i, dw);
    e.name = std::string(kDecoyNames[(i - 1) % kDecoyNameCount]) + " No." + std::to_string(i);
    e.category = Category::therapeutic;
    e.food_form = i % 2 == 0 ? FoodForm::wet : FoodForm::dry;
    e.ingredients = sample_ingredients(rng, tokens, 3, 8);
    plan.product_is_target[e.product_id] = false;
    plan.catalog.emplace(e.product_id, std::move(e));
  }
  return plan;
}

struct HazardTable {
  double seasonal[12] = {0};  // log-odds per calendar month, 0 = January
  double base_logit = 0.0;
};

HazardTable make_hazard_table(const GeneratorConfig& cfg) {
  HazardTable t;
  t.base_logit = logit(cfg.base_monthly_hazard);
  int peak = cfg.seasonal_peak_month - 1;
  for (int cal = 0; cal < 12; ++cal)
    t.seasonal[cal] = cfg.seasonal_amplitude * std::cos(2.0 * kPi * (cal - peak) / 12.0);
  return t;
}

}  // namespace

double analytic_onset_prob(const GeneratorConfig& config,
                           const std::vector<std::string>& exposures, double wet_pref,
                           int signup_offset) {
  validate_config(config);
  HazardTable table = make_hazard_table(config);
  double beta = 0.0;
  for (const std::string& ing : exposures) {
    auto it = config.ingredient_effects.find(ing);
    if (it != config.ingredient_effects.end()) beta += it->second;
  }
  double level = table.base_logit + beta + config.wet_effect * wet_pref;
  double survive = 1.0;
  for (int m = signup_offset + 1 + config.onset_runin_months; m < config.n_months; ++m) {
    int cal = (config.start_month.index % 12 + m) % 12;
    survive *= 1.0 - logistic(level + table.seasonal[cal]);
  }
  return 1.0 - survive;
}

SynthResult generate(const GeneratorConfig& config) {
  validate_config(config);
  std::vector<std::string> tokens = make_ingredient_tokens(config.n_ingredients);
  SplitRng root(config.seed);
  CatalogPlan plan = build_catalog(config, root.split(kCatalogLane), tokens);
  HazardTable hazard = make_hazard_table(config);

  int n_months = config.n_months;
  std::vector<Date> month_start(static_cast<std::size_t>(n_months) + 1);
  std::vector<int> month_days(static_cast<std::size_t>(n_months));
  for (int m = 0; m <= n_months; ++m)
    month_start[static_cast<std::size_t>(m)] = first_day(YearMonth{config.start_month.index + m});
  for (int m = 0; m < n_months; ++m)
    month_days[static_cast<std::size_t>(m)] =
        static_cast<int>((month_start[m + 1] - month_start[m]).count());

  SynthResult out;
  out.bundle.catalog = plan.catalog;
  out.truth.ingredient_effects = config.ingredient_effects;
  out.truth.product_is_target = plan.product_is_target;
  for (int cal = 0; cal < 12; ++cal) out.truth.seasonal_log_odds[cal] = hazard.seasonal[cal];

  std::vector<long> claim_counts(static_cast<std::size_t>(n_months), 0);
  int uw = id_width(config.n_users);
  int signup_cap = std::min(12, n_months);

  for (long u = 0; u < config.n_users; ++u) {
    // Per-user substream; draw order below is fixed and must not depend on
    // outcomes, except that generation stops at onset.
    SplitRng rng = root.split(kUserLaneBase + static_cast<std::uint64_t>(u));
    UserTruth truth;
    truth.user_id = pad_id("u", u + 1, uw);

    truth.signup_offset = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(signup_cap)));
    truth.wet_pref = draw_wet_pref(rng);
    std::uint32_t n_lines = static_cast<std::uint32_t>(plan.lines.size());
    int n_fav = std::min(kFavoriteLines, static_cast<int>(n_lines));
    std::vector<std::uint32_t> favs;
    while (static_cast<int>(favs.size()) < n_fav) {
      std::uint32_t pick = rng.next_below(n_lines);
      if (std::find(favs.begin(), favs.end(), pick) == favs.end()) favs.push_back(pick);
    }

    std::set<std::string> bought;
    for (int m = truth.signup_offset; m < n_months; ++m) {
      int events = 1 + draw_categorical(rng, kEventCountProbs, 3);
      for (int e = 0; e < events; ++e) {
        int day = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(month_days[m])));
        const auto& line = plan.lines[favs[rng.next_below(static_cast<std::uint32_t>(favs.size()))]];
        bool wet = rng.next_double() < truth.wet_pref;
        const std::string& pid = wet ? line.first : line.second;
        long qty = 1 + rng.next_below(2);
        out.bundle.purchases.push_back(
            {truth.user_id, month_start[m] + std::chrono::days{day}, pid, qty});
        bought.insert(pid);
      }
    }

    std::set<std::string> exposure;
    for (const std::string& pid : bought) {
      const ProductEntry& e = plan.catalog.at(pid);
      exposure.insert(e.ingredients.begin(), e.ingredients.end());
    }
    truth.exposures.assign(exposure.begin(), exposure.end());

    double beta = 0.0;
    for (const std::string& ing : truth.exposures) {
      auto it = config.ingredient_effects.find(ing);
      if (it != config.ingredient_effects.end()) beta += it->second;
    }
    double level = hazard.base_logit + beta + config.wet_effect * truth.wet_pref;

    for (int m = truth.signup_offset + 1 + config.onset_runin_months; m < n_months; ++m) {
      int cal = (config.start_month.index % 12 + m) % 12;
      double p = logistic(level + hazard.seasonal[cal]);
      if (rng.next_double() >= p) continue;
      truth.onset_month = YearMonth{config.start_month.index + m};
      int day = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(month_days[m])));
      Date onset_date = month_start[m] + std::chrono::days{day};
      truth.claimed = rng.next_bernoulli(config.claim_prob);
      truth.switched = rng.next_bernoulli(config.switch_prob);
      if (truth.switched) {
        double lag = std::min(60.0, rng.next_exponential(config.switch_lag_mean_days));
        Date target_date = onset_date + std::chrono::days{static_cast<long>(std::llround(lag))};
        const std::string& tid =
            plan.targets[rng.next_below(static_cast<std::uint32_t>(plan.targets.size()))];
        // Emitted even past the horizon so the switch is always observable.
        out.bundle.purchases.push_back({truth.user_id, target_date, tid, 1});
      }
      if (truth.claimed) claim_counts[static_cast<std::size_t>(m)] += 1;
      break;
    }

    truth.intended_group = truth.onset_month && truth.switched ? CohortGroup::case_group
                                                               : CohortGroup::control_group;

    QuestionnaireRecord q;
    q.animal_id = truth.user_id;
    q.group = truth.claimed ? Group::case_group : Group::control_group;
    q.exposures = truth.exposures;
    out.bundle.questionnaire.push_back(std::move(q));
    out.truth.users.push_back(std::move(truth));
  }

  std::stable_sort(out.bundle.purchases.begin(), out.bundle.purchases.end(),
                   [](const PurchaseRecord& a, const PurchaseRecord& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     return a.date < b.date;
                   });

  for (int m = 0; m < n_months; ++m)
    out.bundle.claims.push_back(
        {YearMonth{config.start_month.index + m}, claim_counts[static_cast<std::size_t>(m)]});
  return out;
}

GeneratorConfig paper_scenario(std::uint64_t seed, long n_users) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_users = n_users;
  cfg.n_general_products = 12000;
  cfg.n_target_products = 24;
  cfg.n_decoy_products = 6;
  cfg.n_ingredients = 411;
  cfg.seasonal_amplitude = 0.35;
  cfg.seasonal_peak_month = 12;
  cfg.base_monthly_hazard = 0.0024;
  cfg.claim_prob = 0.36;
  cfg.switch_prob = 0.9;
  cfg.switch_lag_mean_days = 4.0;
  cfg.wet_effect = -0.52;  // sized so the low-wet vs all-wet rate ratio lands near 1.48
  cfg.onset_runin_months = 12;  // every at-risk month sits behind a full purchase year
  cfg.start_month = YearMonth::of(2018, 1);
  cfg.n_months = 36;
  SplitRng rng = SplitRng(seed).split(kEffectLane);
  for (const std::string& tok : make_ingredient_tokens(cfg.n_ingredients))
    cfg.ingredient_effects[tok] = 0.6 * (2.0 * rng.next_double() - 1.0);
  return cfg;
}

GeneratorConfig load_generator_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open generator config: " + path);
  GeneratorConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& msg) {
    throw ConfigError(msg + " at line " + std::to_string(line_no));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t{trim(line)};
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) bad("expected key=value");
    std::string key{trim(t.substr(0, eq))};
    std::string value{trim(t.substr(eq + 1))};
    try {
      if (key == "seed")
        cfg.seed = std::stoull(value);
      else if (key == "n_users")
        cfg.n_users = std::stol(value);
      else if (key == "n_general_products")
        cfg.n_general_products = std::stoi(value);
      else if (key == "n_target_products")
        cfg.n_target_products = std::stoi(value);
      else if (key == "n_decoy_products")
        cfg.n_decoy_products = std::stoi(value);
      else if (key == "n_ingredients")
        cfg.n_ingredients = std::stoi(value);
      else if (key == "seasonal_amplitude")
        cfg.seasonal_amplitude = std::stod(value);
      else if (key == "seasonal_peak_month")
        cfg.seasonal_peak_month = std::stoi(value);
      else if (key == "base_monthly_hazard")
        cfg.base_monthly_hazard = std::stod(value);
      else if (key == "claim_prob")
        cfg.claim_prob = std::stod(value);
      else if (key == "switch_prob")
        cfg.switch_prob = std::stod(value);
      else if (key == "switch_lag_mean_days")
        cfg.switch_lag_mean_days = std::stod(value);
      else if (key == "wet_effect")
        cfg.wet_effect = std::stod(value);
      else if (key == "onset_runin_months")
        cfg.onset_runin_months = std::stoi(value);
      else if (key == "start_month") {
        std::optional<YearMonth> m = parse_month(value);
        if (!m) bad("bad value for `start_month`");
        cfg.start_month = *m;
      } else if (key == "n_months")
        cfg.n_months = std::stoi(value);
      else if (key.rfind("effect.", 0) == 0)
        cfg.ingredient_effects[key.substr(7)] = std::stod(value);
      else
        bad("unknown key `" + key + "`");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      bad("bad value for `" + key + "`");
    }
  }
  return cfg;
}

void save_generator_config(const std::string& path, const GeneratorConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "seed=" << config.seed << '\n';
  out << "n_users=" << config.n_users << '\n';
  out << "n_general_products=" << config.n_general_products << '\n';
  out << "n_target_products=" << config.n_target_products << '\n';
  out << "n_decoy_products=" << config.n_decoy_products << '\n';
  out << "n_ingredients=" << config.n_ingredients << '\n';
  out << "seasonal_amplitude=" << num(config.seasonal_amplitude) << '\n';
  out << "seasonal_peak_month=" << config.seasonal_peak_month << '\n';
  out << "base_monthly_hazard=" << num(config.base_monthly_hazard) << '\n';
  out << "claim_prob=" << num(config.claim_prob) << '\n';
  out << "switch_prob=" << num(config.switch_prob) << '\n';
  out << "switch_lag_mean_days=" << num(config.switch_lag_mean_days) << '\n';
  out << "wet_effect=" << num(config.wet_effect) << '\n';
  out << "onset_runin_months=" << config.onset_runin_months << '\n';
  out << "start_month=" << format_month(config.start_month) << '\n';
  out << "n_months=" << config.n_months << '\n';
  for (const auto& [ing, eff] : config.ingredient_effects)
    out << "effect." << ing << '=' << num(eff) << '\n';
}

void write_bundle(const std::string& dir, const DataBundle& bundle, const GroundTruth& truth) {
  std::filesystem::create_directories(dir);
  save_purchases(dir + "/purchases.csv", bundle.purchases);
  save_catalog(dir + "/catalog.csv", bundle.catalog);
  save_claim_series(dir + "/claims.csv", bundle.claims);
  save_questionnaire(dir + "/questionnaire.csv", bundle.questionnaire);

  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };

  std::ofstream users(dir + "/gt_users.csv", std::ios::binary);
  if (!users) throw Error("cannot open for writing: " + dir + "/gt_users.csv");
  users << "user_id,intended_group,onset_month,claimed,switched,wet_pref,signup_offset,"
           "exposures\n";
  for (const UserTruth& u : truth.users) {
    std::string exp;
    for (std::size_t i = 0; i < u.exposures.size(); ++i) {
      if (i) exp += ';';
      exp += u.exposures[i];
    }
    users << u.user_id << ',' << cohort_group_name(u.intended_group) << ','
          << (u.onset_month ? format_month(*u.onset_month) : "") << ',' << (u.claimed ? 1 : 0)
          << ',' << (u.switched ? 1 : 0) << ',' << num(u.wet_pref) << ',' << u.signup_offset
          << ',' << csv_escape(exp) << '\n';
  }

  std::ofstream ing(dir + "/gt_ingredients.csv", std::ios::binary);
  if (!ing) throw Error("cannot open for writing: " + dir + "/gt_ingredients.csv");
  ing << "ingredient,effect\n";
  for (const auto& [tok, eff] : truth.ingredient_effects)
    ing << tok << ',' << num(eff) << '\n';

  std::ofstream prod(dir + "/gt_products.csv", std::ios::binary);
  if (!prod) throw Error("cannot open for writing: " + dir + "/gt_products.csv");
  prod << "product_id,is_target\n";
  for (const auto& [pid, is_target] : truth.product_is_target)
    prod << pid << ',' << (is_target ? 1 : 0) << '\n';

  std::ofstream seas(dir + "/gt_seasonal.csv", std::ios::binary);
  if (!seas) throw Error("cannot open for writing: " + dir + "/gt_seasonal.csv");
  seas << "calendar_month,log_odds\n";
  for (int cal = 0; cal < 12; ++cal)
    seas << cal + 1 << ',' << num(truth.seasonal_log_odds[cal]) << '\n';
}

}  // namespace proxyval
