#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "proxyval/classify.hpp"
#include "proxyval/cohort.hpp"
#include "proxyval/error.hpp"
#include "proxyval/ingest.hpp"
#include "proxyval/numstat.hpp"
#include "proxyval/report.hpp"
#include "proxyval/risk.hpp"
#include "proxyval/seasonality.hpp"
#include "proxyval/synth.hpp"
#include "proxyval/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proxyval;

namespace {

// All diagnostics go to stderr so output directories stay byte-identical
// across reruns.
void log_line(const std::string& msg) {
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::fprintf(stderr, "[%s] %s\n", stamp, msg.c_str());
}

void report_skips(const char* what, const LoadReport& rep) {
  if (rep.skipped == 0) return;
  log_line(std::string(what) + ": skipped " + std::to_string(rep.skipped) + " of " +
           std::to_string(rep.accepted + rep.skipped) + " rows");
  for (const std::string& m : rep.messages) log_line(std::string(what) + ": " + m);
}

struct CommonOpts {
  std::string purchases, catalog, claims, questionnaire, keywords, out;
  double alpha = 0.05;
  long min_exposure = 50;
  int window_days = 365;
  int period = 12;
  int seasonal_span = 7;
  int trend_span = 23;
  int lowpass_span = 13;
  int n_inner = 2;
  int n_outer = 1;
  bool strict = true;
  unsigned threads = 0;
};

void add_stl_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--period", o.period, "Seasonal period in months")->envname("PROXYVAL_PERIOD");
  cmd->add_option("--seasonal-span", o.seasonal_span, "Loess span for cycle subseries");
  cmd->add_option("--trend-span", o.trend_span, "Loess span for the trend pass");
  cmd->add_option("--lowpass-span", o.lowpass_span, "Loess span inside the low-pass filter");
  cmd->add_option("--inner", o.n_inner, "Inner-loop iterations");
  cmd->add_option("--outer", o.n_outer, "Robustness iterations");
}

StlParams stl_params(const CommonOpts& o) {
  StlParams p;
  p.period = o.period;
  p.seasonal_span = o.seasonal_span;
  p.trend_span = o.trend_span;
  p.lowpass_span = o.lowpass_span;
  p.n_inner = o.n_inner;
  p.n_outer = o.n_outer;
  return p;
}

KeywordRuleSet keywords_for(const CommonOpts& o) {
  if (o.keywords.empty()) {
    log_line("using built-in keyword seed list");
    return default_keywords();
  }
  return load_keywords(o.keywords);
}

struct PipelineData {
  std::vector<PurchaseRecord> purchases;
  Catalog catalog;
  KeywordRuleSet rules;
  CatalogPartition part;
  std::vector<CohortAssignment> assignments;
  CohortSummary summary;
};

PipelineData run_cohort_stage(const CommonOpts& o) {
  PipelineData d;
  LoadReport prep, crep;
  d.purchases = load_purchases(o.purchases, o.strict, &prep);
  report_skips("purchases", prep);
  d.catalog = load_catalog(o.catalog, o.strict, &crep);
  report_skips("catalog", crep);
  if (d.purchases.empty()) throw Error("no purchase rows in " + o.purchases);
  d.rules = keywords_for(o);
  d.part = partition_catalog(d.catalog, d.rules);
  log_line("catalog: " + std::to_string(d.part.target_ids.size()) + " target, " +
           std::to_string(d.part.general_ids.size()) + " general products");
  CohortOptions copts;
  copts.window_days = o.window_days;
  d.assignments = assign_all(d.purchases, d.part.target_ids, d.part.general_ids, copts,
                             o.threads);
  d.summary = cohort_summary(d.assignments);
  log_line("cohort: " + std::to_string(d.summary.cases) + " cases, " +
           std::to_string(d.summary.controls) + " controls, " +
           std::to_string(d.summary.excluded) + " excluded");
  return d;
}

json rate_json(const RateEstimate& r) {
  return json{{"positives", r.positives}, {"total", r.total}, {"rate", r.rate}};
}

json run_risk_stage(const CommonOpts& o, const PipelineData& d,
                    const std::vector<QuestionnaireRecord>& questionnaire) {
  RiskOptions ropts;
  ropts.alpha = o.alpha;
  ropts.min_exposure = o.min_exposure;
  std::vector<IngredientRiskRow> rows =
      ingredient_risk_table(d.assignments, d.catalog, questionnaire, ropts);
  save_ingredient_risk(o.out + "/ingredient_risk.csv", rows);

  TestResult r = validate_ingredients(rows);
  std::size_t n_points = save_scatter(o.out + "/scatter.csv", rows);
  if (n_points > 0) {
    save_scatter_svg(o.out + "/scatter.svg", rows);
  } else {
    log_line("no significant ingredients; scatter plot skipped");
  }

  DoseResponse dr = dose_response(d.assignments, d.catalog);
  save_dose_response(o.out + "/dose_response.csv", dr);
  save_dose_svg(o.out + "/dose_response.svg", dr);
  if (dr.skipped > 0)
    log_line("dose-response: " + std::to_string(dr.skipped) +
             " users without form-known purchases");

  json out;
  out["ingredient"] = {{"r", r.statistic},
                       {"p", r.p_value},
                       {"n_rows", rows.size()},
                       {"n_significant", n_points}};
  out["dose_response"] = {{"trend_z", dr.trend.statistic},
                          {"trend_p", dr.trend.p_value},
                          {"ratio", dr.ratio},
                          {"skipped_users", dr.skipped}};
  json bins = json::array();
  for (const WetRateBin& b : dr.bins) {
    bins.push_back({{"bin", wet_bin_name(b.bin)},
                    {"cases", b.switch_rate.positives},
                    {"total", b.switch_rate.total},
                    {"rate", b.switch_rate.total > 0 ? json(b.switch_rate.rate) : json()}});
  }
  out["dose_response"]["bins"] = bins;
  return out;
}

json run_seasonality_stage(const CommonOpts& o, const PipelineData& d,
                           const std::vector<ClaimSeriesRow>& claims) {
  MonthlySeries claims_series = claims_to_series(claims);
  if (claims_series.values.size() < 3 * static_cast<std::size_t>(o.period))
    log_line("claims series shorter than 3 periods; decomposition may be unstable");
  MonthlySeries ec_series =
      ec_onset_series(d.assignments, claims_series.start_month, claims_series.values.size());
  SeasonalAgreement agg = seasonal_agreement(claims_series, ec_series, stl_params(o));
  save_stl_series(o.out + "/stl_claims.csv", claims_series, agg.stl_a);
  save_stl_series(o.out + "/stl_ec.csv", ec_series, agg.stl_b);
  save_seasonal_svg(o.out + "/seasonal.svg", claims_series, agg.stl_a, agg.stl_b);

  json out;
  out["r"] = agg.correlation.statistic;
  out["p"] = agg.correlation.p_value;
  out["profile_r"] = agg.profile_correlation.statistic;
  out["peak_month_claims"] = agg.peak_month_a;
  out["peak_month_ec"] = agg.peak_month_b;
  out["best_lag"] = agg.best_lag;
  std::ofstream js(o.out + "/seasonal_agreement.json", std::ios::binary);
  if (!js) throw Error("cannot open for writing: " + o.out + "/seasonal_agreement.json");
  js << out.dump(2) << '\n';
  return out;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, long users,
              const std::string& config_path) {
  GeneratorConfig cfg;
  if (!config_path.empty()) {
    cfg = load_generator_config(config_path);
    if (seed != 0) cfg.seed = seed;
    if (users != 0) cfg.n_users = users;
  } else {
    cfg = paper_scenario(seed == 0 ? 1 : seed, users == 0 ? 50000 : users);
  }
  SynthResult res = generate(cfg);
  fs::create_directories(out_dir);
  write_bundle(out_dir, res.bundle, res.truth);
  save_generator_config(out_dir + "/config.txt", cfg);
  log_line("synth: " + std::to_string(cfg.n_users) + " users, " +
           std::to_string(res.bundle.purchases.size()) + " purchases");
  return 0;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& tok : split(csv, ',')) out.push_back(std::stod(tok));
  return out;
}

// Hidden kernel probe: `stat chi2 a b c d`, `stat trend s:r:n ...`,
// `stat gammaq s x`, `stat pearson xs ys`, `stat spearman xs ys`.
int cmd_stat(const std::vector<std::string>& args) {
  if (args.empty()) throw Error("stat needs a kernel name");
  const std::string& kind = args[0];
  if (kind == "chi2" && args.size() == 5) {
    TwoByTwoTable t{std::stod(args[1]), std::stod(args[2]), std::stod(args[3]),
                    std::stod(args[4])};
    TestResult r = chi_squared_2x2(t);
    std::printf("statistic=%.10g p=%.10g\n", r.statistic, r.p_value);
    return 0;
  }
  if (kind == "trend" && args.size() >= 3) {
    std::vector<TrendGroup> groups;
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::vector<std::string> parts = split(args[i], ':');
      if (parts.size() != 3) throw Error("trend groups are score:cases:total");
      groups.push_back({std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
    }
    TestResult r = cochran_armitage(groups);
    std::printf("z=%.10g p=%.10g\n", r.statistic, r.p_value);
    return 0;
  }
  if (kind == "gammaq" && args.size() == 3) {
    std::printf("q=%.10g\n", reg_incomplete_gamma_upper(std::stod(args[1]), std::stod(args[2])));
    return 0;
  }
  if ((kind == "pearson" || kind == "spearman") && args.size() == 3) {
    std::vector<double> xs = parse_doubles(args[1]), ys = parse_doubles(args[2]);
    TestResult r = kind == "pearson" ? pearson(xs, ys) : spearman(xs, ys);
    std::printf("r=%.10g p=%.10g\n", r.statistic, r.p_value);
    return 0;
  }
  throw Error("unknown stat form; see README");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral disease-risk proxy validation toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::uint64_t seed = 0;
  long users = 0;
  std::string gen_config;
  std::vector<std::string> stat_args;

  CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset bundle");
  synth->add_option("--out", o.out, "Output directory")->required()->envname("PROXYVAL_OUT");
  synth->add_option("--seed", seed, "Generator seed")->envname("PROXYVAL_SEED");
  synth->add_option("--users", users, "Number of users")->envname("PROXYVAL_USERS");
  synth->add_option("--config", gen_config, "Generator config file (key=value)");

  auto add_input_flags = [&](CLI::App* cmd, bool need_claims, bool need_questionnaire) {
    cmd->add_option("--purchases", o.purchases, "purchases.csv path")
        ->required()
        ->envname("PROXYVAL_PURCHASES");
    cmd->add_option("--catalog", o.catalog, "catalog.csv path")
        ->required()
        ->envname("PROXYVAL_CATALOG");
    if (need_claims)
      cmd->add_option("--claims", o.claims, "claims.csv path")
          ->required()
          ->envname("PROXYVAL_CLAIMS");
    if (need_questionnaire)
      cmd->add_option("--questionnaire", o.questionnaire, "questionnaire.csv path")
          ->required()
          ->envname("PROXYVAL_QUESTIONNAIRE");
    cmd->add_option("--keywords", o.keywords, "Keyword config file")
        ->envname("PROXYVAL_KEYWORDS");
    cmd->add_option("--out", o.out, "Output directory")->required()->envname("PROXYVAL_OUT");
    cmd->add_option("--window-days", o.window_days, "Analysis window length in days")
        ->check(CLI::Range(28, 100000))
        ->envname("PROXYVAL_WINDOW_DAYS");
    cmd->add_flag("--strict,!--lenient", o.strict, "Abort on any malformed row (default)");
    cmd->add_option("--threads", o.threads, "Worker threads for cohort assignment (0 = auto)");
  };

  CLI::App* cohort = app.add_subcommand("cohort", "Assign users to case/control cohorts");
  add_input_flags(cohort, false, false);

  CLI::App* risk = app.add_subcommand("risk", "Ingredient risk tables and dose-response");
  add_input_flags(risk, false, true);
  risk->add_option("--alpha", o.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->envname("PROXYVAL_ALPHA");
  risk->add_option("--min-exposure", o.min_exposure, "Minimum exposed units per side")
      ->envname("PROXYVAL_MIN_EXPOSURE");

  CLI::App* seasonality = app.add_subcommand("seasonality", "STL seasonal agreement");
  add_input_flags(seasonality, true, false);
  add_stl_flags(seasonality, o);

  CLI::App* validate = app.add_subcommand("validate", "Full pipeline plus summary");
  add_input_flags(validate, true, true);
  validate->add_option("--alpha", o.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->envname("PROXYVAL_ALPHA");
  validate->add_option("--min-exposure", o.min_exposure, "Minimum exposed units per side")
      ->envname("PROXYVAL_MIN_EXPOSURE");
  add_stl_flags(validate, o);

  CLI::App* stat = app.add_subcommand("stat", "Kernel probe");
  stat->group("");  // hidden
  stat->add_option("args", stat_args, "kernel name and arguments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o.out, seed, users, gen_config);
    if (stat->parsed()) return cmd_stat(stat_args);

    fs::create_directories(o.out);
    PipelineData d = run_cohort_stage(o);
    save_cohort(o.out + "/cohort.csv", d.assignments);

    if (cohort->parsed()) return 0;

    json summary;
    summary["cohort"] = {{"cases", d.summary.cases},
                         {"controls", d.summary.controls},
                         {"excluded", d.summary.excluded},
                         {"switch_rate",
                          rate_json(switch_rate(static_cast<long>(d.summary.cases),
                                                static_cast<long>(d.summary.controls)))}};

    if (risk->parsed() || validate->parsed()) {
      LoadReport qrep;
      std::vector<QuestionnaireRecord> questionnaire =
          load_questionnaire(o.questionnaire, o.strict, &qrep);
      report_skips("questionnaire", qrep);
      std::map<Group, std::size_t> gc = questionnaire_group_counts(questionnaire);
      summary["claim"] = {{"cases", gc[Group::case_group]},
                          {"controls", gc[Group::control_group]},
                          {"claim_rate",
                           rate_json(claim_rate(static_cast<long>(gc[Group::case_group]),
                                                static_cast<long>(gc[Group::control_group])))}};
      json risk_json = run_risk_stage(o, d, questionnaire);
      summary.update(risk_json);
    }

    if (seasonality->parsed() || validate->parsed()) {
      LoadReport crep;
      std::vector<ClaimSeriesRow> claims = load_claim_series(o.claims, o.strict, &crep);
      report_skips("claims", crep);
      summary["seasonal"] = run_seasonality_stage(o, d, claims);
    }

    const char* name = validate->parsed() ? "/validation.json"
                       : risk->parsed()   ? "/risk_summary.json"
                                          : "/seasonality_summary.json";
    std::ofstream js(o.out + name, std::ios::binary);
    if (!js) throw Error("cannot open for writing: " + o.out + name);
    js << summary.dump(2) << '\n';
    log_line(std::string("wrote ") + o.out + name);
    return 0;
  } catch (const std::exception& e) {
    json err{{"error", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
