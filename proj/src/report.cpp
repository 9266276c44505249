#include "proxyval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "proxyval/csv.hpp"
#include "proxyval/error.hpp"

namespace proxyval {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 56;

double scale_x(double v, double lo, double hi) {
  if (hi <= lo) return kMargin;
  return kMargin + (v - lo) / (hi - lo) * (kWidth - 2 * kMargin);
}

double scale_y(double v, double lo, double hi) {
  if (hi <= lo) return kHeight - kMargin;
  return kHeight - kMargin - (v - lo) / (hi - lo) * (kHeight - 2 * kMargin);
}

void svg_header(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";
}

void svg_axes(std::ofstream& out, const std::string& xlabel, const std::string& ylabel) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

void save_ingredient_risk(const std::string& path, const std::vector<IngredientRiskRow>& rows) {
  std::ofstream out = open_out(path);
  out << "ingredient,ec_cases,ec_total,switch_rate,claim_cases,claim_total,claim_rate,chi2,p,"
         "significant\n";
  for (const IngredientRiskRow& r : rows) {
    out << csv_escape(r.ingredient) << ',' << r.switch_rate.positives << ','
        << r.switch_rate.total << ',' << num(r.switch_rate.rate) << ',' << r.claim_rate.positives
        << ',' << r.claim_rate.total << ',' << num(r.claim_rate.rate) << ','
        << num(r.chi2.statistic) << ',' << num(r.chi2.p_value) << ',' << (r.significant ? 1 : 0)
        << '\n';
  }
}

std::size_t save_scatter(const std::string& path, const std::vector<IngredientRiskRow>& rows) {
  std::ofstream out = open_out(path);
  out << "ingredient,claim_rate,switch_rate\n";
  std::size_t n = 0;
  for (const IngredientRiskRow& r : rows) {
    if (!r.significant) continue;
    out << csv_escape(r.ingredient) << ',' << num(r.claim_rate.rate) << ','
        << num(r.switch_rate.rate) << '\n';
    ++n;
  }
  return n;
}

void save_dose_response(const std::string& path, const DoseResponse& dr) {
  std::ofstream out = open_out(path);
  out << "bin,cases,total,rate\n";
  for (const WetRateBin& b : dr.bins) {
    out << wet_bin_name(b.bin) << ',' << b.switch_rate.positives << ',' << b.switch_rate.total
        << ',' << (b.switch_rate.total > 0 ? num(b.switch_rate.rate) : "") << '\n';
  }
}

void save_stl_series(const std::string& path, const MonthlySeries& series, const StlResult& stl) {
  std::ofstream out = open_out(path);
  out << "month,observed,trend,seasonal,remainder\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << format_month(series.start_month + static_cast<int>(i)) << ',' << num(series.values[i])
        << ',' << num(stl.trend[i]) << ',' << num(stl.seasonal[i]) << ',' << num(stl.remainder[i])
        << '\n';
  }
}

void save_scatter_svg(const std::string& path, const std::vector<IngredientRiskRow>& rows) {
  double max_x = 0.0, max_y = 0.0;
  for (const IngredientRiskRow& r : rows) {
    if (!r.significant) continue;
    max_x = std::max(max_x, r.claim_rate.rate);
    max_y = std::max(max_y, r.switch_rate.rate);
  }
  std::ofstream out = open_out(path);
  svg_header(out, "Claim rate vs switch rate per ingredient");
  svg_axes(out, "claim rate", "switch rate");
  for (const IngredientRiskRow& r : rows) {
    if (!r.significant) continue;
    out << "<circle cx=\"" << coord(scale_x(r.claim_rate.rate, 0.0, max_x)) << "\" cy=\""
        << coord(scale_y(r.switch_rate.rate, 0.0, max_y))
        << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
  }
  out << "</svg>\n";
}

void save_seasonal_svg(const std::string& path, const MonthlySeries& months, const StlResult& a,
                       const StlResult& b) {
  double lo = 0.0, hi = 0.0;
  for (const StlResult* s : {&a, &b}) {
    for (double v : s->seasonal) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::size_t n = months.values.size();
  std::ofstream out = open_out(path);
  svg_header(out, "Seasonal components");
  svg_axes(out, "month", "seasonal");
  const char* colors[2] = {"steelblue", "firebrick"};
  const StlResult* series[2] = {&a, &b};
  for (int s = 0; s < 2; ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out << ' ';
      double x = scale_x(static_cast<double>(i), 0.0, static_cast<double>(n - 1));
      out << coord(x) << ',' << coord(scale_y(series[s]->seasonal[i], lo, hi));
    }
    out << "\"/>\n";
  }
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"steelblue\">series A</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"firebrick\">series B</text>\n";
  out << "</svg>\n";
}

void save_dose_svg(const std::string& path, const DoseResponse& dr) {
  double max_rate = 0.0;
  for (const WetRateBin& b : dr.bins)
    if (b.switch_rate.total > 0) max_rate = std::max(max_rate, b.switch_rate.rate);
  std::ofstream out = open_out(path);
  svg_header(out, "Switch rate by wet-food share");
  svg_axes(out, "wet-food share bin", "switch rate");
  double slot = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(dr.bins.size());
  for (std::size_t i = 0; i < dr.bins.size(); ++i) {
    const WetRateBin& b = dr.bins[i];
    double rate = b.switch_rate.total > 0 ? b.switch_rate.rate : 0.0;
    double x = kMargin + slot * static_cast<double>(i) + slot * 0.15;
    double y = scale_y(rate, 0.0, max_rate);
    out << "<rect x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" width=\""
        << coord(slot * 0.7) << "\" height=\"" << coord(kHeight - kMargin - y)
        << "\" fill=\"seagreen\"/>\n";
    out << "<text x=\"" << coord(x + slot * 0.35) << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << wet_bin_name(b.bin) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace proxyval
