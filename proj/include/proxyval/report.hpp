#pragma once

#include <string>
#include <vector>

#include "proxyval/risk.hpp"
#include "proxyval/seasonality.hpp"

namespace proxyval {

void save_ingredient_risk(const std::string& path, const std::vector<IngredientRiskRow>& rows);

// Significant rows only; returns the number of points written.
std::size_t save_scatter(const std::string& path, const std::vector<IngredientRiskRow>& rows);

void save_dose_response(const std::string& path, const DoseResponse& dr);

// month, observed, trend, seasonal, remainder.
void save_stl_series(const std::string& path, const MonthlySeries& series, const StlResult& stl);

// One circle mark per scatter row.
void save_scatter_svg(const std::string& path, const std::vector<IngredientRiskRow>& rows);

// Overlaid seasonal components, one polyline per series.
void save_seasonal_svg(const std::string& path, const MonthlySeries& months,
                       const StlResult& a, const StlResult& b);

// One bar per wet-rate bin.
void save_dose_svg(const std::string& path, const DoseResponse& dr);

}  // namespace proxyval
