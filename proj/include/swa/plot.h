#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swa/results_io.h"

namespace swa::plot {

enum class PlotKind {
  kOverloadVsLambda,      // seed-mean OR
  kWelfareVsLambda,       // seed-mean delta welfare against lambda = 0
  kMeanWelfareVsLambda,   // seed-mean episode welfare
};

PlotKind parse_plot_kind(std::string_view s);
std::string_view to_string(PlotKind k);

struct PlotOutput {
  std::string svg;
  std::vector<std::string> warnings;
};

/// Self-contained SVG: one curve per beta (seed mean with a min-max band)
/// and a dashed vertical marker at each beta's critical lambda. Points with
/// no usable seed values are omitted and reported in `warnings`.
PlotOutput render_svg(const std::vector<results::ResultRow>& rows, PlotKind kind,
                      const std::optional<nlohmann::json>& config = std::nullopt);

}  // namespace swa::plot
