#include "swa/plot.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Point {
  double lambda;
  double mean;
  double lo;
  double hi;
};

struct Series {
  double beta = 0.0;
  double lambda_star = 0.0;
  std::vector<Point> points;
};

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<double> metric(const results::ResultRow& r, PlotKind kind) {
  switch (kind) {
    case PlotKind::kOverloadVsLambda: return r.overload_rate;
    case PlotKind::kWelfareVsLambda: return r.delta_welfare;
    case PlotKind::kMeanWelfareVsLambda: return r.mean_welfare;
  }
  return std::nullopt;
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

PlotKind parse_plot_kind(std::string_view s) {
  if (s == "overload_vs_lambda") return PlotKind::kOverloadVsLambda;
  if (s == "welfare_vs_lambda") return PlotKind::kWelfareVsLambda;
  if (s == "mean_welfare_vs_lambda") return PlotKind::kMeanWelfareVsLambda;
  throw InvalidInput(fmt::format(
      "unknown plot kind '{}' (expected overload_vs_lambda|welfare_vs_lambda|mean_welfare_vs_lambda)", s));
}

std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::kOverloadVsLambda: return "overload_vs_lambda";
    case PlotKind::kWelfareVsLambda: return "welfare_vs_lambda";
    case PlotKind::kMeanWelfareVsLambda: return "mean_welfare_vs_lambda";
  }
  return "unknown";
}

PlotOutput render_svg(const std::vector<results::ResultRow>& rows, PlotKind kind,
                      const std::optional<nlohmann::json>& config) {
  PlotOutput out;

  std::map<double, std::map<double, std::vector<double>>> grouped;
  std::map<double, double> lambda_star;
  for (const auto& r : rows) {
    auto& bucket = grouped[r.beta][r.lambda];
    lambda_star[r.beta] = r.lambda_star;
    if (auto v = metric(r, kind)) bucket.push_back(*v);
  }

  std::vector<Series> series;
  for (const auto& [beta, by_lambda] : grouped) {
    Series s;
    s.beta = beta;
    s.lambda_star = lambda_star[beta];
    for (const auto& [lambda, values] : by_lambda) {
      if (values.empty()) {
        out.warnings.push_back(
            fmt::format("beta={} lambda={}: no seed values, point omitted", beta, lambda));
        continue;
      }
      double sum = 0.0;
      for (double v : values) sum += v;
      s.points.push_back({lambda, sum / values.size(),
                          *std::min_element(values.begin(), values.end()),
                          *std::max_element(values.begin(), values.end())});
    }
    series.push_back(std::move(s));
  }

  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  if (kind != PlotKind::kOverloadVsLambda) {
    y_lo = 0.0;
    y_hi = 0.0;
    for (const auto& s : series)
      for (const auto& p : s.points) {
        y_lo = std::min(y_lo, p.lo);
        y_hi = std::max(y_hi, p.hi);
      }
    if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;
    const double step = nice_step(y_hi - y_lo);
    y_lo = std::floor(y_lo / step) * step;
    y_hi = std::ceil(y_hi / step) * step;
  }
  for (const auto& s : series)
    for (const auto& p : s.points) {
      x_lo = std::min(x_lo, p.lambda);
      x_hi = std::max(x_hi, p.lambda);
    }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  const char* y_label = "Overload rate (OR)";
  const char* title = "Overload rate versus social weight";
  if (kind == PlotKind::kWelfareVsLambda) {
    y_label = "ΔW̅(λ) = W̅(λ) − W̅(0)";
    title = "Welfare change relative to λ = 0";
  } else if (kind == PlotKind::kMeanWelfareVsLambda) {
    y_label = "Episode-average welfare W̅";
    title = "Episode-average realized welfare";
  }

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  if (config) svg += "<metadata>" + xml_escape(config->dump()) + "</metadata>\n";
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + plot_w / 2, title);

  // Stable side of each threshold, then gridlines and axes.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.lambda_star < x_lo || s.lambda_star > x_hi) continue;
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" fill-opacity=\"0.05\"/>\n",
        sx(s.lambda_star), kTop, sx(x_hi) - sx(s.lambda_star), plot_h, kPalette[i % std::size(kPalette)]);
  }

  const double x_step = nice_step(x_hi - x_lo) / 2.0;
  for (double x = x_lo; x <= x_hi + 1e-9; x += x_step) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#e0e0e0\"/>\n",
                       sx(x), kTop, kTop + plot_h);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.1f}</text>\n", sx(x),
                       kTop + plot_h + 18, x);
  }
  const double y_step = nice_step(y_hi - y_lo);
  for (double y = y_lo; y <= y_hi + 1e-9 * std::max(1.0, std::abs(y_hi)); y += y_step) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#e0e0e0\"/>\n",
                       kLeft, sy(y), kLeft + plot_w);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", kLeft - 8,
                       sy(y) + 4, std::abs(y) < 1e-12 ? 0.0 : y);
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, plot_w, plot_h);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">Social weight λ</text>\n",
                     kLeft + plot_w / 2, kHeight - 18);
  svg += fmt::format(
      "<text transform=\"translate(22,{:.1f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      kTop + plot_h / 2, y_label);

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    svg += fmt::format("<g class=\"series\" data-beta=\"{}\">\n", s.beta);

    if (!s.points.empty()) {
      std::string band;
      for (const auto& p : s.points) band += fmt::format("{:.2f},{:.2f} ", sx(p.lambda), sy(p.hi));
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
        band += fmt::format("{:.2f},{:.2f} ", sx(it->lambda), sy(it->lo));
      band.pop_back();
      svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", band, color);

      std::string line;
      for (const auto& p : s.points) line += fmt::format("{:.2f},{:.2f} ", sx(p.lambda), sy(p.mean));
      line.pop_back();
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
      for (const auto& p : s.points)
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(p.lambda),
                           sy(p.mean), color);
    }

    if (s.lambda_star >= x_lo && s.lambda_star <= x_hi) {
      svg += fmt::format(
          "<line class=\"threshold\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\" "
          "stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n",
          sx(s.lambda_star), kTop, kTop + plot_h, color);
    }
    svg += "</g>\n";

    const double ly = kTop + 20 + 36.0 * i;
    const double lx = kLeft + plot_w + 16;
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       lx, ly, lx + 22, ly, color);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">β = {:g}</text>\n", lx + 28, ly + 4, s.beta);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"#555\">λ* = {:.3f}</text>\n", lx + 28,
                       ly + 18, s.lambda_star);
  }

  svg += "</svg>\n";
  out.svg = std::move(svg);
  return out;
}

}  // namespace swa::plot
