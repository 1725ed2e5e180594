#include "rankaudit/svg.hpp"

#include <algorithm>
#include <array>
#include <map>

#include <fmt/format.h>

namespace rankaudit {

namespace {

constexpr std::array<std::string_view, 8> kFamilyPalette{"#a50f15", "#2171b5", "#d4a017", "#6a51a3",
                                                         "#238b8b", "#c51b7d", "#636363", "#8c6d31"};

constexpr int kCell = 28;
constexpr int kLabelMargin = 170;
constexpr int kStrip = 8;

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view tier_color(Tier tier) {
  switch (tier) {
    case Tier::P_LT_0_001: return "#00441b";
    case Tier::P_LT_0_01: return "#238b45";
    case Tier::P_LT_0_05: return "#a1d99b";
    case Tier::NOT_SIGNIFICANT: return "#d9d9d9";
  }
  return "#ffffff";
}

std::string render_significance_svg(const SignificanceMap& map) {
  const int m = static_cast<int>(map.size());
  const int grid_x = kLabelMargin + kStrip + 4;
  const int grid_y = kLabelMargin + kStrip + 4;
  const int legend_y = grid_y + m * kCell + 30;
  const int width = grid_x + m * kCell + 40;
  const int height = legend_y + 5 * 22 + 20;

  std::map<std::string, std::string_view> family_color;
  for (const auto& f : map.families) {
    if (f && family_color.find(*f) == family_color.end()) {
      family_color.emplace(*f, kFamilyPalette[family_color.size() % kFamilyPalette.size()]);
    }
  }

  std::string s;
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height, width, height);
  s += fmt::format("<title>Pairwise significance ({}, alpha = {}, k = {})</title>\n", to_string(map.metric),
                   map.alpha, map.k_comparisons);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);

  for (int i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::string name = xml_escape(map.methods[idx]);
    const int cy = grid_y + i * kCell + kCell / 2 + 4;
    const int cx = grid_x + i * kCell + kCell / 2 + 4;
    s += fmt::format("<text class=\"row-label\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                     kLabelMargin - 4, cy, name);
    s += fmt::format(
        "<text class=\"col-label\" x=\"{}\" y=\"{}\" text-anchor=\"start\" transform=\"rotate(-60 {} {})\">{}</text>\n",
        cx, kLabelMargin - 4, cx, kLabelMargin - 4, name);
    if (const auto& fam = map.families[idx]) {
      const auto color = family_color.at(*fam);
      s += fmt::format(
          "<rect class=\"family-strip\" data-family=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
          xml_escape(*fam), kLabelMargin, grid_y + i * kCell, kStrip, kCell, color);
      s += fmt::format(
          "<rect class=\"family-strip\" data-family=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
          xml_escape(*fam), grid_x + i * kCell, kLabelMargin, kCell, kStrip, color);
    }
  }

  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const int x = grid_x + c * kCell;
      const int y = grid_y + r * kCell;
      if (r == c) {
        s += fmt::format(
            "<rect class=\"diagonal\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#bdbdbd\"/>\n",
            x, y, kCell, kCell);
        continue;
      }
      const auto& cell = map.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      s += fmt::format(
          "<rect class=\"cell {}\" data-row=\"{}\" data-col=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
          "fill=\"{}\" stroke=\"#ffffff\"><title>{} vs {}: p_adj = {:.4g}</title></rect>\n",
          to_string(cell.tier), xml_escape(map.methods[static_cast<std::size_t>(r)]),
          xml_escape(map.methods[static_cast<std::size_t>(c)]), x, y, kCell, kCell, tier_color(cell.tier),
          xml_escape(map.methods[static_cast<std::size_t>(r)]), xml_escape(map.methods[static_cast<std::size_t>(c)]),
          cell.p_adj);
    }
  }

  s += fmt::format("<text class=\"legend-title\" x=\"{}\" y=\"{}\">Row method better than column (Bonferroni-adjusted p)</text>\n",
                   grid_x, legend_y);
  const std::array<std::pair<Tier, std::string>, 4> legend{{
      {Tier::P_LT_0_001, fmt::format("p < {}", map.thresholds.strong)},
      {Tier::P_LT_0_01, fmt::format("p < {}", map.thresholds.medium)},
      {Tier::P_LT_0_05, fmt::format("p < {}", map.thresholds.weak)},
      {Tier::NOT_SIGNIFICANT, "not significant"},
  }};
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const int y = legend_y + 10 + static_cast<int>(i) * 22;
    s += fmt::format("<rect class=\"legend-swatch\" x=\"{}\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\"/>\n",
                     grid_x, y, tier_color(legend[i].first));
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", grid_x + 22, y + 12, xml_escape(legend[i].second));
  }
  s += "</svg>\n";
  return s;
}

namespace {

constexpr double kViolinWidth = 360.0;
constexpr double kViolinHeight = 420.0;
constexpr double kPlotTop = 50.0;
constexpr double kPlotBottom = 370.0;
constexpr double kHalfWidth = 130.0;

double score_y(double score) { return kPlotBottom - score * (kPlotBottom - kPlotTop); }

std::string half_violin(const KdeCurve& curve, double centre, double scale, int side) {
  std::string pts = fmt::format("{:.2f},{:.2f}", centre, score_y(0.0));
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    pts += fmt::format(" {:.2f},{:.2f}", centre + side * curve.density[i] * scale, score_y(curve.grid[i]));
  }
  pts += fmt::format(" {:.2f},{:.2f}", centre, score_y(1.0));
  return pts;
}

}  // namespace

std::string render_violin_svg(const LabeledCurve& left, const LabeledCurve& right, const DpdResult& dpd) {
  const double centre = kViolinWidth / 2.0;
  double peak = 0.0;
  for (const auto* c : {&left.curve, &right.curve}) {
    for (double d : c->density) peak = std::max(peak, d);
  }
  const double scale = peak > 0.0 ? kHalfWidth / peak : 0.0;

  std::string s;
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      kViolinWidth, kViolinHeight, kViolinWidth, kViolinHeight);
  s += fmt::format("<title>{}: {} vs {}</title>\n", xml_escape(dpd.method), xml_escape(left.label),
                   xml_escape(right.label));
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", kViolinWidth,
                   kViolinHeight);
  s += fmt::format("<text class=\"method\" x=\"{:.2f}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                   centre, xml_escape(dpd.method));
  s += fmt::format(
      "<text class=\"dpd\" data-dpd=\"{:.6f}\" x=\"{:.2f}\" y=\"38\" text-anchor=\"middle\">DPD = {:.3f} ({}{})</text>\n",
      dpd.value, centre, dpd.value, to_string(dpd.mode), dpd.flagged ? ", flagged" : "");

  for (int tick = 0; tick <= 10; tick += 2) {
    const double v = tick / 10.0;
    s += fmt::format("<line x1=\"28\" y1=\"{:.2f}\" x2=\"34\" y2=\"{:.2f}\" stroke=\"#636363\"/>\n", score_y(v),
                     score_y(v));
    s += fmt::format("<text x=\"24\" y=\"{:.2f}\" text-anchor=\"end\">{:.1f}</text>\n", score_y(v) + 4, v);
  }
  s += fmt::format("<line x1=\"34\" y1=\"{:.2f}\" x2=\"34\" y2=\"{:.2f}\" stroke=\"#636363\"/>\n", score_y(0.0),
                   score_y(1.0));

  s += fmt::format("<polygon class=\"half left\" points=\"{}\" fill=\"#6baed6\" fill-opacity=\"0.8\" stroke=\"#2171b5\"/>\n",
                   half_violin(left.curve, centre, scale, -1));
  s += fmt::format("<polygon class=\"half right\" points=\"{}\" fill=\"#fd8d3c\" fill-opacity=\"0.8\" stroke=\"#d94801\"/>\n",
                   half_violin(right.curve, centre, scale, 1));
  s += fmt::format("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#252525\"/>\n",
                   centre, score_y(0.0), centre, score_y(1.0));
  s += fmt::format(
      "<line class=\"mean left\" data-mean=\"{:.6f}\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
      "stroke=\"#e31a1c\" stroke-width=\"2\"/>\n",
      left.curve.mean, centre - kHalfWidth, score_y(left.curve.mean), centre, score_y(left.curve.mean));
  s += fmt::format(
      "<line class=\"mean right\" data-mean=\"{:.6f}\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
      "stroke=\"#e31a1c\" stroke-width=\"2\"/>\n",
      right.curve.mean, centre, score_y(right.curve.mean), centre + kHalfWidth, score_y(right.curve.mean));
  s += fmt::format("<text class=\"label left\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{} (n={})</text>\n",
                   centre - kHalfWidth / 2.0, kPlotBottom + 24, xml_escape(left.label), left.curve.n);
  s += fmt::format("<text class=\"label right\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{} (n={})</text>\n",
                   centre + kHalfWidth / 2.0, kPlotBottom + 24, xml_escape(right.label), right.curve.n);
  s += "</svg>\n";
  return s;
}

}  // namespace rankaudit
