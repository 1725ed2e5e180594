#pragma once

#include <string>

#include "rankaudit/fairness.hpp"
#include "rankaudit/kde.hpp"
#include "rankaudit/rank_stats.hpp"

namespace rankaudit {

// Fill colours per tier; also listed in the rendered legend.
std::string_view tier_color(Tier tier);

// M x M heatmap; the row method is the one asserted better. Output bytes are
// a pure function of the map.
std::string render_significance_svg(const SignificanceMap& map);

struct LabeledCurve {
  KdeCurve curve;
  std::string label;
};

// Split violin: left and right half-densities mirrored about a vertical
// axis, score on the vertical axis, a mean line per side and the DPD value
// annotated.
std::string render_violin_svg(const LabeledCurve& left, const LabeledCurve& right, const DpdResult& dpd);

std::string xml_escape(std::string_view text);

}  // namespace rankaudit
