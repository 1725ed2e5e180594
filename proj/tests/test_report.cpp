#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>

#include "rankaudit/error.hpp"
#include "rankaudit/kde.hpp"
#include "rankaudit/svg.hpp"

using namespace rankaudit;

namespace {

double mixture_density(const std::vector<double>& xs, double h, double at) {
  double sum = 0.0;
  for (double x : xs) sum += std::exp(-0.5 * ((at - x) / h) * ((at - x) / h)) / (h * std::sqrt(2 * std::numbers::pi));
  return sum / static_cast<double>(xs.size());
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

SignificanceMap map_of(std::size_t m) {
  SignificanceMap map;
  for (std::size_t i = 0; i < m; ++i) {
    map.methods.push_back("m" + std::to_string(i));
    map.families.push_back(i % 2 ? std::optional<std::string>("fam") : std::nullopt);
    map.mean_scores.push_back(0.5);
  }
  map.cells.resize(m * m);
  map.k_comparisons = m * (m - 1) / 2;
  return map;
}

std::vector<double> points_x(const std::string& svg, const std::string& cls) {
  const std::regex re("class=\"" + cls + "\" points=\"([^\"]*)\"");
  std::smatch match;
  std::vector<double> xs;
  if (!std::regex_search(svg, match, re)) return xs;
  std::stringstream ss(match[1].str());
  std::string pt;
  while (ss >> pt) xs.push_back(std::stod(pt.substr(0, pt.find(','))));
  return xs;
}

DpdResult dpd_value(double v, DpdMode mode = DpdMode::MEAN) {
  DpdResult r;
  r.method = "net<1>";
  r.value = v;
  r.mode = mode;
  r.flagged = v > r.flag_tau;
  return r;
}

}  // namespace

TEST(Kde, TwoSamplesAtHalf) {
  const std::vector<double> xs{0.5, 0.5};
  const KdeCurve c = kde(xs);
  ASSERT_EQ(c.grid.size(), kKdeGridPoints);
  EXPECT_EQ(c.grid.front(), 0.0);
  EXPECT_EQ(c.grid.back(), 1.0);
  EXPECT_EQ(c.bandwidth, kKdeBandwidthFloor);
  for (std::size_t i = 0; i < c.density.size(); ++i) {
    EXPECT_NEAR(c.density[i], c.density[c.density.size() - 1 - i], 1e-9 * (1 + c.density[i]));
  }
  const auto peak = std::max_element(c.density.begin(), c.density.end()) - c.density.begin();
  EXPECT_TRUE(peak == 127 || peak == 128);
  EXPECT_TRUE(std::isfinite(c.density[static_cast<std::size_t>(peak)]));
  EXPECT_GT(c.density[static_cast<std::size_t>(peak)], 0.0);
}

TEST(Kde, SymmetricUnimodalWithWiderBandwidth) {
  const std::vector<double> xs{0.5, 0.5};
  const KdeCurve c = kde(xs, 0.1);
  for (std::size_t i = 0; i + 1 < 128; ++i) EXPECT_LT(c.density[i], c.density[i + 1]);
  for (std::size_t i = 128; i + 1 < c.density.size(); ++i) EXPECT_GT(c.density[i], c.density[i + 1]);
}

TEST(Kde, EqualSamplesUseFloor) {
  const std::vector<double> xs(30, 0.37);
  EXPECT_EQ(silverman_bandwidth(xs), kKdeBandwidthFloor);
  const KdeCurve c = kde(xs);
  for (double d : c.density) EXPECT_TRUE(std::isfinite(d));
  EXPECT_DOUBLE_EQ(c.mean, 0.37);
}

TEST(Kde, BimodalMatchesGaussianMixture) {
  std::vector<double> xs(50, 0.2);
  xs.insert(xs.end(), 50, 0.8);
  const KdeCurve c = kde(xs);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    ASSERT_NEAR(c.density[i], mixture_density(xs, c.bandwidth, c.grid[i]), 1e-12 * (1 + c.density[i]));
  }
  const auto lo = std::max_element(c.density.begin(), c.density.begin() + 128);
  const auto hi = std::max_element(c.density.begin() + 128, c.density.end());
  EXPECT_NEAR(*lo / *hi, 1.0, 0.01);
  EXPECT_LT(c.density[128], *lo);
}

TEST(Kde, SilvermanAgainstHandComputation) {
  // sd = sqrt(2.5) / 10 for {0.1..0.5}; IQR = 0.2; min(sd, 0.2 / 1.34).
  const std::vector<double> xs{0.1, 0.2, 0.3, 0.4, 0.5};
  const double sd = std::sqrt(0.025);
  const double expect = 0.9 * std::min(sd, 0.2 / 1.34) * std::pow(5.0, -0.2);
  EXPECT_NEAR(silverman_bandwidth(xs), expect, 1e-15);
  // Zero IQR falls back to the standard deviation.
  const std::vector<double> spiky{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.9};
  EXPECT_GT(silverman_bandwidth(spiky), kKdeBandwidthFloor);
}

TEST(Kde, Errors) {
  const std::vector<double> one{0.5};
  const std::vector<double> two{0.2, 0.3};
  EXPECT_THROW(kde(one), InsufficientDataError);
  EXPECT_THROW(kde(two, 0.0), ArgumentError);
  EXPECT_THROW(kde(two, -1.0), ArgumentError);
}

TEST(KdeProperty, MassNearOneInsideUnitInterval) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> centre(0.35, 0.65);
  for (int iter = 0; iter < 200; ++iter) {
    std::normal_distribution<double> draw(centre(rng), 0.04);
    std::vector<double> xs(2 + rng() % 200);
    for (auto& x : xs) x = std::clamp(draw(rng), 0.2, 0.8);
    const KdeCurve c = kde(xs);
    const double mass = trapezoid_mass(c);
    ASSERT_GE(mass, 0.98);
    ASSERT_LE(mass, 1.02);
    ASSERT_LT(c.clipped_mass, 1e-3);
    for (double d : c.density) ASSERT_GE(d, 0.0);
  }
}

TEST(Kde, ClippedMassReportedNearEdges) {
  const std::vector<double> xs{0.0, 0.0, 0.01, 0.02};
  const KdeCurve c = kde(xs, 0.05);
  EXPECT_GT(c.clipped_mass, 0.3);
  EXPECT_NEAR(trapezoid_mass(c) + c.clipped_mass, 1.0, 0.02);
}

TEST(SignificanceSvg, AllGrayForTwoMethods) {
  const std::string svg = render_significance_svg(map_of(2));
  EXPECT_EQ(count_of(svg, "class=\"cell NOT_SIGNIFICANT\""), 2U);
  EXPECT_EQ(count_of(svg, "class=\"cell "), 2U);
  EXPECT_EQ(count_of(svg, "class=\"diagonal\""), 2U);
  EXPECT_EQ(count_of(svg, "fill=\"#d9d9d9\""), 3U);  // two cells plus the legend swatch
  EXPECT_EQ(svg.rfind("<svg", 0), 0U);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(SignificanceSvg, SingleDarkGreenCell) {
  SignificanceMap map = map_of(3);
  map.cells[2 * 3 + 0].tier = Tier::P_LT_0_001;
  map.cells[2 * 3 + 0].p_adj = 1e-5;
  const std::string svg = render_significance_svg(map);
  EXPECT_EQ(count_of(svg, "class=\"cell P_LT_0_001\""), 1U);
  EXPECT_NE(svg.find("class=\"cell P_LT_0_001\" data-row=\"m2\" data-col=\"m0\""), std::string::npos);
  EXPECT_EQ(count_of(svg, "fill=\"#00441b\""), 2U);  // the cell and its legend swatch
  EXPECT_EQ(count_of(svg, "class=\"family-strip\""), 2U);
  EXPECT_NE(svg.find("p &lt; 0.001"), std::string::npos);
}

TEST(SignificanceSvg, ByteDeterministic) {
  SignificanceMap map = map_of(3);
  map.cells[1].tier = Tier::P_LT_0_01;
  map.methods[0] = "a&b";
  const std::string first = render_significance_svg(map);
  EXPECT_EQ(first, render_significance_svg(map));
  EXPECT_NE(first.find("a&amp;b"), std::string::npos);
}

TEST(ViolinSvg, IdenticalCurvesAreMirrored) {
  const std::vector<double> xs{0.3, 0.4, 0.45, 0.5, 0.7};
  const KdeCurve c = kde(xs);
  const std::string svg = render_violin_svg({c, "sex=F"}, {c, "sex=M"}, dpd_value(0.0));
  const auto left = points_x(svg, "half left");
  const auto right = points_x(svg, "half right");
  ASSERT_EQ(left.size(), kKdeGridPoints + 2);
  ASSERT_EQ(left.size(), right.size());
  for (std::size_t i = 0; i < left.size(); ++i) EXPECT_NEAR(left[i] + right[i], 360.0, 0.011);
  EXPECT_NE(svg.find("data-dpd=\"0.000000\""), std::string::npos);
  EXPECT_NE(svg.find("DPD = 0.000 (MEAN)"), std::string::npos);
  EXPECT_NE(svg.find("net&lt;1&gt;"), std::string::npos);
}

TEST(ViolinSvg, MeanLinesAndAnnotation) {
  const std::vector<double> a{0.4, 0.5, 0.6};
  const std::vector<double> b{0.52, 0.62, 0.72};
  const std::string svg = render_violin_svg({kde(a), "g=a"}, {kde(b), "g=b"}, dpd_value(0.12));
  EXPECT_NE(svg.find("class=\"mean left\" data-mean=\"0.500000\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"mean right\" data-mean=\"0.620000\""), std::string::npos);
  EXPECT_NE(svg.find("data-dpd=\"0.120000\""), std::string::npos);
  EXPECT_NE(svg.find("DPD = 0.120 (MEAN, flagged)"), std::string::npos);
  EXPECT_EQ(svg, render_violin_svg({kde(a), "g=a"}, {kde(b), "g=b"}, dpd_value(0.12)));
}
