#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "stylesplit/attribution.hpp"
#include "stylesplit/cluster.hpp"

namespace stylesplit {

// What to draw. Every column runs top (word 1) to bottom (last word); each
// group of columns is optional except the mean.
struct SvgFigure {
  const AttributionResult* mean = nullptr;
  const std::vector<Clustering>* raw = nullptr;
  const std::vector<Clustering>* aligned = nullptr;
  const GroundTruth* truth = nullptr;
};

namespace detail {

struct Rgb {
  double r, g, b;
};

inline Rgb label_color(std::size_t label) {
  static constexpr std::array<Rgb, 10> palette{{{31, 119, 180},
                                                {255, 127, 14},
                                                {44, 160, 44},
                                                {214, 39, 40},
                                                {148, 103, 189},
                                                {140, 86, 75},
                                                {227, 119, 194},
                                                {127, 127, 127},
                                                {188, 189, 34},
                                                {23, 190, 207}}};
  return palette[label % palette.size()];
}

inline Rgb mix(const WeightVector& w) {
  Rgb out{0, 0, 0};
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Rgb c = label_color(i);
    out.r += w[i] * c.r;
    out.g += w[i] * c.g;
    out.b += w[i] * c.b;
  }
  return out;
}

inline std::string hex(const Rgb& c) {
  auto clamp = [](double v) { return static_cast<int>(std::clamp(v + 0.5, 0.0, 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", clamp(c.r), clamp(c.g), clamp(c.b));
  return buf;
}

class SvgWriter {
 public:
  SvgWriter(std::size_t words, double height) : words_(words), height_(height) {}

  void rect(double x, double width, std::size_t start, std::size_t end, const Rgb& color) {
    char buf[160];
    const double y0 = y(start), y1 = y(end);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n", x,
                  y0, width, y1 - y0, hex(color).c_str());
    body_ += buf;
  }

  void label(double x, const std::string& text) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" font-family=\"sans-serif\">",
                  x, kTop - 6.0);
    body_ += buf;
    body_ += text + "</text>\n";
  }

  std::string finish(double width) const {
    char head[200];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.2f\" height=\"%.2f\" "
                  "viewBox=\"0 0 %.2f %.2f\">\n",
                  width, height_ + kTop + 10.0, width, height_ + kTop + 10.0);
    return std::string(head) + body_ + "</svg>\n";
  }

  static constexpr double kTop = 20.0;

 private:
  double y(std::size_t word) const {
    return kTop + height_ * static_cast<double>(word) / static_cast<double>(words_);
  }

  std::size_t words_;
  double height_;
  std::string body_;
};

}  // namespace detail

// Static column plot: raw clusterings, aligned clusterings, the mean
// attribution (colors interpolated by weight) and the ground truth.
inline std::string render_svg(const SvgFigure& fig) {
  if (!fig.mean) throw ParameterError("svg figure needs a mean attribution");
  constexpr double kColumn = 14.0, kGap = 3.0, kGroupGap = 18.0, kHeight = 600.0;

  std::size_t words = 1;
  for (const auto& s : fig.mean->segments) words = std::max(words, s.span.end);
  if (fig.truth) {
    for (const auto& t : fig.truth->spans) words = std::max(words, t.span.end);
  }
  for (const auto* group : {fig.raw, fig.aligned}) {
    if (!group) continue;
    for (const auto& c : *group) {
      for (const auto& s : c.spans) words = std::max(words, s.end);
    }
  }

  detail::SvgWriter svg(words, kHeight);
  double x = kGap;
  auto clustering_group = [&](const std::vector<Clustering>* group, const std::string& title) {
    if (!group || group->empty()) return;
    svg.label(x, title);
    for (const auto& c : *group) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        svg.rect(x, kColumn, c.spans[i].start, c.spans[i].end, detail::label_color(c.labels[i]));
      }
      x += kColumn + kGap;
    }
    x += kGroupGap;
  };
  clustering_group(fig.raw, "clusterings");
  clustering_group(fig.aligned, "aligned");

  svg.label(x, "mean");
  for (const auto& s : fig.mean->segments) {
    svg.rect(x, 2 * kColumn, s.span.start, s.span.end, detail::mix(s.weights));
  }
  x += 2 * kColumn + kGroupGap;

  if (fig.truth) {
    svg.label(x, "truth");
    for (const auto& t : fig.truth->sorted()) {
      svg.rect(x, kColumn, t.span.start, t.span.end, detail::label_color(t.label));
    }
    x += kColumn + kGroupGap;
  }
  return svg.finish(std::max(x, 60.0));
}

}  // namespace stylesplit
