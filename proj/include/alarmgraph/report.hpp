#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "alarmgraph/ahc.hpp"
#include "alarmgraph/errors.hpp"

namespace alarmgraph {

// Minimal static SVG renderers for the three analysis figures: similarity
// heat map, dendrogram, and 2-D cluster scatter. Coordinates are rounded to
// 0.01 px; no external renderer is involved.

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

}  // namespace svg

/// Heat map of a square similarity matrix; brighter cells mean more similar.
/// One <rect> per matrix cell.
inline std::string svg_heatmap(const std::vector<std::string>& labels,
                               const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  if (n != s.cols() || static_cast<std::size_t>(n) != labels.size())
    throw error(errc::shape_mismatch, "heat map needs a square labeled matrix");

  double lo = s.minCoeff(), hi = s.maxCoeff();
  if (hi <= lo) hi = lo + 1.0;

  const double cell = 18.0, margin = 110.0;
  const double size = margin + cell * static_cast<double>(n) + 10.0;
  std::string out = svg::header(size, size);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      int lum = static_cast<int>(std::lround(255.0 * (s(i, j) - lo) / (hi - lo)));
      lum = std::clamp(lum, 0, 255);
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", lum, lum, lum);
      out += "<rect x=\"" + svg::num(margin + cell * static_cast<double>(j)) + "\" y=\"" +
             svg::num(margin + cell * static_cast<double>(i)) + "\" width=\"" + svg::num(cell) +
             "\" height=\"" + svg::num(cell) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string& l = labels[static_cast<std::size_t>(i)];
    double c = margin + cell * (static_cast<double>(i) + 0.5);
    out += "<text x=\"" + svg::num(margin - 6.0) + "\" y=\"" + svg::num(c + 4.0) +
           "\" font-size=\"10\" text-anchor=\"end\">" + svg::escape_text(l) + "</text>\n";
    out += "<text x=\"" + svg::num(c) + "\" y=\"" + svg::num(margin - 6.0) +
           "\" font-size=\"10\" text-anchor=\"start\" transform=\"rotate(-60 " + svg::num(c) +
           " " + svg::num(margin - 6.0) + ")\">" + svg::escape_text(l) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

/// Dendrogram drawn with leaves along the x axis and merge height on y.
inline std::string svg_dendrogram(const std::vector<std::string>& labels,
                                  const Dendrogram& dendro) {
  const std::size_t h = dendro.leaves;
  if (labels.size() != h) throw error(errc::shape_mismatch, "label count != leaf count");

  // Leaf order by tree traversal so branches do not cross.
  std::vector<std::vector<int>> children(2 * h - 1);
  for (std::size_t m = 0; m < dendro.merges.size(); ++m) {
    children[h + m] = {dendro.merges[m].left, dendro.merges[m].right};
  }
  std::vector<int> order;
  order.reserve(h);
  std::function<void(int)> walk = [&](int node) {
    if (children[static_cast<std::size_t>(node)].empty()) {
      order.push_back(node);
      return;
    }
    for (int c : children[static_cast<std::size_t>(node)]) walk(c);
  };
  if (!dendro.merges.empty()) walk(static_cast<int>(2 * h - 2));
  else order.push_back(0);

  const double step = 26.0, top = 30.0, plot_h = 320.0, bottom_margin = 110.0, left = 50.0;
  double max_height = 0.0;
  for (const auto& m : dendro.merges) max_height = std::max(max_height, m.height);
  if (max_height <= 0.0) max_height = 1.0;

  std::vector<double> x(2 * h - 1, 0.0), y(2 * h - 1, top + plot_h);
  for (std::size_t i = 0; i < order.size(); ++i)
    x[static_cast<std::size_t>(order[i])] = left + step * (static_cast<double>(i) + 0.5);

  std::string out =
      svg::header(left + step * static_cast<double>(h) + 40.0, top + plot_h + bottom_margin);
  auto line = [&](double x1, double y1, double x2, double y2) {
    out += "<line x1=\"" + svg::num(x1) + "\" y1=\"" + svg::num(y1) + "\" x2=\"" + svg::num(x2) +
           "\" y2=\"" + svg::num(y2) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  };
  for (std::size_t m = 0; m < dendro.merges.size(); ++m) {
    const Merge& mg = dendro.merges[m];
    std::size_t id = h + m;
    double yy = top + plot_h * (1.0 - mg.height / max_height);
    double xl = x[static_cast<std::size_t>(mg.left)];
    double xr = x[static_cast<std::size_t>(mg.right)];
    line(xl, y[static_cast<std::size_t>(mg.left)], xl, yy);
    line(xr, y[static_cast<std::size_t>(mg.right)], xr, yy);
    line(xl, yy, xr, yy);
    x[id] = (xl + xr) / 2.0;
    y[id] = yy;
  }
  for (std::size_t i = 0; i < h; ++i) {
    double xx = x[i];
    out += "<text x=\"" + svg::num(xx) + "\" y=\"" + svg::num(top + plot_h + 12.0) +
           "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-60 " + svg::num(xx) + " " +
           svg::num(top + plot_h + 12.0) + ")\">" + svg::escape_text(labels[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

/// 2-D scatter of projected tags colored by cluster id.
inline std::string svg_scatter(const std::vector<std::string>& labels, const Eigen::MatrixXd& xy,
                               const std::vector<int>& clusters) {
  if (xy.cols() < 2 || static_cast<std::size_t>(xy.rows()) != labels.size() ||
      labels.size() != clusters.size())
    throw error(errc::shape_mismatch, "scatter needs matching labels, 2-D points, clusters");

  static const char* palette[] = {"#1f77b4", "#2ca02c", "#ffbf00", "#9467bd", "#d62728",
                                  "#17becf", "#e377c2", "#8c564b", "#7f7f7f", "#bcbd22"};
  const double w = 640.0, hgt = 480.0, pad = 50.0;
  double xlo = xy.col(0).minCoeff(), xhi = xy.col(0).maxCoeff();
  double ylo = xy.col(1).minCoeff(), yhi = xy.col(1).maxCoeff();
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + 1.0;

  std::string out = svg::header(w, hgt);
  for (Eigen::Index i = 0; i < xy.rows(); ++i) {
    double px = pad + (w - 2 * pad) * (xy(i, 0) - xlo) / (xhi - xlo);
    double py = hgt - pad - (hgt - 2 * pad) * (xy(i, 1) - ylo) / (yhi - ylo);
    const char* color = palette[static_cast<std::size_t>(clusters[static_cast<std::size_t>(i)]) %
                                (sizeof palette / sizeof palette[0])];
    out += "<circle cx=\"" + svg::num(px) + "\" cy=\"" + svg::num(py) +
           "\" r=\"4\" fill=\"" + std::string(color) + "\"/>\n";
    out += "<text x=\"" + svg::num(px + 6.0) + "\" y=\"" + svg::num(py + 3.0) +
           "\" font-size=\"9\">" + svg::escape_text(labels[static_cast<std::size_t>(i)]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace alarmgraph
