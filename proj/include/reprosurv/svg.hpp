#pragma once

// Minimal self-contained SVG rendering for the report figures. Each mark
// carries a <title> holding the CSV strings it was drawn from, so plots stay
// views of the exported tables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace reprosurv::svg {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

/// Linear map from data range to pixel range.
struct Scale {
  double lo = 0.0, hi = 1.0, px_lo = 0.0, px_hi = 1.0;

  static Scale fit(double lo, double hi, double px_lo, double px_hi) {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    return {lo, hi, px_lo, px_hi};
  }
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

class Canvas {
 public:
  Canvas(double width, double height) : width_(width), height_(height) {}

  static constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

  double plot_left() const { return kLeft; }
  double plot_right() const { return width_ - kRight; }
  double plot_top() const { return kTop; }
  double plot_bottom() const { return height_ - kBottom; }

  void raw(const std::string& element) { body_ << element << '\n'; }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke = "#333") {
    body_ << "<line x1=\"" << fixed(x1) << "\" y1=\"" << fixed(y1) << "\" x2=\"" << fixed(x2) << "\" y2=\"" << fixed(y2)
          << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, std::string_view s, const std::string& anchor = "middle", int size = 12,
            double rotate = 0.0) {
    body_ << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" font-size=\"" << size
          << "\" text-anchor=\"" << anchor << "\"";
    if (rotate != 0.0) body_ << " transform=\"rotate(" << fixed(rotate) << ' ' << fixed(x) << ' ' << fixed(y) << ")\"";
    body_ << ">" << escape(s) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& title) {
    body_ << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(w) << "\" height=\""
          << fixed(h) << "\" fill=\"" << fill << "\" stroke=\"#fff\"><title>" << escape(title) << "</title></rect>\n";
  }

  void circle(double x, double y, double r, const std::string& fill, const std::string& title) {
    body_ << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"" << fixed(r) << "\" fill=\"" << fill
          << "\" fill-opacity=\"0.8\"><title>" << escape(title) << "</title></circle>\n";
  }

  void path(const std::vector<std::pair<double, double>>& points, const std::string& stroke, const std::string& title) {
    body_ << "<path fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" d=\"";
    for (std::size_t k = 0; k < points.size(); ++k) {
      body_ << (k ? " L" : "M") << fixed(points[k].first) << ',' << fixed(points[k].second);
    }
    body_ << "\"><title>" << escape(title) << "</title></path>\n";
  }

  void axes(const Scale& x, const Scale& y, std::string_view x_label, std::string_view y_label, std::string_view title) {
    line(plot_left(), plot_bottom(), plot_right(), plot_bottom());
    line(plot_left(), plot_top(), plot_left(), plot_bottom());
    for (int k = 0; k <= 4; ++k) {
      const double xv = x.lo + (x.hi - x.lo) * k / 4.0;
      const double yv = y.lo + (y.hi - y.lo) * k / 4.0;
      line(x(xv), plot_bottom(), x(xv), plot_bottom() + 4);
      text(x(xv), plot_bottom() + 16, tick(xv), "middle", 10);
      line(plot_left() - 4, y(yv), plot_left(), y(yv));
      text(plot_left() - 6, y(yv) + 3, tick(yv), "end", 10);
    }
    text((plot_left() + plot_right()) / 2, height_ - 12, x_label);
    text(16, (plot_top() + plot_bottom()) / 2, y_label, "middle", 12, -90);
    text(width_ / 2, 22, title, "middle", 14);
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width_) << "\" height=\"" << fixed(height_)
        << "\" viewBox=\"0 0 " << fixed(width_) << ' ' << fixed(height_) << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  static std::string tick(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3g", v);
    return buffer;
  }

  double width_, height_;
  std::ostringstream body_;
};

/// Blue-to-red ramp for t in [0, 1].
inline std::string ramp(double t) {
  if (!std::isfinite(t)) return "#999999";
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(30 + 225 * t));
  const int g = static_cast<int>(std::lround(136 - 106 * t));
  const int b = static_cast<int>(std::lround(229 - 149 * t));
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
  return buffer;
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors;
}

struct Bin {
  double lo = 0, hi = 0, count = 0;
  std::string label;  // CSV strings of the bin row
};

inline std::string histogram(const std::vector<Bin>& bins, std::string_view title, std::string_view x_label) {
  Canvas canvas(640, 400);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, top = 1.0;
  for (const auto& b : bins) {
    lo = std::min(lo, b.lo);
    hi = std::max(hi, b.hi);
    top = std::max(top, b.count);
  }
  if (bins.empty()) lo = 0, hi = 1;
  const Scale x = Scale::fit(lo, hi, canvas.plot_left(), canvas.plot_right());
  const Scale y = Scale::fit(0, top, canvas.plot_bottom(), canvas.plot_top());
  canvas.axes(x, y, x_label, "count", title);
  for (const auto& b : bins) {
    canvas.rect(x(b.lo), y(b.count), x(b.hi) - x(b.lo), y(0) - y(b.count), "#4c78a8", b.label);
  }
  return canvas.str();
}

struct Curve {
  std::string name;
  std::vector<double> times, survival;
  std::vector<std::string> labels;  // CSV strings per step
};

/// Right-continuous survival steps starting at S(0) = 1.
inline std::string step_curves(const std::vector<Curve>& curves, std::string_view title) {
  Canvas canvas(640, 420);
  double t_max = 1.0;
  for (const auto& c : curves) {
    if (!c.times.empty()) t_max = std::max(t_max, c.times.back());
  }
  const Scale x = Scale::fit(0, t_max, canvas.plot_left(), canvas.plot_right() - 120);
  const Scale y = Scale::fit(0, 1, canvas.plot_bottom(), canvas.plot_top());
  canvas.axes(x, y, "days", "fraction not yet reproduced", title);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    const std::string& color = palette()[c % palette().size()];
    std::vector<std::pair<double, double>> pts{{x(0), y(1)}};
    double s = 1.0;
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
      pts.emplace_back(x(curve.times[k]), y(s));
      s = curve.survival[k];
      pts.emplace_back(x(curve.times[k]), y(s));
    }
    pts.emplace_back(x(t_max), y(s));
    std::string title_text = curve.name;
    for (const auto& l : curve.labels) title_text += "\n" + l;
    canvas.path(pts, color, title_text);
    const double ly = canvas.plot_top() + 18.0 * static_cast<double>(c);
    canvas.line(canvas.plot_right() - 110, ly, canvas.plot_right() - 90, ly, color);
    canvas.text(canvas.plot_right() - 86, ly + 4, curve.name, "start", 11);
  }
  return canvas.str();
}

struct Point {
  double x = 0, y = 0, color = std::numeric_limits<double>::quiet_NaN();
  std::string label;
};

/// Beeswarm-style summary: one row per feature, points at their SHAP value,
/// coloured by the feature value scaled to that feature's range.
inline std::string shap_summary(const std::vector<std::pair<std::string, std::vector<Point>>>& rows,
                                std::string_view title) {
  const double row_height = 22.0;
  Canvas canvas(720, Canvas::kTop + Canvas::kBottom + row_height * static_cast<double>(std::max<std::size_t>(rows.size(), 1)));
  double lo = 0, hi = 0;
  for (const auto& [name, pts] : rows) {
    for (const auto& p : pts) lo = std::min(lo, p.x), hi = std::max(hi, p.x);
  }
  const Scale x = Scale::fit(lo, hi, canvas.plot_left() + 200, canvas.plot_right());
  canvas.line(x(0), canvas.plot_top(), x(0), canvas.plot_bottom(), "#bbb");
  canvas.line(canvas.plot_left() + 200, canvas.plot_bottom(), canvas.plot_right(), canvas.plot_bottom());
  canvas.text((canvas.plot_left() + 200 + canvas.plot_right()) / 2, canvas.plot_bottom() + 30, "SHAP value (log-hazard)");
  canvas.text(360, 22, title, "middle", 14);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [name, pts] = rows[r];
    const double cy = canvas.plot_top() + row_height * (static_cast<double>(r) + 0.5);
    canvas.text(canvas.plot_left() + 190, cy + 4, name, "end", 11);
    double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
    for (const auto& p : pts) {
      if (std::isfinite(p.color)) vlo = std::min(vlo, p.color), vhi = std::max(vhi, p.color);
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double jitter = (static_cast<double>((k * 7919) % 11) - 5.0) * 1.2;
      const double t = vhi > vlo ? (pts[k].color - vlo) / (vhi - vlo) : 0.5;
      canvas.circle(x(pts[k].x), cy + jitter, 2.5, ramp(t), pts[k].label);
    }
  }
  return canvas.str();
}

inline std::string scatter(const std::vector<Point>& pts, std::string_view x_label, std::string_view y_label,
                           std::string_view color_label, std::string_view title) {
  Canvas canvas(640, 420);
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = 0, yhi = 0;
  double clo = xlo, chi = -xlo;
  for (const auto& p : pts) {
    xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y), yhi = std::max(yhi, p.y);
    if (std::isfinite(p.color)) clo = std::min(clo, p.color), chi = std::max(chi, p.color);
  }
  if (pts.empty()) xlo = 0, xhi = 1;
  const Scale x = Scale::fit(xlo, xhi, canvas.plot_left(), canvas.plot_right() - 40);
  const Scale y = Scale::fit(ylo, yhi, canvas.plot_bottom(), canvas.plot_top());
  canvas.axes(x, y, x_label, y_label, title);
  canvas.text(canvas.plot_right() - 10, canvas.plot_top() - 8, color_label, "end", 10);
  for (const auto& p : pts) {
    const double t = chi > clo ? (p.color - clo) / (chi - clo) : 0.5;
    canvas.circle(x(p.x), y(p.y), 3, ramp(t), p.label);
  }
  return canvas.str();
}

}  // namespace reprosurv::svg
