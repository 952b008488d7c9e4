#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "cei/harness.hpp"

namespace cei {

namespace {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

std::string fmt(double v) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 6);
  return std::string(buf.data(), res.ptr);
}

class SvgCanvas {
 public:
  SvgCanvas(double x_min, double x_max, double y_min, double y_max)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (x_max_ - x_min_ < 1e-12) x_max_ = x_min_ + 1.0;
    if (y_max_ - y_min_ < 1e-12) {
      y_min_ -= 0.5;
      y_max_ += 0.5;
    }
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
        << "\">\n"
        << "<rect width=\"" << kW << "\" height=\"" << kH
        << "\" fill=\"white\"/>\n";
  }

  double px(double x) const {
    return kMarginL + (x - x_min_) / (x_max_ - x_min_) * plot_w();
  }
  double py(double y) const {
    return kH - kMarginB - (y - y_min_) / (y_max_ - y_min_) * plot_h();
  }

  void polyline(const Series& s, const std::string& stroke, bool dashed) {
    if (s.x.empty()) return;
    os_ << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\"";
    if (dashed) os_ << " stroke-dasharray=\"6 4\"";
    os_ << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i > 0) os_ << ' ';
      os_ << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
    }
    os_ << "\"/>\n";
  }

  void axes(const std::string& x_label, const std::string& y_label) {
    os_ << "<line x1=\"" << kMarginL << "\" y1=\"" << kH - kMarginB
        << "\" x2=\"" << kW - kMarginR << "\" y2=\"" << kH - kMarginB
        << "\" stroke=\"black\"/>\n";
    os_ << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\""
        << kMarginL << "\" y2=\"" << kH - kMarginB << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_min_ + (x_max_ - x_min_) * i / 4.0;
      const double yv = y_min_ + (y_max_ - y_min_) * i / 4.0;
      os_ << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << kH - kMarginB
          << "\" x2=\"" << fmt(px(xv)) << "\" y2=\"" << kH - kMarginB + 5
          << "\" stroke=\"black\"/>\n";
      os_ << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << kH - kMarginB + 18
          << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv)
          << "</text>\n";
      os_ << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << fmt(py(yv))
          << "\" x2=\"" << kMarginL << "\" y2=\"" << fmt(py(yv))
          << "\" stroke=\"black\"/>\n";
      os_ << "<text x=\"" << kMarginL - 8 << "\" y=\"" << fmt(py(yv) + 4)
          << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv)
          << "</text>\n";
    }
    os_ << "<text x=\"" << (kMarginL + kW - kMarginR) / 2 << "\" y=\""
        << kH - 8 << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    os_ << "<text x=\"14\" y=\"" << (kMarginT + kH - kMarginB) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
           "14 "
        << (kMarginT + kH - kMarginB) / 2 << ")\">" << y_label << "</text>\n";
  }

  void note(const std::string& text) {
    os_ << "<text x=\"" << kW - kMarginR << "\" y=\"" << kMarginT + 12
        << "\" font-size=\"11\" text-anchor=\"end\">" << text << "</text>\n";
  }

  void legend() {
    const double x = kMarginL + 10;
    os_ << "<line x1=\"" << x << "\" y1=\"" << kMarginT + 10 << "\" x2=\""
        << x + 30 << "\" y2=\"" << kMarginT + 10
        << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << x + 36 << "\" y=\"" << kMarginT + 14
        << "\" font-size=\"11\">median</text>\n"
        << "<line x1=\"" << x << "\" y1=\"" << kMarginT + 26 << "\" x2=\""
        << x + 30 << "\" y2=\"" << kMarginT + 26
        << "\" stroke=\"gray\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6 4\"/>\n"
        << "<text x=\"" << x + 36 << "\" y=\"" << kMarginT + 30
        << "\" font-size=\"11\">q25 / q75</text>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  static constexpr int kW = 720;
  static constexpr int kH = 480;
  static constexpr int kMarginL = 70;
  static constexpr int kMarginR = 20;
  static constexpr int kMarginT = 20;
  static constexpr int kMarginB = 50;
  double plot_w() const { return kW - kMarginL - kMarginR; }
  double plot_h() const { return kH - kMarginT - kMarginB; }

  double x_min_, x_max_, y_min_, y_max_;
  std::ostringstream os_;
};

// Quartile curves may dip nonpositive even when the median stays positive;
// in log-log mode each contiguous positive run becomes its own segment.
std::vector<Series> positive_segments(const std::vector<SummaryRow>& rows,
                                      double SummaryRow::*field) {
  std::vector<Series> segments;
  Series current;
  for (const auto& r : rows) {
    const double v = r.*field;
    if (r.n >= 1 && v > 0.0) {
      current.x.push_back(std::log10(static_cast<double>(r.t)));
      current.y.push_back(std::log10(v));
    } else if (!current.x.empty()) {
      segments.push_back(std::move(current));
      current = {};
    }
  }
  if (!current.x.empty()) segments.push_back(std::move(current));
  return segments;
}

}  // namespace

std::string emit_plot_svg(const std::vector<SummaryRow>& summary,
                          PlotStyle style) {
  std::vector<SummaryRow> rows;
  for (const auto& r : summary) {
    if (r.n >= 1) rows.push_back(r);
  }
  require(!rows.empty(), "emit_plot_svg: no contributing trials");

  if (style == PlotStyle::RegretLinear) {
    double x_min = rows.front().t, x_max = rows.back().t;
    double y_min = rows.front().q25, y_max = rows.front().q75;
    for (const auto& r : rows) {
      y_min = std::min(y_min, r.q25);
      y_max = std::max(y_max, r.q75);
    }
    SvgCanvas canvas(x_min, x_max, y_min, y_max);
    Series med, lo, hi;
    for (const auto& r : rows) {
      med.x.push_back(r.t);
      med.y.push_back(r.q50);
      lo.x.push_back(r.t);
      lo.y.push_back(r.q25);
      hi.x.push_back(r.t);
      hi.y.push_back(r.q75);
    }
    canvas.axes("iteration", "simple regret");
    canvas.polyline(lo, "gray", true);
    canvas.polyline(hi, "gray", true);
    canvas.polyline(med, "steelblue", false);
    canvas.legend();
    return canvas.finish();
  }

  // log-log
  std::vector<SummaryRow> kept;
  int dropped = 0;
  for (const auto& r : rows) {
    if (r.q50 > 0.0) {
      kept.push_back(r);
    } else {
      ++dropped;
    }
  }
  if (kept.empty()) {
    throw InvalidInput(
        "emit_plot_svg: every median regret is <= 0, nothing to draw on a "
        "log-log scale; use the regret_linear style instead");
  }
  double x_min = std::log10(static_cast<double>(kept.front().t));
  double x_max = std::log10(static_cast<double>(kept.back().t));
  double y_min = std::log10(kept.front().q50);
  double y_max = y_min;
  Series med;
  for (const auto& r : kept) {
    const double lx = std::log10(static_cast<double>(r.t));
    const double ly = std::log10(r.q50);
    med.x.push_back(lx);
    med.y.push_back(ly);
    y_min = std::min(y_min, ly);
    y_max = std::max(y_max, ly);
  }
  auto lo_segments = positive_segments(kept, &SummaryRow::q25);
  auto hi_segments = positive_segments(kept, &SummaryRow::q75);
  for (const auto& segs : {lo_segments, hi_segments}) {
    for (const auto& s : segs) {
      for (double v : s.y) {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  }
  SvgCanvas canvas(x_min, x_max, y_min, y_max);
  canvas.axes("log10 iteration", "log10 simple regret");
  for (const auto& s : lo_segments) canvas.polyline(s, "gray", true);
  for (const auto& s : hi_segments) canvas.polyline(s, "gray", true);
  canvas.polyline(med, "steelblue", false);
  canvas.legend();
  if (dropped > 0) {
    canvas.note("dropped " + std::to_string(dropped) +
                " nonpositive median(s)");
  }
  return canvas.finish();
}

std::string emit_plots(const RunResult& result, PlotStyle style) {
  return emit_plot_svg(result.summary, style);
}

}  // namespace cei
