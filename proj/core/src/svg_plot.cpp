#include "pulab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pulab/records_csv.hpp"

namespace pulab {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool median_censored(const SummaryRow& row) { return row.censored_fraction >= 0.5; }

struct LogAxis {
  double lo = 0.0;  // decades
  double hi = 1.0;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double operator()(double value) const {
    const double t = (std::log10(value) - lo) / (hi - lo);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

LogAxis make_axis(double min_value, double max_value, double pixel_lo, double pixel_hi) {
  double lo = std::floor(std::log10(min_value));
  double hi = std::ceil(std::log10(max_value));
  if (hi <= lo) hi = lo + 1.0;
  return {lo, hi, pixel_lo, pixel_hi};
}

std::string fmt(double x) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << x;
  return out.str();
}

}  // namespace

std::string render_plot(std::span<const SummaryRow> summary, const PlotOptions& options) {
  if (summary.empty()) throw std::invalid_argument("cannot plot an empty summary");

  std::vector<std::string> rules;
  std::map<std::string, std::vector<const SummaryRow*>> by_rule;
  double eta_min = INFINITY, eta_max = 0.0, steps_min = INFINITY, steps_max = 0.0;
  for (const auto& row : summary) {
    if (!(row.eta > 0.0)) throw std::invalid_argument("plot needs positive learning rates");
    if (!by_rule.count(row.rule)) rules.push_back(row.rule);
    by_rule[row.rule].push_back(&row);
    eta_min = std::min(eta_min, row.eta);
    eta_max = std::max(eta_max, row.eta);
    const double m = std::max(row.median, 1.0);
    steps_min = std::min(steps_min, m);
    steps_max = std::max(steps_max, std::max(m, static_cast<double>(row.max_steps)));
  }

  const double left = 70, right = options.width - 120.0, top = 40, bottom = options.height - 50.0;
  const LogAxis x = make_axis(eta_min, eta_max, left, right);
  const LogAxis y = make_axis(steps_min, steps_max, bottom, top);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(options.title) << "</text>\n";

  // Frame, decade grid and labels.
  svg << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (double d = x.lo; d <= x.hi + 1e-9; d += 1.0) {
    const double px = x(std::pow(10.0, d));
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(bottom)
        << "\"/>\n";
  }
  for (double d = y.lo; d <= y.hi + 1e-9; d += 1.0) {
    const double py = y(std::pow(10.0, d));
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(py)
        << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left) << "\" height=\""
      << fmt(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = x.lo; d <= x.hi + 1e-9; d += 1.0)
    svg << "<text x=\"" << fmt(x(std::pow(10.0, d))) << "\" y=\"" << fmt(bottom + 16)
        << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
  for (double d = y.lo; d <= y.hi + 1e-9; d += 1.0)
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y(std::pow(10.0, d)) + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 36)
      << "\" text-anchor=\"middle\">learning rate</text>\n";
  svg << "<text transform=\"translate(18 " << fmt((top + bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">median steps</text>\n";

  for (std::size_t k = 0; k < rules.size(); ++k) {
    const std::string color = kPalette[k % std::size(kPalette)];
    auto rows = by_rule[rules[k]];
    std::sort(rows.begin(), rows.end(), [](const SummaryRow* a, const SummaryRow* b) { return a->eta < b->eta; });
    svg << "<g class=\"rule\" data-rule=\"" << escape(rules[k]) << "\">\n<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double py = median_censored(*rows[i]) ? top : y(std::max(rows[i]->median, 1.0));
      svg << (i ? " " : "") << fmt(x(rows[i]->eta)) << ',' << fmt(py);
    }
    svg << "\"/>\n";
    for (const auto* row : rows) {
      const bool open = median_censored(*row);
      const double py = open ? top : y(std::max(row->median, 1.0));
      svg << "<circle cx=\"" << fmt(x(row->eta)) << "\" cy=\"" << fmt(py) << "\" r=\"4\" stroke=\"" << color
          << "\" fill=\"" << (open ? "white" : color) << "\"/>\n";
    }
    svg << "</g>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fmt(right + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(right + 36) << "\" y2=\""
        << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(right + 42) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(rules[k]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(std::span<const SummaryRow> summary, const std::string& path, const PlotOptions& options) {
  const std::string text = render_plot(summary, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot to '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing plot to '" + path + "'");
}

}  // namespace pulab
