#pragma once

#include <span>
#include <string>

#include "pulab/experiment.hpp"

namespace pulab {

struct PlotOptions {
  std::string title = "steps to threshold";
  int width = 640;
  int height = 420;
};

/// Median steps-to-threshold against the learning rate on log-log axes, one
/// polyline per rule. Cells whose median is censored are drawn as open markers
/// on the top axis. Throws std::invalid_argument on an empty summary.
std::string render_plot(std::span<const SummaryRow> summary, const PlotOptions& options = {});

/// Writes render_plot to `path`; throws std::runtime_error when the file cannot be written.
void emit_plot(std::span<const SummaryRow> summary, const std::string& path, const PlotOptions& options = {});

}  // namespace pulab
