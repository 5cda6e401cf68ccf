#pragma once

#include <string>
#include <vector>

#include "kaczmarz/trace.hpp"

namespace kaczmarz {

struct PlotSeries
{
    std::string label;
    std::vector<TraceRecord> records;
};

/// Self-contained SVG line chart of error_sq against k, one polyline per
/// series and a legend entry per label. With `log_y`, nonpositive values are
/// clamped to the smallest positive value plotted. Throws InvalidInput on an
/// empty series.
std::string render_svg(const std::vector<PlotSeries>& series, bool log_y);

}  // namespace kaczmarz
