#include "kaczmarz/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v, int digits = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string short_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char ch : s)
    {
        switch (ch)
        {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, bool log_y)
{
    if (series.empty())
        throw InvalidInput("render_svg: no series");

    double k_max = 0.0;
    double min_positive = std::numeric_limits<double>::infinity();
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();
    for (const PlotSeries& s : series)
    {
        if (s.records.empty())
            throw InvalidInput("render_svg: series '" + s.label + "' is empty");
        for (const TraceRecord& r : s.records)
        {
            k_max = std::max(k_max, static_cast<double>(r.k));
            if (r.error_sq > 0.0)
                min_positive = std::min(min_positive, r.error_sq);
        }
    }
    if (log_y && !std::isfinite(min_positive))
        min_positive = 1.0;

    auto transform = [&](double v) {
        if (!log_y)
            return v;
        return std::log10(v > 0.0 ? v : min_positive);
    };
    for (const PlotSeries& s : series)
        for (const TraceRecord& r : s.records)
        {
            const double t = transform(r.error_sq);
            y_lo = std::min(y_lo, t);
            y_hi = std::max(y_hi, t);
        }
    if (y_hi - y_lo <= 0.0)
    {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    if (k_max <= 0.0)
        k_max = 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double k) { return kLeft + k / k_max * plot_w; };
    auto py = [&](double t) { return kTop + (y_hi - t) / (y_hi - y_lo) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
           fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth, 0) + "\" height=\"" + fixed(kHeight, 0) +
           "\" fill=\"white\"/>\n";
    svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
           fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    // axis ticks: 5 intervals each way
    for (int t = 0; t <= 5; ++t)
    {
        const double k = k_max * t / 5.0;
        const double x = px(k);
        svg += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(kTop + plot_h + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + short_number(k) + "</text>\n";
        const double yv = y_lo + (y_hi - y_lo) * t / 5.0;
        const std::string label = log_y ? "1e" + short_number(yv) : short_number(yv);
        svg += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(yv) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + label + "</text>\n";
    }
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 15) +
           "\" font-size=\"13\" text-anchor=\"middle\">k</text>\n";
    svg += "<text x=\"18\" y=\"" + fixed(kTop + plot_h / 2) + "\" font-size=\"13\" text-anchor=\"middle\" " +
           "transform=\"rotate(-90 18 " + fixed(kTop + plot_h / 2) + ")\">" +
           (log_y ? "error_sq (log scale)" : "error_sq") + "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s)
    {
        const char* color = kColors[s % kColors.size()];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const TraceRecord& r : series[s].records)
        {
            if (!first)
                svg += ' ';
            first = false;
            svg += fixed(px(static_cast<double>(r.k))) + "," + fixed(py(transform(r.error_sq)));
        }
        svg += "\"/>\n";
    }

    svg += "<g class=\"legend\">\n";
    for (std::size_t s = 0; s < series.size(); ++s)
    {
        const double y = kTop + 15.0 + 20.0 * static_cast<double>(s);
        const double x = kLeft + plot_w + 15.0;
        svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(x + 25) + "\" y2=\"" + fixed(y) +
               "\" stroke=\"" + kColors[s % kColors.size()] + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed(x + 32) + "\" y=\"" + fixed(y + 4) + "\" font-size=\"12\">" +
               xml_escape(series[s].label) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace kaczmarz
