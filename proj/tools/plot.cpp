#include <algorithm>
#include <cstdio>
#include <string>

#include "commands.hpp"
#include "io.hpp"

namespace twomix::cli {

namespace {

constexpr double kSize = 640;
constexpr double kMargin = 64;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string render_scatter_svg(const PlotData& data) {
    double limit = 0;
    for (const auto& p : data.points) {
        limit = std::max({limit, p[0], p[1]});
    }
    if (!(limit > 0)) {
        limit = 1;
    }
    limit *= 1.05;

    const double span = kSize - 2 * kMargin;
    auto px = [&](double v) { return kMargin + v / limit * span; };
    auto py = [&](double v) { return kSize - kMargin - v / limit * span; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kSize) + "\" height=\"" + fixed(kSize) +
           "\" viewBox=\"0 0 " + fixed(kSize) + " " + fixed(kSize) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes, ticks and labels.
    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" + fixed(px(limit)) + "\" y2=\"" +
           fixed(py(0)) + "\"/>\n";
    svg += "<line x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" + fixed(px(0)) + "\" y2=\"" +
           fixed(py(limit)) + "\"/>\n";
    svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = limit / 1.05 * t / 5;
        svg += "<text x=\"" + fixed(px(v)) + "\" y=\"" + fixed(py(0) + 16) + "\" text-anchor=\"middle\">" +
               format_double(v) + "</text>\n";
        svg += "<text x=\"" + fixed(px(0) - 6) + "\" y=\"" + fixed(py(v) + 4) + "\" text-anchor=\"end\">" +
               format_double(v) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(kSize / 2) + "\" y=\"" + fixed(kSize - 16) + "\" text-anchor=\"middle\">sample 1</text>\n";
    svg += "<text x=\"16\" y=\"" + fixed(kSize / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fixed(kSize / 2) + ")\">sample 2</text>\n</g>\n";

    // Non-markers first so markers draw on top.
    svg += "<g fill=\"#888888\" fill-opacity=\"0.6\">\n";
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        if (data.marker_source[i] < 0) {
            svg += "<circle cx=\"" + fixed(px(data.points[i][0])) + "\" cy=\"" + fixed(py(data.points[i][1])) +
                   "\" r=\"1.8\"/>\n";
        }
    }
    svg += "</g>\n";
    const char* colors[2] = {"#d62728", "#1f77b4"};
    for (int s = 0; s < 2; ++s) {
        svg += std::string("<g fill=\"") + colors[s] + "\" class=\"markers-source" + std::to_string(s + 1) + "\">\n";
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            if (data.marker_source[i] == s) {
                svg += "<circle cx=\"" + fixed(px(data.points[i][0])) + "\" cy=\"" + fixed(py(data.points[i][1])) +
                       "\" r=\"3.5\"/>\n";
            }
        }
        svg += "</g>\n";
    }

    if (data.rays) {
        for (int s = 0; s < 2; ++s) {
            const auto& ray = (*data.rays)[s];
            const double reach = std::max(ray[0], ray[1]);
            if (!(reach > 0)) {
                continue;
            }
            const double t = limit / reach;
            svg += std::string("<line class=\"radius\" stroke=\"") + colors[s] + "\" stroke-width=\"1.5\" x1=\"" +
                   fixed(px(0)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" + fixed(px(ray[0] * t)) + "\" y2=\"" +
                   fixed(py(ray[1] * t)) + "\"/>\n";
        }
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace twomix::cli
