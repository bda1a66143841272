#include "taunet/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "taunet/util.hpp"

namespace taunet {

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    return format_double(v, 6);
}

}  // namespace

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, const std::string& fill) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgDocument::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                       double stroke_width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) +
             "\"/>\n";
}

void SvgDocument::polyline(const std::vector<std::pair<double, double>>& points,
                           const std::string& stroke, double stroke_width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(points[i].first) + "," + num(points[i].second);
    }
    body_ += "\"/>\n";
}

void SvgDocument::text(double x, double y, const std::string& content, double font_size,
                       const std::string& anchor) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(font_size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" +
             xml_escape(content) + "</text>\n";
}

std::string SvgDocument::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
           num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"white\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

std::string series_color(std::size_t index) {
    static const std::array<const char*, 12> palette = {
        "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#98df8a",
    };
    return palette[index % palette.size()];
}

std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // Piecewise-linear ramp through dark blue, teal, green, yellow.
    static const std::array<std::array<double, 3>, 4> stops = {{
        {68, 1, 84},
        {49, 104, 142},
        {53, 183, 121},
        {253, 231, 37},
    }};
    const double pos = t * (stops.size() - 1);
    const std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(pos), stops.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    char buf[8];
    std::string out = "#";
    for (int c = 0; c < 3; ++c) {
        const int v = static_cast<int>(std::lround(stops[lo][static_cast<std::size_t>(c)] +
                                                   frac * (stops[lo + 1][static_cast<std::size_t>(c)] -
                                                           stops[lo][static_cast<std::size_t>(c)])));
        std::snprintf(buf, sizeof(buf), "%02x", std::clamp(v, 0, 255));
        out += buf;
    }
    return out;
}

}  // namespace taunet
