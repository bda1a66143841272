#pragma once

#include <string>
#include <utility>
#include <vector>

namespace taunet {

/// Minimal deterministic SVG builder for the chart outputs.
class SvgDocument {
public:
    SvgDocument(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width);
    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                  double stroke_width);
    /// anchor: "start", "middle" or "end".
    void text(double x, double y, const std::string& content, double font_size,
              const std::string& anchor = "start");

    std::string str() const;

private:
    double width_, height_;
    std::string body_;
};

/// Distinct stroke color for the i-th series (cycled palette).
std::string series_color(std::size_t index);

/// Sequential colormap for t in [0,1], dark to bright.
std::string heat_color(double t);

}  // namespace taunet
