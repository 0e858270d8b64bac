#pragma once

#include <string>
#include <vector>

namespace bohmsemi::io {

struct Series {
    std::vector<double> x, y;
    bool highlight = false;
    std::string label;
};

/// Line plot with a fixed data window. Output depends only on the inputs.
struct SvgPlot {
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
    std::vector<Series> series;

    /// Window spanning all series with a small margin.
    void fit();
    std::string render() const;
    void write(const std::string& path) const;
};

}  // namespace bohmsemi::io
