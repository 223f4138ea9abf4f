#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace iu::svg {

// One curve; when band is set, [ylo, yhi] is shaded behind the line.
struct Series {
    std::string label;
    std::string color = "#1f6fb4";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> ylo;
    std::vector<double> yhi;
    bool band = false;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series,
                      std::optional<double> ymin = std::nullopt,
                      std::optional<double> ymax = std::nullopt);

// Paths in arena coordinates, drawn inside a square of the given side.
struct XyPath {
    std::string label;
    std::string color = "#000000";
    double width = 1.5;
    std::vector<Eigen::Vector2d> points;
};

struct Disc {
    Eigen::Vector2d center;
    double radius;
    std::string color = "#f4a640";
};

void write_xy_chart(const std::string& path, const std::string& title, double side,
                    const std::vector<XyPath>& paths, const std::vector<Disc>& discs);

}  // namespace iu::svg
