#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eigenlocal/geometry.hpp"
#include "eigenlocal/mesh.hpp"
#include "eigenlocal/sweep.hpp"

namespace eigenlocal {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

std::string to_hex(Rgb c);

/// Diverging map on [-vmax, vmax]: near-white at zero, reds for positive
/// values, the red/blue mirror image for negative ones.
class ColorMap {
public:
    struct Stop {
        double t;
        Rgb color;
    };

    ColorMap();
    explicit ColorMap(std::vector<Stop> positive_side);

    Rgb operator()(double value, double vmax) const;
    const std::vector<Stop>& stops() const { return stops_; }

private:
    std::vector<Stop> stops_;
};

/// Per-triangle flat fill of the vertex-average value, vmax = |u|_inf.
std::string render_mode_svg(const Mesh& mesh, const Eigen::VectorXd& u, const std::string& title = "");
void render_mode(const Mesh& mesh, const Eigen::VectorXd& u, const std::filesystem::path& out_path,
                 const std::string& title = "");

/// Fill colour of every triangle in the order they are written.
std::vector<Rgb> triangle_colors(const Mesh& mesh, const Eigen::VectorXd& u);

/// Plot geometry shared by the writer and by tests that check positions.
struct LogLogLayout {
    double width = 640.0, height = 480.0;
    double left = 80.0, right = 30.0, top = 40.0, bottom = 60.0;
    int x_decade_lo = 0, x_decade_hi = 0;
    int y_decade_lo = 0, y_decade_hi = 0;

    double px(double x) const;
    double py(double y) const;
};

LogLogLayout loglog_layout(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit);

std::string render_loglog_svg(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                              const std::string& title = "");
void render_loglog(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                   const std::filesystem::path& out_path, const std::string& title = "");

/// {family}_h{h}_mode{i}_{kind}.svg
std::string svg_filename(DomainFamily family, double h, std::size_t mode, const std::string& kind);

}  // namespace eigenlocal
