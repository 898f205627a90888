#include "eigenlocal/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/io.hpp"

namespace eigenlocal {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
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

// Sum ordered by magnitude so that negating all three values negates the result exactly.
double average3(double a, double b, double c) {
    std::array<double, 3> v{a, b, c};
    std::sort(v.begin(), v.end(), [](double p, double q) {
        if (std::abs(p) != std::abs(q)) return std::abs(p) < std::abs(q);
        return p < q;
    });
    return ((v[0] + v[1]) + v[2]) / 3.0;
}

std::string svg_open(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt("%.0f", w) + "\" height=\"" + fmt("%.0f", h) + "\" viewBox=\"0 0 " + fmt("%.0f", w) + " " +
           fmt("%.0f", h) + "\">\n";
}

}  // namespace

std::string to_hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

ColorMap::ColorMap()
    : ColorMap({{0.0, {247, 247, 247}}, {0.33, {244, 165, 130}}, {0.67, {214, 96, 77}}, {1.0, {178, 24, 43}}}) {}

ColorMap::ColorMap(std::vector<Stop> positive_side) : stops_(std::move(positive_side)) {
    if (stops_.size() < 2 || stops_.front().t != 0.0 || stops_.back().t != 1.0) {
        throw ValidationError("colormap stops must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < stops_.size(); ++i)
        if (!(stops_[i].t > stops_[i - 1].t)) throw ValidationError("colormap stops must increase");
}

Rgb ColorMap::operator()(double value, double vmax) const {
    double t = vmax > 0.0 ? std::abs(value) / vmax : 0.0;
    t = std::clamp(std::isfinite(t) ? t : 1.0, 0.0, 1.0);
    std::size_t i = 1;
    while (i + 1 < stops_.size() && t > stops_[i].t) ++i;
    const Stop& a = stops_[i - 1];
    const Stop& b = stops_[i];
    const double s = (t - a.t) / (b.t - a.t);
    auto mix = [&](std::uint8_t p, std::uint8_t q) {
        return static_cast<std::uint8_t>(std::lround(p + s * (static_cast<double>(q) - p)));
    };
    Rgb c{mix(a.color.r, b.color.r), mix(a.color.g, b.color.g), mix(a.color.b, b.color.b)};
    if (value < 0.0) std::swap(c.r, c.b);
    return c;
}

std::vector<Rgb> triangle_colors(const Mesh& mesh, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) != mesh.n_vertices()) {
        throw ContractError("render: vector length differs from vertex count");
    }
    const double vmax = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    const ColorMap cmap;
    std::vector<Rgb> out;
    out.reserve(mesh.n_triangles());
    for (const auto& t : mesh.triangles) {
        const auto ti = [&](int k) { return static_cast<Eigen::Index>(t[k]); };
        out.push_back(cmap(average3(u[ti(0)], u[ti(1)], u[ti(2)]), vmax));
    }
    return out;
}

std::string render_mode_svg(const Mesh& mesh, const Eigen::VectorXd& u, const std::string& title) {
    const std::vector<Rgb> colors = triangle_colors(mesh, u);
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& p : mesh.vertices) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    if (mesh.vertices.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
    const double margin = 10.0, span = 600.0;
    const double scale = span / std::max({x1 - x0, y1 - y0, 1e-300});
    const double w = (x1 - x0) * scale + 2 * margin;
    const double head = title.empty() ? 0.0 : 24.0;
    const double h = (y1 - y0) * scale + 2 * margin + head;

    std::string svg = svg_open(std::ceil(w), std::ceil(h));
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        svg += "<text x=\"" + fmt("%.1f", w / 2) +
               "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
               xml_escape(title) + "</text>\n";
    }
    svg += "<g stroke-width=\"0.3\" stroke-linejoin=\"round\">\n";
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const std::string col = to_hex(colors[t]);
        svg += "<polygon points=\"";
        for (int k = 0; k < 3; ++k) {
            const Point2 p = mesh.vertices[mesh.triangles[t][k]];
            if (k) svg += ' ';
            svg += fmt("%.3f", margin + (p.x - x0) * scale) + "," + fmt("%.3f", head + margin + (y1 - p.y) * scale);
        }
        svg += "\" fill=\"" + col + "\" stroke=\"" + col + "\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void render_mode(const Mesh& mesh, const Eigen::VectorXd& u, const std::filesystem::path& out_path,
                 const std::string& title) {
    write_file_atomic(out_path, render_mode_svg(mesh, u, title));
}

double LogLogLayout::px(double x) const {
    const double t = (std::log10(x) - x_decade_lo) / static_cast<double>(x_decade_hi - x_decade_lo);
    return left + t * (width - left - right);
}

double LogLogLayout::py(double y) const {
    const double t = (std::log10(y) - y_decade_lo) / static_cast<double>(y_decade_hi - y_decade_lo);
    return height - bottom - t * (height - top - bottom);
}

LogLogLayout loglog_layout(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit) {
    if (points.empty()) throw ArityError("log-log plot needs at least one point");
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("log-log plot needs positive points");
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    if (fit.a > 0.0) {
        for (double x : {xlo, xhi}) {
            const double y = fit.a * std::pow(x, fit.b);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    LogLogLayout L;
    L.x_decade_lo = static_cast<int>(std::floor(std::log10(xlo)));
    L.x_decade_hi = std::max(L.x_decade_lo + 1, static_cast<int>(std::ceil(std::log10(xhi))));
    L.y_decade_lo = static_cast<int>(std::floor(std::log10(ylo)));
    L.y_decade_hi = std::max(L.y_decade_lo + 1, static_cast<int>(std::ceil(std::log10(yhi))));
    return L;
}

std::string render_loglog_svg(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                              const std::string& title) {
    const LogLogLayout L = loglog_layout(points, fit);
    const double x0 = L.left, x1 = L.width - L.right, y0 = L.top, y1 = L.height - L.bottom;
    std::string svg = svg_open(L.width, L.height);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        svg += "<text x=\"" + fmt("%.1f", (x0 + x1) / 2) +
               "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">" +
               xml_escape(title) + "</text>\n";
    }
    svg += "<g stroke=\"#bbbbbb\" stroke-width=\"0.5\">\n";
    for (int d = L.x_decade_lo; d <= L.x_decade_hi; ++d) {
        for (int m = 1; m < 10; ++m) {
            if (d == L.x_decade_hi && m > 1) break;
            const double x = L.px(m * std::pow(10.0, d));
            svg += "<line x1=\"" + fmt("%.3f", x) + "\" y1=\"" + fmt("%.3f", y0) + "\" x2=\"" + fmt("%.3f", x) +
                   "\" y2=\"" + fmt("%.3f", y1) + "\"" + (m == 1 ? "" : " stroke-opacity=\"0.4\"") + "/>\n";
        }
    }
    for (int d = L.y_decade_lo; d <= L.y_decade_hi; ++d) {
        const double y = L.py(std::pow(10.0, d));
        svg += "<line x1=\"" + fmt("%.3f", x0) + "\" y1=\"" + fmt("%.3f", y) + "\" x2=\"" + fmt("%.3f", x1) +
               "\" y2=\"" + fmt("%.3f", y) + "\"/>\n";
    }
    svg += "</g>\n";
    svg += "<rect x=\"" + fmt("%.3f", x0) + "\" y=\"" + fmt("%.3f", y0) + "\" width=\"" + fmt("%.3f", x1 - x0) +
           "\" height=\"" + fmt("%.3f", y1 - y0) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int d = L.x_decade_lo; d <= L.x_decade_hi; ++d) {
        svg += "<text x=\"" + fmt("%.3f", L.px(std::pow(10.0, d))) + "\" y=\"" + fmt("%.3f", y1 + 18) +
               "\" text-anchor=\"middle\">1e" + std::to_string(d) + "</text>\n";
    }
    for (int d = L.y_decade_lo; d <= L.y_decade_hi; ++d) {
        svg += "<text x=\"" + fmt("%.3f", x0 - 6) + "\" y=\"" + fmt("%.3f", L.py(std::pow(10.0, d)) + 4) +
               "\" text-anchor=\"end\">1e" + std::to_string(d) + "</text>\n";
    }
    svg += "<text x=\"" + fmt("%.3f", (x0 + x1) / 2) + "\" y=\"" + fmt("%.3f", L.height - 16) +
           "\" text-anchor=\"middle\">h</text>\n</g>\n";

    double xlo = points.front().first, xhi = xlo;
    for (const auto& p : points) xlo = std::min(xlo, p.first), xhi = std::max(xhi, p.first);
    if (fit.a > 0.0) {
        const auto line_y = [&](double x) { return L.py(fit.a * std::pow(x, fit.b)); };
        svg += "<line class=\"fit\" x1=\"" + fmt("%.3f", L.px(xlo)) + "\" y1=\"" + fmt("%.3f", line_y(xlo)) +
               "\" x2=\"" + fmt("%.3f", L.px(xhi)) + "\" y2=\"" + fmt("%.3f", line_y(xhi)) +
               "\" stroke=\"#b2182b\" stroke-width=\"1.5\"/>\n";
        svg += "<text class=\"equation\" x=\"" + fmt("%.3f", x0 + 12) + "\" y=\"" + fmt("%.3f", y0 + 20) +
               "\" font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(format_power_law(fit)) + "</text>\n";
    }
    svg += "<g fill=\"#2166ac\">\n";
    for (const auto& [x, y] : points) {
        svg += "<circle class=\"marker\" cx=\"" + fmt("%.3f", L.px(x)) + "\" cy=\"" + fmt("%.3f", L.py(y)) +
               "\" r=\"4\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void render_loglog(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                   const std::filesystem::path& out_path, const std::string& title) {
    write_file_atomic(out_path, render_loglog_svg(points, fit, title));
}

std::string svg_filename(DomainFamily family, double h, std::size_t mode, const std::string& kind) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", h);
    return std::string(to_string(family)) + "_h" + buf + "_mode" + std::to_string(mode) + "_" + kind + ".svg";
}

}  // namespace eigenlocal
