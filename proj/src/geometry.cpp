#include "eigenlocal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

namespace {

std::string format_point(Point2 p) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

// Closed segments [p1, p2] and [q1, q2] share a point.
bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    constexpr double eps = 1e-14;
    return (std::abs(d1) <= eps && distance_to_segment(p1, q1, q2) <= eps) ||
           (std::abs(d2) <= eps && distance_to_segment(p2, q1, q2) <= eps) ||
           (std::abs(d3) <= eps && distance_to_segment(q1, p1, p2) <= eps) ||
           (std::abs(d4) <= eps && distance_to_segment(q2, p1, p2) <= eps);
}

// Interiors of the two segments cross at a single transversal point.
bool segments_cross_properly(Point2 p1, Point2 p2, Point2 q1, Point2 q2, double tol) {
    const Point2 dp = p2 - p1;
    const Point2 dq = q2 - q1;
    const double lp = norm(dp);
    const double lq = norm(dq);
    const double d1 = orient(q1, q2, p1) / lq;
    const double d2 = orient(q1, q2, p2) / lq;
    const double d3 = orient(p1, p2, q1) / lp;
    const double d4 = orient(p1, p2, q2) / lp;
    return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
           ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

bool strictly_inside(const PolygonRegion& poly, Point2 p, double tol) {
    return contains_closed(poly, p, tol) && !on_boundary(poly, p, tol);
}

void check_disjoint_interiors(const PolygonRegion& a, const PolygonRegion& b, std::string_view what) {
    constexpr double tol = 1e-9;
    for (Point2 v : a.vertices) {
        if (strictly_inside(b, v, tol)) {
            throw ValidationError(std::string(what) + ": vertex " + format_point(v) +
                                  " lies inside the neighbouring region");
        }
    }
    for (Point2 v : b.vertices) {
        if (strictly_inside(a, v, tol)) {
            throw ValidationError(std::string(what) + ": vertex " + format_point(v) +
                                  " lies inside the neighbouring region");
        }
    }
    const std::size_t na = a.vertices.size();
    const std::size_t nb = b.vertices.size();
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (segments_cross_properly(a.vertices[i], a.vertices[(i + 1) % na], b.vertices[j],
                                        b.vertices[(j + 1) % nb], tol)) {
                throw ValidationError(std::string(what) + ": region boundaries cross");
            }
        }
    }
}

}  // namespace

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return distance(p, a + t * d);
}

std::string_view to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::Omega1: return "Omega1";
        case RegionTag::Omega2: return "Omega2";
        case RegionTag::Passage: return "Passage";
    }
    return "?";
}

double signed_area(const std::vector<Point2>& ring) {
    double twice = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
    return 0.5 * twice;
}

void validate_polygon(const PolygonRegion& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    const std::string name(to_string(poly.label));
    if (n < 3) throw ValidationError("polygon " + name + " has fewer than 3 vertices");
    for (Point2 p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("polygon " + name + " has a non-finite vertex");
        }
    }
    if (!(signed_area(v) > 0.0)) {
        throw ValidationError("polygon " + name + " is degenerate or clockwise");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == v[(i + 1) % n]) throw ValidationError("polygon " + name + " repeats a vertex");
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                throw ValidationError("polygon " + name + " is not simple near " + format_point(v[j]));
            }
        }
    }
}

double polygon_area(const PolygonRegion& poly) {
    validate_polygon(poly);
    return signed_area(poly.vertices);
}

bool on_boundary(const PolygonRegion& poly, Point2 p, double tol) {
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (distance_to_segment(p, poly.vertices[i], poly.vertices[(i + 1) % n]) <= tol) return true;
    }
    return false;
}

bool contains_closed(const PolygonRegion& poly, Point2 p, double tol) {
    if (on_boundary(poly, p, tol)) return true;
    bool inside = false;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

PolygonRegion regular_polygon(int sides, double radius, Point2 center, RegionTag label) {
    if (sides < 3 || !(radius > 0.0)) throw ParameterError("regular polygon needs >= 3 sides and radius > 0");
    PolygonRegion poly;
    poly.label = label;
    poly.vertices.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / sides;
        poly.vertices.push_back({center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)});
    }
    return poly;
}

ReflectionLine ReflectionLine::through(Point2 point, Point2 direction) {
    const double len = norm(direction);
    if (!(len > 0.0) || !std::isfinite(len)) throw ParameterError("reflection line needs a nonzero direction");
    return {point, {direction.x / len, direction.y / len}};
}

void ReflectionLine::validate() const {
    if (std::abs(norm(direction) - 1.0) > 1e-12) {
        throw ValidationError("reflection line direction is not a unit vector");
    }
}

Point2 reflect_point(Point2 p, const ReflectionLine& line) {
    const Point2 rel = p - line.point;
    const double along = dot(rel, line.direction);
    const Point2 foot = line.point + along * line.direction;
    return 2.0 * foot - p;
}

std::vector<Segment> shared_boundary(const PolygonRegion& first, const PolygonRegion& second, double tol) {
    std::vector<Segment> out;
    const auto& a = first.vertices;
    const auto& b = second.vertices;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point2 a0 = a[i];
        const Point2 a1 = a[(i + 1) % a.size()];
        const double len = distance(a0, a1);
        const Point2 dir = (1.0 / len) * (a1 - a0);
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Point2 b0 = b[j];
            const Point2 b1 = b[(j + 1) % b.size()];
            if (std::abs(cross(dir, b0 - a0)) > tol || std::abs(cross(dir, b1 - a0)) > tol) continue;
            const double t0 = dot(b0 - a0, dir);
            const double t1 = dot(b1 - a0, dir);
            const double lo = std::max(0.0, std::min(t0, t1));
            const double hi = std::min(len, std::max(t0, t1));
            if (hi - lo <= tol) continue;
            // Snap to exact vertex coordinates where the overlap ends on one.
            auto pick = [&](double t) {
                for (Point2 q : {a0, a1, b0, b1}) {
                    if (std::abs(dot(q - a0, dir) - t) <= tol) return q;
                }
                return a0 + t * dir;
            };
            out.push_back({pick(lo), pick(hi)});
        }
    }
    return out;
}

PolygonRegion clip_to_side(const PolygonRegion& poly, const ReflectionLine& line, bool keep_left) {
    constexpr double tol = 1e-12;
    auto side = [&](Point2 p) {
        const double d = line.signed_distance(p);
        if (std::abs(d) <= tol) return 0.0;
        return keep_left ? d : -d;
    };
    PolygonRegion out;
    out.label = poly.label;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = v[i];
        const Point2 q = v[(i + 1) % n];
        const double sp = side(p);
        const double sq = side(q);
        if (sp >= 0.0) out.vertices.push_back(p);
        if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
            const double t = sp / (sp - sq);
            Point2 x = lerp(p, q, t);
            // Project onto the line so the cut is exactly on the axis.
            const double along = dot(x - line.point, line.direction);
            x = line.point + along * line.direction;
            out.vertices.push_back(x);
        }
    }
    std::vector<Point2> cleaned;
    for (Point2 p : out.vertices) {
        if (cleaned.empty() || distance(cleaned.back(), p) > tol) cleaned.push_back(p);
    }
    while (cleaned.size() > 1 && distance(cleaned.front(), cleaned.back()) <= tol) cleaned.pop_back();
    out.vertices = std::move(cleaned);
    return out;
}

std::string_view to_string(DomainFamily family) {
    switch (family) {
        case DomainFamily::DiamondBox: return "DiamondBox";
        case DomainFamily::DiscBox: return "DiscBox";
        case DomainFamily::RoomsAndPassage: return "RoomsAndPassage";
    }
    return "?";
}

DomainFamily parse_family(std::string_view name) {
    for (DomainFamily f : {DomainFamily::DiamondBox, DomainFamily::DiscBox, DomainFamily::RoomsAndPassage}) {
        if (name == to_string(f)) return f;
    }
    throw ParameterError("unknown domain family '" + std::string(name) +
                         "' (expected DiamondBox, DiscBox or RoomsAndPassage)");
}

double max_aperture(DomainFamily family) {
    switch (family) {
        case DomainFamily::DiamondBox: return std::numbers::sqrt2 / 2.0;
        case DomainFamily::DiscBox: return 1.0;
        case DomainFamily::RoomsAndPassage: return 0.5;
    }
    return 0.0;
}

Segment DomainSpec::aperture() const {
    const PolygonRegion& other = passage ? *passage : omega2;
    auto shared = shared_boundary(omega1, other);
    if (shared.size() != 1) {
        throw ValidationError("omega1 must share exactly one boundary segment with its neighbour, found " +
                              std::to_string(shared.size()));
    }
    return shared.front();
}

double DomainSpec::area() const {
    double total = polygon_area(omega1) + polygon_area(omega2);
    if (passage) total += polygon_area(*passage);
    return total;
}

bool DomainSpec::omega1_is_symmetric(double tol) const {
    const auto& v = omega1.vertices;
    for (Point2 p : v) {
        const Point2 r = reflect_point(p, symmetry_line);
        const bool matched = std::any_of(v.begin(), v.end(), [&](Point2 q) {
            return std::abs(q.x - r.x) <= tol && std::abs(q.y - r.y) <= tol;
        });
        if (!matched) return false;
    }
    return true;
}

void DomainSpec::validate(bool require_symmetry) const {
    validate_polygon(omega1);
    validate_polygon(omega2);
    if (passage) validate_polygon(*passage);
    symmetry_line.validate();
    if (!(aperture_h > 0.0)) throw ValidationError("aperture_h must be positive");
    const Segment ap = aperture();
    if (std::abs(ap.length() - aperture_h) > 1e-9) {
        throw ValidationError("aperture segment length does not match aperture_h");
    }
    if (std::abs(symmetry_line.signed_distance(corner_point)) > 1e-9) {
        throw ValidationError("corner point " + format_point(corner_point) + " is off the symmetry line");
    }
    if (require_symmetry && !omega1_is_symmetric()) {
        throw ValidationError("omega1 is not mirror-symmetric about the symmetry line");
    }
    check_disjoint_interiors(omega1, omega2, "omega1/omega2");
    if (passage) {
        check_disjoint_interiors(omega1, *passage, "omega1/passage");
        check_disjoint_interiors(omega2, *passage, "omega2/passage");
    }
}

namespace {

DomainSpec build_diamond_box(double h) {
    const double s = std::numbers::sqrt2 / 2.0;
    const double cut = -0.5 * h;
    const double a = kDiamondBoxRoomSide;
    DomainSpec spec;
    spec.family = DomainFamily::DiamondBox;
    // Unit square standing on its corner, tip at the origin, truncated where its
    // width equals h.
    spec.omega1 = {{{cut, -0.5 * h}, {cut, 0.5 * h}, {-s, s}, {-2.0 * s, 0.0}, {-s, -s}}, RegionTag::Omega1};
    spec.omega2 = {{{cut, -0.5 * a}, {cut + a, -0.5 * a}, {cut + a, 0.5 * a}, {cut, 0.5 * a}},
                   RegionTag::Omega2};
    spec.symmetry_line = ReflectionLine::through({0.0, 0.0}, {1.0, 0.0});
    spec.aperture_h = h;
    spec.corner_point = {cut, 0.0};
    return spec;
}

DomainSpec build_disc_box(double h) {
    constexpr int sides = 64;
    const double half = 0.5 * h;
    std::vector<Point2> upper;  // vertices 0..sides/2 with exact mirror partners
    for (int k = 0; k <= sides / 2; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / sides;
        Point2 p{std::cos(angle), std::sin(angle)};
        if (k == 0) p = {1.0, 0.0};
        if (k == sides / 2) p = {-1.0, 0.0};
        upper.push_back(p);
    }
    std::size_t k = 0;
    while (upper[k + 1].y < half) ++k;
    const double t = (half - upper[k].y) / (upper[k + 1].y - upper[k].y);
    const double xc = upper[k].x + t * (upper[k + 1].x - upper[k].x);

    DomainSpec spec;
    spec.family = DomainFamily::DiscBox;
    auto& v = spec.omega1.vertices;
    v.push_back({xc, -half});
    v.push_back({xc, half});
    const std::size_t first = (upper[k + 1].y == half) ? k + 2 : k + 1;
    for (std::size_t j = first; j < upper.size(); ++j) v.push_back(upper[j]);
    for (std::size_t j = upper.size() - 2; j >= first; --j) v.push_back({upper[j].x, -upper[j].y});
    spec.omega1.label = RegionTag::Omega1;
    spec.omega2 = {{{xc, -0.5}, {xc + 1.0, -0.5}, {xc + 1.0, 0.5}, {xc, 0.5}}, RegionTag::Omega2};
    spec.symmetry_line = ReflectionLine::through({0.0, 0.0}, {1.0, 0.0});
    spec.aperture_h = h;
    spec.corner_point = {xc, 0.0};
    return spec;
}

DomainSpec build_rooms_and_passage(double h) {
    constexpr double corridor = 0.05;
    const double lo = 0.5 - 0.5 * h;
    const double hi = 0.5 + 0.5 * h;
    const double x2 = 1.0 + corridor;
    DomainSpec spec;
    spec.family = DomainFamily::RoomsAndPassage;
    spec.omega1 = {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}, RegionTag::Omega1};
    spec.passage = PolygonRegion{{{1.0, lo}, {x2, lo}, {x2, hi}, {1.0, hi}}, RegionTag::Passage};
    spec.omega2 = {{{x2, 0.0}, {x2 + 1.0, 0.0}, {x2 + 1.0, 1.0}, {x2, 1.0}}, RegionTag::Omega2};
    spec.symmetry_line = ReflectionLine::through({0.0, 0.5}, {1.0, 0.0});
    spec.aperture_h = h;
    spec.corner_point = {1.0, 0.5};
    return spec;
}

}  // namespace

DomainSpec build_two_room_domain(DomainFamily family, double h) {
    const double bound = max_aperture(family);
    if (!(h > 0.0) || !(h < bound)) {
        std::ostringstream os;
        os << "aperture h=" << h << " out of range for " << to_string(family) << ": need 0 < h < " << bound;
        throw ParameterError(os.str());
    }
    DomainSpec spec;
    switch (family) {
        case DomainFamily::DiamondBox: spec = build_diamond_box(h); break;
        case DomainFamily::DiscBox: spec = build_disc_box(h); break;
        case DomainFamily::RoomsAndPassage: spec = build_rooms_and_passage(h); break;
    }
    spec.validate(true);
    return spec;
}

std::string_view to_string(Location loc) {
    switch (loc) {
        case Location::InOmega1: return "InOmega1";
        case Location::InOmega2: return "InOmega2";
        case Location::InPassage: return "InPassage";
        case Location::Outside: return "Outside";
    }
    return "?";
}

Location classify_point(Point2 p, const DomainSpec& spec) {
    constexpr double tol = 1e-12;
    if (contains_closed(spec.omega1, p, tol)) return Location::InOmega1;
    if (spec.passage && contains_closed(*spec.passage, p, tol)) return Location::InPassage;
    if (contains_closed(spec.omega2, p, tol)) return Location::InOmega2;
    return Location::Outside;
}

DomainSpec perturb_symmetry(const DomainSpec& spec, double delta) {
    if (!(std::abs(delta) < 0.5)) throw ParameterError("perturbation |delta| must be < 0.5");
    DomainSpec out = spec;
    if (delta == 0.0) return out;

    const Segment ap = spec.aperture();
    auto& v = out.omega1.vertices;
    const std::size_t n = v.size();
    std::size_t pick = n;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(spec.symmetry_line.signed_distance(v[i]));
        if (d <= 1e-9 || distance_to_segment(v[i], ap.a, ap.b) <= 1e-9) continue;
        if (d > best + 1e-12) {
            best = d;
            pick = i;
        }
    }
    if (pick == n) throw ParameterError("omega1 has no off-axis vertex to perturb");

    auto outward = [](Point2 a, Point2 b) {
        const Point2 d = b - a;
        const double len = norm(d);
        return Point2{d.y / len, -d.x / len};
    };
    const Point2 prev = v[(pick + n - 1) % n];
    const Point2 next = v[(pick + 1) % n];
    Point2 normal = outward(prev, v[pick]) + outward(v[pick], next);
    normal = (1.0 / norm(normal)) * normal;
    v[pick] = v[pick] + delta * normal;
    return out;
}

std::string domain_to_json(const DomainSpec& spec) {
    auto ring = [](const PolygonRegion& poly) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const Point2& p : poly.vertices) a.push_back({p.x, p.y});
        return a;
    };
    nlohmann::ordered_json j;
    j["family"] = std::string(to_string(spec.family));
    j["h"] = spec.aperture_h;
    j["omega1"] = ring(spec.omega1);
    j["omega2"] = ring(spec.omega2);
    j["passage"] = spec.passage ? ring(*spec.passage) : nlohmann::ordered_json(nullptr);
    j["axis"] = {{"point", {spec.symmetry_line.point.x, spec.symmetry_line.point.y}},
                 {"direction", {spec.symmetry_line.direction.x, spec.symmetry_line.direction.y}}};
    j["corner"] = {spec.corner_point.x, spec.corner_point.y};
    return j.dump(2);
}

}  // namespace eigenlocal
