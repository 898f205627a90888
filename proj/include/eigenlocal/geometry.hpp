#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eigenlocal {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

/// Twice the signed area of (a, b, c); positive when counterclockwise.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

/// Distance from p to the closed segment [a, b].
double distance_to_segment(Point2 p, Point2 a, Point2 b);

enum class RegionTag : std::uint8_t { Omega1, Omega2, Passage };

std::string_view to_string(RegionTag tag);

struct PolygonRegion {
    std::vector<Point2> vertices;  // counterclockwise
    RegionTag label = RegionTag::Omega1;
};

double signed_area(const std::vector<Point2>& ring);

/// Throws ValidationError unless the polygon has >= 3 vertices, is simple and
/// has positive signed area.
void validate_polygon(const PolygonRegion& poly);

/// Shoelace area of a validated polygon.
double polygon_area(const PolygonRegion& poly);

/// Closed containment: boundary points (within tol) count as inside.
bool contains_closed(const PolygonRegion& poly, Point2 p, double tol = 1e-12);
bool on_boundary(const PolygonRegion& poly, Point2 p, double tol = 1e-12);

PolygonRegion regular_polygon(int sides, double radius, Point2 center, RegionTag label);

struct ReflectionLine {
    Point2 point;
    Point2 direction;  // unit length

    /// Normalizes `direction`; throws ParameterError on a zero direction.
    static ReflectionLine through(Point2 point, Point2 direction);

    /// Positive on the left of `direction`.
    double signed_distance(Point2 p) const { return cross(direction, p - point); }
    void validate() const;
};

Point2 reflect_point(Point2 p, const ReflectionLine& line);

struct Segment {
    Point2 a;
    Point2 b;
    double length() const { return distance(a, b); }
    Point2 midpoint() const { return lerp(a, b, 0.5); }
};

/// Collinear overlaps of positive length between the boundaries of two polygons.
std::vector<Segment> shared_boundary(const PolygonRegion& first, const PolygonRegion& second,
                                     double tol = 1e-9);

/// Part of `poly` on the left (or right) side of `line`. Valid for polygons
/// whose boundary crosses the line at most twice.
PolygonRegion clip_to_side(const PolygonRegion& poly, const ReflectionLine& line, bool keep_left);

enum class DomainFamily { DiamondBox, DiscBox, RoomsAndPassage };

std::string_view to_string(DomainFamily family);
DomainFamily parse_family(std::string_view name);

/// Exclusive upper bound on the aperture for each family.
double max_aperture(DomainFamily family);

/// Side length of the axis-aligned room attached to the diamond.
inline constexpr double kDiamondBoxRoomSide = 0.8;

struct DomainSpec {
    DomainFamily family = DomainFamily::DiamondBox;
    PolygonRegion omega1;
    PolygonRegion omega2;
    std::optional<PolygonRegion> passage;
    ReflectionLine symmetry_line;
    double aperture_h = 0.0;
    Point2 corner_point;

    /// The opening through which omega1 communicates with the rest of the domain.
    Segment aperture() const;
    double area() const;
    bool omega1_is_symmetric(double tol = 1e-9) const;

    /// Checks every structural invariant; the reflection symmetry of omega1 only
    /// when `require_symmetry` is set.
    void validate(bool require_symmetry = true) const;
};

DomainSpec build_two_room_domain(DomainFamily family, double h);

enum class Location { InOmega1, InOmega2, InPassage, Outside };

std::string_view to_string(Location loc);

/// Closed omega1 wins ties, so aperture points resolve to InOmega1.
Location classify_point(Point2 p, const DomainSpec& spec);

/// Moves the off-axis omega1 vertex farthest from the axis by `delta` along its
/// outward normal. The result is generally not symmetric and is not validated
/// for symmetry.
DomainSpec perturb_symmetry(const DomainSpec& spec, double delta);

/// {family, h, omega1, omega2, passage, axis, corner} as pretty-printed JSON.
std::string domain_to_json(const DomainSpec& spec);

}  // namespace eigenlocal
