#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eigenlocal/geometry.hpp"

namespace eigenlocal {

/// Conforming P1 triangulation with per-triangle region tags.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  // counterclockwise
    std::vector<RegionTag> region_tag;                  // one per triangle
    std::vector<std::pair<std::size_t, std::size_t>> boundary_edges;
    std::vector<std::size_t> axis_vertices;  // omega1 vertices on the symmetry line
    std::optional<ReflectionLine> symmetry_line;
    std::optional<std::size_t> corner_vertex;

    std::size_t n_vertices() const { return vertices.size(); }
    std::size_t n_triangles() const { return triangles.size(); }
    double triangle_area(std::size_t t) const;
    double total_area() const;
};

/// Mesh of a two-room domain. Omega1 is meshed on one side of the symmetry
/// line and mirrored when it is symmetric; shared boundaries between pieces
/// carry identical vertices.
///
/// Throws ResolutionError unless 0 < target_edge < aperture_h, GeometryError if
/// a piece cannot be meshed.
Mesh triangulate(const DomainSpec& spec, double target_edge);

/// Mirror data for a single-region mesh.
struct MirrorSpec {
    ReflectionLine line;
    Point2 corner;
};

/// Mesh of one polygon, tagged Omega1. With `mirror`, the polygon must be
/// symmetric about the line and the corner point becomes a mesh vertex.
Mesh triangulate_region(const PolygonRegion& region, double target_edge,
                        const std::optional<MirrorSpec>& mirror = std::nullopt);

/// Splits every triangle into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

enum class OutsidePolicy {
    Error,           // targets farther than the snap tolerance raise ExtrapolationError
    NearestTriangle  // such targets take the value at the closest source point
};

/// Evaluates the P1 function `values` on `source` at every target vertex.
std::vector<double> interpolate_p1(const Mesh& source, const std::vector<double>& values, const Mesh& target,
                                   OutsidePolicy policy = OutsidePolicy::Error);

struct MeshQuality {
    double min_angle = 0.0;   // degrees
    double max_aspect = 0.0;  // circumradius / (2 inradius); 1 for equilateral
    std::size_t n_vertices = 0;
    std::size_t n_triangles = 0;
};

MeshQuality mesh_quality(const Mesh& mesh);

/// Throws ValidationError naming the first violated invariant. The area check
/// runs when `expected_area` is given.
void validate_mesh(const Mesh& mesh, std::optional<double> expected_area = std::nullopt,
                   double min_angle_floor = 20.0);

/// Vertices incident to at least one triangle with the given tag.
std::vector<std::size_t> region_vertices(const Mesh& mesh, RegionTag tag);

/// Distinct vertices on boundary edges, ascending.
std::vector<std::size_t> boundary_vertices(const Mesh& mesh);

std::string mesh_to_json(const Mesh& mesh);
/// Inverse of mesh_to_json. Throws InputError on malformed text.
Mesh mesh_from_json(const std::string& text);
void write_off(const Mesh& mesh, std::ostream& os);

}  // namespace eigenlocal
