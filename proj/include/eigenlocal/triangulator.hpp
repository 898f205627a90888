#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "eigenlocal/geometry.hpp"

namespace eigenlocal {

/// Quality mesher for one simple polygonal piece.
///
/// The boundary is a closed counterclockwise loop of straight chains. Each
/// chain lists its points from start to end inclusive, and consecutive chains
/// share their joining point. Interior Steiner points come from a jittered
/// triangular lattice; a constrained Bowyer-Watson triangulation is then
/// refined with Ruppert's rules (circumcenter insertion, midpoint splitting of
/// encroached boundary subsegments) and given one Laplacian smoothing pass
/// that never lowers the local minimum angle.
///
/// Chains may be split during refinement. The final point list of every chain
/// is returned so that neighbouring pieces can be re-meshed against it.
struct PieceInput {
    std::vector<std::vector<Point2>> chains;
    double target_edge = 0.1;
    double min_angle_deg = 21.0;
    std::uint32_t jitter_seed = 0x5eed1234u;
};

struct PieceMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  // counterclockwise
    std::vector<std::vector<Point2>> chains;            // final boundary points per chain
};

/// Throws GeometryError if the piece cannot be meshed to the requested quality.
PieceMesh mesh_piece(const PieceInput& input);

/// Smallest interior angle of a triangle, in degrees.
double min_angle_deg(Point2 a, Point2 b, Point2 c);

}  // namespace eigenlocal
