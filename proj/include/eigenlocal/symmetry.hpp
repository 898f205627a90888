#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eigenlocal/mesh.hpp"

namespace eigenlocal {

inline constexpr std::size_t kNoImage = std::numeric_limits<std::size_t>::max();

/// The reflection acting on omega1 vertices of a mirror-symmetric mesh.
struct ReflectionPermutation {
    std::vector<std::size_t> vertex_map;      // full length; kNoImage outside omega1
    std::vector<std::size_t> omega1_vertices;  // ascending
    std::vector<std::size_t> fixed_vertices;   // ascending, equal to the axis vertices

    std::size_t image(std::size_t v) const { return vertex_map[v]; }
};

/// Throws SymmetryError listing the first unmatched vertices when the omega1
/// part of the mesh is not mirror-symmetric to 1e-9.
ReflectionPermutation reflection_permutation(const Mesh& mesh, const ReflectionLine& line);

enum class Parity { Symmetric, Skew, Mixed, Unknown };

std::string_view to_string(Parity p);

struct ParityResult {
    Parity label = Parity::Unknown;
    double skew_ratio = 0.0;  // |u.R + u| / (|u.R - u| + |u.R + u|), 0 for exactly skew
};

inline constexpr double kSkewThreshold = 0.01;
inline constexpr double kSymmetricThreshold = 0.99;

/// Classifies u on omega1 vertices. u is a full-length vertex vector.
ParityResult classify_parity(const Eigen::VectorXd& u, const ReflectionPermutation& perm);

/// (u + u.R)/2 and (u - u.R)/2 on omega1; other entries go to the symmetric
/// part unchanged so that the two parts always sum to u.
Eigen::VectorXd symmetric_part(const Eigen::VectorXd& u, const ReflectionPermutation& perm);
Eigen::VectorXd skew_part(const Eigen::VectorXd& u, const ReflectionPermutation& perm);

/// Orthogonal k x k matrix that rotates every cluster of eigenvalues closer
/// than `gap` so that each rotated vector is as close as possible to pure
/// parity: within a cluster it diagonalizes Q_ij = sum over omega1 of
/// v_i(x) v_j(Rx). Identity on singleton clusters. Columns of `vectors` are
/// full-length vertex vectors.
Eigen::MatrixXd cluster_rotation(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& vectors,
                                 const ReflectionPermutation& perm, double gap);

struct NodalLineReport {
    double max_axis_abs = 0.0;
    double corner_value = 0.0;
    double corner_gradient_norm = 0.0;
};

/// max |u| over axis vertices, |u(p)| at the corner vertex, and the norm of
/// the area-weighted mean P1 gradient over the triangles incident to p.
NodalLineReport nodal_line_check(const Eigen::VectorXd& u, const Mesh& mesh);

}  // namespace eigenlocal
