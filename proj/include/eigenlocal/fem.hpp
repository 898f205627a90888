#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "eigenlocal/mesh.hpp"
#include "eigenlocal/sparse.hpp"

namespace eigenlocal {

using ElementMatrix = std::array<std::array<double, 3>, 3>;

/// Integral of grad(phi_i) . grad(phi_j) over the triangle.
ElementMatrix element_stiffness(Point2 a, Point2 b, Point2 c);

/// Consistent mass matrix (A/12) [[2,1,1],[1,2,1],[1,1,2]].
ElementMatrix element_mass(Point2 a, Point2 b, Point2 c);

/// Stiffness K (positive semidefinite, K 1 = 0) and mass M of the weak form
/// int grad u . grad v = lambda int u v. Neumann conditions need no rows
/// touched.
struct FemSystem {
    SparseSymMatrix K;
    SparseSymMatrix M;
};

FemSystem assemble(const Mesh& mesh);

/// Correspondence between full vertex vectors and the free dofs left after
/// Dirichlet elimination.
struct DofMap {
    std::size_t full_size = 0;
    std::vector<std::size_t> free;        // reduced index -> vertex
    std::vector<std::ptrdiff_t> reduced;  // vertex -> reduced index, -1 when constrained

    Eigen::VectorXd compress(const Eigen::VectorXd& full) const;
    /// Constrained entries come back as zero.
    Eigen::VectorXd expand(const Eigen::VectorXd& reduced_vec) const;
    Eigen::MatrixXd expand(const Eigen::MatrixXd& reduced_block) const;
};

struct DirichletSystem {
    SparseSymMatrix K;
    SparseSymMatrix M;
    DofMap dofs;
};

/// Removes the rows and columns of `constrained` vertices.
DirichletSystem apply_dirichlet(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                const std::vector<std::size_t>& constrained);

enum class NormKind { L2, Linf };

/// Norm of a P1 function over the triangles whose tag is in `mask`.
double norm_region(const Mesh& mesh, const Eigen::VectorXd& u, const std::vector<RegionTag>& mask, NormKind kind);

/// u^T M u over the masked triangles only.
double region_mass(const Mesh& mesh, const Eigen::VectorXd& u, const std::vector<RegionTag>& mask);

}  // namespace eigenlocal
