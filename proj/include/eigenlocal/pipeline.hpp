#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eigenlocal/eigensolver.hpp"
#include "eigenlocal/fem.hpp"
#include "eigenlocal/geometry.hpp"
#include "eigenlocal/localization.hpp"
#include "eigenlocal/mesh.hpp"
#include "eigenlocal/symmetry.hpp"

namespace eigenlocal {

enum class Boundary { Neumann, Dirichlet };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view name);

struct SolveOptions {
    double target_edge = 0.02;
    std::size_t k = 12;
    double tol = kDefaultTol;
    std::uint64_t seed = 1;
    Boundary boundary = Boundary::Neumann;
};

/// Mesh, matrices and eigenpairs of one domain.
struct DomainSolution {
    DomainSpec spec;
    Mesh mesh;
    FemSystem system;  // full (Neumann) matrices
    EigenBasis basis;  // eigenvectors are full-length vertex vectors
    std::optional<ReflectionPermutation> perm;
    std::vector<LocalizationReport> reports;  // in mode order, parity filled when perm exists
};

/// geometry -> mesh -> assemble -> solve -> normalize -> measure. With
/// Dirichlet conditions every boundary vertex is eliminated and modes are
/// expanded back with zeros. On mirror-symmetric meshes near-degenerate
/// clusters are rotated to pure parity before measuring.
DomainSolution solve_domain(const DomainSpec& spec, const SolveOptions& options);

/// Same pipeline for a mesh built elsewhere; `h` is recorded in the reports.
DomainSolution solve_mesh(const DomainSpec& spec, Mesh mesh, double h, const SolveOptions& options);

}  // namespace eigenlocal
