#include "eigenlocal/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

std::string_view to_string(Boundary b) { return b == Boundary::Neumann ? "Neumann" : "Dirichlet"; }

Boundary parse_boundary(std::string_view name) {
    if (name == "Neumann") return Boundary::Neumann;
    if (name == "Dirichlet") return Boundary::Dirichlet;
    throw ParameterError("unknown boundary condition '" + std::string(name) + "' (expected Neumann or Dirichlet)");
}

DomainSolution solve_domain(const DomainSpec& spec, const SolveOptions& options) {
    Mesh mesh = triangulate(spec, options.target_edge);
    return solve_mesh(spec, std::move(mesh), spec.aperture_h, options);
}

DomainSolution solve_mesh(const DomainSpec& spec, Mesh mesh, double h, const SolveOptions& options) {
    DomainSolution sol;
    sol.spec = spec;
    sol.mesh = std::move(mesh);
    sol.system = assemble(sol.mesh);
    const auto& K = sol.system.K;
    const auto& M = sol.system.M;

    if (options.boundary == Boundary::Neumann) {
        sol.basis = solve_smallest(K, M, options.k, options.tol, options.seed);
    } else {
        const DirichletSystem red = apply_dirichlet(K, M, boundary_vertices(sol.mesh));
        sol.basis = solve_smallest(red.K, red.M, options.k, options.tol, options.seed);
        sol.basis.eigenvectors = red.dofs.expand(sol.basis.eigenvectors);
    }

    if (sol.mesh.symmetry_line) {
        try {
            sol.perm = reflection_permutation(sol.mesh, *sol.mesh.symmetry_line);
        } catch (const SymmetryError&) {
            sol.perm.reset();  // broken-symmetry domain: parity stays Unknown
        }
    }
    auto& basis = sol.basis;
    if (sol.perm) {
        const double gap = 10.0 * options.tol * std::max(1.0, basis.eigenvalues.cwiseAbs().maxCoeff());
        const Eigen::MatrixXd rot = cluster_rotation(basis.eigenvalues, basis.eigenvectors, *sol.perm, gap);
        if (!rot.isIdentity(0.0)) {
            basis.eigenvectors = (basis.eigenvectors * rot).eval();
            const Eigen::MatrixXd KU = K * basis.eigenvectors;
            const Eigen::MatrixXd MU = M * basis.eigenvectors;
            for (Eigen::Index j = 0; j < basis.eigenvectors.cols(); ++j) {
                if (rot(j, j) == 1.0) continue;
                basis.eigenvalues[j] = basis.eigenvectors.col(j).dot(KU.col(j)) / basis.eigenvectors.col(j).dot(MU.col(j));
                basis.residuals[j] = (KU.col(j) - basis.eigenvalues[j] * MU.col(j)).norm() /
                                     std::max(basis.eigenvalues[j], 1.0);
            }
            // Keep the ascending order after the within-cluster rotation.
            std::vector<Eigen::Index> order(static_cast<std::size_t>(basis.eigenvalues.size()));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](Eigen::Index a, Eigen::Index b) { return basis.eigenvalues[a] < basis.eigenvalues[b]; });
            EigenBasis sorted = basis;
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto dst = static_cast<Eigen::Index>(i);
                sorted.eigenvalues[dst] = basis.eigenvalues[order[i]];
                sorted.residuals[dst] = basis.residuals[order[i]];
                sorted.eigenvectors.col(dst) = basis.eigenvectors.col(order[i]);
            }
            basis = std::move(sorted);
        }
    }
    for (Eigen::Index j = 0; j < basis.eigenvectors.cols(); ++j) {
        basis.eigenvectors.col(j) = normalize(basis.eigenvectors.col(j), M);
        LocalizationReport r = measure(basis.eigenvectors.col(j), M, sol.mesh, h);
        r.mode_index = static_cast<std::size_t>(j) + 1;
        r.eigenvalue = basis.eigenvalues[j];
        if (sol.perm) {
            const ParityResult p = classify_parity(basis.eigenvectors.col(j), *sol.perm);
            r.parity = p.label;
            r.skew_ratio = p.skew_ratio;
        }
        sol.reports.push_back(r);
    }
    return sol;
}

}  // namespace eigenlocal
