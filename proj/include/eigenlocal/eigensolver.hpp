#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "eigenlocal/sparse.hpp"

namespace eigenlocal {

/// Smallest eigenpairs of K u = lambda M u. Eigenvectors are M-orthonormal
/// columns, each flipped so that its largest-magnitude entry is positive.
/// residuals(i) = |K u_i - lambda_i M u_i|_2 / max(lambda_i, 1).
struct EigenBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd residuals;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::size_t iterations = 0;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline constexpr double kDefaultTol = 1e-8;

/// Block preconditioned Rayleigh-quotient minimization (LOBPCG) with a Jacobi
/// preconditioner diag(K), a seeded random start and soft locking of
/// converged pairs. When K annihilates the constant vector the constant is
/// returned as the first pair and held as a constraint for the rest.
///
/// A shift-invert backend would slot in here: factor K - sigma M once and run
/// a Lanczos or subspace iteration on its inverse, keeping this signature.
///
/// Requires k < n/4 and tol in [1e-12, 1e-4]. Throws InputError if M is not
/// positive definite and ConvergenceError (with the worst residual) when the
/// cap of 500 k block iterations is reached.
EigenBasis solve_smallest(const SparseSymMatrix& K, const SparseSymMatrix& M, std::size_t k,
                          double tol = kDefaultTol, std::uint64_t seed = 0);

/// u^T K u / u^T M u.
double rayleigh_quotient(const SparseSymMatrix& K, const SparseSymMatrix& M, const Eigen::VectorXd& u);

/// Modified Gram-Schmidt in the M inner product. Throws ValidationError naming
/// the first column that is numerically dependent on the earlier ones.
Eigen::MatrixXd m_orthonormalize(const SparseSymMatrix& M, const Eigen::MatrixXd& vectors);

/// Flips u so its entry of largest magnitude (first on ties) is positive.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> u);

/// {eigenvalues, residuals, seed, tol, iterations}.
std::string eigen_basis_to_json(const EigenBasis& basis);

}  // namespace eigenlocal
