#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

namespace eigenlocal {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Symmetric matrix in CSR form holding only the upper triangle (col >= row).
struct SparseSymMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_offsets;  // size n + 1
    std::vector<std::size_t> col_indices;
    std::vector<double> values;

    /// Sums duplicates; entries below the diagonal are mirrored into the upper
    /// triangle. The result depends only on the multiset of triplets.
    static SparseSymMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

    std::size_t nnz_stored() const { return values.size(); }
    double entry(std::size_t i, std::size_t j) const;
    Eigen::VectorXd diagonal() const;

    /// y = A x for the full symmetric matrix.
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd operator*(const Eigen::MatrixXd& x) const;

    /// Sum over all n*n entries of the full matrix.
    double sum_entries() const;
    double max_abs() const;
    Eigen::MatrixXd to_dense() const;
};

/// Matrix Market coordinate format, symmetric, lower triangle, 1-based.
void write_matrix_market(const SparseSymMatrix& a, std::ostream& os);

}  // namespace eigenlocal
