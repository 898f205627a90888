#include "eigenlocal/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    for (auto& t : triplets) {
        if (t.row >= n || t.col >= n) throw ContractError("triplet index out of range");
        if (t.col < t.row) std::swap(t.row, t.col);
    }
    // Sorting by (row, col, value) fixes the summation order.
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.value < b.value;
    });
    SparseSymMatrix m;
    m.n = n;
    m.row_offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row && triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        m.col_indices.push_back(triplets[i].col);
        m.values.push_back(sum);
        ++m.row_offsets[triplets[i].row + 1];
        i = j;
    }
    for (std::size_t r = 0; r < n; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
    return m;
}

double SparseSymMatrix::entry(std::size_t i, std::size_t j) const {
    if (j < i) std::swap(i, j);
    const auto begin = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
    const auto end = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - col_indices.begin())];
}

Eigen::VectorXd SparseSymMatrix::diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = entry(i, i);
    return d;
}

Eigen::VectorXd SparseSymMatrix::operator*(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd block = x;
    return (*this * block).col(0);
}

Eigen::MatrixXd SparseSymMatrix::operator*(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.rows()) != n) throw ContractError("matrix-block dimension mismatch");
    const Eigen::Index cols = x.cols();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double* xc = x.col(c).data();
        double* yc = y.col(c).data();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double xi = xc[i];
            for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
                const std::size_t j = col_indices[k];
                const double v = values[k];
                acc += v * xc[j];
                if (j != i) yc[j] += v * xi;
            }
            yc[i] += acc;
        }
    }
    return y;
}

double SparseSymMatrix::sum_entries() const {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            total += (col_indices[k] == i ? 1.0 : 2.0) * values[k];
        }
    }
    return total;
}

double SparseSymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(col_indices[k]);
            d(r, c) = values[k];
            d(c, r) = values[k];
        }
    }
    return d;
}

void write_matrix_market(const SparseSymMatrix& a, std::ostream& os) {
    os.precision(17);
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    os << a.n << " " << a.n << " " << a.nnz_stored() << "\n";
    // Stored upper entry (i, j) is written as lower entry (j, i).
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            os << a.col_indices[k] + 1 << " " << i + 1 << " " << a.values[k] << "\n";
        }
    }
}

}  // namespace eigenlocal
