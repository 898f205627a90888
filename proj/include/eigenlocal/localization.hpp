#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigenlocal/eigensolver.hpp"
#include "eigenlocal/mesh.hpp"
#include "eigenlocal/sparse.hpp"
#include "eigenlocal/symmetry.hpp"

namespace eigenlocal {

/// Everything outside omega1: the second room and the passage.
inline const std::vector<RegionTag> kOutsideMask{RegionTag::Omega2, RegionTag::Passage};
inline const std::vector<RegionTag> kInsideMask{RegionTag::Omega1};

struct LocalizationReport {
    std::size_t mode_index = 0;  // 1-based; index 1 is the lowest pair
    double eigenvalue = 0.0;
    double h = 0.0;
    double l2_outside = 0.0;
    double linf_outside = 0.0;
    double l2_inside = 0.0;
    Parity parity = Parity::Unknown;
    double skew_ratio = 0.0;
};

/// Scales u to unit M-norm and applies the sign convention.
Eigen::VectorXd normalize(const Eigen::VectorXd& u, const SparseSymMatrix& M);

/// Norms of a unit-M-norm vertex vector outside and inside omega1. Throws
/// ContractError when |u^T M u - 1| > 1e-8. Parity is left Unknown; callers
/// that hold a reflection permutation fill it in.
LocalizationReport measure(const Eigen::VectorXd& u_normalized, const SparseSymMatrix& M, const Mesh& mesh,
                           double h);

/// Reports for every column of `vectors` (full-length, M-orthonormal) sorted
/// by l2_outside, ties by mode index; at most `top` entries.
std::vector<LocalizationReport> rank_localized(const EigenBasis& basis, const Eigen::MatrixXd& vectors,
                                               const SparseSymMatrix& M, const Mesh& mesh, double h,
                                               std::size_t top, const ReflectionPermutation* perm = nullptr);

inline constexpr const char* kCsvHeader = "mode,h,lambda,parity,l2_outside,linf_outside";

/// One CSV row without newline; numbers use %.17g.
std::string csv_row(const LocalizationReport& r);

}  // namespace eigenlocal
