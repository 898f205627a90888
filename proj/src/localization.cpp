#include "eigenlocal/localization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/fem.hpp"

namespace eigenlocal {

Eigen::VectorXd normalize(const Eigen::VectorXd& u, const SparseSymMatrix& M) {
    const double mass = u.dot(M * u);
    if (!(mass > 0.0)) throw ValidationError("cannot normalize a vector with zero mass");
    Eigen::VectorXd out = u / std::sqrt(mass);
    apply_sign_convention(out);
    return out;
}

LocalizationReport measure(const Eigen::VectorXd& u_normalized, const SparseSymMatrix& M, const Mesh& mesh,
                           double h) {
    if (static_cast<std::size_t>(u_normalized.size()) != mesh.n_vertices() || M.n != mesh.n_vertices()) {
        throw ContractError("measure: vector, mass matrix and mesh sizes disagree");
    }
    const double mass = u_normalized.dot(M * u_normalized);
    if (std::abs(mass - 1.0) > 1e-8) {
        throw ContractError("measure: input is not normalized (u^T M u = " + std::to_string(mass) + ")");
    }
    auto present = [&](const std::vector<RegionTag>& mask) {
        return std::any_of(mesh.region_tag.begin(), mesh.region_tag.end(), [&](RegionTag t) {
            return std::find(mask.begin(), mask.end(), t) != mask.end();
        });
    };
    // A single-room mesh has nothing outside omega1.
    LocalizationReport r;
    r.h = h;
    if (present(kOutsideMask)) {
        r.l2_outside = norm_region(mesh, u_normalized, kOutsideMask, NormKind::L2);
        r.linf_outside = norm_region(mesh, u_normalized, kOutsideMask, NormKind::Linf);
    }
    if (present(kInsideMask)) r.l2_inside = norm_region(mesh, u_normalized, kInsideMask, NormKind::L2);
    return r;
}

std::vector<LocalizationReport> rank_localized(const EigenBasis& basis, const Eigen::MatrixXd& vectors,
                                               const SparseSymMatrix& M, const Mesh& mesh, double h,
                                               std::size_t top, const ReflectionPermutation* perm) {
    if (vectors.cols() != static_cast<Eigen::Index>(basis.size())) {
        throw ContractError("rank_localized: vector count differs from eigenvalue count");
    }
    std::vector<LocalizationReport> reports;
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        const Eigen::VectorXd u = normalize(vectors.col(j), M);
        LocalizationReport r = measure(u, M, mesh, h);
        r.mode_index = static_cast<std::size_t>(j) + 1;
        r.eigenvalue = basis.eigenvalues[j];
        if (perm) {
            const ParityResult p = classify_parity(u, *perm);
            r.parity = p.label;
            r.skew_ratio = p.skew_ratio;
        }
        reports.push_back(r);
    }
    std::stable_sort(reports.begin(), reports.end(), [](const LocalizationReport& a, const LocalizationReport& b) {
        if (a.l2_outside != b.l2_outside) return a.l2_outside < b.l2_outside;
        return a.mode_index < b.mode_index;
    });
    if (reports.size() > top) reports.resize(top);
    return reports;
}

std::string csv_row(const LocalizationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%s,%.17g,%.17g", r.mode_index, r.h, r.eigenvalue,
                  std::string(to_string(r.parity)).c_str(), r.l2_outside, r.linf_outside);
    return buf;
}

}  // namespace eigenlocal
