#include "eigenlocal/fem.hpp"

#include <algorithm>
#include <cmath>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

namespace {

double checked_area(Point2 a, Point2 b, Point2 c) {
    const double area = 0.5 * orient(a, b, c);
    if (!(area > 0.0)) throw GeometryError("degenerate or clockwise triangle in element computation");
    return area;
}

bool in_mask(RegionTag tag, const std::vector<RegionTag>& mask) {
    return std::find(mask.begin(), mask.end(), tag) != mask.end();
}

}  // namespace

ElementMatrix element_stiffness(Point2 a, Point2 b, Point2 c) {
    const double area = checked_area(a, b, c);
    // Edge vectors opposite each vertex; grad(phi_i) is the rotated edge / (2A).
    const std::array<Point2, 3> e{c - b, a - c, b - a};
    ElementMatrix k{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) k[i][j] = dot(e[i], e[j]) / (4.0 * area);
    }
    return k;
}

ElementMatrix element_mass(Point2 a, Point2 b, Point2 c) {
    const double area = checked_area(a, b, c);
    ElementMatrix m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    }
    return m;
}

FemSystem assemble(const Mesh& mesh) {
    std::vector<Triplet> kt;
    std::vector<Triplet> mt;
    kt.reserve(6 * mesh.n_triangles());
    mt.reserve(6 * mesh.n_triangles());
    for (const auto& tri : mesh.triangles) {
        const Point2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const auto ke = element_stiffness(a, b, c);
        const auto me = element_mass(a, b, c);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (tri[j] < tri[i]) continue;
                kt.push_back({tri[i], tri[j], ke[i][j]});
                mt.push_back({tri[i], tri[j], me[i][j]});
            }
        }
    }
    return {SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(kt)),
            SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(mt))};
}

Eigen::VectorXd DofMap::compress(const Eigen::VectorXd& full) const {
    if (static_cast<std::size_t>(full.size()) != full_size) throw ContractError("compress: length mismatch");
    Eigen::VectorXd out(static_cast<Eigen::Index>(free.size()));
    for (std::size_t r = 0; r < free.size(); ++r) out[static_cast<Eigen::Index>(r)] = full[static_cast<Eigen::Index>(free[r])];
    return out;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& reduced_vec) const {
    if (static_cast<std::size_t>(reduced_vec.size()) != free.size()) throw ContractError("expand: length mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full_size));
    for (std::size_t r = 0; r < free.size(); ++r) out[static_cast<Eigen::Index>(free[r])] = reduced_vec[static_cast<Eigen::Index>(r)];
    return out;
}

Eigen::MatrixXd DofMap::expand(const Eigen::MatrixXd& reduced_block) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(full_size), reduced_block.cols());
    for (Eigen::Index c = 0; c < reduced_block.cols(); ++c) out.col(c) = expand(Eigen::VectorXd(reduced_block.col(c)));
    return out;
}

DirichletSystem apply_dirichlet(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                const std::vector<std::size_t>& constrained) {
    if (K.n != M.n) throw ContractError("K and M differ in size");
    DirichletSystem out;
    out.dofs.full_size = K.n;
    out.dofs.reduced.assign(K.n, 0);
    for (std::size_t v : constrained) {
        if (v >= K.n) throw ContractError("constrained vertex " + std::to_string(v) + " out of range");
        out.dofs.reduced[v] = -1;
    }
    for (std::size_t v = 0; v < K.n; ++v) {
        if (out.dofs.reduced[v] < 0) continue;
        out.dofs.reduced[v] = static_cast<std::ptrdiff_t>(out.dofs.free.size());
        out.dofs.free.push_back(v);
    }
    if (out.dofs.free.empty()) throw ValidationError("no free degrees of freedom remain after Dirichlet elimination");
    auto reduce = [&](const SparseSymMatrix& a) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < a.n; ++i) {
            const auto ri = out.dofs.reduced[i];
            if (ri < 0) continue;
            for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
                const auto rj = out.dofs.reduced[a.col_indices[k]];
                if (rj < 0) continue;
                t.push_back({static_cast<std::size_t>(ri), static_cast<std::size_t>(rj), a.values[k]});
            }
        }
        return SparseSymMatrix::from_triplets(out.dofs.free.size(), std::move(t));
    };
    out.K = reduce(K);
    out.M = reduce(M);
    return out;
}

double region_mass(const Mesh& mesh, const Eigen::VectorXd& u, const std::vector<RegionTag>& mask) {
    if (static_cast<std::size_t>(u.size()) != mesh.n_vertices()) {
        throw ContractError("vector length " + std::to_string(u.size()) + " does not match " +
                            std::to_string(mesh.n_vertices()) + " vertices");
    }
    double total = 0.0;
    bool any = false;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        if (!in_mask(mesh.region_tag[t], mask)) continue;
        any = true;
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        const double u0 = u[static_cast<Eigen::Index>(tri[0])];
        const double u1 = u[static_cast<Eigen::Index>(tri[1])];
        const double u2 = u[static_cast<Eigen::Index>(tri[2])];
        // Exact integral of the squared P1 interpolant.
        total += area / 6.0 * (u0 * u0 + u1 * u1 + u2 * u2 + u0 * u1 + u1 * u2 + u2 * u0);
    }
    if (!any) throw ValidationError("region mask selects no triangles");
    return total;
}

double norm_region(const Mesh& mesh, const Eigen::VectorXd& u, const std::vector<RegionTag>& mask, NormKind kind) {
    if (kind == NormKind::L2) return std::sqrt(std::max(0.0, region_mass(mesh, u, mask)));
    if (static_cast<std::size_t>(u.size()) != mesh.n_vertices()) throw ContractError("vector length mismatch");
    double m = 0.0;
    bool any = false;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        if (!in_mask(mesh.region_tag[t], mask)) continue;
        any = true;
        for (std::size_t v : mesh.triangles[t]) m = std::max(m, std::abs(u[static_cast<Eigen::Index>(v)]));
    }
    if (!any) throw ValidationError("region mask selects no triangles");
    return m;
}

}  // namespace eigenlocal
