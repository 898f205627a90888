#include "eigenlocal/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

namespace {

constexpr double kMatchTol = 1e-9;

void check_length(const Eigen::VectorXd& u, const ReflectionPermutation& perm) {
    if (static_cast<std::size_t>(u.size()) != perm.vertex_map.size()) {
        throw ContractError("vector length " + std::to_string(u.size()) + " does not match the " +
                            std::to_string(perm.vertex_map.size()) + "-vertex mesh");
    }
}

}  // namespace

std::string_view to_string(Parity p) {
    switch (p) {
        case Parity::Symmetric: return "Symmetric";
        case Parity::Skew: return "Skew";
        case Parity::Mixed: return "Mixed";
        case Parity::Unknown: return "Unknown";
    }
    return "?";
}

ReflectionPermutation reflection_permutation(const Mesh& mesh, const ReflectionLine& line) {
    ReflectionPermutation perm;
    perm.omega1_vertices = region_vertices(mesh, RegionTag::Omega1);
    perm.vertex_map.assign(mesh.n_vertices(), kNoImage);

    // Bucket omega1 vertices on a grid a little coarser than the match tolerance.
    constexpr double cell = 1e-7;
    auto key = [](Point2 p) {
        return std::make_pair(static_cast<long long>(std::floor(p.x / cell)),
                              static_cast<long long>(std::floor(p.y / cell)));
    };
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
    for (std::size_t v : perm.omega1_vertices) grid[key(mesh.vertices[v])].push_back(v);

    std::vector<std::size_t> unmatched;
    for (std::size_t v : perm.omega1_vertices) {
        const Point2 r = reflect_point(mesh.vertices[v], line);
        const auto [cx, cy] = key(r);
        std::size_t found = kNoImage;
        for (long long dx = -1; dx <= 1 && found == kNoImage; ++dx) {
            for (long long dy = -1; dy <= 1 && found == kNoImage; ++dy) {
                auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (std::size_t w : it->second) {
                    if (distance(mesh.vertices[w], r) <= kMatchTol) {
                        found = w;
                        break;
                    }
                }
            }
        }
        if (found == kNoImage) {
            unmatched.push_back(v);
            continue;
        }
        perm.vertex_map[v] = found;
        if (found == v) perm.fixed_vertices.push_back(v);
    }
    if (!unmatched.empty()) {
        std::ostringstream os;
        os.precision(10);
        os << unmatched.size() << " omega1 vertices have no mirror image, e.g.";
        for (std::size_t i = 0; i < std::min<std::size_t>(unmatched.size(), 5); ++i) {
            const Point2 p = mesh.vertices[unmatched[i]];
            os << " " << unmatched[i] << " (" << p.x << ", " << p.y << ")";
        }
        throw SymmetryError(os.str());
    }
    for (std::size_t v : perm.omega1_vertices) {
        if (perm.vertex_map[perm.vertex_map[v]] != v) {
            throw SymmetryError("reflection map is not an involution at vertex " + std::to_string(v));
        }
    }
    return perm;
}

ParityResult classify_parity(const Eigen::VectorXd& u, const ReflectionPermutation& perm) {
    check_length(u, perm);
    double s2 = 0.0;
    double a2 = 0.0;
    for (std::size_t v : perm.omega1_vertices) {
        const double here = u[static_cast<Eigen::Index>(v)];
        const double there = u[static_cast<Eigen::Index>(perm.vertex_map[v])];
        s2 += (there - here) * (there - here);
        a2 += (there + here) * (there + here);
    }
    const double s = std::sqrt(s2);
    const double a = std::sqrt(a2);
    if (!(s + a > 0.0)) throw ValidationError("cannot classify the parity of a zero vector");
    ParityResult r;
    r.skew_ratio = a / (s + a);
    if (r.skew_ratio <= kSkewThreshold) {
        r.label = Parity::Skew;
    } else if (r.skew_ratio >= kSymmetricThreshold) {
        r.label = Parity::Symmetric;
    } else {
        r.label = Parity::Mixed;
    }
    return r;
}

Eigen::VectorXd symmetric_part(const Eigen::VectorXd& u, const ReflectionPermutation& perm) {
    check_length(u, perm);
    Eigen::VectorXd out = u;
    for (std::size_t v : perm.omega1_vertices) {
        out[static_cast<Eigen::Index>(v)] =
            0.5 * (u[static_cast<Eigen::Index>(v)] + u[static_cast<Eigen::Index>(perm.vertex_map[v])]);
    }
    return out;
}

Eigen::VectorXd skew_part(const Eigen::VectorXd& u, const ReflectionPermutation& perm) {
    check_length(u, perm);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    for (std::size_t v : perm.omega1_vertices) {
        out[static_cast<Eigen::Index>(v)] =
            0.5 * (u[static_cast<Eigen::Index>(v)] - u[static_cast<Eigen::Index>(perm.vertex_map[v])]);
    }
    return out;
}

Eigen::MatrixXd cluster_rotation(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& vectors,
                                 const ReflectionPermutation& perm, double gap) {
    const Eigen::Index k = eigenvalues.size();
    if (vectors.cols() != k) throw ContractError("cluster_rotation: eigenvalue and vector counts differ");
    if (static_cast<std::size_t>(vectors.rows()) != perm.vertex_map.size()) {
        throw ContractError("cluster_rotation: vectors must be full-length vertex vectors");
    }
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(k, k);
    Eigen::Index start = 0;
    while (start < k) {
        Eigen::Index end = start + 1;
        while (end < k && eigenvalues[end] - eigenvalues[end - 1] < gap) ++end;
        const Eigen::Index size = end - start;
        if (size > 1) {
            Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(size, size);
            for (std::size_t v : perm.omega1_vertices) {
                const auto x = static_cast<Eigen::Index>(v);
                const auto rx = static_cast<Eigen::Index>(perm.vertex_map[v]);
                for (Eigen::Index i = 0; i < size; ++i) {
                    for (Eigen::Index j = 0; j < size; ++j) Q(i, j) += vectors(x, start + i) * vectors(rx, start + j);
                }
            }
            Q = 0.5 * (Q + Q.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
            // Ascending order puts the most skew combinations first.
            rot.block(start, start, size, size) = es.eigenvectors();
        }
        start = end;
    }
    return rot;
}

NodalLineReport nodal_line_check(const Eigen::VectorXd& u, const Mesh& mesh) {
    if (static_cast<std::size_t>(u.size()) != mesh.n_vertices()) throw ContractError("vector length mismatch");
    if (!mesh.corner_vertex) throw ValidationError("mesh has no corner vertex");
    NodalLineReport r;
    for (std::size_t v : mesh.axis_vertices) r.max_axis_abs = std::max(r.max_axis_abs, std::abs(u[static_cast<Eigen::Index>(v)]));
    const std::size_t p = *mesh.corner_vertex;
    r.corner_value = std::abs(u[static_cast<Eigen::Index>(p)]);
    Point2 grad{0.0, 0.0};
    double area_sum = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (tri[0] != p && tri[1] != p && tri[2] != p) continue;
        const Point2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const double area2 = orient(a, b, c);
        const double ua = u[static_cast<Eigen::Index>(tri[0])];
        const double ub = u[static_cast<Eigen::Index>(tri[1])];
        const double uc = u[static_cast<Eigen::Index>(tri[2])];
        // grad = sum u_i * rot90(opposite edge) / (2A)
        const Point2 g{(ua * (b.y - c.y) + ub * (c.y - a.y) + uc * (a.y - b.y)) / area2,
                       (ua * (c.x - b.x) + ub * (a.x - c.x) + uc * (b.x - a.x)) / area2};
        grad = grad + 0.5 * area2 * g;
        area_sum += 0.5 * area2;
    }
    if (area_sum > 0.0) r.corner_gradient_norm = norm((1.0 / area_sum) * grad);
    return r;
}

}  // namespace eigenlocal
