#include "eigenlocal/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/triangulator.hpp"

namespace eigenlocal {

namespace {

constexpr double kPointTol = 1e-9;
constexpr double kSnapTol = 1e-6;

std::string format_point(Point2 p) {
    std::ostringstream os;
    os.precision(10);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

/// Reflection that leaves points on the line bit-for-bit unchanged.
Point2 mirror_point(Point2 p, const ReflectionLine& line) {
    if (std::abs(line.signed_distance(p)) < 1e-12) return p;
    return reflect_point(p, line);
}

struct PieceDef {
    std::vector<Point2> ring;
    RegionTag tag;
};

std::vector<Point2> split_ring(const std::vector<Point2>& ring, const std::vector<Point2>& keys) {
    std::vector<Point2> out;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = ring[i];
        const Point2 q = ring[(i + 1) % n];
        const Point2 d = q - p;
        const double len2 = dot(d, d);
        out.push_back(p);
        std::vector<std::pair<double, Point2>> inner;
        for (Point2 k : keys) {
            if (distance(k, p) <= kPointTol || distance(k, q) <= kPointTol) continue;
            if (distance_to_segment(k, p, q) > kPointTol) continue;
            const double t = dot(k - p, d) / len2;
            const bool dup = std::any_of(inner.begin(), inner.end(),
                                         [&](const auto& e) { return distance(e.second, k) <= kPointTol; });
            if (!dup) inner.push_back({t, k});
        }
        std::sort(inner.begin(), inner.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& e : inner) out.push_back(e.second);
    }
    return out;
}

/// Vertex merging within a small absolute tolerance.
class PointMerger {
public:
    std::size_t find_or_add(Point2 p) {
        const long long cx = cell(p.x);
        const long long cy = cell(p.y);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid_.find(key(cx + dx, cy + dy));
                if (it == grid_.end()) continue;
                for (std::size_t id : it->second) {
                    if (distance(points_[id], p) <= kTol) return id;
                }
            }
        }
        points_.push_back(p);
        grid_[key(cx, cy)].push_back(points_.size() - 1);
        return points_.size() - 1;
    }
    std::vector<Point2>& points() { return points_; }

private:
    static constexpr double kTol = 1e-10;
    static constexpr double kCell = 1e-8;
    static long long cell(double v) { return static_cast<long long>(std::floor(v / kCell)); }
    static std::uint64_t key(long long x, long long y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }
    std::vector<Point2> points_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

/// Meshes a set of pieces whose shared edges must carry identical points.
/// Piece 0 is omega1; with a mirror line it is replaced by its left half and
/// the right half is produced by reflection.
class MultiPieceMesher {
public:
    MultiPieceMesher(std::vector<PieceDef> pieces, std::optional<ReflectionLine> mirror,
                     std::optional<Point2> corner, double target_edge)
        : pieces_(std::move(pieces)), mirror_(mirror), corner_(corner), target_(target_edge) {}

    Mesh run(const std::optional<ReflectionLine>& axis) {
        const PolygonRegion omega1{pieces_[0].ring, pieces_[0].tag};
        if (mirror_) {
            half_ = clip_to_side(omega1, *mirror_, true);
            pieces_[0].ring = half_.vertices;
        }
        build_rings();
        seed_edges();
        iterate();
        Mesh mesh = assemble();
        mesh.symmetry_line = axis;
        finish(mesh, omega1, axis);
        return mesh;
    }

private:
    std::vector<PieceDef> pieces_;
    std::optional<ReflectionLine> mirror_;
    std::optional<Point2> corner_;
    double target_;
    PolygonRegion half_;

    std::vector<Point2> canon_;
    std::vector<std::vector<int>> rings_;  // real pieces, then the mirrored half if any
    std::map<int, int> mirror_of_;         // mirrored-half id -> half id
    std::set<std::pair<int, int>> half_edges_;
    std::set<std::pair<int, int>> mirror_edges_;
    std::map<std::pair<int, int>, std::vector<Point2>> interior_;  // ordered from lower id
    std::vector<PieceMesh> meshes_;

    static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

    int canon_id(Point2 p) {
        for (std::size_t i = 0; i < canon_.size(); ++i) {
            if (distance(canon_[i], p) <= kPointTol) return static_cast<int>(i);
        }
        canon_.push_back(p);
        return static_cast<int>(canon_.size()) - 1;
    }

    void build_rings() {
        std::vector<Point2> keys;
        for (const auto& piece : pieces_) keys.insert(keys.end(), piece.ring.begin(), piece.ring.end());
        if (corner_) keys.push_back(*corner_);
        if (mirror_) {
            const std::size_t n = keys.size();
            for (std::size_t i = 0; i < n; ++i) keys.push_back(reflect_point(keys[i], *mirror_));
        }
        std::vector<std::vector<Point2>> split;
        for (const auto& piece : pieces_) split.push_back(split_ring(piece.ring, keys));
        std::vector<Point2> mirrored;
        if (mirror_) {
            const auto& h = split[0];
            const std::size_t n = h.size();
            for (std::size_t k = 0; k < n; ++k) mirrored.push_back(mirror_point(h[(n - k) % n], *mirror_));
        }
        for (const auto& ring : split) {
            std::vector<int> ids;
            for (Point2 p : ring) ids.push_back(canon_id(p));
            rings_.push_back(std::move(ids));
        }
        if (mirror_) {
            std::vector<int> ids;
            const std::size_t n = mirrored.size();
            for (std::size_t k = 0; k < n; ++k) {
                const int id = canon_id(mirrored[k]);
                ids.push_back(id);
                mirror_of_[id] = rings_[0][(n - k) % n];
            }
            rings_.push_back(std::move(ids));
            for_each_edge(0, [&](int a, int b) { half_edges_.insert(key(a, b)); });
            for_each_edge(rings_.size() - 1, [&](int a, int b) { mirror_edges_.insert(key(a, b)); });
        }
        for (const auto& ring : rings_) {
            for (std::size_t k = 0; k < ring.size(); ++k) {
                if (ring[k] == ring[(k + 1) % ring.size()]) {
                    throw GeometryError("degenerate boundary edge at " + format_point(canon_[ring[k]]));
                }
            }
        }
    }

    template <typename F>
    void for_each_edge(std::size_t r, F&& f) const {
        const auto& ring = rings_[r];
        for (std::size_t k = 0; k < ring.size(); ++k) f(ring[k], ring[(k + 1) % ring.size()]);
    }

    bool is_slave(int a, int b) const {
        const auto k = key(a, b);
        return mirror_ && !half_edges_.count(k) && mirror_edges_.count(k);
    }

    void seed_edges() {
        for (std::size_t r = 0; r < rings_.size(); ++r) {
            for_each_edge(r, [&](int a, int b) {
                if (is_slave(a, b) || interior_.count(key(a, b))) return;
                const auto [lo, hi] = key(a, b);
                const double len = distance(canon_[lo], canon_[hi]);
                const int n = std::max(1, static_cast<int>(std::ceil(len / target_ - 1e-9)));
                std::vector<Point2> pts;
                for (int i = 1; i < n; ++i) pts.push_back(lerp(canon_[lo], canon_[hi], static_cast<double>(i) / n));
                interior_[key(a, b)] = std::move(pts);
            });
        }
    }

    std::vector<Point2> chain(int a, int b) const {
        std::vector<Point2> out{canon_[a]};
        if (is_slave(a, b)) {
            const auto master = chain(mirror_of_.at(a), mirror_of_.at(b));
            for (std::size_t i = 1; i + 1 < master.size(); ++i) out.push_back(mirror_point(master[i], *mirror_));
        } else {
            const auto& pts = interior_.at(key(a, b));
            if (a < b) {
                out.insert(out.end(), pts.begin(), pts.end());
            } else {
                out.insert(out.end(), pts.rbegin(), pts.rend());
            }
        }
        out.push_back(canon_[b]);
        return out;
    }

    void add_points(int a, int b, const std::vector<Point2>& pts) {
        if (is_slave(a, b)) {
            std::vector<Point2> reflected;
            for (Point2 p : pts) reflected.push_back(mirror_point(p, *mirror_));
            add_points(mirror_of_.at(a), mirror_of_.at(b), reflected);
            return;
        }
        const auto k = key(a, b);
        auto& list = interior_.at(k);
        const Point2 origin = canon_[k.first];
        const Point2 dir = canon_[k.second] - origin;
        list.insert(list.end(), pts.begin(), pts.end());
        std::sort(list.begin(), list.end(),
                  [&](Point2 l, Point2 r) { return dot(l - origin, dir) < dot(r - origin, dir); });
    }

    void iterate() {
        const std::size_t real = pieces_.size();
        meshes_.resize(real);
        for (int pass = 0; pass < 40; ++pass) {
            bool changed = false;
            for (std::size_t p = 0; p < real; ++p) {
                PieceInput in;
                in.target_edge = target_;
                in.jitter_seed = 0x5eed1234u + static_cast<std::uint32_t>(p);
                std::vector<std::pair<int, int>> edges;
                for_each_edge(p, [&](int a, int b) {
                    edges.push_back({a, b});
                    in.chains.push_back(chain(a, b));
                });
                meshes_[p] = mesh_piece(in);
                for (std::size_t c = 0; c < edges.size(); ++c) {
                    const auto& before = in.chains[c];
                    const auto& after = meshes_[p].chains[c];
                    if (after.size() == before.size()) continue;
                    std::vector<Point2> fresh;
                    for (std::size_t i = 1; i + 1 < after.size(); ++i) {
                        const bool known = std::any_of(before.begin(), before.end(),
                                                       [&](Point2 q) { return distance(q, after[i]) <= 1e-12; });
                        if (!known) fresh.push_back(after[i]);
                    }
                    if (!fresh.empty()) {
                        add_points(edges[c].first, edges[c].second, fresh);
                        changed = true;
                    }
                }
            }
            if (!changed) return;
        }
        throw GeometryError("shared boundary subdivisions did not settle between pieces");
    }

    Mesh assemble() const {
        PointMerger merger;
        Mesh mesh;
        auto add_piece = [&](const PieceMesh& pm, RegionTag tag, bool reflect) {
            std::vector<std::size_t> local;
            local.reserve(pm.vertices.size());
            for (Point2 v : pm.vertices) local.push_back(merger.find_or_add(reflect ? mirror_point(v, *mirror_) : v));
            for (const auto& t : pm.triangles) {
                if (reflect) {
                    mesh.triangles.push_back({local[t[0]], local[t[2]], local[t[1]]});
                } else {
                    mesh.triangles.push_back({local[t[0]], local[t[1]], local[t[2]]});
                }
                mesh.region_tag.push_back(tag);
            }
        };
        add_piece(meshes_[0], pieces_[0].tag, false);
        if (mirror_) add_piece(meshes_[0], pieces_[0].tag, true);
        for (std::size_t p = 1; p < pieces_.size(); ++p) add_piece(meshes_[p], pieces_[p].tag, false);
        mesh.vertices = std::move(merger.points());
        return mesh;
    }

    void finish(Mesh& mesh, const PolygonRegion& omega1, const std::optional<ReflectionLine>& axis) const {
        std::map<std::pair<std::size_t, std::size_t>, int> uses;
        for (const auto& t : mesh.triangles) {
            for (int i = 0; i < 3; ++i) {
                const std::size_t a = t[i], b = t[(i + 1) % 3];
                ++uses[{std::min(a, b), std::max(a, b)}];
            }
        }
        std::vector<Segment> interfaces;
        std::vector<PolygonRegion> polys{omega1};
        for (std::size_t p = 1; p < pieces_.size(); ++p) polys.push_back({pieces_[p].ring, pieces_[p].tag});
        for (std::size_t i = 0; i < polys.size(); ++i) {
            for (std::size_t j = i + 1; j < polys.size(); ++j) {
                auto s = shared_boundary(polys[i], polys[j]);
                interfaces.insert(interfaces.end(), s.begin(), s.end());
            }
        }
        if (mirror_) {
            PolygonRegion other;
            for (auto it = half_.vertices.rbegin(); it != half_.vertices.rend(); ++it) {
                other.vertices.push_back(mirror_point(*it, *mirror_));
            }
            auto s = shared_boundary(half_, other);
            interfaces.insert(interfaces.end(), s.begin(), s.end());
        }
        for (const auto& [edge, count] : uses) {
            const Point2 mid = lerp(mesh.vertices[edge.first], mesh.vertices[edge.second], 0.5);
            if (count > 2) throw GeometryError("edge shared by more than two triangles near " + format_point(mid));
            if (count != 1) continue;
            for (const Segment& s : interfaces) {
                if (distance_to_segment(mid, s.a, s.b) <= kPointTol) {
                    throw GeometryError("non-conforming interface near " + format_point(mid));
                }
            }
            mesh.boundary_edges.push_back(edge);
        }
        if (axis) {
            std::vector<char> in_omega1(mesh.vertices.size(), 0);
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                if (mesh.region_tag[t] != RegionTag::Omega1) continue;
                for (std::size_t v : mesh.triangles[t]) in_omega1[v] = 1;
            }
            for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
                if (in_omega1[v] && std::abs(axis->signed_distance(mesh.vertices[v])) <= kPointTol) {
                    mesh.axis_vertices.push_back(v);
                }
            }
        }
        if (corner_) {
            for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
                if (distance(mesh.vertices[v], *corner_) <= kPointTol) mesh.corner_vertex = v;
            }
            if (!mesh.corner_vertex) throw GeometryError("corner point " + format_point(*corner_) + " is not a vertex");
        }
    }
};

double tri_area(Point2 a, Point2 b, Point2 c) { return 0.5 * orient(a, b, c); }

/// Barycentric coordinates of p in (a, b, c).
std::array<double, 3> barycentric(Point2 p, Point2 a, Point2 b, Point2 c) {
    const double total = orient(a, b, c);
    return {orient(p, b, c) / total, orient(a, p, c) / total, orient(a, b, p) / total};
}

/// Closest point of the triangle to p, as barycentric coordinates, and its distance.
std::pair<std::array<double, 3>, double> closest_on_triangle(Point2 p, Point2 a, Point2 b, Point2 c) {
    auto bc = barycentric(p, a, b, c);
    if (bc[0] >= 0.0 && bc[1] >= 0.0 && bc[2] >= 0.0) return {bc, 0.0};
    const std::array<Point2, 3> v{a, b, c};
    double best = 1e300;
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const Point2 e0 = v[i];
        const Point2 e1 = v[(i + 1) % 3];
        const Point2 d = e1 - e0;
        const double t = std::clamp(dot(p - e0, d) / dot(d, d), 0.0, 1.0);
        const double dist = distance(p, lerp(e0, e1, t));
        if (dist < best) {
            best = dist;
            out = {0.0, 0.0, 0.0};
            out[i] = 1.0 - t;
            out[(i + 1) % 3] = t;
        }
    }
    return {out, best};
}

class TriangleGrid {
public:
    explicit TriangleGrid(const Mesh& mesh) : mesh_(mesh) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (Point2 p : mesh.vertices) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const double span = std::max(xmax - xmin, ymax - ymin);
        const double cells = std::max(1.0, std::sqrt(static_cast<double>(mesh.triangles.size())));
        cell_ = std::max(span / cells, 1e-9);
        x0_ = xmin - kSnapTol;
        y0_ = ymin - kSnapTol;
        nx_ = static_cast<long>((xmax - xmin + 2 * kSnapTol) / cell_) + 1;
        ny_ = static_cast<long>((ymax - ymin + 2 * kSnapTol) / cell_) + 1;
        bins_.resize(static_cast<std::size_t>(nx_ * ny_));
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
            for (std::size_t v : mesh.triangles[t]) {
                bx0 = std::min(bx0, mesh.vertices[v].x);
                bx1 = std::max(bx1, mesh.vertices[v].x);
                by0 = std::min(by0, mesh.vertices[v].y);
                by1 = std::max(by1, mesh.vertices[v].y);
            }
            const long i0 = clamp_x(bx0 - kSnapTol), i1 = clamp_x(bx1 + kSnapTol);
            const long j0 = clamp_y(by0 - kSnapTol), j1 = clamp_y(by1 + kSnapTol);
            for (long i = i0; i <= i1; ++i) {
                for (long j = j0; j <= j1; ++j) bins_[static_cast<std::size_t>(j * nx_ + i)].push_back(t);
            }
        }
    }

    /// Triangle and barycentrics of the nearest point within `reach`; distance
    /// is negative when nothing is that close.
    std::pair<std::size_t, std::array<double, 3>> find(Point2 p, double& dist) const {
        dist = -1.0;
        std::pair<std::size_t, std::array<double, 3>> best{0, {}};
        const long i = static_cast<long>(std::floor((p.x - x0_) / cell_));
        const long j = static_cast<long>(std::floor((p.y - y0_) / cell_));
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return best;
        double best_d = 1e300;
        for (std::size_t t : bins_[static_cast<std::size_t>(j * nx_ + i)]) {
            const auto& tri = mesh_.triangles[t];
            auto [bc, d] = closest_on_triangle(p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                               mesh_.vertices[tri[2]]);
            if (d < best_d) {
                best_d = d;
                best = {t, bc};
                if (d == 0.0) break;
            }
        }
        if (best_d <= kSnapTol) dist = best_d;
        return best;
    }

    std::pair<std::size_t, std::array<double, 3>> nearest(Point2 p, double& dist) const {
        double best_d = 1e300;
        std::pair<std::size_t, std::array<double, 3>> best{0, {}};
        for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
            const auto& tri = mesh_.triangles[t];
            auto [bc, d] = closest_on_triangle(p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                               mesh_.vertices[tri[2]]);
            if (d < best_d) {
                best_d = d;
                best = {t, bc};
            }
        }
        dist = best_d;
        return best;
    }

private:
    const Mesh& mesh_;
    double cell_ = 1.0, x0_ = 0.0, y0_ = 0.0;
    long nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> bins_;

    long clamp_x(double x) const { return std::clamp(static_cast<long>(std::floor((x - x0_) / cell_)), 0L, nx_ - 1); }
    long clamp_y(double y) const { return std::clamp(static_cast<long>(std::floor((y - y0_) / cell_)), 0L, ny_ - 1); }
};

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    return tri_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh::total_area() const {
    double total = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) total += triangle_area(t);
    return total;
}

Mesh triangulate(const DomainSpec& spec, double target_edge) {
    spec.validate(false);
    if (!(target_edge > 0.0) || !(target_edge < spec.aperture_h)) {
        std::ostringstream os;
        os << "target_edge " << target_edge << " must satisfy 0 < target_edge < aperture_h = " << spec.aperture_h;
        throw ResolutionError(os.str());
    }
    std::vector<PieceDef> pieces{{spec.omega1.vertices, RegionTag::Omega1}, {spec.omega2.vertices, RegionTag::Omega2}};
    if (spec.passage) pieces.push_back({spec.passage->vertices, RegionTag::Passage});
    std::optional<ReflectionLine> mirror;
    if (spec.omega1_is_symmetric()) mirror = spec.symmetry_line;
    MultiPieceMesher mesher(std::move(pieces), mirror, spec.corner_point, target_edge);
    Mesh mesh = mesher.run(spec.symmetry_line);
    try {
        validate_mesh(mesh, spec.area());
    } catch (const ValidationError& e) {
        throw GeometryError(e.what());
    }
    return mesh;
}

Mesh triangulate_region(const PolygonRegion& region, double target_edge, const std::optional<MirrorSpec>& mirror) {
    validate_polygon(region);
    if (!(target_edge > 0.0)) throw ResolutionError("target_edge must be positive");
    std::optional<ReflectionLine> line;
    std::optional<Point2> corner;
    if (mirror) {
        mirror->line.validate();
        for (Point2 p : region.vertices) {
            const Point2 r = reflect_point(p, mirror->line);
            const bool matched = std::any_of(region.vertices.begin(), region.vertices.end(),
                                             [&](Point2 q) { return distance(q, r) <= kPointTol; });
            if (!matched) throw ValidationError("region is not symmetric about the mirror line");
        }
        line = mirror->line;
        corner = mirror->corner;
    }
    MultiPieceMesher mesher({{region.vertices, RegionTag::Omega1}}, line, corner, target_edge);
    Mesh mesh = mesher.run(line);
    try {
        validate_mesh(mesh, polygon_area(region));
    } catch (const ValidationError& e) {
        throw GeometryError(e.what());
    }
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    out.vertices = mesh.vertices;
    out.symmetry_line = mesh.symmetry_line;
    out.corner_vertex = mesh.corner_vertex;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
    auto midpoint = [&](std::size_t a, std::size_t b) {
        const auto k = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = mid.find(k);
        if (it != mid.end()) return it->second;
        out.vertices.push_back(lerp(mesh.vertices[k.first], mesh.vertices[k.second], 0.5));
        mid[k] = out.vertices.size() - 1;
        return out.vertices.size() - 1;
    };
    out.triangles.reserve(4 * mesh.triangles.size());
    out.region_tag.reserve(4 * mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto [a, b, c] = mesh.triangles[t];
        const std::size_t ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        for (const auto& tri : {std::array<std::size_t, 3>{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}}) {
            out.triangles.push_back(tri);
            out.region_tag.push_back(mesh.region_tag[t]);
        }
    }
    for (const auto& [a, b] : mesh.boundary_edges) {
        const std::size_t m = mid.at({std::min(a, b), std::max(a, b)});
        out.boundary_edges.push_back({std::min(a, m), std::max(a, m)});
        out.boundary_edges.push_back({std::min(m, b), std::max(m, b)});
    }
    std::vector<char> on_axis(out.vertices.size(), 0);
    for (std::size_t v : mesh.axis_vertices) on_axis[v] = 1;
    out.axis_vertices = mesh.axis_vertices;
    for (const auto& [k, m] : mid) {
        if (on_axis[k.first] && on_axis[k.second]) out.axis_vertices.push_back(m);
    }
    std::sort(out.axis_vertices.begin(), out.axis_vertices.end());
    return out;
}

std::vector<double> interpolate_p1(const Mesh& source, const std::vector<double>& values, const Mesh& target,
                                   OutsidePolicy policy) {
    if (values.size() != source.n_vertices()) {
        throw ContractError("interpolate_p1: expected " + std::to_string(source.n_vertices()) + " values, got " +
                            std::to_string(values.size()));
    }
    const TriangleGrid grid(source);
    std::vector<double> out(target.n_vertices(), 0.0);
    std::vector<std::size_t> outside;
    std::ostringstream detail;
    for (std::size_t v = 0; v < target.n_vertices(); ++v) {
        const Point2 p = target.vertices[v];
        double dist;
        auto [t, bc] = grid.find(p, dist);
        if (dist < 0.0) {
            if (policy == OutsidePolicy::Error) {
                if (outside.size() < 8) {
                    detail << (outside.empty() ? "" : ", ") << v << " " << format_point(p);
                }
                outside.push_back(v);
                continue;
            }
            std::tie(t, bc) = grid.nearest(p, dist);
        }
        const auto& tri = source.triangles[t];
        out[v] = bc[0] * values[tri[0]] + bc[1] * values[tri[1]] + bc[2] * values[tri[2]];
    }
    if (!outside.empty()) {
        throw ExtrapolationError(std::to_string(outside.size()) +
                                 " target vertices lie outside the source mesh: " + detail.str() +
                                 (outside.size() > 8 ? ", ..." : ""));
    }
    return out;
}

MeshQuality mesh_quality(const Mesh& mesh) {
    MeshQuality q;
    q.n_vertices = mesh.n_vertices();
    q.n_triangles = mesh.n_triangles();
    q.min_angle = 180.0;
    for (const auto& t : mesh.triangles) {
        const Point2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        q.min_angle = std::min(q.min_angle, min_angle_deg(a, b, c));
        const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
        const double area = tri_area(a, b, c);
        const double circum = la * lb * lc / (4.0 * area);
        const double in = 2.0 * area / (la + lb + lc);
        q.max_aspect = std::max(q.max_aspect, circum / (2.0 * in));
    }
    if (mesh.triangles.empty()) q.min_angle = 0.0;
    return q;
}

void validate_mesh(const Mesh& mesh, std::optional<double> expected_area, double min_angle_floor) {
    const std::size_t nv = mesh.n_vertices();
    if (mesh.triangles.empty()) throw ValidationError("mesh has no triangles");
    if (mesh.region_tag.size() != mesh.triangles.size()) throw ValidationError("region_tag size mismatch");
    std::map<std::pair<std::size_t, std::size_t>, int> uses;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (std::size_t v : tri) {
            if (v >= nv) throw ValidationError("triangle " + std::to_string(t) + " references a missing vertex");
        }
        if (!(mesh.triangle_area(t) > 0.0)) {
            throw ValidationError("triangle " + std::to_string(t) + " has non-positive area");
        }
        const double angle = min_angle_deg(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
        if (angle < min_angle_floor) {
            std::ostringstream os;
            os << "triangle " << t << " near " << format_point(mesh.vertices[tri[0]]) << " has minimum angle "
               << angle << " below " << min_angle_floor;
            throw ValidationError(os.str());
        }
        for (int i = 0; i < 3; ++i) {
            const std::size_t a = tri[i], b = tri[(i + 1) % 3];
            ++uses[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> boundary;
    for (auto [a, b] : mesh.boundary_edges) boundary.insert({std::min(a, b), std::max(a, b)});
    for (const auto& [edge, count] : uses) {
        if (count > 2) throw ValidationError("edge used by more than two triangles");
        if ((count == 1) != (boundary.count(edge) == 1)) {
            throw ValidationError("boundary_edges disagrees with triangle adjacency near " +
                                  format_point(mesh.vertices[edge.first]));
        }
    }
    if (boundary.size() != mesh.boundary_edges.size()) throw ValidationError("duplicate boundary edges");
    if (expected_area) {
        const double area = mesh.total_area();
        if (std::abs(area - *expected_area) > 1e-9 * std::abs(*expected_area)) {
            std::ostringstream os;
            os.precision(17);
            os << "mesh area " << area << " differs from domain area " << *expected_area;
            throw ValidationError(os.str());
        }
    }
    if (mesh.symmetry_line) {
        for (std::size_t v : mesh.axis_vertices) {
            if (v >= nv || std::abs(mesh.symmetry_line->signed_distance(mesh.vertices[v])) > kPointTol) {
                throw ValidationError("axis vertex " + std::to_string(v) + " is off the symmetry line");
            }
        }
    }
}

std::vector<std::size_t> region_vertices(const Mesh& mesh, RegionTag tag) {
    std::vector<char> hit(mesh.n_vertices(), 0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        if (mesh.region_tag[t] != tag) continue;
        for (std::size_t v : mesh.triangles[t]) hit[v] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < hit.size(); ++v) {
        if (hit[v]) out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> boundary_vertices(const Mesh& mesh) {
    std::vector<std::size_t> out;
    for (auto [a, b] : mesh.boundary_edges) {
        out.push_back(a);
        out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string mesh_to_json(const Mesh& mesh) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (Point2 p : mesh.vertices) j["vertices"].push_back({p.x, p.y});
    j["triangles"] = mesh.triangles;
    j["tags"] = nlohmann::json::array();
    for (RegionTag t : mesh.region_tag) j["tags"].push_back(std::string(to_string(t)));
    j["boundary_edges"] = mesh.boundary_edges;
    j["axis_vertices"] = mesh.axis_vertices;
    if (mesh.symmetry_line) {
        j["symmetry_line"] = {{"point", {mesh.symmetry_line->point.x, mesh.symmetry_line->point.y}},
                              {"direction", {mesh.symmetry_line->direction.x, mesh.symmetry_line->direction.y}}};
    }
    if (mesh.corner_vertex) j["corner_vertex"] = *mesh.corner_vertex;
    return j.dump();
}

Mesh mesh_from_json(const std::string& text) {
    Mesh mesh;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        for (const auto& p : j.at("vertices")) mesh.vertices.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        mesh.triangles = j.at("triangles").get<std::vector<std::array<std::size_t, 3>>>();
        for (const auto& t : j.at("tags")) {
            const std::string name = t.get<std::string>();
            if (name == to_string(RegionTag::Omega1)) mesh.region_tag.push_back(RegionTag::Omega1);
            else if (name == to_string(RegionTag::Omega2)) mesh.region_tag.push_back(RegionTag::Omega2);
            else if (name == to_string(RegionTag::Passage)) mesh.region_tag.push_back(RegionTag::Passage);
            else throw InputError("unknown region tag '" + name + "'");
        }
        mesh.boundary_edges = j.at("boundary_edges").get<std::vector<std::pair<std::size_t, std::size_t>>>();
        mesh.axis_vertices = j.at("axis_vertices").get<std::vector<std::size_t>>();
        if (j.contains("symmetry_line")) {
            const auto& l = j["symmetry_line"];
            mesh.symmetry_line = ReflectionLine{{l.at("point").at(0).get<double>(), l.at("point").at(1).get<double>()},
                                                {l.at("direction").at(0).get<double>(),
                                                 l.at("direction").at(1).get<double>()}};
        }
        if (j.contains("corner_vertex")) mesh.corner_vertex = j["corner_vertex"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed mesh JSON: ") + e.what());
    }
    if (mesh.region_tag.size() != mesh.triangles.size()) throw InputError("mesh JSON: one tag per triangle expected");
    for (const auto& t : mesh.triangles)
        for (std::size_t v : t)
            if (v >= mesh.vertices.size()) throw InputError("mesh JSON: triangle references a missing vertex");
    return mesh;
}

void write_off(const Mesh& mesh, std::ostream& os) {
    os.precision(17);
    os << "OFF\n" << mesh.n_vertices() << " " << mesh.n_triangles() << " 0\n";
    for (Point2 p : mesh.vertices) os << p.x << " " << p.y << " 0\n";
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace eigenlocal
