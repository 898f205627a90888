#include "eigenlocal/triangulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

double min_angle_deg(Point2 a, Point2 b, Point2 c) {
    const double la = distance(b, c);
    const double lb = distance(c, a);
    const double lc = distance(a, b);
    // Smallest angle sits opposite the shortest edge.
    double opp = la, s1 = lb, s2 = lc;
    if (lb < opp) { opp = lb; s1 = la; s2 = lc; }
    if (lc < opp) { opp = lc; s1 = la; s2 = lb; }
    const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
    return std::acos(cosv) * 180.0 / std::numbers::pi;
}

namespace {

constexpr int kNone = -1;
constexpr int kInterior = -1;
constexpr int kCorner = -2;
constexpr int kSuper = -3;

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::pair<int, int> decode_key(std::uint64_t key) {
    return {static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)};
}

// Positive when d lies strictly inside the circumcircle of counterclockwise (a, b, c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx);
}

// Side of p relative to the directed line a -> b, evaluated so that swapping a
// and b flips the sign exactly.
double side_of(Point2 a, Point2 b, Point2 p) {
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) return -orient(b, a, p);
    return orient(a, b, p);
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
    const Point2 ab = b - a;
    const Point2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = dot(ab, ab);
    const double ac2 = dot(ac, ac);
    return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{kNone, kNone, kNone};  // nb[i] lies across the edge opposite v[i]
    bool alive = true;
};

struct CavityEdge {
    int a;
    int b;
    int outer;
    int inner;
};

struct Cavity {
    std::vector<int> tris;
    std::vector<CavityEdge> boundary;
};

class Triangulator {
public:
    explicit Triangulator(const PieceInput& input) : in_(input) {
        if (in_.chains.size() < 2) throw GeometryError("piece boundary needs at least two chains");
        if (!(in_.target_edge > 0.0)) throw GeometryError("target edge must be positive");
        const double theta = in_.min_angle_deg * std::numbers::pi / 180.0;
        max_ratio_ = 1.0 / (2.0 * std::sin(theta));
        max_radius_ = in_.target_edge;
        min_split_ = 1e-3 * in_.target_edge;
    }

    PieceMesh run() {
        build_super_triangle();
        insert_boundary();
        recover_segments();
        insert_lattice();
        remove_exterior();
        refine();
        smooth();
        return extract();
    }

private:
    const PieceInput& in_;
    double max_ratio_ = 0.0;
    double max_radius_ = 0.0;
    double min_split_ = 0.0;

    std::vector<Point2> pts_;
    std::vector<int> chain_of_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<int> vert_tri_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    std::unordered_map<std::uint64_t, int> constrained_;
    std::vector<std::pair<int, int>> pending_segments_;  // (a, b) with chain via chain_lookup_
    std::unordered_map<std::uint64_t, int> segment_chain_;
    std::vector<int> chain_start_;
    std::vector<int> chain_end_;
    int last_ = 0;
    std::size_t insert_budget_ = 0;

    [[noreturn]] void fail(const std::string& what, Point2 where) const {
        std::ostringstream os;
        os.precision(10);
        os << "triangulation failure: " << what << " near (" << where.x << ", " << where.y << ")";
        throw GeometryError(os.str());
    }

    int add_vertex(Point2 p, int chain) {
        pts_.push_back(p);
        chain_of_.push_back(chain);
        vert_tri_.push_back(kNone);
        return static_cast<int>(pts_.size()) - 1;
    }

    int new_tri(int a, int b, int c) {
        Tri t;
        t.v = {a, b, c};
        if (!free_.empty()) {
            const int id = free_.back();
            free_.pop_back();
            tris_[id] = t;
            mark_[id] = 0;
            return id;
        }
        tris_.push_back(t);
        mark_.push_back(0);
        return static_cast<int>(tris_.size()) - 1;
    }

    void kill_tri(int t) {
        tris_[t].alive = false;
        free_.push_back(t);
    }

    bool is_constrained(int a, int b) const { return constrained_.count(edge_key(a, b)) != 0; }

    void build_super_triangle() {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& chain : in_.chains) {
            for (Point2 p : chain) {
                xmin = std::min(xmin, p.x);
                xmax = std::max(xmax, p.x);
                ymin = std::min(ymin, p.y);
                ymax = std::max(ymax, p.y);
            }
        }
        const double span = std::max(xmax - xmin, ymax - ymin);
        const Point2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        add_vertex({c.x - 20.0 * span, c.y - 10.0 * span}, kSuper);
        add_vertex({c.x + 20.0 * span, c.y - 10.0 * span}, kSuper);
        add_vertex({c.x, c.y + 20.0 * span}, kSuper);
        const int t = new_tri(0, 1, 2);
        for (int i = 0; i < 3; ++i) vert_tri_[i] = t;
        last_ = t;
    }

    // ---------------------------------------------------------------- location

    /// Returns the triangle containing p, or kNone after walking out through a
    /// hull edge (reported in exit_tri / exit_idx).
    int locate(Point2 p, int start, int& exit_tri, int& exit_idx) const {
        exit_tri = kNone;
        exit_idx = -1;
        int t = (start >= 0 && tris_[start].alive) ? start : last_;
        if (!tris_[t].alive) {
            t = kNone;
            for (std::size_t i = 0; i < tris_.size(); ++i) {
                if (tris_[i].alive) {
                    t = static_cast<int>(i);
                    break;
                }
            }
        }
        const std::size_t cap = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < cap; ++step) {
            const Tri& T = tris_[t];
            bool moved = false;
            for (int k = 0; k < 3; ++k) {
                const int i = static_cast<int>((k + step) % 3);
                const Point2 a = pts_[T.v[(i + 1) % 3]];
                const Point2 b = pts_[T.v[(i + 2) % 3]];
                if (side_of(a, b, p) < 0.0) {
                    if (T.nb[i] == kNone) {
                        exit_tri = t;
                        exit_idx = i;
                        return kNone;
                    }
                    t = T.nb[i];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
        // Walk did not settle; take the triangle p is least outside of.
        int best = kNone;
        double best_margin = -1e300;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& T = tris_[i];
            if (!T.alive) continue;
            const double margin = std::min({side_of(pts_[T.v[0]], pts_[T.v[1]], p),
                                            side_of(pts_[T.v[1]], pts_[T.v[2]], p),
                                            side_of(pts_[T.v[2]], pts_[T.v[0]], p)});
            if (margin > best_margin) {
                best_margin = margin;
                best = static_cast<int>(i);
            }
        }
        if (best != kNone && best_margin >= -1e-12) return best;
        return kNone;
    }

    bool find_edge(int a, int b, int& tri, int& opp) const {
        const int t0 = vert_tri_[a];
        if (t0 == kNone) return false;
        auto index_of = [&](int t, int v) {
            for (int i = 0; i < 3; ++i) {
                if (tris_[t].v[i] == v) return i;
            }
            return -1;
        };
        auto check = [&](int t) {
            const int i = index_of(t, a);
            if (tris_[t].v[(i + 1) % 3] == b) {
                tri = t;
                opp = (i + 2) % 3;
                return true;
            }
            if (tris_[t].v[(i + 2) % 3] == b) {
                tri = t;
                opp = (i + 1) % 3;
                return true;
            }
            return false;
        };
        int t = t0;
        do {
            if (check(t)) return true;
            t = tris_[t].nb[(index_of(t, a) + 1) % 3];
        } while (t != kNone && t != t0);
        if (t == kNone) {
            t = tris_[t0].nb[(index_of(t0, a) + 2) % 3];
            while (t != kNone && t != t0) {
                if (check(t)) return true;
                t = tris_[t].nb[(index_of(t, a) + 2) % 3];
            }
        }
        return false;
    }

    // ----------------------------------------------------------------- cavity

    bool in_circle_of(int t, Point2 p) const {
        const Tri& T = tris_[t];
        return incircle(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], p) > 0.0;
    }

    /// Bowyer-Watson cavity of p grown from `seeds` without crossing
    /// constrained edges. `split` names a constrained edge that p lies on.
    bool compute_cavity(Point2 p, const std::vector<int>& seeds, std::pair<int, int> split, Cavity& cav) {
        cav.tris.clear();
        cav.boundary.clear();
        ++stamp_;
        for (int s : seeds) {
            mark_[s] = stamp_;
            cav.tris.push_back(s);
        }
        for (std::size_t q = 0; q < cav.tris.size(); ++q) {
            const Tri& T = tris_[cav.tris[q]];
            for (int i = 0; i < 3; ++i) {
                const int nb = T.nb[i];
                if (nb == kNone || mark_[nb] == stamp_) continue;
                if (is_constrained(T.v[(i + 1) % 3], T.v[(i + 2) % 3])) continue;
                if (in_circle_of(nb, p)) {
                    mark_[nb] = stamp_;
                    cav.tris.push_back(nb);
                }
            }
        }
        auto is_split = [&](int a, int b) {
            return (a == split.first && b == split.second) || (a == split.second && b == split.first);
        };
        // Shrink until every boundary edge sees p strictly on its inner side.
        for (int round = 0; round < 64; ++round) {
            cav.boundary.clear();
            int bad_inner = kNone;
            for (int t : cav.tris) {
                const Tri& T = tris_[t];
                for (int i = 0; i < 3; ++i) {
                    const int nb = T.nb[i];
                    if (nb != kNone && mark_[nb] == stamp_) continue;
                    const int a = T.v[(i + 1) % 3];
                    const int b = T.v[(i + 2) % 3];
                    cav.boundary.push_back({a, b, nb, t});
                    if (!is_split(a, b) && !(orient(pts_[a], pts_[b], p) > 0.0) && bad_inner == kNone) {
                        bad_inner = t;
                    }
                }
            }
            if (bad_inner == kNone) break;
            if (std::find(seeds.begin(), seeds.end(), bad_inner) != seeds.end()) return false;
            mark_[bad_inner] = stamp_ - 1;
            cav.tris.erase(std::find(cav.tris.begin(), cav.tris.end(), bad_inner));
            if (round == 63) return false;
        }
        // Every vertex of the cavity must lie on its boundary.
        std::vector<int> bverts;
        for (const auto& e : cav.boundary) bverts.push_back(e.a);
        std::sort(bverts.begin(), bverts.end());
        for (int t : cav.tris) {
            for (int v : tris_[t].v) {
                if (!std::binary_search(bverts.begin(), bverts.end(), v)) return false;
            }
        }
        return true;
    }

    int commit(Point2 p, int chain, const Cavity& cav, std::pair<int, int> split, std::vector<int>* created) {
        const int vp = add_vertex(p, chain);
        auto is_split = [&](int a, int b) {
            return (a == split.first && b == split.second) || (a == split.second && b == split.first);
        };
        for (int t : cav.tris) kill_tri(t);
        struct Made {
            int tri, a, b;
        };
        std::vector<Made> made;
        made.reserve(cav.boundary.size());
        for (const auto& e : cav.boundary) {
            if (is_split(e.a, e.b)) continue;
            const int t = new_tri(e.a, e.b, vp);
            tris_[t].nb[2] = e.outer;
            if (e.outer != kNone) {
                Tri& O = tris_[e.outer];
                for (int j = 0; j < 3; ++j) {
                    const int oa = O.v[(j + 1) % 3];
                    const int ob = O.v[(j + 2) % 3];
                    if (oa == e.b && ob == e.a) O.nb[j] = t;
                }
            }
            made.push_back({t, e.a, e.b});
        }
        for (const Made& m : made) {
            Tri& T = tris_[m.tri];
            // Edge (b, vp) is opposite a; its partner is the fan triangle starting at b.
            for (const Made& o : made) {
                if (o.a == m.b) T.nb[0] = o.tri;
                if (o.b == m.a) T.nb[1] = o.tri;
            }
            for (int v : T.v) vert_tri_[v] = m.tri;
            if (created) created->push_back(m.tri);
        }
        if (split.first != kNone) {
            const int chain_id = constrained_.at(edge_key(split.first, split.second));
            constrained_.erase(edge_key(split.first, split.second));
            constrained_[edge_key(split.first, vp)] = chain_id;
            constrained_[edge_key(vp, split.second)] = chain_id;
        }
        if (!made.empty()) last_ = made.front().tri;
#ifdef EIGENLOCAL_TRI_DEBUG
        debug_check(p);
#endif
        return vp;
    }

    /// Inserts an unconstrained point; returns its vertex id or kNone when it
    /// duplicates an existing vertex.
    int insert_free(Point2 p, int chain) {
        int et, ei;
        const int t = locate(p, last_, et, ei);
        if (t == kNone) fail("point outside the working triangulation", p);
        for (int v : tris_[t].v) {
            if (distance(pts_[v], p) <= 1e-14 * (1.0 + norm(p))) return kNone;
        }
        Cavity cav;
        if (!compute_cavity(p, {t}, {kNone, kNone}, cav)) fail("could not form an insertion cavity", p);
        return commit(p, chain, cav, {kNone, kNone}, nullptr);
    }

    // ------------------------------------------------------- initial building

    void insert_boundary() {
        const std::size_t nc = in_.chains.size();
        std::vector<std::vector<int>> ids(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& chain = in_.chains[c];
            if (chain.size() < 2) throw GeometryError("boundary chain with fewer than two points");
            const auto& next = in_.chains[(c + 1) % nc];
            if (!(chain.back() == next.front())) throw GeometryError("boundary chains do not join up");
        }
        std::vector<int> corner_id(nc);
        for (std::size_t c = 0; c < nc; ++c) corner_id[c] = add_vertex(in_.chains[c].front(), kCorner);
        chain_start_.resize(nc);
        chain_end_.resize(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& chain = in_.chains[c];
            ids[c].push_back(corner_id[c]);
            for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
                ids[c].push_back(add_vertex(chain[k], static_cast<int>(c)));
            }
            ids[c].push_back(corner_id[(c + 1) % nc]);
            chain_start_[c] = corner_id[c];
            chain_end_[c] = corner_id[(c + 1) % nc];
        }
        // Vertices were appended without triangles; insert them now.
        const int first = 3;
        const int count = static_cast<int>(pts_.size());
        std::vector<Point2> pending(pts_.begin() + first, pts_.end());
        std::vector<int> chains(chain_of_.begin() + first, chain_of_.end());
        pts_.resize(first);
        chain_of_.resize(first);
        vert_tri_.resize(first);
        std::vector<int> remap(count, kNone);
        for (int i = 0; i < count - first; ++i) {
            const int id = insert_free(pending[i], chains[i]);
            if (id == kNone) throw GeometryError("duplicate boundary point");
            remap[first + i] = id;
        }
        for (std::size_t c = 0; c < nc; ++c) {
            for (int& id : ids[c]) id = remap[id];
            chain_start_[c] = remap[chain_start_[c]];
            chain_end_[c] = remap[chain_end_[c]];
            for (std::size_t k = 0; k + 1 < ids[c].size(); ++k) {
                pending_segments_.push_back({ids[c][k], ids[c][k + 1]});
                segment_chain_[edge_key(ids[c][k], ids[c][k + 1])] = static_cast<int>(c);
            }
        }
    }

    void recover_segments() {
        for (int round = 0; round < 200; ++round) {
            std::vector<std::pair<int, int>> next;
            bool missing = false;
            for (auto [a, b] : pending_segments_) {
                int t, o;
                if (find_edge(a, b, t, o)) {
                    next.push_back({a, b});
                    continue;
                }
                missing = true;
                const int chain = segment_chain_.at(edge_key(a, b));
                const Point2 m = lerp(pts_[a], pts_[b], 0.5);
                const int vm = insert_free(m, chain);
                if (vm == kNone) fail("degenerate boundary subsegment", m);
                segment_chain_[edge_key(a, vm)] = chain;
                segment_chain_[edge_key(vm, b)] = chain;
                next.push_back({a, vm});
                next.push_back({vm, b});
            }
            pending_segments_ = std::move(next);
            if (!missing) {
                for (auto [a, b] : pending_segments_) constrained_[edge_key(a, b)] = segment_chain_.at(edge_key(a, b));
                return;
            }
        }
        throw GeometryError("triangulation failure: boundary segments could not be recovered");
    }

    void insert_lattice() {
        PolygonRegion outline;
        for (const auto& chain : in_.chains) outline.vertices.push_back(chain.front());
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (Point2 p : outline.vertices) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const double s = in_.target_edge;
        const double dy = s * std::sqrt(3.0) / 2.0;
        const double clearance = 0.55 * s;
        std::mt19937 rng(in_.jitter_seed);
        auto unit = [&rng] { return static_cast<double>(rng() >> 8) * (1.0 / 16777216.0); };
        const int rows = static_cast<int>(std::ceil((ymax - ymin) / dy)) + 1;
        const int cols = static_cast<int>(std::ceil((xmax - xmin) / s)) + 2;
        for (int j = 0; j < rows; ++j) {
            for (int i = 0; i < cols; ++i) {
                const double jx = (unit() - 0.5) * 0.1 * s;
                const double jy = (unit() - 0.5) * 0.1 * s;
                const Point2 p{xmin + (i + 0.5 * (j & 1)) * s + jx, ymin + (j + 0.5) * dy + jy};
                if (!contains_closed(outline, p, 0.0)) continue;
                bool near = false;
                for (const auto& chain : in_.chains) {
                    if (distance_to_segment(p, chain.front(), chain.back()) < clearance) {
                        near = true;
                        break;
                    }
                }
                if (near) continue;
                insert_free(p, kInterior);
            }
        }
    }

    void remove_exterior() {
        std::vector<int> stack;
        ++stamp_;
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive) continue;
            for (int v : tris_[t].v) {
                if (v < 3) {
                    stack.push_back(static_cast<int>(t));
                    mark_[t] = stamp_;
                    break;
                }
            }
        }
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const Tri& T = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = T.nb[i];
                if (nb == kNone || mark_[nb] == stamp_) continue;
                if (is_constrained(T.v[(i + 1) % 3], T.v[(i + 2) % 3])) continue;
                mark_[nb] = stamp_;
                stack.push_back(nb);
            }
        }
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (tris_[t].alive && mark_[t] == stamp_) kill_tri(static_cast<int>(t));
        }
        std::fill(vert_tri_.begin(), vert_tri_.end(), kNone);
        last_ = kNone;
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            Tri& T = tris_[t];
            if (!T.alive) continue;
            for (int i = 0; i < 3; ++i) {
                if (T.v[i] < 3) fail("boundary is not closed", pts_[T.v[(i + 1) % 3]]);
                if (T.nb[i] != kNone && !tris_[T.nb[i]].alive) T.nb[i] = kNone;
                vert_tri_[T.v[i]] = static_cast<int>(t);
            }
            last_ = static_cast<int>(t);
        }
        if (last_ == kNone) throw GeometryError("triangulation failure: piece has no interior");
        insert_budget_ = 50 * pts_.size() + 10000;
    }

    // -------------------------------------------------------------- refinement

    bool is_bad(int t) const {
        const Tri& T = tris_[t];
        const Point2 a = pts_[T.v[0]], b = pts_[T.v[1]], c = pts_[T.v[2]];
        const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
        const double area2 = orient(a, b, c);
        if (!(area2 > 0.0)) return true;
        const double radius = la * lb * lc / (2.0 * area2);
        const double shortest = std::min({la, lb, lc});
        return radius / shortest > max_ratio_ || radius > max_radius_;
    }

    bool encroached_by(int a, int b, Point2 p) const { return dot(pts_[a] - p, pts_[b] - p) < 0.0; }

    struct BadEntry {
        int tri;
        std::array<int, 3> v;
    };

    void check_new(const std::vector<int>& created, std::deque<BadEntry>& bad, std::deque<std::uint64_t>& enc) {
        for (int t : created) {
            const Tri& T = tris_[t];
            if (is_bad(t)) bad.push_back({t, T.v});
            for (int i = 0; i < 3; ++i) {
                const int a = T.v[(i + 1) % 3];
                const int b = T.v[(i + 2) % 3];
                if (is_constrained(a, b) && encroached_by(a, b, pts_[T.v[i]])) enc.push_back(edge_key(a, b));
            }
        }
    }

    Point2 split_point(int a, int b) const {
        const bool ca = chain_of_[a] == kCorner;
        const bool cb = chain_of_[b] == kCorner;
        if (ca == cb) return lerp(pts_[a], pts_[b], 0.5);
        // Concentric shells around the corner keep splits on both adjacent
        // chains at matching radii.
        const int apex = ca ? a : b;
        const int far = ca ? b : a;
        const double len = distance(pts_[apex], pts_[far]);
        double d = std::exp2(std::round(std::log2(0.5 * len)));
        if (d < len / 3.0) d *= 2.0;
        if (d > 2.0 * len / 3.0) d *= 0.5;
        return lerp(pts_[apex], pts_[far], d / len);
    }

    bool split_subsegment(int a, int b, std::deque<BadEntry>& bad, std::deque<std::uint64_t>& enc) {
        int t, opp;
        if (!find_edge(a, b, t, opp)) fail("lost a boundary subsegment", pts_[a]);
        const Point2 m = split_point(a, b);
        Cavity cav;
        if (!compute_cavity(m, {t}, {a, b}, cav)) return false;
        const int chain = constrained_.at(edge_key(a, b));
        std::vector<int> created;
        commit(m, chain, cav, {a, b}, &created);
        check_new(created, bad, enc);
        return true;
    }

    void refine() {
        std::deque<BadEntry> bad;
        std::deque<std::uint64_t> enc;
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (tris_[t].alive && is_bad(static_cast<int>(t))) bad.push_back({static_cast<int>(t), tris_[t].v});
        }
        for (const auto& [key, chain] : constrained_) {
            auto [a, b] = decode_key(key);
            int t, opp;
            if (find_edge(a, b, t, opp) && encroached_by(a, b, pts_[tris_[t].v[opp]])) enc.push_back(key);
        }
        std::sort(enc.begin(), enc.end());
        std::size_t inserted = 0;
        Cavity cav;
        while (!enc.empty() || !bad.empty()) {
            if (inserted > insert_budget_) fail("refinement did not terminate", pts_[tris_[last_].v[0]]);
            if (!enc.empty()) {
                const std::uint64_t key = enc.front();
                enc.pop_front();
                if (!constrained_.count(key)) continue;
                auto [a, b] = decode_key(key);
                if (distance(pts_[a], pts_[b]) < min_split_) continue;
                if (split_subsegment(a, b, bad, enc)) ++inserted;
                continue;
            }
            const BadEntry entry = bad.front();
            bad.pop_front();
            if (!tris_[entry.tri].alive || tris_[entry.tri].v != entry.v || !is_bad(entry.tri)) continue;
            const Tri& T = tris_[entry.tri];
            const Point2 c = circumcenter(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]);
            int exit_tri, exit_idx;
            const int loc = locate(c, entry.tri, exit_tri, exit_idx);
            if (loc == kNone) {
                if (exit_tri == kNone) continue;
                const Tri& E = tris_[exit_tri];
                const int a = E.v[(exit_idx + 1) % 3];
                const int b = E.v[(exit_idx + 2) % 3];
                if (distance(pts_[a], pts_[b]) < min_split_) continue;
                enc.push_back(edge_key(a, b));
                bad.push_back(entry);
                continue;
            }
            if (!compute_cavity(c, {loc}, {kNone, kNone}, cav)) continue;
            bool blocked = false;
            bool splittable = false;
            for (const auto& e : cav.boundary) {
                if (is_constrained(e.a, e.b) && encroached_by(e.a, e.b, c)) {
                    blocked = true;
                    if (distance(pts_[e.a], pts_[e.b]) >= min_split_) {
                        splittable = true;
                        enc.push_back(edge_key(e.a, e.b));
                    }
                }
            }
            if (blocked) {
                if (splittable) bad.push_back(entry);
                continue;
            }
            bool duplicate = false;
            for (int t : cav.tris) {
                for (int v : tris_[t].v) {
                    if (distance(pts_[v], c) < min_split_) duplicate = true;
                }
            }
            if (duplicate) continue;
            std::vector<int> created;
            commit(c, kInterior, cav, {kNone, kNone}, &created);
            ++inserted;
            check_new(created, bad, enc);
        }
    }

    // --------------------------------------------------------------- smoothing

    void smooth() {
        const std::size_t nv = pts_.size();
        std::vector<std::vector<int>> star(nv);
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive) continue;
            for (int v : tris_[t].v) star[v].push_back(static_cast<int>(t));
        }
        auto star_min = [&](int v, Point2 at, bool& valid) {
            double worst = 180.0;
            valid = true;
            for (int t : star[v]) {
                std::array<Point2, 3> p;
                for (int i = 0; i < 3; ++i) p[i] = tris_[t].v[i] == v ? at : pts_[tris_[t].v[i]];
                if (!(orient(p[0], p[1], p[2]) > 0.0)) valid = false;
                worst = std::min(worst, min_angle_deg(p[0], p[1], p[2]));
            }
            return worst;
        };
        for (std::size_t v = 3; v < nv; ++v) {
            if (chain_of_[v] != kInterior || star[v].empty()) continue;
            Point2 sum{0.0, 0.0};
            int count = 0;
            std::vector<int> seen;
            for (int t : star[v]) {
                for (int w : tris_[t].v) {
                    if (w == static_cast<int>(v) || std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
                    seen.push_back(w);
                    sum = sum + pts_[w];
                    ++count;
                }
            }
            const Point2 cand = (1.0 / count) * sum;
            bool ok_before, ok_after;
            const double before = star_min(static_cast<int>(v), pts_[v], ok_before);
            const double after = star_min(static_cast<int>(v), cand, ok_after);
            if (ok_after && after >= before) pts_[v] = cand;
        }
    }

#ifdef EIGENLOCAL_TRI_DEBUG
    void debug_check(Point2 where) const {
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const Tri& T = tris_[t];
            if (!T.alive) continue;
            if (!(orient(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]) > 0.0)) fail("debug: inverted", where);
            for (int i = 0; i < 3; ++i) {
                const int nb = T.nb[i];
                if (nb == kNone) continue;
                if (!tris_[nb].alive) fail("debug: dead neighbour", where);
                const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
                bool ok = false;
                for (int j = 0; j < 3; ++j) {
                    if (tris_[nb].v[(j + 1) % 3] == b && tris_[nb].v[(j + 2) % 3] == a && tris_[nb].nb[j] == static_cast<int>(t)) ok = true;
                }
                if (!ok) fail("debug: asymmetric adjacency", where);
            }
        }
    }
#endif

    // ------------------------------------------------------------------ output

    PieceMesh extract() const {
        PieceMesh out;
        std::vector<std::size_t> remap(pts_.size(), static_cast<std::size_t>(-1));
        for (const Tri& T : tris_) {
            if (!T.alive) continue;
            std::array<std::size_t, 3> tri{};
            for (int i = 0; i < 3; ++i) {
                const int v = T.v[i];
                if (remap[v] == static_cast<std::size_t>(-1)) {
                    remap[v] = out.vertices.size();
                    out.vertices.push_back(pts_[v]);
                }
                tri[i] = remap[v];
            }
            if (!(orient(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]) > 0.0)) {
                fail("inverted triangle", pts_[T.v[0]]);
            }
            out.triangles.push_back(tri);
        }
        const std::size_t nc = in_.chains.size();
        out.chains.resize(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const Point2 start = pts_[chain_start_[c]];
            const Point2 end = pts_[chain_end_[c]];
            const Point2 dir = end - start;
            std::vector<std::pair<double, Point2>> pts;
            for (std::size_t v = 3; v < pts_.size(); ++v) {
                if (chain_of_[v] == static_cast<int>(c)) pts.push_back({dot(pts_[v] - start, dir), pts_[v]});
            }
            std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
            out.chains[c].push_back(start);
            for (const auto& [t, p] : pts) out.chains[c].push_back(p);
            out.chains[c].push_back(end);
        }
        return out;
    }
};

}  // namespace

PieceMesh mesh_piece(const PieceInput& input) {
    Triangulator tri(input);
    return tri.run();
}

}  // namespace eigenlocal
