#include "ph/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "ph/errors.hpp"

namespace ph {

namespace {

struct DegenerateInput {};

struct Tet {
    std::array<int, 4> v;   // positively oriented
    std::array<int, 4> nbr; // nbr[i] shares the face opposite v[i]; -1 = hull
    bool alive = true;
};

double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a));
}

// > 0 when p lies strictly inside the circumsphere of the positively
// oriented tet (a,b,c,d). Near-zero determinants signal a cospherical
// configuration the caller must resolve by jitter.
double insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& p,
                double degenerate_eps) {
    Vec3 ap = a - p, bp = b - p, cp = c - p, dp = d - p;
    double aw = ap.norm2(), bw = bp.norm2(), cw = cp.norm2(), dw = dp.norm2();
    double det = aw * orient3d(b, c, d, p) - bw * orient3d(a, c, d, p) +
                 cw * orient3d(a, b, d, p) - dw * orient3d(a, b, c, p);
    double scale = std::max({aw, bw, cw, dw});
    if (std::abs(det) < degenerate_eps * scale * scale * std::sqrt(scale)) throw DegenerateInput{};
    return det;
}

struct FaceKey {
    std::array<int, 3> v;
    bool operator==(const FaceKey& o) const { return v == o.v; }
};
struct FaceKeyHash {
    size_t operator()(const FaceKey& f) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (int x : f.v) {
            h ^= static_cast<uint64_t>(x) + 0x9e3779b9ULL;
            h *= 0x100000001b3ULL;
        }
        return static_cast<size_t>(h);
    }
};

FaceKey face_opposite(const Tet& t, int i) {
    FaceKey f;
    int k = 0;
    for (int j = 0; j < 4; ++j)
        if (j != i) f.v[static_cast<size_t>(k++)] = t.v[static_cast<size_t>(j)];
    std::sort(f.v.begin(), f.v.end());
    return f;
}

class Triangulator {
  public:
    Triangulator(const std::vector<Vec3>& pts, double diag) : pts_(pts) {
        ortol_ = 1e-13 * std::max(diag, 1e-30) * std::max(diag, 1e-30) * std::max(diag, 1e-30);
        const int n = static_cast<int>(pts.size());
        // Super-tetrahedron enclosing the bounding box with a wide margin.
        Vec3 lo = pts[0], hi = pts[0];
        for (const auto& p : pts) {
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        }
        Vec3 c = (lo + hi) * 0.5;
        double L = 20.0 * std::max(diag, 1e-9) + 1.0;
        super_ = {Vec3{c.x - L, c.y - L, c.z - L}, Vec3{c.x + 3 * L, c.y - L, c.z - L},
                  Vec3{c.x - L, c.y + 3 * L, c.z - L}, Vec3{c.x - L, c.y - L, c.z + 3 * L}};
        all_.reserve(static_cast<size_t>(n) + 4);
        all_.insert(all_.end(), pts.begin(), pts.end());
        all_.insert(all_.end(), super_.begin(), super_.end());

        Tet t;
        t.v = {n, n + 1, n + 2, n + 3};
        if (orient3d(point(t.v[0]), point(t.v[1]), point(t.v[2]), point(t.v[3])) < 0)
            std::swap(t.v[2], t.v[3]);
        t.nbr = {-1, -1, -1, -1};
        tets_.push_back(t);
        last_ = 0;
    }

    void insert_all() {
        const int n = static_cast<int>(pts_.size());
        // Insert in grid-bucket order for walk locality.
        std::vector<int> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        Vec3 lo = pts_[0];
        Vec3 hi = pts_[0];
        for (const auto& p : pts_)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        double cell = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-30}) /
                      std::max(1.0, std::cbrt(static_cast<double>(n)));
        auto key = [&](int i) {
            const Vec3& p = pts_[static_cast<size_t>(i)];
            long cx = static_cast<long>((p.x - lo.x) / cell);
            long cy = static_cast<long>((p.y - lo.y) / cell);
            long cz = static_cast<long>((p.z - lo.z) / cell);
            return std::tuple<long, long, long, int>(cz, cy, cx, i);
        };
        std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
        for (int i : order) insert(i);
    }

    std::vector<Tetra> extract(int n) const {
        std::vector<Tetra> out;
        for (const Tet& t : tets_) {
            if (!t.alive) continue;
            if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n || t.v[3] >= n) continue;
            Tetra tt;
            tt.v = t.v;
            std::sort(tt.v.begin(), tt.v.end());
            out.push_back(tt);
        }
        std::sort(out.begin(), out.end(), [](const Tetra& a, const Tetra& b) { return a.v < b.v; });
        return out;
    }

  private:
    const std::vector<Vec3>& pts_;
    std::array<Vec3, 4> super_;
    std::vector<Vec3> all_;
    std::vector<Tet> tets_;
    int last_ = 0;
    double ortol_ = 0;

    const Vec3& point(int i) const { return all_[static_cast<size_t>(i)]; }

    int locate(const Vec3& p) const {
        int cur = last_;
        if (!tets_[static_cast<size_t>(cur)].alive) {
            for (int i = static_cast<int>(tets_.size()) - 1; i >= 0; --i)
                if (tets_[static_cast<size_t>(i)].alive) {
                    cur = i;
                    break;
                }
        }
        int steps = 0;
        const int limit = static_cast<int>(tets_.size()) * 4 + 64;
        while (true) {
            const Tet& t = tets_[static_cast<size_t>(cur)];
            int next = -1;
            for (int i = 0; i < 4; ++i) {
                // The face opposite v[i], oriented outward.
                const Vec3& a = point(t.v[(i + 1) & 3]);
                const Vec3& b = point(t.v[(i + 2) & 3]);
                const Vec3& c = point(t.v[(i + 3) & 3]);
                const Vec3& apex = point(t.v[static_cast<size_t>(i)]);
                double side_apex = orient3d(a, b, c, apex);
                double side_p = orient3d(a, b, c, p);
                if (side_apex > 0 ? side_p < -ortol_ : side_p > ortol_) {
                    next = t.nbr[static_cast<size_t>(i)];
                    break;
                }
            }
            if (next < 0) return cur;
            cur = next;
            if (++steps > limit) throw DegenerateInput{}; // walk cycle: degenerate geometry
        }
    }

    void insert(int pi) {
        const Vec3& p = point(pi);
        int seed = locate(p);

        // Cavity: all tets whose circumsphere strictly contains p.
        std::vector<int> cavity;
        std::vector<int> stack{seed};
        std::set<int> seen{seed};
        while (!stack.empty()) {
            int ti = stack.back();
            stack.pop_back();
            const Tet& t = tets_[static_cast<size_t>(ti)];
            if (insphere(point(t.v[0]), point(t.v[1]), point(t.v[2]), point(t.v[3]), p, 1e-12) <= 0)
                continue;
            cavity.push_back(ti);
            for (int i = 0; i < 4; ++i) {
                int nb = t.nbr[static_cast<size_t>(i)];
                if (nb >= 0 && !seen.count(nb)) {
                    seen.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        if (cavity.empty()) throw DegenerateInput{}; // duplicate or on-sphere point

        std::set<int> in_cavity(cavity.begin(), cavity.end());
        // Boundary faces: (face vertices, outside neighbor tet).
        struct BFace {
            std::array<int, 3> v; // oriented so that p lies on the positive side
            int outside;
        };
        std::vector<BFace> boundary;
        for (int ti : cavity) {
            const Tet& t = tets_[static_cast<size_t>(ti)];
            for (int i = 0; i < 4; ++i) {
                int nb = t.nbr[static_cast<size_t>(i)];
                if (nb >= 0 && in_cavity.count(nb)) continue;
                std::array<int, 3> f{t.v[(i + 1) & 3], t.v[(i + 2) & 3], t.v[(i + 3) & 3]};
                // Orient the face so the new point sees it positively.
                if (orient3d(point(f[0]), point(f[1]), point(f[2]), p) < 0) std::swap(f[1], f[2]);
                boundary.push_back({f, nb});
            }
        }
        for (int ti : cavity) tets_[static_cast<size_t>(ti)].alive = false;

        // One new tet per boundary face.
        std::unordered_map<FaceKey, std::pair<int, int>, FaceKeyHash> open_faces;
        int first_new = -1;
        for (const BFace& bf : boundary) {
            Tet nt;
            nt.v = {pi, bf.v[0], bf.v[1], bf.v[2]};
            if (orient3d(point(nt.v[0]), point(nt.v[1]), point(nt.v[2]), point(nt.v[3])) < 0)
                std::swap(nt.v[2], nt.v[3]);
            nt.nbr = {-1, -1, -1, -1};
            int nti = static_cast<int>(tets_.size());
            if (first_new < 0) first_new = nti;

            // Stitch against the surviving outside tet.
            int pi_slot = -1;
            for (int i = 0; i < 4; ++i)
                if (nt.v[static_cast<size_t>(i)] == pi) pi_slot = i;
            nt.nbr[static_cast<size_t>(pi_slot)] = bf.outside;
            if (bf.outside >= 0) {
                Tet& ot = tets_[static_cast<size_t>(bf.outside)];
                FaceKey fk;
                fk.v = bf.v;
                std::sort(fk.v.begin(), fk.v.end());
                for (int i = 0; i < 4; ++i)
                    if (face_opposite(ot, i) == fk) ot.nbr[static_cast<size_t>(i)] = nti;
            }
            tets_.push_back(nt);

            // Stitch new-new adjacencies through shared faces containing p.
            Tet& me = tets_.back();
            for (int i = 0; i < 4; ++i) {
                if (me.v[static_cast<size_t>(i)] == pi) continue; // handled above
                FaceKey fk = face_opposite(me, i);
                auto it = open_faces.find(fk);
                if (it == open_faces.end()) {
                    open_faces.emplace(fk, std::make_pair(nti, i));
                } else {
                    auto [other, oslot] = it->second;
                    me.nbr[static_cast<size_t>(i)] = other;
                    tets_[static_cast<size_t>(other)].nbr[static_cast<size_t>(oslot)] = nti;
                    open_faces.erase(it);
                }
            }
        }
        last_ = first_new;
    }
};

std::vector<Vec3> jittered(const PointCloud& cloud, double magnitude, int attempt) {
    std::vector<Vec3> out(cloud.points);
    for (size_t i = 0; i < out.size(); ++i) {
        uint64_t st = (static_cast<uint64_t>(i) << 8) ^ static_cast<uint64_t>(attempt) ^
                      0x5bd1e995ULL;
        for (int a = 0; a < 3; ++a) {
            uint64_t r = splitmix64(st);
            double u = static_cast<double>(r >> 11) * 0x1.0p-53; // [0,1)
            out[i][a] += magnitude * (2.0 * u - 1.0);
        }
    }
    return out;
}

} // namespace

std::vector<Simplex> DelaunayResult::all_simplices() const {
    std::set<Simplex> uniq;
    for (const Tetra& t : tets) {
        int vv[4] = {t.v[0], t.v[1], t.v[2], t.v[3]};
        for (int mask = 1; mask < 16; ++mask) {
            int sel[4], k = 0;
            for (int b = 0; b < 4; ++b)
                if (mask & (1 << b)) sel[k++] = vv[b];
            uniq.insert(Simplex::of(sel, k));
        }
    }
    return {uniq.begin(), uniq.end()};
}

DelaunayResult delaunay3(const PointCloud& cloud) {
    const int n = cloud.size();
    if (n < 4) throw ArgumentError("delaunay3: at least 4 points required");
    const double diag = cloud.bbox_diagonal();

    DelaunayResult result;
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<Vec3> pts;
        bool jit = attempt > 0;
        if (jit) {
            double mag = 1e-9 * std::max(diag, 1e-9) * std::pow(100.0, attempt - 1);
            pts = jittered(cloud, mag, attempt);
        } else {
            pts = cloud.points;
        }
        try {
            double d = diag > 0 ? diag : 1.0;
            Triangulator tri(pts, d);
            tri.insert_all();
            result.tets = tri.extract(n);
            result.effective_points = std::move(pts);
            result.jitter_applied = jit;
            if (result.tets.empty()) throw DegenerateInput{}; // coplanar input
            return result;
        } catch (const DegenerateInput&) {
            continue;
        }
    }
    throw InvariantViolation("delaunay3: degenerate configuration persisted after jitter retries");
}

} // namespace ph
