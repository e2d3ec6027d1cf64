#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ph/complex.hpp"
#include "ph/delaunay.hpp"
#include "ph/errors.hpp"

namespace ph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool solve3(const Vec3& m0, const Vec3& m1, const Vec3& m2, const Vec3& r, Vec3& x) {
    double det = m0.dot(m1.cross(m2));
    double scale = std::max({std::abs(m0.x), std::abs(m0.y), std::abs(m0.z), std::abs(m1.x),
                             std::abs(m1.y), std::abs(m1.z), std::abs(m2.x), std::abs(m2.y),
                             std::abs(m2.z), 1e-300});
    if (std::abs(det) < 1e-14 * scale * scale * scale) return false;
    x.x = r.dot(m1.cross(m2)) / det;
    x.y = m0.dot(r.cross(m2)) / det;
    x.z = m0.dot(m1.cross(r)) / det;
    return true;
}

// Smallest sphere through all vertices of the simplex (circumsphere).
// Returns false on degenerate input.
bool circumsphere(const std::vector<Vec3>& pts, const Simplex& s, Ball& out) {
    const Vec3& a = pts[static_cast<size_t>(s.v[0])];
    if (s.n == 1) {
        out = {a, 0.0};
        return true;
    }
    if (s.n == 2) {
        const Vec3& b = pts[static_cast<size_t>(s.v[1])];
        out = {(a + b) * 0.5, dist(a, b) / 2};
        return true;
    }
    if (s.n == 3) {
        const Vec3& b = pts[static_cast<size_t>(s.v[1])];
        const Vec3& c = pts[static_cast<size_t>(s.v[2])];
        Vec3 u = b - a, w = c - a;
        Vec3 nrm = u.cross(w);
        Vec3 sol;
        if (!solve3(u, w, nrm, {u.norm2() / 2, w.norm2() / 2, 0.0}, sol)) return false;
        out = {a + sol, sol.norm()};
        return true;
    }
    const Vec3& b = pts[static_cast<size_t>(s.v[1])];
    const Vec3& c = pts[static_cast<size_t>(s.v[2])];
    const Vec3& d = pts[static_cast<size_t>(s.v[3])];
    Vec3 u = b - a, v = c - a, w = d - a;
    Vec3 sol;
    if (!solve3(u, v, w, {u.norm2() / 2, v.norm2() / 2, w.norm2() / 2}, sol)) return false;
    out = {a + sol, sol.norm()};
    return true;
}

} // namespace

FilteredComplex build_alpha(const PointCloud& cloud, double max_scale) {
    if (!(max_scale > 0)) throw ArgumentError("build_alpha: max_scale must be positive");
    DelaunayResult del = delaunay3(cloud);
    const std::vector<Vec3>& pts = del.effective_points;
    const int n = cloud.size();

    // Distinct simplices per dimension, with value slots.
    std::vector<Simplex> tets, tris, edges;
    tets.reserve(del.tets.size());
    for (const Tetra& t : del.tets) tets.push_back(Simplex::of(t.v.data(), 4));
    {
        std::vector<Simplex> tmp;
        tmp.reserve(tets.size() * 4);
        for (const Simplex& t : tets)
            for (const Simplex& f : t.facets()) tmp.push_back(f);
        std::sort(tmp.begin(), tmp.end());
        tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
        tris = std::move(tmp);
    }
    {
        std::vector<Simplex> tmp;
        tmp.reserve(tris.size() * 3);
        for (const Simplex& t : tris)
            for (const Simplex& f : t.facets()) tmp.push_back(f);
        std::sort(tmp.begin(), tmp.end());
        tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
        edges = std::move(tmp);
    }

    std::unordered_map<Simplex, double, SimplexHash> value;
    value.reserve((tets.size() + tris.size() + edges.size()) * 2);

    // Pass over cofaces in decreasing dimension; a facet takes the min over
    // cofaces unless it is Gabriel, in which case it keeps its own
    // circumradius (assigned when its dimension is reached).
    auto process_dim = [&](const std::vector<Simplex>& level) {
        for (const Simplex& s : level) {
            auto it = value.find(s);
            double own;
            if (it == value.end()) {
                Ball ball;
                own = circumsphere(pts, s, ball) ? ball.radius : kInf;
                value.emplace(s, own);
            } else {
                own = it->second;
            }
            for (const Simplex& f : s.facets()) {
                if (f.n < 2) continue; // vertices are pinned at 0
                auto fit = value.find(f);
                if (fit != value.end()) {
                    fit->second = std::min(fit->second, own);
                    continue;
                }
                Ball fb;
                if (!circumsphere(pts, f, fb)) {
                    value.emplace(f, own);
                    continue;
                }
                // Gabriel test against the vertices of s opposite f.
                bool gabriel = true;
                double r2 = fb.radius * fb.radius * (1 - 1e-12);
                for (int i = 0; i < s.n; ++i) {
                    int u = s.v[static_cast<size_t>(i)];
                    bool in_f = false;
                    for (int j = 0; j < f.n; ++j)
                        if (f.v[static_cast<size_t>(j)] == u) in_f = true;
                    if (!in_f && dist2(pts[static_cast<size_t>(u)], fb.center) < r2) gabriel = false;
                }
                if (!gabriel) value.emplace(f, own);
            }
        }
    };
    process_dim(tets);
    process_dim(tris);
    process_dim(edges);

    FilteredComplex fc;
    fc.kind = ComplexKind::alpha;
    {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "{\"kind\":\"alpha\",\"max_scale\":%.17g,\"jitter\":%s}", max_scale,
                      del.jitter_applied ? "true" : "false");
        fc.params = buf;
    }
    for (int i = 0; i < n; ++i) {
        fc.simplices.push_back(Simplex{i});
        fc.values.push_back(0.0);
    }
    auto emit = [&](const std::vector<Simplex>& level) {
        for (const Simplex& s : level) {
            double v = value.at(s);
            if (v <= max_scale && std::isfinite(v)) {
                fc.simplices.push_back(s);
                fc.values.push_back(v);
            }
        }
    };
    emit(edges);
    emit(tris);
    emit(tets);
    fc.sort_canonical();
    return fc;
}

} // namespace ph
