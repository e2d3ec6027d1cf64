#include <algorithm>
#include <cmath>
#include <limits>

#include "ph/complex.hpp"
#include "ph/errors.hpp"

namespace ph {

namespace {

// Solve the 3x3 system M x = r by Cramer's rule; returns false when the
// determinant is negligible relative to the matrix scale.
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

bool circumcenter_triangle(const Vec3& a, const Vec3& b, const Vec3& c, Vec3& center) {
    Vec3 u = b - a, w = c - a;
    Vec3 nrm = u.cross(w);
    Vec3 sol;
    if (!solve3(u, w, nrm, {u.norm2() / 2, w.norm2() / 2, 0.0}, sol)) return false;
    center = a + sol;
    return true;
}

bool circumcenter_tetra(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, Vec3& center) {
    Vec3 u = b - a, v = c - a, w = d - a;
    Vec3 sol;
    if (!solve3(u, v, w, {u.norm2() / 2, v.norm2() / 2, w.norm2() / 2}, sol)) return false;
    center = a + sol;
    return true;
}

bool contains_all(const Vec3* pts, int count, const Ball& ball, double slack) {
    double r = ball.radius * (1 + slack) + 1e-300;
    double r2 = r * r;
    for (int i = 0; i < count; ++i)
        if (dist2(pts[i], ball.center) > r2) return false;
    return true;
}

} // namespace

Ball min_enclosing_ball(const Vec3* pts, int count) {
    if (count < 1 || count > 4) throw ArgumentError("min_enclosing_ball: 1..4 points supported");
    if (count == 1) return {pts[0], 0.0};

    const double slack = 1e-9;
    Ball best;
    best.radius = std::numeric_limits<double>::infinity();
    auto consider = [&](const Ball& b) {
        if (b.radius < best.radius && contains_all(pts, count, b, slack)) best = b;
    };

    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j) {
            Ball b{(pts[i] + pts[j]) * 0.5, dist(pts[i], pts[j]) / 2};
            consider(b);
        }
    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j)
            for (int k = j + 1; k < count; ++k) {
                Vec3 c;
                if (circumcenter_triangle(pts[i], pts[j], pts[k], c))
                    consider({c, dist(c, pts[i])});
            }
    if (count == 4) {
        Vec3 c;
        if (circumcenter_tetra(pts[0], pts[1], pts[2], pts[3], c)) consider({c, dist(c, pts[0])});
    }
    if (!std::isfinite(best.radius))
        throw InvariantViolation("min_enclosing_ball: no containing candidate found");
    return best;
}

FilteredComplex build_cech(const PointCloud& cloud, double max_scale, int max_dim,
                           const CechOptions& opts) {
    const int n = cloud.size();
    if (n < 1) throw ArgumentError("build_cech: empty cloud");
    if (!(max_scale > 0)) throw ArgumentError("build_cech: max_scale must be positive");
    if (max_dim < 0 || max_dim > 3) throw ArgumentError("build_cech: max_dim must be 0..3");
    if (n > opts.point_cap)
        throw CapacityError("build_cech: point count " + std::to_string(n) + " exceeds cap " +
                            std::to_string(opts.point_cap) + "; use rips or alpha instead");

    // Candidate simplices have diameter <= 2*max_scale (meb radius >= diam/2).
    FilteredComplex candidates = build_rips(cloud, 2 * max_scale, max_dim);

    FilteredComplex fc;
    fc.kind = ComplexKind::cech;
    {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "{\"kind\":\"cech\",\"max_scale\":%.17g,\"max_dim\":%d}",
                      max_scale, max_dim);
        fc.params = buf;
    }

    Vec3 pts[4];
    for (int i = 0; i < candidates.size(); ++i) {
        const Simplex& s = candidates.simplices[static_cast<size_t>(i)];
        double value = 0;
        if (s.n > 1) {
            for (int j = 0; j < s.n; ++j) pts[j] = cloud[s.v[static_cast<size_t>(j)]];
            value = min_enclosing_ball(pts, s.n).radius;
        }
        if (value <= max_scale) {
            fc.simplices.push_back(s);
            fc.values.push_back(value);
        }
    }
    fc.sort_canonical();
    return fc;
}

} // namespace ph
