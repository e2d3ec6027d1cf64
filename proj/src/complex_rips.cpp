#include <algorithm>
#include <cmath>
#include <limits>

#include "ph/complex.hpp"
#include "ph/errors.hpp"

namespace ph {

namespace {

// Sorted intersection of two ascending index lists.
void intersect_into(const std::vector<int>& a, const std::vector<int>& b, std::vector<int>& out) {
    out.clear();
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
}

} // namespace

FilteredComplex build_rips(const PointCloud& cloud, double max_scale, int max_dim) {
    const int n = cloud.size();
    if (n < 1) throw ArgumentError("build_rips: empty cloud");
    if (!(max_scale > 0)) throw ArgumentError("build_rips: max_scale must be positive");
    if (max_dim < 0 || max_dim > 3) throw ArgumentError("build_rips: max_dim must be 0..3");

    FilteredComplex fc;
    fc.kind = ComplexKind::rips;
    {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "{\"kind\":\"rips\",\"max_scale\":%.17g,\"max_dim\":%d}",
                      max_scale, max_dim);
        fc.params = buf;
    }

    for (int i = 0; i < n; ++i) {
        fc.simplices.push_back(Simplex{i});
        fc.values.push_back(0.0);
    }
    if (max_dim == 0) {
        fc.sort_canonical();
        return fc;
    }

    // Upper-neighbor lists: nbrs[i] holds j > i with d(i,j) <= max_scale.
    std::vector<std::vector<int>> nbrs(static_cast<size_t>(n));
    const bool uncapped = !std::isfinite(max_scale) || max_scale >= cloud.bbox_diagonal();
    if (uncapped || n <= 64) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (dist(cloud[i], cloud[j]) <= max_scale) nbrs[static_cast<size_t>(i)].push_back(j);
    } else {
        GridIndex grid(cloud);
        for (int i = 0; i < n; ++i) {
            auto cand = grid.within(cloud[i], max_scale);
            for (int j : cand)
                if (j > i) nbrs[static_cast<size_t>(i)].push_back(j);
            std::sort(nbrs[static_cast<size_t>(i)].begin(), nbrs[static_cast<size_t>(i)].end());
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int j : nbrs[static_cast<size_t>(i)]) {
            fc.simplices.push_back(Simplex{i, j});
            fc.values.push_back(dist(cloud[i], cloud[j]));
        }
    }

    if (max_dim >= 2) {
        std::vector<int> common, common2;
        for (int i = 0; i < n; ++i) {
            for (int j : nbrs[static_cast<size_t>(i)]) {
                intersect_into(nbrs[static_cast<size_t>(i)], nbrs[static_cast<size_t>(j)], common);
                const double dij = dist(cloud[i], cloud[j]);
                for (int k : common) {
                    double val = std::max({dij, dist(cloud[i], cloud[k]), dist(cloud[j], cloud[k])});
                    fc.simplices.push_back(Simplex{i, j, k});
                    fc.values.push_back(val);
                    if (max_dim >= 3) {
                        intersect_into(common, nbrs[static_cast<size_t>(k)], common2);
                        for (int l : common2) {
                            double v4 = std::max({val, dist(cloud[i], cloud[l]),
                                                  dist(cloud[j], cloud[l]), dist(cloud[k], cloud[l])});
                            fc.simplices.push_back(Simplex{i, j, k, l});
                            fc.values.push_back(v4);
                        }
                    }
                }
            }
        }
    }

    fc.sort_canonical();
    return fc;
}

} // namespace ph
