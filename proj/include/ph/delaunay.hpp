#pragma once

#include <array>
#include <vector>

#include "ph/complex.hpp"
#include "ph/geometry.hpp"

namespace ph {

struct Tetra {
    std::array<int, 4> v; // original point indices, ascending
};

struct DelaunayResult {
    std::vector<Tetra> tets;
    // Coordinates actually triangulated; equal to the input unless the
    // degeneracy fallback applied a deterministic jitter.
    std::vector<Vec3> effective_points;
    bool jitter_applied = false;

    // All distinct simplices (vertices, edges, triangles, tetrahedra).
    std::vector<Simplex> all_simplices() const;
};

// Incremental Bowyer-Watson. Degenerate (cospherical/coplanar) inputs are
// retried with a jitter of magnitude 1e-9 * bbox diagonal seeded from the
// point index.
DelaunayResult delaunay3(const PointCloud& cloud);

} // namespace ph
