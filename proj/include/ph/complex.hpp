#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ph/geometry.hpp"

namespace ph {

// A simplex of dimension 0..3, vertices strictly increasing.
struct Simplex {
    std::array<int, 4> v{-1, -1, -1, -1};
    int8_t n = 0; // vertex count = dim + 1

    Simplex() = default;
    Simplex(std::initializer_list<int> verts);
    static Simplex of(const int* verts, int count);

    int dim() const { return n - 1; }
    bool operator==(const Simplex& o) const { return n == o.n && v == o.v; }
    // (dim, lexicographic vertices) order used to break filtration-value ties.
    bool operator<(const Simplex& o) const;

    // All facets (faces of codimension 1). Empty for vertices.
    std::vector<Simplex> facets() const;
    std::string str() const;
};

struct SimplexHash {
    size_t operator()(const Simplex& s) const;
};

enum class ComplexKind { rips, cech, alpha, witness, cubical, flood };
const char* to_string(ComplexKind kind);

// Simplices in filtration order: sorted by (value, dim, lex vertices),
// closed under faces, monotone over faces.
struct FilteredComplex {
    std::vector<Simplex> simplices;
    std::vector<double> values;
    ComplexKind kind = ComplexKind::rips;
    std::string params; // builder parameter record (JSON text)

    int size() const { return static_cast<int>(simplices.size()); }
    uint64_t fingerprint() const;

    // Position lookup is built lazily on first use.
    int position_of(const Simplex& s) const;
    const std::unordered_map<Simplex, int, SimplexHash>& face_index() const;

    // Sorts simplices/values into canonical filtration order.
    void sort_canonical();

  private:
    mutable std::unordered_map<Simplex, int, SimplexHash> face_index_;
};

// Returns empty optional when valid, else a description of the first
// violated invariant (face closure, monotonicity, ordering).
std::optional<std::string> validate_complex(const FilteredComplex& fc);

// ---------------------------------------------------------------------------
// Cubical complexes

// Axis-aligned grid of cubes; cell_values holds the distance-transform value
// of each top cell in row-major (x fastest) order; occupied cells have 0.
struct CubicalGrid {
    Vec3 origin;
    double cell_size = 1.0;
    std::array<int, 3> dims{0, 0, 0}; // number of top cells per axis
    std::vector<double> cell_values;

    int top_cell_count() const { return dims[0] * dims[1] * dims[2]; }
    double value_at(int x, int y, int z) const {
        return cell_values[static_cast<size_t>((z * dims[1] + y) * dims[0] + x)];
    }
};

// A cell of the cubical complex: minimal lattice corner plus an extent mask
// (bit a set = the cell spans axis a). dim = popcount(extent).
struct CubicalCell {
    int x = 0, y = 0, z = 0;
    uint8_t extent = 0;

    int dim() const;
    bool operator==(const CubicalCell& o) const {
        return x == o.x && y == o.y && z == o.z && extent == o.extent;
    }
    bool operator<(const CubicalCell& o) const;
    std::vector<CubicalCell> facets() const;
    std::string str() const; // "x:y:z:type"
};

struct CubicalCellHash {
    size_t operator()(const CubicalCell& c) const;
};

struct CubicalComplex {
    CubicalGrid grid;
    std::vector<CubicalCell> cells; // filtration order
    std::vector<double> values;
    std::string params;

    int size() const { return static_cast<int>(cells.size()); }
    uint64_t fingerprint() const;
    int position_of(const CubicalCell& c) const;
    const std::unordered_map<CubicalCell, int, CubicalCellHash>& cell_index() const;

  private:
    mutable std::unordered_map<CubicalCell, int, CubicalCellHash> cell_index_;
};

std::optional<std::string> validate_complex(const CubicalComplex& cc);

// ---------------------------------------------------------------------------
// Builders

// Simplex included iff all pairwise vertex distances <= max_scale; value is
// the max pairwise distance (diameter convention), vertices at 0.
FilteredComplex build_rips(const PointCloud& cloud, double max_scale, int max_dim);

struct CechOptions {
    int point_cap = 2000;
};
// Value is the minimum enclosing ball radius of the vertex set.
FilteredComplex build_cech(const PointCloud& cloud, double max_scale, int max_dim,
                           const CechOptions& opts = {});

// Minimum enclosing ball of up to 4 points (exhaustive boundary subsets).
struct Ball {
    Vec3 center;
    double radius = 0;
};
Ball min_enclosing_ball(const Vec3* pts, int count);

// Subcomplex of the 3D Delaunay triangulation; values are circumradii
// (Gabriel case) or the minimum over cofaces, expressed as radii.
FilteredComplex build_alpha(const PointCloud& cloud, double max_scale);

// Relaxed weak-witness complex: landmarks by FPS from index 0, witnesses are
// the entire cloud. Simplex value = min over witnesses w of
// (max_{l in sigma} d(w,l) - d_{|sigma|}(w)), made monotone over faces.
FilteredComplex build_witness(const PointCloud& cloud, int landmark_count, int max_dim,
                              double max_scale);

struct CubicalOptions {
    int max_grid_dim = 512;
};
CubicalComplex build_cubical(const PointCloud& cloud, double cell_size, double max_scale,
                             const CubicalOptions& opts = {});

struct FloodOptions {
    int lattice_depth = 4; // barycentric subdivisions per simplex
};
// Delaunay simplices over FPS landmarks; value = max over a barycentric
// lattice of sample points of the distance to the cloud; retained iff
// value <= radius.
FilteredComplex build_flood(const PointCloud& cloud, int landmark_count, double radius,
                            const FloodOptions& opts = {});

// ---------------------------------------------------------------------------
// CSV dump format: one cell per line, `dim,v0[,v1[,v2[,v3]]],value` in
// filtration order; cubical cells use `dim,x:y:z:type,value`.
std::string complex_to_csv(const FilteredComplex& fc);
FilteredComplex complex_from_csv(const std::string& text);
std::string complex_to_csv(const CubicalComplex& cc);

} // namespace ph
