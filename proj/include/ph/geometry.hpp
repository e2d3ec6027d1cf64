#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ph/errors.hpp"

namespace ph {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dist2(const Vec3& a, const Vec3& b) { return (a - b).norm2(); }
inline double dist(const Vec3& a, const Vec3& b) { return std::sqrt(dist2(a, b)); }

// Immutable after construction; index i refers to the same coordinate for
// the cloud's lifetime.
struct PointCloud {
    std::vector<Vec3> points;
    std::string source_id;
    std::optional<uint64_t> rng_seed;

    int size() const { return static_cast<int>(points.size()); }
    const Vec3& operator[](int i) const { return points[static_cast<size_t>(i)]; }

    std::pair<Vec3, Vec3> bounding_box() const;
    double bbox_diagonal() const;
};

enum class PointFormat { xyz, ply_ascii };

PointCloud load_points(const std::string& path, PointFormat format);
void save_points(const PointCloud& cloud, const std::string& path, PointFormat format);

// Uniform-grid spatial index. Exact nearest-neighbor answers via ring
// expansion; cell size defaults to bbox_diagonal / cbrt(n).
class GridIndex {
  public:
    explicit GridIndex(const PointCloud& cloud);

    // k nearest by Euclidean distance, ascending, ties broken by lower index.
    std::vector<std::pair<int, double>> knn(const Vec3& query, int k) const;
    std::pair<int, double> nearest(const Vec3& query) const;
    // All indices within radius of query (unsorted).
    std::vector<int> within(const Vec3& query, double radius) const;

  private:
    const PointCloud& cloud_;
    Vec3 origin_;
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<int> cell_start_;
    std::vector<int> order_;

    std::array<int, 3> cell_of(const Vec3& p) const;
    int flat(int cx, int cy, int cz) const;
};

std::vector<std::pair<int, double>> knn(const PointCloud& cloud, const Vec3& query, int k);

std::vector<int> farthest_point_sample(const PointCloud& cloud, int budget, int start);

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, uint64_t seed);

PointCloud downsample_random(const PointCloud& cloud, int keep, uint64_t seed);

// Deterministic RNG used everywhere randomness is needed. splitmix64-seeded
// xoshiro-style generator with a portable Box-Muller normal; outputs do not
// depend on the platform's distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed);
    uint64_t next_u64();
    double uniform();                    // [0, 1)
    double uniform(double lo, double hi);
    double normal();                     // standard normal
    int uniform_int(int n);              // [0, n)

  private:
    uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0;
};

uint64_t splitmix64(uint64_t& state);

} // namespace ph
