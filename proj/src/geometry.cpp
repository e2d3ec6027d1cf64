#include "ph/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace ph {

std::pair<Vec3, Vec3> PointCloud::bounding_box() const {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
    for (const auto& p : points) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    return {lo, hi};
}

double PointCloud::bbox_diagonal() const {
    if (points.empty()) return 0.0;
    auto [lo, hi] = bounding_box();
    return dist(lo, hi);
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

bool parse_three_doubles(const std::string& line, Vec3& out) {
    const char* p = line.c_str();
    const char* end = p + line.size();
    for (int a = 0; a < 3; ++a) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p >= end) return false;
        double v;
        auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc()) return false;
        out[a] = v;
        p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    return p == end;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

PointCloud load_xyz(std::ifstream& in, const std::string& path) {
    PointCloud cloud;
    cloud.source_id = path;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || is_blank(line)) continue;
        Vec3 p;
        if (!parse_three_doubles(line, p))
            throw ParseError("malformed xyz record '" + line + "'", line_no);
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw ParseError("non-finite coordinate", line_no);
        cloud.points.push_back(p);
    }
    if (cloud.points.empty()) throw ParseError("empty input: no points in " + path);
    return cloud;
}

PointCloud load_ply_ascii(std::ifstream& in, const std::string& path) {
    std::string line;
    long line_no = 0;
    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) throw ParseError("unexpected end of PLY header", line_no);
        ++line_no;
        while (!out.empty() && (out.back() == '\r' || out.back() == '\n')) out.pop_back();
    };

    next_line(line);
    if (line != "ply") throw ParseError("not a PLY file (missing 'ply' magic)", line_no);

    long vertex_count = -1;
    int prop_index = 0;
    int ix = -1, iy = -1, iz = -1;
    int vertex_props = 0;
    bool in_vertex_element = false;
    while (true) {
        next_line(line);
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "ascii") throw ParseError("binary PLY not supported", line_no);
        } else if (tok == "element") {
            std::string name;
            long count;
            ss >> name >> count;
            in_vertex_element = (name == "vertex");
            if (in_vertex_element) vertex_count = count;
        } else if (tok == "property" && in_vertex_element) {
            std::string type, name;
            ss >> type >> name;
            if (type == "list") throw ParseError("list property in vertex element", line_no);
            if (name == "x") ix = prop_index;
            if (name == "y") iy = prop_index;
            if (name == "z") iz = prop_index;
            ++prop_index;
            ++vertex_props;
        } else if (tok == "end_header") {
            break;
        } else if (tok == "comment" || tok == "obj_info" || tok == "property") {
            continue;
        }
    }
    if (vertex_count <= 0) throw ParseError("PLY header declares no vertices");
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError("PLY vertex element lacks x/y/z properties");

    PointCloud cloud;
    cloud.source_id = path;
    cloud.points.reserve(static_cast<size_t>(vertex_count));
    for (long v = 0; v < vertex_count; ++v) {
        next_line(line);
        std::istringstream ss(line);
        Vec3 p;
        double val;
        for (int f = 0; f < vertex_props; ++f) {
            if (!(ss >> val)) throw ParseError("short vertex record", line_no);
            if (f == ix) p.x = val;
            if (f == iy) p.y = val;
            if (f == iz) p.z = val;
        }
        cloud.points.push_back(p);
    }
    return cloud;
}

} // namespace

PointCloud load_points(const std::string& path, PointFormat format) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open file: " + path);
    switch (format) {
        case PointFormat::xyz: return load_xyz(in, path);
        case PointFormat::ply_ascii: return load_ply_ascii(in, path);
    }
    throw ArgumentError("unknown point format");
}

void save_points(const PointCloud& cloud, const std::string& path, PointFormat format) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open file for writing: " + path);
    char buf[96];
    if (format == PointFormat::ply_ascii) {
        out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
            << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    }
    for (const auto& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Spatial index

GridIndex::GridIndex(const PointCloud& cloud) : cloud_(cloud) {
    if (cloud.size() < 1) throw ArgumentError("GridIndex requires a nonempty cloud");
    auto [lo, hi] = cloud.bounding_box();
    origin_ = lo;
    const double diag = dist(lo, hi);
    const int n = cloud.size();
    cell_ = diag > 0 ? diag / std::cbrt(static_cast<double>(n)) : 1.0;
    if (cell_ <= 0) cell_ = 1.0;
    for (int a = 0; a < 3; ++a) {
        int d = static_cast<int>(std::floor((hi[a] - lo[a]) / cell_)) + 1;
        dims_[a] = std::max(1, d);
    }

    // Counting sort of point indices into cells.
    const int ncells = dims_[0] * dims_[1] * dims_[2];
    std::vector<int> count(static_cast<size_t>(ncells) + 1, 0);
    std::vector<int> cell_id(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto c = cell_of(cloud[i]);
        cell_id[static_cast<size_t>(i)] = flat(c[0], c[1], c[2]);
        count[static_cast<size_t>(cell_id[static_cast<size_t>(i)]) + 1]++;
    }
    for (int c = 0; c < ncells; ++c) count[static_cast<size_t>(c) + 1] += count[static_cast<size_t>(c)];
    cell_start_ = count;
    order_.resize(static_cast<size_t>(n));
    std::vector<int> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (int i = 0; i < n; ++i) order_[static_cast<size_t>(cursor[static_cast<size_t>(cell_id[static_cast<size_t>(i)])]++)] = i;
}

std::array<int, 3> GridIndex::cell_of(const Vec3& p) const {
    std::array<int, 3> c;
    for (int a = 0; a < 3; ++a) {
        int v = static_cast<int>(std::floor((p[a] - origin_[a]) / cell_));
        c[a] = std::clamp(v, 0, dims_[a] - 1);
    }
    return c;
}

int GridIndex::flat(int cx, int cy, int cz) const {
    return (cz * dims_[1] + cy) * dims_[0] + cx;
}

std::vector<std::pair<int, double>> GridIndex::knn(const Vec3& query, int k) const {
    const int n = cloud_.size();
    if (k < 1 || k > n) throw ArgumentError("knn: k must be in [1, point count]");

    // (distance, index) max-heap of current best k.
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry> best;
    auto consider = [&](int i) {
        double d = dist(cloud_[i], query);
        if (static_cast<int>(best.size()) < k) {
            best.emplace(d, i);
        } else if (d < best.top().first || (d == best.top().first && i < best.top().second)) {
            best.pop();
            best.emplace(d, i);
        }
    };

    auto qc = cell_of(query);
    // Expand rings until the k-th best distance is covered by scanned cells.
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
        bool any_cell = false;
        for (int dz = -ring; dz <= ring; ++dz) {
            for (int dy = -ring; dy <= ring; ++dy) {
                for (int dx = -ring; dx <= ring; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
                    int cx = qc[0] + dx, cy = qc[1] + dy, cz = qc[2] + dz;
                    if (cx < 0 || cy < 0 || cz < 0 || cx >= dims_[0] || cy >= dims_[1] || cz >= dims_[2])
                        continue;
                    any_cell = true;
                    int f = flat(cx, cy, cz);
                    for (int s = cell_start_[static_cast<size_t>(f)]; s < cell_start_[static_cast<size_t>(f) + 1]; ++s)
                        consider(order_[static_cast<size_t>(s)]);
                }
            }
        }
        if (static_cast<int>(best.size()) == k) {
            // Scanned rings cover a ball of radius ring*cell_ around the query
            // cell; stop once the current k-th distance lies inside it.
            double covered = static_cast<double>(ring) * cell_;
            if (best.top().first <= covered) break;
        }
        if (!any_cell && ring > 0 && static_cast<int>(best.size()) == k) break;
    }

    std::vector<std::pair<int, double>> out(static_cast<size_t>(k));
    std::vector<Entry> tmp;
    tmp.reserve(static_cast<size_t>(k));
    while (!best.empty()) {
        tmp.push_back(best.top());
        best.pop();
    }
    // Ascending distance, ties by lower index.
    std::sort(tmp.begin(), tmp.end(), [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < k; ++i) out[static_cast<size_t>(i)] = {tmp[static_cast<size_t>(i)].second, tmp[static_cast<size_t>(i)].first};
    return out;
}

std::pair<int, double> GridIndex::nearest(const Vec3& query) const {
    auto r = knn(query, 1);
    return r[0];
}

std::vector<int> GridIndex::within(const Vec3& query, double radius) const {
    std::vector<int> out;
    auto qc = cell_of(query);
    int reach = static_cast<int>(std::ceil(radius / cell_)) + 1;
    double r2 = radius * radius;
    for (int dz = -reach; dz <= reach; ++dz) {
        int cz = qc[2] + dz;
        if (cz < 0 || cz >= dims_[2]) continue;
        for (int dy = -reach; dy <= reach; ++dy) {
            int cy = qc[1] + dy;
            if (cy < 0 || cy >= dims_[1]) continue;
            for (int dx = -reach; dx <= reach; ++dx) {
                int cx = qc[0] + dx;
                if (cx < 0 || cx >= dims_[0]) continue;
                int f = flat(cx, cy, cz);
                for (int s = cell_start_[static_cast<size_t>(f)]; s < cell_start_[static_cast<size_t>(f) + 1]; ++s) {
                    int i = order_[static_cast<size_t>(s)];
                    if (dist2(cloud_[i], query) <= r2) out.push_back(i);
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<int, double>> knn(const PointCloud& cloud, const Vec3& query, int k) {
    GridIndex index(cloud);
    return index.knn(query, k);
}

// ---------------------------------------------------------------------------
// Subsampling and perturbation

std::vector<int> farthest_point_sample(const PointCloud& cloud, int budget, int start) {
    const int n = cloud.size();
    if (budget < 1 || budget > n) throw ArgumentError("farthest_point_sample: budget out of range");
    if (start < 0 || start >= n) throw ArgumentError("farthest_point_sample: invalid start index");

    std::vector<int> selected;
    selected.reserve(static_cast<size_t>(budget));
    std::vector<double> min_d2(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    int current = start;
    selected.push_back(current);
    for (int step = 1; step < budget; ++step) {
        int best = -1;
        double best_d2 = -1;
        for (int i = 0; i < n; ++i) {
            double d2 = dist2(cloud[i], cloud[current]);
            if (d2 < min_d2[static_cast<size_t>(i)]) min_d2[static_cast<size_t>(i)] = d2;
            if (min_d2[static_cast<size_t>(i)] > best_d2) {
                best_d2 = min_d2[static_cast<size_t>(i)];
                best = i;
            }
        }
        current = best;
        selected.push_back(current);
        min_d2[static_cast<size_t>(current)] = 0;
    }
    return selected;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, uint64_t seed) {
    if (sigma < 0) throw ArgumentError("add_gaussian_noise: sigma must be nonnegative");
    PointCloud out = cloud;
    out.rng_seed = seed;
    if (sigma == 0) return out;
    Rng rng(seed);
    for (auto& p : out.points) {
        p.x += sigma * rng.normal();
        p.y += sigma * rng.normal();
        p.z += sigma * rng.normal();
    }
    return out;
}

PointCloud downsample_random(const PointCloud& cloud, int keep, uint64_t seed) {
    const int n = cloud.size();
    if (keep < 1 || keep > n) throw ArgumentError("downsample_random: keep out of range");
    Rng rng(seed);
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first `keep` slots are a uniform sample.
    for (int i = 0; i < keep; ++i) {
        int j = i + rng.uniform_int(n - i);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    PointCloud out;
    out.source_id = cloud.source_id;
    out.rng_seed = seed;
    out.points.reserve(static_cast<size_t>(keep));
    for (int i = 0; i < keep; ++i) out.points.push_back(cloud[idx[static_cast<size_t>(i)]]);
    return out;
}

// ---------------------------------------------------------------------------
// RNG

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

static inline uint64_t rotl64(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

uint64_t Rng::next_u64() {
    // xoshiro256**
    const uint64_t result = rotl64(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl64(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    // Box-Muller; portable across standard libraries.
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0;
    do {
        u1 = uniform();
    } while (u1 <= 0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

int Rng::uniform_int(int n) {
    if (n <= 0) throw ArgumentError("uniform_int: n must be positive");
    // Rejection to avoid modulo bias.
    uint64_t bound = static_cast<uint64_t>(n);
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return static_cast<int>(v % bound);
}

} // namespace ph
