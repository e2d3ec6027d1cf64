#include "ph/complex.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "ph/errors.hpp"

namespace ph {

Simplex::Simplex(std::initializer_list<int> verts) {
    if (verts.size() < 1 || verts.size() > 4)
        throw ArgumentError("Simplex: 1..4 vertices required");
    n = static_cast<int8_t>(verts.size());
    int i = 0;
    for (int x : verts) v[static_cast<size_t>(i++)] = x;
    std::sort(v.begin(), v.begin() + n);
    for (int j = 1; j < n; ++j)
        if (v[static_cast<size_t>(j)] == v[static_cast<size_t>(j - 1)])
            throw ArgumentError("Simplex: vertices must be distinct");
}

Simplex Simplex::of(const int* verts, int count) {
    Simplex s;
    if (count < 1 || count > 4) throw ArgumentError("Simplex: 1..4 vertices required");
    s.n = static_cast<int8_t>(count);
    for (int i = 0; i < count; ++i) s.v[static_cast<size_t>(i)] = verts[i];
    std::sort(s.v.begin(), s.v.begin() + count);
    return s;
}

bool Simplex::operator<(const Simplex& o) const {
    if (n != o.n) return n < o.n;
    for (int i = 0; i < n; ++i)
        if (v[static_cast<size_t>(i)] != o.v[static_cast<size_t>(i)])
            return v[static_cast<size_t>(i)] < o.v[static_cast<size_t>(i)];
    return false;
}

std::vector<Simplex> Simplex::facets() const {
    std::vector<Simplex> out;
    if (n <= 1) return out;
    out.reserve(static_cast<size_t>(n));
    for (int skip = 0; skip < n; ++skip) {
        Simplex f;
        f.n = static_cast<int8_t>(n - 1);
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (i != skip) f.v[static_cast<size_t>(k++)] = v[static_cast<size_t>(i)];
        out.push_back(f);
    }
    return out;
}

std::string Simplex::str() const {
    std::string s = "{";
    for (int i = 0; i < n; ++i) {
        if (i) s += ",";
        s += std::to_string(v[static_cast<size_t>(i)]);
    }
    return s + "}";
}

size_t SimplexHash::operator()(const Simplex& s) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](uint64_t x) {
        h ^= x;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<uint64_t>(s.n));
    for (int i = 0; i < s.n; ++i) mix(static_cast<uint64_t>(s.v[static_cast<size_t>(i)]) + 0x9e37ULL);
    return static_cast<size_t>(h);
}

const char* to_string(ComplexKind kind) {
    switch (kind) {
        case ComplexKind::rips: return "rips";
        case ComplexKind::cech: return "cech";
        case ComplexKind::alpha: return "alpha";
        case ComplexKind::witness: return "witness";
        case ComplexKind::cubical: return "cubical";
        case ComplexKind::flood: return "flood";
    }
    return "?";
}

uint64_t FilteredComplex::fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](uint64_t x) {
        h ^= x;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<uint64_t>(kind));
    for (char c : params) mix(static_cast<uint64_t>(c));
    mix(static_cast<uint64_t>(simplices.size()));
    for (size_t i = 0; i < simplices.size(); i += std::max<size_t>(1, simplices.size() / 64)) {
        mix(SimplexHash{}(simplices[i]));
        mix(std::bit_cast<uint64_t>(values[i]));
    }
    if (!values.empty()) mix(std::bit_cast<uint64_t>(values.back()));
    return h;
}

const std::unordered_map<Simplex, int, SimplexHash>& FilteredComplex::face_index() const {
    if (face_index_.empty() && !simplices.empty()) {
        face_index_.reserve(simplices.size() * 2);
        for (int i = 0; i < size(); ++i) face_index_.emplace(simplices[static_cast<size_t>(i)], i);
    }
    return face_index_;
}

int FilteredComplex::position_of(const Simplex& s) const {
    const auto& idx = face_index();
    auto it = idx.find(s);
    return it == idx.end() ? -1 : it->second;
}

void FilteredComplex::sort_canonical() {
    const size_t m = simplices.size();
    std::vector<int> order(m);
    for (size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[static_cast<size_t>(a)] != values[static_cast<size_t>(b)])
            return values[static_cast<size_t>(a)] < values[static_cast<size_t>(b)];
        return simplices[static_cast<size_t>(a)] < simplices[static_cast<size_t>(b)];
    });
    std::vector<Simplex> s2(m);
    std::vector<double> v2(m);
    for (size_t i = 0; i < m; ++i) {
        s2[i] = simplices[static_cast<size_t>(order[i])];
        v2[i] = values[static_cast<size_t>(order[i])];
    }
    simplices = std::move(s2);
    values = std::move(v2);
    face_index_.clear();
}

std::optional<std::string> validate_complex(const FilteredComplex& fc) {
    const int m = fc.size();
    if (static_cast<int>(fc.values.size()) != m) return "values length mismatch";
    for (int i = 0; i < m; ++i) {
        const Simplex& s = fc.simplices[static_cast<size_t>(i)];
        if (s.n < 1 || s.n > 4) return "simplex " + std::to_string(i) + " has invalid vertex count";
        for (int j = 1; j < s.n; ++j)
            if (s.v[static_cast<size_t>(j)] <= s.v[static_cast<size_t>(j - 1)])
                return "simplex " + s.str() + " vertices not strictly increasing";
        if (!std::isfinite(fc.values[static_cast<size_t>(i)]) || fc.values[static_cast<size_t>(i)] < 0)
            return "simplex " + s.str() + " has non-finite or negative value";
    }
    // Ordering: strictly increasing under (value, dim, lex).
    for (int i = 1; i < m; ++i) {
        double va = fc.values[static_cast<size_t>(i - 1)], vb = fc.values[static_cast<size_t>(i)];
        const Simplex &a = fc.simplices[static_cast<size_t>(i - 1)], &b = fc.simplices[static_cast<size_t>(i)];
        bool ordered = va < vb || (va == vb && a < b);
        if (!ordered)
            return "ordering violated at position " + std::to_string(i) + " (" + a.str() + " vs " +
                   b.str() + ")";
    }
    // Face closure and monotonicity.
    const auto& idx = fc.face_index();
    if (static_cast<int>(idx.size()) != m) return "duplicate simplex present";
    for (int i = 0; i < m; ++i) {
        const Simplex& s = fc.simplices[static_cast<size_t>(i)];
        for (const Simplex& f : s.facets()) {
            auto it = idx.find(f);
            if (it == idx.end()) return "missing face " + f.str() + " of " + s.str();
            if (fc.values[static_cast<size_t>(it->second)] > fc.values[static_cast<size_t>(i)])
                return "monotonicity violated: value(" + f.str() + ") > value(" + s.str() + ")";
            if (it->second > i) return "face " + f.str() + " appears after " + s.str();
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cubical cells

int CubicalCell::dim() const { return std::popcount(extent); }

bool CubicalCell::operator<(const CubicalCell& o) const {
    if (dim() != o.dim()) return dim() < o.dim();
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    if (z != o.z) return z < o.z;
    return extent < o.extent;
}

std::vector<CubicalCell> CubicalCell::facets() const {
    std::vector<CubicalCell> out;
    for (int a = 0; a < 3; ++a) {
        uint8_t bit = static_cast<uint8_t>(1 << a);
        if (!(extent & bit)) continue;
        CubicalCell lo = *this;
        lo.extent = static_cast<uint8_t>(extent & ~bit);
        CubicalCell hi = lo;
        if (a == 0) hi.x += 1;
        if (a == 1) hi.y += 1;
        if (a == 2) hi.z += 1;
        out.push_back(lo);
        out.push_back(hi);
    }
    return out;
}

std::string CubicalCell::str() const {
    return std::to_string(x) + ":" + std::to_string(y) + ":" + std::to_string(z) + ":" +
           std::to_string(static_cast<int>(extent));
}

size_t CubicalCellHash::operator()(const CubicalCell& c) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<uint64_t>(c.x));
    mix(static_cast<uint64_t>(c.y));
    mix(static_cast<uint64_t>(c.z));
    mix(c.extent);
    return static_cast<size_t>(h);
}

uint64_t CubicalComplex::fingerprint() const {
    uint64_t h = 0x84222325cbf29ce4ULL;
    auto mix = [&h](uint64_t x) {
        h ^= x;
        h *= 0x100000001b3ULL;
    };
    for (char c : params) mix(static_cast<uint64_t>(c));
    mix(static_cast<uint64_t>(cells.size()));
    for (size_t i = 0; i < cells.size(); i += std::max<size_t>(1, cells.size() / 64)) {
        mix(CubicalCellHash{}(cells[i]));
        mix(std::bit_cast<uint64_t>(values[i]));
    }
    return h;
}

const std::unordered_map<CubicalCell, int, CubicalCellHash>& CubicalComplex::cell_index() const {
    if (cell_index_.empty() && !cells.empty()) {
        cell_index_.reserve(cells.size() * 2);
        for (int i = 0; i < size(); ++i) cell_index_.emplace(cells[static_cast<size_t>(i)], i);
    }
    return cell_index_;
}

int CubicalComplex::position_of(const CubicalCell& c) const {
    const auto& idx = cell_index();
    auto it = idx.find(c);
    return it == idx.end() ? -1 : it->second;
}

std::optional<std::string> validate_complex(const CubicalComplex& cc) {
    const int m = cc.size();
    if (static_cast<int>(cc.values.size()) != m) return "values length mismatch";
    for (int i = 1; i < m; ++i) {
        double va = cc.values[static_cast<size_t>(i - 1)], vb = cc.values[static_cast<size_t>(i)];
        const CubicalCell &a = cc.cells[static_cast<size_t>(i - 1)], &b = cc.cells[static_cast<size_t>(i)];
        bool ordered = va < vb || (va == vb && a < b);
        if (!ordered) return "ordering violated at position " + std::to_string(i);
    }
    const auto& idx = cc.cell_index();
    if (static_cast<int>(idx.size()) != m) return "duplicate cell present";
    for (int i = 0; i < m; ++i) {
        for (const CubicalCell& f : cc.cells[static_cast<size_t>(i)].facets()) {
            auto it = idx.find(f);
            if (it == idx.end()) return "missing face " + f.str() + " of " + cc.cells[static_cast<size_t>(i)].str();
            if (cc.values[static_cast<size_t>(it->second)] > cc.values[static_cast<size_t>(i)])
                return "monotonicity violated at cell " + cc.cells[static_cast<size_t>(i)].str();
            if (it->second > i) return "face appears after coface at " + cc.cells[static_cast<size_t>(i)].str();
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV dump

std::string complex_to_csv(const FilteredComplex& fc) {
    std::string out;
    char buf[64];
    for (int i = 0; i < fc.size(); ++i) {
        const Simplex& s = fc.simplices[static_cast<size_t>(i)];
        out += std::to_string(s.dim());
        for (int j = 0; j < s.n; ++j) {
            out += ',';
            out += std::to_string(s.v[static_cast<size_t>(j)]);
        }
        std::snprintf(buf, sizeof(buf), ",%.17g\n", fc.values[static_cast<size_t>(i)]);
        out += buf;
    }
    return out;
}

FilteredComplex complex_from_csv(const std::string& text) {
    FilteredComplex fc;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() < 3) throw ParseError("complex CSV: too few fields", line_no);
        int dim = std::stoi(fields[0]);
        if (dim < 0 || dim > 3 || static_cast<int>(fields.size()) != dim + 3)
            throw ParseError("complex CSV: field count does not match dim", line_no);
        Simplex s;
        s.n = static_cast<int8_t>(dim + 1);
        for (int j = 0; j <= dim; ++j) s.v[static_cast<size_t>(j)] = std::stoi(fields[static_cast<size_t>(j) + 1]);
        fc.simplices.push_back(s);
        fc.values.push_back(std::stod(fields.back()));
    }
    return fc;
}

std::string complex_to_csv(const CubicalComplex& cc) {
    std::string out;
    char buf[64];
    for (int i = 0; i < cc.size(); ++i) {
        const CubicalCell& c = cc.cells[static_cast<size_t>(i)];
        out += std::to_string(c.dim());
        out += ',';
        out += c.str();
        std::snprintf(buf, sizeof(buf), ",%.17g\n", cc.values[static_cast<size_t>(i)]);
        out += buf;
    }
    return out;
}

} // namespace ph
