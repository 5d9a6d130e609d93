#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ecpcs/errors.hpp"

namespace ecpcs {

// Position in the sensing space, meters.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;
};

inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Point3& p) { return dot(p, p); }
inline double norm(const Point3& p) { return std::sqrt(norm2(p)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline bool is_finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Unit viewing direction. The constructor validates (unit norm within 1e-9);
// from_vector() normalizes an arbitrary nonzero vector.
class Direction3 {
public:
    Direction3(double dx, double dy, double dz) : dx_(dx), dy_(dy), dz_(dz) {
        if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dz)) {
            throw DomainError("Direction3: non-finite component");
        }
        const double n = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (std::fabs(n - 1.0) > 1e-9) {
            throw DomainError("Direction3: not unit norm (|v| = " + std::to_string(n) + ")");
        }
    }

    static Direction3 from_vector(double x, double y, double z) {
        const double n = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(n) || n < 1e-12) {
            throw DomainError("Direction3: cannot normalize a degenerate vector");
        }
        return Direction3(x / n, y / n, z / n);
    }

    static Direction3 towards(const Point3& from, const Point3& to) {
        const Point3 v = to - from;
        return from_vector(v.x, v.y, v.z);
    }

    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double dz() const { return dz_; }

    friend bool operator==(const Direction3&, const Direction3&) = default;

private:
    double dx_, dy_, dz_;
};

// Dot product of a direction with a displacement vector.
inline double dot(const Direction3& d, const Point3& v) {
    return d.dx() * v.x + d.dy() * v.y + d.dz() * v.z;
}

// Cell index triple, each component in [0, G).
struct GridIndex {
    std::int32_t i = 0;
    std::int32_t j = 0;
    std::int32_t k = 0;

    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// Linearized cell index: key = (i * G + j) * G + k.
using CellKey = std::uint32_t;

// Voxelized sensing space: G^3 cubic cells of fixed 1 m edge, plus a
// per-cell coverage counter filled in by target-area estimation.
class SensingGrid {
public:
    static constexpr double kCellSizeM = 1.0;

    SensingGrid(std::int32_t side_count, Point3 origin)
        : side_(side_count), origin_(origin) {
        if (side_count <= 0) throw DomainError("SensingGrid: side_count must be positive");
        if (!is_finite(origin)) throw DomainError("SensingGrid: non-finite origin");
        const std::size_t n = static_cast<std::size_t>(side_count);
        coverage_count_.assign(n * n * n, 0);
    }

    std::int32_t side_count() const { return side_; }
    double cell_size() const { return kCellSizeM; }
    const Point3& origin() const { return origin_; }
    std::size_t cell_count() const { return coverage_count_.size(); }

    CellKey key_of(GridIndex idx) const {
        return static_cast<CellKey>((static_cast<std::int64_t>(idx.i) * side_ + idx.j) * side_ + idx.k);
    }

    GridIndex index_of(CellKey key) const {
        const std::int32_t k = static_cast<std::int32_t>(key % side_);
        const std::int32_t j = static_cast<std::int32_t>((key / side_) % side_);
        const std::int32_t i = static_cast<std::int32_t>(key / (static_cast<std::uint32_t>(side_) * side_));
        return {i, j, k};
    }

    Point3 cell_center(CellKey key) const {
        const GridIndex idx = index_of(key);
        return {origin_.x + (idx.i + 0.5) * kCellSizeM,
                origin_.y + (idx.j + 0.5) * kCellSizeM,
                origin_.z + (idx.k + 0.5) * kCellSizeM};
    }

    const std::vector<std::uint32_t>& coverage_count() const { return coverage_count_; }

    void add_coverage_counts(const std::vector<std::uint32_t>& counts) {
        if (counts.size() != coverage_count_.size())
            throw DomainError("SensingGrid: count record size mismatch");
        for (std::size_t c = 0; c < counts.size(); ++c) coverage_count_[c] += counts[c];
    }

    void reset_coverage_counts() { coverage_count_.assign(coverage_count_.size(), 0); }

    friend bool operator==(const SensingGrid& a, const SensingGrid& b) {
        return a.side_ == b.side_ && a.origin_ == b.origin_;
    }

private:
    std::int32_t side_;
    Point3 origin_;
    std::vector<std::uint32_t> coverage_count_;
};

// Estimated reconstruction objective: cells whose coverage count reached the
// threshold. Cells are sorted ascending by key.
struct TargetArea {
    std::vector<CellKey> cells;
    std::uint32_t threshold_used = 0;
};

// Target cells visible in one photo; always a subset of the owning target.
struct CoverageSet {
    std::int64_t photo_id = 0;
    std::vector<CellKey> cells;  // sorted ascending
};

}  // namespace ecpcs
