#include "ecpcs/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "ecpcs/parallel.hpp"

namespace ecpcs {

namespace {
constexpr double kCosineTolerance = 1e-12;
}

bool covers(const PhotoMeta& photo, const Point3& point) {
    const Point3 v = point - photo.location();
    const double d2 = norm2(v);
    const double r = photo.range_m();
    if (d2 > r * r) return false;
    if (d2 == 0.0) return true;  // point at the camera: distance 0, angle undefined
    const double cos_half_fov = std::cos(0.5 * photo.fov_rad());
    const double cos_angle = dot(photo.direction(), v) / std::sqrt(d2);
    return cos_angle >= cos_half_fov - kCosineTolerance;
}

namespace {

// Per-cell photo counts for the whole grid. The cell loop is the hot,
// data-parallel kernel: every iteration is independent and writes one slot.
std::vector<std::uint32_t> count_covering_photos(const std::vector<PhotoMeta>& photos,
                                                 const SensingGrid& grid) {
    const std::int64_t n = static_cast<std::int64_t>(grid.cell_count());
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(n) * photos.size() > kParallelGrainSize)
    for (std::int64_t c = 0; c < n; ++c) {
        const Point3 center = grid.cell_center(static_cast<CellKey>(c));
        std::uint32_t hits = 0;
        for (const PhotoMeta& p : photos) {
            hits += covers(p, center) ? 1u : 0u;
        }
        counts[static_cast<std::size_t>(c)] = hits;
    }
    return counts;
}

TargetArea select_threshold_cells(const std::vector<std::uint32_t>& counts,
                                  std::uint32_t threshold) {
    TargetArea target;
    target.threshold_used = threshold;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] >= threshold) target.cells.push_back(static_cast<CellKey>(c));
    }
    if (target.cells.empty()) {
        throw EmptyTargetArea("no cell reaches coverage threshold " + std::to_string(threshold));
    }
    return target;
}

}  // namespace

std::vector<CellKey> cell_coverage(const PhotoMeta& photo, const SensingGrid& grid) {
    const std::int64_t n = static_cast<std::int64_t>(grid.cell_count());
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(n) > kParallelGrainSize)
    for (std::int64_t c = 0; c < n; ++c) {
        hit[static_cast<std::size_t>(c)] = covers(photo, grid.cell_center(static_cast<CellKey>(c))) ? 1 : 0;
    }
    std::vector<CellKey> cells;
    for (std::int64_t c = 0; c < n; ++c) {
        if (hit[static_cast<std::size_t>(c)]) cells.push_back(static_cast<CellKey>(c));
    }
    return cells;
}

TargetArea estimate_target_area(const std::vector<PhotoMeta>& photos, SensingGrid& grid,
                                std::uint32_t threshold) {
    if (photos.empty()) throw DomainError("estimate_target_area: no photos");
    if (threshold < 1) throw DomainError("estimate_target_area: threshold must be >= 1");
    const std::vector<std::uint32_t> counts = count_covering_photos(photos, grid);
    grid.add_coverage_counts(counts);
    return select_threshold_cells(counts, threshold);
}

std::vector<CoverageSet> coverage_sets(const std::vector<PhotoMeta>& photos,
                                       const TargetArea& target, const SensingGrid& grid) {
    if (target.cells.empty()) throw DomainError("coverage_sets: empty target");
    std::vector<CoverageSet> sets(photos.size());
    const std::int64_t p_count = static_cast<std::int64_t>(photos.size());
#pragma omp parallel for schedule(dynamic) if (photos.size() * target.cells.size() > kParallelGrainSize)
    for (std::int64_t p = 0; p < p_count; ++p) {
        CoverageSet& set = sets[static_cast<std::size_t>(p)];
        set.photo_id = photos[static_cast<std::size_t>(p)].photo_id();
        for (CellKey cell : target.cells) {
            if (covers(photos[static_cast<std::size_t>(p)], grid.cell_center(cell))) {
                set.cells.push_back(cell);
            }
        }
    }
    return sets;
}

namespace serial {

std::vector<CellKey> cell_coverage(const PhotoMeta& photo, const SensingGrid& grid) {
    std::vector<CellKey> cells;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        if (covers(photo, grid.cell_center(static_cast<CellKey>(c)))) {
            cells.push_back(static_cast<CellKey>(c));
        }
    }
    return cells;
}

TargetArea estimate_target_area(const std::vector<PhotoMeta>& photos, SensingGrid& grid,
                                std::uint32_t threshold) {
    if (photos.empty()) throw DomainError("estimate_target_area: no photos");
    if (threshold < 1) throw DomainError("estimate_target_area: threshold must be >= 1");
    std::vector<std::uint32_t> counts(grid.cell_count(), 0);
    for (const PhotoMeta& p : photos) {
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            if (covers(p, grid.cell_center(static_cast<CellKey>(c)))) {
                ++counts[c];
            }
        }
    }
    grid.add_coverage_counts(counts);
    return select_threshold_cells(counts, threshold);
}

std::vector<CoverageSet> coverage_sets(const std::vector<PhotoMeta>& photos,
                                       const TargetArea& target, const SensingGrid& grid) {
    if (target.cells.empty()) throw DomainError("coverage_sets: empty target");
    std::vector<CoverageSet> sets;
    sets.reserve(photos.size());
    for (const PhotoMeta& p : photos) {
        CoverageSet set;
        set.photo_id = p.photo_id();
        for (CellKey cell : target.cells) {
            if (covers(p, grid.cell_center(cell))) set.cells.push_back(cell);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace serial

}  // namespace ecpcs
