#pragma once

#include <vector>

#include "ecpcs/geometry.hpp"
#include "ecpcs/photo.hpp"

namespace ecpcs {

// Visibility predicate: the point lies inside the photo's viewing cone
// (apex at the shooting location, axis along the viewing direction,
// half-angle fov/2, radius range_m). The shooting location itself is always
// covered. Angle comparison carries a 1e-12 absolute tolerance on the
// cosine to stabilize boundary cells.
bool covers(const PhotoMeta& photo, const Point3& point);

// Cells of the grid whose center the photo covers, ascending by key.
std::vector<CellKey> cell_coverage(const PhotoMeta& photo, const SensingGrid& grid);

// Cells covered by at least `threshold` photos. Adds this call's per-cell
// photo counts into the grid's coverage_count record. Throws EmptyTargetArea
// when no cell reaches the threshold.
TargetArea estimate_target_area(const std::vector<PhotoMeta>& photos, SensingGrid& grid,
                                std::uint32_t threshold);

// Per-photo intersection of cell coverage with the target, in input order.
std::vector<CoverageSet> coverage_sets(const std::vector<PhotoMeta>& photos,
                                       const TargetArea& target, const SensingGrid& grid);

// Serial reference implementations. Plain loops with no OpenMP and no shared
// kernel machinery; the unit tests check the parallel kernels against these,
// and the benchmark tool compares their timings.
namespace serial {

std::vector<CellKey> cell_coverage(const PhotoMeta& photo, const SensingGrid& grid);
TargetArea estimate_target_area(const std::vector<PhotoMeta>& photos, SensingGrid& grid,
                                std::uint32_t threshold);
std::vector<CoverageSet> coverage_sets(const std::vector<PhotoMeta>& photos,
                                       const TargetArea& target, const SensingGrid& grid);

}  // namespace serial

}  // namespace ecpcs
