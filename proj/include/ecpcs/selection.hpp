#pragma once

#include <cstdint>
#include <vector>

#include "ecpcs/geometry.hpp"
#include "ecpcs/photo.hpp"
#include "ecpcs/pricing.hpp"
#include "ecpcs/rng.hpp"

namespace ecpcs {

// Cost-aware partial-cover instance: per-photo target coverage, per-photo
// prices (same order, matching photo ids), the target size and the required
// coverage ratio eta in (0, 1].
struct SelectionProblem {
    std::vector<CoverageSet> coverage_sets;
    std::vector<PriceTag> prices;
    std::size_t target_size = 0;
    double eta = 1.0;

    // ceil(eta * target_size), clamped to the target size.
    std::size_t required() const;
    void validate() const;
};

// Outcome of a selector. chosen_ids is in pick order; covered_cells is the
// sorted union of the chosen photos' coverage. feasible reports whether the
// coverage requirement was met (never silently).
struct SelectionResult {
    std::vector<std::int64_t> chosen_ids;
    double total_cost = 0.0;
    std::vector<CellKey> covered_cells;
    std::size_t coverage_count = 0;
    bool feasible = false;
};

// Greedy pick loop: each iteration scores every unchosen photo by
// min{new cells, remaining requirement} / price and takes the best.
// Zero-price photos rank as ratio +inf and win among themselves by larger
// marginal, then lower id; priced ties break by lower price, then lower id.
// Photos with empty coverage are dropped up front. Returns the best-effort
// set with feasible=false when the requirement is unreachable.
SelectionResult greedy_select(const SelectionProblem& problem);

// Exhaustive minimum-cost search with cost-based branch pruning. Ties break
// by fewer photos, then lexicographically smaller sorted id list. Intended
// as the audit oracle for small instances; throws TooLarge past max_photos.
SelectionResult exact_select(const SelectionProblem& problem, std::size_t max_photos = 20);

// F_n = sum_{i=1..n} 1/i, the greedy approximation bound for n required cells.
double harmonic(std::size_t n);

struct RatioReport {
    double greedy_cost = 0.0;
    double exact_cost = 0.0;
    double ratio = 1.0;
    double bound = 0.0;  // F_required
    bool violation = false;
};

// Compares a greedy result against the exact oracle on the same problem.
// Both results must be feasible. Flags a violation when the cost ratio
// exceeds the harmonic bound by more than 1e-9.
RatioReport audit_ratio(const SelectionResult& greedy, const SelectionResult& exact,
                        std::size_t required);

// Uniform sample of `count` photos without replacement (RPSS baseline).
// Coverage and cost are reported; feasibility is observed, not enforced.
SelectionResult random_select(const SelectionProblem& problem, std::size_t count, Rng& rng);

// Clustering baseline (CPSS): k-centroid clustering of the photos in the
// 5-d feature space (location x, y, z; direction azimuth, elevation) with a
// fixed 50 Lloyd iterations and seeded initialization; selects the photo
// nearest each centroid. `photos` must align with problem.coverage_sets.
SelectionResult cluster_select(const std::vector<PhotoMeta>& photos,
                               const SelectionProblem& problem, std::size_t count, Rng& rng);

}  // namespace ecpcs
