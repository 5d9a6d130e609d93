#include "ecpcs/selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "ecpcs/errors.hpp"
#include "ecpcs/parallel.hpp"

namespace ecpcs {

namespace {

// Sorted distinct union of every photo's coverage, plus each photo's cells
// remapped to positions in that union. All set work below runs on the
// compact indices instead of raw cell keys.
struct Universe {
    std::vector<CellKey> cells;
    std::vector<std::vector<std::uint32_t>> members;  // per photo, ascending
};

Universe build_universe(const std::vector<CoverageSet>& sets) {
    Universe u;
    for (const CoverageSet& s : sets) {
        u.cells.insert(u.cells.end(), s.cells.begin(), s.cells.end());
    }
    std::sort(u.cells.begin(), u.cells.end());
    u.cells.erase(std::unique(u.cells.begin(), u.cells.end()), u.cells.end());
    u.members.resize(sets.size());
    for (std::size_t p = 0; p < sets.size(); ++p) {
        u.members[p].reserve(sets[p].cells.size());
        for (CellKey c : sets[p].cells) {
            auto it = std::lower_bound(u.cells.begin(), u.cells.end(), c);
            u.members[p].push_back(static_cast<std::uint32_t>(it - u.cells.begin()));
        }
    }
    return u;
}

// Builds the reported result from a pick sequence. Cost is accumulated in
// pick order so identical pick sequences reproduce bitwise-identical totals.
SelectionResult compose_result(const SelectionProblem& problem, const Universe& u,
                               const std::vector<std::size_t>& picks) {
    SelectionResult r;
    std::vector<std::uint8_t> covered(u.cells.size(), 0);
    for (std::size_t p : picks) {
        r.chosen_ids.push_back(problem.coverage_sets[p].photo_id);
        r.total_cost += problem.prices[p].price;
        for (std::uint32_t m : u.members[p]) covered[m] = 1;
    }
    for (std::size_t i = 0; i < covered.size(); ++i) {
        if (covered[i]) r.covered_cells.push_back(u.cells[i]);
    }
    r.coverage_count = r.covered_cells.size();
    r.feasible = r.coverage_count >= problem.required();
    return r;
}

// Uniform sample of `count` distinct indices out of n, in draw order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace

std::size_t SelectionProblem::required() const {
    if (target_size == 0) return 0;
    double raw = std::ceil(eta * static_cast<double>(target_size));
    auto req = static_cast<std::size_t>(raw);
    return std::min(req, target_size);
}

void SelectionProblem::validate() const {
    if (target_size == 0) throw DomainError("selection: target area is empty");
    if (!std::isfinite(eta) || eta <= 0.0 || eta > 1.0)
        throw DomainError("selection: eta must lie in (0, 1], got " + std::to_string(eta));
    if (coverage_sets.size() != prices.size())
        throw DomainError("selection: coverage/price lists differ in length");
    for (std::size_t p = 0; p < coverage_sets.size(); ++p) {
        if (coverage_sets[p].photo_id != prices[p].photo_id)
            throw DomainError("selection: photo id mismatch at position " + std::to_string(p));
        if (!std::isfinite(prices[p].price) || prices[p].price < 0.0)
            throw DomainError("selection: invalid price for photo " +
                              std::to_string(prices[p].photo_id));
        const auto& cells = coverage_sets[p].cells;
        if (!std::is_sorted(cells.begin(), cells.end()) ||
            std::adjacent_find(cells.begin(), cells.end()) != cells.end())
            throw DomainError("selection: coverage of photo " +
                              std::to_string(coverage_sets[p].photo_id) +
                              " is not a sorted set");
        if (cells.size() > target_size)
            throw DomainError("selection: coverage of photo " +
                              std::to_string(coverage_sets[p].photo_id) +
                              " exceeds the target area");
    }
    std::vector<std::int64_t> ids;
    ids.reserve(coverage_sets.size());
    for (const CoverageSet& s : coverage_sets) ids.push_back(s.photo_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DomainError("selection: duplicate photo ids");
}

SelectionResult greedy_select(const SelectionProblem& problem) {
    problem.validate();
    const std::size_t required = problem.required();
    const Universe u = build_universe(problem.coverage_sets);
    const std::size_t n = problem.coverage_sets.size();

    std::vector<std::uint8_t> alive(n, 1);
    for (std::size_t p = 0; p < n; ++p) {
        if (u.members[p].empty()) alive[p] = 0;  // can never contribute
    }

    std::vector<std::uint8_t> covered(u.cells.size(), 0);
    std::size_t covered_count = 0;
    std::vector<std::size_t> picks;
    std::vector<std::size_t> gains(n, 0);

    while (covered_count < required) {
        const std::size_t remaining = required - covered_count;

        // Marginal gains are pure counting; the argmax below stays serial so
        // tie-breaking never depends on thread scheduling.
        std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) \
    if (n * u.cells.size() > kParallelGrainSize)
        for (std::int64_t pi = 0; pi < nn; ++pi) {
            auto p = static_cast<std::size_t>(pi);
            if (!alive[p]) {
                gains[p] = 0;
                continue;
            }
            std::size_t fresh = 0;
            for (std::uint32_t m : u.members[p]) fresh += covered[m] ? 0u : 1u;
            gains[p] = std::min(fresh, remaining);
        }

        bool have_best = false;
        std::size_t best = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (!alive[p]) continue;
            if (gains[p] == 0) {
                alive[p] = 0;  // gains only shrink; retire for good
                continue;
            }
            if (!have_best) {
                best = p;
                have_best = true;
                continue;
            }
            const double price_p = problem.prices[p].price;
            const double price_b = problem.prices[best].price;
            const bool zero_p = price_p == 0.0;
            const bool zero_b = price_b == 0.0;
            bool wins;
            if (zero_p != zero_b) {
                wins = zero_p;  // free photos carry infinite ratio
            } else if (zero_p) {
                wins = gains[p] != gains[best]
                           ? gains[p] > gains[best]
                           : problem.coverage_sets[p].photo_id <
                                 problem.coverage_sets[best].photo_id;
            } else {
                const double rp = static_cast<double>(gains[p]) / price_p;
                const double rb = static_cast<double>(gains[best]) / price_b;
                if (rp != rb)
                    wins = rp > rb;
                else if (price_p != price_b)
                    wins = price_p < price_b;
                else
                    wins = problem.coverage_sets[p].photo_id <
                           problem.coverage_sets[best].photo_id;
            }
            if (wins) best = p;
        }
        if (!have_best) break;  // nothing can add coverage: best effort

        alive[best] = 0;
        picks.push_back(best);
        for (std::uint32_t m : u.members[best]) {
            if (!covered[m]) {
                covered[m] = 1;
                ++covered_count;
            }
        }
    }

    return compose_result(problem, u, picks);
}

namespace {

// Fixed-width bitset over the universe for the exhaustive search.
using Blocks = std::vector<std::uint64_t>;

std::size_t popcount_or(const Blocks& a, const Blocks& b) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::popcount(a[i] | b[i]);
    return total;
}

struct ExactState {
    const SelectionProblem* problem = nullptr;
    std::vector<Blocks> photo_bits;   // per photo
    std::vector<Blocks> suffix_bits;  // union of photos p..n-1
    std::size_t required = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> best_ids;  // sorted ascending
    bool found = false;
    std::vector<std::size_t> stack;
};

// Prefers lower cost, then fewer photos, then the lexicographically smaller
// sorted id list. Keeps the oracle's answer unique per instance.
void offer_solution(ExactState& st, double cost) {
    std::vector<std::int64_t> ids;
    ids.reserve(st.stack.size());
    for (std::size_t p : st.stack) ids.push_back(st.problem->coverage_sets[p].photo_id);
    std::sort(ids.begin(), ids.end());
    if (st.found) {
        if (cost > st.best_cost) return;
        if (cost == st.best_cost) {
            if (ids.size() > st.best_ids.size()) return;
            if (ids.size() == st.best_ids.size() && !(ids < st.best_ids)) return;
        }
    }
    st.found = true;
    st.best_cost = cost;
    st.best_ids = std::move(ids);
}

void exact_dfs(ExactState& st, std::size_t p, Blocks& covered, std::size_t covered_count,
               double cost) {
    if (covered_count >= st.required) {
        // Any extension only adds photos and cost, losing every tie-break.
        offer_solution(st, cost);
        return;
    }
    if (p == st.photo_bits.size()) return;
    if (st.found && cost > st.best_cost) return;
    if (popcount_or(covered, st.suffix_bits[p]) < st.required) return;  // unreachable

    // Include photo p.
    Blocks saved = covered;
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < covered.size(); ++i) {
        std::uint64_t add = st.photo_bits[p][i] & ~covered[i];
        fresh += std::popcount(add);
        covered[i] |= add;
    }
    st.stack.push_back(p);
    exact_dfs(st, p + 1, covered, covered_count + fresh, cost + st.problem->prices[p].price);
    st.stack.pop_back();
    covered = saved;

    // Exclude photo p.
    exact_dfs(st, p + 1, covered, covered_count, cost);
}

}  // namespace

SelectionResult exact_select(const SelectionProblem& problem, std::size_t max_photos) {
    problem.validate();
    if (problem.coverage_sets.size() > max_photos)
        throw TooLarge("exact selection limited to " + std::to_string(max_photos) +
                       " photos, got " + std::to_string(problem.coverage_sets.size()));

    const Universe u = build_universe(problem.coverage_sets);
    const std::size_t n = problem.coverage_sets.size();
    const std::size_t blocks = (u.cells.size() + 63) / 64;

    ExactState st;
    st.problem = &problem;
    st.required = problem.required();
    st.photo_bits.assign(n, Blocks(blocks, 0));
    for (std::size_t p = 0; p < n; ++p) {
        for (std::uint32_t m : u.members[p]) st.photo_bits[p][m / 64] |= 1ull << (m % 64);
    }
    st.suffix_bits.assign(n + 1, Blocks(blocks, 0));
    for (std::size_t p = n; p-- > 0;) {
        st.suffix_bits[p] = st.suffix_bits[p + 1];
        for (std::size_t i = 0; i < blocks; ++i) st.suffix_bits[p][i] |= st.photo_bits[p][i];
    }

    Blocks covered(blocks, 0);
    exact_dfs(st, 0, covered, 0, 0.0);

    if (!st.found) {
        // Requirement unreachable even with every photo: report best effort.
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return compose_result(problem, u, all);
    }

    std::vector<std::size_t> picks;
    picks.reserve(st.best_ids.size());
    for (std::int64_t id : st.best_ids) {
        for (std::size_t p = 0; p < n; ++p) {
            if (problem.coverage_sets[p].photo_id == id) {
                picks.push_back(p);
                break;
            }
        }
    }
    return compose_result(problem, u, picks);
}

double harmonic(std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = n; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
}

RatioReport audit_ratio(const SelectionResult& greedy, const SelectionResult& exact,
                        std::size_t required) {
    if (!greedy.feasible || !exact.feasible)
        throw DomainError("audit: both selections must meet the coverage requirement");
    RatioReport r;
    r.greedy_cost = greedy.total_cost;
    r.exact_cost = exact.total_cost;
    if (r.exact_cost == 0.0) {
        r.ratio = r.greedy_cost == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        r.ratio = r.greedy_cost / r.exact_cost;
    }
    r.bound = harmonic(required);
    r.violation = r.ratio > r.bound + 1e-9;
    return r;
}

SelectionResult random_select(const SelectionProblem& problem, std::size_t count, Rng& rng) {
    problem.validate();
    const std::size_t n = problem.coverage_sets.size();
    if (count > n)
        throw DomainError("random selection: asked for " + std::to_string(count) +
                          " of " + std::to_string(n) + " photos");
    const Universe u = build_universe(problem.coverage_sets);
    return compose_result(problem, u, sample_indices(n, count, rng));
}

namespace {

struct Feature {
    double v[5];
};

double feature_dist2(const Feature& a, const Feature& b) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
        double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return s;
}

Feature photo_feature(const PhotoMeta& ph) {
    const Direction3& d = ph.direction();
    double elev_arg = std::clamp(d.dz(), -1.0, 1.0);
    return Feature{{ph.location().x, ph.location().y, ph.location().z,
                    std::atan2(d.dy(), d.dx()), std::asin(elev_arg)}};
}

}  // namespace

SelectionResult cluster_select(const std::vector<PhotoMeta>& photos,
                               const SelectionProblem& problem, std::size_t count, Rng& rng) {
    problem.validate();
    const std::size_t n = problem.coverage_sets.size();
    if (photos.size() != n)
        throw DomainError("cluster selection: photo list does not match the problem");
    for (std::size_t p = 0; p < n; ++p) {
        if (photos[p].photo_id() != problem.coverage_sets[p].photo_id)
            throw DomainError("cluster selection: photo id mismatch at position " +
                              std::to_string(p));
    }
    if (count == 0) return compose_result(problem, build_universe(problem.coverage_sets), {});
    if (count > n)
        throw DomainError("cluster selection: asked for " + std::to_string(count) +
                          " of " + std::to_string(n) + " photos");

    std::vector<Feature> feats;
    feats.reserve(n);
    for (const PhotoMeta& ph : photos) feats.push_back(photo_feature(ph));

    // Seed centroids with distinct random photos, then run a fixed number of
    // Lloyd rounds. An emptied cluster keeps its previous centroid.
    std::vector<Feature> centroids;
    for (std::size_t p : sample_indices(n, count, rng)) centroids.push_back(feats[p]);

    std::vector<std::size_t> assign(n, 0);
    constexpr int kRounds = 50;
    for (int round = 0; round < kRounds; ++round) {
        for (std::size_t p = 0; p < n; ++p) {
            std::size_t best = 0;
            double best_d = feature_dist2(feats[p], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                double d = feature_dist2(feats[p], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[p] = best;
        }
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            Feature mean{{0, 0, 0, 0, 0}};
            std::size_t members = 0;
            for (std::size_t p = 0; p < n; ++p) {
                if (assign[p] != c) continue;
                for (int i = 0; i < 5; ++i) mean.v[i] += feats[p].v[i];
                ++members;
            }
            if (members == 0) continue;
            for (int i = 0; i < 5; ++i) mean.v[i] /= static_cast<double>(members);
            centroids[c] = mean;
        }
    }

    std::vector<std::uint8_t> used(n, 0);
    std::vector<std::size_t> picks;
    for (const Feature& c : centroids) {
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < n; ++p) {
            if (used[p]) continue;
            double d = feature_dist2(feats[p], c);
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        used[best] = 1;
        picks.push_back(best);
    }
    return compose_result(problem, build_universe(problem.coverage_sets), picks);
}

}  // namespace ecpcs
