#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ecpcs/caching.hpp"
#include "oracles.hpp"

using namespace ecpcs;

namespace {

ModelEntry entry(std::uint64_t id, std::size_t size, double popularity) {
    return ModelEntry{id, size, popularity};
}

std::vector<std::uint64_t> ids_of(const std::vector<ModelEntry>& entries) {
    std::vector<std::uint64_t> ids;
    for (const ModelEntry& e : entries) ids.push_back(e.model_id);
    return ids;
}

}  // namespace

TEST_CASE("ModelCache: lookups count hits and misses") {
    ModelCache cache(2);
    CHECK_FALSE(cache.lookup(1));
    CHECK(cache.admit(entry(1, 1, 1.0)));
    CHECK(cache.lookup(1));
    CHECK_FALSE(cache.lookup(2));
    CHECK(cache.hits() == 1);
    CHECK(cache.misses() == 2);
    CHECK(cache.used_units() == 1);
}

TEST_CASE("ModelCache: capacity zero only misses") {
    ModelCache cache(0);
    CHECK_FALSE(cache.lookup(1));
    CHECK_FALSE(cache.lookup(1));
    CHECK(cache.hits() == 0);
    CHECK(cache.misses() == 2);
    CHECK(cache.contents().empty());
    CHECK_THROWS_AS(cache.admit(entry(1, 1, 1.0)), OversizeEntry);
}

TEST_CASE("ModelCache: admit validation and resident refresh") {
    ModelCache cache(3);
    CHECK_THROWS_AS(cache.admit(entry(1, 4, 1.0)), OversizeEntry);
    CHECK_THROWS_AS(cache.admit(entry(1, 0, 1.0)), DomainError);
    CHECK_THROWS_AS(cache.admit(entry(1, 1, -1.0)), DomainError);

    CHECK(cache.admit(entry(1, 2, 1.0)));
    CHECK(cache.used_units() == 2);
    // Re-admitting refreshes popularity without consuming more space.
    CHECK(cache.admit(entry(1, 2, 9.0)));
    CHECK(cache.used_units() == 2);
    REQUIRE(cache.contents().size() == 1);
    CHECK(cache.contents()[0].popularity == 9.0);

    CHECK(cache.set_popularity(1, 4.0));
    CHECK(cache.contents()[0].popularity == 4.0);
    CHECK_FALSE(cache.set_popularity(77, 4.0));
    CHECK_THROWS_AS(cache.set_popularity(1, -2.0), DomainError);
}

TEST_CASE("ModelCache: eviction takes strictly less popular residents, least first") {
    ModelCache cache(3);
    CHECK(cache.admit(entry(1, 1, 1.0)));
    CHECK(cache.admit(entry(2, 1, 2.0)));
    CHECK(cache.admit(entry(3, 1, 3.0)));
    CHECK(cache.used_units() == 3);

    // One unit needed: only the least popular resident goes.
    CHECK(cache.admit(entry(4, 1, 2.5)));
    CHECK(ids_of(cache.contents()) == std::vector<std::uint64_t>{2, 3, 4});

    // Two units needed: the two cheapest strictly-below entries go together.
    CHECK(cache.admit(entry(5, 2, 2.6)));
    CHECK(ids_of(cache.contents()) == std::vector<std::uint64_t>{3, 5});
    CHECK(cache.used_units() == 3);

    // Equal popularity is not strictly less: no victim, entry rejected.
    CHECK_FALSE(cache.admit(entry(6, 1, 2.6)));
    CHECK(ids_of(cache.contents()) == std::vector<std::uint64_t>{3, 5});

    // All or nothing: freeing 2 of the 3 needed units must not evict anyone.
    CHECK_FALSE(cache.admit(entry(7, 3, 2.7)));
    CHECK(ids_of(cache.contents()) == std::vector<std::uint64_t>{3, 5});
    CHECK(cache.used_units() == 3);
}

TEST_CASE("ModelCache: popularity ties evict the older resident first") {
    ModelCache cache(2);
    CHECK(cache.admit(entry(8, 1, 1.0)));
    CHECK(cache.admit(entry(9, 1, 1.0)));
    CHECK(cache.admit(entry(10, 1, 1.5)));
    CHECK(ids_of(cache.contents()) == std::vector<std::uint64_t>{9, 10});
}

TEST_CASE("ModelCache: randomized occupancy invariant") {
    Rng rng(606);
    ModelCache cache(5);
    std::uint64_t lookups = 0;
    for (int op = 0; op < 2000; ++op) {
        if (rng.uniform01() < 0.4) {
            cache.lookup(1 + rng.uniform_int(30));
            ++lookups;
        } else {
            cache.admit(entry(1 + rng.uniform_int(30), 1 + rng.uniform_int(3),
                              rng.uniform(0.0, 10.0)));
        }
        CHECK(cache.used_units() <= 5);
        std::size_t sum = 0;
        for (const ModelEntry& e : cache.contents()) sum += e.size_units;
        CHECK(sum == cache.used_units());
    }
    CHECK(cache.hits() + cache.misses() == lookups);
}

TEST_CASE("zipf_requests: determinism, support and skew") {
    Rng a(5);
    Rng b(5);
    const auto ra = zipf_requests(20, 0.8, 500, a);
    const auto rb = zipf_requests(20, 0.8, 500, b);
    CHECK(ra == rb);
    CHECK(ra.size() == 500);
    for (std::uint64_t id : ra) {
        CHECK(id >= 1);
        CHECK(id <= 20);
    }

    Rng c(6);
    const auto ones = zipf_requests(1, 1.2, 50, c);
    CHECK(std::all_of(ones.begin(), ones.end(), [](std::uint64_t v) { return v == 1; }));

    // Strong skew concentrates nearly everything on rank 1.
    Rng d(7);
    const auto skewed = zipf_requests(50, 5.0, 2000, d);
    const auto rank1 =
        static_cast<double>(std::count(skewed.begin(), skewed.end(), 1ull)) / 2000.0;
    CHECK(rank1 > 0.9);

    Rng e(8);
    CHECK_THROWS_AS(zipf_requests(0, 0.8, 10, e), DomainError);
    CHECK_THROWS_AS(zipf_requests(10, 0.0, 10, e), DomainError);
    CHECK_THROWS_AS(zipf_requests(10, -0.5, 10, e), DomainError);
    CHECK_THROWS_AS(zipf_requests(10, 0.8, 0, e), DomainError);
}

TEST_CASE("zipf_requests: rank-1 frequency matches its probability mass") {
    Rng rng(909);
    const std::size_t len = 100000;
    const auto requests = zipf_requests(100, 0.8, len, rng);
    const double p1 = oracles::zipf_top_mass(100, 0.8, 1);
    const double freq =
        static_cast<double>(std::count(requests.begin(), requests.end(), 1ull)) /
        static_cast<double>(len);
    const double sigma = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(len));
    CHECK(std::fabs(freq - p1) <= 3.0 * sigma);
}

TEST_CASE("simulate_cache: degenerate capacities") {
    std::vector<ModelEntry> catalog;
    for (std::uint64_t id = 1; id <= 5; ++id) catalog.push_back(entry(id, 1, 1.0 / id));
    Rng rng(11);
    const auto requests = zipf_requests(5, 0.8, 400, rng);

    const CacheSimReport none = simulate_cache(0, catalog, requests, PopularityMode::static_score);
    CHECK(none.hit_ratio == 0.0);
    CHECK(none.hits == 0);
    CHECK(none.misses == 400);
    CHECK(none.final_contents.empty());

    // Room for everything: each model misses exactly once.
    const CacheSimReport all = simulate_cache(5, catalog, requests, PopularityMode::static_score);
    std::map<std::uint64_t, bool> seen;
    for (std::uint64_t id : requests) seen[id] = true;
    CHECK(all.misses == seen.size());
    CHECK(all.hits == 400 - seen.size());
    CHECK(all.hit_ratio ==
          doctest::Approx(1.0 - static_cast<double>(seen.size()) / 400.0).epsilon(1e-15));
}

TEST_CASE("simulate_cache: static scores keep the most popular models") {
    const std::size_t n = 100;
    std::vector<ModelEntry> catalog;
    for (std::uint64_t id = 1; id <= n; ++id)
        catalog.push_back(entry(id, 1, std::pow(static_cast<double>(id), -0.8)));
    Rng rng(2026);
    const auto requests = zipf_requests(n, 0.8, 100000, rng);
    const CacheSimReport report =
        simulate_cache(10, catalog, requests, PopularityMode::static_score);

    CHECK(ids_of(report.final_contents) ==
          std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const double mass = oracles::zipf_top_mass(n, 0.8, 10);
    CHECK(std::fabs(report.hit_ratio - mass) <= 0.02);
}

TEST_CASE("simulate_cache: request counts as popularity still fill the cache") {
    const std::size_t n = 40;
    std::vector<ModelEntry> catalog;
    for (std::uint64_t id = 1; id <= n; ++id) catalog.push_back(entry(id, 1, 0.0));
    Rng rng(2027);
    const auto requests = zipf_requests(n, 1.0, 20000, rng);
    const CacheSimReport report =
        simulate_cache(8, catalog, requests, PopularityMode::request_count);
    CHECK(report.hits + report.misses == 20000);
    CHECK(report.hit_ratio > 0.0);
    CHECK(report.hit_ratio < 1.0);
    CHECK(report.final_contents.size() == 8);
}

TEST_CASE("simulate_cache: catalog errors and oversize entries") {
    const std::vector<ModelEntry> dup{entry(1, 1, 1.0), entry(1, 1, 2.0)};
    CHECK_THROWS_AS(simulate_cache(4, dup, {1}, PopularityMode::static_score), DomainError);

    const std::vector<ModelEntry> catalog{entry(1, 1, 1.0)};
    CHECK_THROWS_AS(simulate_cache(4, catalog, {2}, PopularityMode::static_score), DomainError);

    // A model bigger than the whole cache just keeps missing.
    const std::vector<ModelEntry> big{entry(1, 3, 5.0)};
    const CacheSimReport r = simulate_cache(2, big, {1, 1, 1}, PopularityMode::static_score);
    CHECK(r.hits == 0);
    CHECK(r.misses == 3);
    CHECK(r.final_contents.empty());
}
