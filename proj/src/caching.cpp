#include "ecpcs/caching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecpcs/errors.hpp"

namespace ecpcs {

// Capacity 0 is legal: such a cache only ever misses.
ModelCache::ModelCache(std::size_t capacity_units) : capacity_(capacity_units) {}

bool ModelCache::lookup(std::uint64_t model_id) {
    const bool hit = residents_.contains(model_id);
    (hit ? hits_ : misses_) += 1;
    return hit;
}

bool ModelCache::admit(const ModelEntry& entry) {
    if (!std::isfinite(entry.popularity) || entry.popularity < 0.0)
        throw DomainError("cache: invalid popularity for model " +
                          std::to_string(entry.model_id));
    if (entry.size_units == 0)
        throw DomainError("cache: zero-size model " + std::to_string(entry.model_id));
    if (entry.size_units > capacity_)
        throw OversizeEntry("cache: model " + std::to_string(entry.model_id) + " needs " +
                            std::to_string(entry.size_units) + " of " +
                            std::to_string(capacity_) + " units");

    if (auto it = residents_.find(entry.model_id); it != residents_.end()) {
        it->second.entry.popularity = entry.popularity;
        return true;
    }

    if (capacity_ - used_ < entry.size_units) {
        // Gather strictly less popular residents, cheapest first, until the
        // freed space suffices. If it never does, evict nothing.
        std::vector<const Resident*> victims;
        for (const auto& [id, res] : residents_)
            if (res.entry.popularity < entry.popularity) victims.push_back(&res);
        std::sort(victims.begin(), victims.end(), [](const Resident* a, const Resident* b) {
            if (a->entry.popularity != b->entry.popularity)
                return a->entry.popularity < b->entry.popularity;
            return a->sequence < b->sequence;
        });
        std::size_t freed = 0;
        std::size_t needed = 0;
        while (needed < victims.size() && capacity_ - used_ + freed < entry.size_units)
            freed += victims[needed++]->entry.size_units;
        if (capacity_ - used_ + freed < entry.size_units) return false;
        for (std::size_t v = 0; v < needed; ++v) {
            used_ -= victims[v]->entry.size_units;
            residents_.erase(victims[v]->entry.model_id);
        }
    }

    residents_.emplace(entry.model_id, Resident{entry, next_sequence_++});
    used_ += entry.size_units;
    return true;
}

bool ModelCache::set_popularity(std::uint64_t model_id, double popularity) {
    if (!std::isfinite(popularity) || popularity < 0.0)
        throw DomainError("cache: invalid popularity for model " + std::to_string(model_id));
    auto it = residents_.find(model_id);
    if (it == residents_.end()) return false;
    it->second.entry.popularity = popularity;
    return true;
}

std::vector<ModelEntry> ModelCache::contents() const {
    std::vector<ModelEntry> out;
    out.reserve(residents_.size());
    for (const auto& [id, res] : residents_) out.push_back(res.entry);
    return out;  // map iteration is already id-ascending
}

std::vector<std::uint64_t> zipf_requests(std::size_t n, double alpha, std::size_t length,
                                         Rng& rng) {
    if (n == 0) throw DomainError("zipf: need at least one model");
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw DomainError("zipf: skew must be positive, got " + std::to_string(alpha));
    if (length == 0) throw DomainError("zipf: empty request stream");
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += std::pow(static_cast<double>(i + 1), -alpha);
        cdf[i] = total;
    }
    for (double& c : cdf) c /= total;
    cdf[n - 1] = 1.0;  // guard against rounding shortfall at the tail

    std::vector<std::uint64_t> requests;
    requests.reserve(length);
    for (std::size_t r = 0; r < length; ++r) {
        double u = rng.uniform01();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        requests.push_back(static_cast<std::uint64_t>(it - cdf.begin()) + 1);
    }
    return requests;
}

CacheSimReport simulate_cache(std::size_t capacity_units,
                              const std::vector<ModelEntry>& models,
                              const std::vector<std::uint64_t>& requests,
                              PopularityMode mode) {
    std::map<std::uint64_t, const ModelEntry*> catalog;
    for (const ModelEntry& m : models) {
        if (!catalog.emplace(m.model_id, &m).second)
            throw DomainError("cache: duplicate catalog entry " + std::to_string(m.model_id));
    }

    ModelCache cache(capacity_units);
    std::map<std::uint64_t, std::uint64_t> seen;
    for (std::uint64_t id : requests) {
        auto it = catalog.find(id);
        if (it == catalog.end())
            throw DomainError("cache: request for unknown model " + std::to_string(id));
        const std::uint64_t count = ++seen[id];
        if (cache.lookup(id)) {
            if (mode == PopularityMode::request_count)
                cache.set_popularity(id, static_cast<double>(count));
            continue;
        }
        ModelEntry entry = *it->second;
        if (mode == PopularityMode::request_count)
            entry.popularity = static_cast<double>(count);
        if (entry.size_units <= capacity_units) cache.admit(entry);
    }

    CacheSimReport report;
    report.hits = cache.hits();
    report.misses = cache.misses();
    const std::uint64_t total = report.hits + report.misses;
    report.hit_ratio =
        total == 0 ? 0.0 : static_cast<double>(report.hits) / static_cast<double>(total);
    report.final_contents = cache.contents();
    return report;
}

}  // namespace ecpcs
