#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ecpcs/rng.hpp"

namespace ecpcs {

// A reconstructed 3-d model kept at the edge. size_units is the integer
// number of cache slots it occupies; popularity drives admission.
struct ModelEntry {
    std::uint64_t model_id = 0;
    std::size_t size_units = 1;
    double popularity = 0.0;

    friend bool operator==(const ModelEntry&, const ModelEntry&) = default;
};

// Popularity-ordered cache with whole-entry admission. A new entry may only
// displace strictly less popular residents, least popular first (older
// insertions go first on ties), and only when the evictions free enough
// room; otherwise nothing is evicted and the entry is rejected.
class ModelCache {
   public:
    explicit ModelCache(std::size_t capacity_units);

    // Records a hit or miss and returns whether the model is resident.
    bool lookup(std::uint64_t model_id);

    // Tries to make the entry resident; returns whether it is afterwards.
    // Re-admitting a resident model just refreshes its popularity. Entries
    // larger than the whole cache are rejected with OversizeEntry.
    bool admit(const ModelEntry& entry);

    // Updates a resident's popularity; returns false when not resident.
    bool set_popularity(std::uint64_t model_id, double popularity);

    std::size_t capacity_units() const { return capacity_; }
    std::size_t used_units() const { return used_; }
    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }

    // Residents sorted by ascending model id.
    std::vector<ModelEntry> contents() const;

   private:
    struct Resident {
        ModelEntry entry;
        std::uint64_t sequence = 0;
    };

    std::size_t capacity_;
    std::size_t used_ = 0;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
    std::uint64_t next_sequence_ = 0;
    std::map<std::uint64_t, Resident> residents_;
};

// Zipf-distributed request stream: model ids are the ranks 1..n and rank i
// is drawn with probability proportional to i^-alpha.
std::vector<std::uint64_t> zipf_requests(std::size_t n, double alpha, std::size_t length,
                                         Rng& rng);

// How popularity is scored during a simulation: the entry's fixed score, or
// the running request count seen so far.
enum class PopularityMode { static_score, request_count };

struct CacheSimReport {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    double hit_ratio = 0.0;
    std::vector<ModelEntry> final_contents;
};

// Replays `requests` against a fresh cache. Every requested id must have a
// catalog entry in `models`.
CacheSimReport simulate_cache(std::size_t capacity_units,
                              const std::vector<ModelEntry>& models,
                              const std::vector<std::uint64_t>& requests,
                              PopularityMode mode);

}  // namespace ecpcs
