#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ecpcs/channel.hpp"
#include "ecpcs/photo.hpp"

namespace ecpcs {

// Monetary price of one photo.
struct PriceTag {
    std::int64_t photo_id = 0;
    double price = 0.0;

    friend bool operator==(const PriceTag&, const PriceTag&) = default;
};

// price = omega * resolution_mp * (now - taken_at) / (size_mb * snr_linear).
// Freshness is measured in minutes, size in MB, resolution in megapixels,
// SNR in linear scale. A photo taken at `now` prices to exactly zero; a
// clock running behind the photo timestamp raises StalenessError.
PriceTag price_photo(const PhotoMeta& photo, const ChannelState& channel, double now_min,
                     double omega);

// Element-wise pricing, order-preserving. `channels` maps participant id to
// channel state; a photo whose participant is missing raises MissingChannel.
std::vector<PriceTag> price_all(const std::vector<PhotoMeta>& photos,
                                const std::map<std::int64_t, ChannelState>& channels,
                                double now_min, double omega);

}  // namespace ecpcs
