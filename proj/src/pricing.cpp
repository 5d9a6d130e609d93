#include "ecpcs/pricing.hpp"

namespace ecpcs {

PriceTag price_photo(const PhotoMeta& photo, const ChannelState& channel, double now_min,
                     double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("price_photo: omega must be positive");
    const double freshness_min = now_min - photo.taken_at_min();
    if (freshness_min < 0.0) {
        throw StalenessError("price_photo: photo " + std::to_string(photo.photo_id()) +
                             " is timestamped after now (clock skew?)");
    }
    const double price = omega * photo.resolution_mp() * freshness_min /
                         (photo.size_mb() * channel.snr_linear());
    return {photo.photo_id(), price};
}

std::vector<PriceTag> price_all(const std::vector<PhotoMeta>& photos,
                                const std::map<std::int64_t, ChannelState>& channels,
                                double now_min, double omega) {
    std::vector<PriceTag> tags;
    tags.reserve(photos.size());
    for (const PhotoMeta& photo : photos) {
        const auto it = channels.find(photo.participant_id());
        if (it == channels.end()) {
            throw MissingChannel("price_all: participant " +
                                 std::to_string(photo.participant_id()) +
                                 " has no channel state");
        }
        tags.push_back(price_photo(photo, it->second, now_min, omega));
    }
    return tags;
}

}  // namespace ecpcs
