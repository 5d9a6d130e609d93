#pragma once

#include <cstdint>
#include <numbers>

#include "ecpcs/geometry.hpp"

namespace ecpcs {

// One photo's metadata tuple: pose, field of view, visible range, timestamp,
// data size, resolution. The constructor enforces the field invariants, so a
// PhotoMeta in hand is always valid.
class PhotoMeta {
public:
    PhotoMeta(std::int64_t photo_id, std::int64_t participant_id, Point3 location,
              Direction3 direction, double fov_rad, double range_m, double taken_at_min,
              double size_mb, double resolution_mp)
        : photo_id_(photo_id),
          participant_id_(participant_id),
          location_(location),
          direction_(direction),
          fov_rad_(fov_rad),
          range_m_(range_m),
          taken_at_min_(taken_at_min),
          size_mb_(size_mb),
          resolution_mp_(resolution_mp) {
        if (!is_finite(location)) throw DomainError("PhotoMeta: non-finite location");
        if (!(fov_rad > 0.0) || fov_rad > std::numbers::pi)
            throw DomainError("PhotoMeta: fov_rad must be in (0, pi]");
        if (!(range_m > 0.0) || !std::isfinite(range_m))
            throw DomainError("PhotoMeta: range_m must be positive");
        if (!std::isfinite(taken_at_min)) throw DomainError("PhotoMeta: non-finite timestamp");
        if (!(size_mb > 0.0) || !std::isfinite(size_mb))
            throw DomainError("PhotoMeta: size_mb must be positive");
        if (!(resolution_mp > 0.0) || !std::isfinite(resolution_mp))
            throw DomainError("PhotoMeta: resolution_mp must be positive");
    }

    std::int64_t photo_id() const { return photo_id_; }
    std::int64_t participant_id() const { return participant_id_; }
    const Point3& location() const { return location_; }
    const Direction3& direction() const { return direction_; }
    double fov_rad() const { return fov_rad_; }
    double range_m() const { return range_m_; }
    double taken_at_min() const { return taken_at_min_; }
    double size_mb() const { return size_mb_; }
    double resolution_mp() const { return resolution_mp_; }

    friend bool operator==(const PhotoMeta&, const PhotoMeta&) = default;

private:
    std::int64_t photo_id_;
    std::int64_t participant_id_;
    Point3 location_;
    Direction3 direction_;
    double fov_rad_;
    double range_m_;
    double taken_at_min_;
    double size_mb_;
    double resolution_mp_;
};

}  // namespace ecpcs
