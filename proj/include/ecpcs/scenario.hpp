#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecpcs/allocation.hpp"
#include "ecpcs/channel.hpp"
#include "ecpcs/geometry.hpp"
#include "ecpcs/photo.hpp"

namespace ecpcs {

// One edge device: where it stands, the uplink it sees, and the photos it
// holds (each photo's participant_id matches).
struct Participant {
    std::int64_t participant_id = 0;
    Point3 location;
    ChannelState channel;
    std::vector<PhotoMeta> photos;

    friend bool operator==(const Participant&, const Participant&) = default;
};

struct ScenarioParams {
    double eta = 0.8;
    double omega = 0.1;
    double total_bandwidth_hz = 10e6;
    std::uint32_t target_threshold = 2;
    double now_min = 10.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

// A complete experiment input: the crowd, the query photo, the sensing grid
// and the knobs. Immutable once built; safe to share across runs.
struct Scenario {
    std::vector<Participant> participants;
    PhotoMeta requester_photo;
    SensingGrid grid;
    ScenarioParams params;
    std::optional<BackhaulModel> backhaul;

    std::vector<PhotoMeta> all_photos() const;
    std::map<std::int64_t, ChannelState> channels_by_participant() const;
    std::vector<ParticipantLoad> total_loads() const;

    // Throws ValidationError when any invariant is broken.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Synthetic scene layout: participant devices on a ring around the objective
// centroid; photos cluster around a few popular standpoints, each standpoint
// framing one jittered objective facet, so the crowd produces near-duplicate
// shots the way real crowds do. Ranges follow the usual defaults (SNR uniform
// over (0, 30] dB, freshness over (0, 10] min).
struct GenerationSpec {
    std::string name = "custom";
    std::vector<Point3> objectives;
    std::size_t participant_count = 10;  // M
    std::size_t max_photos_each = 20;    // N
    std::size_t photo_count = 68;
    std::size_t standpoint_count = 12;  // shared viewpoints photos cluster on
    std::int32_t grid_side = 24;
    double ring_radius_m = 14.0;
    double snr_db_min = 0.0;  // exclusive
    double snr_db_max = 30.0;
    double freshness_min_min = 0.0;  // exclusive
    double freshness_min_max = 10.0;
    double fov_deg_min = 40.0;
    double fov_deg_max = 90.0;
    double range_factor_min = 1.1;
    double range_factor_max = 1.5;
    double size_mb_min = 2.0;
    double size_mb_max = 8.0;
    double resolution_mp_min = 2.0;
    double resolution_mp_max = 12.0;
    double aim_jitter_m = 1.5;
    ScenarioParams params;
    std::optional<BackhaulModel> backhaul = BackhaulModel{100e6, 0.05};

    // Single objective, 160 photos over 24 standpoints.
    static GenerationSpec gate_like();
    // Three objectives, 210 photos over 36 standpoints.
    static GenerationSpec temple_like();

    // Throws BadSpec on empty objectives or nonpositive ranges.
    void validate() const;
};

// Pure function of (spec, seed): the same pair always yields a bitwise
// identical scenario.
Scenario generate_scene(const GenerationSpec& spec, std::uint64_t seed);

// JSON document with a schema_version field and unit-suffixed keys; numbers
// are written so that load(save(s)) == s exactly. Loading accepts snr_db or
// a physical channel block in place of snr_linear, and fov_deg in place of
// fov_rad. Throws ParseError (missing/ill-typed fields, named), IoError, or
// ValidationError.
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

inline constexpr int kScenarioSchemaVersion = 1;

}  // namespace ecpcs
