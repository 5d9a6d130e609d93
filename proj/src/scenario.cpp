#include "ecpcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ecpcs/errors.hpp"
#include "ecpcs/rng.hpp"

namespace ecpcs {

std::vector<PhotoMeta> Scenario::all_photos() const {
    std::vector<PhotoMeta> out;
    for (const Participant& p : participants)
        out.insert(out.end(), p.photos.begin(), p.photos.end());
    return out;
}

std::map<std::int64_t, ChannelState> Scenario::channels_by_participant() const {
    std::map<std::int64_t, ChannelState> out;
    for (const Participant& p : participants) out.emplace(p.participant_id, p.channel);
    return out;
}

std::vector<ParticipantLoad> Scenario::total_loads() const {
    std::vector<ParticipantLoad> loads;
    loads.reserve(participants.size());
    for (const Participant& p : participants) {
        ParticipantLoad l;
        l.participant_id = p.participant_id;
        l.photo_count = p.photos.size();
        l.snr_linear = p.channel.snr_linear();
        for (const PhotoMeta& ph : p.photos) l.size_mb += ph.size_mb();
        loads.push_back(l);
    }
    return loads;
}

void Scenario::validate() const {
    if (participants.empty()) throw ValidationError("scenario: no participants");
    if (!std::isfinite(params.eta) || params.eta <= 0.0 || params.eta > 1.0)
        throw ValidationError("scenario: eta must lie in (0, 1], got " +
                              std::to_string(params.eta));
    if (!std::isfinite(params.omega) || params.omega <= 0.0)
        throw ValidationError("scenario: omega must be positive");
    if (!std::isfinite(params.total_bandwidth_hz) || params.total_bandwidth_hz <= 0.0)
        throw ValidationError("scenario: total_bandwidth_hz must be positive");
    if (params.target_threshold == 0)
        throw ValidationError("scenario: target_threshold must be at least 1");
    if (!std::isfinite(params.now_min)) throw ValidationError("scenario: now_min is not finite");
    if (backhaul) {
        if (!std::isfinite(backhaul->rate_bps) || backhaul->rate_bps <= 0.0)
            throw ValidationError("scenario: backhaul rate_bps must be positive");
        if (!std::isfinite(backhaul->wan_rtt_s) || backhaul->wan_rtt_s < 0.0)
            throw ValidationError("scenario: backhaul wan_rtt_s must be nonnegative");
    }

    std::vector<std::int64_t> pids;
    std::vector<std::int64_t> photo_ids{requester_photo.photo_id()};
    for (const Participant& p : participants) {
        pids.push_back(p.participant_id);
        if (!is_finite(p.location))
            throw ValidationError("scenario: non-finite location for participant " +
                                  std::to_string(p.participant_id));
        for (const PhotoMeta& ph : p.photos) {
            if (ph.participant_id() != p.participant_id)
                throw ValidationError("scenario: photo " + std::to_string(ph.photo_id()) +
                                      " does not belong to participant " +
                                      std::to_string(p.participant_id));
            photo_ids.push_back(ph.photo_id());
        }
    }
    std::sort(pids.begin(), pids.end());
    if (std::adjacent_find(pids.begin(), pids.end()) != pids.end())
        throw ValidationError("scenario: duplicate participant ids");
    std::sort(photo_ids.begin(), photo_ids.end());
    if (std::adjacent_find(photo_ids.begin(), photo_ids.end()) != photo_ids.end())
        throw ValidationError("scenario: duplicate photo ids");
}

GenerationSpec GenerationSpec::gate_like() {
    GenerationSpec spec;
    spec.name = "gate-like";
    spec.objectives = {{0.0, 0.0, 8.0}};
    spec.photo_count = 160;
    spec.standpoint_count = 24;
    spec.fov_deg_min = 26.0;
    spec.fov_deg_max = 42.0;
    spec.range_factor_min = 1.05;
    spec.range_factor_max = 1.25;
    spec.aim_jitter_m = 4.0;
    return spec;
}

GenerationSpec GenerationSpec::temple_like() {
    GenerationSpec spec;
    spec.name = "temple-like";
    spec.objectives = {{-6.0, -4.0, 8.0}, {6.0, -4.0, 8.0}, {0.0, 6.0, 8.0}};
    spec.photo_count = 210;
    spec.participant_count = 12;
    spec.standpoint_count = 36;
    spec.fov_deg_min = 26.0;
    spec.fov_deg_max = 42.0;
    spec.range_factor_min = 1.05;
    spec.range_factor_max = 1.25;
    spec.aim_jitter_m = 3.0;
    return spec;
}

void GenerationSpec::validate() const {
    if (objectives.empty()) throw BadSpec("generation: no objectives");
    for (const Point3& o : objectives)
        if (!is_finite(o)) throw BadSpec("generation: non-finite objective");
    if (participant_count == 0) throw BadSpec("generation: participant_count must be positive");
    if (max_photos_each == 0) throw BadSpec("generation: max_photos_each must be positive");
    if (photo_count == 0) throw BadSpec("generation: photo_count must be positive");
    if (photo_count > participant_count * max_photos_each)
        throw BadSpec("generation: " + std::to_string(photo_count) + " photos do not fit " +
                      std::to_string(participant_count) + " participants times " +
                      std::to_string(max_photos_each));
    if (standpoint_count == 0) throw BadSpec("generation: standpoint_count must be positive");
    if (grid_side <= 0) throw BadSpec("generation: grid_side must be positive");
    if (!(ring_radius_m > 0.0)) throw BadSpec("generation: ring_radius_m must be positive");
    if (!(snr_db_max > snr_db_min) || !(snr_db_max > 0.0))
        throw BadSpec("generation: empty SNR range");
    if (!(freshness_min_max > freshness_min_min) || !(freshness_min_max > 0.0))
        throw BadSpec("generation: empty freshness range");
    if (!(fov_deg_min > 0.0) || fov_deg_min > fov_deg_max || fov_deg_max > 180.0)
        throw BadSpec("generation: field-of-view range must lie in (0, 180]");
    if (!(range_factor_min > 0.0) || range_factor_min > range_factor_max)
        throw BadSpec("generation: bad range factors");
    if (!(size_mb_min > 0.0) || size_mb_min > size_mb_max)
        throw BadSpec("generation: bad photo size range");
    if (!(resolution_mp_min > 0.0) || resolution_mp_min > resolution_mp_max)
        throw BadSpec("generation: bad resolution range");
    if (!(aim_jitter_m >= 0.0)) throw BadSpec("generation: negative aim jitter");
    if (!std::isfinite(params.eta) || params.eta <= 0.0 || params.eta > 1.0)
        throw BadSpec("generation: eta must lie in (0, 1]");
    if (!std::isfinite(params.omega) || params.omega <= 0.0)
        throw BadSpec("generation: omega must be positive");
    if (!std::isfinite(params.total_bandwidth_hz) || params.total_bandwidth_hz <= 0.0)
        throw BadSpec("generation: total bandwidth must be positive");
    if (params.target_threshold == 0) throw BadSpec("generation: zero target threshold");
}

Scenario generate_scene(const GenerationSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng = Rng(seed).child("generate");

    Point3 center{0.0, 0.0, 0.0};
    for (const Point3& o : spec.objectives) center = center + o;
    center = (1.0 / static_cast<double>(spec.objectives.size())) * center;

    const double side = static_cast<double>(spec.grid_side);
    SensingGrid grid(spec.grid_side, {center.x - side / 2.0, center.y - side / 2.0, 0.0});

    const std::size_t m_count = spec.participant_count;
    std::vector<Participant> participants;
    participants.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) /
                                 static_cast<double>(m_count) +
                             rng.uniform(-0.15, 0.15);
        Point3 loc{center.x + spec.ring_radius_m * std::cos(angle),
                   center.y + spec.ring_radius_m * std::sin(angle), 0.0};
        ChannelState channel =
            ChannelState::from_db(rng.uniform_open_closed(spec.snr_db_min, spec.snr_db_max));
        participants.push_back(
            Participant{static_cast<std::int64_t>(m) + 1, loc, channel, {}});
    }

    // Popular standpoints: the crowd shoots from a few shared viewpoints,
    // each framing one jittered facet of an objective, so photos arrive in
    // near-duplicate clusters rather than as unique views.
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    struct Standpoint {
        Point3 anchor;
        Point3 aim;
        double fov_rad;
        double range_factor;
    };
    std::vector<Standpoint> standpoints;
    standpoints.reserve(spec.standpoint_count);
    for (std::size_t s = 0; s < spec.standpoint_count; ++s) {
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const Point3 anchor{
            center.x + spec.ring_radius_m * std::cos(angle) + rng.uniform(-1.0, 1.0),
            center.y + spec.ring_radius_m * std::sin(angle) + rng.uniform(-1.0, 1.0),
            rng.uniform(1.2, 1.8)};
        const Point3& objective = spec.objectives[static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::uint64_t>(spec.objectives.size())))];
        const double j = spec.aim_jitter_m;
        const Point3 aim = objective + Point3{rng.uniform(-j, j), rng.uniform(-j, j),
                                              rng.uniform(-j, j)};
        const double fov_rad = rng.uniform(spec.fov_deg_min, spec.fov_deg_max) * kDegToRad;
        const double factor = rng.uniform(spec.range_factor_min, spec.range_factor_max);
        standpoints.push_back(Standpoint{anchor, aim, fov_rad, factor});
    }

    // Photos land on a uniformly chosen participant that still has room and
    // scatter tightly around a uniformly chosen standpoint.
    std::vector<std::size_t> open(m_count);
    for (std::size_t m = 0; m < m_count; ++m) open[m] = m;
    for (std::size_t k = 0; k < spec.photo_count; ++k) {
        const std::size_t pos = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::uint64_t>(open.size())));
        Participant& owner = participants[open[pos]];

        const Standpoint& sp = standpoints[static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::uint64_t>(standpoints.size())))];
        const Point3 cam = sp.anchor + Point3{rng.uniform(-0.4, 0.4),
                                              rng.uniform(-0.4, 0.4),
                                              rng.uniform(-0.15, 0.15)};
        const Point3 aim = sp.aim + Point3{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                           rng.uniform(-0.3, 0.3)};
        const double fov_rad =
            std::clamp(sp.fov_rad * rng.uniform(0.96, 1.04),
                       spec.fov_deg_min * kDegToRad, spec.fov_deg_max * kDegToRad);
        const double range_m =
            distance(cam, aim) * sp.range_factor * rng.uniform(0.98, 1.02);
        const double freshness =
            rng.uniform_open_closed(spec.freshness_min_min, spec.freshness_min_max);
        const double size_mb = rng.uniform(spec.size_mb_min, spec.size_mb_max);
        const double resolution = rng.uniform(spec.resolution_mp_min, spec.resolution_mp_max);

        owner.photos.emplace_back(static_cast<std::int64_t>(k) + 1, owner.participant_id,
                                  cam, Direction3::towards(cam, aim), fov_rad, range_m,
                                  spec.params.now_min - freshness, size_mb, resolution);
        if (owner.photos.size() >= spec.max_photos_each)
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(pos));
    }

    // The query photo itself: taken right now from inside the ring, aimed at
    // the first objective.
    const double req_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Point3 req_loc{center.x + 0.8 * spec.ring_radius_m * std::cos(req_angle),
                   center.y + 0.8 * spec.ring_radius_m * std::sin(req_angle), 1.5};
    PhotoMeta requester(0, 0, req_loc, Direction3::towards(req_loc, spec.objectives[0]),
                        60.0 * kDegToRad, distance(req_loc, spec.objectives[0]) * 1.3,
                        spec.params.now_min, 5.0, 8.0);

    ScenarioParams params = spec.params;
    params.seed = seed;
    Scenario scenario{std::move(participants), requester, grid, params, spec.backhaul};
    scenario.validate();
    return scenario;
}

namespace {

using Json = nlohmann::ordered_json;

const Json& require(const Json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.is_object())
        throw ParseError("scenario: expected an object at " + ctx);
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError("scenario: missing field \"" + key + "\" in " + ctx);
    return *it;
}

double get_double(const Json& obj, const std::string& key, const std::string& ctx) {
    const Json& v = require(obj, key, ctx);
    if (!v.is_number())
        throw ParseError("scenario: field \"" + key + "\" in " + ctx + " is not a number");
    return v.get<double>();
}

std::int64_t get_int(const Json& obj, const std::string& key, const std::string& ctx) {
    const Json& v = require(obj, key, ctx);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ParseError("scenario: field \"" + key + "\" in " + ctx + " is not an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_uint(const Json& obj, const std::string& key, const std::string& ctx) {
    const Json& v = require(obj, key, ctx);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
        throw ParseError("scenario: field \"" + key + "\" in " + ctx +
                         " is not a nonnegative integer");
    return v.get<std::uint64_t>();
}

Point3 get_point(const Json& obj, const std::string& key, const std::string& ctx) {
    const Json& v = require(obj, key, ctx);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        throw ParseError("scenario: field \"" + key + "\" in " + ctx +
                         " is not an [x, y, z] number triple");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Json point_to_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

Json photo_to_json(const PhotoMeta& ph) {
    Json j;
    j["photo_id"] = ph.photo_id();
    j["participant_id"] = ph.participant_id();
    j["location_m"] = point_to_json(ph.location());
    j["direction"] = Json::array({ph.direction().dx(), ph.direction().dy(), ph.direction().dz()});
    j["fov_rad"] = ph.fov_rad();
    j["range_m"] = ph.range_m();
    j["taken_at_min"] = ph.taken_at_min();
    j["size_mb"] = ph.size_mb();
    j["resolution_mp"] = ph.resolution_mp();
    return j;
}

PhotoMeta photo_from_json(const Json& j, const std::string& ctx) {
    const Json& dir = require(j, "direction", ctx);
    if (!dir.is_array() || dir.size() != 3 || !dir[0].is_number() || !dir[1].is_number() ||
        !dir[2].is_number())
        throw ParseError("scenario: field \"direction\" in " + ctx +
                         " is not a unit-vector triple");
    double fov_rad;
    if (j.contains("fov_rad")) {
        fov_rad = get_double(j, "fov_rad", ctx);
    } else if (j.contains("fov_deg")) {
        fov_rad = get_double(j, "fov_deg", ctx) * std::numbers::pi / 180.0;
    } else {
        throw ParseError("scenario: missing field \"fov_rad\" in " + ctx);
    }
    try {
        return PhotoMeta(get_int(j, "photo_id", ctx), get_int(j, "participant_id", ctx),
                         get_point(j, "location_m", ctx),
                         Direction3(dir[0].get<double>(), dir[1].get<double>(),
                                    dir[2].get<double>()),
                         fov_rad, get_double(j, "range_m", ctx),
                         get_double(j, "taken_at_min", ctx), get_double(j, "size_mb", ctx),
                         get_double(j, "resolution_mp", ctx));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("scenario: invalid photo in " + ctx + ": " + e.what());
    }
}

Json channel_to_json(const ChannelState& c) {
    Json j;
    if (c.physical()) {
        const PhysicalChannel& p = *c.physical();
        Json phys;
        phys["tx_power_w"] = p.tx_power_w;
        phys["fading_coeff"] = p.fading_coeff;
        phys["distance_m"] = p.distance_m;
        phys["pathloss_exp"] = p.pathloss_exp;
        phys["noise_w"] = p.noise_w;
        phys["target_ber"] = p.target_ber;
        j["physical"] = phys;
    } else {
        j["snr_linear"] = c.snr_linear();
    }
    return j;
}

ChannelState channel_from_json(const Json& j, const std::string& ctx) {
    try {
        if (j.contains("physical")) {
            const Json& p = require(j, "physical", ctx);
            const std::string pctx = ctx + ".physical";
            PhysicalChannel phys;
            phys.tx_power_w = get_double(p, "tx_power_w", pctx);
            phys.fading_coeff = get_double(p, "fading_coeff", pctx);
            phys.distance_m = get_double(p, "distance_m", pctx);
            phys.pathloss_exp = get_double(p, "pathloss_exp", pctx);
            phys.noise_w = get_double(p, "noise_w", pctx);
            phys.target_ber = get_double(p, "target_ber", pctx);
            return ChannelState::from_physical(phys);
        }
        if (j.contains("snr_linear"))
            return ChannelState::from_linear(get_double(j, "snr_linear", ctx));
        if (j.contains("snr_db")) return ChannelState::from_db(get_double(j, "snr_db", ctx));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("scenario: invalid channel in " + ctx + ": " + e.what());
    }
    throw ParseError("scenario: missing field \"snr_linear\" in " + ctx);
}

}  // namespace

void save_scenario(const Scenario& scenario, const std::string& path) {
    scenario.validate();
    Json j;
    j["schema_version"] = kScenarioSchemaVersion;
    Json params;
    params["eta"] = scenario.params.eta;
    params["omega"] = scenario.params.omega;
    params["total_bandwidth_hz"] = scenario.params.total_bandwidth_hz;
    params["target_threshold"] = scenario.params.target_threshold;
    params["now_min"] = scenario.params.now_min;
    params["seed"] = scenario.params.seed;
    j["params"] = params;
    Json grid;
    grid["side_count"] = scenario.grid.side_count();
    grid["origin_m"] = point_to_json(scenario.grid.origin());
    j["grid"] = grid;
    if (scenario.backhaul) {
        Json bh;
        bh["rate_bps"] = scenario.backhaul->rate_bps;
        bh["wan_rtt_s"] = scenario.backhaul->wan_rtt_s;
        j["backhaul"] = bh;
    }
    j["requester_photo"] = photo_to_json(scenario.requester_photo);
    Json parts = Json::array();
    for (const Participant& p : scenario.participants) {
        Json jp;
        jp["participant_id"] = p.participant_id;
        jp["location_m"] = point_to_json(p.location);
        jp["channel"] = channel_to_json(p.channel);
        Json photos = Json::array();
        for (const PhotoMeta& ph : p.photos) photos.push_back(photo_to_json(ph));
        jp["photos"] = photos;
        parts.push_back(jp);
    }
    j["participants"] = parts;

    std::ofstream out(path);
    if (!out) throw IoError("scenario: cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("scenario: failed writing " + path);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("scenario: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();

    Json j;
    try {
        j = Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }

    const std::int64_t version = get_int(j, "schema_version", "document");
    if (version != kScenarioSchemaVersion)
        throw ParseError("scenario: unsupported schema_version " + std::to_string(version));

    const Json& params = require(j, "params", "document");
    ScenarioParams sp;
    sp.eta = get_double(params, "eta", "params");
    sp.omega = get_double(params, "omega", "params");
    sp.total_bandwidth_hz = get_double(params, "total_bandwidth_hz", "params");
    const std::int64_t threshold = get_int(params, "target_threshold", "params");
    if (threshold < 0 || threshold > UINT32_MAX)
        throw ValidationError("scenario: target_threshold out of range");
    sp.target_threshold = static_cast<std::uint32_t>(threshold);
    sp.now_min = get_double(params, "now_min", "params");
    sp.seed = get_uint(params, "seed", "params");

    const Json& jg = require(j, "grid", "document");
    const std::int64_t side = get_int(jg, "side_count", "grid");
    if (side <= 0 || side > 4096) throw ValidationError("scenario: grid side_count out of range");
    SensingGrid grid(static_cast<std::int32_t>(side), get_point(jg, "origin_m", "grid"));

    std::optional<BackhaulModel> backhaul;
    if (j.contains("backhaul")) {
        const Json& bh = require(j, "backhaul", "document");
        backhaul = BackhaulModel{get_double(bh, "rate_bps", "backhaul"),
                                 get_double(bh, "wan_rtt_s", "backhaul")};
    }

    PhotoMeta requester = photo_from_json(require(j, "requester_photo", "document"),
                                          "requester_photo");

    const Json& parts = require(j, "participants", "document");
    if (!parts.is_array()) throw ParseError("scenario: \"participants\" is not an array");
    std::vector<Participant> participants;
    participants.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string ctx = "participants[" + std::to_string(i) + "]";
        const Json& jp = parts[i];
        const std::int64_t pid = get_int(jp, "participant_id", ctx);
        Point3 loc = get_point(jp, "location_m", ctx);
        ChannelState channel = channel_from_json(require(jp, "channel", ctx), ctx);
        const Json& photos = require(jp, "photos", ctx);
        if (!photos.is_array())
            throw ParseError("scenario: field \"photos\" in " + ctx + " is not an array");
        Participant p{pid, loc, channel, {}};
        p.photos.reserve(photos.size());
        for (std::size_t n = 0; n < photos.size(); ++n)
            p.photos.push_back(
                photo_from_json(photos[n], ctx + ".photos[" + std::to_string(n) + "]"));
        participants.push_back(std::move(p));
    }

    Scenario scenario{std::move(participants), requester, grid, sp, backhaul};
    scenario.validate();
    return scenario;
}

}  // namespace ecpcs
