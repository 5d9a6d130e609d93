#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <string>

#include <json.hpp>

#include "ecpcs/coverage.hpp"
#include "ecpcs/scenario.hpp"

using namespace ecpcs;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

nlohmann::ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    nlohmann::ordered_json j;
    in >> j;
    return j;
}

void store_json(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << j.dump(2) << '\n';
}

// Saves a patched copy of `scenario` and returns the path.
template <typename Patch>
std::string patched_scenario(const Scenario& scenario, const std::string& name, Patch patch) {
    const std::string base = temp_path(name + ".base.json");
    save_scenario(scenario, base);
    nlohmann::ordered_json j = load_json(base);
    patch(j);
    const std::string out = temp_path(name + ".json");
    store_json(j, out);
    return out;
}

}  // namespace

TEST_CASE("generate_scene: bitwise deterministic in (spec, seed)") {
    const GenerationSpec spec = GenerationSpec::gate_like();
    const Scenario a = generate_scene(spec, 7);
    const Scenario b = generate_scene(spec, 7);
    CHECK(a == b);
    const Scenario c = generate_scene(spec, 8);
    CHECK(a != c);
    CHECK(a.params.seed == 7);
}

TEST_CASE("generate_scene: structure and id conventions") {
    const GenerationSpec spec = GenerationSpec::gate_like();
    const Scenario s = generate_scene(spec, 3);
    CHECK(s.participants.size() == spec.participant_count);

    std::size_t photo_total = 0;
    std::set<std::int64_t> photo_ids;
    for (std::size_t m = 0; m < s.participants.size(); ++m) {
        const Participant& p = s.participants[m];
        CHECK(p.participant_id == static_cast<std::int64_t>(m) + 1);
        CHECK(p.photos.size() <= spec.max_photos_each);
        for (const PhotoMeta& ph : p.photos) {
            CHECK(ph.participant_id() == p.participant_id);
            photo_ids.insert(ph.photo_id());
        }
        photo_total += p.photos.size();
    }
    CHECK(photo_total == spec.photo_count);
    CHECK(photo_ids.size() == spec.photo_count);
    CHECK(*photo_ids.begin() == 1);
    CHECK(*photo_ids.rbegin() == static_cast<std::int64_t>(spec.photo_count));

    CHECK(s.requester_photo.photo_id() == 0);
    CHECK(s.requester_photo.taken_at_min() == s.params.now_min);
    CHECK(s.grid.side_count() == spec.grid_side);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("generate_scene: sampled fields stay inside their ranges") {
    const GenerationSpec spec = GenerationSpec::temple_like();
    const Scenario s = generate_scene(spec, 12);
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    for (const Participant& p : s.participants) {
        CHECK(p.channel.snr_db() > spec.snr_db_min);
        CHECK(p.channel.snr_db() <= spec.snr_db_max);
        for (const PhotoMeta& ph : p.photos) {
            const double freshness = s.params.now_min - ph.taken_at_min();
            CHECK(freshness > spec.freshness_min_min);
            CHECK(freshness <= spec.freshness_min_max);
            CHECK(ph.fov_rad() >= spec.fov_deg_min * kDegToRad);
            CHECK(ph.fov_rad() <= spec.fov_deg_max * kDegToRad);
            CHECK(ph.size_mb() >= spec.size_mb_min);
            CHECK(ph.size_mb() <= spec.size_mb_max);
            CHECK(ph.resolution_mp() >= spec.resolution_mp_min);
            CHECK(ph.resolution_mp() <= spec.resolution_mp_max);
            CHECK(ph.range_m() > 0.0);
        }
    }
}

TEST_CASE("generate_scene: the objective's cell makes it into the target") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const GenerationSpec spec = GenerationSpec::gate_like();
        Scenario s = generate_scene(spec, seed);
        const TargetArea target =
            estimate_target_area(s.all_photos(), s.grid, s.params.target_threshold);
        const Point3 objective = spec.objectives[0];
        const GridIndex idx{
            static_cast<std::int32_t>(std::floor(objective.x - s.grid.origin().x)),
            static_cast<std::int32_t>(std::floor(objective.y - s.grid.origin().y)),
            static_cast<std::int32_t>(std::floor(objective.z - s.grid.origin().z))};
        const CellKey key = s.grid.key_of(idx);
        CHECK(std::find(target.cells.begin(), target.cells.end(), key) != target.cells.end());
    }
}

TEST_CASE("generate_scene: helper views are consistent") {
    const Scenario s = generate_scene(GenerationSpec::gate_like(), 21);
    const auto photos = s.all_photos();
    CHECK(photos.size() == GenerationSpec::gate_like().photo_count);
    const auto channels = s.channels_by_participant();
    CHECK(channels.size() == s.participants.size());
    const auto loads = s.total_loads();
    REQUIRE(loads.size() == s.participants.size());
    for (std::size_t m = 0; m < loads.size(); ++m) {
        CHECK(loads[m].participant_id == s.participants[m].participant_id);
        CHECK(loads[m].photo_count == s.participants[m].photos.size());
        double mb = 0.0;
        for (const PhotoMeta& ph : s.participants[m].photos) mb += ph.size_mb();
        CHECK(loads[m].size_mb == doctest::Approx(mb).epsilon(1e-15));
        CHECK(loads[m].snr_linear == s.participants[m].channel.snr_linear());
    }
}

TEST_CASE("GenerationSpec: validation") {
    GenerationSpec spec = GenerationSpec::gate_like();
    CHECK_NOTHROW(spec.validate());

    GenerationSpec bad = spec;
    bad.objectives.clear();
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.photo_count = bad.participant_count * bad.max_photos_each + 1;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.participant_count = 0;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.snr_db_max = bad.snr_db_min;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.fov_deg_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.fov_deg_max = 190.0;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.size_mb_min = 9.0;  // above size_mb_max
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.grid_side = 0;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.params.eta = 1.2;
    CHECK_THROWS_AS(bad.validate(), BadSpec);
    bad = spec;
    bad.ring_radius_m = 0.0;
    CHECK_THROWS_AS(bad.validate(), BadSpec);

    CHECK_THROWS_AS(generate_scene(bad, 1), BadSpec);
}

TEST_CASE("scenario json: save/load round trip is exact") {
    for (std::uint64_t seed : {5ull, 9ull}) {
        const Scenario original = generate_scene(
            seed == 5 ? GenerationSpec::gate_like() : GenerationSpec::temple_like(), seed);
        const std::string path = temp_path("ecpcs_roundtrip_" + std::to_string(seed) + ".json");
        save_scenario(original, path);
        const Scenario loaded = load_scenario(path);
        CHECK(loaded == original);
        // Loading twice is stable too.
        CHECK(load_scenario(path) == loaded);
    }
}

TEST_CASE("scenario json: physical channel blocks survive the round trip") {
    Scenario s = generate_scene(GenerationSpec::gate_like(), 4);
    PhysicalChannel phys;
    phys.tx_power_w = 0.1;
    phys.fading_coeff = 0.9;
    phys.distance_m = 12.0;
    phys.pathloss_exp = 2.2;
    phys.noise_w = 1e-9;
    phys.target_ber = 1e-4;
    s.participants[0].channel = ChannelState::from_physical(phys);

    const std::string path = temp_path("ecpcs_physical.json");
    save_scenario(s, path);
    const Scenario loaded = load_scenario(path);
    CHECK(loaded == s);
    REQUIRE(loaded.participants[0].channel.physical().has_value());
    CHECK(*loaded.participants[0].channel.physical() == phys);
}

TEST_CASE("scenario json: missing and ill-typed fields name the culprit") {
    const Scenario s = generate_scene(GenerationSpec::gate_like(), 6);

    const std::string no_eta = patched_scenario(
        s, "ecpcs_no_eta", [](nlohmann::ordered_json& j) { j["params"].erase("eta"); });
    try {
        load_scenario(no_eta);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("eta") != std::string::npos);
    }

    const std::string string_eta = patched_scenario(
        s, "ecpcs_string_eta", [](nlohmann::ordered_json& j) { j["params"]["eta"] = "0.8"; });
    CHECK_THROWS_AS(load_scenario(string_eta), ParseError);

    const std::string no_version = patched_scenario(
        s, "ecpcs_no_version", [](nlohmann::ordered_json& j) { j.erase("schema_version"); });
    CHECK_THROWS_AS(load_scenario(no_version), ParseError);

    const std::string wrong_version = patched_scenario(
        s, "ecpcs_wrong_version", [](nlohmann::ordered_json& j) { j["schema_version"] = 99; });
    CHECK_THROWS_AS(load_scenario(wrong_version), ParseError);

    const std::string bad_point = patched_scenario(
        s, "ecpcs_bad_point", [](nlohmann::ordered_json& j) {
            j["participants"][0]["location_m"] = nlohmann::ordered_json::array({1.0, 2.0});
        });
    CHECK_THROWS_AS(load_scenario(bad_point), ParseError);
}

TEST_CASE("scenario json: well-formed documents with bad values fail validation") {
    const Scenario s = generate_scene(GenerationSpec::gate_like(), 6);
    // Photos land on random participants; pick one that owns at least two.
    std::size_t rich = 0;
    while (s.participants[rich].photos.size() < 2) ++rich;

    const std::string bad_eta = patched_scenario(
        s, "ecpcs_bad_eta", [](nlohmann::ordered_json& j) { j["params"]["eta"] = 1.5; });
    CHECK_THROWS_AS(load_scenario(bad_eta), ValidationError);

    const std::string bad_photo = patched_scenario(
        s, "ecpcs_bad_photo", [rich](nlohmann::ordered_json& j) {
            j["participants"][rich]["photos"][0]["size_mb"] = -4.0;
        });
    CHECK_THROWS_AS(load_scenario(bad_photo), ValidationError);

    const std::string huge_grid = patched_scenario(
        s, "ecpcs_huge_grid", [](nlohmann::ordered_json& j) {
            j["grid"]["side_count"] = 100000;
        });
    CHECK_THROWS_AS(load_scenario(huge_grid), ValidationError);

    const std::string dup_photo = patched_scenario(
        s, "ecpcs_dup_photo", [rich](nlohmann::ordered_json& j) {
            j["participants"][rich]["photos"][1]["photo_id"] =
                j["participants"][rich]["photos"][0]["photo_id"];
        });
    CHECK_THROWS_AS(load_scenario(dup_photo), ValidationError);
}

TEST_CASE("scenario json: snr_db and fov_deg spellings are accepted") {
    const Scenario s = generate_scene(GenerationSpec::gate_like(), 6);
    std::size_t rich = 0;
    while (s.participants[rich].photos.empty()) ++rich;

    const std::string db_path = patched_scenario(
        s, "ecpcs_snr_db", [](nlohmann::ordered_json& j) {
            j["participants"][0]["channel"] = nlohmann::ordered_json{{"snr_db", 10.0}};
        });
    const Scenario with_db = load_scenario(db_path);
    CHECK(with_db.participants[0].channel.snr_linear() == doctest::Approx(10.0).epsilon(1e-12));

    const std::string deg_path = patched_scenario(
        s, "ecpcs_fov_deg", [rich](nlohmann::ordered_json& j) {
            auto& photo = j["participants"][rich]["photos"][0];
            photo.erase("fov_rad");
            photo["fov_deg"] = 90.0;
        });
    const Scenario with_deg = load_scenario(deg_path);
    CHECK(with_deg.participants[rich].photos[0].fov_rad() ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("scenario json: io failures") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/dir/x.json"), IoError);

    const std::string garbled = temp_path("ecpcs_garbled.json");
    std::ofstream(garbled) << "{ not json";
    CHECK_THROWS_AS(load_scenario(garbled), ParseError);

    const Scenario s = generate_scene(GenerationSpec::gate_like(), 6);
    CHECK_THROWS_AS(save_scenario(s, "/nonexistent/dir/x.json"), IoError);
}

TEST_CASE("scenario validation: broken invariant examples") {
    Scenario s = generate_scene(GenerationSpec::gate_like(), 6);
    CHECK_NOTHROW(s.validate());

    Scenario bad = s;
    bad.params.eta = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.params.omega = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.params.target_threshold = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.participants.clear();
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.participants[1].participant_id = bad.participants[0].participant_id;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.backhaul = BackhaulModel{-1.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
