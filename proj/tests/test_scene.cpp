#include <doctest.h>

#include <filesystem>
#include <random>

#include "floodsar/scene.hpp"

using namespace floodsar;

namespace {

SceneMeta meta(const char* id, const char* when, PassDirection dir = PassDirection::Ascending,
               int orbit = 100) {
    SceneMeta m;
    m.scene_id = id;
    m.acquisition_time = Timestamp::parse(when);
    m.pass_direction = dir;
    m.relative_orbit = orbit;
    return m;
}

GeoTransform grid() { return {30.0, 10.0, 0.0002, 0.0002, 4326}; }

Raster db_raster(int w, int h, double fill) {
    return Raster(w, h, grid(), DType::Float32, kFloatNoData, fill);
}

ScenePair simple_pair(double pre_vv, double post_vv) {
    ScenePair p;
    p.pre_meta = meta("pre", "2024-05-01T05:30:00Z");
    p.post_meta = meta("post", "2024-05-13T05:30:00Z");
    p.pre_vv = db_raster(3, 3, pre_vv);
    p.post_vv = db_raster(3, 3, post_vv);
    return p;
}

}  // namespace

TEST_CASE("pairing rules") {
    SUBCASE("12-day gap, same geometry: accept") {
        auto v = validate_pair(meta("a", "2024-05-01T05:30:00Z"), meta("b", "2024-05-13T05:30:00Z"));
        CHECK(v.ok);
        CHECK(v.violated == PairRule::None);
    }
    SUBCASE("30 days is still inside the window, 31 is not") {
        CHECK(validate_pair(meta("a", "2024-05-01T05:30:00Z"), meta("b", "2024-05-31T05:30:00Z")).ok);
        auto v = validate_pair(meta("a", "2024-05-01T05:30:00Z"), meta("b", "2024-06-01T05:30:01Z"));
        CHECK_FALSE(v.ok);
        CHECK(v.violated == PairRule::TemporalWindow);
    }
    SUBCASE("ascending vs descending: geometry rule") {
        auto v = validate_pair(meta("a", "2024-05-01T05:30:00Z"),
                               meta("b", "2024-05-13T05:30:00Z", PassDirection::Descending));
        CHECK_FALSE(v.ok);
        CHECK(v.violated == PairRule::PassDirection);
    }
    SUBCASE("orbit mismatch") {
        auto v = validate_pair(meta("a", "2024-05-01T05:30:00Z"),
                               meta("b", "2024-05-13T05:30:00Z", PassDirection::Ascending, 101));
        CHECK_FALSE(v.ok);
        CHECK(v.violated == PairRule::RelativeOrbit);
    }
    SUBCASE("zero or negative gap") {
        auto v = validate_pair(meta("a", "2024-05-13T05:30:00Z"), meta("b", "2024-05-13T05:30:00Z"));
        CHECK_FALSE(v.ok);
        CHECK(v.violated == PairRule::TemporalOrder);
    }
}

TEST_CASE("water thresholds are strict at -17.5 dB VV and -22.5 dB VH") {
    CHECK(is_water_db(-18.0, Polarization::VV));
    CHECK_FALSE(is_water_db(-17.5, Polarization::VV));
    CHECK(is_water_db(-17.5 - 1e-6, Polarization::VV));
    CHECK_FALSE(is_water_db(-17.5 + 1e-6, Polarization::VV));
    CHECK(is_water_db(-23.0, Polarization::VH));
    CHECK_FALSE(is_water_db(-22.5, Polarization::VH));
    CHECK(is_water_db(-22.5 - 1e-6, Polarization::VH));
    CHECK_FALSE(is_water_db(-22.5 + 1e-6, Polarization::VH));
}

TEST_CASE("feature computation") {
    SUBCASE("land-to-water transition sets the indicator and the delta") {
        ScenePair p = simple_pair(-10.0, -20.0);
        FeatureStack f = compute_features(p);
        CHECK(f.change_to_water_vv.at(1, 1) == 1.0);
        CHECK(f.delta_vv.at(1, 1) == -10.0);
        // VH absent: planes are all nodata
        CHECK(f.change_to_water_vh.is_nodata_at(1, 1));
        CHECK(f.delta_vh.is_nodata_at(1, 1));
    }
    SUBCASE("water staying water is not a transition") {
        ScenePair p = simple_pair(-20.0, -21.0);
        FeatureStack f = compute_features(p);
        CHECK(f.change_to_water_vv.at(0, 0) == 0.0);
        CHECK(f.delta_vv.at(0, 0) == doctest::Approx(-1.0));
    }
    SUBCASE("identical scenes: all indicators zero, all deltas zero") {
        ScenePair p = simple_pair(-12.0, -12.0);
        FeatureStack f = compute_features(p);
        for (int64_t i = 0; i < f.change_to_water_vv.size(); ++i) {
            CHECK(f.change_to_water_vv.at_index(i) == 0.0);
            CHECK(f.delta_vv.at_index(i) == 0.0);
        }
    }
    SUBCASE("nodata propagates") {
        ScenePair p = simple_pair(-10.0, -20.0);
        p.pre_vv.set(0, 0, kFloatNoData);
        FeatureStack f = compute_features(p);
        CHECK(f.change_to_water_vv.is_nodata_at(0, 0));
        CHECK(f.delta_vv.is_nodata_at(0, 0));
        CHECK(f.change_to_water_vv.at(0, 1) == 1.0);
    }
    SUBCASE("grid mismatch refuses") {
        ScenePair p = simple_pair(-10.0, -20.0);
        p.post_vv = db_raster(4, 3, -20.0);
        CHECK_THROWS_AS(compute_features(p), GridMismatchError);
    }
    SUBCASE("dual-pol fills VH planes") {
        ScenePair p = simple_pair(-10.0, -20.0);
        p.pre_vh = db_raster(3, 3, -14.0);
        p.post_vh = db_raster(3, 3, -24.0);
        FeatureStack f = compute_features(p);
        CHECK(f.change_to_water_vh.at(1, 1) == 1.0);
        CHECK(f.delta_vh.at(1, 1) == -10.0);
    }
}

TEST_CASE("swapping pre and post negates deltas exactly") {
    std::mt19937_64 rng(21);
    ScenePair p = simple_pair(0, 0);
    for (int64_t i = 0; i < p.pre_vv.size(); ++i) {
        p.pre_vv.set_index(i, -25.0 + double(rng() % 2000) / 100.0);
        p.post_vv.set_index(i, -25.0 + double(rng() % 2000) / 100.0);
    }
    FeatureStack fwd = compute_features(p);
    ScenePair swapped = p;
    std::swap(swapped.pre_vv, swapped.post_vv);  // metadata keeps the valid ordering
    FeatureStack rev = compute_features(swapped);
    for (int64_t i = 0; i < fwd.delta_vv.size(); ++i)
        CHECK(rev.delta_vv.at_index(i) == -fwd.delta_vv.at_index(i));
    // purity: recomputation is bit-identical
    FeatureStack again = compute_features(p);
    CHECK(again.delta_vv.pixels() == fwd.delta_vv.pixels());
    CHECK(again.change_to_water_vv.pixels() == fwd.change_to_water_vv.pixels());
}

TEST_CASE("change indicator implies post in water range and pre outside it") {
    std::mt19937_64 rng(22);
    ScenePair p = simple_pair(0, 0);
    for (int64_t i = 0; i < p.pre_vv.size(); ++i) {
        p.pre_vv.set_index(i, -30.0 + double(rng() % 2500) / 100.0);
        p.post_vv.set_index(i, -30.0 + double(rng() % 2500) / 100.0);
    }
    FeatureStack f = compute_features(p);
    for (int64_t i = 0; i < f.change_to_water_vv.size(); ++i) {
        if (f.change_to_water_vv.at_index(i) == 1.0) {
            CHECK(is_water_db(p.post_vv.at_index(i), Polarization::VV));
            CHECK_FALSE(is_water_db(p.pre_vv.at_index(i), Polarization::VV));
        }
    }
}

TEST_CASE("parallel feature computation is bit-identical to sequential") {
    std::mt19937_64 rng(23);
    ScenePair p = simple_pair(0, 0);
    p.pre_vv = db_raster(37, 41, 0);
    p.post_vv = db_raster(37, 41, 0);
    for (int64_t i = 0; i < p.pre_vv.size(); ++i) {
        p.pre_vv.set_index(i, -25.0 + double(rng() % 2000) / 100.0);
        p.post_vv.set_index(i, -25.0 + double(rng() % 2000) / 100.0);
    }
    FeatureStack seq = compute_features(p, 1);
    FeatureStack par = compute_features(p, 4);
    CHECK(par.delta_vv.pixels() == seq.delta_vv.pixels());
    CHECK(par.change_to_water_vv.pixels() == seq.change_to_water_vv.pixels());
}

TEST_CASE("manifest round-trip and admissible-predecessor pairing") {
    namespace fs = std::filesystem;
    std::vector<ManifestEntry> entries;
    entries.push_back({meta("s1", "2024-05-01T05:30:00Z"), "a.flr", ""});
    entries.push_back({meta("s2", "2024-05-13T05:30:00Z"), "b.flr", "b_vh.flr"});
    entries.push_back({meta("s3", "2024-05-25T05:30:00Z"), "c.flr", "c_vh.flr"});
    auto path = (fs::temp_directory_path() / "floodsar_manifest.csv").string();
    write_scene_manifest(path, entries);
    auto back = read_scene_manifest(path);
    REQUIRE(back.size() == 3);
    CHECK(back[1].meta.scene_id == "s2");
    CHECK(back[1].meta.has_vh);
    CHECK_FALSE(back[0].meta.has_vh);
    CHECK(back[2].vh_path == "c_vh.flr");
    fs::remove(path);

    std::vector<SceneMeta> metas;
    for (const auto& e : entries) metas.push_back(e.meta);
    auto pairs = pair_scenes(metas);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<size_t, size_t>{0, 1});  // nearest predecessor
    CHECK(pairs[1] == std::pair<size_t, size_t>{1, 2});

    // a descending scene in between is skipped in favor of the matching one
    metas.push_back(meta("s4", "2024-05-20T05:30:00Z", PassDirection::Descending));
    auto pairs2 = pair_scenes(metas);
    bool found = false;
    for (auto pr : pairs2)
        if (pr.second == 2) {
            CHECK(pr.first == 1);
            found = true;
        }
    CHECK(found);
}
