#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "floodsar/aggregate.hpp"
#include "floodsar/classifier.hpp"
#include "floodsar/metrics.hpp"
#include "floodsar/synth.hpp"

using namespace floodsar;

namespace {

SynthScenario small_scenario() {
    SynthScenario sc;
    sc.width = 48;
    sc.height = 40;
    // one pixel-aligned rectangle: rows 8..16, cols 10..30 -> 8*20 = 160 px
    const GeoTransform& g = sc.grid;
    double xl = g.x_origin + 10 * g.pixel_width, xr = g.x_origin + 30 * g.pixel_width;
    double yt = g.y_origin - 8 * g.pixel_height, yb = g.y_origin - 16 * g.pixel_height;
    sc.flood_polygons = {{{xl, yt}, {xr, yt}, {xr, yb}, {xl, yb}}};
    return sc;
}

}  // namespace

TEST_CASE("planted truth matches the polygon pixel count exactly") {
    GeneratedPair gp = generate_pair(small_scenario());
    CHECK(gp.truth.count_positive() == 160);
}

TEST_CASE("the same seed generates bit-identical scenes") {
    SynthScenario sc = small_scenario();
    sc.speckle_sigma = 1.5;
    GeneratedPair a = generate_pair(sc);
    GeneratedPair b = generate_pair(sc);
    CHECK(a.pair.pre_vv.pixels() == b.pair.pre_vv.pixels());
    CHECK(a.pair.post_vv.pixels() == b.pair.post_vv.pixels());
    CHECK(a.pair.post_vh->pixels() == b.pair.post_vh->pixels());
    CHECK(a.truth.pixels() == b.truth.pixels());

    sc.seed = 43;
    GeneratedPair c = generate_pair(sc);
    CHECK(c.pair.post_vv.pixels() != a.pair.post_vv.pixels());
}

TEST_CASE("an empty polygon set plants nothing") {
    SynthScenario sc = small_scenario();
    sc.flood_polygons.clear();
    GeneratedPair gp = generate_pair(sc);
    CHECK(gp.truth.count_positive() == 0);
    FeatureStack f = compute_features(gp.pair);
    FloodCandidateMask m = classify_rule(f, {});
    CHECK(m.mask.count_positive() == 0);
}

TEST_CASE("noiseless scenes are recovered exactly by the rule classifier") {
    GeneratedPair gp = generate_pair(small_scenario());
    FeatureStack f = compute_features(gp.pair);
    FloodCandidateMask m = classify_rule(f, {});
    Metrics metrics = compare_metrics(m.mask, gp.truth);
    CHECK(metrics.iou == 1.0);
}

TEST_CASE("amplitude margins keep per-pixel misclassification under 2.5% at 1.5 dB noise") {
    SynthScenario sc = small_scenario();
    sc.speckle_sigma = 1.5;  // land VV margin 6.5 dB, flood VV margin 3.5 dB
    int64_t wrong = 0, total = 0;
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        sc.seed = seed;
        GeneratedPair gp = generate_pair(sc);
        FeatureStack f = compute_features(gp.pair);
        FloodCandidateMask m = classify_rule(f, {});
        for (int64_t i = 0; i < m.mask.size(); ++i) {
            if (m.mask.at_index(i) != gp.truth.at_index(i)) ++wrong;
            ++total;
        }
    }
    CHECK(double(wrong) / double(total) < 0.025);
}

TEST_CASE("scenario files round-trip") {
    namespace fs = std::filesystem;
    SynthScenario sc = small_scenario();
    sc.speckle_sigma = 0.75;
    sc.aux_land_cover = landcover::kGrassland;
    auto path = (fs::temp_directory_path() / "floodsar_scenario.txt").string();
    write_synth_scenario(sc, path);
    SynthScenario back = parse_synth_scenario(path);
    CHECK(back.seed == sc.seed);
    CHECK(back.width == sc.width);
    CHECK(back.speckle_sigma == sc.speckle_sigma);
    CHECK(back.aux_land_cover == sc.aux_land_cover);
    REQUIRE(back.flood_polygons.size() == 1);
    CHECK(back.flood_polygons[0] == sc.flood_polygons[0]);
    fs::remove(path);
}

TEST_CASE("scenario validation rejects amplitudes on the wrong side of the thresholds") {
    SynthScenario sc = small_scenario();
    sc.water_amplitude_vv = -17.0;  // not in the water range
    CHECK_THROWS_AS(sc.validate(), ConfigError);
    sc = small_scenario();
    sc.land_amplitude_vv = -18.0;  // inside the water range
    CHECK_THROWS_AS(sc.validate(), ConfigError);
}

TEST_CASE("planted monthly model: trend, seasonality, outlier and single-pol deficit") {
    DecadeModel m;
    m.base_area_px = 400;

    SUBCASE("flat model plants a constant area") {
        for (int t = 0; t < 120; t += 17) CHECK(planted_pixels(m, t) == 400);
    }
    SUBCASE("the centered trend keeps the midpoint at base") {
        m.trend_pct_per_year = 6.0;
        CHECK(std::abs(planted_pixels(m, 59) + planted_pixels(m, 60) - 800) <= 1);
        CHECK(planted_pixels(m, 119) > planted_pixels(m, 0));
    }
    SUBCASE("outlier year scales by the factor") {
        m.outlier_year = 2022;
        m.outlier_factor = 3.0;
        // 2022-01 is month index 87 from 2014-10
        CHECK(planted_pixels(m, 87) == 1200);
        CHECK(planted_pixels(m, 86) == 400);
    }
    SUBCASE("single-pol months plant at the deficit ratio") {
        m.single_pol_before = Date{2017, 6, 1};
        // 2017-05 is index 31; 2017-06 is index 32
        CHECK(planted_pixels(m, 31) == 200);
        CHECK(planted_pixels(m, 32) == 400);
    }
}

TEST_CASE("decade archive: valid consecutive pairs, observations and planted counts") {
    namespace fs = std::filesystem;
    SynthScenario sc;
    sc.width = 40;
    sc.height = 40;
    sc.speckle_sigma = 0.0;
    DecadeModel model;
    model.start = {2017, 1};
    model.n_months = 24;
    model.base_area_px = 100;
    model.single_pol_before = Date{2017, 6, 1};
    auto dir = (fs::temp_directory_path() / "floodsar_decade").string();
    fs::remove_all(dir);
    DecadeArchive archive = generate_decade(sc, model, dir);

    REQUIRE(archive.manifest.size() == 48);
    REQUIRE(archive.months.size() == 24);
    // every consecutive manifest pair is admissible
    for (size_t i = 1; i < archive.manifest.size(); ++i) {
        CHECK(validate_pair(archive.manifest[i - 1].meta, archive.manifest[i].meta).ok);
    }
    // observations: one per admissible consecutive pair (2n - 1)
    CHECK(archive.observations.size() == 47);
    // single-pol months planted at half the base
    CHECK(archive.months[0].single_pol);
    CHECK(archive.months[0].planted_px == 50);
    CHECK_FALSE(archive.months[6].single_pol);  // 2017-07
    CHECK(archive.months[6].planted_px == 100);

    // archive round-trips through its files
    auto manifest = read_scene_manifest(dir + "/manifest.csv");
    CHECK(manifest.size() == archive.manifest.size());
    CHECK_FALSE(manifest[0].meta.has_vh);  // pre-cutoff scene is VV-only
    CHECK(manifest[47].meta.has_vh);
    auto planted = read_planted_csv(dir + "/planted.csv");
    REQUIRE(planted.size() == 24);
    CHECK(planted[3].planted_px == archive.months[3].planted_px);

    // detection on one post-cutoff archive pair recovers the planted area
    ScenePair pair = load_scene_pair(manifest[24], manifest[25], dir);  // 2018-01
    FeatureStack f = compute_features(pair);
    FloodCandidateMask m = classify_rule(f, {});
    CHECK(m.mask.count_positive() == archive.months[12].planted_px);
    fs::remove_all(dir);
}
