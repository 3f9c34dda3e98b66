// Command-line front end: each subcommand wraps one pipeline stage and works
// purely through files, so every intermediate is inspectable and stages can be
// re-run independently. Every run writes a key=value manifest with sha-256
// digests beside its outputs.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "floodsar/aggregate.hpp"
#include "floodsar/classifier.hpp"
#include "floodsar/csv.hpp"
#include "floodsar/metrics.hpp"
#include "floodsar/postproc.hpp"
#include "floodsar/raster.hpp"
#include "floodsar/runmeta.hpp"
#include "floodsar/scene.hpp"
#include "floodsar/synth.hpp"
#include "floodsar/trend.hpp"

namespace fs = std::filesystem;
using namespace floodsar;

namespace {

// Exit codes, also documented in the README:
//   0 ok, 1 unexpected, 2 bad config/manifest, 3 grid mismatch,
//   4 malformed file, 5 statistics error, 6 I/O error
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGrid = 3;
constexpr int kExitFormat = 4;
constexpr int kExitStats = 5;
constexpr int kExitIo = 6;

struct Common {
    std::string out_dir;
    int jobs = 1;
    long long seed = -1;  // -1: keep the scenario's seed
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = false) {
    cmd->add_option("--out", c.out_dir, "Output directory")->required();
    cmd->add_option("--jobs", c.jobs, "Worker threads for tile-level parallelism")
        ->check(CLI::PositiveNumber);
    if (with_seed) cmd->add_option("--seed", c.seed, "Random seed override");
}

class Run {
public:
    Run(std::string command, const Common& c) : dir_(c.out_dir) {
        manifest_.command = std::move(command);
        fs::create_directories(dir_);
        start_ = std::chrono::steady_clock::now();
    }
    void cfg(const std::string& k, const std::string& v) { manifest_.config.emplace_back(k, v); }
    void cfg(const std::string& k, double v) { cfg(k, format_double(v)); }
    void cfg(const std::string& k, long long v) { cfg(k, std::to_string(v)); }
    void input(const std::string& path) {
        if (!path.empty()) manifest_.inputs.push_back(path);
    }
    std::string out_path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
    void output(const std::string& path) { manifest_.outputs.push_back(path); }
    void finish() {
        auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_.wall_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
        manifest_.write(out_path(manifest_.command + "-run.txt"));
    }

private:
    std::string dir_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

Raster load_aux_plane(const std::string& path, const Raster& grid, const char* name) {
    Raster r = read_raster(path);
    if (r.same_grid(grid)) return r;
    if (r.transform().crs_code != grid.transform().crs_code)
        throw GridMismatchError(std::string(name) + ": CRS mismatch with the detection grid");
    return resample_nearest(r, grid.transform(), grid.width(), grid.height());
}

// ---------------------------------------------------------------------------

struct DetectArgs {
    Common common;
    std::string manifest_path;
    std::string netspec_path, weights_path;
    double threshold = 0.5;
    double min_delta_db = 3.0;
    bool require_both_pol = false;
    bool no_filter = false;
    bool no_records = false;
    std::string aux_slope, aux_landcover, aux_moisture, aux_temperature, aux_elevation;
    std::string filter_config_path;
};

int run_detect(const DetectArgs& a) {
    Run run("detect", a.common);
    run.input(a.manifest_path);
    run.input(a.netspec_path);
    run.input(a.weights_path);
    run.input(a.filter_config_path);
    for (const auto& p : {a.aux_slope, a.aux_landcover, a.aux_moisture, a.aux_temperature,
                          a.aux_elevation})
        run.input(p);

    FilterConfig fcfg;
    if (!a.filter_config_path.empty()) fcfg = parse_filter_config(a.filter_config_path);
    RuleConfig rcfg{a.min_delta_db, a.require_both_pol};
    std::optional<Network> net;
    if (!a.netspec_path.empty() || !a.weights_path.empty()) {
        if (a.netspec_path.empty() || a.weights_path.empty())
            throw ConfigError("--netspec and --weights must be given together");
        net = load_weights(a.netspec_path, a.weights_path);
    }

    run.cfg("classifier", net ? "network" : "rule");
    run.cfg("threshold", a.threshold);
    run.cfg("min_delta_db", rcfg.min_delta_db);
    run.cfg("require_both_polarizations", rcfg.require_both_polarizations ? "true" : "false");
    run.cfg("filter", a.no_filter ? "false" : "true");
    if (!a.no_filter)
        for (const auto& [k, v] : filter_config_entries(fcfg)) run.cfg("filter." + k, v);

    auto entries = read_scene_manifest(a.manifest_path);
    std::vector<SceneMeta> metas;
    metas.reserve(entries.size());
    for (const auto& e : entries) metas.push_back(e.meta);
    auto pairs = pair_scenes(metas);
    if (pairs.empty()) throw ConfigError(a.manifest_path + ": no admissible scene pairs");
    std::string base_dir = fs::path(a.manifest_path).parent_path().string();

    fs::create_directories(fs::path(a.common.out_dir) / "masks");
    std::vector<DetectionRecord> records;
    std::vector<ObservationEvent> observations;
    std::optional<AuxStack> aux;

    for (auto [pre_i, post_i] : pairs) {
        ScenePair pair = load_scene_pair(entries[pre_i], entries[post_i], base_dir);
        if (!pair.dual_pol())
            std::cerr << "warning: pair " << pair.pre_meta.scene_id << " -> "
                      << pair.post_meta.scene_id << " runs in single-polarization mode (no VH)\n";
        FeatureStack features = compute_features(pair, a.common.jobs);
        FloodCandidateMask cand =
            net ? infer(*net, features, a.threshold, 256, a.common.jobs) : classify_rule(features, rcfg);

        if (!aux) {  // auxiliary planes resampled once onto the detection grid
            aux = AuxStack{};
            const Raster& grid = pair.pre_vv;
            if (!a.aux_slope.empty()) aux->slope = load_aux_plane(a.aux_slope, grid, "slope");
            if (!a.aux_landcover.empty())
                aux->land_cover = load_aux_plane(a.aux_landcover, grid, "land_cover");
            if (!a.aux_moisture.empty())
                aux->soil_moisture = load_aux_plane(a.aux_moisture, grid, "soil_moisture");
            if (!a.aux_temperature.empty())
                aux->temperature = load_aux_plane(a.aux_temperature, grid, "temperature");
            if (!a.aux_elevation.empty())
                aux->elevation = load_aux_plane(a.aux_elevation, grid, "elevation");
        }

        Raster reason(cand.mask.width(), cand.mask.height(), cand.mask.transform(), DType::Byte);
        FloodCandidateMask final_mask = cand;
        if (!a.no_filter) {
            FilterResult fr = filter_false_positives(cand, *aux, fcfg);
            final_mask = std::move(fr.filtered);
            reason = std::move(fr.removal_reason);
        }

        std::string mask_rel = "masks/" + pair.post_meta.scene_id + "-mask.flr";
        std::string reason_rel = "masks/" + pair.post_meta.scene_id + "-reason.flr";
        write_raster(final_mask.mask, run.out_path(mask_rel));
        write_raster(reason, run.out_path(reason_rel));
        run.output(run.out_path(mask_rel));
        run.output(run.out_path(reason_rel));

        if (!a.no_records) {
            auto batch = emit_records(final_mask, reason, features, *aux, pair.post_meta);
            records.insert(records.end(), batch.begin(), batch.end());
        }
        observations.push_back(
            {pair.post_meta.acquisition_time.date(), !pair.dual_pol()});
    }

    if (!a.no_records) {
        write_detections_csv(run.out_path("detections.csv"), records);
        run.output(run.out_path("detections.csv"));
    }
    write_observations_csv(run.out_path("observations.csv"), observations);
    run.output(run.out_path("observations.csv"));
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    Common common;
    std::string scenario_path;
    bool decade = false;
    std::string start = "2014-10";
    int months = 120;
    int base_area_px = 400;
    double trend_pct = 0.0;
    double seasonal_amplitude = 0.0;
    int outlier_year = 0;
    double outlier_factor = 1.0;
    std::string single_pol_before;
    double single_pol_ratio = 0.5;
    double area_noise = 0.0;
};

int run_synth(const SynthArgs& a) {
    Run run("synth", a.common);
    run.input(a.scenario_path);
    SynthScenario sc = a.scenario_path.empty() ? SynthScenario{} : parse_synth_scenario(a.scenario_path);
    if (a.common.seed >= 0) sc.seed = uint64_t(a.common.seed);
    run.cfg("seed", (long long)sc.seed);
    run.cfg("decade", a.decade ? "true" : "false");

    if (!a.decade) {
        GeneratedPair gp = generate_pair(sc);
        AuxStack aux = make_aux_stack(sc);
        std::vector<std::pair<std::string, const Raster*>> files = {
            {"pre-vv.flr", &gp.pair.pre_vv},
            {"post-vv.flr", &gp.pair.post_vv},
            {"truth.flr", &gp.truth},
            {"aux-slope.flr", &*aux.slope},
            {"aux-landcover.flr", &*aux.land_cover},
            {"aux-moisture.flr", &*aux.soil_moisture},
            {"aux-temperature.flr", &*aux.temperature},
            {"aux-elevation.flr", &*aux.elevation}};
        if (gp.pair.pre_vh) files.emplace_back("pre-vh.flr", &*gp.pair.pre_vh);
        if (gp.pair.post_vh) files.emplace_back("post-vh.flr", &*gp.pair.post_vh);
        for (const auto& [name, raster] : files) {
            write_raster(*raster, run.out_path(name));
            run.output(run.out_path(name));
        }
        ManifestEntry pre{gp.pair.pre_meta, "pre-vv.flr", gp.pair.pre_vh ? "pre-vh.flr" : ""};
        ManifestEntry post{gp.pair.post_meta, "post-vv.flr", gp.pair.post_vh ? "post-vh.flr" : ""};
        write_scene_manifest(run.out_path("manifest.csv"), {pre, post});
        run.output(run.out_path("manifest.csv"));
    } else {
        DecadeModel model;
        size_t dash = a.start.rfind('-');
        if (dash == std::string::npos) throw ConfigError("--start must be YYYY-MM");
        model.start = {int(parse_int(a.start.substr(0, dash), "start year")),
                       int(parse_int(a.start.substr(dash + 1), "start month"))};
        model.n_months = a.months;
        model.base_area_px = a.base_area_px;
        model.trend_pct_per_year = a.trend_pct;
        model.seasonal_amplitude = a.seasonal_amplitude;
        model.outlier_year = a.outlier_year;
        model.outlier_factor = a.outlier_factor;
        if (!a.single_pol_before.empty()) model.single_pol_before = Date::parse(a.single_pol_before);
        model.single_pol_detection_ratio = a.single_pol_ratio;
        model.area_noise_frac = a.area_noise;
        run.cfg("trend_pct_per_year", model.trend_pct_per_year);
        run.cfg("seasonal_amplitude", model.seasonal_amplitude);
        run.cfg("outlier_year", (long long)model.outlier_year);
        run.cfg("outlier_factor", model.outlier_factor);
        run.cfg("single_pol_before", a.single_pol_before.empty() ? "none" : a.single_pol_before);
        run.cfg("single_pol_ratio", model.single_pol_detection_ratio);

        DecadeArchive archive = generate_decade(sc, model, a.common.out_dir);
        for (const auto& e : archive.manifest) {
            run.output(run.out_path(e.vv_path));
            if (!e.vh_path.empty()) run.output(run.out_path(e.vh_path));
        }
        run.output(run.out_path("manifest.csv"));
        run.output(run.out_path("observations.csv"));
        run.output(run.out_path("planted.csv"));
    }
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct MaskArgs {
    Common common;
    std::string slope_path, landcover_path, filter_config_path;
    double max_slope_deg = 10.0;
    int slope_neighborhood_px = 2;
};

int run_mask(const MaskArgs& a) {
    Run run("mask", a.common);
    run.input(a.slope_path);
    run.input(a.landcover_path);
    run.input(a.filter_config_path);
    FilterConfig cfg;
    if (!a.filter_config_path.empty()) {
        cfg = parse_filter_config(a.filter_config_path);
    } else {
        cfg.max_slope_deg = a.max_slope_deg;
        cfg.slope_neighborhood_px = a.slope_neighborhood_px;
    }
    for (const auto& [k, v] : filter_config_entries(cfg)) run.cfg(k, v);
    AuxStack aux;
    aux.slope = read_raster(a.slope_path);
    aux.land_cover = read_raster(a.landcover_path);
    ExclusionMask em = build_exclusion_mask(aux, cfg);
    write_raster(em.mask, run.out_path("exclusion-mask.flr"));
    write_raster(em.reason, run.out_path("exclusion-reason.flr"));
    run.output(run.out_path("exclusion-mask.flr"));
    run.output(run.out_path("exclusion-reason.flr"));
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct BufferArgs {
    Common common;
    std::string in_path;
    int radius_px = 0;
};

int run_buffer(const BufferArgs& a) {
    Run run("buffer", a.common);
    run.input(a.in_path);
    run.cfg("radius_px", (long long)a.radius_px);
    Raster out = buffer_mask(read_raster(a.in_path), a.radius_px);
    write_raster(out, run.out_path("buffered.flr"));
    run.output(run.out_path("buffered.flr"));
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct AggregateArgs {
    Common common;
    std::string records_path;
    std::vector<std::string> mask_paths;
    std::vector<std::string> mask_dates;
    std::string start, end;
    int buffer_radius_px = 0;
    std::string like_path;
    double origin_x = 0, origin_y = 0, pixel = 0;
    long long width = 0, height = 0;
    long long crs = 0;
    double coarse_pixel = 0.0;
    double coarse_min_fraction = 0.0;
};

int run_aggregate(const AggregateArgs& a) {
    Run run("aggregate", a.common);
    run.input(a.records_path);
    for (const auto& p : a.mask_paths) run.input(p);
    run.input(a.like_path);
    run.cfg("buffer_radius_px", (long long)a.buffer_radius_px);

    GeoTransform target;
    int64_t width = 0, height = 0;
    if (!a.like_path.empty()) {
        Raster like = read_raster(a.like_path);
        target = like.transform();
        width = like.width();
        height = like.height();
    } else {
        if (a.width <= 0 || a.height <= 0 || a.pixel <= 0)
            throw ConfigError("aggregate needs --like or --origin-x/--origin-y/--pixel/--width/--height");
        target = {a.origin_x, a.origin_y, a.pixel, a.pixel, uint32_t(a.crs)};
        width = a.width;
        height = a.height;
    }

    CompositeMap composite;
    if (!a.records_path.empty()) {
        auto records = read_detections_csv(a.records_path);
        if (records.empty()) throw StatError("aggregate: no detection records");
        Date lo = records.front().date, hi = records.front().date;
        for (const auto& r : records) {
            lo = std::min(lo, r.date);
            hi = std::max(hi, r.date);
        }
        Date start = a.start.empty() ? lo : Date::parse(a.start);
        Date end = a.end.empty() ? hi : Date::parse(a.end);
        composite = compose_records(records, start, end, target, width, height, a.buffer_radius_px);
    } else {
        if (a.mask_paths.empty()) throw ConfigError("aggregate needs --records or --masks");
        if (a.mask_dates.size() != a.mask_paths.size())
            throw ConfigError("--dates must list one date per mask");
        std::vector<Raster> rasters;
        rasters.reserve(a.mask_paths.size());
        for (const auto& p : a.mask_paths) rasters.push_back(read_raster(p));
        std::vector<DatedMask> masks;
        Date lo{9999, 12, 31}, hi{1, 1, 1};
        for (size_t i = 0; i < rasters.size(); ++i) {
            Date d = Date::parse(a.mask_dates[i]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            masks.push_back({&rasters[i], d});
        }
        Date start = a.start.empty() ? lo : Date::parse(a.start);
        Date end = a.end.empty() ? hi : Date::parse(a.end);
        composite = compose_masks(masks, start, end, target, width, height, a.buffer_radius_px);
    }
    run.cfg("period_start", composite.period_start.to_string());
    run.cfg("period_end", composite.period_end.to_string());

    write_raster(composite.extent, run.out_path("composite.flr"));
    run.output(run.out_path("composite.flr"));
    if (composite.observation_count) {
        write_raster(*composite.observation_count, run.out_path("observation-count.flr"));
        run.output(run.out_path("observation-count.flr"));
    }
    if (a.coarse_pixel > 0) {
        run.cfg("coarse_pixel", a.coarse_pixel);
        CompositeMap coarse = coarsen(composite, a.coarse_pixel, a.coarse_min_fraction);
        write_raster(coarse.extent, run.out_path("composite-coarse.flr"));
        run.output(run.out_path("composite-coarse.flr"));
    }
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct OverlayArgs {
    Common common;
    std::string extent_path, landcover_path, zones_path;
    int class_code = landcover::kCropland;
};

int run_overlay(const OverlayArgs& a) {
    Run run("overlay", a.common);
    run.input(a.extent_path);
    run.input(a.landcover_path);
    run.input(a.zones_path);
    run.cfg("class", (long long)a.class_code);
    CompositeMap extent{read_raster(a.extent_path), {}, {}, 0, std::nullopt};
    Raster cover = read_raster(a.landcover_path);
    std::vector<Zone> zones;
    if (!a.zones_path.empty()) zones = read_zones(a.zones_path);
    auto rows = overlay_impact(extent, cover, a.class_code, zones);
    write_impact_csv(run.out_path("impact.csv"), rows);
    run.output(run.out_path("impact.csv"));
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    Common common;
    std::string ours_path;
    std::string gsw_occurrence_path, gsw_binary_path, modis_path, exclusion_path;
    double gsw_threshold = 50.0;
    bool gsw_include_never_water = false;
    std::string region_id = "all";
};

int run_compare(const CompareArgs& a) {
    Run run("compare", a.common);
    run.input(a.ours_path);
    run.input(a.gsw_occurrence_path);
    run.input(a.gsw_binary_path);
    run.input(a.modis_path);
    run.input(a.exclusion_path);
    run.cfg("region_id", a.region_id);
    run.cfg("gsw_threshold", a.gsw_threshold);

    Raster ours = read_raster(a.ours_path);
    std::optional<Raster> gsw;
    if (!a.gsw_occurrence_path.empty())
        gsw = gsw_flood_prone(read_raster(a.gsw_occurrence_path), a.gsw_threshold,
                              a.gsw_include_never_water);
    else if (!a.gsw_binary_path.empty())
        gsw = read_raster(a.gsw_binary_path);
    std::optional<Raster> modis;
    if (!a.modis_path.empty()) modis = read_raster(a.modis_path);
    if (!gsw && !modis) throw ConfigError("compare needs at least one reference layer");
    std::optional<Raster> exclusion;
    std::optional<ExclusionMask> em;
    if (!a.exclusion_path.empty()) exclusion = read_raster(a.exclusion_path);

    std::vector<const Raster*> refs;
    if (gsw) refs.push_back(&*gsw);
    if (modis) refs.push_back(&*modis);
    double new_pct = new_area_pct(ours, refs);

    auto rate_fields = [&](const std::optional<Raster>& ref) -> std::pair<std::string, std::string> {
        if (!ref) return {"", ""};
        OverlapStats s = overlap_stats(ours, *ref, exclusion ? &*exclusion : nullptr);
        return {format_double(s.detection_rate), format_double(s.detection_rate_outside_mask)};
    };
    auto [rate_gsw, rate_gsw_unmasked] = rate_fields(gsw);
    auto [rate_modis, rate_modis_unmasked] = rate_fields(modis);
    write_csv(run.out_path("comparison_report.csv"),
              {"region_id", "new_area_pct", "rate_gsw", "rate_gsw_unmasked", "rate_modis",
               "rate_modis_unmasked"},
              {{a.region_id, format_double(new_pct), rate_gsw, rate_gsw_unmasked, rate_modis,
                rate_modis_unmasked}});
    run.output(run.out_path("comparison_report.csv"));
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrendArgs {
    Common common;
    std::string records_path, observations_path;
    double area_ha = 0.04;
    std::string scenario;  // empty: all three
    bool correct_polarization = false;
    std::string calib_start, calib_end;
    bool decompose = false;
    bool tiles = false;
    double tile_deg = 3.0;
    double p_cutoff = 0.2;
    double moderate_band = 1.0;
    double large_band = 2.0;
    bool per_month_bands = false;
};

int run_trend(const TrendArgs& a) {
    Run run("trend", a.common);
    run.input(a.records_path);
    run.input(a.observations_path);
    run.cfg("area_ha_per_detection", a.area_ha);
    run.cfg("correct_polarization", a.correct_polarization ? "true" : "false");

    auto records = read_detections_csv(a.records_path);
    auto observations = read_observations_csv(a.observations_path);
    MonthlySeries series = build_series(records, observations, a.area_ha);

    if (a.correct_polarization) {
        YearMonth lo = series.start;
        YearMonth hi = series.month_at(series.size() - 1);
        if (!a.calib_start.empty()) {
            Date d = Date::parse(a.calib_start + (a.calib_start.size() == 7 ? "-01" : ""));
            lo = YearMonth::of(d);
        }
        if (!a.calib_end.empty()) {
            Date d = Date::parse(a.calib_end + (a.calib_end.size() == 7 ? "-01" : ""));
            hi = YearMonth::of(d);
        }
        series = polarization_correction(series, lo, hi);
        if (series.pol_correction_factor)
            run.cfg("polarization_correction_factor", *series.pol_correction_factor);
    }

    std::vector<Scenario> scenarios;
    if (a.scenario.empty())
        scenarios = {Scenario::All, Scenario::Drop2022, Scenario::Drop2022AndPreJun2017};
    else
        scenarios = {parse_scenario(a.scenario)};
    std::vector<TrendResult> results;
    results.reserve(scenarios.size());
    for (Scenario sc : scenarios) results.push_back(fit_trend(series, sc));
    write_trend_report_csv(run.out_path("trend_report.csv"), results);
    run.output(run.out_path("trend_report.csv"));

    if (a.decompose) {
        Decomposition d = seasonal_decompose(series);
        write_decomposition_csv(run.out_path("decomposition.csv"), d);
        run.output(run.out_path("decomposition.csv"));
    }
    if (a.tiles) {
        TileTrendConfig cfg;
        cfg.tile_deg = a.tile_deg;
        cfg.p_cutoff = a.p_cutoff;
        cfg.moderate_band_pct = a.moderate_band;
        cfg.large_band_pct = a.large_band;
        cfg.area_ha_per_detection = a.area_ha;
        cfg.net_change_over_period = !a.per_month_bands;
        auto tiles = tile_trends(records, observations, cfg);
        write_tile_trends_csv(run.out_path("tile_trends.csv"), tiles, cfg.tile_deg);
        run.output(run.out_path("tile_trends.csv"));
    }
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct MetricsArgs {
    Common common;
    std::string pred_path, prob_path, truth_path, ignore_path;
    std::vector<double> sweep;
};

int run_metrics(const MetricsArgs& a) {
    Run run("metrics", a.common);
    run.input(a.pred_path);
    run.input(a.prob_path);
    run.input(a.truth_path);
    run.input(a.ignore_path);

    Raster truth = read_raster(a.truth_path);
    std::optional<Raster> ignore;
    if (!a.ignore_path.empty()) ignore = read_raster(a.ignore_path);

    if (!a.pred_path.empty()) {
        Raster pred = read_raster(a.pred_path);
        Metrics m = compare_metrics(pred, truth, ignore ? &*ignore : nullptr);
        write_csv(run.out_path("metrics.csv"), {"precision", "recall", "f1", "iou"},
                  {{format_double(m.precision), format_double(m.recall), format_double(m.f1),
                    format_double(m.iou)}});
        run.output(run.out_path("metrics.csv"));
    }
    if (!a.prob_path.empty()) {
        if (a.sweep.empty()) throw ConfigError("--prob requires --sweep thresholds");
        Raster prob = read_raster(a.prob_path);
        auto rows = decision_threshold_sweep(prob, truth, a.sweep);
        std::vector<std::vector<std::string>> out;
        out.reserve(rows.size());
        for (const auto& r : rows)
            out.push_back({format_double(r.threshold), format_double(r.precision),
                           format_double(r.recall), format_double(r.f1)});
        write_csv(run.out_path("threshold_sweep.csv"), {"threshold", "precision", "recall", "f1"}, out);
        run.output(run.out_path("threshold_sweep.csv"));
    }
    if (a.pred_path.empty() && a.prob_path.empty())
        throw ConfigError("metrics needs --pred or --prob");
    run.finish();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SAR flood-detection pipeline: change-detection features, candidate "
                 "classification, false-positive filtering, aggregation and trend analysis"};
    app.require_subcommand(1);
    // key=value lines, one option per line as subcommand.option=value (flags
    // given on the command line take precedence)
    app.set_config("--config", "", "Config file applied before flags");

    DetectArgs detect_args;
    auto* detect = app.add_subcommand("detect", "Run detection over a scene manifest");
    detect->add_option("--manifest", detect_args.manifest_path, "Scene manifest CSV")->required();
    detect->add_option("--netspec", detect_args.netspec_path, "Network spec file (default: rule classifier)");
    detect->add_option("--weights", detect_args.weights_path, "Raw float32 weight file");
    detect->add_option("--threshold", detect_args.threshold, "Decision threshold for network inference");
    detect->add_option("--min-delta-db", detect_args.min_delta_db, "Rule classifier delta threshold (dB)");
    detect->add_flag("--require-both-pol", detect_args.require_both_pol,
                     "Rule classifier: require both polarizations");
    detect->add_flag("--no-filter", detect_args.no_filter, "Skip false-positive filtering");
    detect->add_flag("--no-records", detect_args.no_records, "Skip detections.csv (masks only)");
    detect->add_option("--aux-slope", detect_args.aux_slope, "Slope raster (degrees)");
    detect->add_option("--aux-landcover", detect_args.aux_landcover, "Land-cover raster");
    detect->add_option("--aux-moisture", detect_args.aux_moisture, "Soil moisture raster");
    detect->add_option("--aux-temperature", detect_args.aux_temperature, "Temperature raster (K)");
    detect->add_option("--aux-elevation", detect_args.aux_elevation, "Elevation raster (m)");
    detect->add_option("--filter-config", detect_args.filter_config_path, "FilterConfig key=value file");
    add_common(detect, detect_args.common);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate synthetic scenes with planted truth");
    synth->add_option("--scenario", synth_args.scenario_path, "Scenario key=value file");
    synth->add_flag("--decade", synth_args.decade, "Generate a monthly decade archive");
    synth->add_option("--start", synth_args.start, "Decade start month YYYY-MM");
    synth->add_option("--months", synth_args.months, "Months in the decade archive");
    synth->add_option("--base-area-px", synth_args.base_area_px, "Mean planted area, pixels");
    synth->add_option("--trend-pct", synth_args.trend_pct, "Planted trend, percent per year");
    synth->add_option("--seasonal-amplitude", synth_args.seasonal_amplitude,
                      "Planted seasonal amplitude, fraction of base");
    synth->add_option("--outlier-year", synth_args.outlier_year, "Year with inflated flooding");
    synth->add_option("--outlier-factor", synth_args.outlier_factor, "Outlier area multiplier");
    synth->add_option("--single-pol-before", synth_args.single_pol_before,
                      "Scenes before this date carry VV only (YYYY-MM-DD)");
    synth->add_option("--single-pol-ratio", synth_args.single_pol_ratio,
                      "Detection ratio of single-pol months");
    synth->add_option("--area-noise", synth_args.area_noise, "Relative jitter on planted area");
    add_common(synth, synth_args.common, true);

    MaskArgs mask_args;
    auto* mask = app.add_subcommand("mask", "Build the static exclusion mask");
    mask->add_option("--slope", mask_args.slope_path, "Slope raster (degrees)")->required();
    mask->add_option("--landcover", mask_args.landcover_path, "Land-cover raster")->required();
    mask->add_option("--filter-config", mask_args.filter_config_path, "FilterConfig key=value file");
    mask->add_option("--max-slope-deg", mask_args.max_slope_deg, "Steep-terrain threshold");
    mask->add_option("--slope-neighborhood-px", mask_args.slope_neighborhood_px,
                     "Steep-terrain dilation radius");
    add_common(mask, mask_args.common);

    BufferArgs buffer_args;
    auto* buffer = app.add_subcommand("buffer", "Dilate a binary mask");
    buffer->add_option("--in", buffer_args.in_path, "Input mask raster")->required();
    buffer->add_option("--radius-px", buffer_args.radius_px, "Chebyshev radius, pixels")->required();
    add_common(buffer, buffer_args.common);

    AggregateArgs agg_args;
    auto* aggregate = app.add_subcommand("aggregate", "Compose detections into an extent map");
    aggregate->add_option("--records", agg_args.records_path, "detections.csv");
    aggregate->add_option("--masks", agg_args.mask_paths, "Per-scene mask rasters");
    aggregate->add_option("--dates", agg_args.mask_dates, "Dates matching --masks (YYYY-MM-DD)");
    aggregate->add_option("--start", agg_args.start, "Period start (YYYY-MM-DD)");
    aggregate->add_option("--end", agg_args.end, "Period end (YYYY-MM-DD)");
    aggregate->add_option("--buffer-radius-px", agg_args.buffer_radius_px, "Buffer radius, pixels");
    aggregate->add_option("--like", agg_args.like_path, "Copy the target grid from this raster");
    aggregate->add_option("--origin-x", agg_args.origin_x, "Target grid x origin");
    aggregate->add_option("--origin-y", agg_args.origin_y, "Target grid y origin");
    aggregate->add_option("--pixel", agg_args.pixel, "Target pixel size");
    aggregate->add_option("--width", agg_args.width, "Target width, pixels");
    aggregate->add_option("--height", agg_args.height, "Target height, pixels");
    aggregate->add_option("--crs", agg_args.crs, "Target EPSG code");
    aggregate->add_option("--coarsen", agg_args.coarse_pixel,
                          "Also write a coarse composite at this pixel size");
    aggregate->add_option("--coarsen-min-fraction", agg_args.coarse_min_fraction,
                          "Coverage fraction for coarse cells (default any-touch)");
    add_common(aggregate, agg_args.common);

    OverlayArgs overlay_args;
    auto* overlay = app.add_subcommand("overlay", "Land-cover impact of a flood extent");
    overlay->add_option("--extent", overlay_args.extent_path, "Composite extent raster")->required();
    overlay->add_option("--landcover", overlay_args.landcover_path, "Land-cover raster")->required();
    overlay->add_option("--class", overlay_args.class_code, "WorldCover class code");
    overlay->add_option("--zones", overlay_args.zones_path, "Zones file (zone_id;x,y,...)");
    add_common(overlay, overlay_args.common);

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Overlap statistics against reference layers");
    compare->add_option("--ours", compare_args.ours_path, "Our binary extent raster")->required();
    compare->add_option("--gsw-occurrence", compare_args.gsw_occurrence_path,
                        "Water-occurrence raster (percent)");
    compare->add_option("--gsw-binary", compare_args.gsw_binary_path, "Pre-thresholded GSW layer");
    compare->add_option("--gsw-threshold", compare_args.gsw_threshold, "Occurrence threshold, percent");
    compare->add_flag("--gsw-include-never-water", compare_args.gsw_include_never_water,
                      "Count 0% occurrence as flood-prone");
    compare->add_option("--modis", compare_args.modis_path, "Binary MODIS-style layer");
    compare->add_option("--exclusion", compare_args.exclusion_path, "Exclusion mask raster");
    compare->add_option("--region-id", compare_args.region_id, "Label for the report row");
    add_common(compare, compare_args.common);

    TrendArgs trend_args;
    auto* trend = app.add_subcommand("trend", "Monthly series and decadal trend estimation");
    trend->add_option("--records", trend_args.records_path, "detections.csv")->required();
    trend->add_option("--observations", trend_args.observations_path, "observations.csv")->required();
    trend->add_option("--area-ha", trend_args.area_ha, "Hectares per detection");
    trend->add_option("--scenario", trend_args.scenario,
                      "all | drop_2022 | drop_2022_and_pre_jun2017 (default: all three)");
    trend->add_flag("--correct-polarization", trend_args.correct_polarization,
                    "Rescale single-pol months from the calibration window");
    trend->add_option("--calib-start", trend_args.calib_start, "Calibration window start (YYYY-MM)");
    trend->add_option("--calib-end", trend_args.calib_end, "Calibration window end (YYYY-MM)");
    trend->add_flag("--decompose", trend_args.decompose, "Write the seasonal decomposition");
    trend->add_flag("--tiles", trend_args.tiles, "Write per-tile trends");
    trend->add_option("--tile-deg", trend_args.tile_deg, "Tile size, degrees");
    trend->add_option("--p-cutoff", trend_args.p_cutoff, "Tile p-value cutoff");
    trend->add_option("--moderate-band", trend_args.moderate_band, "Moderate band, percent");
    trend->add_option("--large-band", trend_args.large_band, "Large band, percent");
    trend->add_flag("--per-month-bands", trend_args.per_month_bands,
                    "Interpret bands as per-month rather than net-over-period");
    add_common(trend, trend_args.common);

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "Validation metrics for a prediction raster");
    metrics->add_option("--pred", metrics_args.pred_path, "Binary prediction raster");
    metrics->add_option("--prob", metrics_args.prob_path, "Probability raster for sweeps");
    metrics->add_option("--truth", metrics_args.truth_path, "Binary truth raster")->required();
    metrics->add_option("--ignore", metrics_args.ignore_path, "Pixels to exclude");
    metrics->add_option("--sweep", metrics_args.sweep, "Thresholds for --prob");
    add_common(metrics, metrics_args.common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return run_detect(detect_args);
        if (synth->parsed()) return run_synth(synth_args);
        if (mask->parsed()) return run_mask(mask_args);
        if (buffer->parsed()) return run_buffer(buffer_args);
        if (aggregate->parsed()) return run_aggregate(agg_args);
        if (overlay->parsed()) return run_overlay(overlay_args);
        if (compare->parsed()) return run_compare(compare_args);
        if (trend->parsed()) return run_trend(trend_args);
        if (metrics->parsed()) return run_metrics(metrics_args);
    } catch (const TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const GridMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGrid;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStats;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
