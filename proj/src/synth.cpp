#include "floodsar/synth.hpp"

#include <cmath>
#include <filesystem>

#include "floodsar/csv.hpp"

namespace floodsar {

double Rng::normal() {
    // Box-Muller on explicitly generated uniforms.
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    // SplitMix64 over the combined value.
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void SynthScenario::validate() const {
    if (width < 1 || height < 1) throw ConfigError("scenario grid must be at least 1x1");
    if (!(water_amplitude_vv < kWaterThresholdVvDb))
        throw ConfigError("water_amplitude_vv must lie below the VV water threshold");
    if (!(land_amplitude_vv >= kWaterThresholdVvDb))
        throw ConfigError("land_amplitude_vv must lie at or above the VV water threshold");
    if (dual_pol) {
        if (!(water_amplitude_vh < kWaterThresholdVhDb))
            throw ConfigError("water_amplitude_vh must lie below the VH water threshold");
        if (!(land_amplitude_vh >= kWaterThresholdVhDb))
            throw ConfigError("land_amplitude_vh must lie at or above the VH water threshold");
    }
    if (speckle_sigma < 0) throw ConfigError("speckle_sigma must be >= 0");
}

SynthScenario parse_synth_scenario(const std::string& path) {
    SynthScenario sc;
    for (const auto& [k, v] : read_kv(path)) {
        if (k == "seed")
            sc.seed = uint64_t(parse_int(v, "seed"));
        else if (k == "width")
            sc.width = parse_int(v, "width");
        else if (k == "height")
            sc.height = parse_int(v, "height");
        else if (k == "x_origin")
            sc.grid.x_origin = parse_double(v, "x_origin");
        else if (k == "y_origin")
            sc.grid.y_origin = parse_double(v, "y_origin");
        else if (k == "pixel_width")
            sc.grid.pixel_width = parse_double(v, "pixel_width");
        else if (k == "pixel_height")
            sc.grid.pixel_height = parse_double(v, "pixel_height");
        else if (k == "crs_code")
            sc.grid.crs_code = uint32_t(parse_int(v, "crs_code"));
        else if (k == "land_amplitude_vv")
            sc.land_amplitude_vv = parse_double(v, k.c_str());
        else if (k == "land_amplitude_vh")
            sc.land_amplitude_vh = parse_double(v, k.c_str());
        else if (k == "water_amplitude_vv")
            sc.water_amplitude_vv = parse_double(v, k.c_str());
        else if (k == "water_amplitude_vh")
            sc.water_amplitude_vh = parse_double(v, k.c_str());
        else if (k == "speckle_sigma")
            sc.speckle_sigma = parse_double(v, k.c_str());
        else if (k == "dual_pol")
            sc.dual_pol = parse_int(v, k.c_str()) != 0;
        else if (k == "flood_polygon") {
            auto coords = split_csv_line(v);
            if (coords.size() < 6 || coords.size() % 2 != 0)
                throw ConfigError("flood_polygon needs at least 3 x,y pairs");
            std::vector<std::pair<double, double>> ring;
            for (size_t i = 0; i < coords.size(); i += 2)
                ring.emplace_back(parse_double(coords[i], "x"), parse_double(coords[i + 1], "y"));
            sc.flood_polygons.push_back(std::move(ring));
        } else if (k == "aux_slope_deg")
            sc.aux_slope_deg = parse_double(v, k.c_str());
        else if (k == "aux_land_cover")
            sc.aux_land_cover = int(parse_int(v, k.c_str()));
        else if (k == "aux_soil_moisture")
            sc.aux_soil_moisture = parse_double(v, k.c_str());
        else if (k == "aux_temperature_k")
            sc.aux_temperature_k = parse_double(v, k.c_str());
        else if (k == "aux_elevation_m")
            sc.aux_elevation_m = parse_double(v, k.c_str());
        else
            throw ConfigError("unknown scenario key '" + k + "'");
    }
    sc.validate();
    return sc;
}

void write_synth_scenario(const SynthScenario& sc, const std::string& path) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"seed", std::to_string(sc.seed)},
        {"width", std::to_string(sc.width)},
        {"height", std::to_string(sc.height)},
        {"x_origin", format_double(sc.grid.x_origin)},
        {"y_origin", format_double(sc.grid.y_origin)},
        {"pixel_width", format_double(sc.grid.pixel_width)},
        {"pixel_height", format_double(sc.grid.pixel_height)},
        {"crs_code", std::to_string(sc.grid.crs_code)},
        {"land_amplitude_vv", format_double(sc.land_amplitude_vv)},
        {"land_amplitude_vh", format_double(sc.land_amplitude_vh)},
        {"water_amplitude_vv", format_double(sc.water_amplitude_vv)},
        {"water_amplitude_vh", format_double(sc.water_amplitude_vh)},
        {"speckle_sigma", format_double(sc.speckle_sigma)},
        {"dual_pol", sc.dual_pol ? "1" : "0"},
        {"aux_slope_deg", format_double(sc.aux_slope_deg)},
        {"aux_land_cover", std::to_string(sc.aux_land_cover)},
        {"aux_soil_moisture", format_double(sc.aux_soil_moisture)},
        {"aux_temperature_k", format_double(sc.aux_temperature_k)},
        {"aux_elevation_m", format_double(sc.aux_elevation_m)}};
    for (const auto& ring : sc.flood_polygons) {
        std::string coords;
        for (const auto& [x, y] : ring)
            coords += (coords.empty() ? "" : ",") + format_double(x) + "," + format_double(y);
        kv.emplace_back("flood_polygon", coords);
    }
    write_kv(path, kv);
}

namespace {

Raster rasterize_truth(const SynthScenario& sc) {
    Raster truth(sc.width, sc.height, sc.grid, DType::Byte);
    for (int64_t row = 0; row < sc.height; ++row) {
        for (int64_t col = 0; col < sc.width; ++col) {
            auto [x, y] = sc.grid.pixel_center(row, col);
            for (const auto& ring : sc.flood_polygons) {
                if (point_in_ring(x, y, ring)) {
                    truth.set(row, col, 1.0);
                    break;
                }
            }
        }
    }
    return truth;
}

Raster scene_raster(const SynthScenario& sc, const Raster& truth, bool flooded, double land_db,
                    double water_db, Rng& rng) {
    Raster r(sc.width, sc.height, sc.grid, DType::Float32);
    for (int64_t i = 0; i < r.size(); ++i) {
        double base = (flooded && truth.at_index(i) == 1.0) ? water_db : land_db;
        double noise = sc.speckle_sigma > 0 ? sc.speckle_sigma * rng.normal() : 0.0;
        r.set_index(i, double(float(base + noise)));
    }
    return r;
}

SceneMeta synth_meta(const std::string& id, Timestamp when, bool has_vh) {
    SceneMeta m;
    m.scene_id = id;
    m.acquisition_time = when;
    m.pass_direction = PassDirection::Ascending;
    m.relative_orbit = 100;
    m.has_vv = true;
    m.has_vh = has_vh;
    return m;
}

}  // namespace

GeneratedPair generate_pair(const SynthScenario& sc) {
    sc.validate();
    Raster truth = rasterize_truth(sc);
    GeneratedPair out{{}, truth};

    Rng pre_vv_rng(derive_seed(sc.seed, 0)), post_vv_rng(derive_seed(sc.seed, 1));
    out.pair.pre_meta = synth_meta("synth-pre", Timestamp::parse("2024-05-01T05:30:00Z"), sc.dual_pol);
    out.pair.post_meta = synth_meta("synth-post", Timestamp::parse("2024-05-13T05:30:00Z"), sc.dual_pol);
    out.pair.pre_vv = scene_raster(sc, truth, false, sc.land_amplitude_vv, sc.water_amplitude_vv, pre_vv_rng);
    out.pair.post_vv = scene_raster(sc, truth, true, sc.land_amplitude_vv, sc.water_amplitude_vv, post_vv_rng);
    if (sc.dual_pol) {
        Rng pre_vh_rng(derive_seed(sc.seed, 2)), post_vh_rng(derive_seed(sc.seed, 3));
        out.pair.pre_vh =
            scene_raster(sc, truth, false, sc.land_amplitude_vh, sc.water_amplitude_vh, pre_vh_rng);
        out.pair.post_vh =
            scene_raster(sc, truth, true, sc.land_amplitude_vh, sc.water_amplitude_vh, post_vh_rng);
    }
    return out;
}

AuxStack make_aux_stack(const SynthScenario& sc) {
    AuxStack aux;
    aux.slope = Raster(sc.width, sc.height, sc.grid, DType::Float32, std::nullopt, sc.aux_slope_deg);
    aux.land_cover =
        Raster(sc.width, sc.height, sc.grid, DType::Byte, std::nullopt, double(sc.aux_land_cover));
    aux.soil_moisture =
        Raster(sc.width, sc.height, sc.grid, DType::Float32, std::nullopt, sc.aux_soil_moisture);
    aux.temperature =
        Raster(sc.width, sc.height, sc.grid, DType::Float32, std::nullopt, sc.aux_temperature_k);
    aux.elevation =
        Raster(sc.width, sc.height, sc.grid, DType::Float32, std::nullopt, sc.aux_elevation_m);
    return aux;
}

int planted_pixels(const DecadeModel& m, int month_index, double noise) {
    int total = (m.start.month - 1) + month_index;
    YearMonth ym{m.start.year + total / 12, total % 12 + 1};
    double t_centered = double(month_index) - double(m.n_months - 1) / 2.0;
    double v = double(m.base_area_px) * (1.0 + m.trend_pct_per_year / 100.0 / 12.0 * t_centered);
    v *= 1.0 + m.seasonal_amplitude *
                   std::sin(2.0 * 3.14159265358979323846 * double(ym.month - 1) / 12.0);
    if (m.outlier_year != 0 && ym.year == m.outlier_year) v *= m.outlier_factor;
    // The month's detection pair is single-pol when its pre scene (day 1)
    // predates the cutoff.
    Date pre_date{ym.year, ym.month, 1};
    if (m.single_pol_before && pre_date < *m.single_pol_before) v *= m.single_pol_detection_ratio;
    v *= 1.0 + noise;
    return std::max(0, int(std::llround(v)));
}

DecadeArchive generate_decade(const SynthScenario& sc, const DecadeModel& model,
                              const std::string& out_dir) {
    sc.validate();
    if (model.n_months < 1) throw ConfigError("decade model needs at least one month");
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "scenes");

    const int64_t margin = 2;
    const int64_t usable_w = sc.width - 2 * margin;
    const int64_t usable_h = sc.height - 2 * margin;
    if (usable_w < 1 || usable_h < 1)
        throw ConfigError("scenario grid too small for the planted-flood margin");

    DecadeArchive archive;
    std::vector<SceneMeta> metas;

    for (int mi = 0; mi < model.n_months; ++mi) {
        int total = (model.start.month - 1) + mi;
        YearMonth ym{model.start.year + total / 12, total % 12 + 1};
        double noise =
            model.area_noise_frac > 0.0
                ? model.area_noise_frac * Rng(derive_seed(sc.seed, 1000 + uint64_t(mi))).normal()
                : 0.0;
        int planted = planted_pixels(model, mi, noise);
        if (planted > usable_w * usable_h)
            throw ConfigError("planted area " + std::to_string(planted) +
                              " px exceeds the grid capacity " + std::to_string(usable_w * usable_h));

        // Pixel-aligned rectangles: `rows` full lines of usable_w plus a partial
        // line, which rasterize to exactly `planted` positive pixels.
        SynthScenario month_sc = sc;
        month_sc.seed = derive_seed(sc.seed, uint64_t(mi));
        month_sc.flood_polygons.clear();
        int64_t rows = planted / usable_w;
        int64_t rem = planted % usable_w;
        auto rect_ring = [&](int64_t r0, int64_t c0, int64_t r1,
                             int64_t c1) -> std::vector<std::pair<double, double>> {
            const GeoTransform& g = sc.grid;
            double xl = g.x_origin + double(c0) * g.pixel_width;
            double xr = g.x_origin + double(c1) * g.pixel_width;
            double yt = g.y_origin - double(r0) * g.pixel_height;
            double yb = g.y_origin - double(r1) * g.pixel_height;
            return {{xl, yt}, {xr, yt}, {xr, yb}, {xl, yb}};
        };
        if (rows > 0)
            month_sc.flood_polygons.push_back(rect_ring(margin, margin, margin + rows, margin + usable_w));
        if (rem > 0)
            month_sc.flood_polygons.push_back(
                rect_ring(margin + rows, margin, margin + rows + 1, margin + rem));

        Date pre_date{ym.year, ym.month, 1};
        Date post_date{ym.year, ym.month, 13};
        bool pre_vh = !model.single_pol_before || !(pre_date < *model.single_pol_before);
        bool post_vh = !model.single_pol_before || !(post_date < *model.single_pol_before);
        month_sc.dual_pol = sc.dual_pol;

        GeneratedPair gp = generate_pair(month_sc);
        std::string tag = ym.to_string();
        auto scene_path = [&](const std::string& name) { return "scenes/" + tag + "-" + name + ".flr"; };

        ManifestEntry pre_e, post_e;
        pre_e.meta = synth_meta("synth-" + tag + "-pre",
                                Timestamp{pre_date.to_days() * 86400 + 5 * 3600 + 1800},
                                sc.dual_pol && pre_vh);
        post_e.meta = synth_meta("synth-" + tag + "-post",
                                 Timestamp{post_date.to_days() * 86400 + 5 * 3600 + 1800},
                                 sc.dual_pol && post_vh);
        pre_e.vv_path = scene_path("pre-vv");
        post_e.vv_path = scene_path("post-vv");
        write_raster(gp.pair.pre_vv, (fs::path(out_dir) / pre_e.vv_path).string());
        write_raster(gp.pair.post_vv, (fs::path(out_dir) / post_e.vv_path).string());
        if (pre_e.meta.has_vh) {
            pre_e.vh_path = scene_path("pre-vh");
            write_raster(*gp.pair.pre_vh, (fs::path(out_dir) / pre_e.vh_path).string());
        }
        if (post_e.meta.has_vh) {
            post_e.vh_path = scene_path("post-vh");
            write_raster(*gp.pair.post_vh, (fs::path(out_dir) / post_e.vh_path).string());
        }
        metas.push_back(pre_e.meta);
        metas.push_back(post_e.meta);
        archive.manifest.push_back(std::move(pre_e));
        archive.manifest.push_back(std::move(post_e));
        archive.months.push_back({ym, planted, !(pre_vh && post_vh) && sc.dual_pol});
    }

    // One observation per admissible consecutive pair, dated by the post
    // scene; single-pol when either side lacks VH.
    for (auto [pre_i, post_i] : pair_scenes(metas)) {
        ObservationEvent o;
        o.date = metas[post_i].acquisition_time.date();
        o.single_pol = !(metas[pre_i].has_vh && metas[post_i].has_vh);
        archive.observations.push_back(o);
    }

    write_scene_manifest((fs::path(out_dir) / "manifest.csv").string(), archive.manifest);
    write_observations_csv((fs::path(out_dir) / "observations.csv").string(), archive.observations);
    write_planted_csv((fs::path(out_dir) / "planted.csv").string(), archive.months);
    return archive;
}

void write_planted_csv(const std::string& path, const std::vector<DecadeMonth>& months) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(months.size());
    for (const auto& m : months)
        rows.push_back({std::to_string(m.month.year), std::to_string(m.month.month),
                        std::to_string(m.planted_px), m.single_pol ? "1" : "0"});
    write_csv(path, {"year", "month", "planted_px", "single_pol"}, rows);
}

std::vector<DecadeMonth> read_planted_csv(const std::string& path) {
    CsvTable t = read_csv(path, {"year", "month", "planted_px", "single_pol"});
    std::vector<DecadeMonth> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        DecadeMonth m;
        m.month = {int(parse_int(row[0], "year")), int(parse_int(row[1], "month"))};
        m.planted_px = int(parse_int(row[2], "planted_px"));
        m.single_pol = parse_int(row[3], "single_pol") == 1;
        out.push_back(m);
    }
    return out;
}

}  // namespace floodsar
