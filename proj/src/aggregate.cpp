#include "floodsar/aggregate.hpp"

#include <cmath>

#include "floodsar/csv.hpp"

namespace floodsar {

std::vector<DetectionRecord> emit_records(const FloodCandidateMask& filtered,
                                          const Raster& removal_reason, const FeatureStack& features,
                                          const AuxStack& aux, const SceneMeta& meta) {
    const Raster& mask = filtered.mask;
    require_same_grid(mask, removal_reason, "emit_records: removal_reason");
    require_same_grid(mask, features.change_to_water_vv, "emit_records: features");
    const Raster& slope = aux.require(aux.slope, "slope");
    const Raster& cover = aux.require(aux.land_cover, "land_cover");
    const Raster& moisture = aux.require(aux.soil_moisture, "soil_moisture");
    const Raster& temperature = aux.require(aux.temperature, "temperature");
    const Raster& elevation = aux.require(aux.elevation, "elevation");
    for (const Raster* r : {&slope, &cover, &moisture, &temperature, &elevation})
        require_same_grid(mask, *r, "emit_records: aux");
    if (!crs_is_geographic(mask.transform().crs_code))
        throw Error("emit_records: detection grid must be geographic (EPSG:4326) so pixel centers "
                    "are lon/lat; got EPSG:" + std::to_string(mask.transform().crs_code));

    std::vector<DetectionRecord> out;
    Date date = meta.acquisition_time.date();
    for (int64_t row = 0; row < mask.height(); ++row) {
        for (int64_t col = 0; col < mask.width(); ++col) {
            double m = mask.at(row, col);
            double reason = removal_reason.at(row, col);
            bool retained = m == 1.0;
            bool removed = reason != 0.0;
            if (!retained && !removed) continue;
            DetectionRecord r;
            auto [x, y] = mask.transform().pixel_center(row, col);
            r.lon = x;
            r.lat = y;
            if (r.lat < -90.0 || r.lat > 90.0 || r.lon < -180.0 || r.lon > 180.0)
                throw Error("emit_records: pixel center outside lon/lat bounds");
            r.date = date;
            r.scene_id = meta.scene_id;
            r.delta_vv = features.delta_vv.at(row, col);
            double dvh = features.delta_vh.at(row, col);
            if (!features.delta_vh.is_nodata(dvh)) r.delta_vh = dvh;
            r.soil_moisture = moisture.at(row, col);
            r.elevation = elevation.at(row, col);
            r.slope = slope.at(row, col);
            r.temperature = temperature.at(row, col);
            r.land_cover = int(cover.at(row, col));
            r.filtered = removed;
            r.removal_reason = uint8_t(reason);
            out.push_back(std::move(r));
        }
    }
    return out;
}

const std::vector<std::string> kDetectionsHeader = {
    "lon",       "lat",           "date",      "scene_id", "delta_vv",   "delta_vh", "soil_moisture",
    "elevation", "slope", "temperature", "land_cover", "filtered", "removal_reason"};

void write_detections_csv(const std::string& path, const std::vector<DetectionRecord>& records) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        rows.push_back({format_double(r.lon), format_double(r.lat), r.date.to_string(), r.scene_id,
                        format_double(r.delta_vv), r.delta_vh ? format_double(*r.delta_vh) : "",
                        format_double(r.soil_moisture), format_double(r.elevation),
                        format_double(r.slope), format_double(r.temperature),
                        std::to_string(r.land_cover), r.filtered ? "true" : "false",
                        std::to_string(int(r.removal_reason))});
    }
    write_csv(path, kDetectionsHeader, rows);
}

std::vector<DetectionRecord> read_detections_csv(const std::string& path) {
    CsvTable t = read_csv(path, kDetectionsHeader);
    std::vector<DetectionRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        DetectionRecord r;
        r.lon = parse_double(row[0], "lon");
        r.lat = parse_double(row[1], "lat");
        r.date = Date::parse(row[2]);
        r.scene_id = row[3];
        r.delta_vv = parse_double(row[4], "delta_vv");
        if (!row[5].empty()) r.delta_vh = parse_double(row[5], "delta_vh");
        r.soil_moisture = parse_double(row[6], "soil_moisture");
        r.elevation = parse_double(row[7], "elevation");
        r.slope = parse_double(row[8], "slope");
        r.temperature = parse_double(row[9], "temperature");
        r.land_cover = int(parse_int(row[10], "land_cover"));
        if (row[11] == "true")
            r.filtered = true;
        else if (row[11] == "false")
            r.filtered = false;
        else
            throw FormatError(path + ": filtered must be true or false, got '" + row[11] + "'");
        r.removal_reason = uint8_t(parse_int(row[12], "removal_reason"));
        if (r.filtered != (r.removal_reason != 0))
            throw FormatError(path + ": filtered flag inconsistent with removal_reason");
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

CompositeMap finish_composite(Raster accum, Date start, Date end, int buffer_radius_px,
                              std::optional<Raster> observation_count) {
    // Dilation distributes over union, so buffering the OR once equals
    // buffering each contribution before accumulation.
    if (buffer_radius_px > 0) accum = buffer_mask(accum, buffer_radius_px);
    CompositeMap c{std::move(accum), start, end, buffer_radius_px, std::move(observation_count)};
    return c;
}

}  // namespace

CompositeMap compose_records(const std::vector<DetectionRecord>& records, Date start, Date end,
                             const GeoTransform& target, int64_t width, int64_t height,
                             int buffer_radius_px) {
    Raster accum(width, height, target, DType::Byte);
    for (const auto& r : records) {
        if (r.filtered) continue;
        if (r.date < start || end < r.date) continue;
        auto [row, col] = target.world_to_pixel(r.lon, r.lat);
        if (row >= 0 && row < height && col >= 0 && col < width) accum.set(row, col, 1.0);
    }
    return finish_composite(std::move(accum), start, end, buffer_radius_px, std::nullopt);
}

CompositeMap compose_masks(const std::vector<DatedMask>& masks, Date start, Date end,
                           const GeoTransform& target, int64_t width, int64_t height,
                           int buffer_radius_px) {
    Raster accum(width, height, target, DType::Byte);
    Raster count(width, height, target, DType::Int16);
    for (const auto& dm : masks) {
        if (!dm.mask) throw Error("compose_masks: null mask");
        if (dm.date < start || end < dm.date) continue;
        const Raster& m = *dm.mask;
        if (m.transform().crs_code != target.crs_code)
            throw GridMismatchError("compose_masks: CRS mismatch");
        for (int64_t row = 0; row < m.height(); ++row) {
            for (int64_t col = 0; col < m.width(); ++col) {
                double v = m.at(row, col);
                if (m.is_nodata(v)) continue;
                auto [x, y] = m.transform().pixel_center(row, col);
                auto [trow, tcol] = target.world_to_pixel(x, y);
                if (trow < 0 || trow >= height || tcol < 0 || tcol >= width) continue;
                count.set(trow, tcol, count.at(trow, tcol) + 1.0);
                if (v == 1.0) accum.set(trow, tcol, 1.0);
            }
        }
    }
    return finish_composite(std::move(accum), start, end, buffer_radius_px, std::move(count));
}

CompositeMap coarsen(const CompositeMap& fine, double coarse_pixel, double min_fraction) {
    const Raster& f = fine.extent;
    const GeoTransform& ft = f.transform();
    if (!(coarse_pixel > ft.pixel_width && coarse_pixel > ft.pixel_height))
        throw ConfigError("coarsen: coarse pixel must exceed the fine pixel size");
    GeoTransform ct = ft;
    ct.pixel_width = coarse_pixel;
    ct.pixel_height = coarse_pixel;
    auto cw = int64_t(std::ceil(double(f.width()) * ft.pixel_width / coarse_pixel));
    auto ch = int64_t(std::ceil(double(f.height()) * ft.pixel_height / coarse_pixel));
    Raster positives(cw, ch, ct, DType::Float32);
    Raster centers(cw, ch, ct, DType::Float32);
    for (int64_t row = 0; row < f.height(); ++row) {
        for (int64_t col = 0; col < f.width(); ++col) {
            auto [x, y] = ft.pixel_center(row, col);
            auto [crow, ccol] = ct.world_to_pixel(x, y);
            if (crow < 0 || crow >= ch || ccol < 0 || ccol >= cw) continue;
            centers.set(crow, ccol, centers.at(crow, ccol) + 1.0);
            if (f.at(row, col) == 1.0) positives.set(crow, ccol, positives.at(crow, ccol) + 1.0);
        }
    }
    Raster out(cw, ch, ct, DType::Byte);
    for (int64_t i = 0; i < out.size(); ++i) {
        double pos = positives.at_index(i);
        bool on = min_fraction > 0.0
                      ? (centers.at_index(i) > 0.0 && pos / centers.at_index(i) >= min_fraction)
                      : pos > 0.0;
        out.set_index(i, on ? 1.0 : 0.0);
    }
    return {std::move(out), fine.period_start, fine.period_end, fine.buffer_radius_px, std::nullopt};
}

std::vector<Zone> read_zones(const std::string& path) {
    std::vector<Zone> zones;
    std::string text = read_file_bytes(path);
    size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t semi = line.find(';');
        if (semi == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'zone_id;x1,y1,x2,y2,...'");
        Zone z;
        z.id = line.substr(0, semi);
        auto coords = split_csv_line(line.substr(semi + 1));
        if (coords.size() < 6 || coords.size() % 2 != 0)
            throw FormatError(path + ":" + std::to_string(lineno) + ": ring needs at least 3 x,y pairs");
        for (size_t i = 0; i < coords.size(); i += 2)
            z.ring.emplace_back(parse_double(coords[i], "x"), parse_double(coords[i + 1], "y"));
        zones.push_back(std::move(z));
    }
    return zones;
}

std::vector<ImpactRow> overlay_impact(const CompositeMap& extent, const Raster& land_cover,
                                      int class_code, const std::vector<Zone>& zones) {
    const Raster& ext = extent.extent;
    require_same_grid(ext, land_cover, "overlay_impact");
    if (!landcover::known_code(class_code))
        throw Error("overlay_impact: unknown land-cover class code " + std::to_string(class_code));

    std::optional<double> px_area;
    if (!crs_is_geographic(ext.transform().crs_code)) px_area = pixel_area_hectares(ext.transform());

    struct Acc {
        int64_t class_px = 0;
        int64_t flooded_px = 0;
    };
    std::vector<Acc> acc(zones.empty() ? 1 : zones.size());
    for (int64_t row = 0; row < ext.height(); ++row) {
        for (int64_t col = 0; col < ext.width(); ++col) {
            double lc = land_cover.at(row, col);
            if (land_cover.is_nodata(lc) || int(lc) != class_code) continue;
            bool flooded = ext.at(row, col) == 1.0;
            if (zones.empty()) {
                ++acc[0].class_px;
                if (flooded) ++acc[0].flooded_px;
            } else {
                auto [x, y] = ext.transform().pixel_center(row, col);
                for (size_t zi = 0; zi < zones.size(); ++zi) {
                    if (!point_in_ring(x, y, zones[zi].ring)) continue;
                    ++acc[zi].class_px;
                    if (flooded) ++acc[zi].flooded_px;
                }
            }
        }
    }
    std::vector<ImpactRow> rows;
    for (size_t zi = 0; zi < acc.size(); ++zi) {
        ImpactRow r;
        r.zone_id = zones.empty() ? "all" : zones[zi].id;
        r.class_code = class_code;
        r.class_px = acc[zi].class_px;
        r.flooded_px = acc[zi].flooded_px;
        r.fraction = acc[zi].class_px ? double(acc[zi].flooded_px) / double(acc[zi].class_px) : 0.0;
        if (px_area) r.hectares = double(acc[zi].flooded_px) * *px_area;
        rows.push_back(std::move(r));
    }
    return rows;
}

const std::vector<std::string> kImpactHeader = {"zone_id", "class",    "class_px",
                                                "flooded_px", "fraction", "hectares"};

void write_impact_csv(const std::string& path, const std::vector<ImpactRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back({r.zone_id, std::to_string(r.class_code), std::to_string(r.class_px),
                       std::to_string(r.flooded_px), format_double(r.fraction),
                       r.hectares ? format_double(*r.hectares) : ""});
    write_csv(path, kImpactHeader, out);
}

}  // namespace floodsar
