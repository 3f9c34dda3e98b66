#include "floodsar/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floodsar/csv.hpp"

namespace floodsar {

namespace landcover {
bool known_code(int code) {
    switch (code) {
        case kTreeCover:
        case kShrubland:
        case kGrassland:
        case kCropland:
        case kBuiltUp:
        case kBareGround:
        case kSnowIce:
        case kPermanentWater:
        case kWetland:
        case kMangroves:
        case kMossLichen:
            return true;
        default:
            return false;
    }
}
}  // namespace landcover

const Raster& AuxStack::require(const std::optional<Raster>& plane, const char* name) const {
    if (!plane) throw ConfigError(std::string("auxiliary plane '") + name + "' is required but missing");
    return *plane;
}

std::vector<std::pair<std::string, std::string>> filter_config_entries(const FilterConfig& cfg) {
    std::string codes;
    for (int c : cfg.exclude_land_cover) codes += (codes.empty() ? "" : ",") + std::to_string(c);
    return {{"max_slope_deg", format_double(cfg.max_slope_deg)},
            {"min_soil_moisture", format_double(cfg.min_soil_moisture)},
            {"min_temperature_k", format_double(cfg.min_temperature_k)},
            {"exclude_land_cover", codes},
            {"slope_neighborhood_px", std::to_string(cfg.slope_neighborhood_px)}};
}

namespace {

double parse_finite(const std::string& value, const char* what) {
    double v = parse_double(value, what);
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite, got " + value);
    return v;
}

}  // namespace

void apply_filter_config_entry(FilterConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "max_slope_deg") {
        cfg.max_slope_deg = parse_finite(value, key.c_str());
    } else if (key == "min_soil_moisture") {
        cfg.min_soil_moisture = parse_finite(value, key.c_str());
    } else if (key == "min_temperature_k") {
        cfg.min_temperature_k = parse_finite(value, key.c_str());
    } else if (key == "exclude_land_cover") {
        cfg.exclude_land_cover.clear();
        std::istringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) cfg.exclude_land_cover.insert(int(parse_int(tok, key.c_str())));
    } else if (key == "slope_neighborhood_px") {
        cfg.slope_neighborhood_px = int(parse_int(value, key.c_str()));
        if (cfg.slope_neighborhood_px < 0) throw ConfigError("slope_neighborhood_px must be >= 0");
    } else {
        throw ConfigError("unknown filter config key '" + key + "'");
    }
}

FilterConfig parse_filter_config(const std::string& path) {
    FilterConfig cfg;
    for (const auto& [k, v] : read_kv(path)) apply_filter_config_entry(cfg, k, v);
    return cfg;
}

void write_filter_config(const FilterConfig& cfg, const std::string& path) {
    write_kv(path, filter_config_entries(cfg));
}

FilterResult filter_false_positives(const FloodCandidateMask& cand, const AuxStack& aux,
                                    const FilterConfig& cfg) {
    const Raster& slope = aux.require(aux.slope, "slope");
    const Raster& cover = aux.require(aux.land_cover, "land_cover");
    const Raster& moisture = aux.require(aux.soil_moisture, "soil_moisture");
    const Raster& temperature = aux.require(aux.temperature, "temperature");
    require_same_grid(cand.mask, slope, "filter: slope");
    require_same_grid(cand.mask, cover, "filter: land_cover");
    require_same_grid(cand.mask, moisture, "filter: soil_moisture");
    require_same_grid(cand.mask, temperature, "filter: temperature");

    FilterResult out{{cand.mask, cand.probability},
                     Raster(cand.mask.width(), cand.mask.height(), cand.mask.transform(), DType::Byte)};
    Raster& mask = out.filtered.mask;
    for (int64_t i = 0; i < mask.size(); ++i) {
        if (mask.at_index(i) != 1.0) continue;  // only candidates are filtered
        uint8_t reason = 0;
        double s = slope.at_index(i);
        if (!slope.is_nodata(s) && s > cfg.max_slope_deg) reason |= removal::kSteepTerrain;
        double lc = cover.at_index(i);
        if (!cover.is_nodata(lc) && cfg.exclude_land_cover.count(int(lc)))
            reason |= removal::kExcludedLandCover;
        double m = moisture.at_index(i);
        if (!moisture.is_nodata(m) && m < cfg.min_soil_moisture) reason |= removal::kLowSoilMoisture;
        double t = temperature.at_index(i);
        if (!temperature.is_nodata(t) && t < cfg.min_temperature_k) reason |= removal::kLowTemperature;
        if (reason) {
            mask.set_index(i, 0.0);
            out.removal_reason.set_index(i, double(reason));
        }
    }
    return out;
}

ExclusionMask build_exclusion_mask(const AuxStack& aux, const FilterConfig& cfg) {
    const Raster& slope = aux.require(aux.slope, "slope");
    const Raster& cover = aux.require(aux.land_cover, "land_cover");
    require_same_grid(slope, cover, "exclusion mask");

    Raster steep(slope.width(), slope.height(), slope.transform(), DType::Byte);
    for (int64_t i = 0; i < slope.size(); ++i) {
        double s = slope.at_index(i);
        steep.set_index(i, (!slope.is_nodata(s) && s > cfg.max_slope_deg) ? 1.0 : 0.0);
    }
    steep = buffer_mask(steep, cfg.slope_neighborhood_px);

    ExclusionMask out{Raster(slope.width(), slope.height(), slope.transform(), DType::Byte),
                      Raster(slope.width(), slope.height(), slope.transform(), DType::Byte)};
    for (int64_t i = 0; i < slope.size(); ++i) {
        uint8_t reason = 0;
        if (steep.at_index(i) == 1.0) reason |= exclusion::kSteepTerrain;
        double lc = cover.at_index(i);
        if (!cover.is_nodata(lc)) {
            if (int(lc) == landcover::kBareGround) reason |= exclusion::kBareGround;
            if (int(lc) == landcover::kBuiltUp) reason |= exclusion::kBuiltUp;
        }
        out.reason.set_index(i, double(reason));
        out.mask.set_index(i, reason ? 1.0 : 0.0);
    }
    return out;
}

Raster buffer_mask(const Raster& mask, int radius_px) {
    if (radius_px < 0) throw ConfigError("buffer radius must be >= 0");
    if (radius_px == 0) return mask;
    const int64_t w = mask.width(), h = mask.height();
    // Square element is separable: run max along rows, then along columns.
    Raster horiz(w, h, mask.transform(), DType::Byte);
    for (int64_t row = 0; row < h; ++row) {
        for (int64_t col = 0; col < w; ++col) {
            double on = 0.0;
            int64_t lo = std::max<int64_t>(0, col - radius_px);
            int64_t hi = std::min<int64_t>(w - 1, col + radius_px);
            for (int64_t c = lo; c <= hi; ++c) {
                if (mask.at(row, c) == 1.0) {
                    on = 1.0;
                    break;
                }
            }
            horiz.set(row, col, on);
        }
    }
    Raster out(w, h, mask.transform(), DType::Byte);
    for (int64_t col = 0; col < w; ++col) {
        for (int64_t row = 0; row < h; ++row) {
            double on = 0.0;
            int64_t lo = std::max<int64_t>(0, row - radius_px);
            int64_t hi = std::min<int64_t>(h - 1, row + radius_px);
            for (int64_t r = lo; r <= hi; ++r) {
                if (horiz.at(r, col) == 1.0) {
                    on = 1.0;
                    break;
                }
            }
            out.set(row, col, on);
        }
    }
    return out;
}

Raster majority_smooth(const Raster& mask, int window) {
    if (window < 1 || window % 2 == 0) throw ConfigError("majority window must be odd and >= 1");
    if (window == 1) return mask;
    const int64_t w = mask.width(), h = mask.height();
    const int r = (window - 1) / 2;
    // Summed-area tables of positive votes and of valid (non-nodata) voters.
    std::vector<int64_t> ones((w + 1) * (h + 1), 0), valid((w + 1) * (h + 1), 0);
    auto idx = [w](int64_t row, int64_t col) { return row * (w + 1) + col; };
    for (int64_t row = 0; row < h; ++row) {
        for (int64_t col = 0; col < w; ++col) {
            double v = mask.at(row, col);
            int64_t one = v == 1.0 ? 1 : 0;
            int64_t ok = mask.is_nodata(v) ? 0 : 1;
            ones[idx(row + 1, col + 1)] =
                one + ones[idx(row, col + 1)] + ones[idx(row + 1, col)] - ones[idx(row, col)];
            valid[idx(row + 1, col + 1)] =
                ok + valid[idx(row, col + 1)] + valid[idx(row + 1, col)] - valid[idx(row, col)];
        }
    }
    auto box = [&](const std::vector<int64_t>& t, int64_t r0, int64_t c0, int64_t r1, int64_t c1) {
        return t[idx(r1 + 1, c1 + 1)] - t[idx(r0, c1 + 1)] - t[idx(r1 + 1, c0)] + t[idx(r0, c0)];
    };
    Raster out = mask;
    for (int64_t row = 0; row < h; ++row) {
        for (int64_t col = 0; col < w; ++col) {
            double v = mask.at(row, col);
            if (mask.is_nodata(v)) continue;
            int64_t r0 = std::max<int64_t>(0, row - r), r1 = std::min<int64_t>(h - 1, row + r);
            int64_t c0 = std::max<int64_t>(0, col - r), c1 = std::min<int64_t>(w - 1, col + r);
            int64_t n = box(valid, r0, c0, r1, c1);
            int64_t k = box(ones, r0, c0, r1, c1);
            if (2 * k > n)
                out.set(row, col, 1.0);
            else if (2 * k < n)
                out.set(row, col, 0.0);
            // tie keeps the original value
        }
    }
    return out;
}

}  // namespace floodsar
