#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "floodsar/classifier.hpp"
#include "floodsar/raster.hpp"

namespace floodsar {

// ESA WorldCover class codes used by the filters and overlays.
namespace landcover {
inline constexpr int kTreeCover = 10;
inline constexpr int kShrubland = 20;
inline constexpr int kGrassland = 30;
inline constexpr int kCropland = 40;
inline constexpr int kBuiltUp = 50;
inline constexpr int kBareGround = 60;
inline constexpr int kSnowIce = 70;
inline constexpr int kPermanentWater = 80;
inline constexpr int kWetland = 90;
inline constexpr int kMangroves = 95;
inline constexpr int kMossLichen = 100;

bool known_code(int code);
}  // namespace landcover

// Auxiliary planes co-registered with the detection grid. Planes are optional
// so partial stacks can serve operations that need fewer of them; operations
// name the plane they miss.
struct AuxStack {
    std::optional<Raster> slope;          // degrees
    std::optional<Raster> land_cover;     // WorldCover class codes
    std::optional<Raster> soil_moisture;  // m3/m3
    std::optional<Raster> temperature;    // kelvin
    std::optional<Raster> elevation;      // meters

    const Raster& require(const std::optional<Raster>& plane, const char* name) const;
};

struct FilterConfig {
    double max_slope_deg = 10.0;
    double min_soil_moisture = 0.10;   // m3/m3
    double min_temperature_k = 275.15;  // 2 C, freeze/thaw guard
    std::set<int> exclude_land_cover = {landcover::kBareGround, landcover::kPermanentWater};
    int slope_neighborhood_px = 2;
};

// Flat key=value serialization (all fields always present, so reports are
// never silently threshold-dependent).
FilterConfig parse_filter_config(const std::string& path);
void write_filter_config(const FilterConfig& cfg, const std::string& path);
std::vector<std::pair<std::string, std::string>> filter_config_entries(const FilterConfig& cfg);
void apply_filter_config_entry(FilterConfig& cfg, const std::string& key, const std::string& value);

// Bit flags stored in the removal_reason raster / record column.
namespace removal {
inline constexpr uint8_t kSteepTerrain = 1;
inline constexpr uint8_t kExcludedLandCover = 2;
inline constexpr uint8_t kLowSoilMoisture = 4;
inline constexpr uint8_t kLowTemperature = 8;
}  // namespace removal

// Bit flags in the exclusion-mask reason raster.
namespace exclusion {
inline constexpr uint8_t kSteepTerrain = 1;
inline constexpr uint8_t kBareGround = 2;
inline constexpr uint8_t kBuiltUp = 4;
}  // namespace exclusion

struct FilterResult {
    FloodCandidateMask filtered;
    Raster removal_reason;  // byte bit-flags, nonzero exactly on removed candidates
};

// Removes false-positive candidates: steep slope, excluded land-cover class,
// dry soil, or freezing surface. Needs slope, land_cover, soil_moisture and
// temperature planes. Non-candidate pixels are untouched.
FilterResult filter_false_positives(const FloodCandidateMask& cand, const AuxStack& aux,
                                    const FilterConfig& cfg);

struct ExclusionMask {
    Raster mask;    // byte {0,1}: 1 = unreliable detection zone
    Raster reason;  // byte bit-flags
};

// Static unreliable-detection zones: steep terrain (dilated by the configured
// neighborhood), bare ground, and built-up areas. Independent of detections.
ExclusionMask build_exclusion_mask(const AuxStack& aux, const FilterConfig& cfg);

// Morphological dilation with a square (Chebyshev) structuring element of the
// given radius; radius 0 is the identity. Nodata counts as background and the
// output is plain {0,1}.
Raster buffer_mask(const Raster& mask, int radius_px);

// Majority vote over an odd window clipped to the raster; ties keep the
// original value. Nodata pixels stay nodata and do not vote.
Raster majority_smooth(const Raster& mask, int window);

}  // namespace floodsar
