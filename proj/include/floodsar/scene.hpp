#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floodsar/dates.hpp"
#include "floodsar/raster.hpp"

namespace floodsar {

enum class PassDirection { Ascending, Descending };
enum class Polarization { VV, VH };

PassDirection parse_pass_direction(std::string_view s);
const char* pass_direction_name(PassDirection d);

// Water backscatter thresholds, dB. A pixel is in the water range strictly
// below the band's threshold.
inline constexpr double kWaterThresholdVvDb = -17.5;
inline constexpr double kWaterThresholdVhDb = -22.5;

bool is_water_db(double amplitude_db, Polarization pol);

// Scene pairing window: strictly positive gap, at most 30 days.
inline constexpr int64_t kMaxPairGapSeconds = 30ll * 86400;

struct SceneMeta {
    std::string scene_id;
    Timestamp acquisition_time;
    PassDirection pass_direction = PassDirection::Ascending;
    int relative_orbit = 0;
    bool has_vv = true;
    bool has_vh = true;
};

// Why a candidate pre/post pairing was rejected.
enum class PairRule { None, PassDirection, RelativeOrbit, TemporalOrder, TemporalWindow };

struct PairVerdict {
    bool ok = false;
    PairRule violated = PairRule::None;
    std::string detail;
};

PairVerdict validate_pair(const SceneMeta& pre, const SceneMeta& post);

// Co-registered pre/post dual-pol dB rasters. VH is optional: single-pol
// scenes flow through with the VH feature planes marked nodata.
struct ScenePair {
    SceneMeta pre_meta;
    SceneMeta post_meta;
    Raster pre_vv;
    Raster post_vv;
    std::optional<Raster> pre_vh;
    std::optional<Raster> post_vh;

    bool dual_pol() const { return pre_vh.has_value() && post_vh.has_value(); }
    // Throws unless the pairing rules and grid congruence hold.
    void validate() const;
};

// The four model inputs: binary change-to-water indicators and delta
// amplitudes, one pair per polarization.
struct FeatureStack {
    Raster change_to_water_vv;  // byte, {0,1,nodata}
    Raster change_to_water_vh;
    Raster delta_vv;  // float32 dB, post - pre
    Raster delta_vh;

    const GeoTransform& transform() const { return change_to_water_vv.transform(); }
    int64_t width() const { return change_to_water_vv.width(); }
    int64_t height() const { return change_to_water_vv.height(); }
};

inline constexpr double kMaskNoData = 255.0;
inline constexpr double kFloatNoData = -9999.0;

FeatureStack compute_features(const ScenePair& p, int jobs = 1);

// --- Scene manifest --------------------------------------------------------
// CSV schema: scene_id,acquisition_time,pass_direction,relative_orbit,vv_path,vh_path
// vh_path empty for single-pol scenes. Raster paths are resolved relative to
// the manifest's directory.

struct ManifestEntry {
    SceneMeta meta;
    std::string vv_path;
    std::string vh_path;  // empty when absent
};

std::vector<ManifestEntry> read_scene_manifest(const std::string& path);
void write_scene_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

// Pair each scene with its nearest admissible predecessor (same geometry,
// 0 < gap <= 30 days). Returns (pre, post) index pairs ordered by post time.
std::vector<std::pair<size_t, size_t>> pair_scenes(const std::vector<SceneMeta>& scenes);

// Loads the rasters for one (pre, post) manifest pair and validates them.
ScenePair load_scene_pair(const ManifestEntry& pre, const ManifestEntry& post,
                          const std::string& base_dir);

}  // namespace floodsar
