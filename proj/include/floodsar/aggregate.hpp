#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floodsar/dates.hpp"
#include "floodsar/postproc.hpp"
#include "floodsar/scene.hpp"

namespace floodsar {

// One flood-candidate pixel with its auxiliary context. Both retained and
// filtered candidates are recorded; `filtered` is true exactly when
// removal_reason is nonzero.
struct DetectionRecord {
    double lon = 0.0;
    double lat = 0.0;
    Date date;
    std::string scene_id;
    double delta_vv = 0.0;
    std::optional<double> delta_vh;  // absent for single-polarization scenes
    double soil_moisture = 0.0;
    double elevation = 0.0;
    double slope = 0.0;
    double temperature = 0.0;
    int land_cover = 0;
    bool filtered = false;
    uint8_t removal_reason = 0;
};

// One record per candidate pixel (retained or removed). Coordinates are pixel
// centers; the detection grid must be in geographic coordinates (EPSG:4326)
// so the centers are lon/lat. Needs all five auxiliary planes.
std::vector<DetectionRecord> emit_records(const FloodCandidateMask& filtered,
                                          const Raster& removal_reason, const FeatureStack& features,
                                          const AuxStack& aux, const SceneMeta& meta);

extern const std::vector<std::string> kDetectionsHeader;
void write_detections_csv(const std::string& path, const std::vector<DetectionRecord>& records);
std::vector<DetectionRecord> read_detections_csv(const std::string& path);

// Binary has-flooded-here extent over a period, at a stated resolution.
struct CompositeMap {
    Raster extent;  // byte {0,1}
    Date period_start;
    Date period_end;
    int buffer_radius_px = 0;
    std::optional<Raster> observation_count;  // int16, scenes covering each pixel
};

struct DatedMask {
    const Raster* mask = nullptr;
    Date date;
};

// OR-accumulation of buffered unfiltered detections onto the target grid.
// Inputs outside the target extent are clipped. Order-independent.
CompositeMap compose_records(const std::vector<DetectionRecord>& records, Date start, Date end,
                             const GeoTransform& target, int64_t width, int64_t height,
                             int buffer_radius_px);
CompositeMap compose_masks(const std::vector<DatedMask>& masks, Date start, Date end,
                           const GeoTransform& target, int64_t width, int64_t height,
                           int buffer_radius_px);

// Any-touch aggregation: a coarse cell is positive iff at least one positive
// fine pixel center falls inside it. coarse_pixel is in CRS units and must
// exceed the fine pixel size. min_fraction > 0 switches to a coverage
// threshold on the fraction of fine centers in the cell.
CompositeMap coarsen(const CompositeMap& fine, double coarse_pixel = 250.0, double min_fraction = 0.0);

// Polygon zone as a single lon/lat (grid CRS) ring; containment is even-odd
// on pixel centers.
struct Zone {
    std::string id;
    std::vector<std::pair<double, double>> ring;
};

// Zones file: one per line, `zone_id;x1,y1,x2,y2,...`.
std::vector<Zone> read_zones(const std::string& path);

struct ImpactRow {
    std::string zone_id;
    int class_code = 0;
    int64_t class_px = 0;
    int64_t flooded_px = 0;
    double fraction = 0.0;                // flooded_px / class_px, 0 when class absent
    std::optional<double> hectares;       // flooded_px * pixel area; absent on degree grids
};

// Land-cover exposure of the flood extent, per zone (whole grid when no zones
// are given). The class code must be a known WorldCover code.
std::vector<ImpactRow> overlay_impact(const CompositeMap& extent, const Raster& land_cover,
                                      int class_code, const std::vector<Zone>& zones = {});

extern const std::vector<std::string> kImpactHeader;
void write_impact_csv(const std::string& path, const std::vector<ImpactRow>& rows);

}  // namespace floodsar
