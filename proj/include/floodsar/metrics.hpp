#pragma once

#include <vector>

#include "floodsar/raster.hpp"

namespace floodsar {

struct ConfusionCounts {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t fn = 0;
    int64_t tn = 0;

    int64_t total() const { return tp + fp + fn + tn; }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double iou = 0.0;
};

// Pixels are positive when exactly 1. Nodata pixels in either raster, and
// pixels where `ignore` is nonzero, are excluded from all counts.
ConfusionCounts count_confusion(const Raster& pred, const Raster& truth,
                                const Raster* ignore = nullptr);

// Degenerate-denominator conventions, chosen so results are deterministic:
//   precision with tp+fp = 0 -> 1 when the truth is also empty, else 0
//   recall    with tp+fn = 0 -> 1 when the prediction is also empty, else 0
//   f1 = 0 when precision + recall = 0; iou = 1 when tp+fp+fn = 0
Metrics metrics_from_counts(const ConfusionCounts& c);
Metrics compare_metrics(const Raster& pred, const Raster& truth, const Raster* ignore = nullptr);

// Flood-prone pixels of a surface-water occurrence layer (percent 0..100):
// strictly between zero and the threshold. Never-observed-water pixels (0%)
// are not flood-prone by default; include_never_water flips that reading.
Raster gsw_flood_prone(const Raster& occurrence, double threshold_pct = 50.0,
                       bool include_never_water = false);

struct OverlapStats {
    double detection_rate = 0.0;               // |ours & ref| / |ref|
    double detection_rate_outside_mask = 0.0;  // both sides restricted to exclusion == 0
};

// Share of the reference layer we also detect. Throws StatError when the
// (restricted) reference is empty. Without an exclusion mask both rates are
// equal.
OverlapStats overlap_stats(const Raster& ours, const Raster& reference,
                           const Raster* exclusion = nullptr);

// 100 * |ours \ union(refs)| / |union(refs)|. Throws StatError when the
// reference union is empty.
double new_area_pct(const Raster& ours, const std::vector<const Raster*>& refs);

}  // namespace floodsar
