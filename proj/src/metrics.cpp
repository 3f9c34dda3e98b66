#include "floodsar/metrics.hpp"

namespace floodsar {

ConfusionCounts count_confusion(const Raster& pred, const Raster& truth, const Raster* ignore) {
    require_same_grid(pred, truth, "count_confusion");
    if (ignore) require_same_grid(pred, *ignore, "count_confusion ignore mask");
    ConfusionCounts c;
    for (int64_t i = 0; i < pred.size(); ++i) {
        double p = pred.at_index(i);
        double t = truth.at_index(i);
        if (pred.is_nodata(p) || truth.is_nodata(t)) continue;
        if (ignore) {
            double g = ignore->at_index(i);
            if (!ignore->is_nodata(g) && g != 0.0) continue;
        }
        bool pp = p == 1.0;
        bool tp = t == 1.0;
        if (pp && tp)
            ++c.tp;
        else if (pp)
            ++c.fp;
        else if (tp)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

Metrics metrics_from_counts(const ConfusionCounts& c) {
    Metrics m;
    bool truth_empty = c.tp + c.fn == 0;
    bool pred_empty = c.tp + c.fp == 0;
    m.precision = pred_empty ? (truth_empty ? 1.0 : 0.0) : double(c.tp) / double(c.tp + c.fp);
    m.recall = truth_empty ? (pred_empty ? 1.0 : 0.0) : double(c.tp) / double(c.tp + c.fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.iou = (c.tp + c.fp + c.fn) == 0 ? 1.0 : double(c.tp) / double(c.tp + c.fp + c.fn);
    return m;
}

Metrics compare_metrics(const Raster& pred, const Raster& truth, const Raster* ignore) {
    return metrics_from_counts(count_confusion(pred, truth, ignore));
}

Raster gsw_flood_prone(const Raster& occurrence, double threshold_pct, bool include_never_water) {
    Raster out(occurrence.width(), occurrence.height(), occurrence.transform(), DType::Byte, 255.0);
    for (int64_t i = 0; i < occurrence.size(); ++i) {
        double v = occurrence.at_index(i);
        if (occurrence.is_nodata(v)) {
            out.set_index(i, 255.0);
            continue;
        }
        bool prone = v < threshold_pct && (include_never_water || v > 0.0);
        out.set_index(i, prone ? 1.0 : 0.0);
    }
    return out;
}

namespace {

bool masked_out(const Raster* exclusion, int64_t i) {
    if (!exclusion) return false;
    double v = exclusion->at_index(i);
    return !exclusion->is_nodata(v) && v != 0.0;
}

}  // namespace

OverlapStats overlap_stats(const Raster& ours, const Raster& reference, const Raster* exclusion) {
    require_same_grid(ours, reference, "overlap_stats");
    if (exclusion) require_same_grid(ours, *exclusion, "overlap_stats exclusion");
    int64_t ref_all = 0, hit_all = 0, ref_out = 0, hit_out = 0;
    for (int64_t i = 0; i < ours.size(); ++i) {
        double o = ours.at_index(i);
        double r = reference.at_index(i);
        if (ours.is_nodata(o) || reference.is_nodata(r)) continue;
        if (r != 1.0) continue;
        ++ref_all;
        bool hit = o == 1.0;
        if (hit) ++hit_all;
        if (!masked_out(exclusion, i)) {
            ++ref_out;
            if (hit) ++hit_out;
        }
    }
    if (ref_all == 0) throw StatError("overlap_stats: reference layer has no positive pixels");
    OverlapStats s;
    s.detection_rate = double(hit_all) / double(ref_all);
    if (exclusion) {
        if (ref_out == 0)
            throw StatError("overlap_stats: reference layer is empty outside the exclusion mask");
        s.detection_rate_outside_mask = double(hit_out) / double(ref_out);
    } else {
        s.detection_rate_outside_mask = s.detection_rate;
    }
    return s;
}

double new_area_pct(const Raster& ours, const std::vector<const Raster*>& refs) {
    for (const Raster* r : refs) require_same_grid(ours, *r, "new_area_pct");
    int64_t union_count = 0, extra = 0;
    for (int64_t i = 0; i < ours.size(); ++i) {
        bool in_union = false;
        for (const Raster* r : refs) {
            double v = r->at_index(i);
            if (!r->is_nodata(v) && v == 1.0) {
                in_union = true;
                break;
            }
        }
        double o = ours.at_index(i);
        bool in_ours = !ours.is_nodata(o) && o == 1.0;
        if (in_union)
            ++union_count;
        else if (in_ours)
            ++extra;
    }
    if (union_count == 0) throw StatError("new_area_pct: reference union has no positive pixels");
    return 100.0 * double(extra) / double(union_count);
}

}  // namespace floodsar
