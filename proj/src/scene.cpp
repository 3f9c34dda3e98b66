#include "floodsar/scene.hpp"

#include <algorithm>
#include <filesystem>

#include "floodsar/csv.hpp"
#include "floodsar/parallel.hpp"

namespace floodsar {

PassDirection parse_pass_direction(std::string_view s) {
    if (s == "ascending") return PassDirection::Ascending;
    if (s == "descending") return PassDirection::Descending;
    throw FormatError("pass_direction must be 'ascending' or 'descending', got '" + std::string(s) + "'");
}

const char* pass_direction_name(PassDirection d) {
    return d == PassDirection::Ascending ? "ascending" : "descending";
}

bool is_water_db(double amplitude_db, Polarization pol) {
    return amplitude_db < (pol == Polarization::VV ? kWaterThresholdVvDb : kWaterThresholdVhDb);
}

PairVerdict validate_pair(const SceneMeta& pre, const SceneMeta& post) {
    if (pre.pass_direction != post.pass_direction)
        return {false, PairRule::PassDirection,
                std::string("pass direction mismatch: ") + pass_direction_name(pre.pass_direction) +
                    " vs " + pass_direction_name(post.pass_direction)};
    if (pre.relative_orbit != post.relative_orbit)
        return {false, PairRule::RelativeOrbit,
                "relative orbit mismatch: " + std::to_string(pre.relative_orbit) + " vs " +
                    std::to_string(post.relative_orbit)};
    int64_t gap = post.acquisition_time.seconds - pre.acquisition_time.seconds;
    if (gap <= 0)
        return {false, PairRule::TemporalOrder, "post scene does not follow the pre scene"};
    if (gap > kMaxPairGapSeconds)
        return {false, PairRule::TemporalWindow,
                "gap of " + std::to_string(gap / 86400) + " days exceeds the 30-day window"};
    return {true, PairRule::None, ""};
}

void ScenePair::validate() const {
    PairVerdict v = validate_pair(pre_meta, post_meta);
    if (!v.ok) throw ConfigError("invalid scene pair " + pre_meta.scene_id + " -> " +
                                 post_meta.scene_id + ": " + v.detail);
    require_same_grid(pre_vv, post_vv, "scene pair VV");
    if (pre_vh) require_same_grid(pre_vv, *pre_vh, "scene pair pre VH");
    if (post_vh) require_same_grid(pre_vv, *post_vh, "scene pair post VH");
}

namespace {

// Fills one polarization's change/delta planes; pre/post may be null (single
// pol), in which case both planes stay all-nodata.
void fill_features(const Raster* pre, const Raster* post, Polarization pol, Raster& change,
                   Raster& delta, int jobs) {
    if (!pre || !post) return;
    const int64_t w = change.width();
    parallel_for(0, change.height(), jobs, [&](int64_t row) {
        for (int64_t col = 0; col < w; ++col) {
            double a = pre->at(row, col);
            double b = post->at(row, col);
            if (pre->is_nodata(a) || post->is_nodata(b)) continue;  // planes start as nodata
            bool transition = !is_water_db(a, pol) && is_water_db(b, pol);
            change.set(row, col, transition ? 1.0 : 0.0);
            delta.set(row, col, b - a);
        }
    });
}

}  // namespace

FeatureStack compute_features(const ScenePair& p, int jobs) {
    p.validate();
    const Raster& grid = p.pre_vv;
    auto make_change = [&] {
        return Raster(grid.width(), grid.height(), grid.transform(), DType::Byte, kMaskNoData,
                      kMaskNoData);
    };
    auto make_delta = [&] {
        return Raster(grid.width(), grid.height(), grid.transform(), DType::Float32, kFloatNoData,
                      kFloatNoData);
    };
    FeatureStack f{make_change(), make_change(), make_delta(), make_delta()};
    fill_features(&p.pre_vv, &p.post_vv, Polarization::VV, f.change_to_water_vv, f.delta_vv, jobs);
    fill_features(p.pre_vh ? &*p.pre_vh : nullptr, p.post_vh ? &*p.post_vh : nullptr,
                  Polarization::VH, f.change_to_water_vh, f.delta_vh, jobs);
    return f;
}

static const std::vector<std::string> kManifestHeader = {
    "scene_id", "acquisition_time", "pass_direction", "relative_orbit", "vv_path", "vh_path"};

std::vector<ManifestEntry> read_scene_manifest(const std::string& path) {
    CsvTable t = read_csv(path, kManifestHeader);
    std::vector<ManifestEntry> out;
    out.reserve(t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            ManifestEntry e;
            e.meta.scene_id = row[0];
            e.meta.acquisition_time = Timestamp::parse(row[1]);
            e.meta.pass_direction = parse_pass_direction(row[2]);
            e.meta.relative_orbit = int(parse_int(row[3], "relative_orbit"));
            e.vv_path = row[4];
            e.vh_path = row[5];
            if (e.vv_path.empty()) throw FormatError("vv_path is required");
            e.meta.has_vv = true;
            e.meta.has_vh = !e.vh_path.empty();
            out.push_back(std::move(e));
        } catch (const FormatError& err) {
            throw ConfigError(path + ": line " + std::to_string(i + 2) + ": " + err.what());
        }
    }
    return out;
}

void write_scene_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(entries.size());
    for (const auto& e : entries) {
        rows.push_back({e.meta.scene_id, e.meta.acquisition_time.to_string(),
                        pass_direction_name(e.meta.pass_direction),
                        std::to_string(e.meta.relative_orbit), e.vv_path, e.vh_path});
    }
    write_csv(path, kManifestHeader, rows);
}

std::vector<std::pair<size_t, size_t>> pair_scenes(const std::vector<SceneMeta>& scenes) {
    std::vector<size_t> order(scenes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scenes[a].acquisition_time != scenes[b].acquisition_time)
            return scenes[a].acquisition_time < scenes[b].acquisition_time;
        return scenes[a].scene_id < scenes[b].scene_id;
    });
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t pi = 0; pi < order.size(); ++pi) {
        size_t post = order[pi];
        // nearest admissible predecessor
        for (size_t qi = pi; qi-- > 0;) {
            size_t pre = order[qi];
            int64_t gap = scenes[post].acquisition_time.seconds - scenes[pre].acquisition_time.seconds;
            if (gap > kMaxPairGapSeconds) break;  // older scenes are even further away
            if (validate_pair(scenes[pre], scenes[post]).ok) {
                pairs.emplace_back(pre, post);
                break;
            }
        }
    }
    return pairs;
}

ScenePair load_scene_pair(const ManifestEntry& pre, const ManifestEntry& post,
                          const std::string& base_dir) {
    namespace fs = std::filesystem;
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (fs::path(base_dir) / fp).string();
    };
    ScenePair pair;
    pair.pre_meta = pre.meta;
    pair.post_meta = post.meta;
    pair.pre_vv = read_raster(resolve(pre.vv_path));
    pair.post_vv = read_raster(resolve(post.vv_path));
    if (!pre.vh_path.empty() && !post.vh_path.empty()) {
        pair.pre_vh = read_raster(resolve(pre.vh_path));
        pair.post_vh = read_raster(resolve(post.vh_path));
    }
    pair.validate();
    return pair;
}

}  // namespace floodsar
