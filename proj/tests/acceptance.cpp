// Acceptance suite: one self-contained check per release criterion, each
// printed as a PASS/FAIL line. Independent oracles (byte-level codecs, direct
// convolution, normal equations) are reimplemented here rather than borrowed
// from the library. Expects --cli <path> to exercise the command-line binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "floodsar/aggregate.hpp"
#include "floodsar/classifier.hpp"
#include "floodsar/csv.hpp"
#include "floodsar/metrics.hpp"
#include "floodsar/postproc.hpp"
#include "floodsar/raster.hpp"
#include "floodsar/scene.hpp"
#include "floodsar/synth.hpp"
#include "floodsar/trend.hpp"

namespace fs = std::filesystem;
using namespace floodsar;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

std::string cli_path;
fs::path work_dir;

int run_cli(const std::string& args) {
    std::string cmd = cli_path + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Manifest text with the wall-clock line dropped, for determinism checks.
std::string manifest_without_wall(const std::string& path) {
    std::istringstream in(read_file_bytes(path));
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("wall_ms=", 0) != 0) out += line + "\n";
    return out;
}

// --- criterion 1: end-to-end synthetic recovery ------------------------------

SynthScenario e2e_scenario(int64_t size, double sigma) {
    SynthScenario sc;
    sc.width = size;
    sc.height = size;
    sc.speckle_sigma = sigma;
    const GeoTransform& g = sc.grid;
    auto rect = [&](int64_t r0, int64_t c0, int64_t r1, int64_t c1) {
        std::vector<std::pair<double, double>> ring = {
            {g.x_origin + c0 * g.pixel_width, g.y_origin - r0 * g.pixel_height},
            {g.x_origin + c1 * g.pixel_width, g.y_origin - r0 * g.pixel_height},
            {g.x_origin + c1 * g.pixel_width, g.y_origin - r1 * g.pixel_height},
            {g.x_origin + c0 * g.pixel_width, g.y_origin - r1 * g.pixel_height}};
        return ring;
    };
    sc.flood_polygons.push_back(rect(size / 8, size / 8, size / 3, size / 2));
    sc.flood_polygons.push_back(rect(size / 2, size / 2, size - size / 6, size - size / 8));
    // a triangle for a non-axis-aligned boundary
    sc.flood_polygons.push_back(
        {{g.x_origin + 0.6 * size * g.pixel_width, g.y_origin - 0.05 * size * g.pixel_height},
         {g.x_origin + 0.9 * size * g.pixel_width, g.y_origin - 0.05 * size * g.pixel_height},
         {g.x_origin + 0.75 * size * g.pixel_width, g.y_origin - 0.35 * size * g.pixel_height}});
    return sc;
}

double pipeline_iou(const SynthScenario& sc, bool smooth) {
    GeneratedPair gp = generate_pair(sc);
    FeatureStack f = compute_features(gp.pair);
    FloodCandidateMask cand = classify_rule(f, {});
    FilterResult fr = filter_false_positives(cand, make_aux_stack(sc), {});
    Raster mask = smooth ? majority_smooth(fr.filtered.mask, 3) : fr.filtered.mask;
    return compare_metrics(mask, gp.truth).iou;
}

std::string criterion_1() {
    double iou_clean = pipeline_iou(e2e_scenario(256, 0.0), false);
    expect(iou_clean == 1.0, "noiseless IOU expected 1.0, got " + format_double(iou_clean));

    auto t0 = std::chrono::steady_clock::now();
    double iou_noisy = pipeline_iou(e2e_scenario(1024, 1.5), true);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    expect(iou_noisy >= 0.90, "noisy IOU expected >= 0.90, got " + format_double(iou_noisy));
    expect(ms < 10000, "1024x1024 pipeline took " + std::to_string(ms) + " ms, budget 10000");
    return "noiseless IOU=1, noisy IOU=" + format_double(iou_noisy) + ", 1024x1024 single-thread in " +
           std::to_string(ms) + " ms";
}

// --- criterion 2: water threshold boundary semantics -------------------------

std::string criterion_2() {
    const double eps = 1e-6;
    expect(is_water_db(-17.5 - eps, Polarization::VV), "VV just below -17.5 must be water");
    expect(!is_water_db(-17.5, Polarization::VV), "VV at -17.5 must not be water (strictly below)");
    expect(!is_water_db(-17.5 + eps, Polarization::VV), "VV just above -17.5 must not be water");
    expect(is_water_db(-22.5 - eps, Polarization::VH), "VH just below -22.5 must be water");
    expect(!is_water_db(-22.5, Polarization::VH), "VH at -22.5 must not be water (strictly below)");
    expect(!is_water_db(-22.5 + eps, Polarization::VH), "VH just above -22.5 must not be water");
    return "strict below -17.5 dB VV / -22.5 dB VH at +-1e-6";
}

// --- criterion 3: convolution engine vs direct oracle ------------------------

Tensor oracle_conv(const Tensor& in, const ConvLayer& c) {
    int ph = in.height + 2 * c.padding, pw = in.width + 2 * c.padding;
    std::vector<double> padded(size_t(in.channels) * ph * pw, 0.0);
    for (int ch = 0; ch < in.channels; ++ch)
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x)
                padded[(size_t(ch) * ph + y + c.padding) * pw + x + c.padding] = in.at(ch, y, x);
    int oh = (in.height + 2 * c.padding - c.kernel) / c.stride + 1;
    int ow = (in.width + 2 * c.padding - c.kernel) / c.stride + 1;
    Tensor out(c.out_channels, oh, ow);
    for (int oc = 0; oc < c.out_channels; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = c.bias[size_t(oc)];
                int ic0 = c.depthwise ? oc : 0, ic1 = c.depthwise ? oc + 1 : c.in_channels;
                for (int ic = ic0; ic < ic1; ++ic) {
                    size_t widx = c.depthwise ? size_t(oc) * c.kernel * c.kernel
                                              : (size_t(oc) * c.in_channels + ic) * c.kernel * c.kernel;
                    for (int ky = 0; ky < c.kernel; ++ky)
                        for (int kx = 0; kx < c.kernel; ++kx)
                            acc += double(c.weights[widx + size_t(ky) * c.kernel + kx]) *
                                   padded[(size_t(ic) * ph + oy * c.stride + ky) * pw + ox * c.stride + kx];
                }
                out.set(oc, oy, ox, float(acc));
            }
    return out;
}

Network random_net(std::mt19937_64& rng, int in_ch, bool preserving) {
    std::vector<Layer> layers;
    int ch = in_ch;
    int n = 1 + int(rng() % 3);
    auto coin = [&rng] { return float(int64_t(rng() % 2001) - 1000) / 1000.0f; };
    for (int i = 0; i < n; ++i) {
        bool last = i == n - 1;
        ConvLayer c;
        c.in_channels = ch;
        c.out_channels = last ? 1 : 1 + int(rng() % 6);
        c.kernel = 1 + 2 * int(rng() % 3);
        c.stride = preserving ? 1 : 1 + int(rng() % 2);
        c.padding = preserving ? (c.kernel - 1) / 2 : int(rng() % 3);
        c.depthwise = !last && rng() % 4 == 0;
        if (c.depthwise) c.out_channels = ch;
        size_t nw = c.parameter_count() - size_t(c.out_channels);
        for (size_t k = 0; k < nw; ++k) c.weights.push_back(coin());
        for (int k = 0; k < c.out_channels; ++k) c.bias.push_back(coin());
        ch = c.out_channels;
        layers.emplace_back(std::move(c));
        if (!last) layers.emplace_back(Activation::Relu);
    }
    layers.emplace_back(Activation::Sigmoid);
    return Network(std::move(layers));
}

std::string criterion_3() {
    std::mt19937_64 rng(20240917);
    double worst = 0.0;
    int done = 0;
    while (done < 50) {
        int in_ch = 1 + int(rng() % 5);
        Network net = random_net(rng, in_ch, done % 2 == 0);
        Tensor input(in_ch, 6 + int(rng() % 12), 6 + int(rng() % 12));
        for (float& v : input.data) v = float(int64_t(rng() % 2001) - 1000) / 250.0f;
        Tensor got;
        try {
            got = net.forward(input);
        } catch (const ConfigError&) {
            continue;  // degenerate stride/padding draw
        }
        Tensor cur = input;
        for (const auto& l : net.layers()) {
            if (const auto* c = std::get_if<ConvLayer>(&l))
                cur = oracle_conv(cur, *c);
            else if (std::get<Activation>(l) == Activation::Relu)
                for (float& v : cur.data) v = std::max(0.0f, v);
            else
                for (float& v : cur.data) v = float(1.0 / (1.0 + std::exp(-double(v))));
        }
        expect(got.data.size() == cur.data.size(), "oracle shape mismatch");
        for (size_t i = 0; i < got.data.size(); ++i)
            worst = std::max(worst, std::abs(double(got.data[i]) - double(cur.data[i])));
        ++done;
    }
    expect(worst <= 1e-5, "max abs deviation " + format_double(worst) + " exceeds 1e-5");

    // tiled == untiled, bit for bit
    GeoTransform g{30.0, 10.0, 0.0002, 0.0002, 4326};
    auto change = [&] { return Raster(64, 64, g, DType::Byte, kMaskNoData, 0.0); };
    auto delta = [&] { return Raster(64, 64, g, DType::Float32, kFloatNoData, 0.0); };
    FeatureStack f{change(), change(), delta(), delta()};
    for (int64_t i = 0; i < f.change_to_water_vv.size(); ++i) {
        f.change_to_water_vv.set_index(i, double(rng() % 2));
        f.change_to_water_vh.set_index(i, double(rng() % 2));
        f.delta_vv.set_index(i, -double(rng() % 1500) / 100.0);
        f.delta_vh.set_index(i, -double(rng() % 1500) / 100.0);
    }
    for (int trial = 0; trial < 5; ++trial) {
        Network net = random_net(rng, 4, true);
        FloodCandidateMask whole = infer(net, f, 0.5, 0);
        FloodCandidateMask tiled = infer(net, f, 0.5, 32);
        FloodCandidateMask odd = infer(net, f, 0.5, 23);
        expect(tiled.probability->pixels() == whole.probability->pixels() &&
                   odd.probability->pixels() == whole.probability->pixels(),
               "tiled and untiled probabilities differ");
        expect(tiled.mask.pixels() == whole.mask.pixels(), "tiled and untiled masks differ");
    }
    return "50 random triples, max |engine - oracle| = " + format_double(worst) +
           "; tiled == untiled bit-exact";
}

// --- criterion 4: morphology --------------------------------------------------

std::string criterion_4() {
    GeoTransform g{0, 1000, 20, 20, 32637};
    Raster one(41, 41, g, DType::Byte);
    one.set(20, 20, 1.0);
    int64_t n4 = buffer_mask(one, 4).count_positive();
    int64_t n12 = buffer_mask(one, 12).count_positive();
    expect(n4 == 81, "radius 4 expected 81 positives, got " + std::to_string(n4));
    expect(n12 == 625, "radius 12 expected 625 positives, got " + std::to_string(n12));

    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        Raster m(30, 22, g, DType::Byte);
        for (int64_t i = 0; i < m.size(); ++i) m.set_index(i, rng() % 10 == 0 ? 1.0 : 0.0);
        int a = int(rng() % 5), b = int(rng() % 5);
        Raster composed = buffer_mask(buffer_mask(m, a), b);
        Raster direct = buffer_mask(m, a + b);
        expect(composed.pixels() == direct.pixels(),
               "dilate(a) then dilate(b) differs from dilate(a+b) with a=" + std::to_string(a) +
                   " b=" + std::to_string(b));
    }
    return "81 @ r4, 625 @ r12, composition law on 20 random masks";
}

// --- criterion 5: filter rules -------------------------------------------------

std::string criterion_5() {
    GeoTransform g{0, 1000, 20, 20, 32637};
    const int w = 6;
    AuxStack aux;
    aux.slope = Raster(w, 1, g, DType::Float32, std::nullopt, 0.0);
    aux.land_cover = Raster(w, 1, g, DType::Byte, std::nullopt, double(landcover::kCropland));
    aux.soil_moisture = Raster(w, 1, g, DType::Float32, std::nullopt, 0.3);
    aux.temperature = Raster(w, 1, g, DType::Float32, std::nullopt, 290.0);
    aux.elevation = Raster(w, 1, g, DType::Float32, std::nullopt, 100.0);
    const double eps = 1e-9;
    aux.slope->set(0, 0, 10.0 + eps);
    aux.slope->set(0, 1, 10.0 - eps);
    aux.land_cover->set(0, 2, landcover::kBareGround);
    aux.land_cover->set(0, 3, landcover::kPermanentWater);
    aux.soil_moisture->set(0, 4, 0.05);
    aux.temperature->set(0, 4, 270.0);  // two rules at once
    FloodCandidateMask cand{Raster(w, 1, g, DType::Byte, std::nullopt, 1.0), std::nullopt};
    FilterResult fr = filter_false_positives(cand, aux, {});

    auto reason = [&](int col) { return int(fr.removal_reason.at(0, col)); };
    auto kept = [&](int col) { return fr.filtered.mask.at(0, col) == 1.0; };
    expect(!kept(0) && reason(0) == removal::kSteepTerrain, "slope 10+eps must be removed as steep");
    expect(kept(1) && reason(1) == 0, "slope 10-eps must be retained");
    expect(!kept(2) && reason(2) == removal::kExcludedLandCover, "bare ground must be removed");
    expect(!kept(3) && reason(3) == removal::kExcludedLandCover, "permanent water must be removed");
    expect(!kept(4) && reason(4) == (removal::kLowSoilMoisture | removal::kLowTemperature),
           "dry + cold pixel must carry both flags");
    expect(kept(5) && reason(5) == 0, "benign pixel must be retained with zero reason");
    return "6-case grid: flags identify exactly the triggered rules";
}

// --- criterion 6: metrics algebra ----------------------------------------------

std::string criterion_6() {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionCounts c{int64_t(rng() % 500), int64_t(rng() % 500), int64_t(rng() % 500),
                          int64_t(rng() % 500)};
        if (c.tp + c.fp + c.fn == 0) c.tp = 1;
        Metrics m = metrics_from_counts(c);
        expect(std::abs(m.iou - m.f1 / (2.0 - m.f1)) <= 1e-12,
               "iou vs f1/(2-f1) drift at trial " + std::to_string(trial));
    }
    Metrics m = metrics_from_counts({50, 50, 50, 0});
    expect(m.precision == 0.5 && m.recall == 0.5, "tp=fp=fn=50 precision/recall must be 0.5");
    expect(std::abs(m.f1 - 0.5) <= 1e-15, "tp=fp=fn=50 f1 must be 0.5");
    expect(std::abs(m.iou - 1.0 / 3.0) <= 1e-15, "tp=fp=fn=50 iou must be 1/3");
    return "identity holds to 1e-12 on 100 tables; hand-counted case exact";
}

// --- criterion 7: OLS trend -----------------------------------------------------

MonthlySeries monte_carlo_series(uint64_t seed) {
    Rng rng(seed);
    MonthlySeries s;
    s.start = {2014, 10};
    for (int t = 0; t < 120; ++t) {
        int month = (9 + t) % 12 + 1;
        double v = 100.0 + 0.5 * t + 10.0 * std::sin(2.0 * kPi * (month - 1) / 12.0) +
                   6.0 * rng.normal();
        s.flooded_area.push_back(v);
        s.observation_count.push_back(1);
        s.single_pol_fraction.push_back(0.0);
    }
    return s;
}

std::array<double, 13> acceptance_normal_equations(const MonthlySeries& s) {
    std::vector<std::array<double, 14>> rows;
    for (size_t i = 0; i < s.size(); ++i) {
        std::array<double, 14> r{};
        r[0] = 1.0;
        r[1] = double(i);
        int month = s.month_at(i).month;
        if (month >= 2) r[size_t(month)] = 1.0;
        r[13] = s.normalized(i);
        rows.push_back(r);
    }
    double A[13][14] = {};
    for (const auto& r : rows)
        for (int i = 0; i < 13; ++i) {
            for (int j = 0; j < 13; ++j) A[i][j] += r[size_t(i)] * r[size_t(j)];
            A[i][13] += r[size_t(i)] * r[13];
        }
    for (int col = 0; col < 13; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 13; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        for (int j = 0; j < 14; ++j) std::swap(A[col][j], A[pivot][j]);
        for (int r = col + 1; r < 13; ++r) {
            double f = A[r][col] / A[col][col];
            for (int j = col; j < 14; ++j) A[r][j] -= f * A[col][j];
        }
    }
    std::array<double, 13> beta{};
    for (int i = 12; i >= 0; --i) {
        double acc = A[i][13];
        for (int j = i + 1; j < 13; ++j) acc -= A[i][j] * beta[size_t(j)];
        beta[size_t(i)] = acc / A[i][i];
    }
    return beta;
}

std::string criterion_7() {
    int covered = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        TrendResult r = fit_trend(monte_carlo_series(9000 + seed), Scenario::All);
        if (std::abs(r.slope - 0.5) <= 2.0 * r.slope_stderr) ++covered;
    }
    expect(covered >= 190, "slope covered in " + std::to_string(covered) + "/200 runs, need >= 190");

    for (uint64_t seed : {9001ull, 9033ull, 9101ull}) {
        MonthlySeries s = monte_carlo_series(seed);
        TrendResult fit = fit_trend(s, Scenario::All);
        auto beta = acceptance_normal_equations(s);
        expect(std::abs(fit.intercept - beta[0]) <= 1e-8, "intercept disagrees with normal equations");
        expect(std::abs(fit.slope - beta[1]) <= 1e-8, "slope disagrees with normal equations");
        for (int m = 0; m < 11; ++m)
            expect(std::abs(fit.monthly_coefficients[size_t(m)] - beta[size_t(m + 2)]) <= 1e-8,
                   "dummy coefficient disagrees with normal equations");
    }

    MonthlySeries s = monte_carlo_series(9042);
    TrendResult base = fit_trend(s, Scenario::All);
    MonthlySeries shifted = s;
    for (auto& v : shifted.flooded_area) v += 500.0;
    TrendResult sh = fit_trend(shifted, Scenario::All);
    expect(std::abs(sh.slope - base.slope) <= 1e-10 && std::abs(sh.slope_stderr - base.slope_stderr) <= 1e-10 &&
               std::abs(sh.p_value - base.p_value) <= 1e-10,
           "intercept shift changed slope, stderr or p");
    MonthlySeries scaled = s;
    for (auto& v : scaled.flooded_area) v *= 2.5;
    TrendResult sc = fit_trend(scaled, Scenario::All);
    expect(std::abs(sc.slope - 2.5 * base.slope) <= 1e-10 &&
               std::abs(sc.slope_stderr - 2.5 * base.slope_stderr) <= 1e-10 &&
               std::abs(sc.p_value - base.p_value) <= 1e-10 &&
               std::abs(sc.annual_pct - base.annual_pct) <= 1e-10 * std::abs(base.annual_pct),
           "scaling invariance failed");
    return "coverage " + std::to_string(covered) + "/200; normal-equations agreement 1e-8; invariances 1e-10";
}

// --- criterion 8: scenario machinery -------------------------------------------

struct DecadeOutcome {
    std::vector<TrendResult> fits;  // all, drop 2022, drop both
    MonthlySeries series;
};

DecadeOutcome detect_decade(const SynthScenario& sc, const DecadeModel& model, const fs::path& dir) {
    fs::remove_all(dir);
    generate_decade(sc, model, dir.string());
    auto manifest = read_scene_manifest((dir / "manifest.csv").string());
    auto observations = read_observations_csv((dir / "observations.csv").string());
    std::vector<SceneMeta> metas;
    for (const auto& e : manifest) metas.push_back(e.meta);
    AuxStack aux;
    std::vector<DetectionRecord> records;
    for (auto [pre_i, post_i] : pair_scenes(metas)) {
        ScenePair pair = load_scene_pair(manifest[pre_i], manifest[post_i], dir.string());
        FeatureStack f = compute_features(pair);
        FloodCandidateMask cand = classify_rule(f, {});
        if (!aux.slope) {
            SynthScenario aux_sc = sc;
            aux = make_aux_stack(aux_sc);
        }
        FilterResult fr = filter_false_positives(cand, aux, {});
        auto batch = emit_records(fr.filtered, fr.removal_reason, f, aux, pair.post_meta);
        records.insert(records.end(), batch.begin(), batch.end());
    }
    DecadeOutcome out;
    out.series = build_series(records, observations, 0.04);
    for (Scenario scn : {Scenario::All, Scenario::Drop2022, Scenario::Drop2022AndPreJun2017})
        out.fits.push_back(fit_trend(out.series, scn));
    return out;
}

std::string criterion_8() {
    SynthScenario sc;
    sc.width = 56;
    sc.height = 56;
    sc.speckle_sigma = 0.0;
    DecadeModel model;
    model.base_area_px = 300;
    model.trend_pct_per_year = 5.0;
    model.seasonal_amplitude = 0.2;
    model.outlier_year = 2022;
    model.outlier_factor = 3.0;
    model.single_pol_before = Date{2017, 6, 1};
    model.single_pol_detection_ratio = 0.5;
    model.area_noise_frac = 0.03;
    DecadeOutcome d = detect_decade(sc, model, work_dir / "decade8");
    double est_all = d.fits[0].annual_pct;
    double est_no22 = d.fits[1].annual_pct;
    double est_both = d.fits[2].annual_pct;
    expect(est_all >= est_no22 && est_no22 >= est_both,
           "scenario ordering violated: " + format_double(est_all) + " / " + format_double(est_no22) +
               " / " + format_double(est_both));

    // polarization correction on a flat planted archive with a 0.5 deficit
    DecadeModel flat;
    flat.base_area_px = 300;
    flat.single_pol_before = Date{2017, 6, 1};
    flat.single_pol_detection_ratio = 0.5;
    DecadeOutcome df = detect_decade(sc, flat, work_dir / "decade8b");
    MonthlySeries corrected = polarization_correction(df.series, df.series.start,
                                                      df.series.month_at(df.series.size() - 1));
    expect(corrected.pol_correction_factor.has_value(), "no correction factor recorded");
    double factor = *corrected.pol_correction_factor;
    expect(std::abs(factor - 2.0) <= 0.1,
           "planted factor 2 recovered as " + format_double(factor) + ", outside 5%");
    return "ordering " + format_double(est_all) + "% >= " + format_double(est_no22) + "% >= " +
           format_double(est_both) + "%; correction factor " + format_double(factor);
}

// --- criterion 9: decomposition --------------------------------------------------

std::string criterion_9() {
    MonthlySeries s;
    s.start = {2014, 10};
    for (int t = 0; t < 120; ++t) {
        s.flooded_area.push_back(100.0 + 2.0 * t + 10.0 * std::sin(2.0 * kPi * t / 12.0));
        s.observation_count.push_back(1);
        s.single_pol_fraction.push_back(0.0);
    }
    Decomposition d = seasonal_decompose(s);
    double worst_trend = 0.0;
    for (int t = 6; t < 114; ++t)
        worst_trend = std::max(worst_trend, std::abs(*d.trend[size_t(t)] - (100.0 + 2.0 * t)));
    expect(worst_trend < 0.5, "trend error " + format_double(worst_trend) + " exceeds 0.5");
    for (int t = 0; t + 12 <= 120; ++t) {
        double sum = 0.0;
        for (int j = t; j < t + 12; ++j) sum += d.seasonal[size_t(j)];
        expect(std::abs(sum) <= 1e-12, "12-month seasonal sum " + format_double(sum) + " not zero");
    }
    for (int t = 0; t < 120; ++t) {
        if (!d.trend[size_t(t)]) continue;
        double rebuilt = *d.trend[size_t(t)] + d.seasonal[size_t(t)] + *d.residual[size_t(t)];
        expect(std::abs(rebuilt - d.observed[size_t(t)]) <= 1e-12 * std::max(1.0, std::abs(rebuilt)),
               "reconstruction differs at t=" + std::to_string(t));
    }
    return "trend error < 0.5 mid-series; seasonal sums exactly zero; reconstruction exact";
}

// --- criterion 10: aggregation laws ----------------------------------------------

std::string criterion_10() {
    GeoTransform g{500000, 4000000, 20, 20, 32637};
    const int w = 40, h = 40;
    std::mt19937_64 rng(1010);
    auto random_mask = [&] {
        Raster m(w, h, g, DType::Byte);
        for (int64_t i = 0; i < m.size(); ++i) m.set_index(i, rng() % 12 == 0 ? 1.0 : 0.0);
        return m;
    };
    Date start{2020, 1, 1}, end{2020, 12, 31};
    for (int trial = 0; trial < 10; ++trial) {
        Raster a = random_mask(), b = random_mask(), c = random_mask();
        Date d1{2020, 2, 1}, d2{2020, 3, 1}, d3{2020, 4, 1};
        auto abc = compose_masks({{&a, d1}, {&b, d2}, {&c, d3}}, start, end, g, w, h, 0);
        auto cab = compose_masks({{&c, d3}, {&a, d1}, {&b, d2}}, start, end, g, w, h, 0);
        expect(abc.extent.pixels() == cab.extent.pixels(), "composition is order-dependent");
        auto twice = compose_masks({{&a, d1}, {&a, d1}, {&b, d2}, {&c, d3}}, start, end, g, w, h, 0);
        expect(twice.extent.pixels() == abc.extent.pixels(), "composition is not idempotent");
        auto ab = compose_masks({{&a, d1}, {&b, d2}}, start, end, g, w, h, 0);
        for (int64_t i = 0; i < ab.extent.size(); ++i)
            expect(ab.extent.at_index(i) != 1.0 || abc.extent.at_index(i) == 1.0,
                   "adding a scene shrank the composite");
    }

    Raster one(50, 50, g, DType::Byte);
    one.set(17, 31, 1.0);
    CompositeMap fine{one, start, end, 0, std::nullopt};
    CompositeMap coarse = coarsen(fine, 250.0);
    expect(coarse.extent.count_positive() == 1,
           "one fine positive must map to exactly one coarse cell");

    Raster cover(50, 50, g, DType::Byte, std::nullopt, double(landcover::kCropland));
    Raster extent(50, 50, g, DType::Byte);
    int64_t planted = 0;
    for (int64_t i = 0; i < extent.size(); ++i)
        if (rng() % 7 == 0) {
            extent.set_index(i, 1.0);
            ++planted;
        }
    CompositeMap cm{extent, start, end, 0, std::nullopt};
    auto rows = overlay_impact(cm, cover, landcover::kCropland);
    expect(rows[0].hectares.has_value() && *rows[0].hectares == double(planted) * 0.04,
           "hectare accounting must be exactly N x 0.04");
    return "order/idempotence/monotonicity on random scene sets; any-touch 1->1; exact hectares";
}

// --- criterion 11: formats and CLI determinism -----------------------------------

std::string criterion_11() {
    // FLR1 round-trip over randomized rasters
    std::mt19937_64 rng(1111);
    GeoTransform g{500000, 4000000, 20, 20, 32637};
    for (int trial = 0; trial < 12; ++trial) {
        DType dt = DType(trial % 3);
        Raster r(3 + int(rng() % 20), 2 + int(rng() % 20), g, dt,
                 dt == DType::Byte ? 255.0 : -9999.0);
        for (int64_t i = 0; i < r.size(); ++i) {
            if (dt == DType::Byte)
                r.set_index(i, double(rng() % 255));
            else if (dt == DType::Int16)
                r.set_index(i, double(int(rng() % 65535) - 32767));
            else
                r.set_index(i, double(float(int64_t(rng() % 200001) - 100000) / 99.7f));
        }
        fs::path p = work_dir / "roundtrip.flr";
        write_raster(r, p.string());
        std::string bytes = read_file_bytes(p.string());
        Raster back = read_raster(p.string());
        write_raster(back, p.string());
        expect(read_file_bytes(p.string()) == bytes, "FLR1 re-serialization changed bytes");
        expect(back == r, "FLR1 round-trip changed the raster");
    }

    expect(!cli_path.empty(), "--cli path not provided");

    // scenario file for a small decade archive
    SynthScenario sc;
    sc.width = 40;
    sc.height = 40;
    sc.speckle_sigma = 0.5;
    fs::path scenario = work_dir / "scenario.txt";
    write_synth_scenario(sc, scenario.string());

    // identical runs into the same path must reproduce every byte except wall_ms
    fs::path sa = work_dir / "synth_run";
    auto synth_cmd = "synth --scenario " + scenario.string() +
                     " --decade --months 26 --base-area-px 120 --trend-pct 4 "
                     "--seasonal-amplitude 0.2 --single-pol-before 2015-06-01 --seed 5 --out " +
                     sa.string();
    fs::remove_all(sa);
    expect(run_cli(synth_cmd) == 0, "synth run A failed");
    std::map<std::string, std::string> first_snapshot;
    for (const char* name : {"manifest.csv", "observations.csv", "planted.csv",
                             "scenes/2015-01-pre-vv.flr", "scenes/2016-03-post-vv.flr"})
        first_snapshot[name] = read_file_bytes((sa / name).string());
    std::string first_manifest = manifest_without_wall((sa / "synth-run.txt").string());
    fs::remove_all(sa);
    expect(run_cli(synth_cmd) == 0, "synth run B failed");
    for (const auto& [name, bytes] : first_snapshot)
        expect(read_file_bytes((sa / name).string()) == bytes,
               "synth output differs between identical runs: " + name);
    expect(manifest_without_wall((sa / "synth-run.txt").string()) == first_manifest,
           "synth run manifests differ beyond wall_ms");

    // detect twice over the same archive with constant aux planes
    AuxStack aux = make_aux_stack(sc);
    for (const auto& [name, plane] :
         std::vector<std::pair<std::string, const Raster*>>{{"slope", &*aux.slope},
                                                            {"landcover", &*aux.land_cover},
                                                            {"moisture", &*aux.soil_moisture},
                                                            {"temperature", &*aux.temperature},
                                                            {"elevation", &*aux.elevation}})
        write_raster(*plane, (work_dir / ("aux-" + name + ".flr")).string());
    fs::path da = work_dir / "detect_run";
    auto detect_cmd = "detect --manifest " + (sa / "manifest.csv").string() +
                      " --aux-slope " + (work_dir / "aux-slope.flr").string() +
                      " --aux-landcover " + (work_dir / "aux-landcover.flr").string() +
                      " --aux-moisture " + (work_dir / "aux-moisture.flr").string() +
                      " --aux-temperature " + (work_dir / "aux-temperature.flr").string() +
                      " --aux-elevation " + (work_dir / "aux-elevation.flr").string() + " --out " +
                      da.string();
    fs::remove_all(da);
    expect(run_cli(detect_cmd) == 0, "detect run A failed");
    std::string first_detections = read_file_bytes((da / "detections.csv").string());
    std::string first_detect_manifest = manifest_without_wall((da / "detect-run.txt").string());
    fs::remove_all(da);
    expect(run_cli(detect_cmd) == 0, "detect run B failed");
    expect(read_file_bytes((da / "detections.csv").string()) == first_detections,
           "detections.csv differs between identical runs");
    expect(manifest_without_wall((da / "detect-run.txt").string()) == first_detect_manifest,
           "detect run manifests differ beyond wall_ms");

    // detections CSV round-trips byte-exactly
    auto records = read_detections_csv((da / "detections.csv").string());
    fs::path rewritten = work_dir / "detections_rewrite.csv";
    write_detections_csv(rewritten.string(), records);
    expect(read_file_bytes(rewritten.string()) == read_file_bytes((da / "detections.csv").string()),
           "detections.csv re-serialization changed bytes");

    // trend over the detect outputs
    fs::path ta = work_dir / "trend_a";
    fs::remove_all(ta);
    // the 26-month archive predates 2017-06, so only the all-data scenario fits
    int trc = run_cli("trend --records " + (da / "detections.csv").string() + " --observations " +
                      (da / "observations.csv").string() + " --scenario all --decompose --out " +
                      ta.string());
    expect(trc == 0, "trend run failed with exit " + std::to_string(trc));
    expect(fs::exists(ta / "trend_report.csv") && fs::exists(ta / "decomposition.csv"),
           "trend outputs missing");

    // CLI spot checks: buffer 12 -> 625 positives; compare self -> 0%
    Raster one(41, 41, g, DType::Byte);
    one.set(20, 20, 1.0);
    write_raster(one, (work_dir / "one.flr").string());
    fs::path ba = work_dir / "buffer_a";
    fs::remove_all(ba);
    expect(run_cli("buffer --in " + (work_dir / "one.flr").string() + " --radius-px 12 --out " +
                   ba.string()) == 0,
           "buffer run failed");
    expect(read_raster((ba / "buffered.flr").string()).count_positive() == 625,
           "CLI buffer radius 12 must produce 625 positives");
    // config file supplies options, flags take precedence
    fs::path cfg = work_dir / "buffer.cfg";
    write_file_bytes(cfg.string(), "buffer.radius-px=12\n");
    fs::path bc = work_dir / "buffer_cfg";
    fs::remove_all(bc);
    expect(run_cli("--config " + cfg.string() + " buffer --in " + (work_dir / "one.flr").string() +
                   " --out " + bc.string()) == 0,
           "buffer with config file failed");
    expect(read_raster((bc / "buffered.flr").string()).count_positive() == 625,
           "config-supplied radius was not applied");
    fs::remove_all(bc);
    expect(run_cli("--config " + cfg.string() + " buffer --in " + (work_dir / "one.flr").string() +
                   " --radius-px 4 --out " + bc.string()) == 0,
           "buffer with config override failed");
    expect(read_raster((bc / "buffered.flr").string()).count_positive() == 81,
           "command-line flag must take precedence over the config file");

    fs::path ca = work_dir / "compare_a";
    fs::remove_all(ca);
    Raster some(10, 10, g, DType::Byte);
    some.set(3, 3, 1.0);
    write_raster(some, (work_dir / "some.flr").string());
    expect(run_cli("compare --ours " + (work_dir / "some.flr").string() + " --gsw-binary " +
                   (work_dir / "some.flr").string() + " --out " + ca.string()) == 0,
           "compare run failed");
    CsvTable report = read_csv((ca / "comparison_report.csv").string());
    expect(parse_double(report.rows.at(0).at(1), "new_area_pct") == 0.0,
           "compare of a layer with itself must report 0% new area");

    // --no-filter leaves every record unfiltered (rerun overwrites da)
    expect(run_cli(detect_cmd + " --no-filter") == 0, "detect --no-filter failed");
    for (const auto& r : read_detections_csv((da / "detections.csv").string()))
        expect(!r.filtered && r.removal_reason == 0, "--no-filter must not mark records filtered");

    // aggregate the records onto the scene grid and overlay-check positives
    fs::path ga = work_dir / "aggregate_run";
    fs::remove_all(ga);
    expect(run_cli("aggregate --records " + (da / "detections.csv").string() + " --like " +
                   (sa / "scenes/2015-01-pre-vv.flr").string() + " --buffer-radius-px 1 --out " +
                   ga.string()) == 0,
           "aggregate run failed");
    Raster composite = read_raster((ga / "composite.flr").string());
    expect(composite.count_positive() > 0, "aggregate produced an empty composite");

    // metrics of a raster against itself are all 1.0
    fs::path ma = work_dir / "metrics_run";
    fs::remove_all(ma);
    expect(run_cli("metrics --pred " + (work_dir / "some.flr").string() + " --truth " +
                   (work_dir / "some.flr").string() + " --out " + ma.string()) == 0,
           "metrics run failed");
    CsvTable mt = read_csv((ma / "metrics.csv").string());
    for (int col = 0; col < 4; ++col)
        expect(parse_double(mt.rows.at(0).at(size_t(col)), "metric") == 1.0,
               "self-comparison metrics must be 1.0");

    // malformed manifest maps to exit code 2
    fs::path bad = work_dir / "bad_manifest.csv";
    write_file_bytes(bad.string(),
                     "scene_id,acquisition_time,pass_direction,relative_orbit,vv_path,vh_path\n"
                     "x,not-a-time,ascending,1,a.flr,\n");
    fs::path bo = work_dir / "bad_out";
    expect(run_cli("detect --manifest " + bad.string() + " --out " + bo.string()) == 2,
           "malformed manifest must exit with code 2");
    return "FLR1 + CSV byte-exact; synth/detect/trend digests reproduce; exit codes mapped";
}

// --- criterion 12: overlay statistic ----------------------------------------------

std::string criterion_12() {
    GeoTransform g{500000, 4000000, 20, 20, 32637};
    Raster cover(20, 10, g, DType::Byte, std::nullopt, double(landcover::kGrassland));
    std::mt19937_64 rng(1212);
    std::vector<int64_t> cells(200);
    for (size_t i = 0; i < cells.size(); ++i) cells[i] = int64_t(i);
    for (size_t i = cells.size(); i-- > 1;) std::swap(cells[i], cells[rng() % (i + 1)]);
    for (int i = 0; i < 100; ++i) cover.set_index(cells[size_t(i)], double(landcover::kCropland));
    Raster extent(20, 10, g, DType::Byte);
    for (int i = 0; i < 19; ++i) extent.set_index(cells[size_t(i)], 1.0);   // flooded cropland
    for (int i = 100; i < 130; ++i) extent.set_index(cells[size_t(i)], 1.0);  // flooded non-cropland
    CompositeMap cm{extent, {2024, 3, 1}, {2024, 5, 31}, 4, std::nullopt};
    auto rows = overlay_impact(cm, cover, landcover::kCropland);
    expect(rows.size() == 1, "expected a single whole-grid row");
    expect(rows[0].class_px == 100, "expected 100 cropland pixels");
    expect(rows[0].flooded_px == 19, "expected 19 flooded cropland pixels");
    expect(rows[0].fraction == 0.19, "fraction must be exactly 0.19");
    return "100 cropland px with 19 flooded -> exactly 19%";
}

struct Criterion {
    int id;
    const char* label;
    std::function<std::string()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::string(argv[i]) == "--cli") cli_path = argv[i + 1];

    work_dir = fs::temp_directory_path() / "floodsar_acceptance";
    fs::create_directories(work_dir);

    const std::vector<Criterion> criteria = {
        {1, "end-to-end synthetic recovery", criterion_1},
        {2, "water threshold boundary semantics", criterion_2},
        {3, "convolution engine vs direct oracle", criterion_3},
        {4, "morphological buffering", criterion_4},
        {5, "false-positive filter rules", criterion_5},
        {6, "metrics algebra", criterion_6},
        {7, "OLS trend recovery and invariances", criterion_7},
        {8, "scenario machinery and polarization correction", criterion_8},
        {9, "seasonal decomposition", criterion_9},
        {10, "aggregation laws", criterion_10},
        {11, "formats and CLI determinism", criterion_11},
        {12, "cropland overlay statistic", criterion_12},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        try {
            std::string detail = c.fn();
            std::printf("PASS %2d  %s: %s\n", c.id, c.label, detail.c_str());
        } catch (const Failure& f) {
            ++failures;
            std::printf("FAIL %2d  %s: %s\n", c.id, c.label, f.what.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL %2d  %s: unexpected error: %s\n", c.id, c.label, e.what());
        }
        std::fflush(stdout);
    }
    std::printf("%d/%zu acceptance criteria passed\n", int(criteria.size()) - failures,
                criteria.size());
    fs::remove_all(work_dir);
    return failures == 0 ? 0 : 1;
}
