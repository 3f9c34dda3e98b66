#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "floodsar/postproc.hpp"
#include "floodsar/scene.hpp"
#include "floodsar/trend.hpp"

namespace floodsar {

// Deterministic random stream. mt19937_64 output is pinned by the standard;
// the normal transform is our own so sequences never depend on library
// internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
    double normal();

private:
    std::mt19937_64 eng_;
};

// Stable sub-stream derivation for per-scene noise.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Planted-truth scene generator. Land/water amplitudes straddle the water
// thresholds; additive Gaussian dB noise stands in for residual speckle.
struct SynthScenario {
    uint64_t seed = 42;
    int64_t width = 256;
    int64_t height = 256;
    GeoTransform grid{30.0, 10.0, 0.0002, 0.0002, 4326};
    double land_amplitude_vv = -11.0;
    double land_amplitude_vh = -13.0;
    double water_amplitude_vv = -21.0;
    double water_amplitude_vh = -25.0;
    double speckle_sigma = 0.0;  // dB
    bool dual_pol = true;
    std::vector<std::vector<std::pair<double, double>>> flood_polygons;  // grid CRS rings

    // Constant auxiliary fields.
    double aux_slope_deg = 0.0;
    int aux_land_cover = landcover::kCropland;
    double aux_soil_moisture = 0.3;
    double aux_temperature_k = 290.0;
    double aux_elevation_m = 100.0;

    void validate() const;
};

SynthScenario parse_synth_scenario(const std::string& path);
void write_synth_scenario(const SynthScenario& sc, const std::string& path);

struct GeneratedPair {
    ScenePair pair;
    Raster truth;  // byte {0,1}, rasterized flood polygons
};

// Pre scene: land everywhere. Post scene: water inside the polygons. Both get
// independent per-pixel noise. Bit-identical for identical scenarios.
GeneratedPair generate_pair(const SynthScenario& sc);

// Constant-fill auxiliary planes on the scenario grid.
AuxStack make_aux_stack(const SynthScenario& sc);

// Monthly flood-extent model for the synthetic decade. The trend is centered
// on the series midpoint so the decade mean stays at base_area_px and the
// requested percentage is what a linear fit recovers.
struct DecadeModel {
    YearMonth start{2014, 10};
    int n_months = 120;
    int base_area_px = 400;
    double trend_pct_per_year = 0.0;
    double seasonal_amplitude = 0.0;  // multiplicative, fraction of base
    int outlier_year = 0;             // 0 disables
    double outlier_factor = 1.0;
    std::optional<Date> single_pol_before;  // scenes before this date carry VV only
    double single_pol_detection_ratio = 0.5;
    double area_noise_frac = 0.0;  // relative jitter on the planted area
};

struct DecadeMonth {
    YearMonth month;
    int planted_px = 0;
    bool single_pol = false;
};

struct DecadeArchive {
    std::vector<ManifestEntry> manifest;         // relative raster paths
    std::vector<ObservationEvent> observations;  // one per admissible consecutive pair
    std::vector<DecadeMonth> months;
};

// Planted pixel count for one month of the model (before rounding it is
// base * trend(t) * seasonal(month) * outlier * single-pol ratio).
int planted_pixels(const DecadeModel& m, int month_index, double noise = 0.0);

// Writes ~n_months monthly scene pairs (FLR1 + manifest.csv + observations.csv
// + planted.csv) under out_dir. Scene pairs sit 12 days apart; consecutive
// pairs stay inside the 30-day pairing window.
DecadeArchive generate_decade(const SynthScenario& sc, const DecadeModel& model,
                              const std::string& out_dir);

void write_planted_csv(const std::string& path, const std::vector<DecadeMonth>& months);
std::vector<DecadeMonth> read_planted_csv(const std::string& path);

}  // namespace floodsar
