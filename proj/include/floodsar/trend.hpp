#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "floodsar/aggregate.hpp"
#include "floodsar/dates.hpp"

namespace floodsar {

// One scene-pair evaluation. Months are "missing" when no pair was evaluated,
// which is different from an observed month with zero detections.
struct ObservationEvent {
    Date date;
    bool single_pol = false;
};

// CSV schema: date,single_pol (0/1)
std::vector<ObservationEvent> read_observations_csv(const std::string& path);
void write_observations_csv(const std::string& path, const std::vector<ObservationEvent>& events);

// Monthly flood extent normalized by observation count.
struct MonthlySeries {
    YearMonth start;
    std::vector<double> flooded_area;        // hectares
    std::vector<int> observation_count;      // scene-pair evaluations
    std::vector<double> single_pol_fraction; // share of single-pol observations
    std::optional<double> pol_correction_factor;  // set by polarization_correction

    size_t size() const { return flooded_area.size(); }
    YearMonth month_at(size_t i) const;
    bool missing(size_t i) const { return observation_count[i] == 0; }
    double normalized(size_t i) const;  // hectares per observation
};

// Aggregates unfiltered detections by calendar month. Each detection
// contributes area_ha_per_detection hectares (0.04 ha = one 20 m pixel). The
// window defaults to the observation span. Records in a month with no
// observations are an input inconsistency and throw.
MonthlySeries build_series(const std::vector<DetectionRecord>& records,
                           const std::vector<ObservationEvent>& observations,
                           double area_ha_per_detection = 0.04,
                           std::optional<std::pair<YearMonth, YearMonth>> window = std::nullopt);

// Same aggregation from per-date detection masks, so a series can be rebuilt
// from stored composites without re-running detection.
MonthlySeries build_series_from_masks(const std::vector<DatedMask>& masks,
                                      const std::vector<ObservationEvent>& observations,
                                      double area_ha_per_detection = 0.04,
                                      std::optional<std::pair<YearMonth, YearMonth>> window = std::nullopt);

// Scales single-polarization monthly contributions by
// factor = mean dual-pol rate / mean single-pol rate over the calibration
// window (months fully of one class). Mixed months are corrected on their
// single-pol share. A series with no single-pol months passes through
// unchanged; otherwise the window must contain both classes.
MonthlySeries polarization_correction(const MonthlySeries& s, YearMonth calib_start,
                                      YearMonth calib_end);

// Classical additive decomposition: centered moving-average trend (2x12 for
// the default period), month-wise seasonal means recentered to sum to zero,
// residual as the remainder. Missing months are linearly interpolated and
// flagged. The trend is undefined in the first and last period/2 months.
struct Decomposition {
    YearMonth start;
    std::vector<double> observed;
    std::vector<bool> interpolated;
    std::vector<std::optional<double>> trend;
    std::vector<double> seasonal;
    std::vector<std::optional<double>> residual;
};

Decomposition seasonal_decompose(const MonthlySeries& s, int period = 12);
void write_decomposition_csv(const std::string& path, const Decomposition& d);

enum class Scenario { All, Drop2022, Drop2022AndPreJun2017 };
const char* scenario_name(Scenario s);
Scenario parse_scenario(std::string_view s);

// OLS of the normalized series on [intercept, month index, 11 month dummies
// (February..December)]. Missing months are excluded, not imputed. The month
// index keeps calendar spacing across scenario exclusions.
struct TrendResult {
    Scenario scenario = Scenario::All;
    double slope = 0.0;      // hectares/observation per month
    double intercept = 0.0;
    std::array<double, 11> monthly_coefficients{};  // Feb..Dec offsets vs January
    double slope_stderr = 0.0;
    double p_value = 1.0;    // two-sided t test on the slope, df = n - 13
    double annual_pct = 0.0; // 100 * 12 * slope / mean(normalized over fitted months)
    int n_months = 0;
    double mean_normalized = 0.0;
    std::vector<size_t> fitted_indices;  // indices into the series
};

TrendResult fit_trend(const MonthlySeries& s, Scenario scenario);
void write_trend_report_csv(const std::string& path, const std::vector<TrendResult>& results);

// --- Per-tile trends (3-degree cells) ---------------------------------------

enum class TrendClass {
    LargeIncrease,
    ModerateIncrease,
    ModerateDecrease,
    LargeDecrease,
    Filtered
};
const char* trend_class_name(TrendClass c);

struct TileTrendConfig {
    double tile_deg = 3.0;
    double p_cutoff = 0.2;
    double moderate_band_pct = 1.0;  // net change, percent of tile land area
    double large_band_pct = 2.0;
    double area_ha_per_detection = 0.04;
    // Net change defaults to |slope| * fitted months / land area; false uses
    // the per-month rate instead.
    bool net_change_over_period = true;
    const Raster* land_cover = nullptr;  // optional, excludes permanent water from land area
};

struct TileTrend {
    int tile_lon = 0;  // cell index: floor(lon / tile_deg)
    int tile_lat = 0;
    double slope = 0.0;
    double p_value = 1.0;
    TrendClass magnitude_class = TrendClass::Filtered;
    bool full_tile_area = true;  // no land-cover raster supplied
};

std::vector<TileTrend> tile_trends(const std::vector<DetectionRecord>& records,
                                   const std::vector<ObservationEvent>& observations,
                                   const TileTrendConfig& cfg = {});
void write_tile_trends_csv(const std::string& path, const std::vector<TileTrend>& tiles,
                           double tile_deg = 3.0);

// Spherical-rectangle area of a tile_deg x tile_deg cell, hectares.
double tile_area_hectares(int tile_lat, double tile_deg);

// --- Small-sample statistics helpers (exposed for the oracle tests) ---------

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);
// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace floodsar
