#include "floodsar/trend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "floodsar/csv.hpp"

namespace floodsar {

std::vector<ObservationEvent> read_observations_csv(const std::string& path) {
    CsvTable t = read_csv(path, {"date", "single_pol"});
    std::vector<ObservationEvent> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        ObservationEvent e;
        e.date = Date::parse(row[0]);
        long long sp = parse_int(row[1], "single_pol");
        if (sp != 0 && sp != 1) throw FormatError(path + ": single_pol must be 0 or 1");
        e.single_pol = sp == 1;
        out.push_back(e);
    }
    return out;
}

void write_observations_csv(const std::string& path, const std::vector<ObservationEvent>& events) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(events.size());
    for (const auto& e : events) rows.push_back({e.date.to_string(), e.single_pol ? "1" : "0"});
    write_csv(path, {"date", "single_pol"}, rows);
}

YearMonth MonthlySeries::month_at(size_t i) const {
    int total = (start.month - 1) + int(i);
    return {start.year + total / 12, total % 12 + 1};
}

double MonthlySeries::normalized(size_t i) const {
    return observation_count[i] > 0 ? flooded_area[i] / observation_count[i] : 0.0;
}

MonthlySeries build_series(const std::vector<DetectionRecord>& records,
                           const std::vector<ObservationEvent>& observations,
                           double area_ha_per_detection,
                           std::optional<std::pair<YearMonth, YearMonth>> window) {
    if (!window) {
        if (observations.empty())
            throw StatError("build_series: no observations and no explicit window");
        YearMonth lo = YearMonth::of(observations.front().date);
        YearMonth hi = lo;
        for (const auto& o : observations) {
            YearMonth ym = YearMonth::of(o.date);
            lo = std::min(lo, ym);
            hi = std::max(hi, ym);
        }
        window = {{lo, hi}};
    }
    auto [start, end] = *window;
    if (end < start) throw StatError("build_series: window end precedes start");
    int n = end.months_since(start) + 1;

    MonthlySeries s;
    s.start = start;
    s.flooded_area.assign(size_t(n), 0.0);
    s.observation_count.assign(size_t(n), 0);
    s.single_pol_fraction.assign(size_t(n), 0.0);

    std::vector<int> single(size_t(n), 0);
    for (const auto& o : observations) {
        int i = YearMonth::of(o.date).months_since(start);
        if (i < 0 || i >= n) continue;
        ++s.observation_count[size_t(i)];
        if (o.single_pol) ++single[size_t(i)];
    }
    for (const auto& r : records) {
        if (r.filtered) continue;
        int i = YearMonth::of(r.date).months_since(start);
        if (i < 0 || i >= n) continue;
        if (s.observation_count[size_t(i)] == 0)
            throw StatError("build_series: detections dated " + YearMonth::of(r.date).to_string() +
                            " but no observation was recorded that month");
        s.flooded_area[size_t(i)] += area_ha_per_detection;
    }
    for (int i = 0; i < n; ++i)
        if (s.observation_count[size_t(i)] > 0)
            s.single_pol_fraction[size_t(i)] =
                double(single[size_t(i)]) / double(s.observation_count[size_t(i)]);
    return s;
}

MonthlySeries build_series_from_masks(const std::vector<DatedMask>& masks,
                                      const std::vector<ObservationEvent>& observations,
                                      double area_ha_per_detection,
                                      std::optional<std::pair<YearMonth, YearMonth>> window) {
    MonthlySeries s = build_series({}, observations, area_ha_per_detection, window);
    int n = int(s.size());
    for (const auto& dm : masks) {
        if (!dm.mask) throw Error("build_series_from_masks: null mask");
        int i = YearMonth::of(dm.date).months_since(s.start);
        if (i < 0 || i >= n) continue;
        if (s.observation_count[size_t(i)] == 0)
            throw StatError("build_series_from_masks: mask dated " + YearMonth::of(dm.date).to_string() +
                            " but no observation was recorded that month");
        s.flooded_area[size_t(i)] += double(dm.mask->count_positive()) * area_ha_per_detection;
    }
    return s;
}

MonthlySeries polarization_correction(const MonthlySeries& s, YearMonth calib_start,
                                      YearMonth calib_end) {
    bool any_single = false;
    for (size_t i = 0; i < s.size(); ++i)
        if (!s.missing(i) && s.single_pol_fraction[i] > 0.0) any_single = true;
    if (!any_single) return s;  // nothing to correct

    double single_sum = 0.0, dual_sum = 0.0;
    int single_n = 0, dual_n = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s.missing(i)) continue;
        YearMonth ym = s.month_at(i);
        if (ym < calib_start || calib_end < ym) continue;
        if (s.single_pol_fraction[i] == 1.0) {
            single_sum += s.normalized(i);
            ++single_n;
        } else if (s.single_pol_fraction[i] == 0.0) {
            dual_sum += s.normalized(i);
            ++dual_n;
        }
    }
    if (single_n == 0)
        throw StatError("polarization_correction: calibration window has no single-pol months");
    if (dual_n == 0)
        throw StatError("polarization_correction: calibration window has no dual-pol months");
    double single_rate = single_sum / single_n;
    double dual_rate = dual_sum / dual_n;
    if (single_rate <= 0.0)
        throw StatError("polarization_correction: single-pol detection rate is zero in the window");
    double factor = dual_rate / single_rate;

    MonthlySeries out = s;
    out.pol_correction_factor = factor;
    for (size_t i = 0; i < s.size(); ++i) {
        double f = s.single_pol_fraction[i];
        if (f <= 0.0) continue;
        // observed = true * ((1-f) + f/factor); invert that attenuation
        out.flooded_area[i] = s.flooded_area[i] / ((1.0 - f) + f / factor);
    }
    return out;
}

Decomposition seasonal_decompose(const MonthlySeries& s, int period) {
    if (period < 2) throw ConfigError("decomposition period must be >= 2");
    int n = int(s.size());
    if (n < 2 * period)
        throw StatError("seasonal_decompose: need at least " + std::to_string(2 * period) +
                        " months, have " + std::to_string(n));

    Decomposition d;
    d.start = s.start;
    d.observed.resize(size_t(n));
    d.interpolated.assign(size_t(n), false);

    // Fill missing months by linear interpolation (ends clamp to the nearest
    // observed value).
    std::vector<int> valid;
    for (int i = 0; i < n; ++i)
        if (!s.missing(size_t(i))) valid.push_back(i);
    if (valid.empty()) throw StatError("seasonal_decompose: every month is missing");
    for (int i = 0; i < n; ++i) {
        if (!s.missing(size_t(i))) {
            d.observed[size_t(i)] = s.normalized(size_t(i));
            continue;
        }
        d.interpolated[size_t(i)] = true;
        auto next = std::lower_bound(valid.begin(), valid.end(), i);
        if (next == valid.begin()) {
            d.observed[size_t(i)] = s.normalized(size_t(*next));
        } else if (next == valid.end()) {
            d.observed[size_t(i)] = s.normalized(size_t(*(next - 1)));
        } else {
            int hi = *next, lo = *(next - 1);
            double w = double(i - lo) / double(hi - lo);
            d.observed[size_t(i)] =
                (1.0 - w) * s.normalized(size_t(lo)) + w * s.normalized(size_t(hi));
        }
    }

    // Centered moving average; the 2xM form when the period is even.
    int half = period / 2;
    d.trend.assign(size_t(n), std::nullopt);
    for (int i = half; i < n - half; ++i) {
        double acc = 0.0;
        if (period % 2 == 0) {
            acc += 0.5 * d.observed[size_t(i - half)] + 0.5 * d.observed[size_t(i + half)];
            for (int j = i - half + 1; j <= i + half - 1; ++j) acc += d.observed[size_t(j)];
        } else {
            for (int j = i - half; j <= i + half; ++j) acc += d.observed[size_t(j)];
        }
        d.trend[size_t(i)] = acc / period;
    }

    // Month-of-year means of the detrended values, recentered to sum to zero.
    std::array<double, 12> sums{};
    std::array<int, 12> counts{};
    for (int i = 0; i < n; ++i) {
        if (!d.trend[size_t(i)]) continue;
        int m = (s.start.month - 1 + i) % 12;
        sums[size_t(m)] += d.observed[size_t(i)] - *d.trend[size_t(i)];
        ++counts[size_t(m)];
    }
    std::array<double, 12> by_month{};
    for (int m = 0; m < 12; ++m) by_month[size_t(m)] = counts[size_t(m)] ? sums[size_t(m)] / counts[size_t(m)] : 0.0;
    double mean = 0.0;
    for (double v : by_month) mean += v;
    mean /= 12.0;
    for (double& v : by_month) v -= mean;
    double rem = 0.0;
    for (double v : by_month) rem += v;
    by_month[11] -= rem;  // pin the floating-point remainder so 12-month sums are exactly zero

    d.seasonal.resize(size_t(n));
    d.residual.assign(size_t(n), std::nullopt);
    for (int i = 0; i < n; ++i) {
        int m = (s.start.month - 1 + i) % 12;
        d.seasonal[size_t(i)] = by_month[size_t(m)];
        if (d.trend[size_t(i)])
            d.residual[size_t(i)] =
                d.observed[size_t(i)] - (*d.trend[size_t(i)] + d.seasonal[size_t(i)]);
    }
    return d;
}

void write_decomposition_csv(const std::string& path, const Decomposition& d) {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < d.observed.size(); ++i) {
        int total = (d.start.month - 1) + int(i);
        YearMonth ym{d.start.year + total / 12, total % 12 + 1};
        rows.push_back({std::to_string(ym.year), std::to_string(ym.month),
                        format_double(d.observed[i]),
                        d.trend[i] ? format_double(*d.trend[i]) : "",
                        format_double(d.seasonal[i]),
                        d.residual[i] ? format_double(*d.residual[i]) : ""});
    }
    write_csv(path, {"year", "month", "observed", "trend", "seasonal", "residual"}, rows);
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::All: return "all";
        case Scenario::Drop2022: return "drop_2022";
        case Scenario::Drop2022AndPreJun2017: return "drop_2022_and_pre_jun2017";
    }
    return "?";
}

Scenario parse_scenario(std::string_view s) {
    if (s == "all") return Scenario::All;
    if (s == "drop_2022") return Scenario::Drop2022;
    if (s == "drop_2022_and_pre_jun2017") return Scenario::Drop2022AndPreJun2017;
    throw ConfigError("unknown scenario '" + std::string(s) +
                      "' (expected all, drop_2022 or drop_2022_and_pre_jun2017)");
}

namespace {

constexpr int kParams = 13;  // intercept + slope + 11 month dummies

bool scenario_keeps(Scenario sc, YearMonth ym) {
    if (sc != Scenario::All && ym.year == 2022) return false;
    if (sc == Scenario::Drop2022AndPreJun2017 && (YearMonth{2017, 6} > ym)) return false;
    return true;
}

// Householder QR least squares. X is row-major n x p. Returns beta and fills
// r_inv (p x p, row-major) with R^-1 for covariance computation.
std::vector<double> qr_solve(std::vector<double> X, std::vector<double> y, int n, int p,
                             std::vector<double>& r_inv) {
    auto x = [&X, p](int i, int j) -> double& { return X[size_t(i) * p + j]; };
    // Reduce X to R, applying the same reflections to y.
    for (int k = 0; k < p; ++k) {
        double norm = 0.0;
        for (int i = k; i < n; ++i) norm += x(i, k) * x(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw StatError("fit_trend: design matrix is rank deficient");
        double alpha = x(k, k) > 0 ? -norm : norm;
        double vk = x(k, k) - alpha;
        std::vector<double> v(size_t(n - k), 0.0);
        v[0] = vk;
        for (int i = k + 1; i < n; ++i) v[size_t(i - k)] = x(i, k);
        double vtv = 0.0;
        for (double w : v) vtv += w * w;
        if (vtv == 0.0) throw StatError("fit_trend: design matrix is rank deficient");
        x(k, k) = alpha;
        for (int i = k + 1; i < n; ++i) x(i, k) = 0.0;
        for (int j = k + 1; j < p; ++j) {
            double dot = 0.0;
            for (int i = k; i < n; ++i) dot += v[size_t(i - k)] * x(i, j);
            double scale = 2.0 * dot / vtv;
            for (int i = k; i < n; ++i) x(i, j) -= scale * v[size_t(i - k)];
        }
        double dot = 0.0;
        for (int i = k; i < n; ++i) dot += v[size_t(i - k)] * y[size_t(i)];
        double scale = 2.0 * dot / vtv;
        for (int i = k; i < n; ++i) y[size_t(i)] -= scale * v[size_t(i - k)];
    }
    // Rank check on R's diagonal.
    double max_diag = 0.0;
    for (int k = 0; k < p; ++k) max_diag = std::max(max_diag, std::abs(x(k, k)));
    for (int k = 0; k < p; ++k)
        if (std::abs(x(k, k)) < 1e-10 * max_diag)
            throw StatError("fit_trend: design matrix is rank deficient");
    // Back substitution for beta.
    std::vector<double> beta(size_t(p), 0.0);
    for (int i = p - 1; i >= 0; --i) {
        double acc = y[size_t(i)];
        for (int j = i + 1; j < p; ++j) acc -= x(i, j) * beta[size_t(j)];
        beta[size_t(i)] = acc / x(i, i);
    }
    // R^-1 by back substitution per unit column.
    r_inv.assign(size_t(p) * p, 0.0);
    for (int col = 0; col < p; ++col) {
        for (int i = p - 1; i >= 0; --i) {
            double acc = (i == col) ? 1.0 : 0.0;
            for (int j = i + 1; j < p; ++j) acc -= x(i, j) * r_inv[size_t(j) * p + col];
            r_inv[size_t(i) * p + col] = acc / x(i, i);
        }
    }
    return beta;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Continued fraction (modified Lentz).
    auto betacf = [](double a_, double b_, double x_) {
        const int max_iter = 300;
        const double eps = 3e-14, fpmin = 1e-300;
        double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0, d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < fpmin) d = fpmin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= max_iter; ++m) {
            int m2 = 2 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < fpmin) d = fpmin;
            c = 1.0 + aa / c;
            if (std::abs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < fpmin) d = fpmin;
            c = 1.0 + aa / c;
            if (std::abs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < eps) break;
        }
        return h;
    };
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log(1.0 - x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw StatError("student_t_two_sided_p: df must be positive");
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

TrendResult fit_trend(const MonthlySeries& s, Scenario scenario) {
    std::vector<size_t> rows;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s.missing(i)) continue;
        if (!scenario_keeps(scenario, s.month_at(i))) continue;
        rows.push_back(i);
    }
    int n = int(rows.size());
    if (n <= kParams)
        throw StatError("fit_trend: need more than " + std::to_string(kParams) + " months, have " +
                        std::to_string(n));

    std::vector<double> X(size_t(n) * kParams, 0.0);
    std::vector<double> y(size_t(n), 0.0);
    for (int r = 0; r < n; ++r) {
        size_t i = rows[size_t(r)];
        YearMonth ym = s.month_at(i);
        X[size_t(r) * kParams + 0] = 1.0;
        X[size_t(r) * kParams + 1] = double(int(i));  // calendar month index, gaps preserved
        if (ym.month >= 2) X[size_t(r) * kParams + (ym.month)] = 1.0;  // columns 2..12
        y[size_t(r)] = s.normalized(i);
    }

    std::vector<double> r_inv;
    std::vector<double> beta = qr_solve(X, y, n, kParams, r_inv);

    // Residual sum of squares from the original design.
    double rss = 0.0;
    double mean_y = 0.0;
    for (int r = 0; r < n; ++r) {
        size_t i = rows[size_t(r)];
        YearMonth ym = s.month_at(i);
        double fit = beta[0] + beta[1] * double(int(i));
        if (ym.month >= 2) fit += beta[size_t(ym.month)];
        double e = y[size_t(r)] - fit;
        rss += e * e;
        mean_y += y[size_t(r)];
    }
    mean_y /= n;

    double sigma2 = rss / double(n - kParams);
    // [(X'X)^-1]_11 = row 1 of R^-1 dotted with itself
    double cov11 = 0.0;
    for (int k = 0; k < kParams; ++k) {
        double v = r_inv[1 * kParams + size_t(k)];
        cov11 += v * v;
    }
    double stderr_slope = std::sqrt(sigma2 * cov11);

    TrendResult out;
    out.scenario = scenario;
    out.slope = beta[1];
    out.intercept = beta[0];
    for (int m = 2; m <= 12; ++m) out.monthly_coefficients[size_t(m - 2)] = beta[size_t(m)];
    out.slope_stderr = stderr_slope;
    if (stderr_slope == 0.0)
        out.p_value = out.slope == 0.0 ? 1.0 : 0.0;
    else
        out.p_value = student_t_two_sided_p(out.slope / stderr_slope, double(n - kParams));
    out.annual_pct = mean_y != 0.0 ? 100.0 * 12.0 * out.slope / mean_y : 0.0;
    out.n_months = n;
    out.mean_normalized = mean_y;
    out.fitted_indices = std::move(rows);
    return out;
}

void write_trend_report_csv(const std::string& path, const std::vector<TrendResult>& results) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(results.size());
    for (const auto& r : results)
        rows.push_back({scenario_name(r.scenario), format_double(r.slope),
                        format_double(r.slope_stderr), format_double(r.p_value),
                        format_double(r.annual_pct), std::to_string(r.n_months)});
    write_csv(path, {"scenario", "slope", "stderr", "p_value", "annual_pct", "n_months"}, rows);
}

const char* trend_class_name(TrendClass c) {
    switch (c) {
        case TrendClass::LargeIncrease: return "large_increase";
        case TrendClass::ModerateIncrease: return "moderate_increase";
        case TrendClass::ModerateDecrease: return "moderate_decrease";
        case TrendClass::LargeDecrease: return "large_decrease";
        case TrendClass::Filtered: return "filtered";
    }
    return "?";
}

double tile_area_hectares(int tile_lat, double tile_deg) {
    constexpr double kEarthRadiusM = 6371008.8;
    constexpr double kPi = 3.14159265358979323846;
    double lat0 = tile_lat * tile_deg * kPi / 180.0;
    double lat1 = (tile_lat + 1) * tile_deg * kPi / 180.0;
    double dlon = tile_deg * kPi / 180.0;
    double area_m2 = kEarthRadiusM * kEarthRadiusM * dlon * std::abs(std::sin(lat1) - std::sin(lat0));
    return area_m2 / 1e4;
}

namespace {

// Fraction of non-permanent-water pixels whose centers fall in the tile.
double land_fraction(const Raster& cover, double lon0, double lat0, double tile_deg) {
    int64_t total = 0, land = 0;
    for (int64_t row = 0; row < cover.height(); ++row) {
        for (int64_t col = 0; col < cover.width(); ++col) {
            auto [x, y] = cover.transform().pixel_center(row, col);
            if (x < lon0 || x >= lon0 + tile_deg || y < lat0 || y >= lat0 + tile_deg) continue;
            double v = cover.at(row, col);
            if (cover.is_nodata(v)) continue;
            ++total;
            if (int(v) != landcover::kPermanentWater) ++land;
        }
    }
    return total > 0 ? double(land) / double(total) : 1.0;
}

}  // namespace

std::vector<TileTrend> tile_trends(const std::vector<DetectionRecord>& records,
                                   const std::vector<ObservationEvent>& observations,
                                   const TileTrendConfig& cfg) {
    if (cfg.tile_deg <= 0) throw ConfigError("tile_deg must be positive");
    std::map<std::pair<int, int>, std::vector<DetectionRecord>> by_tile;
    for (const auto& r : records) {
        int tx = int(std::floor(r.lon / cfg.tile_deg));
        int ty = int(std::floor(r.lat / cfg.tile_deg));
        by_tile[{tx, ty}].push_back(r);
    }
    std::vector<TileTrend> out;
    for (auto& [key, tile_records] : by_tile) {
        TileTrend t;
        t.tile_lon = key.first;
        t.tile_lat = key.second;
        t.magnitude_class = TrendClass::Filtered;
        try {
            MonthlySeries s =
                build_series(tile_records, observations, cfg.area_ha_per_detection);
            TrendResult fit = fit_trend(s, Scenario::All);
            t.slope = fit.slope;
            t.p_value = fit.p_value;
            double area_ha = tile_area_hectares(t.tile_lat, cfg.tile_deg);
            if (cfg.land_cover) {
                area_ha *= land_fraction(*cfg.land_cover, t.tile_lon * cfg.tile_deg,
                                         t.tile_lat * cfg.tile_deg, cfg.tile_deg);
                t.full_tile_area = false;
            }
            double months = cfg.net_change_over_period ? double(fit.n_months) : 1.0;
            double net_pct = area_ha > 0.0 ? 100.0 * fit.slope * months / area_ha : 0.0;
            if (fit.p_value <= cfg.p_cutoff && std::abs(net_pct) >= cfg.moderate_band_pct) {
                bool large = std::abs(net_pct) >= cfg.large_band_pct;
                if (net_pct > 0)
                    t.magnitude_class = large ? TrendClass::LargeIncrease : TrendClass::ModerateIncrease;
                else
                    t.magnitude_class = large ? TrendClass::LargeDecrease : TrendClass::ModerateDecrease;
            }
        } catch (const StatError&) {
            // insufficient data in this tile: stays filtered
        }
        out.push_back(t);
    }
    return out;
}

void write_tile_trends_csv(const std::string& path, const std::vector<TileTrend>& tiles,
                           double tile_deg) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(tiles.size());
    for (const auto& t : tiles)
        rows.push_back({format_double(t.tile_lon * tile_deg), format_double(t.tile_lat * tile_deg),
                        format_double(t.slope), format_double(t.p_value),
                        trend_class_name(t.magnitude_class)});
    write_csv(path, {"tile_lon", "tile_lat", "slope", "p_value", "class"}, rows);
}

}  // namespace floodsar
