#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floodsar/errors.hpp"

namespace floodsar {

enum class DType : uint8_t { Byte = 0, Int16 = 1, Float32 = 2 };

size_t dtype_size(DType t);
const char* dtype_name(DType t);

// Affine grid georeference: top-left corner origin, north-up, square-ish
// pixels. pixel_height is positive and applied downward (row 0 is the
// northernmost). CRS is carried as a bare EPSG code; operations that mix
// grids refuse mismatched codes rather than reprojecting.
struct GeoTransform {
    double x_origin = 0.0;
    double y_origin = 0.0;
    double pixel_width = 1.0;   // CRS units per pixel, > 0
    double pixel_height = 1.0;  // CRS units per pixel, > 0, applied downward
    uint32_t crs_code = 0;      // EPSG identifier

    // World coordinates of the center of pixel (row, col).
    std::pair<double, double> pixel_center(int64_t row, int64_t col) const {
        return {x_origin + (double(col) + 0.5) * pixel_width,
                y_origin - (double(row) + 0.5) * pixel_height};
    }
    // (row, col) of the pixel containing the world point; may lie out of bounds.
    std::pair<int64_t, int64_t> world_to_pixel(double x, double y) const;

    bool operator==(const GeoTransform&) const = default;
};

// EPSG codes this library treats as degree-based (no metric pixel area).
bool crs_is_geographic(uint32_t epsg);

// Rectangular window into a raster, in pixel coordinates.
struct TileWindow {
    int64_t col_off = 0;
    int64_t row_off = 0;
    int64_t width = 0;
    int64_t height = 0;

    bool operator==(const TileWindow&) const = default;
};

// Single-band georeferenced grid. Values are held as doubles regardless of
// the storage dtype; byte, int16 and float32 all widen to double and narrow
// back without loss, so file round-trips stay bit-exact.
class Raster {
public:
    Raster() = default;
    Raster(int64_t width, int64_t height, GeoTransform transform, DType dtype,
           std::optional<double> nodata = std::nullopt, double fill = 0.0);

    int64_t width() const { return width_; }
    int64_t height() const { return height_; }
    int64_t size() const { return width_ * height_; }
    const GeoTransform& transform() const { return transform_; }
    DType dtype() const { return dtype_; }
    const std::optional<double>& nodata() const { return nodata_; }
    void set_nodata(std::optional<double> v) { nodata_ = v; }

    double at(int64_t row, int64_t col) const { return pixels_[row * width_ + col]; }
    void set(int64_t row, int64_t col, double v) { pixels_[row * width_ + col] = v; }
    double at_index(int64_t i) const { return pixels_[i]; }
    void set_index(int64_t i, double v) { pixels_[i] = v; }

    bool is_nodata(double v) const { return nodata_ && v == *nodata_; }
    bool is_nodata_at(int64_t row, int64_t col) const { return is_nodata(at(row, col)); }
    // Value of the declared nodata, or `fallback` when none is declared.
    double nodata_or(double fallback) const { return nodata_ ? *nodata_ : fallback; }

    std::vector<double>& pixels() { return pixels_; }
    const std::vector<double>& pixels() const { return pixels_; }

    bool in_bounds(int64_t row, int64_t col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    // Same size, transform and CRS. Dtype and nodata may differ.
    bool same_grid(const Raster& other) const {
        return width_ == other.width_ && height_ == other.height_ && transform_ == other.transform_;
    }

    // Count of pixels equal to 1 (the positive value of binary rasters).
    int64_t count_positive() const;

    bool operator==(const Raster&) const = default;

private:
    int64_t width_ = 0;
    int64_t height_ = 0;
    GeoTransform transform_;
    DType dtype_ = DType::Float32;
    std::optional<double> nodata_;
    std::vector<double> pixels_;
};

void require_same_grid(const Raster& a, const Raster& b, const char* what);

// --- FLR1 container --------------------------------------------------------
//
// Fixed little-endian layout, 58-byte header then the row-major payload:
//   "FLR1" | u32 width | u32 height | f64 x_origin | f64 y_origin
//   | f64 pixel_width | f64 pixel_height | u32 crs_code | u8 dtype
//   | u8 nodata_flag | f64 nodata_value | payload
// nodata_value must be 0 when nodata_flag is 0, so every readable file has a
// single canonical byte form and read/write round-trips are exact.

inline constexpr size_t kFlr1HeaderSize = 58;

Raster read_raster(const std::string& path);
void write_raster(const Raster& r, const std::string& path);

// In-memory codec used by the file functions; exposed for tests and digests.
std::vector<uint8_t> encode_raster(const Raster& r);
Raster decode_raster(const uint8_t* data, size_t size, const std::string& origin);

// Partition into tile_size x tile_size windows, row-major, edges clipped.
std::vector<TileWindow> tile(const Raster& r, int64_t tile_size);
std::vector<TileWindow> tile_extent(int64_t width, int64_t height, int64_t tile_size);

// Nearest-neighbor resample onto the target grid: each target pixel takes the
// value of the source pixel containing its center, nodata when the center
// falls outside the source. Source and target must share a CRS.
Raster resample_nearest(const Raster& src, const GeoTransform& target, int64_t target_width,
                        int64_t target_height);

// Pixel area in hectares; throws for degree-based CRS codes.
double pixel_area_hectares(const GeoTransform& t);

// Even-odd (ray casting) containment test against a closed ring.
bool point_in_ring(double x, double y, const std::vector<std::pair<double, double>>& ring);

}  // namespace floodsar
