#include "floodsar/raster.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace floodsar {

size_t dtype_size(DType t) {
    switch (t) {
        case DType::Byte: return 1;
        case DType::Int16: return 2;
        case DType::Float32: return 4;
    }
    throw Error("unknown dtype");
}

const char* dtype_name(DType t) {
    switch (t) {
        case DType::Byte: return "byte";
        case DType::Int16: return "int16";
        case DType::Float32: return "float32";
    }
    return "?";
}

std::pair<int64_t, int64_t> GeoTransform::world_to_pixel(double x, double y) const {
    int64_t col = int64_t(std::floor((x - x_origin) / pixel_width));
    int64_t row = int64_t(std::floor((y_origin - y) / pixel_height));
    return {row, col};
}

bool crs_is_geographic(uint32_t epsg) {
    switch (epsg) {
        case 4326:  // WGS 84
        case 4269:  // NAD83
        case 4258:  // ETRS89
        case 4674:  // SIRGAS 2000
        case 4283:  // GDA94
            return true;
        default:
            return false;
    }
}

Raster::Raster(int64_t width, int64_t height, GeoTransform transform, DType dtype,
               std::optional<double> nodata, double fill)
    : width_(width),
      height_(height),
      transform_(transform),
      dtype_(dtype),
      nodata_(nodata),
      pixels_(size_t(width) * size_t(height), fill) {
    if (width < 1 || height < 1) throw Error("raster dimensions must be positive");
    if (transform.pixel_width <= 0 || transform.pixel_height <= 0)
        throw Error("pixel sizes must be positive");
}

int64_t Raster::count_positive() const {
    int64_t n = 0;
    for (double v : pixels_)
        if (v == 1.0) ++n;
    return n;
}

void require_same_grid(const Raster& a, const Raster& b, const char* what) {
    if (!a.same_grid(b))
        throw GridMismatchError(std::string(what) + ": rasters are not on the same grid (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
}

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 24));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t(bits >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

double get_f64(const uint8_t* p) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= uint64_t(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

bool value_fits(DType t, double v) {
    switch (t) {
        case DType::Byte: return v >= 0 && v <= 255 && v == std::floor(v);
        case DType::Int16: return v >= -32768 && v <= 32767 && v == std::floor(v);
        case DType::Float32:
            return std::isfinite(v) && std::abs(v) <= double(std::numeric_limits<float>::max());
    }
    return false;
}

}  // namespace

std::vector<uint8_t> encode_raster(const Raster& r) {
    if (r.width() < 1 || r.height() < 1) throw Error("cannot encode an empty raster");
    if (r.width() > 0xFFFFFFFFll || r.height() > 0xFFFFFFFFll)
        throw Error("raster too large for FLR1");
    std::vector<uint8_t> out;
    out.reserve(kFlr1HeaderSize + size_t(r.size()) * dtype_size(r.dtype()));
    for (char c : {'F', 'L', 'R', '1'}) out.push_back(uint8_t(c));
    put_u32(out, uint32_t(r.width()));
    put_u32(out, uint32_t(r.height()));
    put_f64(out, r.transform().x_origin);
    put_f64(out, r.transform().y_origin);
    put_f64(out, r.transform().pixel_width);
    put_f64(out, r.transform().pixel_height);
    put_u32(out, r.transform().crs_code);
    out.push_back(uint8_t(r.dtype()));
    out.push_back(r.nodata() ? 1 : 0);
    put_f64(out, r.nodata() ? *r.nodata() : 0.0);

    if (r.nodata() && !value_fits(r.dtype(), *r.nodata()))
        throw Error("nodata value " + std::to_string(*r.nodata()) + " not representable as " +
                    dtype_name(r.dtype()));
    for (int64_t i = 0; i < r.size(); ++i) {
        double v = r.at_index(i);
        if (!value_fits(r.dtype(), v))
            throw Error("pixel " + std::to_string(i) + " value " + std::to_string(v) +
                        " not representable as " + dtype_name(r.dtype()));
        switch (r.dtype()) {
            case DType::Byte:
                out.push_back(uint8_t(v));
                break;
            case DType::Int16: {
                auto s = int16_t(v);
                out.push_back(uint8_t(uint16_t(s)));
                out.push_back(uint8_t(uint16_t(s) >> 8));
                break;
            }
            case DType::Float32: {
                auto f = float(v);
                uint32_t bits;
                std::memcpy(&bits, &f, 4);
                put_u32(out, bits);
                break;
            }
        }
    }
    return out;
}

Raster decode_raster(const uint8_t* data, size_t size, const std::string& origin) {
    if (size < 4 || std::memcmp(data, "FLR1", 4) != 0)
        throw FormatError(origin + ": missing FLR1 magic at byte offset 0");
    if (size < kFlr1HeaderSize)
        throw TruncationError(origin + ": truncated header, need " + std::to_string(kFlr1HeaderSize) +
                              " bytes, found " + std::to_string(size));
    uint32_t width = get_u32(data + 4);
    uint32_t height = get_u32(data + 8);
    GeoTransform t;
    t.x_origin = get_f64(data + 12);
    t.y_origin = get_f64(data + 20);
    t.pixel_width = get_f64(data + 28);
    t.pixel_height = get_f64(data + 36);
    t.crs_code = get_u32(data + 44);
    uint8_t dtype_byte = data[48];
    uint8_t nodata_flag = data[49];
    double nodata_value = get_f64(data + 50);

    if (width == 0 || height == 0)
        throw FormatError(origin + ": zero raster dimension at byte offset 4");
    if (!(t.pixel_width > 0) || !(t.pixel_height > 0))
        throw FormatError(origin + ": non-positive pixel size at byte offset 28");
    if (dtype_byte > 2)
        throw FormatError(origin + ": unknown dtype " + std::to_string(dtype_byte) +
                          " at byte offset 48");
    if (nodata_flag > 1)
        throw FormatError(origin + ": nodata flag must be 0 or 1 at byte offset 49");
    if (nodata_flag == 0 && nodata_value != 0.0)
        throw FormatError(origin + ": nodata value must be zero when unset, at byte offset 50");
    DType dtype = DType(dtype_byte);

    uint64_t count = uint64_t(width) * uint64_t(height);
    uint64_t expected = kFlr1HeaderSize + count * dtype_size(dtype);
    if (size < expected)
        throw TruncationError(origin + ": truncated payload, need " + std::to_string(expected) +
                              " bytes, found " + std::to_string(size));
    if (size > expected)
        throw FormatError(origin + ": " + std::to_string(size - expected) +
                          " trailing bytes after payload");

    std::optional<double> nodata;
    if (nodata_flag) nodata = nodata_value;
    Raster r(width, height, t, dtype, nodata);
    const uint8_t* p = data + kFlr1HeaderSize;
    for (uint64_t i = 0; i < count; ++i) {
        switch (dtype) {
            case DType::Byte:
                r.set_index(int64_t(i), double(p[i]));
                break;
            case DType::Int16: {
                auto u = uint16_t(p[2 * i]) | uint16_t(p[2 * i + 1]) << 8;
                r.set_index(int64_t(i), double(int16_t(u)));
                break;
            }
            case DType::Float32: {
                uint32_t bits = get_u32(p + 4 * i);
                float f;
                std::memcpy(&f, &bits, 4);
                r.set_index(int64_t(i), double(f));
                break;
            }
        }
    }
    return r;
}

Raster read_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_raster(bytes.data(), bytes.size(), path);
}

void write_raster(const Raster& r, const std::string& path) {
    auto bytes = encode_raster(r);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::vector<TileWindow> tile_extent(int64_t width, int64_t height, int64_t tile_size) {
    if (tile_size < 1) throw Error("tile_size must be >= 1");
    std::vector<TileWindow> out;
    for (int64_t row = 0; row < height; row += tile_size)
        for (int64_t col = 0; col < width; col += tile_size)
            out.push_back({col, row, std::min(tile_size, width - col), std::min(tile_size, height - row)});
    return out;
}

std::vector<TileWindow> tile(const Raster& r, int64_t tile_size) {
    return tile_extent(r.width(), r.height(), tile_size);
}

Raster resample_nearest(const Raster& src, const GeoTransform& target, int64_t target_width,
                        int64_t target_height) {
    if (src.transform().crs_code != target.crs_code)
        throw GridMismatchError("resample_nearest: CRS mismatch (EPSG:" +
                                std::to_string(src.transform().crs_code) + " vs EPSG:" +
                                std::to_string(target.crs_code) + ")");
    // Out-of-bounds targets need a nodata marker even when the source has none.
    std::optional<double> nodata = src.nodata();
    auto fallback_nodata = [&]() -> double {
        switch (src.dtype()) {
            case DType::Byte: return 255.0;
            case DType::Int16: return -32768.0;
            case DType::Float32: return -(double)std::numeric_limits<float>::max();
        }
        return 0.0;
    };

    Raster out(target_width, target_height, target, src.dtype(), nodata);
    bool used_fallback = false;
    for (int64_t row = 0; row < target_height; ++row) {
        for (int64_t col = 0; col < target_width; ++col) {
            auto [x, y] = target.pixel_center(row, col);
            auto [srow, scol] = src.transform().world_to_pixel(x, y);
            if (src.in_bounds(srow, scol)) {
                out.set(row, col, src.at(srow, scol));
            } else {
                if (!nodata) {
                    nodata = fallback_nodata();
                    used_fallback = true;
                }
                out.set(row, col, *nodata);
            }
        }
    }
    if (used_fallback) out.set_nodata(nodata);
    return out;
}

double pixel_area_hectares(const GeoTransform& t) {
    if (crs_is_geographic(t.crs_code))
        throw Error("pixel_area_hectares: EPSG:" + std::to_string(t.crs_code) +
                    " is degree-based; reproject to a metric CRS first");
    return t.pixel_width * t.pixel_height / 10000.0;
}

bool point_in_ring(double x, double y, const std::vector<std::pair<double, double>>& ring) {
    bool inside = false;
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        auto [xi, yi] = ring[i];
        auto [xj, yj] = ring[j];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

}  // namespace floodsar
