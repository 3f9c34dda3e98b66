#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "floodsar/scene.hpp"

namespace floodsar {

// Deterministic reference classifier over the four features.
struct RuleConfig {
    double min_delta_db = 3.0;              // minimum |delta| to count a change as flooding
    bool require_both_polarizations = false;  // AND instead of OR across polarizations
};

struct FloodCandidateMask {
    Raster mask;                        // byte, {0,1,nodata}
    std::optional<Raster> probability;  // float in [0,1], present for network inference
};

FloodCandidateMask classify_rule(const FeatureStack& f, const RuleConfig& cfg = {});

// --- Convolutional inference engine -----------------------------------------
//
// Forward-only engine for externally trained early-fusion weights. Supports
// the primitives a MobileNet-style head needs: standard and depthwise 2-D
// convolution (zero padding, cross-correlation), relu, sigmoid. Batch norm is
// assumed folded into the weights upstream.

struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;  // [c][y][x] row-major

    Tensor() = default;
    Tensor(int c, int h, int w) : channels(c), height(h), width(w), data(size_t(c) * h * w, 0.0f) {}
    float at(int c, int y, int x) const { return data[(size_t(c) * height + y) * width + x]; }
    void set(int c, int y, int x, float v) { data[(size_t(c) * height + y) * width + x] = v; }
};

struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 1;   // odd
    int stride = 1;
    int padding = 0;
    bool depthwise = false;  // requires in_channels == out_channels

    // Bound parameters: kernel tensor out x in x k x k row-major (in = 1 for
    // depthwise), then one bias per output channel.
    std::vector<float> weights;
    std::vector<float> bias;

    size_t parameter_count() const {
        size_t per_filter = size_t(depthwise ? 1 : in_channels) * kernel * kernel;
        return size_t(out_channels) * per_filter + size_t(out_channels);
    }
};

enum class Activation { Relu, Sigmoid };

using Layer = std::variant<ConvLayer, Activation>;

class Network {
public:
    Network() = default;
    explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) {}

    const std::vector<Layer>& layers() const { return layers_; }

    // Channel count expected on the input tensor (first conv's in_channels).
    int input_channels() const;
    int output_channels() const;
    size_t parameter_count() const;
    bool bound() const;

    // True when every conv has stride 1 and padding (k-1)/2, so output pixels
    // align one-to-one with input pixels.
    bool resolution_preserving() const;
    // Receptive-field radius for seam-free tiled evaluation.
    int receptive_halo() const;

    // Structural checks for pipeline use: layers present, channel counts
    // chain, final layer is a sigmoid over one channel.
    void validate_spec() const;

    Tensor forward(const Tensor& input) const;

private:
    std::vector<Layer> layers_;
};

// Line-oriented spec: `conv IN OUT KERNEL STRIDE PADDING depthwise=BOOL`,
// `relu`, `sigmoid`. Blank lines and '#' comments ignored.
Network parse_net_spec_text(const std::string& text, const std::string& origin);
Network parse_net_spec(const std::string& path);

// Binds a raw little-endian float32 weight file to the spec. The payload
// length must equal the spec's parameter count exactly.
Network load_weights(const std::string& spec_path, const std::string& weights_path);
void bind_weights(Network& net, const std::vector<float>& values, const std::string& origin);
std::vector<float> read_weight_file(const std::string& path);

// Runs the bound network over the feature stack (channel order:
// change_to_water_vv, change_to_water_vh, delta_vv, delta_vh; nodata fed as
// zero). tile_size 0 evaluates in one pass; otherwise tiles are evaluated
// with a receptive-field halo, which is exactly equivalent. Pixels with no
// valid data in any feature plane come out nodata.
FloodCandidateMask infer(const Network& net, const FeatureStack& f, double threshold = 0.5,
                         int64_t tile_size = 0, int jobs = 1);

struct SweepRow {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Confusion-based scores of `probability >= threshold` against a binary
// truth raster, one row per requested threshold.
std::vector<SweepRow> decision_threshold_sweep(const Raster& probability, const Raster& truth,
                                               const std::vector<double>& thresholds);

}  // namespace floodsar
