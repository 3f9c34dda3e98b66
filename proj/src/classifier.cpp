#include "floodsar/classifier.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "floodsar/csv.hpp"
#include "floodsar/metrics.hpp"
#include "floodsar/parallel.hpp"

namespace floodsar {

FloodCandidateMask classify_rule(const FeatureStack& f, const RuleConfig& cfg) {
    if (cfg.min_delta_db < 0) throw ConfigError("min_delta_db must be >= 0");
    const Raster& cvv = f.change_to_water_vv;
    const Raster& cvh = f.change_to_water_vh;
    const Raster& dvv = f.delta_vv;
    const Raster& dvh = f.delta_vh;
    require_same_grid(cvv, cvh, "feature stack");
    require_same_grid(cvv, dvv, "feature stack");
    require_same_grid(cvv, dvh, "feature stack");

    Raster mask(cvv.width(), cvv.height(), cvv.transform(), DType::Byte, kMaskNoData);
    for (int64_t i = 0; i < cvv.size(); ++i) {
        bool vv_valid = !cvv.is_nodata(cvv.at_index(i)) && !dvv.is_nodata(dvv.at_index(i));
        bool vh_valid = !cvh.is_nodata(cvh.at_index(i)) && !dvh.is_nodata(dvh.at_index(i));
        if (!vv_valid && !vh_valid) {
            mask.set_index(i, kMaskNoData);
            continue;
        }
        // A nodata polarization plane makes its clause false, never nodata.
        bool vv_hit = vv_valid && cvv.at_index(i) == 1.0 && std::abs(dvv.at_index(i)) >= cfg.min_delta_db;
        bool vh_hit = vh_valid && cvh.at_index(i) == 1.0 && std::abs(dvh.at_index(i)) >= cfg.min_delta_db;
        bool hit = cfg.require_both_polarizations ? (vv_hit && vh_hit) : (vv_hit || vh_hit);
        mask.set_index(i, hit ? 1.0 : 0.0);
    }
    return {std::move(mask), std::nullopt};
}

// --- Network ----------------------------------------------------------------

int Network::input_channels() const {
    for (const auto& l : layers_)
        if (const auto* c = std::get_if<ConvLayer>(&l)) return c->in_channels;
    return 0;
}

int Network::output_channels() const {
    int ch = input_channels();
    for (const auto& l : layers_)
        if (const auto* c = std::get_if<ConvLayer>(&l)) ch = c->out_channels;
    return ch;
}

size_t Network::parameter_count() const {
    size_t n = 0;
    for (const auto& l : layers_)
        if (const auto* c = std::get_if<ConvLayer>(&l)) n += c->parameter_count();
    return n;
}

bool Network::bound() const {
    for (const auto& l : layers_) {
        if (const auto* c = std::get_if<ConvLayer>(&l)) {
            size_t per_filter = size_t(c->depthwise ? 1 : c->in_channels) * c->kernel * c->kernel;
            if (c->weights.size() != size_t(c->out_channels) * per_filter) return false;
            if (c->bias.size() != size_t(c->out_channels)) return false;
        }
    }
    return !layers_.empty();
}

bool Network::resolution_preserving() const {
    for (const auto& l : layers_)
        if (const auto* c = std::get_if<ConvLayer>(&l))
            if (c->stride != 1 || c->padding != (c->kernel - 1) / 2) return false;
    return true;
}

int Network::receptive_halo() const {
    int halo = 0;
    for (const auto& l : layers_)
        if (const auto* c = std::get_if<ConvLayer>(&l)) halo += (c->kernel - 1) / 2;
    return halo;
}

void Network::validate_spec() const {
    if (layers_.empty()) throw ConfigError("network spec is empty: no sigmoid head");
    int ch = -1;
    for (const auto& l : layers_) {
        if (const auto* c = std::get_if<ConvLayer>(&l)) {
            if (c->kernel < 1 || c->kernel % 2 == 0)
                throw ConfigError("conv kernel must be odd and positive, got " + std::to_string(c->kernel));
            if (c->stride < 1) throw ConfigError("conv stride must be >= 1");
            if (c->padding < 0) throw ConfigError("conv padding must be >= 0");
            if (c->in_channels < 1 || c->out_channels < 1)
                throw ConfigError("conv channel counts must be positive");
            if (c->depthwise && c->in_channels != c->out_channels)
                throw ConfigError("depthwise conv requires in_channels == out_channels");
            if (ch >= 0 && c->in_channels != ch)
                throw ConfigError("conv expects " + std::to_string(c->in_channels) +
                                  " input channels but the previous layer produces " + std::to_string(ch));
            ch = c->out_channels;
        }
    }
    if (!std::holds_alternative<Activation>(layers_.back()) ||
        std::get<Activation>(layers_.back()) != Activation::Sigmoid)
        throw ConfigError("network must end with a sigmoid head");
    if (output_channels() != 1)
        throw ConfigError("network must produce exactly 1 output channel, got " +
                          std::to_string(output_channels()));
}

namespace {

Tensor conv_apply(const Tensor& in, const ConvLayer& c) {
    if (in.channels != c.in_channels)
        throw ConfigError("conv expects " + std::to_string(c.in_channels) + " channels, tensor has " +
                          std::to_string(in.channels));
    int oh = (in.height + 2 * c.padding - c.kernel) / c.stride + 1;
    int ow = (in.width + 2 * c.padding - c.kernel) / c.stride + 1;
    if (oh < 1 || ow < 1)
        throw ConfigError("conv output would be empty (" + std::to_string(oh) + "x" + std::to_string(ow) + ")");
    Tensor out(c.out_channels, oh, ow);
    size_t per_in = size_t(c.kernel) * c.kernel;
    size_t per_out = (c.depthwise ? 1 : size_t(c.in_channels)) * per_in;
    for (int oc = 0; oc < c.out_channels; ++oc) {
        const float* wbase = c.weights.data() + size_t(oc) * per_out;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = c.bias[size_t(oc)];
                int ic_begin = c.depthwise ? oc : 0;
                int ic_end = c.depthwise ? oc + 1 : c.in_channels;
                for (int ic = ic_begin; ic < ic_end; ++ic) {
                    const float* w = wbase + size_t(c.depthwise ? 0 : ic - ic_begin) * per_in;
                    for (int ky = 0; ky < c.kernel; ++ky) {
                        int iy = oy * c.stride - c.padding + ky;
                        if (iy < 0 || iy >= in.height) continue;  // zero padding
                        for (int kx = 0; kx < c.kernel; ++kx) {
                            int ix = ox * c.stride - c.padding + kx;
                            if (ix < 0 || ix >= in.width) continue;
                            acc += double(w[ky * c.kernel + kx]) * double(in.at(ic, iy, ix));
                        }
                    }
                }
                out.set(oc, oy, ox, float(acc));
            }
        }
    }
    return out;
}

void apply_activation(Tensor& t, Activation a) {
    if (a == Activation::Relu) {
        for (float& v : t.data) v = v > 0.0f ? v : 0.0f;
    } else {
        for (float& v : t.data) v = float(1.0 / (1.0 + std::exp(-double(v))));
    }
}

}  // namespace

Tensor Network::forward(const Tensor& input) const {
    if (!bound()) throw ConfigError("network has unbound parameters");
    Tensor cur = input;
    for (const auto& l : layers_) {
        if (const auto* c = std::get_if<ConvLayer>(&l))
            cur = conv_apply(cur, *c);
        else
            apply_activation(cur, std::get<Activation>(l));
    }
    return cur;
}

Network parse_net_spec_text(const std::string& text, const std::string& origin) {
    std::vector<Layer> layers;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        auto fail = [&](const std::string& msg) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (tok == "relu") {
            layers.emplace_back(Activation::Relu);
        } else if (tok == "sigmoid") {
            layers.emplace_back(Activation::Sigmoid);
        } else if (tok == "conv") {
            ConvLayer c;
            std::string dw;
            if (!(ls >> c.in_channels >> c.out_channels >> c.kernel >> c.stride >> c.padding >> dw))
                fail("expected 'conv IN OUT KERNEL STRIDE PADDING depthwise=BOOL'");
            if (dw == "depthwise=true")
                c.depthwise = true;
            else if (dw == "depthwise=false")
                c.depthwise = false;
            else
                fail("expected depthwise=true or depthwise=false, got '" + dw + "'");
            layers.emplace_back(std::move(c));
        } else {
            fail("unknown layer '" + tok + "'");
        }
        std::string extra;
        if (ls >> extra) throw ConfigError(origin + ":" + std::to_string(lineno) +
                                           ": trailing token '" + extra + "'");
    }
    Network net(std::move(layers));
    net.validate_spec();
    return net;
}

Network parse_net_spec(const std::string& path) {
    return parse_net_spec_text(read_file_bytes(path), path);
}

std::vector<float> read_weight_file(const std::string& path) {
    std::string bytes = read_file_bytes(path);
    if (bytes.size() % 4 != 0)
        throw FormatError(path + ": weight file length " + std::to_string(bytes.size()) +
                          " is not a multiple of 4");
    std::vector<float> out(bytes.size() / 4);
    for (size_t i = 0; i < out.size(); ++i) {
        uint32_t bits = uint32_t(uint8_t(bytes[4 * i])) | uint32_t(uint8_t(bytes[4 * i + 1])) << 8 |
                        uint32_t(uint8_t(bytes[4 * i + 2])) << 16 |
                        uint32_t(uint8_t(bytes[4 * i + 3])) << 24;
        std::memcpy(&out[i], &bits, 4);
    }
    return out;
}

void bind_weights(Network& net, const std::vector<float>& values, const std::string& origin) {
    size_t expected = net.parameter_count();
    if (values.size() != expected)
        throw ConfigError(origin + ": expected " + std::to_string(expected) +
                          " float32 parameters, found " + std::to_string(values.size()));
    size_t pos = 0;
    std::vector<Layer> bound = net.layers();
    for (auto& l : bound) {
        if (auto* c = std::get_if<ConvLayer>(&l)) {
            size_t nw = c->parameter_count() - size_t(c->out_channels);
            c->weights.assign(values.begin() + pos, values.begin() + pos + nw);
            pos += nw;
            c->bias.assign(values.begin() + pos, values.begin() + pos + size_t(c->out_channels));
            pos += size_t(c->out_channels);
        }
    }
    net = Network(std::move(bound));
}

Network load_weights(const std::string& spec_path, const std::string& weights_path) {
    Network net = parse_net_spec(spec_path);
    bind_weights(net, read_weight_file(weights_path), weights_path);
    return net;
}

namespace {

float feature_value(const Raster& r, int64_t row, int64_t col) {
    double v = r.at(row, col);
    return r.is_nodata(v) ? 0.0f : float(v);
}

}  // namespace

FloodCandidateMask infer(const Network& net, const FeatureStack& f, double threshold,
                         int64_t tile_size, int jobs) {
    net.validate_spec();
    if (!net.bound()) throw ConfigError("network has unbound parameters");
    if (net.input_channels() != 4)
        throw ConfigError("feature stack has 4 channels but the network expects " +
                          std::to_string(net.input_channels()));
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("decision threshold must be in (0,1)");
    if (!net.resolution_preserving())
        throw ConfigError("pipeline inference requires stride-1, same-padding convolutions");

    const Raster* planes[4] = {&f.change_to_water_vv, &f.change_to_water_vh, &f.delta_vv, &f.delta_vh};
    for (const Raster* p : planes) require_same_grid(*planes[0], *p, "feature stack");
    const int64_t w = planes[0]->width();
    const int64_t h = planes[0]->height();

    Raster prob(w, h, planes[0]->transform(), DType::Float32, kFloatNoData);
    Raster mask(w, h, planes[0]->transform(), DType::Byte, kMaskNoData);

    const int halo = net.receptive_halo();
    auto windows = tile_size > 0 ? tile_extent(w, h, tile_size)
                                 : std::vector<TileWindow>{{0, 0, w, h}};

    parallel_for(0, int64_t(windows.size()), jobs, [&](int64_t wi) {
        const TileWindow& t = windows[size_t(wi)];
        // Expand by the receptive halo, clipped to the raster. Clipped edges
        // coincide with the raster border where zero padding applies anyway,
        // so tiled and untiled results match bit for bit.
        int64_t c0 = std::max<int64_t>(0, t.col_off - halo);
        int64_t r0 = std::max<int64_t>(0, t.row_off - halo);
        int64_t c1 = std::min<int64_t>(w, t.col_off + t.width + halo);
        int64_t r1 = std::min<int64_t>(h, t.row_off + t.height + halo);
        Tensor in(4, int(r1 - r0), int(c1 - c0));
        for (int ch = 0; ch < 4; ++ch)
            for (int64_t row = r0; row < r1; ++row)
                for (int64_t col = c0; col < c1; ++col)
                    in.set(ch, int(row - r0), int(col - c0), feature_value(*planes[ch], row, col));
        Tensor out = net.forward(in);
        for (int64_t row = t.row_off; row < t.row_off + t.height; ++row) {
            for (int64_t col = t.col_off; col < t.col_off + t.width; ++col) {
                bool any_valid = false;
                for (const Raster* p : planes)
                    if (!p->is_nodata(p->at(row, col))) {
                        any_valid = true;
                        break;
                    }
                if (!any_valid) continue;  // stays nodata
                double pv = out.at(0, int(row - r0), int(col - c0));
                prob.set(row, col, pv);
                mask.set(row, col, pv >= threshold ? 1.0 : 0.0);
            }
        }
    });
    return {std::move(mask), std::move(prob)};
}

std::vector<SweepRow> decision_threshold_sweep(const Raster& probability, const Raster& truth,
                                               const std::vector<double>& thresholds) {
    require_same_grid(probability, truth, "decision_threshold_sweep");
    std::vector<SweepRow> rows;
    rows.reserve(thresholds.size());
    for (double th : thresholds) {
        Raster pred(probability.width(), probability.height(), probability.transform(), DType::Byte,
                    kMaskNoData);
        for (int64_t i = 0; i < probability.size(); ++i) {
            double p = probability.at_index(i);
            pred.set_index(i, probability.is_nodata(p) ? kMaskNoData : (p >= th ? 1.0 : 0.0));
        }
        Metrics m = compare_metrics(pred, truth);
        rows.push_back({th, m.precision, m.recall, m.f1});
    }
    return rows;
}

}  // namespace floodsar
