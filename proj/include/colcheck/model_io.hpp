#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "colcheck/encoding.hpp"
#include "colcheck/errors.hpp"
#include "colcheck/nn.hpp"

namespace colcheck {

namespace detail {

inline const char* b64_alphabet() {
    return "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

inline std::string base64_encode(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    const char* tab = b64_alphabet();
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= n; i += 3) {
        const std::uint32_t v = (p[i] << 16) | (p[i + 1] << 8) | p[i + 2];
        out.push_back(tab[(v >> 18) & 63]);
        out.push_back(tab[(v >> 12) & 63]);
        out.push_back(tab[(v >> 6) & 63]);
        out.push_back(tab[v & 63]);
    }
    if (i + 1 == n) {
        const std::uint32_t v = p[i] << 16;
        out.push_back(tab[(v >> 18) & 63]);
        out.push_back(tab[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == n) {
        const std::uint32_t v = (p[i] << 16) | (p[i + 1] << 8);
        out.push_back(tab[(v >> 18) & 63]);
        out.push_back(tab[(v >> 12) & 63]);
        out.push_back(tab[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

inline std::vector<unsigned char> base64_decode(const std::string& s) {
    static const auto lut = [] {
        std::array<std::int8_t, 256> t{};
        t.fill(-1);
        const char* tab = b64_alphabet();
        for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(tab[i])] = static_cast<std::int8_t>(i);
        return t;
    }();
    if (s.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
    std::vector<unsigned char> out;
    out.reserve(s.size() / 4 * 3);
    for (std::size_t i = 0; i < s.size(); i += 4) {
        int pad = 0;
        std::uint32_t v = 0;
        for (int j = 0; j < 4; ++j) {
            const char ch = s[i + j];
            if (ch == '=') {
                if (i + 4 != s.size() || j < 2) throw FormatError("base64: bad padding");
                ++pad;
                v <<= 6;
                continue;
            }
            if (pad > 0) throw FormatError("base64: data after padding");
            const std::int8_t x = lut[static_cast<unsigned char>(ch)];
            if (x < 0) throw FormatError("base64: invalid character");
            v = (v << 6) | static_cast<std::uint32_t>(x);
        }
        out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<unsigned char>(v & 0xff));
    }
    return out;
}

inline std::string floats_to_b64(const std::vector<float>& v) {
    return base64_encode(v.data(), v.size() * sizeof(float));
}

inline std::vector<float> b64_to_floats(const std::string& s, std::size_t expect) {
    const std::vector<unsigned char> bytes = base64_decode(s);
    if (bytes.size() != expect * sizeof(float))
        throw FormatError("model file: tensor has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(expect * sizeof(float)));
    std::vector<float> out(expect);
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

} // namespace detail

inline constexpr int kModelFormatVersion = 1;

// Trained classifier plus the encoding level its inputs were prepared with.
struct SavedModel {
    NetworkParams params;
    EncodingLevel level;
    std::size_t raw_dim = 0; // feature count before encoding
};

// One JSON header line, then one base64 line per tensor (little-endian float32,
// row-major, layer order: w, b, then gamma/beta/run_mean/run_var for BN layers).
inline void save_model(const SavedModel& model, const std::string& path) {
    const NetworkSpec& spec = model.params.spec;
    nlohmann::json header;
    header["format_version"] = kModelFormatVersion;
    header["preset"] = spec.preset;
    header["input_dim"] = spec.input_dim;
    header["raw_dim"] = model.raw_dim;
    header["L"] = model.level.L;
    header["layout"] = "per-scalar-grouped";
    header["layers"] = nlohmann::json::array();
    for (const auto& l : spec.hidden)
        header["layers"].push_back({{"width", l.width},
                                    {"activation", to_string(l.act)},
                                    {"batch_norm", l.batch_norm}});
    if (spec.skip_input_at)
        header["skip_input_at"] = *spec.skip_input_at;
    else
        header["skip_input_at"] = nullptr;

    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << header.dump() << '\n';
    for (const auto& layer : model.params.layers) {
        std::vector<float> w(layer.w.a.begin(), layer.w.a.end());
        out << detail::floats_to_b64(w) << '\n';
        out << detail::floats_to_b64(layer.b) << '\n';
        if (!layer.bn.gamma.empty()) {
            out << detail::floats_to_b64(layer.bn.gamma) << '\n';
            out << detail::floats_to_b64(layer.bn.beta) << '\n';
            out << detail::floats_to_b64(layer.bn.run_mean) << '\n';
            out << detail::floats_to_b64(layer.bn.run_var) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

inline SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("model file: empty: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file header: " + std::string(e.what()));
    }
    SavedModel model;
    try {
        if (header.at("format_version").get<int>() != kModelFormatVersion)
            throw FormatError("model file: unsupported format_version");
        if (header.at("layout").get<std::string>() != "per-scalar-grouped")
            throw FormatError("model file: unknown input layout");
        NetworkSpec spec;
        spec.preset = header.at("preset").get<std::string>();
        spec.input_dim = header.at("input_dim").get<std::size_t>();
        for (const auto& l : header.at("layers"))
            spec.hidden.push_back(LayerSpec{l.at("width").get<std::size_t>(),
                                            activation_from_string(l.at("activation").get<std::string>()),
                                            l.at("batch_norm").get<bool>()});
        if (!header.at("skip_input_at").is_null())
            spec.skip_input_at = header.at("skip_input_at").get<std::size_t>();
        spec.validate();
        model.level = EncodingLevel(header.at("L").get<int>());
        model.raw_dim = header.at("raw_dim").get<std::size_t>();
        if (encoded_length(model.raw_dim, model.level) != spec.input_dim)
            throw FormatError("model file: input_dim inconsistent with raw_dim and L");

        model.params.spec = spec;
        auto next_tensor = [&](std::size_t count) {
            if (!std::getline(in, line))
                throw FormatError("model file truncated: " + path);
            return detail::b64_to_floats(line, count);
        };
        for (std::size_t l = 0; l < spec.layer_count(); ++l) {
            LayerParamsT<float> layer;
            const std::size_t fan_in = spec.fan_in_of(l), fan_out = spec.width_of(l);
            layer.w.resize(fan_out, fan_in);
            const auto w = next_tensor(fan_out * fan_in);
            layer.w.a.assign(w.begin(), w.end());
            layer.b = next_tensor(fan_out);
            if (spec.bn_of(l)) {
                layer.bn.gamma = next_tensor(fan_out);
                layer.bn.beta = next_tensor(fan_out);
                layer.bn.run_mean = next_tensor(fan_out);
                layer.bn.run_var = next_tensor(fan_out);
            }
            model.params.layers.push_back(std::move(layer));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file: " + std::string(e.what()));
    }
    for (const auto& layer : model.params.layers)
        for (const float v : layer.w.a)
            if (!std::isfinite(v)) throw FormatError("model file: non-finite weight");
    return model;
}

} // namespace colcheck
