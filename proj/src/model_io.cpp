#include <json.hpp>

#include "edgenilm/error.hpp"
#include "edgenilm/neuralnet.hpp"

namespace edgenilm {

namespace {

constexpr const char* kFormat = "edgenilm.mobilemini";
constexpr int kVersion = 1;

}  // namespace

std::string save_model_json(const MobileMiniModel& model) {
    using nlohmann::json;
    json arch = {{"input_length", model.arch.input_length},
                 {"classes", model.arch.classes},
                 {"stem_channels", model.arch.stem_channels},
                 {"kernel", model.arch.kernel},
                 {"se_reduction", model.arch.se_reduction}};
    json blocks = json::array();
    for (const auto& b : model.arch.blocks) {
        blocks.push_back({{"in", b.in_channels}, {"out", b.out_channels}, {"se", b.use_se}});
    }
    arch["blocks"] = blocks;

    json layers = json::array();
    const auto shapes = model.parameter_shapes();
    const auto params = model.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
        layers.push_back({{"name", params[k].first},
                          {"shape", shapes[k].second},
                          {"data", *params[k].second}});
    }
    json doc = {{"format", kFormat},
                {"version", kVersion},
                {"arch", arch},
                {"normalization", {{"mean", model.input_mean}, {"scale", model.input_scale}}},
                {"layers", layers}};
    return doc.dump(1);
}

MobileMiniModel load_model_json(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model JSON does not parse: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormat) throw ConfigError("not a MobileMini model file");
        if (doc.at("version").get<int>() != kVersion) {
            throw ConfigError("unsupported model format version " + doc.at("version").dump());
        }
        const auto& a = doc.at("arch");
        ArchSpec arch;
        arch.input_length = a.at("input_length").get<std::size_t>();
        arch.classes = a.at("classes").get<std::size_t>();
        arch.stem_channels = a.at("stem_channels").get<std::size_t>();
        arch.kernel = a.at("kernel").get<std::size_t>();
        arch.se_reduction = a.at("se_reduction").get<std::size_t>();
        arch.blocks.clear();
        for (const auto& b : a.at("blocks")) {
            arch.blocks.push_back({b.at("in").get<std::size_t>(), b.at("out").get<std::size_t>(),
                                   b.at("se").get<bool>()});
        }
        MobileMiniModel model = MobileMiniModel::create(arch, 0);

        model.input_mean = doc.at("normalization").at("mean").get<std::vector<double>>();
        model.input_scale = doc.at("normalization").at("scale").get<std::vector<double>>();
        if (model.input_mean.size() != arch.input_length ||
            model.input_scale.size() != arch.input_length) {
            throw ShapeError("normalization length does not match the model input");
        }

        const auto& layers = doc.at("layers");
        const auto shapes = model.parameter_shapes();
        auto params = model.parameters();
        if (layers.size() != params.size()) throw ShapeError("model file has the wrong layer count");
        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto& layer = layers[k];
            if (layer.at("name").get<std::string>() != params[k].first) {
                throw ShapeError("expected layer '" + params[k].first + "'");
            }
            if (layer.at("shape").get<std::vector<std::size_t>>() != shapes[k].second) {
                throw ShapeError("layer '" + params[k].first + "' has the wrong shape");
            }
            auto data = layer.at("data").get<std::vector<double>>();
            if (data.size() != params[k].second->size()) {
                throw ShapeError("layer '" + params[k].first + "' has the wrong element count");
            }
            *params[k].second = std::move(data);
        }
        return model;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model JSON: ") + e.what());
    }
}

}  // namespace edgenilm
