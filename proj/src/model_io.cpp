#include "srnet/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srnet/error.hpp"

namespace srnet {

using json = nlohmann::json;

namespace {

json parse_model(const std::string& text, const char* kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (doc.value("format", "") != kModelFormat)
        throw Error("unsupported model format tag '" + doc.value("format", "") + "'");
    if (doc.value("kind", "") != kind)
        throw Error("expected a " + std::string(kind) + " model, found '" + doc.value("kind", "") + "'");
    return doc;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& text, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text << '\n';
}

}  // namespace

std::string srcnn_to_json(const SrcnnModel& model) {
    check_model(model);
    json layers = json::array();
    for (std::size_t l = 0; l < 3; ++l) {
        const auto& layer = model.layers[l];
        layers.push_back({{"type", "conv2d"},
                          {"in", layer.in_channels},
                          {"out", layer.out_channels},
                          {"kernel", layer.kernel_size},
                          {"activation", to_string(model.activations[l])}});
    }
    const json doc = {{"format", kModelFormat},
                      {"kind", "srcnn"},
                      {"padding", to_string(model.padding)},
                      {"layers", layers},
                      {"params", pack_params(model.layers)}};
    return doc.dump();
}

SrcnnModel srcnn_from_json(const std::string& text) {
    const json doc = parse_model(text, "srcnn");
    try {
        SrcnnModel model;
        model.padding = padding_from_string(doc.at("padding").get<std::string>());
        const auto& layers = doc.at("layers");
        if (layers.size() != 3) throw Error("SRCNN model must have exactly three layers");
        for (std::size_t l = 0; l < 3; ++l) {
            const auto& e = layers[l];
            model.layers[l] = ConvLayer(e.at("in").get<int>(), e.at("out").get<int>(), e.at("kernel").get<int>());
            model.activations[l] = activation_from_string(e.at("activation").get<std::string>());
        }
        const auto params = doc.at("params").get<std::vector<double>>();
        unpack_params(params, model.layers);
        check_model(model);
        return model;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed SRCNN model: ") + e.what());
    }
}

std::string mlp_to_json(const MlpModel& model) {
    check_model(model);
    json layers = json::array();
    for (std::size_t l = 0; l < model.layers.size(); ++l)
        layers.push_back({{"type", "dense"},
                          {"in", model.layers[l].in_dim},
                          {"out", model.layers[l].out_dim},
                          {"activation", to_string(model.activation(l))}});
    const json doc = {{"format", kModelFormat},
                      {"kind", "mlp"},
                      {"classes", model.class_names},
                      {"layers", layers},
                      {"params", pack_params(model.layers)}};
    return doc.dump();
}

MlpModel mlp_from_json(const std::string& text) {
    const json doc = parse_model(text, "mlp");
    try {
        MlpModel model;
        model.class_names = doc.at("classes").get<std::vector<std::string>>();
        const auto& layers = doc.at("layers");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            model.layers.emplace_back(layers[l].at("in").get<int>(), layers[l].at("out").get<int>());
            if (l + 1 < layers.size())
                model.hidden_activation = activation_from_string(layers[l].at("activation").get<std::string>());
        }
        const auto params = doc.at("params").get<std::vector<double>>();
        unpack_params(params, model.layers);
        check_model(model);
        return model;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed classifier model: ") + e.what());
    }
}

void save_srcnn(const SrcnnModel& model, const std::filesystem::path& path) { spit(srcnn_to_json(model), path); }
SrcnnModel load_srcnn(const std::filesystem::path& path) { return srcnn_from_json(slurp(path)); }
void save_mlp(const MlpModel& model, const std::filesystem::path& path) { spit(mlp_to_json(model), path); }
MlpModel load_mlp(const std::filesystem::path& path) { return mlp_from_json(slurp(path)); }

}  // namespace srnet
