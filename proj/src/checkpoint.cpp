#include <fstream>

#include <json.hpp>

#include "its/network.hpp"

namespace its {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "its-checkpoint";
constexpr int kVersion = 1;

json config_to_json(const ItsConfig& c) {
    return json{{"iterations", c.iterations},
                {"hidden_width", c.hidden_width},
                {"embedding_width", c.embedding_width},
                {"gate_hidden_width", c.gate_hidden_width},
                {"label_hidden_width", c.label_hidden_width},
                {"max_words", c.max_words},
                {"keep_prob", c.keep_prob},
                {"use_selective_reading", c.use_selective_reading},
                {"use_concat_labeling", c.use_concat_labeling},
                {"tie_iteration_params", c.tie_iteration_params}};
}

ItsConfig config_from_json(const json& j) {
    ItsConfig c;
    c.iterations = j.at("iterations").get<int>();
    c.hidden_width = j.at("hidden_width").get<Index>();
    c.embedding_width = j.at("embedding_width").get<Index>();
    c.gate_hidden_width = j.at("gate_hidden_width").get<Index>();
    c.label_hidden_width = j.at("label_hidden_width").get<Index>();
    c.max_words = j.at("max_words").get<Index>();
    c.keep_prob = j.at("keep_prob").get<double>();
    c.use_selective_reading = j.at("use_selective_reading").get<bool>();
    c.use_concat_labeling = j.at("use_concat_labeling").get<bool>();
    c.tie_iteration_params = j.at("tie_iteration_params").get<bool>();
    return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["epoch"] = checkpoint.epoch;
    j["config"] = config_to_json(checkpoint.config);
    j["vocab"] = checkpoint.vocab_tokens;

    json params = json::object();
    for_each_parameter(const_cast<ItsParameters&>(checkpoint.params),
                       [&](const std::string& name, bool, Tensor& t) {
                           json entry;
                           entry["shape"] = t.shape();
                           std::vector<double> data(t.array().data(),
                                                    t.array().data() + t.size());
                           entry["data"] = std::move(data);
                           params[name] = std::move(entry);
                       });
    j["parameters"] = std::move(params);
    atomic_write(path, j.dump());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError("checkpoint " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormat) {
        throw DataError("checkpoint " + path.string() + ": not an its-checkpoint file");
    }
    if (j.value("version", 0) != kVersion) {
        throw DataError("checkpoint " + path.string() + ": unsupported version " +
                        std::to_string(j.value("version", 0)));
    }

    Checkpoint out;
    out.epoch = j.value("epoch", 0);
    out.config = config_from_json(j.at("config"));
    out.vocab_tokens = j.at("vocab").get<std::vector<std::string>>();

    const json& params = j.at("parameters");
    out.params = make_parameters(out.config, static_cast<Index>(out.vocab_tokens.size()));
    for_each_parameter(out.params, [&](const std::string& name, bool, Tensor& t) {
        if (!params.contains(name)) {
            throw DataError("checkpoint " + path.string() + ": missing parameter " + name);
        }
        const json& entry = params.at(name);
        const Shape shape = entry.at("shape").get<Shape>();
        if (shape != t.shape()) {
            throw DataError("checkpoint " + path.string() + ": parameter " + name + " has shape " +
                            shape_str(shape) + ", config expects " + shape_str(t.shape()));
        }
        const std::vector<double> data = entry.at("data").get<std::vector<double>>();
        if (static_cast<Index>(data.size()) != t.size()) {
            throw DataError("checkpoint " + path.string() + ": parameter " + name +
                            " has wrong element count");
        }
        Array values = Eigen::Map<const Array>(data.data(), static_cast<Index>(data.size()));
        t = Tensor(shape, std::move(values));
    });
    return out;
}

}  // namespace its
