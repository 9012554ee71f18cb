#include "fedgraph/fed/messages.hpp"

#include <nlohmann/json.hpp>

#include "fedgraph/error.hpp"

using nlohmann::json;

namespace fedgraph::fed {

namespace {

json params_to_json(const ModelParams& params) {
    json layers = json::array();
    for (const auto& layer : params.layers)
        layers.push_back(json{{"weights", layer.weights}, {"bias", layer.bias}});
    return json{{"layers", layers}};
}

ModelParams params_from_json(const json& j) {
    ModelParams params;
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        layer.weights = jl.at("weights").get<std::vector<std::vector<double>>>();
        layer.bias = jl.at("bias").get<std::vector<double>>();
        params.layers.push_back(std::move(layer));
    }
    return params;
}

json arch_to_json(const ModelArch& arch) {
    return json{{"input_dim", arch.input_dim}, {"hidden", arch.hidden}};
}

ModelArch arch_from_json(const json& j) {
    ModelArch arch;
    arch.input_dim = j.at("input_dim").get<size_t>();
    arch.hidden = j.at("hidden").get<std::vector<size_t>>();
    return arch;
}

} // namespace

std::string message_type_name(const FedMessage& msg) {
    switch (msg.index()) {
    case 0: return "Join";
    case 1: return "JoinAck";
    case 2: return "GlobalModel";
    case 3: return "LocalUpdate";
    case 4: return "RoundComplete";
    case 5: return "Finish";
    default: return "Error";
    }
}

std::string encode_payload(const FedMessage& msg) {
    json j;
    j["type"] = message_type_name(msg);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Join>) {
                j["party_id"] = m.party_id;
                j["schema_hash"] = m.schema_hash;
            } else if constexpr (std::is_same_v<T, JoinAck>) {
                j["party_index"] = m.party_index;
                j["arch"] = arch_to_json(m.arch);
                j["initial_params"] = params_to_json(m.initial_params);
            } else if constexpr (std::is_same_v<T, GlobalModel>) {
                j["round"] = m.round;
                j["params"] = params_to_json(m.params);
            } else if constexpr (std::is_same_v<T, LocalUpdate>) {
                j["round"] = m.round;
                j["party_id"] = m.party_id;
                j["params"] = params_to_json(m.params);
                j["sample_count"] = m.sample_count;
                j["train_loss"] = m.train_loss;
            } else if constexpr (std::is_same_v<T, RoundComplete>) {
                j["round"] = m.round;
            } else if constexpr (std::is_same_v<T, Finish>) {
                j["final_params"] = params_to_json(m.final_params);
            } else {
                j["code"] = m.code;
                j["detail"] = m.detail;
            }
        },
        msg);
    return j.dump();
}

FedMessage decode_payload(const std::string& payload) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::exception& e) {
        raise(errc::malformed_payload, std::string("payload is not valid JSON: ") + e.what());
    }
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "Join") return Join{j.at("party_id"), j.at("schema_hash")};
        if (type == "JoinAck")
            return JoinAck{j.at("party_index").get<uint32_t>(), arch_from_json(j.at("arch")),
                           params_from_json(j.at("initial_params"))};
        if (type == "GlobalModel")
            return GlobalModel{j.at("round").get<uint32_t>(), params_from_json(j.at("params"))};
        if (type == "LocalUpdate")
            return LocalUpdate{j.at("round").get<uint32_t>(), j.at("party_id"),
                               params_from_json(j.at("params")), j.at("sample_count").get<uint64_t>(),
                               j.at("train_loss").get<double>()};
        if (type == "RoundComplete") return RoundComplete{j.at("round").get<uint32_t>()};
        if (type == "Finish") return Finish{params_from_json(j.at("final_params"))};
        if (type == "Error") return ErrorMsg{j.at("code"), j.at("detail")};
        raise(errc::unknown_tag, "unknown message type '" + type + "'");
    } catch (const json::exception& e) {
        raise(errc::malformed_payload, std::string("payload missing required field: ") + e.what());
    }
}

std::string encode_message(const FedMessage& msg) {
    std::string payload = encode_payload(msg);
    if (payload.size() > kMaxFrameBytes)
        raise(errc::frame_too_large,
              "payload of " + std::to_string(payload.size()) + " bytes exceeds 64 MiB");
    std::string frame;
    frame.reserve(payload.size() + 4);
    const uint32_t n = static_cast<uint32_t>(payload.size());
    frame.push_back(static_cast<char>((n >> 24) & 0xff));
    frame.push_back(static_cast<char>((n >> 16) & 0xff));
    frame.push_back(static_cast<char>((n >> 8) & 0xff));
    frame.push_back(static_cast<char>(n & 0xff));
    frame += payload;
    return frame;
}

FedMessage decode_message(const std::string& frame) {
    if (frame.size() < 4) raise(errc::malformed_payload, "frame shorter than its length prefix");
    const auto b = [&](size_t i) { return static_cast<uint32_t>(static_cast<uint8_t>(frame[i])); };
    const uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
    if (n > kMaxFrameBytes)
        raise(errc::frame_too_large, "declared payload of " + std::to_string(n) + " bytes exceeds 64 MiB");
    if (frame.size() != 4 + static_cast<size_t>(n))
        raise(errc::malformed_payload,
              "frame declares " + std::to_string(n) + " payload bytes but carries " +
                  std::to_string(frame.size() - 4));
    return decode_payload(frame.substr(4));
}

} // namespace fedgraph::fed
