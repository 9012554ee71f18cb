#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "fedgraph/ml.hpp"

namespace fedgraph::fed {

// Aggregator <-> party wire protocol. Messages carry model parameters and
// scalar bookkeeping only; no row of any party's data ever crosses the wire.

struct Join {
    std::string party_id;
    std::string schema_hash;
    bool operator==(const Join&) const = default;
};

struct JoinAck {
    uint32_t party_index = 0;
    ModelArch arch;
    ModelParams initial_params;
    bool operator==(const JoinAck&) const = default;
};

struct GlobalModel {
    uint32_t round = 0;
    ModelParams params;
    bool operator==(const GlobalModel&) const = default;
};

struct LocalUpdate {
    uint32_t round = 0;
    std::string party_id;
    ModelParams params;
    uint64_t sample_count = 0;
    double train_loss = 0.0;
    bool operator==(const LocalUpdate&) const = default;
};

struct RoundComplete {
    uint32_t round = 0;
    bool operator==(const RoundComplete&) const = default;
};

struct Finish {
    ModelParams final_params;
    bool operator==(const Finish&) const = default;
};

struct ErrorMsg {
    std::string code;
    std::string detail;
    bool operator==(const ErrorMsg&) const = default;
};

using FedMessage =
    std::variant<Join, JoinAck, GlobalModel, LocalUpdate, RoundComplete, Finish, ErrorMsg>;

inline constexpr size_t kMaxFrameBytes = 64ull * 1024 * 1024;
inline constexpr uint8_t kProtocolVersion = 1;

/// Length-prefixed frame: 4-byte big-endian payload length, then a UTF-8
/// JSON payload tagged by message type. decode(encode(m)) == m; doubles
/// survive the round trip bit-exactly.
std::string encode_message(const FedMessage& msg);

/// Expects exactly one complete frame. Throws Error(MalformedPayload |
/// FrameTooLarge | UnknownTag).
FedMessage decode_message(const std::string& frame);

/// Payload-level codec used by transports that frame separately.
std::string encode_payload(const FedMessage& msg);
FedMessage decode_payload(const std::string& payload);

std::string message_type_name(const FedMessage& msg);

} // namespace fedgraph::fed
