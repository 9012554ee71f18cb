#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fedgraph {

/// All recoverable failures carry a stable machine-readable code plus a
/// human-readable detail naming the offending record, file, or field.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

namespace errc {
// core-model
inline constexpr std::string_view missing_file = "MissingFile";
inline constexpr std::string_view schema_violation = "SchemaViolation";
inline constexpr std::string_view dangling_reference = "DanglingReference";
inline constexpr std::string_view duplicate_id = "DuplicateId";
inline constexpr std::string_view io_failure = "IoFailure";
// datagen
inline constexpr std::string_view invalid_config = "InvalidConfig";
// graph-build / graph-features
inline constexpr std::string_view inconsistent_groups = "InconsistentGroups";
inline constexpr std::string_view budget_exceeded = "BudgetExceeded";
inline constexpr std::string_view empty_input = "EmptyInput";
// ml-core
inline constexpr std::string_view dimension_mismatch = "DimensionMismatch";
inline constexpr std::string_view empty_dataset = "EmptyDataset";
inline constexpr std::string_view single_class = "SingleClass";
// fed-protocol
inline constexpr std::string_view shape_mismatch = "ShapeMismatch";
inline constexpr std::string_view empty_update_set = "EmptyUpdateSet";
inline constexpr std::string_view party_timeout = "PartyTimeout";
inline constexpr std::string_view duplicate_join = "DuplicateJoin";
inline constexpr std::string_view schema_mismatch = "SchemaMismatch";
inline constexpr std::string_view connection_lost = "ConnectionLost";
inline constexpr std::string_view frame_too_large = "FrameTooLarge";
inline constexpr std::string_view malformed_payload = "MalformedPayload";
inline constexpr std::string_view unknown_tag = "UnknownTag";
} // namespace errc

[[noreturn]] inline void raise(std::string_view code, const std::string& detail) {
    throw Error(std::string(code), detail);
}

} // namespace fedgraph
