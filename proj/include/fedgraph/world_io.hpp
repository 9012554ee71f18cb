#pragma once

#include <filesystem>

#include "fedgraph/model.hpp"

namespace fedgraph {

/// Reads manifest.json plus the five per-institution CSV files, canonicalizes
/// and validates. Throws Error(MissingFile | SchemaViolation |
/// DanglingReference | DuplicateId) naming the offending file or record.
World load_world(const std::filesystem::path& root);

/// Deterministic writer: canonical row order, LF line endings, fixed decimal
/// formats. save_world followed by load_world reproduces the World exactly,
/// and saving the same World twice produces byte-identical files.
void save_world(const World& world, const std::filesystem::path& root);

} // namespace fedgraph
