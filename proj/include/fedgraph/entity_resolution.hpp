#pragma once

#include <string>
#include <vector>

#include "fedgraph/model.hpp"

namespace fedgraph {

/// Reference to a customer or related-party profile anywhere in the World.
struct ProfileRef {
    std::string institution;
    bool is_customer = true;
    std::string id;

    /// Canonical key: institution, then customers before parties, then id.
    /// Group numbering and permutation invariance both hang off this order.
    std::string sort_key() const {
        return institution + "/" + (is_customer ? "C/" : "P/") + id;
    }
    auto operator<=>(const ProfileRef&) const = default;
};

/// Normalized identity tuple. Two profiles match iff they share a key.
/// component 0 distinguishes Individual from Business and name-rule from
/// document-rule, so the four disjuncts never cross.
struct EntityKey {
    std::string packed;
    auto operator<=>(const EntityKey&) const = default;
};

/// Text normalization applied before comparison: trim, collapse internal
/// whitespace runs to one space, ASCII case-fold. Inputs are expected to be
/// UTF-8 NFC already; bytes outside ASCII pass through untouched.
std::string normalize_text(const std::string& s);

/// Identifier normalization: normalize_text plus stripping spaces and hyphens.
std::string normalize_identifier(const std::string& s);

/// 0, 1 or 2 keys: one per fully-populated rule disjunct.
std::vector<EntityKey> entity_key(const Identity& identity);

struct GroupAssignment {
    std::string group_id;            // "GCP<n>" if any member is a customer, else "GRP<n>"
    std::vector<ProfileRef> members; // sorted by sort_key
    bool operator==(const GroupAssignment&) const = default;
};

/// Partitions every profile in the World into entity groups: the transitive
/// closure of the pairwise rule match. Output and group ids are independent
/// of input order. Profiles with no complete key form singletons.
std::vector<GroupAssignment> resolve(const World& world);

/// Same partition restricted to one bank's profiles (local scope).
std::vector<GroupAssignment> resolve_institution(const InstitutionData& inst);

} // namespace fedgraph
