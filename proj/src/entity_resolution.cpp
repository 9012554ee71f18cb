#include "fedgraph/entity_resolution.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace fedgraph {

std::string normalize_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

std::string normalize_identifier(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : normalize_text(s))
        if (c != ' ' && c != '-') out.push_back(c);
    return out;
}

std::vector<EntityKey> entity_key(const Identity& id) {
    std::vector<EntityKey> keys;
    if (id.kind == PartyKind::Individual) {
        if (!id.full_name.empty() && id.date_of_birth && !id.nationality.empty())
            keys.push_back(EntityKey{"I/name|" + normalize_text(id.full_name) + "|" +
                                     format_date(*id.date_of_birth) + "|" +
                                     normalize_text(id.nationality)});
        if (id.id_document && !id.id_document->doc_number.empty() && !id.nationality.empty())
            keys.push_back(EntityKey{"I/doc|" + to_string(id.id_document->doc_type) + "|" +
                                     normalize_identifier(id.id_document->doc_number) + "|" +
                                     normalize_text(id.nationality)});
    } else {
        if (!id.full_name.empty() && id.date_of_incorporation && !id.country_of_incorporation.empty())
            keys.push_back(EntityKey{"B/name|" + normalize_text(id.full_name) + "|" +
                                     format_date(*id.date_of_incorporation) + "|" +
                                     normalize_text(id.country_of_incorporation)});
        if (id.company_registration && !id.company_registration->reg_number.empty() &&
            !id.country_of_incorporation.empty())
            keys.push_back(EntityKey{"B/reg|" + to_string(id.company_registration->reg_type) + "|" +
                                     normalize_identifier(id.company_registration->reg_number) + "|" +
                                     normalize_text(id.country_of_incorporation)});
    }
    return keys;
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // smaller index wins, keeping representatives canonical
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

std::vector<GroupAssignment> resolve_profiles(std::vector<std::pair<ProfileRef, const Identity*>> profiles) {
    // Canonical processing order makes group ids independent of input order.
    std::sort(profiles.begin(), profiles.end(),
              [](const auto& a, const auto& b) { return a.first.sort_key() < b.first.sort_key(); });

    UnionFind uf(profiles.size());
    std::unordered_map<std::string, size_t> bucket; // key -> first profile index
    for (size_t i = 0; i < profiles.size(); ++i) {
        for (const EntityKey& k : entity_key(*profiles[i].second)) {
            auto [it, inserted] = bucket.emplace(k.packed, i);
            if (!inserted) uf.unite(it->second, i);
        }
    }

    std::map<size_t, GroupAssignment> by_root; // keyed by root index = smallest member
    for (size_t i = 0; i < profiles.size(); ++i)
        by_root[uf.find(i)].members.push_back(profiles[i].first);

    std::vector<GroupAssignment> groups;
    groups.reserve(by_root.size());
    size_t next_gcp = 1, next_grp = 1;
    for (auto& [root, group] : by_root) {
        bool has_customer =
            std::any_of(group.members.begin(), group.members.end(),
                        [](const ProfileRef& m) { return m.is_customer; });
        group.group_id = has_customer ? "GCP" + std::to_string(next_gcp++)
                                      : "GRP" + std::to_string(next_grp++);
        groups.push_back(std::move(group));
    }
    return groups;
}

void collect_institution(const InstitutionData& inst,
                         std::vector<std::pair<ProfileRef, const Identity*>>& out) {
    for (const auto& c : inst.customers)
        out.emplace_back(ProfileRef{inst.code, true, c.customer_id}, &c.identity);
    for (const auto& p : inst.related_parties)
        out.emplace_back(ProfileRef{inst.code, false, p.party_id}, &p.identity);
}

} // namespace

std::vector<GroupAssignment> resolve(const World& world) {
    std::vector<std::pair<ProfileRef, const Identity*>> profiles;
    for (const auto& inst : world.institutions) collect_institution(inst, profiles);
    return resolve_profiles(std::move(profiles));
}

std::vector<GroupAssignment> resolve_institution(const InstitutionData& inst) {
    std::vector<std::pair<ProfileRef, const Identity*>> profiles;
    collect_institution(inst, profiles);
    return resolve_profiles(std::move(profiles));
}

} // namespace fedgraph
