#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedgraph/entity_resolution.hpp"
#include "fedgraph/model.hpp"

namespace fedgraph {

/// Graph scope: a single bank's view (boundary edges kept, counterparty
/// profiles invisible) or the assembled all-bank view.
class Scope {
public:
    static Scope global() { return Scope{}; }
    static Scope local(std::string bank) {
        Scope s;
        s.bank_ = std::move(bank);
        return s;
    }
    bool is_global() const { return bank_.empty(); }
    const std::string& bank() const { return bank_; }
    std::string describe() const { return is_global() ? "global" : "local:" + bank_; }

private:
    std::string bank_;
};

struct TxnEdge {
    uint32_t source = 0;
    uint32_t dest = 0;
    Timestamp timestamp = 0;
    int64_t amount_cents = 0;
    Channel channel = Channel::Credit;
    bool boundary = false; // at least one endpoint outside scope
};

/// Directed transfer multigraph. Vertices are account references; parallel
/// edges are preserved. Vertex order is canonical (sorted refs), so every
/// derived computation is deterministic.
struct TransactionGraph {
    Scope scope;
    std::vector<AccountRef> vertices;  // sorted
    std::vector<bool> in_scope;        // vertex is a customer of a scoped bank
    std::vector<TxnEdge> edges;

    // CSR adjacency over edge indices, out-edges sorted by timestamp
    std::vector<uint32_t> out_begin;
    std::vector<uint32_t> out_edge;
    std::vector<uint32_t> in_begin;
    std::vector<uint32_t> in_edge;

    static constexpr uint32_t npos = UINT32_MAX;
    uint32_t find_vertex(const AccountRef& ref) const;
};

enum class PartyVertexKind { Customer, RelatedParty, Group };

struct PartyVertex {
    PartyVertexKind kind = PartyVertexKind::Customer;
    std::string institution; // empty for Group
    std::string id;          // customer_id / party_id / group_id

    /// Canonical name; doubles as the WCC label domain.
    std::string name() const {
        switch (kind) {
        case PartyVertexKind::Customer: return "cust:" + institution + "/" + id;
        case PartyVertexKind::RelatedParty: return "party:" + institution + "/" + id;
        default: return "group:" + id;
        }
    }
};

struct PartyEdge {
    uint32_t a = 0;
    uint32_t b = 0;
    bool membership = false;                       // group <-> profile edge
    RelationKind relation = RelationKind::Other;   // valid when !membership
};

/// Undirected party-relationship graph: customers, related parties, and the
/// grouping nodes issued by entity resolution. Customers never connect
/// directly; every path runs through a party or a group node.
struct PartyGraph {
    Scope scope;
    std::vector<PartyVertex> vertices;
    std::vector<PartyEdge> edges;
    std::vector<std::vector<uint32_t>> adjacency; // sorted, deduplicated

    static constexpr uint32_t npos = UINT32_MAX;
    uint32_t find_customer(const std::string& institution, const std::string& customer_id) const;

private:
    friend PartyGraph build_party_graph(const World&, const std::vector<GroupAssignment>&, const Scope&);
    std::vector<std::pair<std::string, uint32_t>> customer_index_; // "inst/id" -> vertex
};

/// Keeps every transaction with at least one endpoint in scope; flags those
/// whose far endpoint is external or another bank as boundary edges.
TransactionGraph build_transaction_graph(const World& world, const Scope& scope);

/// Group membership must lie entirely inside the scope, else
/// Error(InconsistentGroups).
PartyGraph build_party_graph(const World& world, const std::vector<GroupAssignment>& groups,
                             const Scope& scope);

/// GraphViz text for small fixtures (≤ 500 vertices); debug aid.
std::string to_dot(const TransactionGraph& g);
std::string to_dot(const PartyGraph& g);

} // namespace fedgraph
