#include "fedgraph/graph.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "fedgraph/error.hpp"

namespace fedgraph {

uint32_t TransactionGraph::find_vertex(const AccountRef& ref) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), ref);
    if (it != vertices.end() && *it == ref)
        return static_cast<uint32_t>(it - vertices.begin());
    return npos;
}

uint32_t PartyGraph::find_customer(const std::string& institution,
                                   const std::string& customer_id) const {
    std::string key = institution + "/" + customer_id;
    auto it = std::lower_bound(customer_index_.begin(), customer_index_.end(), key,
                               [](const auto& a, const std::string& k) { return a.first < k; });
    if (it != customer_index_.end() && it->first == key) return it->second;
    return npos;
}

namespace {

bool ref_in_scope(const AccountRef& ref, const Scope& scope) {
    if (ref.is_external()) return false;
    return scope.is_global() || ref.institution == scope.bank();
}

} // namespace

TransactionGraph build_transaction_graph(const World& world, const Scope& scope) {
    TransactionGraph g;
    g.scope = scope;

    // vertex set: endpoints of kept edges plus every in-scope customer
    std::vector<AccountRef> refs;
    for (const auto& inst : world.institutions) {
        bool inst_in_scope = scope.is_global() || inst.code == scope.bank();
        if (inst_in_scope)
            for (const auto& c : inst.customers)
                refs.push_back(AccountRef{inst.code, c.customer_id});
        for (const auto& t : inst.transactions) {
            if (!ref_in_scope(t.source, scope) && !ref_in_scope(t.dest, scope)) continue;
            refs.push_back(t.source);
            refs.push_back(t.dest);
        }
    }
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    g.vertices = std::move(refs);

    g.in_scope.resize(g.vertices.size());
    for (size_t i = 0; i < g.vertices.size(); ++i)
        g.in_scope[i] = ref_in_scope(g.vertices[i], scope);

    for (const auto& inst : world.institutions) {
        for (const auto& t : inst.transactions) {
            bool src_in = ref_in_scope(t.source, scope);
            bool dst_in = ref_in_scope(t.dest, scope);
            if (!src_in && !dst_in) continue;
            TxnEdge e;
            e.source = g.find_vertex(t.source);
            e.dest = g.find_vertex(t.dest);
            e.timestamp = t.timestamp;
            e.amount_cents = t.amount_cents;
            e.channel = t.channel;
            e.boundary = !(src_in && dst_in);
            g.edges.push_back(e);
        }
    }

    // CSR adjacency; out-edges time-sorted for the temporal-cycle search
    const size_t v = g.vertices.size();
    const size_t m = g.edges.size();
    std::vector<uint32_t> out_count(v + 1, 0), in_count(v + 1, 0);
    for (const auto& e : g.edges) {
        ++out_count[e.source + 1];
        ++in_count[e.dest + 1];
    }
    for (size_t i = 1; i <= v; ++i) {
        out_count[i] += out_count[i - 1];
        in_count[i] += in_count[i - 1];
    }
    g.out_begin = out_count;
    g.in_begin = in_count;
    g.out_edge.resize(m);
    g.in_edge.resize(m);
    {
        std::vector<uint32_t> o = g.out_begin, in = g.in_begin;
        for (uint32_t ei = 0; ei < m; ++ei) {
            g.out_edge[o[g.edges[ei].source]++] = ei;
            g.in_edge[in[g.edges[ei].dest]++] = ei;
        }
    }
    for (size_t vi = 0; vi < v; ++vi) {
        auto begin = g.out_edge.begin() + g.out_begin[vi];
        auto end = g.out_edge.begin() + g.out_begin[vi + 1];
        std::sort(begin, end, [&](uint32_t a, uint32_t b) {
            return std::tie(g.edges[a].timestamp, a) < std::tie(g.edges[b].timestamp, b);
        });
    }
    return g;
}

PartyGraph build_party_graph(const World& world, const std::vector<GroupAssignment>& groups,
                             const Scope& scope) {
    PartyGraph g;
    g.scope = scope;

    std::unordered_map<std::string, uint32_t> index; // vertex name -> id
    auto add_vertex = [&](PartyVertex v) -> uint32_t {
        auto [it, inserted] = index.emplace(v.name(), static_cast<uint32_t>(g.vertices.size()));
        if (inserted) g.vertices.push_back(std::move(v));
        return it->second;
    };

    for (const auto& inst : world.institutions) {
        if (!scope.is_global() && inst.code != scope.bank()) continue;
        for (const auto& c : inst.customers)
            add_vertex(PartyVertex{PartyVertexKind::Customer, inst.code, c.customer_id});
        for (const auto& p : inst.related_parties)
            add_vertex(PartyVertex{PartyVertexKind::RelatedParty, inst.code, p.party_id});
    }

    // relation edges customer <-> related party
    for (const auto& inst : world.institutions) {
        if (!scope.is_global() && inst.code != scope.bank()) continue;
        for (const auto& r : inst.relations) {
            uint32_t a = index.at(PartyVertex{PartyVertexKind::Customer, inst.code, r.customer_id}.name());
            uint32_t b = index.at(PartyVertex{PartyVertexKind::RelatedParty, inst.code, r.party_id}.name());
            g.edges.push_back(PartyEdge{a, b, false, r.relation_kind});
        }
    }

    // membership edges group <-> profile, mirroring the group assignment
    for (const auto& grp : groups) {
        uint32_t gv = add_vertex(PartyVertex{PartyVertexKind::Group, "", grp.group_id});
        for (const auto& m : grp.members) {
            auto kind = m.is_customer ? PartyVertexKind::Customer : PartyVertexKind::RelatedParty;
            auto it = index.find(PartyVertex{kind, m.institution, m.id}.name());
            if (it == index.end())
                raise(errc::inconsistent_groups,
                      "group " + grp.group_id + " references " + m.sort_key() +
                          " outside scope " + scope.describe());
            g.edges.push_back(PartyEdge{gv, it->second, true, RelationKind::Other});
        }
    }

    g.adjacency.assign(g.vertices.size(), {});
    for (const auto& e : g.edges) {
        g.adjacency[e.a].push_back(e.b);
        g.adjacency[e.b].push_back(e.a);
    }
    for (auto& adj : g.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    for (uint32_t i = 0; i < g.vertices.size(); ++i)
        if (g.vertices[i].kind == PartyVertexKind::Customer)
            g.customer_index_.emplace_back(g.vertices[i].institution + "/" + g.vertices[i].id, i);
    std::sort(g.customer_index_.begin(), g.customer_index_.end());
    return g;
}

std::string to_dot(const TransactionGraph& g) {
    if (g.vertices.size() > 500)
        raise(errc::io_failure, "DOT export is limited to 500 vertices; graph has " +
                                    std::to_string(g.vertices.size()));
    std::string out = "digraph transactions {\n";
    for (size_t i = 0; i < g.vertices.size(); ++i)
        out += "  v" + std::to_string(i) + " [label=\"" + g.vertices[i].institution + "/" +
               g.vertices[i].customer_id + "\"];\n";
    for (const auto& e : g.edges)
        out += "  v" + std::to_string(e.source) + " -> v" + std::to_string(e.dest) + " [label=\"" +
               format_amount(e.amount_cents) + (e.boundary ? " (boundary)" : "") + "\"];\n";
    out += "}\n";
    return out;
}

std::string to_dot(const PartyGraph& g) {
    if (g.vertices.size() > 500)
        raise(errc::io_failure, "DOT export is limited to 500 vertices; graph has " +
                                    std::to_string(g.vertices.size()));
    std::string out = "graph parties {\n";
    for (size_t i = 0; i < g.vertices.size(); ++i) {
        const char* shape = g.vertices[i].kind == PartyVertexKind::Group ? "diamond"
                            : g.vertices[i].kind == PartyVertexKind::Customer ? "box"
                                                                              : "ellipse";
        out += "  v" + std::to_string(i) + " [shape=" + shape + ",label=\"" + g.vertices[i].name() +
               "\"];\n";
    }
    for (const auto& e : g.edges) {
        std::string label = e.membership ? "member" : to_string(e.relation);
        out += "  v" + std::to_string(e.a) + " -- v" + std::to_string(e.b) + " [label=\"" + label +
               "\"];\n";
    }
    out += "}\n";
    return out;
}

} // namespace fedgraph
