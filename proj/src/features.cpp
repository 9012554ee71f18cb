#include "fedgraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "fedgraph/error.hpp"

namespace fedgraph {

// ---------------------------------------------------------------------------
// transaction statistics
// ---------------------------------------------------------------------------

namespace {

const char* kChannelTokens[kChannelCount] = {"intl_wire", "domestic_wire", "credit", "cash",
                                             "check"};
const char* kStatTokens[6] = {"count", "min", "max", "mean", "std", "sum"};

} // namespace

const std::vector<std::string>& transaction_stat_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (int c = 0; c < kChannelCount; ++c)
            for (const char* dir : {"in", "out"})
                for (const char* stat : kStatTokens)
                    out.push_back(std::string(kChannelTokens[c]) + "_" + dir + "_" + stat);
        return out;
    }();
    return names;
}

std::array<double, kTxnStatSlots> transaction_stats(const TransactionGraph& graph,
                                                    uint32_t vertex) {
    // accumulate per (channel, direction): count, min, max, sum, sum of squares
    struct Acc {
        uint64_t count = 0;
        double min = 0, max = 0, sum = 0, sum_sq = 0;
        void add(double x) {
            if (count == 0) {
                min = max = x;
            } else {
                min = std::min(min, x);
                max = std::max(max, x);
            }
            ++count;
            sum += x;
            sum_sq += x * x;
        }
    };
    Acc acc[kChannelCount][2];

    auto scan = [&](const std::vector<uint32_t>& begin, const std::vector<uint32_t>& index,
                    int dir) {
        for (uint32_t i = begin[vertex]; i < begin[vertex + 1]; ++i) {
            const TxnEdge& e = graph.edges[index[i]];
            acc[static_cast<int>(e.channel)][dir].add(static_cast<double>(e.amount_cents) / 100.0);
        }
    };
    scan(graph.in_begin, graph.in_edge, 0);
    scan(graph.out_begin, graph.out_edge, 1);

    std::array<double, kTxnStatSlots> out{};
    size_t slot = 0;
    for (int c = 0; c < kChannelCount; ++c) {
        for (int dir = 0; dir < 2; ++dir) {
            const Acc& a = acc[c][dir];
            double mean = a.count ? a.sum / static_cast<double>(a.count) : 0.0;
            double variance =
                a.count ? std::max(0.0, a.sum_sq / static_cast<double>(a.count) - mean * mean) : 0.0;
            out[slot++] = static_cast<double>(a.count);
            out[slot++] = a.min;
            out[slot++] = a.max;
            out[slot++] = mean;
            out[slot++] = std::sqrt(variance);
            out[slot++] = a.sum;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// pagerank
// ---------------------------------------------------------------------------

PageRankResult pagerank(const TransactionGraph& graph, double damping, double tol,
                        size_t max_iter) {
    const size_t n = graph.vertices.size();
    PageRankResult result;
    if (n == 0) return result;

    // collapse parallel edges to multiplicity weights
    std::unordered_map<uint64_t, double> weight;
    weight.reserve(graph.edges.size());
    std::vector<double> out_weight(n, 0.0);
    for (const auto& e : graph.edges) {
        weight[static_cast<uint64_t>(e.source) * n + e.dest] += 1.0;
        out_weight[e.source] += 1.0;
    }
    // transposed adjacency (incoming contributions), deterministic order
    std::vector<std::vector<std::pair<uint32_t, double>>> incoming(n);
    {
        std::vector<std::pair<uint64_t, double>> sorted(weight.begin(), weight.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [key, w] : sorted) {
            uint32_t u = static_cast<uint32_t>(key / n);
            uint32_t v = static_cast<uint32_t>(key % n);
            incoming[v].emplace_back(u, w / out_weight[u]);
        }
    }

    std::vector<double> rank(n, 1.0 / static_cast<double>(n)), next(n);
    const double base = (1.0 - damping) / static_cast<double>(n);
    result.converged = false;
    for (size_t iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (size_t v = 0; v < n; ++v)
            if (out_weight[v] == 0.0) dangling += rank[v];
        const double share = damping * dangling / static_cast<double>(n);
        for (size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (const auto& [u, p] : incoming[v]) s += rank[u] * p;
            next[v] = base + share + damping * s;
        }
        double delta = 0.0;
        for (size_t v = 0; v < n; ++v) delta += std::abs(next[v] - rank[v]);
        rank.swap(next);
        result.iterations = iter + 1;
        if (delta < tol) {
            result.converged = true;
            break;
        }
    }
    result.score = std::move(rank);
    return result;
}

// ---------------------------------------------------------------------------
// egonets
// ---------------------------------------------------------------------------

EgonetCounter::EgonetCounter(const TransactionGraph& graph, const World& world) : graph_(graph) {
    const size_t n = graph.vertices.size();
    neighbors_.assign(n, {});
    for (const auto& e : graph.edges) {
        if (e.source == e.dest) continue;
        neighbors_[e.source].push_back(e.dest);
        neighbors_[e.dest].push_back(e.source);
    }
    for (auto& adj : neighbors_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    flags_.assign(n, 0);
    for (size_t v = 0; v < n; ++v) {
        if (!graph.in_scope[v]) continue;
        const CustomerProfile* c = world.find_customer(graph.vertices[v]);
        if (!c) continue;
        flags_[v] = static_cast<uint8_t>((c->risk.past_alert ? 1 : 0) |
                                         (c->risk.sar_flag ? 2 : 0) |
                                         (c->risk.fincrime_exit_marker ? 4 : 0));
    }
    stamp_.assign(n, 0);
}

size_t EgonetCounter::suspicious_count(uint32_t center, int hops, RiskFlag flag) const {
    const uint8_t mask = flag == RiskFlag::PastAlert ? 1 : flag == RiskFlag::SarFlag ? 2 : 4;
    ++generation_;
    stamp_[center] = generation_;
    size_t count = 0;
    auto visit = [&](uint32_t v) {
        if (stamp_[v] == generation_) return false;
        stamp_[v] = generation_;
        if (graph_.in_scope[v] && (flags_[v] & mask)) ++count;
        return true;
    };
    if (hops == 1) {
        for (uint32_t v : neighbors_[center]) visit(v);
        return count;
    }
    for (uint32_t v : neighbors_[center]) {
        visit(v);
        for (uint32_t w : neighbors_[v]) visit(w);
    }
    return count;
}

// ---------------------------------------------------------------------------
// temporal cycles
// ---------------------------------------------------------------------------

namespace {

struct CycleSearch {
    const TransactionGraph& g;
    const TemporalCycleParams& params;
    std::vector<uint64_t> counts;
    std::vector<uint8_t> on_path;
    std::vector<uint32_t> path; // vertices on the current path
    uint64_t steps = 0;

    CycleSearch(const TransactionGraph& graph, const TemporalCycleParams& p)
        : g(graph), params(p), counts(graph.vertices.size(), 0),
          on_path(graph.vertices.size(), 0) {}

    void charge() {
        if (++steps > params.budget)
            raise(errc::budget_exceeded,
                  "temporal cycle enumeration exceeded " + std::to_string(params.budget) +
                      " steps");
    }

    // first out-edge of v with timestamp strictly greater than ts
    uint32_t first_after(uint32_t v, Timestamp ts) const {
        uint32_t lo = g.out_begin[v], hi = g.out_begin[v + 1];
        while (lo < hi) {
            uint32_t mid = (lo + hi) / 2;
            if (g.edges[g.out_edge[mid]].timestamp <= ts)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    void extend(uint32_t root, uint32_t current, Timestamp last_ts, Timestamp deadline,
                size_t edges_used) {
        for (uint32_t i = first_after(current, last_ts); i < g.out_begin[current + 1]; ++i) {
            const TxnEdge& e = g.edges[g.out_edge[i]];
            if (e.timestamp > deadline) break;
            charge();
            if (e.dest == root) {
                ++counts[root];
                for (uint32_t v : path) ++counts[v];
            } else if (edges_used + 1 < params.max_len && !on_path[e.dest]) {
                on_path[e.dest] = 1;
                path.push_back(e.dest);
                extend(root, e.dest, e.timestamp, deadline, edges_used + 1);
                path.pop_back();
                on_path[e.dest] = 0;
            }
        }
    }

    void run() {
        // each cycle is found exactly once, anchored at its earliest edge
        for (uint32_t root = 0; root < g.vertices.size(); ++root) {
            on_path[root] = 1;
            for (uint32_t i = g.out_begin[root]; i < g.out_begin[root + 1]; ++i) {
                const TxnEdge& e0 = g.edges[g.out_edge[i]];
                if (e0.dest == root) continue;
                charge();
                on_path[e0.dest] = 1;
                path.assign(1, e0.dest);
                extend(root, e0.dest, e0.timestamp, e0.timestamp + params.window_seconds, 1);
                on_path[e0.dest] = 0;
            }
            on_path[root] = 0;
        }
    }
};

} // namespace

std::vector<uint64_t> temporal_cycles(const TransactionGraph& graph,
                                      const TemporalCycleParams& params) {
    if (params.max_len < 2) raise(errc::invalid_config, "temporal cycle max_len must be >= 2");
    CycleSearch search(graph, params);
    search.run();
    return std::move(search.counts);
}

// ---------------------------------------------------------------------------
// weakly connected components + component features
// ---------------------------------------------------------------------------

WccResult weakly_connected_components(const PartyGraph& graph, const World& world) {
    const size_t n = graph.vertices.size();
    WccResult result;
    result.component_of.assign(n, PartyGraph::npos);

    std::vector<uint32_t> queue;
    for (uint32_t start = 0; start < n; ++start) {
        if (result.component_of[start] != PartyGraph::npos) continue;
        const uint32_t comp = static_cast<uint32_t>(result.components.size());
        ComponentInfo info;
        info.label = graph.vertices[start].name();
        queue.assign(1, start);
        result.component_of[start] = comp;
        while (!queue.empty()) {
            uint32_t v = queue.back();
            queue.pop_back();
            ++info.node_count;
            const PartyVertex& pv = graph.vertices[v];
            if (pv.kind == PartyVertexKind::Customer) {
                const CustomerProfile* c =
                    world.find_customer(AccountRef{pv.institution, pv.id});
                if (c) {
                    if (c->risk.past_alert) ++info.customers_with_alert;
                    if (c->risk.sar_flag) ++info.customers_with_sar;
                    if (c->risk.fincrime_exit_marker) ++info.customers_with_exit;
                }
            }
            info.label = std::min(info.label, pv.name());
            for (uint32_t w : graph.adjacency[v]) {
                if (result.component_of[w] == PartyGraph::npos) {
                    result.component_of[w] = comp;
                    queue.push_back(w);
                }
            }
        }
        result.components.push_back(std::move(info));
    }
    return result;
}

CcFeatures cc_features(const WccResult& wcc, const PartyGraph& graph, const World& world,
                       uint32_t customer_vertex) {
    const PartyVertex& pv = graph.vertices[customer_vertex];
    const ComponentInfo& info = wcc.components[wcc.component_of[customer_vertex]];
    const CustomerProfile* self = world.find_customer(AccountRef{pv.institution, pv.id});

    CcFeatures f;
    f.node_count = static_cast<double>(info.node_count);
    f.alert_count = static_cast<double>(info.customers_with_alert);
    f.sar_count = static_cast<double>(info.customers_with_sar);
    f.exit_count = static_cast<double>(info.customers_with_exit);
    if (self) {
        // never let the customer's own flags leak into its features
        if (self->risk.past_alert) f.alert_count -= 1;
        if (self->risk.sar_flag) f.sar_count -= 1;
        if (self->risk.fincrime_exit_marker) f.exit_count -= 1;
    }
    return f;
}

// ---------------------------------------------------------------------------
// conditional probability curve
// ---------------------------------------------------------------------------

std::vector<CurveBin> conditional_probability_curve(const std::vector<double>& feature_values,
                                                    const std::vector<uint8_t>& labels) {
    if (feature_values.empty() || labels.empty())
        raise(errc::empty_input, "conditional probability curve needs non-empty input");
    if (feature_values.size() != labels.size())
        raise(errc::empty_input, "feature/label arrays differ in length");

    std::map<int64_t, std::pair<size_t, size_t>> bins; // value -> (positives, total)
    for (size_t i = 0; i < feature_values.size(); ++i) {
        auto& [pos, total] = bins[std::llround(feature_values[i])];
        if (labels[i]) ++pos;
        ++total;
    }
    std::vector<CurveBin> out;
    out.reserve(bins.size());
    for (const auto& [value, counts] : bins)
        out.push_back(CurveBin{value, static_cast<double>(counts.first) /
                                          static_cast<double>(counts.second),
                               counts.second});
    return out;
}

double weighted_spearman(const std::vector<CurveBin>& curve) {
    const size_t n = curve.size();
    if (n < 2) return 0.0;

    // bins are already sorted and distinct in value; rank probabilities with
    // mid-ranks for ties
    std::vector<double> rank_v(n), rank_p(n);
    for (size_t i = 0; i < n; ++i) rank_v[i] = static_cast<double>(i + 1);

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return curve[a].probability < curve[b].probability; });
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n && curve[order[j]].probability == curve[order[i]].probability) ++j;
        double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k < j; ++k) rank_p[order[k]] = mid;
        i = j;
    }

    double wsum = 0, mv = 0, mp = 0;
    for (size_t i = 0; i < n; ++i) {
        double w = static_cast<double>(curve[i].support);
        wsum += w;
        mv += w * rank_v[i];
        mp += w * rank_p[i];
    }
    mv /= wsum;
    mp /= wsum;
    double cov = 0, var_v = 0, var_p = 0;
    for (size_t i = 0; i < n; ++i) {
        double w = static_cast<double>(curve[i].support);
        cov += w * (rank_v[i] - mv) * (rank_p[i] - mp);
        var_v += w * (rank_v[i] - mv) * (rank_v[i] - mv);
        var_p += w * (rank_p[i] - mp) * (rank_p[i] - mp);
    }
    if (var_v == 0 || var_p == 0) return 0.0;
    return cov / std::sqrt(var_v * var_p);
}

// ---------------------------------------------------------------------------
// feature matrix
// ---------------------------------------------------------------------------

std::vector<std::string> feature_columns(FeatureSet set) {
    std::vector<std::string> cols = transaction_stat_names();
    cols.push_back("degree_in");
    cols.push_back("degree_out");
    if (set == FeatureSet::TransactionPlusGraph) {
        for (const char* c : {"pagerank", "egonet1_sar_count", "egonet2_sar_count",
                              "temporal_cycle_count", "cc_alert_count", "cc_sar_count",
                              "cc_exit_count", "cc_node_count"})
            cols.push_back(c);
    }
    return cols;
}

FeatureMatrix build_feature_matrix(const World& world, const Scope& scope, FeatureSet set,
                                   const FeatureParams& params) {
    FeatureMatrix matrix;
    matrix.feature_set = set;
    matrix.columns = feature_columns(set);

    TransactionGraph txn = build_transaction_graph(world, scope);

    const bool with_graph = set == FeatureSet::TransactionPlusGraph;
    PageRankResult pr;
    std::vector<uint64_t> cycle_counts;
    PartyGraph party;
    WccResult wcc;
    EgonetCounter* egonets = nullptr;
    std::unique_ptr<EgonetCounter> egonet_storage;
    if (with_graph) {
        pr = pagerank(txn, params.pagerank_damping, params.pagerank_tol, params.pagerank_max_iter);
        cycle_counts = temporal_cycles(txn, params.cycles);
        egonet_storage = std::make_unique<EgonetCounter>(txn, world);
        egonets = egonet_storage.get();
        std::vector<GroupAssignment> groups = scope.is_global()
                                                  ? resolve(world)
                                                  : resolve_institution(
                                                        *world.find_institution(scope.bank()));
        party = build_party_graph(world, groups, scope);
        wcc = weakly_connected_components(party, world);
    }

    for (const auto& inst : world.institutions) {
        if (!scope.is_global() && inst.code != scope.bank()) continue;
        for (const auto& c : inst.customers) {
            FeatureRow row;
            row.institution = inst.code;
            row.customer_id = c.customer_id;
            row.label = c.risk.fincrime_exit_marker ? 1 : 0;
            row.values.reserve(matrix.columns.size());

            const uint32_t v = txn.find_vertex(AccountRef{inst.code, c.customer_id});
            auto stats = transaction_stats(txn, v);
            row.values.insert(row.values.end(), stats.begin(), stats.end());
            row.values.push_back(static_cast<double>(txn.in_begin[v + 1] - txn.in_begin[v]));
            row.values.push_back(static_cast<double>(txn.out_begin[v + 1] - txn.out_begin[v]));

            if (with_graph) {
                row.values.push_back(pr.score[v]);
                row.values.push_back(
                    static_cast<double>(egonets->suspicious_count(v, 1, RiskFlag::SarFlag)));
                row.values.push_back(
                    static_cast<double>(egonets->suspicious_count(v, 2, RiskFlag::SarFlag)));
                row.values.push_back(static_cast<double>(cycle_counts[v]));
                const uint32_t pv = party.find_customer(inst.code, c.customer_id);
                CcFeatures cc = cc_features(wcc, party, world, pv);
                row.values.push_back(cc.alert_count);
                row.values.push_back(cc.sar_count);
                row.values.push_back(cc.exit_count);
                row.values.push_back(cc.node_count);
            }
            matrix.rows.push_back(std::move(row));
        }
    }
    return matrix;
}

FeatureMatrix FeatureMatrix::transaction_only_view() const {
    FeatureMatrix out;
    out.feature_set = FeatureSet::TransactionOnly;
    out.columns = feature_columns(FeatureSet::TransactionOnly);
    const size_t keep = out.columns.size();
    out.rows.reserve(rows.size());
    for (const auto& row : rows) {
        FeatureRow r;
        r.institution = row.institution;
        r.customer_id = row.customer_id;
        r.label = row.label;
        r.values.assign(row.values.begin(), row.values.begin() + keep);
        out.rows.push_back(std::move(r));
    }
    return out;
}

std::string FeatureMatrix::to_csv() const {
    std::string out = "institution,customer_id";
    for (const auto& c : columns) out += "," + c;
    out += ",label\n";
    char buf[64];
    for (const auto& row : rows) {
        out += row.institution + "," + row.customer_id;
        for (double v : row.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += ",";
            out += buf;
        }
        out += row.label ? ",1\n" : ",0\n";
    }
    return out;
}

} // namespace fedgraph
