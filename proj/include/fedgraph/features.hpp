#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedgraph/graph.hpp"
#include "fedgraph/model.hpp"

namespace fedgraph {

// ---------------------------------------------------------------------------
// per-account transaction statistics
// ---------------------------------------------------------------------------

/// 5 channels x 2 directions (in, out) x 6 stats (count, min, max, mean,
/// population std, sum) = 60 slots, in schema order. Channels with no
/// transactions hold all-zero slots; no slot is ever NaN.
inline constexpr size_t kTxnStatSlots = 60;

std::array<double, kTxnStatSlots> transaction_stats(const TransactionGraph& graph, uint32_t vertex);

/// Slot names in the same order ("intl_wire_in_count", ...).
const std::vector<std::string>& transaction_stat_names();

// ---------------------------------------------------------------------------
// pagerank
// ---------------------------------------------------------------------------

struct PageRankResult {
    std::vector<double> score; // sums to 1 within 1e-9
    bool converged = true;
    size_t iterations = 0;
};

/// Power iteration on the edge-collapsed simple digraph (parallel edges
/// weighted by multiplicity). Dangling mass is redistributed uniformly.
/// Non-convergence is reported through the flag, never thrown.
PageRankResult pagerank(const TransactionGraph& graph, double damping = 0.85, double tol = 1e-8,
                        size_t max_iter = 100);

// ---------------------------------------------------------------------------
// egonets
// ---------------------------------------------------------------------------

enum class RiskFlag { PastAlert, SarFlag, ExitMarker };

/// Reusable undirected 1/2-hop neighborhood walker over the collapsed
/// transaction graph.
class EgonetCounter {
public:
    EgonetCounter(const TransactionGraph& graph, const World& world);

    /// Distinct in-scope customers within undirected distance <= hops of
    /// center (center excluded) whose selected flag is set.
    size_t suspicious_count(uint32_t center, int hops, RiskFlag flag) const;

private:
    const TransactionGraph& graph_;
    std::vector<std::vector<uint32_t>> neighbors_; // collapsed, sorted
    std::vector<uint8_t> flags_;                   // bit per RiskFlag, in-scope customers only
    mutable std::vector<uint32_t> stamp_;
    mutable uint32_t generation_ = 0;
};

// ---------------------------------------------------------------------------
// temporal cycles
// ---------------------------------------------------------------------------

struct TemporalCycleParams {
    size_t max_len = 5;
    int64_t window_seconds = 30LL * 86400;
    uint64_t budget = 10'000'000; // enumeration steps before BudgetExceeded
};

/// Counts, per vertex, the simple directed cycles of length <= max_len
/// through it whose edge timestamps strictly increase along the cycle and
/// whose first-to-last span is <= window. Each cycle is enumerated exactly
/// once, anchored at its earliest edge. Throws Error(BudgetExceeded) when the
/// enumeration exceeds the step budget rather than returning a partial count.
std::vector<uint64_t> temporal_cycles(const TransactionGraph& graph,
                                      const TemporalCycleParams& params = {});

// ---------------------------------------------------------------------------
// weakly connected components (party graph)
// ---------------------------------------------------------------------------

struct ComponentInfo {
    std::string label; // smallest vertex name in the component
    size_t node_count = 0;
    size_t customers_with_alert = 0;
    size_t customers_with_sar = 0;
    size_t customers_with_exit = 0;
};

struct WccResult {
    std::vector<uint32_t> component_of; // per vertex
    std::vector<ComponentInfo> components;
};

WccResult weakly_connected_components(const PartyGraph& graph, const World& world);

struct CcFeatures {
    double alert_count = 0;
    double sar_count = 0;
    double exit_count = 0;
    double node_count = 0;
};

/// Component counts for one customer, excluding the customer's own risk
/// flags; node_count covers every vertex kind, target included.
CcFeatures cc_features(const WccResult& wcc, const PartyGraph& graph, const World& world,
                       uint32_t customer_vertex);

// ---------------------------------------------------------------------------
// conditional probability curve (Fig.-2-style analysis)
// ---------------------------------------------------------------------------

struct CurveBin {
    int64_t value = 0;
    double probability = 0.0;
    size_t support = 0;
};

/// Empirical P(label=1 | feature = v) per populated integer value; bins with
/// zero support are omitted. Throws Error(EmptyInput) for empty input.
std::vector<CurveBin> conditional_probability_curve(const std::vector<double>& feature_values,
                                                    const std::vector<uint8_t>& labels);

/// Support-weighted Spearman rank correlation between bin value and
/// probability; 0 when fewer than two bins.
double weighted_spearman(const std::vector<CurveBin>& curve);

// ---------------------------------------------------------------------------
// feature matrix
// ---------------------------------------------------------------------------

enum class FeatureSet { TransactionOnly, TransactionPlusGraph };

struct FeatureParams {
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-8;
    size_t pagerank_max_iter = 100;
    TemporalCycleParams cycles;
};

struct FeatureRow {
    std::string institution;
    std::string customer_id;
    std::vector<double> values;
    uint8_t label = 0; // fincrime_exit_marker
};

struct FeatureMatrix {
    FeatureSet feature_set = FeatureSet::TransactionOnly;
    std::vector<std::string> columns; // feature columns only (no keys, no label)
    std::vector<FeatureRow> rows;     // sorted by (institution, customer_id)

    /// Drops the graph columns, yielding the TransactionOnly schema.
    FeatureMatrix transaction_only_view() const;

    std::string to_csv() const;
};

/// Column names for a schema: 60 stats + degree_in/out, plus 8 graph columns
/// for TransactionPlusGraph.
std::vector<std::string> feature_columns(FeatureSet set);

/// One row per in-scope customer; deterministic given (world, scope, set).
FeatureMatrix build_feature_matrix(const World& world, const Scope& scope, FeatureSet set,
                                   const FeatureParams& params = {});

} // namespace fedgraph
