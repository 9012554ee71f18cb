#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "fedgraph/fed/transport.hpp"
#include "fedgraph/ml.hpp"

namespace fedgraph::fed {

enum class Aggregation { UniformAverage, SampleWeighted };

struct FedConfig {
    size_t rounds = 20;
    size_t local_epochs_per_round = 5;
    std::vector<std::string> roster;            // institution codes, fixed order
    Aggregation aggregation = Aggregation::SampleWeighted;
    std::chrono::milliseconds timeout_per_round{60000};
    uint64_t seed = 0;
    ModelArch arch; // negotiated model shape announced in JoinAck
};

/// rounds >= 1, roster non-empty, arch consistent; Error(InvalidConfig) otherwise.
void validate_fed_config(const FedConfig& config);

struct UpdateEntry {
    ModelParams params;
    uint64_t sample_count = 0;
};

/// Elementwise weighted mean of the updates: sample_count/total weights for
/// SampleWeighted, 1/P for UniformAverage. Invariant under permutation of a
/// fixed multiset only up to float associativity, so callers feed updates in
/// roster order. Throws Error(EmptyUpdateSet | ShapeMismatch).
ModelParams aggregate(const std::vector<UpdateEntry>& updates, Aggregation mode);

struct RoundLogEntry {
    uint32_t round = 0;
    double mean_train_loss = 0.0;
    double param_norm = 0.0;
};

struct AggregatorResult {
    ModelParams final_params;
    std::vector<RoundLogEntry> round_log;
};

/// Runs the aggregator side: accepts one Join per roster entry, then drives
/// `rounds` synchronous rounds (broadcast GlobalModel, collect one
/// LocalUpdate per party, fuse, RoundComplete), and closes with Finish.
/// Throws Error(PartyTimeout | DuplicateJoin | SchemaMismatch | ...); on
/// failure an Error message is sent to all connected parties first.
AggregatorResult run_aggregator(const FedConfig& config, Listener& listener);

struct PartyData {
    std::string party_id;
    std::string schema_hash; // hash of the feature schema the data follows
    Dataset data;            // balanced, standardized local training set
};

struct PartySettings {
    double learning_rate = 0.05;
    size_t batch_size = 32;
    uint64_t train_seed = 0;
};

/// Runs one party: Join, then per received GlobalModel train
/// local_epochs_per_round epochs (continuing the global epoch sequence) and
/// reply with a LocalUpdate; returns the final params delivered by Finish.
/// Only parameters and scalar counts are ever transmitted.
ModelParams run_party(const PartyData& party, const PartySettings& settings,
                      size_t local_epochs_per_round, Channel& channel);

enum class TransportKind { InProcess, Socket };

struct SimulationResult {
    AggregatorResult aggregator;
    std::shared_ptr<Transcript> transcript; // every frame, both directions
};

/// One-process simulation: the aggregator plus one thread per party, over
/// either transport. Party train seeds derive from (config.seed, roster
/// index), so both transports produce identical results.
SimulationResult run_federated_simulation(const FedConfig& config,
                                          const std::vector<PartyData>& parties,
                                          TransportKind transport,
                                          const PartySettings& base_settings = {});

/// Deterministic per-party training seed.
uint64_t party_train_seed(uint64_t fed_seed, size_t roster_index);

} // namespace fedgraph::fed
