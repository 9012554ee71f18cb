#include "fedgraph/fed/protocol.hpp"

#include <algorithm>
#include <thread>

#include "fedgraph/error.hpp"
#include "fedgraph/rng.hpp"

namespace fedgraph::fed {

void validate_fed_config(const FedConfig& config) {
    if (config.rounds < 1) raise(errc::invalid_config, "rounds must be >= 1");
    if (config.local_epochs_per_round < 1)
        raise(errc::invalid_config, "local_epochs_per_round must be >= 1");
    if (config.roster.empty()) raise(errc::invalid_config, "party roster is empty");
    std::vector<std::string> sorted = config.roster;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        raise(errc::invalid_config, "party roster contains duplicates");
    if (config.arch.input_dim == 0) raise(errc::invalid_config, "arch.input_dim must be > 0");
    for (size_t h : config.arch.hidden)
        if (h == 0) raise(errc::invalid_config, "hidden layer width must be > 0");
}

ModelParams aggregate(const std::vector<UpdateEntry>& updates, Aggregation mode) {
    if (updates.empty()) raise(errc::empty_update_set, "no updates to aggregate");
    for (size_t i = 1; i < updates.size(); ++i)
        if (!shapes_match(updates[0].params, updates[i].params))
            raise(errc::shape_mismatch, "update " + std::to_string(i) + " has mismatched shapes");

    std::vector<double> weights(updates.size());
    if (mode == Aggregation::UniformAverage) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(updates.size()));
    } else {
        uint64_t total = 0;
        for (const auto& u : updates) total += u.sample_count;
        if (total == 0) raise(errc::empty_update_set, "sample-weighted fusion with zero samples");
        for (size_t i = 0; i < updates.size(); ++i)
            weights[i] = static_cast<double>(updates[i].sample_count) / static_cast<double>(total);
    }

    ModelParams out = updates[0].params;
    for (auto& layer : out.layers) {
        for (auto& row : layer.weights) std::fill(row.begin(), row.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    for (size_t u = 0; u < updates.size(); ++u) {
        const double w = weights[u];
        for (size_t l = 0; l < out.layers.size(); ++l) {
            const Layer& src = updates[u].params.layers[l];
            Layer& dst = out.layers[l];
            for (size_t o = 0; o < dst.weights.size(); ++o) {
                for (size_t i = 0; i < dst.weights[o].size(); ++i)
                    dst.weights[o][i] += w * src.weights[o][i];
                dst.bias[o] += w * src.bias[o];
            }
        }
    }
    return out;
}

namespace {

[[noreturn]] void abort_run(std::vector<std::unique_ptr<Channel>>& channels,
                            std::string_view code, const std::string& detail) {
    for (auto& ch : channels)
        if (ch) {
            try {
                ch->send(ErrorMsg{std::string(code), detail});
            } catch (const Error&) {
                // peer already gone; nothing to tell it
            }
        }
    raise(code, detail);
}

} // namespace

AggregatorResult run_aggregator(const FedConfig& config, Listener& listener) {
    validate_fed_config(config);
    const size_t n_parties = config.roster.size();

    // join phase: one channel per roster slot, whatever the arrival order
    std::vector<std::unique_ptr<Channel>> channels(n_parties);
    std::string negotiated_schema;
    size_t joined = 0;
    Deadline join_deadline = deadline_in(config.timeout_per_round);
    while (joined < n_parties) {
        auto channel = listener.accept(join_deadline);
        if (!channel)
            abort_run(channels, errc::party_timeout,
                      "roster incomplete: " + std::to_string(joined) + "/" +
                          std::to_string(n_parties) + " parties joined before the deadline");
        auto msg = channel->recv(join_deadline);
        if (!msg)
            abort_run(channels, errc::party_timeout, "connected party sent no Join in time");
        const Join* join = std::get_if<Join>(&*msg);
        if (!join)
            abort_run(channels, errc::malformed_payload,
                      "expected Join, got " + message_type_name(*msg));
        auto slot = std::find(config.roster.begin(), config.roster.end(), join->party_id);
        if (slot == config.roster.end()) {
            channel->send(ErrorMsg{std::string(errc::schema_mismatch),
                                   "party '" + join->party_id + "' is not on the roster"});
            abort_run(channels, errc::schema_mismatch,
                      "party '" + join->party_id + "' is not on the roster");
        }
        const size_t index = static_cast<size_t>(slot - config.roster.begin());
        if (channels[index]) {
            channel->send(ErrorMsg{std::string(errc::duplicate_join),
                                   "party '" + join->party_id + "' already joined"});
            abort_run(channels, errc::duplicate_join,
                      "party '" + join->party_id + "' already joined");
        }
        if (negotiated_schema.empty()) {
            negotiated_schema = join->schema_hash;
        } else if (join->schema_hash != negotiated_schema) {
            channel->send(ErrorMsg{std::string(errc::schema_mismatch), "schema hash differs"});
            abort_run(channels, errc::schema_mismatch,
                      "party '" + join->party_id + "' announces schema " + join->schema_hash +
                          " but the roster negotiated " + negotiated_schema);
        }
        channels[index] = std::move(channel);
        ++joined;
    }

    ModelParams params = init_params(config.arch, config.seed);
    for (size_t i = 0; i < n_parties; ++i)
        channels[i]->send(JoinAck{static_cast<uint32_t>(i), config.arch, params});

    AggregatorResult result;
    for (uint32_t round = 1; round <= config.rounds; ++round) {
        for (auto& ch : channels) ch->send(GlobalModel{round, params});

        Deadline deadline = deadline_in(config.timeout_per_round);
        std::vector<UpdateEntry> updates(n_parties);
        double loss_sum = 0.0;
        for (size_t i = 0; i < n_parties; ++i) {
            auto msg = channels[i]->recv(deadline);
            if (!msg)
                abort_run(channels, errc::party_timeout,
                          "party '" + config.roster[i] + "' sent no update for round " +
                              std::to_string(round));
            const LocalUpdate* update = std::get_if<LocalUpdate>(&*msg);
            if (!update || update->round != round || update->party_id != config.roster[i])
                abort_run(channels, errc::malformed_payload,
                          "party '" + config.roster[i] + "' sent unexpected " +
                              message_type_name(*msg) + " during round " + std::to_string(round));
            if (!shapes_match(update->params, params))
                abort_run(channels, errc::shape_mismatch,
                          "party '" + config.roster[i] + "' sent params with foreign shapes");
            updates[i] = UpdateEntry{update->params, update->sample_count};
            loss_sum += update->train_loss;
        }

        params = aggregate(updates, config.aggregation);
        result.round_log.push_back(RoundLogEntry{round, loss_sum / static_cast<double>(n_parties),
                                                 params.l2_norm()});
        for (auto& ch : channels) ch->send(RoundComplete{round});
    }

    for (auto& ch : channels) ch->send(Finish{params});
    result.final_params = std::move(params);
    return result;
}

ModelParams run_party(const PartyData& party, const PartySettings& settings,
                      size_t local_epochs_per_round, Channel& channel) {
    channel.send(Join{party.party_id, party.schema_hash});

    const Deadline handshake_deadline = deadline_in(std::chrono::milliseconds(120000));
    auto ack_msg = channel.recv(handshake_deadline);
    if (!ack_msg) raise(errc::connection_lost, "no JoinAck before the deadline");
    if (const ErrorMsg* err = std::get_if<ErrorMsg>(&*ack_msg)) raise(err->code, err->detail);
    const JoinAck* ack = std::get_if<JoinAck>(&*ack_msg);
    if (!ack) raise(errc::malformed_payload, "expected JoinAck, got " + message_type_name(*ack_msg));
    if (!party.data.rows.empty() && ack->arch.input_dim != party.data.rows[0].size())
        raise(errc::shape_mismatch,
              "negotiated input_dim " + std::to_string(ack->arch.input_dim) +
                  " does not fit local feature width " + std::to_string(party.data.rows[0].size()));

    TrainConfig train_config;
    train_config.learning_rate = settings.learning_rate;
    train_config.batch_size = settings.batch_size;
    train_config.epochs = local_epochs_per_round;
    train_config.seed = settings.train_seed;

    uint32_t last_round = 0;
    for (;;) {
        auto msg = channel.recv(deadline_in(std::chrono::milliseconds(600000)));
        if (!msg) raise(errc::connection_lost, "aggregator went silent");
        if (const ErrorMsg* err = std::get_if<ErrorMsg>(&*msg)) raise(err->code, err->detail);
        if (const Finish* fin = std::get_if<Finish>(&*msg)) return fin->final_params;
        if (std::get_if<RoundComplete>(&*msg)) continue;
        const GlobalModel* global = std::get_if<GlobalModel>(&*msg);
        if (!global)
            raise(errc::malformed_payload, "unexpected " + message_type_name(*msg) + " from aggregator");
        if (global->round <= last_round)
            raise(errc::malformed_payload, "round numbers must strictly increase");
        last_round = global->round;

        // continue the centralized epoch sequence across rounds
        train_config.epoch_offset = (global->round - 1) * local_epochs_per_round;
        TrainResult trained = train(global->params, party.data, train_config);
        channel.send(LocalUpdate{global->round, party.party_id, trained.params,
                                 party.data.size(), trained.final_loss});
    }
}

uint64_t party_train_seed(uint64_t fed_seed, size_t roster_index) {
    return fed_seed ^ fnv1a64("party:" + std::to_string(roster_index));
}

SimulationResult run_federated_simulation(const FedConfig& config,
                                          const std::vector<PartyData>& parties,
                                          TransportKind transport,
                                          const PartySettings& base_settings) {
    validate_fed_config(config);
    if (parties.size() != config.roster.size())
        raise(errc::invalid_config, "party data does not cover the roster");

    SimulationResult result;
    result.transcript = std::make_shared<Transcript>();
    std::unique_ptr<Listener> listener;
    std::unique_ptr<InProcessHub> hub;
    std::unique_ptr<SocketListener> socket_listener;
    uint16_t port = 0;
    if (transport == TransportKind::InProcess) {
        hub = std::make_unique<InProcessHub>(result.transcript.get());
        listener = hub->make_listener();
    } else {
        // the listener end records both directions, so party channels stay silent
        socket_listener = std::make_unique<SocketListener>("127.0.0.1", 0, result.transcript.get());
        port = socket_listener->port();
    }

    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> party_errors(parties.size());
    for (size_t i = 0; i < parties.size(); ++i) {
        auto slot = std::find(config.roster.begin(), config.roster.end(), parties[i].party_id);
        if (slot == config.roster.end())
            raise(errc::invalid_config, "party '" + parties[i].party_id + "' is not on the roster");
        const size_t roster_index = static_cast<size_t>(slot - config.roster.begin());
        PartySettings settings = base_settings;
        settings.train_seed = party_train_seed(config.seed, roster_index);
        threads.emplace_back([&, i, settings] {
            try {
                std::unique_ptr<Channel> channel =
                    hub ? hub->connect() : socket_connect("127.0.0.1", port, nullptr);
                run_party(parties[i], settings, config.local_epochs_per_round, *channel);
            } catch (...) {
                party_errors[i] = std::current_exception();
            }
        });
    }

    std::exception_ptr aggregator_error;
    try {
        result.aggregator = run_aggregator(config, socket_listener
                                                       ? static_cast<Listener&>(*socket_listener)
                                                       : *listener);
    } catch (...) {
        aggregator_error = std::current_exception();
    }
    for (auto& t : threads) t.join();
    if (aggregator_error) std::rethrow_exception(aggregator_error);
    for (size_t i = 0; i < party_errors.size(); ++i)
        if (party_errors[i]) std::rethrow_exception(party_errors[i]);
    return result;
}

} // namespace fedgraph::fed
