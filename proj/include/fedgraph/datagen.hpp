#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fedgraph/model.hpp"
#include "fedgraph/rng.hpp"

namespace fedgraph {

/// Everything here is a stated default, not a claim about any real data set;
/// the rate fields are the ones with documented targets.
struct GenConfig {
    size_t n_institutions = 6;
    size_t customers_per_institution = 5000;
    size_t duration_days = 730;
    double sar_rate = 0.05;      // fraction of customers carrying a SAR flag
    double criminal_rate = 0.004; // fraction carrying the exit marker (ring members)
    double shared_party_rate = 0.02; // related parties drawn from the cross-bank pool
    size_t ring_count = 30;
    size_t ring_size_min = 3;
    size_t ring_size_max = 8;
    uint64_t seed = 0;

    // background-behaviour knobs
    double txn_rate_per_day = 0.04; // Poisson rate per customer
    double amount_log_mu = 6.0;     // log-normal amount parameters (currency units)
    double amount_log_sigma = 1.0;
    double ring_amount_min = 15000.0; // first-hop value range for planted cycles
    double ring_amount_max = 60000.0;
};

void validate_gen_config(const GenConfig& config);

enum class LabelProvenance { CleanBackground, RingMember, RandomFlag };

std::string to_string(LabelProvenance p);
LabelProvenance parse_label_provenance(const std::string& s);

struct GroundTruth {
    struct Ring {
        size_t ring_id = 0;
        std::vector<AccountRef> members; // cycle order
        bool operator==(const Ring&) const = default;
    };
    std::vector<Ring> rings;
    /// "INSTITUTION/customer_id" -> provenance, every customer present.
    std::map<std::string, LabelProvenance> provenance;

    bool operator==(const GroundTruth&) const = default;
};

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& file);
GroundTruth load_ground_truth(const std::filesystem::path& file);

/// Incrementally assembled World with id allocation; used by the generator
/// and exposed so ring planting can be exercised on small fixtures.
class WorldBuilder {
public:
    WorldBuilder(std::vector<std::string> institution_codes, Coverage coverage);

    InstitutionData& institution(const std::string& code);
    CustomerProfile& customer(const AccountRef& ref);

    std::string allocate_party_id(const std::string& institution_code);
    std::string allocate_txn_id(const std::string& institution_code);

    const Coverage& coverage() const { return coverage_; }

    /// Canonicalizes and hands the World over.
    World finish(std::optional<uint64_t> generator_seed);

private:
    World world_;
    Coverage coverage_;
    std::map<std::string, size_t> party_counter_;
    std::map<std::string, size_t> txn_counter_;
};

struct RingSpec {
    size_t ring_id = 0;
    std::vector<AccountRef> members; // cycle order; size >= 2, spanning >= 2 banks
    Timestamp start = 0;             // first hop no earlier than this
    int64_t window_seconds = 30LL * 86400;
};

/// Plants one laundering ring: a strictly time-increasing transaction cycle
/// through the members with 1-5% value decay per hop, one shared related
/// party identity duplicated into every member's bank, exit markers (and the
/// SAR flags they imply) on every member, and alert history on a strict
/// subset. Returns the member accounts.
std::vector<AccountRef> plant_ring(WorldBuilder& builder, const RingSpec& spec, RngStream& rng);

struct GenResult {
    World world;
    GroundTruth ground_truth;
};

/// Deterministic for a fixed config: one counter-based stream per
/// institution and per ring, all derived from config.seed.
GenResult generate_world(const GenConfig& config);

} // namespace fedgraph
