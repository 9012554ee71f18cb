#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedgraph/timeutil.hpp"

namespace fedgraph {

/// Sentinel institution token for counterparties outside the consortium.
inline const std::string kExternal = "EXTERNAL";

enum class PartyKind { Individual, Business };
enum class DocType { Passport, NationalId, DrivingLicence };
enum class RegType { CRN, VAT, LEI };
enum class RelationKind { Director, Owner, Family, Self, Other };
enum class Channel { IntlWire, DomesticWire, Credit, Cash, Check };

inline constexpr int kChannelCount = 5;

std::string to_string(PartyKind k);
std::string to_string(DocType t);
std::string to_string(RegType t);
std::string to_string(RelationKind k);
std::string to_string(Channel c);

PartyKind parse_party_kind(const std::string& s);
DocType parse_doc_type(const std::string& s);
RegType parse_reg_type(const std::string& s);
RelationKind parse_relation_kind(const std::string& s);
Channel parse_channel(const std::string& s);

/// Money is held as integer cents so file round-trips are exact.
int64_t parse_amount(const std::string& s);
std::string format_amount(int64_t cents);

struct IdentityDocument {
    DocType doc_type = DocType::Passport;
    std::string doc_number;
    auto operator<=>(const IdentityDocument&) const = default;
};

struct CompanyRegistration {
    RegType reg_type = RegType::CRN;
    std::string reg_number;
    auto operator<=>(const CompanyRegistration&) const = default;
};

/// Identity attributes shared by customer and related-party profiles.
/// Exactly the kind-appropriate group is populated; the other stays empty.
struct Identity {
    PartyKind kind = PartyKind::Individual;
    std::string full_name;
    // Individual group
    std::optional<Date> date_of_birth;
    std::string nationality;
    std::optional<IdentityDocument> id_document;
    // Business group
    std::optional<Date> date_of_incorporation;
    std::string country_of_incorporation;
    std::optional<CompanyRegistration> company_registration;

    auto operator<=>(const Identity&) const = default;
};

struct RiskIntel {
    bool past_alert = false;
    bool sar_flag = false;
    bool fincrime_exit_marker = false;
    auto operator<=>(const RiskIntel&) const = default;
};

struct CustomerProfile {
    std::string customer_id;
    std::string institution;
    Identity identity;
    Date account_open_date = 0;
    RiskIntel risk;
    auto operator<=>(const CustomerProfile&) const = default;
};

struct RelatedParty {
    std::string party_id;
    std::string institution;
    Identity identity;
    auto operator<=>(const RelatedParty&) const = default;
};

struct Relation {
    std::string institution;
    std::string customer_id;
    std::string party_id;
    RelationKind relation_kind = RelationKind::Other;
    auto operator<=>(const Relation&) const = default;
};

struct AccountRef {
    std::string institution; // bank code, or kExternal
    std::string customer_id;
    bool is_external() const { return institution == kExternal; }
    auto operator<=>(const AccountRef&) const = default;
};

struct Transaction {
    std::string txn_id;
    Timestamp timestamp = 0;
    int64_t amount_cents = 0;
    std::string currency;
    Channel channel = Channel::Credit;
    AccountRef source;
    AccountRef dest;
    auto operator<=>(const Transaction&) const = default;
};

/// One bank's tables. Lists are kept sorted by primary id (the canonical
/// form both save_world and generate_world emit).
struct InstitutionData {
    std::string code;
    std::vector<CustomerProfile> customers;
    std::vector<RelatedParty> related_parties;
    std::vector<Relation> relations;
    std::vector<Transaction> transactions;

    const CustomerProfile* find_customer(const std::string& customer_id) const;
    const RelatedParty* find_party(const std::string& party_id) const;

    auto operator<=>(const InstitutionData&) const = default;
};

struct Coverage {
    Date start_date = 0;
    Date end_date = 0; // exclusive
    bool contains(Timestamp t) const {
        return t >= timestamp_at_midnight(start_date) && t < timestamp_at_midnight(end_date);
    }
    auto operator<=>(const Coverage&) const = default;
};

/// Immutable after load/generation; safe to share read-only across threads.
struct World {
    std::vector<InstitutionData> institutions; // sorted by code
    Coverage coverage;
    std::optional<uint64_t> generator_seed;

    const InstitutionData* find_institution(const std::string& code) const;
    const CustomerProfile* find_customer(const AccountRef& ref) const;
    size_t total_customers() const;
    size_t total_transactions() const;

    bool operator==(const World&) const = default;
};

/// Sorts every table into canonical order (by primary id).
void canonicalize(World& world);

/// Checks every structural invariant; throws Error naming the offending
/// record. Called by load_world and by tests on generated output.
void validate_world(const World& world);

} // namespace fedgraph
