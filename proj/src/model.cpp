#include "fedgraph/model.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <unordered_set>

#include "fedgraph/error.hpp"

namespace fedgraph {

std::string to_string(PartyKind k) {
    return k == PartyKind::Individual ? "Individual" : "Business";
}

std::string to_string(DocType t) {
    switch (t) {
    case DocType::Passport: return "Passport";
    case DocType::NationalId: return "NationalId";
    case DocType::DrivingLicence: return "DrivingLicence";
    }
    return "?";
}

std::string to_string(RegType t) {
    switch (t) {
    case RegType::CRN: return "CRN";
    case RegType::VAT: return "VAT";
    case RegType::LEI: return "LEI";
    }
    return "?";
}

std::string to_string(RelationKind k) {
    switch (k) {
    case RelationKind::Director: return "Director";
    case RelationKind::Owner: return "Owner";
    case RelationKind::Family: return "Family";
    case RelationKind::Self: return "Self";
    case RelationKind::Other: return "Other";
    }
    return "?";
}

std::string to_string(Channel c) {
    switch (c) {
    case Channel::IntlWire: return "IntlWire";
    case Channel::DomesticWire: return "DomesticWire";
    case Channel::Credit: return "Credit";
    case Channel::Cash: return "Cash";
    case Channel::Check: return "Check";
    }
    return "?";
}

namespace {
[[noreturn]] void bad_token(const char* what, const std::string& s) {
    raise(errc::schema_violation, std::string("unknown ") + what + " '" + s + "'");
}
} // namespace

PartyKind parse_party_kind(const std::string& s) {
    if (s == "Individual") return PartyKind::Individual;
    if (s == "Business") return PartyKind::Business;
    bad_token("kind", s);
}

DocType parse_doc_type(const std::string& s) {
    if (s == "Passport") return DocType::Passport;
    if (s == "NationalId") return DocType::NationalId;
    if (s == "DrivingLicence") return DocType::DrivingLicence;
    bad_token("doc_type", s);
}

RegType parse_reg_type(const std::string& s) {
    if (s == "CRN") return RegType::CRN;
    if (s == "VAT") return RegType::VAT;
    if (s == "LEI") return RegType::LEI;
    bad_token("reg_type", s);
}

RelationKind parse_relation_kind(const std::string& s) {
    if (s == "Director") return RelationKind::Director;
    if (s == "Owner") return RelationKind::Owner;
    if (s == "Family") return RelationKind::Family;
    if (s == "Self") return RelationKind::Self;
    if (s == "Other") return RelationKind::Other;
    bad_token("relation_kind", s);
}

Channel parse_channel(const std::string& s) {
    if (s == "IntlWire") return Channel::IntlWire;
    if (s == "DomesticWire") return Channel::DomesticWire;
    if (s == "Credit") return Channel::Credit;
    if (s == "Cash") return Channel::Cash;
    if (s == "Check") return Channel::Check;
    bad_token("channel", s);
}

int64_t parse_amount(const std::string& s) {
    // non-negative decimal with exactly two fractional digits, e.g. "1234.56"
    size_t dot = s.find('.');
    bool ok = !s.empty() && s[0] != '-' && dot != std::string::npos && dot > 0 &&
              dot + 3 == s.size();
    if (ok) {
        for (size_t i = 0; i < s.size(); ++i) {
            if (i == dot) continue;
            if (s[i] < '0' || s[i] > '9') {
                ok = false;
                break;
            }
        }
    }
    if (!ok)
        raise(errc::schema_violation,
              "malformed amount '" + s + "' (expected non-negative decimal with 2 fractional digits)");
    int64_t whole = 0;
    for (size_t i = 0; i < dot; ++i) whole = whole * 10 + (s[i] - '0');
    return whole * 100 + (s[dot + 1] - '0') * 10 + (s[dot + 2] - '0');
}

std::string format_amount(int64_t cents) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%" PRId64 ".%02d", cents / 100,
                  static_cast<int>(cents % 100));
    return buf;
}

namespace {

template <typename T, typename KeyFn>
const T* binary_find(const std::vector<T>& v, const std::string& key, KeyFn key_of) {
    auto it = std::lower_bound(v.begin(), v.end(), key,
                               [&](const T& a, const std::string& k) { return key_of(a) < k; });
    if (it != v.end() && key_of(*it) == key) return &*it;
    return nullptr;
}

} // namespace

const CustomerProfile* InstitutionData::find_customer(const std::string& customer_id) const {
    return binary_find(customers, customer_id,
                       [](const CustomerProfile& c) -> const std::string& { return c.customer_id; });
}

const RelatedParty* InstitutionData::find_party(const std::string& party_id) const {
    return binary_find(related_parties, party_id,
                       [](const RelatedParty& p) -> const std::string& { return p.party_id; });
}

const InstitutionData* World::find_institution(const std::string& code) const {
    auto it = std::lower_bound(institutions.begin(), institutions.end(), code,
                               [](const InstitutionData& d, const std::string& c) { return d.code < c; });
    if (it != institutions.end() && it->code == code) return &*it;
    return nullptr;
}

const CustomerProfile* World::find_customer(const AccountRef& ref) const {
    if (ref.is_external()) return nullptr;
    const InstitutionData* inst = find_institution(ref.institution);
    return inst ? inst->find_customer(ref.customer_id) : nullptr;
}

size_t World::total_customers() const {
    size_t n = 0;
    for (const auto& inst : institutions) n += inst.customers.size();
    return n;
}

size_t World::total_transactions() const {
    size_t n = 0;
    for (const auto& inst : institutions) n += inst.transactions.size();
    return n;
}

void canonicalize(World& world) {
    std::sort(world.institutions.begin(), world.institutions.end(),
              [](const InstitutionData& a, const InstitutionData& b) { return a.code < b.code; });
    for (auto& inst : world.institutions) {
        std::sort(inst.customers.begin(), inst.customers.end(),
                  [](const CustomerProfile& a, const CustomerProfile& b) {
                      return a.customer_id < b.customer_id;
                  });
        std::sort(inst.related_parties.begin(), inst.related_parties.end(),
                  [](const RelatedParty& a, const RelatedParty& b) { return a.party_id < b.party_id; });
        std::sort(inst.relations.begin(), inst.relations.end(),
                  [](const Relation& a, const Relation& b) {
                      return std::tie(a.customer_id, a.party_id, a.relation_kind) <
                             std::tie(b.customer_id, b.party_id, b.relation_kind);
                  });
        std::sort(inst.transactions.begin(), inst.transactions.end(),
                  [](const Transaction& a, const Transaction& b) { return a.txn_id < b.txn_id; });
    }
}

namespace {

void validate_identity(const Identity& id, const std::string& label) {
    if (id.full_name.empty())
        raise(errc::schema_violation, label + ": full_name is empty");
    const bool ind = id.kind == PartyKind::Individual;
    if (ind) {
        if (!id.date_of_birth) raise(errc::schema_violation, label + ": Individual lacks date_of_birth");
        if (id.nationality.empty()) raise(errc::schema_violation, label + ": Individual lacks nationality");
        if (id.date_of_incorporation || !id.country_of_incorporation.empty() || id.company_registration)
            raise(errc::schema_violation, label + ": Individual carries Business fields");
    } else {
        if (!id.date_of_incorporation)
            raise(errc::schema_violation, label + ": Business lacks date_of_incorporation");
        if (id.country_of_incorporation.empty())
            raise(errc::schema_violation, label + ": Business lacks country_of_incorporation");
        if (id.date_of_birth || !id.nationality.empty() || id.id_document)
            raise(errc::schema_violation, label + ": Business carries Individual fields");
    }
}

} // namespace

void validate_world(const World& world) {
    if (world.coverage.end_date <= world.coverage.start_date)
        raise(errc::schema_violation, "coverage window is empty or inverted");

    std::unordered_set<std::string> codes;
    for (const auto& inst : world.institutions) {
        if (inst.code.empty()) raise(errc::schema_violation, "institution with empty code");
        if (inst.code == kExternal)
            raise(errc::schema_violation, "institution code collides with the EXTERNAL sentinel");
        if (!codes.insert(inst.code).second)
            raise(errc::duplicate_id, "institution '" + inst.code + "' listed twice");
    }

    for (const auto& inst : world.institutions) {
        std::unordered_set<std::string> customer_ids;
        for (const auto& c : inst.customers) {
            std::string label = inst.code + "/customer " + c.customer_id;
            if (c.customer_id.empty()) raise(errc::schema_violation, inst.code + ": customer with empty id");
            if (c.institution != inst.code)
                raise(errc::schema_violation, label + ": institution column says '" + c.institution + "'");
            if (!customer_ids.insert(c.customer_id).second)
                raise(errc::duplicate_id, label + " appears twice");
            validate_identity(c.identity, label);
            if (c.risk.fincrime_exit_marker && !c.risk.sar_flag)
                raise(errc::schema_violation, label + ": fincrime_exit_marker set without sar_flag");
        }
        std::unordered_set<std::string> party_ids;
        for (const auto& p : inst.related_parties) {
            std::string label = inst.code + "/party " + p.party_id;
            if (p.party_id.empty()) raise(errc::schema_violation, inst.code + ": party with empty id");
            if (p.institution != inst.code)
                raise(errc::schema_violation, label + ": institution column says '" + p.institution + "'");
            if (!party_ids.insert(p.party_id).second)
                raise(errc::duplicate_id, label + " appears twice");
            validate_identity(p.identity, label);
        }
        for (const auto& r : inst.relations) {
            std::string label = inst.code + "/relation " + r.customer_id + "~" + r.party_id;
            if (r.institution != inst.code)
                raise(errc::schema_violation, label + ": institution column says '" + r.institution + "'");
            if (!customer_ids.count(r.customer_id))
                raise(errc::dangling_reference, label + ": unknown customer_id '" + r.customer_id + "'");
            if (!party_ids.count(r.party_id))
                raise(errc::dangling_reference, label + ": unknown party_id '" + r.party_id + "'");
        }
        std::unordered_set<std::string> txn_ids;
        for (const auto& t : inst.transactions) {
            std::string label = inst.code + "/transaction " + t.txn_id;
            if (t.txn_id.empty()) raise(errc::schema_violation, inst.code + ": transaction with empty id");
            if (!txn_ids.insert(t.txn_id).second)
                raise(errc::duplicate_id, label + " appears twice");
            if (t.amount_cents < 0)
                raise(errc::schema_violation, label + ": negative amount");
            if (t.source == t.dest)
                raise(errc::schema_violation, label + ": source equals dest");
            if (!world.coverage.contains(t.timestamp))
                raise(errc::schema_violation,
                      label + ": timestamp " + format_timestamp(t.timestamp) + " outside coverage");
            bool any_in_scope = false;
            for (const AccountRef* ref : {&t.source, &t.dest}) {
                if (ref->is_external()) continue;
                const InstitutionData* owner = world.find_institution(ref->institution);
                if (!owner)
                    raise(errc::schema_violation,
                          label + ": unknown institution '" + ref->institution + "'");
                if (!owner->find_customer(ref->customer_id))
                    raise(errc::dangling_reference,
                          label + ": account " + ref->institution + "/" + ref->customer_id +
                              " does not exist");
                any_in_scope = true;
            }
            if (!any_in_scope)
                raise(errc::schema_violation, label + ": no in-scope endpoint");
        }
    }
}

} // namespace fedgraph
