#include "fedgraph/world_io.hpp"

#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fedgraph/csv.hpp"
#include "fedgraph/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fedgraph {

namespace {

const std::vector<std::string> kCustomerHeader = {
    "customer_id", "institution", "kind", "full_name", "date_of_birth", "nationality",
    "doc_type", "doc_number", "date_of_incorporation", "country_of_incorporation",
    "reg_type", "reg_number", "account_open_date"};

const std::vector<std::string> kPartyHeader = {
    "party_id", "institution", "kind", "full_name", "date_of_birth", "nationality",
    "doc_type", "doc_number", "date_of_incorporation", "country_of_incorporation",
    "reg_type", "reg_number"};

const std::vector<std::string> kRelationHeader = {"institution", "customer_id", "party_id",
                                                  "relation_kind"};

const std::vector<std::string> kTransactionHeader = {
    "txn_id", "timestamp", "amount", "currency", "channel",
    "source_institution", "source_customer_id", "dest_institution", "dest_customer_id"};

const std::vector<std::string> kRiskHeader = {"institution", "customer_id", "past_alert",
                                              "sar_flag", "fincrime_exit_marker"};

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& s, const std::string& where) {
    if (s == "true") return true;
    if (s == "false") return false;
    raise(errc::schema_violation, where + ": boolean must be 'true' or 'false', got '" + s + "'");
}

std::string opt_date_str(const std::optional<Date>& d) {
    return d ? format_date(*d) : std::string();
}

// ---- identity column packing shared by customers and related parties ----

void identity_columns(const Identity& id, std::vector<std::string>& out) {
    out.push_back(to_string(id.kind));
    out.push_back(id.full_name);
    out.push_back(opt_date_str(id.date_of_birth));
    out.push_back(id.nationality);
    out.push_back(id.id_document ? to_string(id.id_document->doc_type) : "");
    out.push_back(id.id_document ? id.id_document->doc_number : "");
    out.push_back(opt_date_str(id.date_of_incorporation));
    out.push_back(id.country_of_incorporation);
    out.push_back(id.company_registration ? to_string(id.company_registration->reg_type) : "");
    out.push_back(id.company_registration ? id.company_registration->reg_number : "");
}

Identity identity_from_columns(const std::vector<std::string>& row, size_t at,
                               const std::string& where) {
    Identity id;
    id.kind = parse_party_kind(row[at]);
    id.full_name = row[at + 1];
    if (!row[at + 2].empty()) id.date_of_birth = parse_date(row[at + 2]);
    id.nationality = row[at + 3];
    const std::string& doc_type = row[at + 4];
    const std::string& doc_number = row[at + 5];
    if (doc_type.empty() != doc_number.empty())
        raise(errc::schema_violation, where + ": doc_type/doc_number must be both present or both absent");
    if (!doc_type.empty()) id.id_document = IdentityDocument{parse_doc_type(doc_type), doc_number};
    if (!row[at + 6].empty()) id.date_of_incorporation = parse_date(row[at + 6]);
    id.country_of_incorporation = row[at + 7];
    const std::string& reg_type = row[at + 8];
    const std::string& reg_number = row[at + 9];
    if (reg_type.empty() != reg_number.empty())
        raise(errc::schema_violation, where + ": reg_type/reg_number must be both present or both absent");
    if (!reg_type.empty()) id.company_registration = CompanyRegistration{parse_reg_type(reg_type), reg_number};
    return id;
}

// ---- generic CSV table reader ----

class Table {
public:
    Table(const fs::path& file, const std::vector<std::string>& header) : file_(file.string()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) raise(errc::missing_file, file.string());
        csv::Reader reader(in);
        std::vector<std::string> head;
        if (!reader.next(head))
            raise(errc::schema_violation, file_ + ": missing header row");
        if (head != header) {
            std::string want;
            for (size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
            std::string got;
            for (size_t i = 0; i < head.size(); ++i) got += (i ? "," : "") + head[i];
            raise(errc::schema_violation, file_ + ": header must be '" + want + "', got '" + got + "'");
        }
        std::vector<std::string> row;
        while (reader.next(row)) {
            if (row.size() == 1 && row[0].empty()) continue; // trailing blank line
            if (row.size() != header.size())
                raise(errc::schema_violation,
                      file_ + " row " + std::to_string(reader.line()) + ": expected " +
                          std::to_string(header.size()) + " columns, got " + std::to_string(row.size()));
            rows_.push_back(row);
        }
    }

    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string where(size_t i) const { return file_ + " row " + std::to_string(i + 2); }

private:
    std::string file_;
    std::vector<std::vector<std::string>> rows_;
};

void write_file(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + file.string() + " for writing");
    out << content;
    if (!out) raise(errc::io_failure, "write failed for " + file.string());
}

} // namespace

World load_world(const fs::path& root) {
    fs::path manifest_path = root / "manifest.json";
    std::ifstream manifest_in(manifest_path, std::ios::binary);
    if (!manifest_in) raise(errc::missing_file, manifest_path.string());
    json manifest;
    try {
        manifest_in >> manifest;
    } catch (const json::exception& e) {
        raise(errc::schema_violation, manifest_path.string() + ": " + e.what());
    }

    World world;
    try {
        world.coverage.start_date = parse_date(manifest.at("coverage").at("start_date"));
        world.coverage.end_date = parse_date(manifest.at("coverage").at("end_date"));
        if (manifest.contains("generator_seed") && !manifest["generator_seed"].is_null())
            world.generator_seed = manifest["generator_seed"].get<uint64_t>();
        for (const auto& code : manifest.at("institutions"))
            world.institutions.push_back(InstitutionData{code.get<std::string>(), {}, {}, {}, {}});
    } catch (const json::exception& e) {
        raise(errc::schema_violation, manifest_path.string() + ": " + e.what());
    }

    for (auto& inst : world.institutions) {
        fs::path dir = root / inst.code;

        Table customers(dir / "customers.csv", kCustomerHeader);
        for (size_t i = 0; i < customers.rows().size(); ++i) {
            const auto& row = customers.rows()[i];
            const std::string where = customers.where(i);
            CustomerProfile c;
            c.customer_id = row[0];
            c.institution = row[1];
            c.identity = identity_from_columns(row, 2, where);
            if (row[12].empty()) raise(errc::schema_violation, where + ": account_open_date is empty");
            c.account_open_date = parse_date(row[12]);
            inst.customers.push_back(std::move(c));
        }

        Table parties(dir / "related_parties.csv", kPartyHeader);
        for (size_t i = 0; i < parties.rows().size(); ++i) {
            const auto& row = parties.rows()[i];
            RelatedParty p;
            p.party_id = row[0];
            p.institution = row[1];
            p.identity = identity_from_columns(row, 2, parties.where(i));
            inst.related_parties.push_back(std::move(p));
        }

        Table relations(dir / "relations.csv", kRelationHeader);
        for (size_t i = 0; i < relations.rows().size(); ++i) {
            const auto& row = relations.rows()[i];
            inst.relations.push_back(
                Relation{row[0], row[1], row[2], parse_relation_kind(row[3])});
        }

        Table transactions(dir / "transactions.csv", kTransactionHeader);
        for (size_t i = 0; i < transactions.rows().size(); ++i) {
            const auto& row = transactions.rows()[i];
            Transaction t;
            t.txn_id = row[0];
            t.timestamp = parse_timestamp(row[1]);
            t.amount_cents = parse_amount(row[2]);
            t.currency = row[3];
            t.channel = parse_channel(row[4]);
            t.source = AccountRef{row[5], row[6]};
            t.dest = AccountRef{row[7], row[8]};
            inst.transactions.push_back(std::move(t));
        }

        Table risk(dir / "risk_intel.csv", kRiskHeader);
        std::unordered_map<std::string, RiskIntel> risk_by_customer;
        for (size_t i = 0; i < risk.rows().size(); ++i) {
            const auto& row = risk.rows()[i];
            const std::string where = risk.where(i);
            if (row[0] != inst.code)
                raise(errc::schema_violation,
                      where + ": institution column says '" + row[0] + "'");
            RiskIntel r{parse_bool(row[2], where), parse_bool(row[3], where), parse_bool(row[4], where)};
            if (!risk_by_customer.emplace(row[1], r).second)
                raise(errc::duplicate_id, where + ": second risk row for customer '" + row[1] + "'");
        }
        for (auto& c : inst.customers) {
            auto it = risk_by_customer.find(c.customer_id);
            if (it == risk_by_customer.end())
                raise(errc::schema_violation,
                      (dir / "risk_intel.csv").string() + ": no row for customer '" + c.customer_id + "'");
            c.risk = it->second;
            risk_by_customer.erase(it);
        }
        if (!risk_by_customer.empty())
            raise(errc::dangling_reference,
                  (dir / "risk_intel.csv").string() + ": row for unknown customer '" +
                      risk_by_customer.begin()->first + "'");
    }

    canonicalize(world);
    validate_world(world);
    return world;
}

void save_world(const World& world, const fs::path& root) {
    World canon = world;
    canonicalize(canon);

    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) raise(errc::io_failure, "cannot create " + root.string() + ": " + ec.message());

    json manifest;
    manifest["institutions"] = json::array();
    for (const auto& inst : canon.institutions) manifest["institutions"].push_back(inst.code);
    manifest["coverage"] = {{"start_date", format_date(canon.coverage.start_date)},
                            {"end_date", format_date(canon.coverage.end_date)}};
    if (canon.generator_seed)
        manifest["generator_seed"] = *canon.generator_seed;
    else
        manifest["generator_seed"] = nullptr;
    write_file(root / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& inst : canon.institutions) {
        fs::path dir = root / inst.code;
        fs::create_directories(dir, ec);
        if (ec) raise(errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());

        std::string out = csv::join_row(kCustomerHeader);
        for (const auto& c : inst.customers) {
            std::vector<std::string> row{c.customer_id, c.institution};
            identity_columns(c.identity, row);
            row.push_back(format_date(c.account_open_date));
            out += csv::join_row(row);
        }
        write_file(dir / "customers.csv", out);

        out = csv::join_row(kPartyHeader);
        for (const auto& p : inst.related_parties) {
            std::vector<std::string> row{p.party_id, p.institution};
            identity_columns(p.identity, row);
            out += csv::join_row(row);
        }
        write_file(dir / "related_parties.csv", out);

        out = csv::join_row(kRelationHeader);
        for (const auto& r : inst.relations)
            out += csv::join_row({r.institution, r.customer_id, r.party_id, to_string(r.relation_kind)});
        write_file(dir / "relations.csv", out);

        out = csv::join_row(kTransactionHeader);
        for (const auto& t : inst.transactions)
            out += csv::join_row({t.txn_id, format_timestamp(t.timestamp), format_amount(t.amount_cents),
                                  t.currency, to_string(t.channel), t.source.institution,
                                  t.source.customer_id, t.dest.institution, t.dest.customer_id});
        write_file(dir / "transactions.csv", out);

        out = csv::join_row(kRiskHeader);
        for (const auto& c : inst.customers)
            out += csv::join_row({inst.code, c.customer_id, bool_str(c.risk.past_alert),
                                  bool_str(c.risk.sar_flag), bool_str(c.risk.fincrime_exit_marker)});
        write_file(dir / "risk_intel.csv", out);
    }
}

} // namespace fedgraph
