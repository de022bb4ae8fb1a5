#include "gaas/audit.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"

namespace gaas {

std::string to_csv_row(const AuditRecord& r) {
    std::string out = detail::format_iso8601(r.timestamp);
    out += ',';
    out += r.agent_id;
    out += ',';
    out += r.rule_id;
    out += ',';
    out += r.violation_type;
    out += ',';
    out += detail::render_double(r.severity);
    out += ',';
    out += detail::render_double(r.trust_before);
    out += ',';
    out += detail::render_double(r.trust_after);
    out += ',';
    out += to_string(r.decision);
    return out;
}

AuditRecord parse_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    if (fields.size() != 8)
        throw FormatError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                          std::to_string(fields.size()));
    for (auto& f : fields) f = detail::trim(f);

    AuditRecord r;
    const auto ts = detail::parse_iso8601(fields[0]);
    if (!ts) throw FormatError("line " + std::to_string(line_no) + ": bad timestamp '" + fields[0] + "'");
    r.timestamp = *ts;
    r.agent_id = fields[1];
    r.rule_id = fields[2];
    r.violation_type = fields[3];
    if (r.violation_type != "-" && !rule_type_from_string(r.violation_type))
        throw FormatError("line " + std::to_string(line_no) + ": bad violation type '" +
                          fields[3] + "'");
    const auto sev = detail::parse_double(fields[4]);
    const auto tb = detail::parse_double(fields[5]);
    const auto ta = detail::parse_double(fields[6]);
    if (!sev || !tb || !ta)
        throw FormatError("line " + std::to_string(line_no) + ": bad numeric field");
    r.severity = *sev;
    r.trust_before = *tb;
    r.trust_after = *ta;
    const auto verdict = verdict_from_string(fields[7]);
    if (!verdict)
        throw FormatError("line " + std::to_string(line_no) + ": bad decision '" + fields[7] + "'");
    r.decision = *verdict;
    return r;
}

void write_audit_csv(const std::string& path, const std::vector<AuditRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot open audit file for writing: " + path);
    out << kAuditHeader << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
    if (!out) throw StorageError("short write to audit file: " + path);
}

std::vector<AuditRecord> read_audit_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open audit file: " + path);
    std::vector<AuditRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (detail::trim(line) != kAuditHeader)
                throw FormatError("line 1: unexpected header '" + line + "'");
            continue;
        }
        if (detail::trim(line).empty()) continue;
        out.push_back(parse_csv_row(line, line_no));
    }
    return out;
}

std::vector<AuditRecord> records_for_decision(const Action& action,
                                              const std::vector<Violation>& violations,
                                              const Decision& decision) {
    std::vector<AuditRecord> rows;
    AuditRecord base;
    base.timestamp = action.timestamp;
    base.agent_id = action.agent_id;
    base.trust_before = decision.trust_before;
    base.trust_after = decision.trust_after;
    base.decision = decision.verdict;
    if (violations.empty()) {
        rows.push_back(base);  // clean row: rule "-", type "-", severity 0
        return rows;
    }
    for (const auto& v : violations) {
        AuditRecord r = base;
        r.rule_id = v.rule_id;
        r.violation_type = to_string(v.rule_type);
        r.severity = v.severity;
        rows.push_back(std::move(r));
    }
    return rows;
}

AuditStore::AuditStore(const std::string& path) : path_(path), file_backed_(true) {
    std::ifstream probe(path);
    if (probe.good()) {
        probe.close();
        records_ = read_audit_csv(path);
    } else {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw StorageError("cannot create audit file: " + path);
        out << kAuditHeader << '\n';
    }
}

void AuditStore::append(const AuditRecord& r) { append(std::vector<AuditRecord>{r}); }

void AuditStore::append(const std::vector<AuditRecord>& rs) {
    std::lock_guard lk(mu_);
    if (file_backed_) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw StorageError("cannot append to audit file: " + path_);
        for (const auto& r : rs) out << to_csv_row(r) << '\n';
        out.flush();
        if (!out) throw StorageError("short append to audit file: " + path_);
    }
    records_.insert(records_.end(), rs.begin(), rs.end());
}

std::vector<AuditRecord> AuditStore::query(const AuditQuery& q) const {
    std::lock_guard lk(mu_);
    std::vector<AuditRecord> out;
    for (const auto& r : records_) {
        if (q.agent_id && r.agent_id != *q.agent_id) continue;
        if (q.rule_id && r.rule_id != *q.rule_id) continue;
        if (q.decision && r.decision != *q.decision) continue;
        if (q.from_ts && r.timestamp < *q.from_ts) continue;
        if (q.to_ts && r.timestamp > *q.to_ts) continue;
        out.push_back(r);
    }
    return out;
}

std::vector<AuditRecord> AuditStore::all() const {
    std::lock_guard lk(mu_);
    return records_;
}

std::size_t AuditStore::size() const {
    std::lock_guard lk(mu_);
    return records_.size();
}

void verify_trust_chain(const std::vector<AuditRecord>& records) {
    // Per agent, rows appear in append order; rows sharing (timestamp,
    // trust_before, trust_after) belong to one action.
    std::map<std::string, const AuditRecord*> last_of;
    for (const auto& r : records) {
        const auto it = last_of.find(r.agent_id);
        if (it != last_of.end()) {
            const AuditRecord& prev = *it->second;
            const bool same_action = prev.timestamp == r.timestamp &&
                                     prev.trust_before == r.trust_before &&
                                     prev.trust_after == r.trust_after;
            if (same_action) {
                last_of[r.agent_id] = &r;
                continue;
            }
            if (r.trust_before != prev.trust_after)
                throw BrokenChain("agent " + r.agent_id + " at " +
                                  detail::format_iso8601(r.timestamp) + ": trust_before " +
                                  detail::render_double(r.trust_before) +
                                  " != previous trust_after " +
                                  detail::render_double(prev.trust_after));
        }
        last_of[r.agent_id] = &r;
    }
}

}  // namespace gaas
