#pragma once

// Append-only audit trail. One row per (action, triggering rule); a clean
// allow writes a single placeholder row. The CSV is the system of record:
// numbers are rendered as shortest round-trip decimals so that reading a file
// back reproduces bit-identical values.

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gaas/enforcement.hpp"

namespace gaas {

inline constexpr const char* kAuditHeader =
    "timestamp,agent_id,rule_id,violation_type,severity,trust_before,trust_after,decision";

struct AuditRecord {
    std::int64_t timestamp{0};     // unix seconds, rendered ISO-8601 Z
    std::string agent_id;
    std::string rule_id{"-"};      // "-" on clean allows
    std::string violation_type{"-"};  // coercive | normative | mimetic | "-"
    double severity{0.0};
    double trust_before{1.0};
    double trust_after{1.0};
    Verdict decision{Verdict::allow};
};

std::string to_csv_row(const AuditRecord& r);

/// tolerant of surrounding whitespace per field; throws FormatError with the
/// 1-based line number on malformed input
AuditRecord parse_csv_row(const std::string& line, std::size_t line_no);

void write_audit_csv(const std::string& path, const std::vector<AuditRecord>& records);

std::vector<AuditRecord> read_audit_csv(const std::string& path);

/// builds the per-action rows for a decision (one per violation, or one clean row)
std::vector<AuditRecord> records_for_decision(const Action& action,
                                              const std::vector<Violation>& violations,
                                              const Decision& decision);

struct AuditQuery {
    std::optional<std::string> agent_id;
    std::optional<std::string> rule_id;
    std::optional<Verdict> decision;
    std::optional<std::int64_t> from_ts;  // inclusive
    std::optional<std::int64_t> to_ts;    // inclusive
};

/** Append-only store: in-memory index plus an optional CSV file kept in sync.
 *  Appends are atomic with respect to concurrent readers. */
class AuditStore {
public:
    AuditStore() = default;                       // memory only
    explicit AuditStore(const std::string& path); // file-backed, loads existing rows

    void append(const AuditRecord& r);
    void append(const std::vector<AuditRecord>& rs);

    std::vector<AuditRecord> query(const AuditQuery& q) const;
    std::vector<AuditRecord> all() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<AuditRecord> records_;
    std::string path_;
    bool file_backed_{false};
};

/// Checks per-agent trust continuity: the first row of each action carries a
/// trust_before equal to the previous action's trust_after. Rows of one action
/// share (agent, timestamp, trust pair). Throws BrokenChain on the first gap.
void verify_trust_chain(const std::vector<AuditRecord>& records);

}  // namespace gaas
