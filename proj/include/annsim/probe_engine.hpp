#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "annsim/tables.hpp"

namespace annsim {

/// A probe round was requested after the round budget k was spent.
class RoundBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Session used after close, closed twice, or given an empty batch.
class SessionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct ProbeRecord {
    CellAddress address;
    CellContent content;
};

/// Immutable record of a closed session: the distinct probes of every round.
class ProbeTranscript {
public:
    ProbeTranscript(int round_budget, std::vector<std::vector<ProbeRecord>> rounds);

    int round_budget() const { return round_budget_; }
    int rounds_used() const { return static_cast<int>(rounds_.size()); }
    std::size_t probes_total() const { return probes_total_; }
    std::span<const std::vector<ProbeRecord>> rounds() const { return rounds_; }

    /// One `round <r>: <address> -> <content>` line per probe, rounds numbered from 1.
    void write(std::ostream& out) const;
    std::string to_string() const;

private:
    int round_budget_;
    std::vector<std::vector<ProbeRecord>> rounds_;
    std::size_t probes_total_ = 0;
};

/// The only gateway from a query algorithm to the tables. A batch is answered
/// as a whole, so nothing inside one round can depend on another probe of the
/// same round. Single-owner; run separate sessions for parallel queries.
class ProbeSession {
public:
    ProbeSession(const VirtualTables& tables, int round_budget);

    ProbeSession(const ProbeSession&) = delete;
    ProbeSession& operator=(const ProbeSession&) = delete;
    ProbeSession(ProbeSession&&) = default;

    const VirtualTables& tables() const { return *tables_; }
    int round_budget() const { return round_budget_; }
    int rounds_used() const { return static_cast<int>(rounds_.size()); }
    int rounds_left() const { return round_budget_ - rounds_used(); }
    std::size_t probes_total() const { return probes_total_; }
    bool closed() const { return closed_; }

    /// Answers one round. Duplicate addresses are probed (and charged) once;
    /// contents come back in request order.
    std::vector<CellContent> probe_round(std::span<const CellAddress> addresses);

    ProbeTranscript close();

private:
    void require_open() const;

    const VirtualTables* tables_;
    int round_budget_;
    std::vector<std::vector<ProbeRecord>> rounds_;
    std::size_t probes_total_ = 0;
    bool closed_ = false;
};

ProbeSession open_session(const VirtualTables& tables, int round_budget);

}  // namespace annsim
