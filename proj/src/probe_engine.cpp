#include "annsim/probe_engine.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace annsim {

ProbeTranscript::ProbeTranscript(int round_budget, std::vector<std::vector<ProbeRecord>> rounds)
    : round_budget_(round_budget), rounds_(std::move(rounds)) {
    for (const auto& r : rounds_) probes_total_ += r.size();
}

void ProbeTranscript::write(std::ostream& out) const {
    for (std::size_t r = 0; r < rounds_.size(); ++r) {
        for (const auto& probe : rounds_[r]) {
            out << "round " << (r + 1) << ": " << format_address(probe.address) << " -> "
                << format_content(probe.content) << '\n';
        }
    }
}

std::string ProbeTranscript::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

ProbeSession::ProbeSession(const VirtualTables& tables, int round_budget)
    : tables_(&tables), round_budget_(round_budget) {
    if (round_budget < 1) throw std::invalid_argument("round budget k must be at least 1");
}

void ProbeSession::require_open() const {
    if (closed_) throw SessionError("probe session is closed");
}

std::vector<CellContent> ProbeSession::probe_round(std::span<const CellAddress> addresses) {
    require_open();
    if (addresses.empty()) throw SessionError("a probe round needs at least one address");
    if (rounds_used() >= round_budget_) {
        throw RoundBudgetExceeded("round budget of " + std::to_string(round_budget_) + " exhausted");
    }

    std::vector<ProbeRecord> distinct;
    std::vector<std::size_t> slot(addresses.size());
    for (std::size_t a = 0; a < addresses.size(); ++a) {
        const auto it = std::find_if(distinct.begin(), distinct.end(),
                                     [&](const ProbeRecord& p) { return p.address == addresses[a]; });
        if (it != distinct.end()) {
            slot[a] = static_cast<std::size_t>(it - distinct.begin());
        } else {
            slot[a] = distinct.size();
            distinct.push_back({addresses[a], EmptyCell{}});
        }
    }
    for (auto& probe : distinct) probe.content = tables_->cell(probe.address);

    std::vector<CellContent> out;
    out.reserve(addresses.size());
    for (std::size_t a = 0; a < addresses.size(); ++a) out.push_back(distinct[slot[a]].content);
    probes_total_ += distinct.size();
    rounds_.push_back(std::move(distinct));
    return out;
}

ProbeTranscript ProbeSession::close() {
    require_open();
    closed_ = true;
    return ProbeTranscript(round_budget_, std::move(rounds_));
}

ProbeSession open_session(const VirtualTables& tables, int round_budget) { return ProbeSession(tables, round_budget); }

}  // namespace annsim
