#include "annsim/search.hpp"

#include <string>

namespace annsim::detail {

std::vector<CellContent> probe_with_membership(ProbeSession& session, const Point& x,
                                               std::vector<CellAddress> batch,
                                               std::optional<DataPoint>& degenerate_hit) {
    if (session.rounds_used() > 0) return session.probe_round(batch);

    batch.insert(batch.begin(), {MemberAddress{MemberKind::exact, x}, MemberAddress{MemberKind::near1, x}});
    auto contents = session.probe_round(batch);
    for (std::size_t m = 0; m < 2; ++m) {
        if (const auto* hit = std::get_if<DataPoint>(&contents[m])) {
            degenerate_hit = *hit;
            break;
        }
    }
    contents.erase(contents.begin(), contents.begin() + 2);
    return contents;
}

SearchResult completion_round(ProbeSession& session, const Point& x, int l, int u, std::vector<WindowStep> steps) {
    const auto& tables = session.tables();
    std::vector<CellAddress> batch;
    for (int i = l + 1; i <= u; ++i) batch.emplace_back(MainAddress{i, tables.main_key(i, x)});

    std::optional<DataPoint> hit;
    const auto contents = probe_with_membership(session, x, std::move(batch), hit);
    SearchResult result;
    result.steps = std::move(steps);
    if (hit) {
        result.answer = *hit;
        result.degenerate = true;
        return result;
    }
    result.completion_l = l;
    result.completion_u = u;
    for (const auto& c : contents) {
        if (const auto* p = std::get_if<DataPoint>(&c)) {
            result.answer = *p;
            return result;
        }
    }
    throw AssumptionViolated("completion round over scales " + std::to_string(l + 1) + ".." + std::to_string(u) +
                             " found only EMPTY cells");
}

}  // namespace annsim::detail
