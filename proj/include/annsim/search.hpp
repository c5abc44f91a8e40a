#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "annsim/core.hpp"
#include "annsim/probe_engine.hpp"
#include "annsim/tables.hpp"

namespace annsim {

/// The completion round found no non-empty cell. Only possible when the
/// sketch sets do not sandwich the Hamming balls for this query and coin.
class AssumptionViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One narrowing of the scale window [l, u].
struct WindowStep {
    int l_before = 0;
    int u_before = 0;
    int l_after = 0;
    int u_after = 0;
    int r_star = 0;
    /// 0 for the simple search; 1, 2 or 3 for the branch taken by the
    /// large-k search.
    int branch = 0;
    int rounds = 1;
};

struct SearchResult {
    DataPoint answer;
    /// Answered by one of the two membership cells in the first round.
    bool degenerate = false;
    std::vector<WindowStep> steps;
    /// Window probed by the completion round; empty when degenerate.
    int completion_l = 0;
    int completion_u = 0;
};

/// floor(l + r (u - l) / tau) for non-negative arguments.
constexpr int grid_point(int l, int u, int tau, int r) { return l + (r * (u - l)) / tau; }

namespace detail {

/// Issues one round. The first round of a session also carries the two
/// membership probes; when one of them hits, its point is returned through
/// `degenerate_hit`.
std::vector<CellContent> probe_with_membership(ProbeSession& session, const Point& x,
                                               std::vector<CellAddress> batch,
                                               std::optional<DataPoint>& degenerate_hit);

/// Probes T_i[M_i x] for l < i <= u in one round and returns the content of
/// the smallest non-empty index.
SearchResult completion_round(ProbeSession& session, const Point& x, int l, int u,
                              std::vector<WindowStep> steps);

}  // namespace detail

}  // namespace annsim
