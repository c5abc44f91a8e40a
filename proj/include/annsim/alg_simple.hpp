#pragma once

#include <cstddef>

#include "annsim/core.hpp"
#include "annsim/probe_engine.hpp"
#include "annsim/search.hpp"

namespace annsim {

/// Branching factor of the k-round multi-way search: the smallest tau >= 2
/// with tau * (tau / 2)^(k-1) >= ceil(log_alpha d).
int tau_simple(int k, std::size_t d, double alpha);

/// Upper bound (tau - 1)(k - 1) + tau on main-table probes, plus the two
/// membership probes of the first round.
std::size_t simple_probe_bound(int k, int tau);

/// k-round search over the distance scales 0..I.
///
/// Each shrinking round probes the tau - 1 interior grid points of the window
/// [l, u] in parallel and keeps the sub-interval between the last empty and
/// the first non-empty cell, so the window length drops to at most
/// (u - l) / tau + 1. Once u - l <= tau, one completion round probes every
/// scale in (l, u] and returns the point stored at the smallest non-empty one.
/// The first round additionally probes the two membership tables.
///
/// Throws AssumptionViolated when the completion round is all EMPTY and
/// RoundBudgetExceeded if the session budget is smaller than params.k.
SearchResult run_simple(const Point& x, ProbeSession& session, const Params& params);

}  // namespace annsim
