#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "annsim/core.hpp"
#include "annsim/probe_engine.hpp"
#include "annsim/search.hpp"
#include "annsim/sketch.hpp"
#include "annsim/tables.hpp"

namespace annsim {

/// k is too small for the large-k search: it needs k > 5c^2 / (c - 2).
class InvalidRoundBudget : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GeneralParams {
    /// Exponent in the n^(-1/s) fraction test.
    double s_real = 1.0;
    /// Group width and the "none" marker s_int + 1 of the aux cells.
    int s_int = 1;
    int tau = 2;
    bool overridden = false;

    AuxSettings aux_settings() const { return {s_int, s_real}; }
};

/// s = (1/4 - 1/(2c)) k - 1/4, s_int = max(1, round(s)), and tau the smallest
/// integer >= 2 with (tau/2)^((k-1)/2 - 2s) >= ceil(log_alpha(d) / k).
GeneralParams params_general(int k, double c, std::size_t d, double alpha);

/// Explicit (s, tau) for desk-scale runs; s is used both as the group width
/// and as the fraction exponent.
GeneralParams params_override(int s_int, int tau);

/// (k-1)/2 (ceil((tau-1)/s) + 2) + max(3 tau, k) + 2.
double general_probe_bound(int k, const GeneralParams& gp);

/// Aux-table addresses for one shrinking phase: the grid points rho(1..tau-1)
/// of [l, u], cut into consecutive groups of s_int, each carrying the query's
/// aux sketches at its scales.
std::vector<AuxAddress> build_group_addresses(int l, int u, int tau, int s_int, const Point& x,
                                              const SketchBank& aux);

/// k-round search with auxiliary tables. The tables must have been built with
/// gp.aux_settings(). Each shrinking phase spends one round on T_u[M_u x] and
/// the aux cells of every group, and a second round on one main cell unless
/// the first grid point already carries a dense D set.
SearchResult run_general(const Point& x, ProbeSession& session, const Params& params, const GeneralParams& gp);

}  // namespace annsim
