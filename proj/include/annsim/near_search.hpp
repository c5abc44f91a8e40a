#pragma once

#include <optional>

#include "annsim/core.hpp"
#include "annsim/probe_engine.hpp"
#include "annsim/tables.hpp"

namespace annsim {

/// Answer of the near-neighbor search: a stored point, or NO when empty.
struct NearAnswer {
    std::optional<DataPoint> point;

    bool is_no() const { return !point.has_value(); }
};

/// Scale ceil(log_alpha lambda) probed for radius lambda, with lambda clamped
/// to [1, d] and the scale to [0, I].
int near_scale(double lambda, const Params& params);

/// Single-probe lambda-near-neighbor search: reads T_i[M_i x] at
/// i = near_scale(lambda) and returns its point, or NO if the cell is EMPTY.
NearAnswer run_near(const Point& x, double lambda, ProbeSession& session, const Params& params);

}  // namespace annsim
