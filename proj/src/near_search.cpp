#include "annsim/near_search.hpp"

#include <algorithm>
#include <stdexcept>

namespace annsim {

int near_scale(double lambda, const Params& params) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("near-neighbor radius must be non-negative");
    const double radius = std::clamp(lambda, 1.0, static_cast<double>(params.d));
    // Same slack as scale_count so that exact powers of alpha map to their own scale.
    const double target = radius * (1.0 - 1e-12);
    int scale = 0;
    double power = 1.0;
    while (power < target) {
        power *= params.alpha;
        ++scale;
    }
    return std::min(scale, params.scales);
}

NearAnswer run_near(const Point& x, double lambda, ProbeSession& session, const Params& params) {
    if (x.size() != params.d) throw DimensionMismatch("query dimension differs from params.d");
    const int scale = near_scale(lambda, params);
    const std::vector<CellAddress> batch{MainAddress{scale, session.tables().main_key(scale, x)}};
    const auto contents = session.probe_round(batch);
    if (const auto* p = std::get_if<DataPoint>(&contents.front())) return NearAnswer{*p};
    return NearAnswer{};
}

}  // namespace annsim
