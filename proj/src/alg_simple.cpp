#include "annsim/alg_simple.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace annsim {

int tau_simple(int k, std::size_t d, double alpha) {
    if (k < 1) throw std::invalid_argument("tau_simple needs k >= 1");
    const double scales = scale_count(d, alpha);
    for (int tau = 2;; ++tau) {
        const double reach = tau * std::pow(tau / 2.0, k - 1);
        if (reach >= scales) return tau;
    }
}

std::size_t simple_probe_bound(int k, int tau) {
    return static_cast<std::size_t>((tau - 1) * (k - 1) + tau + 2);
}

SearchResult run_simple(const Point& x, ProbeSession& session, const Params& params) {
    if (x.size() != params.d) throw DimensionMismatch("query dimension differs from params.d");
    const auto& tables = session.tables();
    const int tau = tau_simple(params.k, params.d, params.alpha);

    int l = 0;
    int u = params.scales;
    std::vector<WindowStep> steps;
    while (u - l > tau) {
        std::vector<CellAddress> batch;
        for (int r = 1; r <= tau - 1; ++r) {
            const int scale = grid_point(l, u, tau, r);
            batch.emplace_back(MainAddress{scale, tables.main_key(scale, x)});
        }
        std::optional<DataPoint> hit;
        const auto contents = detail::probe_with_membership(session, x, std::move(batch), hit);
        if (hit) {
            SearchResult result;
            result.answer = *hit;
            result.degenerate = true;
            result.steps = std::move(steps);
            return result;
        }

        int r_star = tau;
        for (int r = 1; r <= tau - 1; ++r) {
            if (!is_empty(contents[static_cast<std::size_t>(r - 1)])) {
                r_star = r;
                break;
            }
        }
        WindowStep step{l, u, grid_point(l, u, tau, r_star - 1), grid_point(l, u, tau, r_star), r_star, 0, 1};
        if ((step.u_after - step.l_after) * tau > (u - l) + tau) {
            throw std::logic_error("shrinking round left a window wider than (u - l) / tau + 1");
        }
        l = step.l_after;
        u = step.u_after;
        steps.push_back(step);
    }
    return detail::completion_round(session, x, l, u, std::move(steps));
}

}  // namespace annsim
