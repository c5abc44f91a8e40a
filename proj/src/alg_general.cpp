#include "annsim/alg_general.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace annsim {

GeneralParams params_general(int k, double c, std::size_t d, double alpha) {
    if (!(c > 2.0)) throw std::invalid_argument("params_general needs c > 2");
    const double min_k = 5.0 * c * c / (c - 2.0);
    if (!(k > min_k)) {
        throw InvalidRoundBudget("large-k search needs k > " + std::to_string(min_k) + ", got k = " +
                                 std::to_string(k));
    }
    GeneralParams gp;
    gp.s_real = (0.25 - 0.5 / c) * k - 0.25;
    gp.s_int = std::max(1, static_cast<int>(std::lround(gp.s_real)));

    const double exponent = (k - 1) / 2.0 - 2.0 * gp.s_real;
    const double target = std::ceil(std::log(static_cast<double>(d)) / std::log(alpha) / k);
    gp.tau = 2;
    while (std::pow(gp.tau / 2.0, exponent) < target) ++gp.tau;
    return gp;
}

GeneralParams params_override(int s_int, int tau) {
    if (s_int < 1) throw std::invalid_argument("override s must be at least 1");
    if (tau < 2) throw std::invalid_argument("override tau must be at least 2");
    return GeneralParams{static_cast<double>(s_int), s_int, tau, true};
}

double general_probe_bound(int k, const GeneralParams& gp) {
    const int groups = (gp.tau - 1 + gp.s_int - 1) / gp.s_int;
    return (k - 1) / 2.0 * (groups + 2) + std::max(3 * gp.tau, k) + 2;
}

std::vector<AuxAddress> build_group_addresses(int l, int u, int tau, int s_int, const Point& x,
                                              const SketchBank& aux) {
    if (u - l < 1) throw std::invalid_argument("group addresses need u > l");
    if (tau < 2) throw std::invalid_argument("group addresses need tau >= 2");
    if (s_int < 1) throw std::invalid_argument("group addresses need s >= 1");
    const int groups = (tau - 1 + s_int - 1) / s_int;
    std::vector<AuxAddress> out;
    out.reserve(static_cast<std::size_t>(groups));
    for (int j = 1; j <= groups; ++j) {
        const int first = 1 + (j - 1) * s_int;
        const int last = std::min(j * s_int, tau - 1);
        AuxAddress a;
        a.group_lo = grid_point(l, u, tau, first);
        a.group_hi = grid_point(l, u, tau, j * s_int);
        for (int r = first; r <= last; ++r) {
            const int scale = grid_point(l, u, tau, r);
            a.scales.push_back(scale);
            a.sketches.push_back(aux.apply(scale, x));
        }
        out.push_back(std::move(a));
    }
    return out;
}

SearchResult run_general(const Point& x, ProbeSession& session, const Params& params, const GeneralParams& gp) {
    if (x.size() != params.d) throw DimensionMismatch("query dimension differs from params.d");
    const auto& tables = session.tables();
    const auto& settings = tables.aux_settings();
    if (settings.s_int != gp.s_int || settings.s_real != gp.s_real) {
        throw std::invalid_argument("tables were built for different aux settings");
    }
    const int tau = gp.tau;
    const int none = gp.s_int + 1;

    int l = 0;
    int u = params.scales;
    std::vector<WindowStep> steps;
    std::optional<DataPoint> hit;
    auto degenerate = [&] {
        SearchResult result;
        result.answer = *hit;
        result.degenerate = true;
        result.steps = steps;
        return result;
    };

    while (u - l >= std::max(3 * tau, params.k)) {
        const auto key_u = tables.main_key(u, x);
        const auto groups = build_group_addresses(l, u, tau, gp.s_int, x, tables.aux_bank());
        std::vector<CellAddress> batch;
        batch.emplace_back(MainAddress{u, key_u});
        for (const auto& g : groups) batch.emplace_back(AuxCellAddress{u, key_u, g});

        const auto contents = detail::probe_with_membership(session, x, std::move(batch), hit);
        if (hit) return degenerate();

        int r_star = tau;
        for (std::size_t j = 0; j < groups.size(); ++j) {
            const int value = std::get<SmallInt>(contents[j + 1]).value;
            if (value != none) {
                r_star = static_cast<int>(j) * gp.s_int + value;
                break;
            }
        }

        WindowStep step{l, u, l, u, r_star, 1, 1};
        if (r_star == 1) {
            step.u_after = grid_point(l, u, tau, 1) + 1;
        } else {
            const int probe_scale = std::max(l, grid_point(l, u, tau, r_star - 1) - 1);
            const std::vector<CellAddress> second{MainAddress{probe_scale, tables.main_key(probe_scale, x)}};
            const auto answer = session.probe_round(second);
            step.rounds = 2;
            if (is_empty(answer.front())) {
                step.branch = 2;
                step.l_after = probe_scale;
                if (r_star < tau) step.u_after = grid_point(l, u, tau, r_star) + 1;
            } else {
                step.branch = 3;
                step.u_after = probe_scale;
            }
        }
        l = step.l_after;
        u = step.u_after;
        steps.push_back(step);
    }
    return detail::completion_round(session, x, l, u, std::move(steps));
}

}  // namespace annsim
